"""Seeded synthetic review corpus in the Amazon JSON-lines schema.

Ratings come from latent item quality plus user bias and noise. Review
text mixes filler words with sentiment words whose polarity follows the
rating, so text features carry signal about the label without
determining it exactly.
"""

from __future__ import annotations

import json

import numpy as np

__all__ = ["generate_reviews", "write_reviews"]

POSITIVE = ("great", "love", "excellent", "perfect", "happy", "recommend", "sturdy", "works",
            "best", "amazing", "soft", "easy")
NEGATIVE = ("broke", "terrible", "waste", "disappointed", "poor", "returned", "cheap", "awful",
            "useless", "flimsy", "leaked", "refund")
FILLER = ("the", "a", "it", "this", "product", "i", "and", "was", "for", "my", "with", "baby",
          "garden", "music", "bought", "after", "week", "size", "color", "price", "shipping",
          "box", "use", "time", "daughter", "son", "again", "would", "of", "on")
DECOR = ("!", "!!!", ":)", ":(", ".", "...", " ❤", " \U0001F600", ",")


def generate_reviews(n_reviews=2000, n_users=400, n_items=120, signal=0.85, seed=0):
    """Return a list of review dicts (reviewerID, asin, overall, reviewText, unixReviewTime).

    ``signal`` is the probability that a sentiment word agrees with the
    review's polarity; 3-star reviews draw from both lists evenly.
    """
    rng = np.random.default_rng(seed)
    quality = rng.normal(0.0, 1.0, n_items)
    bias = rng.normal(0.0, 0.5, n_users)
    item_pop = rng.dirichlet(np.full(n_items, 0.8))
    reviews = []
    for k in range(n_reviews):
        u = int(rng.integers(n_users))
        i = int(rng.choice(n_items, p=item_pop))
        score = 4.0 + 1.2 * quality[i] + bias[u] + rng.normal(0.0, 0.8)
        rating = float(np.clip(np.rint(score), 1, 5))
        words = []
        for _ in range(int(rng.integers(8, 25))):
            if rng.random() < 0.25:
                if rating == 3:
                    positive = rng.random() < 0.5
                else:
                    positive = (rng.random() < signal) == (rating >= 4)
                pool = POSITIVE if positive else NEGATIVE
            else:
                pool = FILLER
            word = pool[int(rng.integers(len(pool)))]
            if rng.random() < 0.1:
                word = word.capitalize()
            if rng.random() < 0.08:
                word += DECOR[int(rng.integers(len(DECOR)))]
            words.append(word)
        reviews.append({
            "reviewerID": f"U{u:04d}",
            "asin": f"B{i:05d}",
            "overall": rating,
            "reviewText": " ".join(words),
            "unixReviewTime": 1_300_000_000 + 3600 * k,
        })
    return reviews


def write_reviews(reviews, fh):
    for review in reviews:
        fh.write(json.dumps(review, ensure_ascii=False) + "\n")
