import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import io
import json

import pytest

from passerrec.data import label_records, parse_reviews
from passerrec.synthetic import generate_reviews


def synthetic_examples(n, seed=0):
    raw = "".join(json.dumps(r) + "\n" for r in generate_reviews(n, n_users=max(20, n // 5),
                                                                  n_items=max(10, n // 16), seed=seed))
    records, _ = parse_reviews(io.BytesIO(raw.encode()))
    return label_records(records)


@pytest.fixture(scope="session")
def examples_200():
    return synthetic_examples(200)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
