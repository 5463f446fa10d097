"""Small argument-checking helpers shared across modules."""

import numbers

import numpy as np


def check_fraction(value, name="fraction"):
    if not isinstance(value, numbers.Real) or not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie strictly between 0 and 1, got {value!r}")
    return float(value)


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_finite_vector(x, name="vector"):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite entries")
    return x


def check_bounds(bounds, dim=None):
    """Return bounds as a ``(d, 2)`` float array with ``lo < hi`` per row.

    A single ``(lo, hi)`` pair is broadcast to ``dim`` rows.
    """
    b = np.asarray(bounds, dtype=float)
    if b.ndim == 1:
        if b.shape != (2,) or dim is None:
            raise ValueError("a single (lo, hi) pair needs an explicit dimension")
        b = np.tile(b, (dim, 1))
    if b.ndim != 2 or b.shape[1] != 2:
        raise ValueError(f"bounds must have shape (d, 2), got {b.shape}")
    if dim is not None and b.shape[0] != dim:
        raise ValueError(f"bounds have {b.shape[0]} rows, expected {dim}")
    if not np.all(np.isfinite(b)) or not np.all(b[:, 0] < b[:, 1]):
        raise ValueError("every bound needs finite lo < hi")
    return b


def check_symmetric(matrix, tol=1e-9):
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.size and np.max(np.abs(m - m.T)) > tol:
        raise ValueError("matrix is not symmetric")
    return m
