"""Small input-validation helpers shared by the analyzers."""

import numpy as np


def as_float_array(a, name="array", ndim=None, allow_empty=False):
    """Coerce to a float ndarray and check finiteness and dimensionality."""
    arr = np.asarray(a, dtype=float)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not allow_empty and arr.size == 0:
        raise ValueError(f"{name} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def as_sample_values(X, name="X"):
    """Accept a SampleMatrix or a plain 2-D array and return the values."""
    values = getattr(X, "values", X)
    return as_float_array(values, name=name, ndim=2)


def check_aligned(X, y):
    """Check that the number of design rows matches the number of outputs."""
    if X.shape[0] != y.shape[0]:
        raise ValueError(
            f"design has {X.shape[0]} rows but {y.shape[0]} outputs were given"
        )


def check_in_unit_interval(X, name="x"):
    if np.any(X < 0.0) or np.any(X > 1.0):
        raise ValueError(f"{name} values must lie in [0, 1]")


def evaluate_rows(model, X, threads=1):
    """Evaluate a vectorized model on the rows of X, optionally in chunks
    across a thread pool. Chunks are reassembled in row order, so the result
    does not depend on the thread count."""
    X = np.asarray(X, dtype=float)
    if threads <= 1 or X.shape[0] < 2 * threads:
        return np.asarray(model(X), dtype=float)
    from concurrent.futures import ThreadPoolExecutor

    chunks = np.array_split(np.arange(X.shape[0]), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda idx: np.asarray(model(X[idx]), dtype=float), chunks))
    return np.concatenate(parts)
