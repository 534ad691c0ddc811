"""Small input-checking helpers shared by the public entry points."""

import numbers

import numpy as np


def check_vector(v, dim=None, name="vector"):
    """Return ``v`` as a finite 1-d float array, optionally of length ``dim``."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"{name} has dimension {arr.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_positive(value, name, strict=True):
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise ValueError(f"{name} must be a finite real number, got {value!r}")
    if strict and value <= 0:
        raise ValueError(f"{name} must be positive, got {value!r}")
    if not strict and value < 0:
        raise ValueError(f"{name} must be non-negative, got {value!r}")
    return float(value)


def check_accuracy(K, strict=False):
    """Accuracy factor of a weak separation oracle: ``K >= 1`` (``K > 1`` if strict)."""
    if not isinstance(K, numbers.Real) or not np.isfinite(K):
        raise ValueError(f"accuracy K must be a finite real number, got {K!r}")
    if strict and K <= 1:
        raise ValueError(f"accuracy K must be > 1, got {K!r}")
    if K < 1:
        raise ValueError(f"accuracy K must be >= 1, got {K!r}")
    return float(K)


def support_mask(support, dim):
    """Turn an index collection or boolean mask into a boolean mask of length ``dim``."""
    arr = np.asarray(support)
    if arr.dtype == bool:
        if arr.shape != (dim,):
            raise ValueError(f"support mask must have shape ({dim},), got {arr.shape}")
        return arr.copy()
    mask = np.zeros(dim, dtype=bool)
    idx = arr.astype(int).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= dim):
        raise ValueError(f"support indices out of range for dimension {dim}")
    mask[idx] = True
    return mask
