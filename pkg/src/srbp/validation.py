"""Input validation helpers shared across the package."""

from __future__ import annotations

import numbers

import numpy as np


def check_rng(random_state=None) -> np.random.Generator:
    """Turn ``random_state`` into a numpy Generator.

    Accepts None (fresh entropy), an integer seed, a sequence of integers,
    or an existing Generator (returned unchanged).
    """
    if random_state is None:
        return np.random.default_rng()
    if hasattr(random_state, "integers"):
        # Generator, or anything quacking like one (scripted test doubles).
        return random_state
    return np.random.default_rng(random_state)


def check_complex_matrix(x, name: str = "matrix") -> np.ndarray:
    """Validate and return a finite 2-D complex array."""
    arr = np.asarray(x, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_binary_matrix(x, name: str = "mask") -> np.ndarray:
    """Validate and return a 2-D uint8 array with entries in {0, 1}."""
    arr = np.asarray(x)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError(f"{name} entries must be exactly 0 or 1")
    return arr.astype(np.uint8)


def check_positive(value, name: str) -> float:
    if not isinstance(value, numbers.Real) or not value > 0:
        raise ValueError(f"{name} must be positive, got {value!r}")
    return float(value)


def check_probability(value, name: str) -> float:
    if not isinstance(value, numbers.Real) or not 0 < value <= 1:
        raise ValueError(f"{name} must lie in (0, 1], got {value!r}")
    return float(value)


def readonly(arr: np.ndarray) -> np.ndarray:
    """Return ``arr`` flagged immutable (shared-safety for dataclass fields)."""
    arr.setflags(write=False)
    return arr
