"""Input validation helpers shared by the functional core and the estimators."""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .grid import AngularGrid


def check_finite(name: str, arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{name} contains non-finite values")


def check_nonnegative(name: str, arr: np.ndarray) -> None:
    if np.any(arr < 0):
        raise ConfigurationError(f"{name} contains negative values")


def as_profile(values, grid: AngularGrid | None = None) -> np.ndarray:
    """Validate an angular power profile: 1-D, finite, nonnegative, grid-sized."""
    grid = grid or AngularGrid()
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ConfigurationError(f"profile must be 1-D, got shape {arr.shape}")
    if arr.shape[0] != grid.n_angles:
        raise ConfigurationError(
            f"profile length {arr.shape[0]} does not match grid size {grid.n_angles}"
        )
    check_finite("profile", arr)
    check_nonnegative("profile", arr)
    return arr


def as_profile_matrix(X, grid: AngularGrid | None = None) -> np.ndarray:
    """Validate a stack of profiles as a (n_samples, n_angles) array."""
    grid = grid or AngularGrid()
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != grid.n_angles:
        raise ConfigurationError(
            f"expected (n_samples, {grid.n_angles}) profile matrix, got shape {arr.shape}"
        )
    check_finite("profiles", arr)
    return arr


def as_measurements(values, n_beams: int) -> np.ndarray:
    """Validate a per-beam received power vector."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ConfigurationError(f"measurements must be 1-D, got shape {arr.shape}")
    if arr.shape[0] != n_beams:
        raise ConfigurationError(
            f"measurement length {arr.shape[0]} does not match codebook size {n_beams}"
        )
    check_finite("measurements", arr)
    check_nonnegative("measurements", arr)
    return arr


def as_position(values) -> np.ndarray:
    """Validate a 3-vector position in meters (camera frame)."""
    arr = np.asarray(values, dtype=float)
    if arr.shape != (3,):
        raise ConfigurationError(f"position must be a 3-vector, got shape {arr.shape}")
    check_finite("position", arr)
    return arr
