"""Angular power profiles: reconstruction from sparse beam measurements and
received-power simulation for arbitrary beams.

A profile is a nonnegative vector over the azimuth grid (linear power
units). Reconstruction accumulates the top-K strongest measurements
weighted by their beam gain profiles; simulation is the inner product of a
beam's gain profile with the power profile.
"""

from __future__ import annotations

import numpy as np

from .codebook import BeamProfile, Codebook
from .errors import ConfigurationError
from .validation import as_measurements, as_profile


def top_k_measurement_indices(measurements: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest measurements, ties broken by lower index."""
    order = np.argsort(-measurements, kind="stable")
    return order[:k]


def reconstruct_profile(measurements, codebook: Codebook, k: int = 16) -> np.ndarray:
    """Reconstruct an angular power profile from per-beam received powers.

    Sums the gain profiles of the k strongest measured beams, each weighted
    by its measured power. The result is elementwise nonnegative; an
    all-zero measurement vector yields an all-zero profile.
    """
    y = as_measurements(measurements, codebook.n_beams)
    if k < 1 or k > codebook.n_beams:
        raise ConfigurationError(f"k must be in [1, {codebook.n_beams}], got {k}")
    top = top_k_measurement_indices(y, k)
    profile = y[top] @ codebook.gain_matrix[top]
    # inputs are nonnegative, so this is a no-op safeguard
    return np.abs(profile)


def simulate_beam_power(profile, beam: BeamProfile | np.ndarray) -> float:
    """Estimated received power of a beam: inner product of its gain profile
    with the angular power profile."""
    gains = beam.gains if isinstance(beam, BeamProfile) else np.asarray(beam, dtype=float)
    r = np.asarray(profile, dtype=float)
    if gains.shape != r.shape:
        raise ConfigurationError(
            f"beam profile shape {gains.shape} does not match profile shape {r.shape}"
        )
    return float(gains @ r)


def simulate_all_beam_powers(profile, codebook: Codebook) -> np.ndarray:
    """Estimated received power for every beam in the codebook."""
    r = as_profile(profile, codebook.grid)
    return codebook.gain_matrix @ r


def top_k_beams(profile, codebook: Codebook, k: int) -> np.ndarray:
    """Beam indices ranked by descending simulated power, truncated to k.

    Ties break toward the lower beam index, so the ranking is deterministic
    and the top-k list is always a prefix of the top-(k+1) list.
    """
    if k < 1 or k > codebook.n_beams:
        raise ConfigurationError(f"k must be in [1, {codebook.n_beams}], got {k}")
    powers = simulate_all_beam_powers(profile, codebook)
    order = np.argsort(-powers, kind="stable")
    return order[:k]
