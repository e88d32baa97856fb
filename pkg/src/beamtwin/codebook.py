"""Beam codebooks as angular power-gain profiles.

A codebook is a set of beams; each beam carries a nonnegative gain profile
sampled on the shared azimuth grid and peak-normalized to 1. Profiles are
power gains (squared magnitudes), so downstream received-power estimates
can accumulate them linearly against an angular power profile.

Synthetic codebooks steer a half-wavelength uniform linear array: the gain
at azimuth a for a beam steered at boresight t is

    g(a) = |w(t)^H s(a)|^2,   s_n(a) = exp(j pi n sin a),  w = s(t)/sqrt(N)

which is the classic array factor with peak N at a = t. Measured codebooks
(e.g. from anechoic-chamber characterization) are loaded from CSV instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DataFormatError
from .grid import AngularGrid

LEVEL_L1 = "L1"
LEVEL_L2 = "L2"


@dataclass(frozen=True)
class BeamProfile:
    """One beam: nonnegative gains on the grid, peak-normalized to 1.

    ``boresight_deg`` is the steering direction for synthesized beams (the
    continuous-angle gain maximum) and the grid angle of the sampled
    maximum for loaded beams.
    """

    beam_index: int
    gains: np.ndarray
    boresight_deg: float


@dataclass
class Codebook:
    level: str
    beams: list[BeamProfile]
    angle_span: tuple[float, float]
    grid: AngularGrid = field(default_factory=AngularGrid)

    def __post_init__(self):
        if not self.beams:
            raise ConfigurationError("codebook must contain at least one beam")
        self._gain_matrix = None

    @property
    def n_beams(self) -> int:
        return len(self.beams)

    @property
    def gain_matrix(self) -> np.ndarray:
        """(n_beams, n_angles) gain matrix; rows follow beam index order."""
        if self._gain_matrix is None:
            self._gain_matrix = np.vstack([b.gains for b in self.beams])
        return self._gain_matrix

    @property
    def boresights(self) -> np.ndarray:
        return np.array([b.boresight_deg for b in self.beams])


def ula_gain(n_elements: int, boresight_deg: float, angles_deg) -> np.ndarray:
    """Unnormalized ULA power gain |w^H s|^2 at the given angles.

    Half-wavelength element spacing; peak value equals n_elements at the
    boresight. A single element is omnidirectional (gain 1 everywhere).
    """
    angles = np.atleast_1d(np.asarray(angles_deg, dtype=float))
    x = np.sin(np.radians(angles)) - np.sin(np.radians(boresight_deg))
    n = np.arange(n_elements)[:, None]
    af = np.exp(1j * np.pi * n * x).sum(axis=0)
    return (np.abs(af) ** 2) / n_elements


def synth_ula_codebook(
    n_elements: int,
    n_beams: int,
    span: tuple[float, float],
    grid: AngularGrid | None = None,
    level: str | None = None,
) -> Codebook:
    """Synthesize a codebook of uniformly steered, peak-normalized ULA beams.

    Boresights are spaced uniformly over ``span`` inclusive (a single beam
    sits at the span midpoint). Stands in for measured beam profiles; it
    preserves the properties the pipeline relies on: unimodal main lobes
    and strictly increasing boresights.
    """
    grid = grid or AngularGrid()
    if n_elements < 1:
        raise ConfigurationError(f"n_elements must be >= 1, got {n_elements}")
    if n_beams < 1:
        raise ConfigurationError(f"n_beams must be >= 1, got {n_beams}")
    lo, hi = float(span[0]), float(span[1])
    if lo > hi:
        raise ConfigurationError(f"span must be ordered, got {span}")
    if lo < grid.min_angle or hi > grid.max_angle:
        raise ConfigurationError(
            f"span {span} is outside the grid [{grid.min_angle}, {grid.max_angle}]"
        )
    if n_beams == 1:
        boresights = np.array([(lo + hi) / 2.0])
    else:
        boresights = np.linspace(lo, hi, n_beams)
    beams = []
    for k, bore in enumerate(boresights):
        g = ula_gain(n_elements, bore, grid.angles)
        beams.append(BeamProfile(k, g / g.max(), float(bore)))
    if level is None:
        level = LEVEL_L1 if n_beams == 6 else LEVEL_L2
    return Codebook(level=level, beams=beams, angle_span=(lo, hi), grid=grid)


def load_codebook(path, grid: AngularGrid | None = None, level: str | None = None) -> Codebook:
    """Load a codebook CSV: one beam per row, one gain per grid angle.

    Lines starting with '#' are comments. Gains are renormalized to peak 1;
    each beam's boresight is the grid angle of its maximum gain.
    """
    grid = grid or AngularGrid()
    rows = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split(",")
            if len(fields) != grid.n_angles:
                raise DataFormatError(
                    f"{path}: row at line {lineno} has {len(fields)} values, "
                    f"expected {grid.n_angles}"
                )
            try:
                gains = np.array([float(v) for v in fields])
            except ValueError as exc:
                raise DataFormatError(f"{path}: row at line {lineno}: {exc}") from exc
            if np.any(~np.isfinite(gains)):
                raise DataFormatError(f"{path}: row at line {lineno} contains non-finite gains")
            if np.any(gains < 0):
                raise DataFormatError(f"{path}: row at line {lineno} contains negative gains")
            peak = gains.max()
            if peak <= 0:
                raise DataFormatError(f"{path}: row at line {lineno} is all zeros")
            rows.append(gains / peak)
    if not rows:
        raise DataFormatError(f"{path}: no beam rows found")
    beams = [
        BeamProfile(k, g, float(grid.angles[int(np.argmax(g))])) for k, g in enumerate(rows)
    ]
    bores = [b.boresight_deg for b in beams]
    if level is None:
        level = LEVEL_L1 if len(beams) == 6 else LEVEL_L2
    return Codebook(level=level, beams=beams, angle_span=(min(bores), max(bores)), grid=grid)


def save_codebook(codebook: Codebook, path) -> None:
    """Write a codebook in the CSV format accepted by :func:`load_codebook`."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"# codebook level={codebook.level} beams={codebook.n_beams}\n")
        for beam in codebook.beams:
            f.write(",".join(format(v, ".17g") for v in beam.gains) + "\n")


def map_l2_to_l1(l1: Codebook, l2: Codebook) -> np.ndarray:
    """Assign every fine (L2) beam to the coarse (L1) beam with maximum gain
    at the L2 beam's boresight. Ties break toward the lower L1 index.
    """
    if l1.grid.n_angles != l2.grid.n_angles:
        raise ConfigurationError("codebooks must share the same grid")
    assignment = np.empty(l2.n_beams, dtype=int)
    for k, beam in enumerate(l2.beams):
        j = l1.grid.nearest_index(beam.boresight_deg)
        assignment[k] = int(np.argmax(l1.gain_matrix[:, j]))
    return assignment
