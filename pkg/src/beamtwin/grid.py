"""The shared 1-degree azimuth grid.

Every angular quantity in the toolkit (beam gain profiles, angular power
profiles, impulse placement) lives on the same uniformly sampled azimuth
grid: angle of bin j is (j - 90) degrees, so the default 180-bin grid
covers -90 .. +89 degrees around the camera/array boresight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

ANGLE_OFFSET_DEG = 90.0


@dataclass(frozen=True)
class AngularGrid:
    """Uniform 1-degree azimuth grid with bin j at (j - 90) degrees."""

    n_angles: int = 180

    def __post_init__(self):
        if self.n_angles < 1:
            raise ConfigurationError(f"n_angles must be >= 1, got {self.n_angles}")

    @property
    def angles(self) -> np.ndarray:
        """Bin center angles in degrees, strictly increasing, 1-degree spacing."""
        return np.arange(self.n_angles, dtype=float) - ANGLE_OFFSET_DEG

    @property
    def min_angle(self) -> float:
        return -ANGLE_OFFSET_DEG

    @property
    def max_angle(self) -> float:
        return float(self.n_angles - 1) - ANGLE_OFFSET_DEG

    def contains(self, angle_deg: float) -> bool:
        """True when the angle rounds onto the grid."""
        j = _half_up(angle_deg) + int(ANGLE_OFFSET_DEG)
        return 0 <= j < self.n_angles

    def nearest_index(self, angle_deg: float) -> int:
        """Nearest bin index, half-up rounding toward +inf.

        The same rounding rule is used wherever a continuous azimuth meets
        the grid (impulse binning, boresight lookup, the UE-azimuth
        baseline), so those call sites stay mutually consistent.
        """
        j = _half_up(angle_deg) + int(ANGLE_OFFSET_DEG)
        if not 0 <= j < self.n_angles:
            raise ConfigurationError(
                f"angle {angle_deg} deg is outside the grid "
                f"[{self.min_angle}, {self.max_angle}]"
            )
        return j

    def clipped_index(self, angle_deg: float) -> int:
        """Nearest bin index, clamped to the grid endpoints."""
        j = _half_up(angle_deg) + int(ANGLE_OFFSET_DEG)
        return min(max(j, 0), self.n_angles - 1)


def _half_up(x: float) -> int:
    return int(np.floor(x + 0.5))
