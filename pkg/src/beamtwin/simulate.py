"""Point-reflector channel simulation on the azimuth grid.

Three steps: free-space pathloss per propagation path (line of sight plus
one single-bounce path per reflector), placement of the resulting power
impulses on the angular grid, and convolution with the receiver's angular
impulse response, a normalized sinc whose first nulls sit at +/- the
hardware angular resolution.

The sinc sidelobes can push individual bins slightly negative; those bins
are clamped to zero (power profiles must stay nonnegative for downstream
inner products) and the clamped mass is surfaced in the diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, GeometryError
from .grid import AngularGrid
from .scene import Scene, azimuth_of

KIND_LOS = "los"
KIND_REFLECTION = "reflection"


@dataclass(frozen=True)
class SimConfig:
    """Channel simulation parameters.

    The default wavelength (5 mm, 60 GHz class) is an assumption, not a
    measured deployment value; override it for a specific carrier.
    """

    wavelength: float = 0.005
    alpha_hw_deg: float = 10.0
    grid: AngularGrid = field(default_factory=AngularGrid)
    min_path_length: float = 0.1
    exclude_ue_object: bool = True

    def __post_init__(self):
        if self.wavelength <= 0:
            raise ConfigurationError(f"wavelength must be positive, got {self.wavelength}")
        if self.alpha_hw_deg <= 0:
            raise ConfigurationError(
                f"alpha_hw_deg must be positive, got {self.alpha_hw_deg}"
            )
        if self.min_path_length <= 0:
            raise ConfigurationError(
                f"min_path_length must be positive, got {self.min_path_length}"
            )


@dataclass(frozen=True)
class PathImpulse:
    azimuth_deg: float
    power: float
    kind: str
    reflector_id: str | None = None


@dataclass
class SimDiagnostics:
    """Per-scene bookkeeping: paths that could not contribute and how much
    negative mass the nonnegativity clamp removed."""

    dropped_out_of_grid: list[str] = field(default_factory=list)
    skipped_degenerate: list[str] = field(default_factory=list)
    excluded_ue_object: str | None = None
    clamped_mass: float = 0.0
    output_mass: float = 0.0

    @property
    def clamp_fraction(self) -> float:
        if self.output_mass <= 0.0:
            return 0.0
        return self.clamped_mass / self.output_mass

    def to_dict(self) -> dict:
        return {
            "dropped_out_of_grid": list(self.dropped_out_of_grid),
            "skipped_degenerate": list(self.skipped_degenerate),
            "excluded_ue_object": self.excluded_ue_object,
            "clamped_mass": self.clamped_mass,
            "output_mass": self.output_mass,
            "clamp_fraction": self.clamp_fraction,
        }


def pathloss_los(p_ue, wavelength: float, min_path_length: float = 0.1) -> float:
    """Free-space pathloss of the direct path: (lambda / (4 pi d))^2."""
    d = float(np.linalg.norm(np.asarray(p_ue, dtype=float)))
    if d < min_path_length:
        raise GeometryError(f"LoS path length {d} m below minimum {min_path_length} m")
    return (wavelength / (4.0 * np.pi * d)) ** 2


def pathloss_reflector(p_i, p_ue, wavelength: float, min_path_length: float = 0.1) -> float:
    """Free-space pathloss of a single-bounce path via a reflector at p_i.

    The path length is UE-to-reflector plus reflector-to-receiver, so a
    reflected path is never shorter than the direct one.
    """
    pi = np.asarray(p_i, dtype=float)
    pu = np.asarray(p_ue, dtype=float)
    total = float(np.linalg.norm(pi - pu) + np.linalg.norm(pi))
    if total < min_path_length:
        raise GeometryError(
            f"reflector path length {total} m below minimum {min_path_length} m"
        )
    return (wavelength / (4.0 * np.pi * total)) ** 2


def build_impulses(scene: Scene, cfg: SimConfig) -> tuple[list[PathImpulse], SimDiagnostics]:
    """Per-path power impulses for a scene: one LoS impulse plus one per
    contributing reflector.

    Reflectors whose azimuth falls outside the grid are dropped;
    degenerate paths are skipped; both are recorded in the diagnostics
    rather than failing the scene. When the UE's own object is known
    (``scene.ue_reflector_id``) and ``cfg.exclude_ue_object`` is set, that
    reflector is left out because the LoS term already accounts for it.
    """
    diag = SimDiagnostics()
    impulses: list[PathImpulse] = []

    try:
        az_ue = azimuth_of(scene.ue_position)
        beta_ue = pathloss_los(scene.ue_position, cfg.wavelength, cfg.min_path_length)
        if cfg.grid.contains(az_ue):
            impulses.append(PathImpulse(az_ue, beta_ue, KIND_LOS))
        else:
            diag.dropped_out_of_grid.append("ue")
    except GeometryError as exc:
        diag.skipped_degenerate.append(f"ue: {exc}")

    for reflector in scene.reflectors:
        if cfg.exclude_ue_object and reflector.id == scene.ue_reflector_id:
            diag.excluded_ue_object = reflector.id
            continue
        try:
            az = azimuth_of(reflector.position)
            beta = pathloss_reflector(
                reflector.position, scene.ue_position, cfg.wavelength, cfg.min_path_length
            )
        except GeometryError as exc:
            diag.skipped_degenerate.append(f"{reflector.id}: {exc}")
            continue
        if not cfg.grid.contains(az):
            diag.dropped_out_of_grid.append(reflector.id)
            continue
        impulses.append(
            PathImpulse(az, reflector.reflectance * beta, KIND_REFLECTION, reflector.id)
        )
    return impulses, diag


def sinc_kernel(cfg: SimConfig) -> np.ndarray:
    """Angular impulse response sampled at 1-degree offsets over
    +/-(n_angles - 1) degrees (no truncation).

    Normalized sinc convention: s(0) = 1 and nulls at integer multiples of
    the hardware resolution. The mathematically exact zeros are enforced so
    they do not leak rounding noise into the profile.
    """
    n = cfg.grid.n_angles
    offsets = np.arange(-(n - 1), n, dtype=float)
    x = offsets / cfg.alpha_hw_deg
    kernel = np.sinc(x)
    kernel[(x != 0.0) & (x == np.round(x))] = 0.0
    return kernel


def simulate_profile(
    scene: Scene,
    cfg: SimConfig | None = None,
    clamp: bool = True,
    return_diagnostics: bool = False,
):
    """Simulate the angular power profile of a scene.

    Impulses are binned to the nearest grid angle (half-up rounding), summed
    per bin, and convolved with the sinc kernel; the output is cropped to
    the grid length. With ``clamp`` (the default) negative post-convolution
    values are zeroed and the removed mass reported in the diagnostics.
    """
    cfg = cfg or SimConfig()
    impulses, diag = build_impulses(scene, cfg)
    n = cfg.grid.n_angles
    binned = np.zeros(n)
    for impulse in impulses:
        binned[cfg.grid.nearest_index(impulse.azimuth_deg)] += impulse.power
    full = np.convolve(binned, sinc_kernel(cfg))
    profile = full[n - 1 : 2 * n - 1]
    if clamp:
        negative = profile < 0.0
        diag.clamped_mass = float(-profile[negative].sum())
        profile = np.where(negative, 0.0, profile)
    diag.output_mass = float(profile.sum())
    if return_diagnostics:
        return profile, diag
    return profile
