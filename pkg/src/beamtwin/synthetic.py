"""Seeded synthetic scenarios with known ground truth.

Closes the loop between scene simulation and beam measurements: a sampled
scene is simulated into a ground-truth profile, and the per-beam
measurements are the simulated received powers of that profile (plus an
optional uniform noise floor). Every output is a pure function of the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codebook import Codebook, synth_ula_codebook
from .datasets import SampleRecord
from .errors import ConfigurationError
from .profiles import simulate_all_beam_powers
from .scene import GeoReference, PointReflector, Scene, camera_frame_to_gps
from .simulate import SimConfig, simulate_profile

SYNTH_CLASS_LABELS = ("car", "tree", "pole")

#: Default world anchor for synthetic datasets (arbitrary mid-latitude point).
DEFAULT_GEOREF = GeoReference(origin_lat=40.0, origin_lon=-105.0, camera_yaw_deg=0.0)


@dataclass(frozen=True)
class ScenarioSpec:
    n_reflectors: int = 3
    ue_range: tuple[float, float] = (5.0, 50.0)
    azimuth_range: tuple[float, float] = (-50.0, 50.0)
    reflectance_range: tuple[float, float] = (0.2, 1.0)
    noise_floor: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_reflectors < 0:
            raise ConfigurationError(f"n_reflectors must be >= 0, got {self.n_reflectors}")
        for name, rng_ in (
            ("ue_range", self.ue_range),
            ("azimuth_range", self.azimuth_range),
            ("reflectance_range", self.reflectance_range),
        ):
            if rng_[0] > rng_[1]:
                raise ConfigurationError(f"{name} must be ordered, got {rng_}")
        if self.ue_range[0] <= 0:
            raise ConfigurationError("ue_range distances must be positive")
        if not 0.0 <= self.reflectance_range[0] <= self.reflectance_range[1] <= 1.0:
            raise ConfigurationError("reflectance_range must lie within [0, 1]")
        if self.noise_floor < 0:
            raise ConfigurationError("noise_floor must be nonnegative")


def _position_at(azimuth_deg: float, distance: float) -> np.ndarray:
    a = math.radians(azimuth_deg)
    return np.array([distance * math.sin(a), 0.0, distance * math.cos(a)])


def _sample_scene(spec: ScenarioSpec, rng: np.random.Generator) -> Scene:
    # draw order is part of the determinism contract: UE first, then each
    # reflector's (azimuth, distance, reflectance, class), then noise
    ue_az = rng.uniform(*spec.azimuth_range)
    ue_dist = rng.uniform(*spec.ue_range)
    reflectors = []
    for i in range(spec.n_reflectors):
        az = rng.uniform(*spec.azimuth_range)
        dist = rng.uniform(*spec.ue_range)
        refl = rng.uniform(*spec.reflectance_range)
        label = SYNTH_CLASS_LABELS[int(rng.integers(len(SYNTH_CLASS_LABELS)))]
        reflectors.append(
            PointReflector(
                id=f"r{i:02d}",
                position=_position_at(az, dist),
                class_label=label,
                reflectance=float(refl),
            )
        )
    return Scene(reflectors=reflectors, ue_position=_position_at(ue_az, ue_dist))


def generate_scenario(
    spec: ScenarioSpec,
    codebook: Codebook | None = None,
    sim_config: SimConfig | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[Scene, np.ndarray, np.ndarray]:
    """Sample one scene and derive its ground-truth profile and measurements.

    measurements[k] = simulated power of beam k on the ground-truth profile,
    plus ``noise_floor * u_k`` with u_k uniform in [0, 1).
    """
    cfg = sim_config or SimConfig()
    cb = codebook or synth_ula_codebook(16, 64, (-50.0, 50.0), grid=cfg.grid)
    rng = rng if rng is not None else np.random.default_rng(spec.seed)
    scene = _sample_scene(spec, rng)
    gt_profile = simulate_profile(scene, cfg)
    measurements = simulate_all_beam_powers(gt_profile, cb)
    if spec.noise_floor > 0.0:
        measurements = measurements + spec.noise_floor * rng.uniform(size=cb.n_beams)
    return scene, gt_profile, measurements


def generate_dataset(
    spec: ScenarioSpec,
    n_samples: int,
    scenario_id: str = "synth",
    codebook: Codebook | None = None,
    sim_config: SimConfig | None = None,
    georef: GeoReference = DEFAULT_GEOREF,
    split_fractions: dict | None = None,
) -> tuple[list[SampleRecord], list[Scene], np.ndarray]:
    """Generate a full synthetic dataset: samples, scenes, and profiles.

    Splits are assigned contiguously by sample index according to
    ``split_fractions`` (default: 30% calibration, 70% test). UE lat/lon
    come from inverting the georeference transform, so the GPS chain is
    exercised end to end.
    """
    if n_samples < 1:
        raise ConfigurationError(f"n_samples must be >= 1, got {n_samples}")
    cfg = sim_config or SimConfig()
    cb = codebook or synth_ula_codebook(16, 64, (-50.0, 50.0), grid=cfg.grid)
    fractions = split_fractions or {"train": 0.0, "calibration": 0.3, "test": 0.7}
    bounds = _split_bounds(n_samples, fractions)

    rng = np.random.default_rng(spec.seed)
    samples: list[SampleRecord] = []
    scenes: list[Scene] = []
    profiles = np.zeros((n_samples, cfg.grid.n_angles))
    for i in range(n_samples):
        scene, profile, measurements = generate_scenario(spec, cb, cfg, rng)
        lat, lon = camera_frame_to_gps(scene.ue_position, georef)
        samples.append(
            SampleRecord(
                sample_id=f"{scenario_id}-{i:05d}",
                scenario_id=scenario_id,
                measurements=measurements,
                ue_lat=lat,
                ue_lon=lon,
                image_ref=None,
                split=_split_for(i, bounds),
            )
        )
        scenes.append(scene)
        profiles[i] = profile
    return samples, scenes, profiles


def _split_bounds(n: int, fractions: dict) -> list[tuple[str, int]]:
    order = [s for s in ("train", "calibration", "test") if fractions.get(s, 0.0) > 0.0]
    if not order:
        raise ConfigurationError("split fractions must include at least one nonzero split")
    bounds = []
    acc = 0.0
    for split in order:
        acc += fractions[split]
        bounds.append((split, int(round(acc * n))))
    bounds[-1] = (bounds[-1][0], n)
    return bounds


def _split_for(i: int, bounds: list[tuple[str, int]]) -> str:
    for split, end in bounds:
        if i < end:
            return split
    return bounds[-1][0]
