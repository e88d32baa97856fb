"""Digital-twin scene model in the camera reference frame.

Conventions, fixed across the whole toolkit:
  - camera frame: x right, y down, z forward along the optical axis
  - azimuth of a point: atan2(x, z) in degrees, 0 on the optical axis,
    positive to the camera's right, range (-180, 180]
  - the ground plane is y = 0 (GPS carries no height)

Scenes are point reflectors (position, class label, scalar reflectance)
plus the UE position. GPS coordinates are mapped into the camera frame
with an equirectangular approximation around the georeference origin,
adequate for street-scale scenes (well under 1 km).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ConfigurationError, DataError, DataFormatError, GeometryError
from .validation import as_position

EARTH_RADIUS_M = 6371000.0

#: Published per-class reflectances; classes not listed fall back to the
#: table default.
DEFAULT_CLASS_REFLECTANCE = {"tree": 0.3, "car": 1.0, "pole": 0.6}


@dataclass(frozen=True)
class ReflectanceTable:
    values: Mapping[str, float] = field(
        default_factory=lambda: dict(DEFAULT_CLASS_REFLECTANCE)
    )
    default_reflectance: float = 0.5

    def __post_init__(self):
        for label, value in self.values.items():
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"reflectance for {label!r} outside [0, 1]: {value}")
        if not 0.0 <= self.default_reflectance <= 1.0:
            raise ConfigurationError(
                f"default reflectance outside [0, 1]: {self.default_reflectance}"
            )


def reflectance_for_class(label: str, table: ReflectanceTable | None = None) -> float:
    table = table or ReflectanceTable()
    return float(table.values.get(label, table.default_reflectance))


@dataclass(frozen=True)
class PointReflector:
    id: str
    position: np.ndarray
    class_label: str
    reflectance: float

    def __post_init__(self):
        pos = as_position(self.position)
        object.__setattr__(self, "position", pos)
        if float(np.linalg.norm(pos)) <= 0.0:
            raise ConfigurationError(f"reflector {self.id!r} has zero-norm position")
        if not 0.0 <= self.reflectance <= 1.0:
            raise ConfigurationError(
                f"reflector {self.id!r} reflectance outside [0, 1]: {self.reflectance}"
            )


@dataclass
class Scene:
    reflectors: list[PointReflector]
    ue_position: np.ndarray
    ue_reflector_id: str | None = None

    def __post_init__(self):
        self.ue_position = as_position(self.ue_position)
        if float(np.linalg.norm(self.ue_position)) <= 0.0:
            raise ConfigurationError("UE position must have positive norm")
        ids = [r.id for r in self.reflectors]
        if len(set(ids)) != len(ids):
            raise ConfigurationError("reflector ids must be unique")


@dataclass(frozen=True)
class GeoReference:
    """Ties the camera frame to the world: origin coordinates and the
    compass bearing of the optical axis (clockwise from north)."""

    origin_lat: float
    origin_lon: float
    camera_yaw_deg: float = 0.0
    origin_altitude: float | None = None

    def __post_init__(self):
        if not -90.0 <= self.origin_lat <= 90.0:
            raise DataFormatError(f"latitude outside [-90, 90]: {self.origin_lat}")
        if not -180.0 <= self.origin_lon <= 180.0:
            raise DataFormatError(f"longitude outside [-180, 180]: {self.origin_lon}")


def azimuth_of(position) -> float:
    """Azimuth of a camera-frame point in degrees: atan2(x, z)."""
    pos = as_position(position)
    x, z = float(pos[0]), float(pos[2])
    if x == 0.0 and z == 0.0:
        raise GeometryError("azimuth undefined for a point on the camera axis origin")
    return math.degrees(math.atan2(x, z))


def identify_ue(scene: Scene, ue_position) -> str:
    """Id of the reflector nearest to the UE position (ties: lower id).

    Also records the result in ``scene.ue_reflector_id`` so the simulator
    can exclude the UE's own object from the reflector sum.
    """
    if not scene.reflectors:
        raise DataError("cannot identify the UE object in a scene with no reflectors")
    ue = as_position(ue_position)
    best = min(
        scene.reflectors,
        key=lambda r: (float(np.linalg.norm(r.position - ue)), r.id),
    )
    scene.ue_reflector_id = best.id
    return best.id


def gps_to_camera_frame(lat: float, lon: float, ref: GeoReference) -> np.ndarray:
    """Map GPS coordinates to a camera-frame position on the ground plane.

    Equirectangular approximation around the origin, then rotation by the
    camera yaw. Returns (0, 0, 0) when lat/lon coincide with the origin;
    callers must treat that as invalid geometry for pathloss.
    """
    if not -90.0 <= lat <= 90.0:
        raise DataFormatError(f"latitude outside [-90, 90]: {lat}")
    if not -180.0 <= lon <= 180.0:
        raise DataFormatError(f"longitude outside [-180, 180]: {lon}")
    north = EARTH_RADIUS_M * math.radians(lat - ref.origin_lat)
    east = EARTH_RADIUS_M * math.cos(math.radians(ref.origin_lat)) * math.radians(
        lon - ref.origin_lon
    )
    yaw = math.radians(ref.camera_yaw_deg)
    z = east * math.sin(yaw) + north * math.cos(yaw)
    x = east * math.cos(yaw) - north * math.sin(yaw)
    return np.array([x, 0.0, z])


def camera_frame_to_gps(position, ref: GeoReference) -> tuple[float, float]:
    """Inverse of :func:`gps_to_camera_frame` (ignores the y component)."""
    pos = as_position(position)
    x, z = float(pos[0]), float(pos[2])
    yaw = math.radians(ref.camera_yaw_deg)
    east = z * math.sin(yaw) + x * math.cos(yaw)
    north = z * math.cos(yaw) - x * math.sin(yaw)
    lat = ref.origin_lat + math.degrees(north / EARTH_RADIUS_M)
    lon = ref.origin_lon + math.degrees(
        east / (EARTH_RADIUS_M * math.cos(math.radians(ref.origin_lat)))
    )
    return lat, lon


# --- scene JSON (the contract between ingest, simulation, and the CLI) ---

SCENE_SCHEMA_GRID_KEY = "grid_n_angles"


def scene_to_dict(scene: Scene, n_angles: int = 180, georef: GeoReference | None = None) -> dict:
    ue: dict = {"position": [float(v) for v in scene.ue_position]}
    if scene.ue_reflector_id is not None:
        ue["reflector_id"] = scene.ue_reflector_id
    doc = {
        SCENE_SCHEMA_GRID_KEY: n_angles,
        "ue": ue,
        "objects": [
            {
                "id": r.id,
                "class": r.class_label,
                "position": [float(v) for v in r.position],
                "reflectance": float(r.reflectance),
            }
            for r in scene.reflectors
        ],
    }
    if georef is not None:
        g = {
            "origin_lat": georef.origin_lat,
            "origin_lon": georef.origin_lon,
            "camera_yaw_deg": georef.camera_yaw_deg,
        }
        if georef.origin_altitude is not None:
            g["origin_altitude"] = georef.origin_altitude
        doc["georef"] = g
    return doc


def scene_from_dict(doc: dict, reflectance_table: ReflectanceTable | None = None) -> Scene:
    """Build a Scene from its JSON form; objects without an explicit
    reflectance get one from the reflectance table by class label."""
    table = reflectance_table or ReflectanceTable()
    try:
        ue = doc["ue"]
        ue_position = ue["position"]
        objects = doc.get("objects", [])
    except (KeyError, TypeError) as exc:
        raise DataFormatError(f"scene document missing required field: {exc}") from exc
    reflectors = []
    for i, obj in enumerate(objects):
        try:
            label = obj["class"]
            reflectance = obj.get("reflectance")
            if reflectance is None:
                reflectance = reflectance_for_class(label, table)
            reflectors.append(
                PointReflector(
                    id=str(obj["id"]),
                    position=np.asarray(obj["position"], dtype=float),
                    class_label=str(label),
                    reflectance=float(reflectance),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"scene object #{i} is malformed: {exc}") from exc
    return Scene(
        reflectors=reflectors,
        ue_position=np.asarray(ue_position, dtype=float),
        ue_reflector_id=ue.get("reflector_id"),
    )


def load_scene(path, reflectance_table: ReflectanceTable | None = None) -> Scene:
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: invalid JSON: {exc}") from exc
    return scene_from_dict(doc, reflectance_table)


def save_scene(scene: Scene, path, n_angles: int = 180, georef: GeoReference | None = None) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(scene_to_dict(scene, n_angles, georef), f, indent=2, sort_keys=True)
        f.write("\n")
