"""Dataset manifests and persistence.

A dataset is described by a manifest JSON that names the samples CSV, the
codebook CSV(s), an optional scenes directory, the georeference, and the
power unit of the stored measurements. The manifest layer exists so that
differing source layouts can be absorbed without code changes; see
docs/formats.md for the full schemas.

All writers are atomic (temp file + rename) and all persisted floats use
17 significant digits, so CSV round trips are lossless for float64.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .adapt import AdaptationMapping
from .errors import DataError, DataFormatError
from .scene import GeoReference

logger = logging.getLogger(__name__)

MANIFEST_SCHEMA_VERSION = 1
MAPPING_FORMAT_VERSION = 1
FLOAT_FMT = ".17g"

VALID_SPLITS = ("train", "calibration", "test")

SAMPLE_BASE_COLUMNS = ["sample_id", "scenario_id", "split", "ue_lat", "ue_lon", "image_ref"]


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass
class SampleRecord:
    sample_id: str
    scenario_id: str
    measurements: np.ndarray
    ue_lat: float
    ue_lon: float
    image_ref: str | None = None
    split: str = "test"


@dataclass
class Dataset:
    samples: list[SampleRecord]
    georef: GeoReference
    codebook_path: Path
    l1_codebook_path: Path | None = None
    scenes_dir: Path | None = None
    unseen_scenarios: list[str] = field(default_factory=list)
    sim: dict = field(default_factory=dict)
    manifest_path: Path | None = None

    def scene_path(self, sample_id: str) -> Path:
        if self.scenes_dir is None:
            raise DataError("dataset manifest does not declare a scenes directory")
        return self.scenes_dir / f"{sample_id}.json"

    def subset(self, split: str) -> list[SampleRecord]:
        if split == "all":
            return list(self.samples)
        return [s for s in self.samples if s.split == split]


def load_dataset(manifest_path) -> Dataset:
    """Load and fully validate a dataset; row-level problems are aggregated
    into a single error that names the offending CSV lines."""
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise DataError(f"manifest not found: {manifest_path}")
    with open(manifest_path, "r", encoding="utf-8") as f:
        try:
            manifest = json.load(f)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{manifest_path}: invalid JSON: {exc}") from exc
    version = manifest.get("schema_version")
    if version != MANIFEST_SCHEMA_VERSION:
        raise DataFormatError(
            f"{manifest_path}: unsupported manifest schema_version {version!r}"
        )
    base = manifest_path.parent
    try:
        samples_csv = base / manifest["samples_csv"]
        codebook_path = base / manifest["codebook_csv"]
        georef_doc = manifest["georef"]
        georef = GeoReference(
            origin_lat=float(georef_doc["origin_lat"]),
            origin_lon=float(georef_doc["origin_lon"]),
            camera_yaw_deg=float(georef_doc.get("camera_yaw_deg", 0.0)),
            origin_altitude=georef_doc.get("origin_altitude"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"{manifest_path}: missing or malformed field: {exc}") from exc

    power_unit = manifest.get("power_unit", "linear")
    if power_unit not in ("linear", "db"):
        raise DataFormatError(f"{manifest_path}: unknown power_unit {power_unit!r}")

    samples = _load_samples_csv(samples_csv, power_unit)
    scenes_dir = manifest.get("scenes_dir")
    l1_path = manifest.get("l1_codebook_csv")
    return Dataset(
        samples=samples,
        georef=georef,
        codebook_path=codebook_path,
        l1_codebook_path=(base / l1_path) if l1_path else None,
        scenes_dir=(base / scenes_dir) if scenes_dir else None,
        unseen_scenarios=list(manifest.get("unseen_scenarios", [])),
        sim=dict(manifest.get("sim", {})),
        manifest_path=manifest_path,
    )


def _load_samples_csv(path: Path, power_unit: str) -> list[SampleRecord]:
    if not path.exists():
        raise DataError(f"samples CSV not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines:
        raise DataFormatError(f"{path}: empty samples CSV")
    header = lines[0].split(",")
    if header[: len(SAMPLE_BASE_COLUMNS)] != SAMPLE_BASE_COLUMNS:
        raise DataFormatError(
            f"{path}: header must start with {','.join(SAMPLE_BASE_COLUMNS)}"
        )
    power_cols = header[len(SAMPLE_BASE_COLUMNS) :]
    n_powers = len(power_cols)
    if n_powers == 0 or power_cols != [f"p{i}" for i in range(n_powers)]:
        raise DataFormatError(f"{path}: power columns must be p0..p{max(n_powers - 1, 0)}")

    errors: list[str] = []
    samples: list[SampleRecord] = []
    seen_ids: set[str] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != len(header):
            errors.append(f"line {lineno}: expected {len(header)} fields, got {len(fields)}")
            continue
        sample_id, scenario_id, split, lat_s, lon_s, image_ref = fields[:6]
        row_errors = []
        if sample_id in seen_ids:
            row_errors.append(f"duplicate sample_id {sample_id!r}")
        if split not in VALID_SPLITS:
            row_errors.append(f"invalid split {split!r}")
        try:
            lat, lon = float(lat_s), float(lon_s)
            if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
                row_errors.append(f"coordinates out of range: {lat}, {lon}")
        except ValueError:
            row_errors.append(f"non-numeric coordinates: {lat_s!r}, {lon_s!r}")
            lat = lon = 0.0
        try:
            powers = np.array([float(v) for v in fields[6:]])
            if not np.all(np.isfinite(powers)):
                row_errors.append("non-finite power value")
            elif power_unit == "db":
                powers = 10.0 ** (powers / 10.0)
            elif np.any(powers < 0):
                row_errors.append("negative linear power value")
        except ValueError:
            row_errors.append("non-numeric power value")
            powers = np.zeros(n_powers)
        if row_errors:
            errors.extend(f"line {lineno}: {msg}" for msg in row_errors)
            continue
        seen_ids.add(sample_id)
        samples.append(
            SampleRecord(
                sample_id=sample_id,
                scenario_id=scenario_id,
                measurements=powers,
                ue_lat=lat,
                ue_lon=lon,
                image_ref=image_ref or None,
                split=split,
            )
        )
    if errors:
        raise DataFormatError(f"{path}: {len(errors)} bad rows:\n" + "\n".join(errors))
    return samples


def save_samples_csv(path, samples: list[SampleRecord]) -> None:
    if not samples:
        raise DataError("refusing to write an empty samples CSV")
    n_powers = len(samples[0].measurements)
    header = SAMPLE_BASE_COLUMNS + [f"p{i}" for i in range(n_powers)]
    rows = [",".join(header)]
    for s in samples:
        rows.append(
            ",".join(
                [
                    s.sample_id,
                    s.scenario_id,
                    s.split,
                    format(s.ue_lat, FLOAT_FMT),
                    format(s.ue_lon, FLOAT_FMT),
                    s.image_ref or "",
                ]
                + [format(v, FLOAT_FMT) for v in s.measurements]
            )
        )
    atomic_write_text(path, "\n".join(rows) + "\n")


def save_manifest(path, manifest: dict) -> None:
    manifest = {"schema_version": MANIFEST_SCHEMA_VERSION, **manifest}
    atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")


# --- profiles ---


def save_profiles(path, profiles) -> None:
    """One profile per line, comma-separated, lossless float formatting."""
    X = np.atleast_2d(np.asarray(profiles, dtype=float))
    lines = [",".join(format(v, FLOAT_FMT) for v in row) for row in X]
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_profiles(path, n_angles: int = 180) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split(",")
            if len(fields) != n_angles:
                raise DataFormatError(
                    f"{path}: line {lineno} has {len(fields)} values, expected {n_angles}"
                )
            try:
                rows.append([float(v) for v in fields])
            except ValueError as exc:
                raise DataFormatError(f"{path}: line {lineno}: {exc}") from exc
    if not rows:
        raise DataFormatError(f"{path}: no profiles found")
    return np.asarray(rows)


# --- adaptation mappings ---


def save_mapping(mapping: AdaptationMapping, path, fmt: str = "binary") -> None:
    """Persist a mapping with its metadata.

    Binary mode is a one-line JSON header followed by the row-major float64
    matrix bytes (bit-exact round trip); CSV mode is a '#'-prefixed JSON
    header plus one matrix row per line.
    """
    header = {
        "format": "beamtwin-mapping",
        "version": MAPPING_FORMAT_VERSION,
        "n_angles": mapping.n_angles,
        "metadata": mapping.trained_on,
    }
    if fmt == "binary":
        payload = json.dumps(header, sort_keys=True).encode() + b"\n"
        payload += np.ascontiguousarray(mapping.matrix, dtype="<f8").tobytes()
        atomic_write_bytes(path, payload)
    elif fmt == "csv":
        lines = ["# " + json.dumps(header, sort_keys=True)]
        lines += [",".join(format(v, FLOAT_FMT) for v in row) for row in mapping.matrix]
        atomic_write_text(path, "\n".join(lines) + "\n")
    else:
        raise DataError(f"unknown mapping format {fmt!r}")


def load_mapping(path) -> AdaptationMapping:
    with open(path, "rb") as f:
        first = f.readline()
        if first.startswith(b"# "):
            header = _parse_mapping_header(path, first[2:].decode("utf-8"))
            n = header["n_angles"]
            rows = []
            for lineno, raw in enumerate(f.read().decode("utf-8").splitlines(), start=2):
                if not raw.strip() or raw.startswith("#"):
                    continue
                rows.append([float(v) for v in raw.split(",")])
            matrix = np.asarray(rows)
            if matrix.shape != (n, n):
                raise DataFormatError(f"{path}: expected {n}x{n} matrix, got {matrix.shape}")
        elif first.startswith(b"{"):
            header = _parse_mapping_header(path, first.decode("utf-8"))
            n = header["n_angles"]
            data = f.read()
            expected = n * n * 8
            if len(data) != expected:
                raise DataFormatError(
                    f"{path}: expected {expected} matrix bytes, got {len(data)}"
                )
            matrix = np.frombuffer(data, dtype="<f8").reshape(n, n).copy()
        else:
            raise DataFormatError(f"{path}: unrecognized mapping file header")
    return AdaptationMapping(matrix=matrix, trained_on=header.get("metadata", {}))


def _parse_mapping_header(path, text: str) -> dict:
    try:
        header = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: bad mapping header: {exc}") from exc
    if header.get("format") != "beamtwin-mapping":
        raise DataFormatError(f"{path}: not a mapping file")
    if header.get("version") != MAPPING_FORMAT_VERSION:
        raise DataFormatError(
            f"{path}: unsupported mapping version {header.get('version')!r}"
        )
    return header


# --- reports ---


def save_report(report_dict: dict, path) -> None:
    atomic_write_text(path, json.dumps(report_dict, indent=2, sort_keys=True) + "\n")


def load_report(path) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: invalid JSON: {exc}") from exc
    if doc.get("schema_version") != 1:
        raise DataFormatError(f"{path}: unsupported report schema_version")
    return doc


# --- adaptation pair files ---


def save_pairs(path, sims, gts) -> None:
    """Pair file for the adapt command: each line is one sample, the
    simulated profile followed by the ground-truth profile."""
    X = np.atleast_2d(np.asarray(sims, dtype=float))
    Y = np.atleast_2d(np.asarray(gts, dtype=float))
    if X.shape != Y.shape:
        raise DataError(f"sim/gt shape mismatch: {X.shape} vs {Y.shape}")
    lines = [
        ",".join(format(v, FLOAT_FMT) for v in np.concatenate([xs, ys]))
        for xs, ys in zip(X, Y)
    ]
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_pairs(path, n_angles: int = 180) -> tuple[np.ndarray, np.ndarray]:
    both = load_profiles(path, n_angles=2 * n_angles)
    return both[:, :n_angles], both[:, n_angles:]
