"""Command-line pipeline: synth, reconstruct, simulate, adapt, evaluate, report.

Every command accepts ``--config file.json`` supplying defaults for its
flags (explicit flags win), and ``BEAMTWIN_DATA_DIR`` provides the default
dataset location when ``--dataset`` is omitted. Outputs are written
atomically and contain no timestamps, so reruns with identical inputs and
seeds are byte-identical.

Exit codes: 0 success, 1 configuration/usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import datasets as dio
from .adapt import TrainConfig, apply_mapping, fit_mapping
from .codebook import Codebook, load_codebook, map_l2_to_l1, save_codebook, synth_ula_codebook
from .errors import (
    BeamTwinError,
    ConfigurationError,
    DataError,
    DataFormatError,
    DivergenceError,
    GeometryError,
)
from .metrics import (
    DB_FACTOR_LITERAL,
    DB_FACTOR_POWER,
    GroundTruth,
    PredictionRecord,
    evaluate_predictions,
    gps_los_rank,
    predict_from_profile,
)
from .profiles import reconstruct_profile
from .scene import GeoReference, azimuth_of, gps_to_camera_frame, load_scene, save_scene
from .simulate import SimConfig, simulate_profile
from .synthetic import DEFAULT_GEOREF, ScenarioSpec, generate_dataset

logger = logging.getLogger(__name__)

ENV_DATA_DIR = "BEAMTWIN_DATA_DIR"
DEFAULT_RECONSTRUCT_K = 16


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the CLI contract wants 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="beamtwin", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON file supplying defaults for this command")

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    add_common(p)
    p.add_argument("--spec", required=True, help="scenario spec JSON")
    p.add_argument("--out-dir", help="output dataset directory")

    p = sub.add_parser("reconstruct", help="reconstruct profiles from measurements")
    add_common(p)
    p.add_argument("--dataset")
    p.add_argument("--k", type=int)
    p.add_argument("--split", default="all")
    p.add_argument("--out", required=True)

    p = sub.add_parser("simulate", help="simulate profiles from scenes")
    add_common(p)
    p.add_argument("--scene", help="single scene JSON")
    p.add_argument("--dataset", help="simulate every sample's scene")
    p.add_argument("--wavelength", type=float)
    p.add_argument("--alpha-hw", type=float, dest="alpha_hw")
    p.add_argument("--out", required=True)

    p = sub.add_parser("adapt", help="fit the sim-to-real mapping")
    add_common(p)
    p.add_argument("--pairs", help="pair CSV (sim profile followed by gt profile per line)")
    p.add_argument("--dataset", help="build pairs from a dataset split")
    p.add_argument("--split", default="calibration")
    p.add_argument("--scenario", help="fit only this scenario")
    p.add_argument(
        "--global",
        dest="global_mapping",
        action="store_true",
        help="fit one mapping over all scenarios instead of one per scenario",
    )
    p.add_argument("--k", type=int)
    p.add_argument("--batch-size", type=int, dest="batch_size")
    p.add_argument("--lr", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--init", choices=["identity", "zeros"])
    p.add_argument("--format", choices=["binary", "csv"], default="binary")
    p.add_argument("--out", required=True)

    p = sub.add_parser("evaluate", help="run a method over a dataset and score it")
    add_common(p)
    p.add_argument("--method", required=True, choices=["dt", "dt-adapt", "gps-los"])
    p.add_argument("--dataset")
    p.add_argument(
        "--mapping",
        action="append",
        help="mapping file for dt-adapt; repeat for per-scenario mappings "
        "(files fitted on one scenario apply to it, the rest act as the global fallback)",
    )
    p.add_argument("--split", default="test")
    p.add_argument("--k-max", type=int, dest="k_max", default=3)
    p.add_argument(
        "--db-convention",
        dest="db_convention",
        choices=["literal", "power"],
        default="literal",
        help="dB factor for the power loss: literal 20*log10 or conventional 10*log10",
    )
    p.add_argument("--wavelength", type=float)
    p.add_argument("--alpha-hw", type=float, dest="alpha_hw")
    p.add_argument("--per-sample-csv", dest="per_sample_csv")
    p.add_argument("--report", required=True)

    p = sub.add_parser("report", help="emit per-sample profile overlays for plotting")
    add_common(p)
    p.add_argument("--dataset")
    p.add_argument("--sample-id", required=True, dest="sample_id")
    p.add_argument("--mapping")
    p.add_argument("--k", type=int)
    p.add_argument("--out", required=True)

    return parser


def _apply_config(args: argparse.Namespace) -> argparse.Namespace:
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as f:
                config = json.load(f)
        except OSError as exc:
            raise ConfigurationError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
        for key, value in config.items():
            if getattr(args, key, None) is None:
                setattr(args, key, value)
    return args


def _resolve_dataset_path(args) -> Path:
    if getattr(args, "dataset", None):
        return Path(args.dataset)
    data_dir = os.environ.get(ENV_DATA_DIR)
    if data_dir:
        return Path(data_dir) / "manifest.json"
    raise ConfigurationError(
        f"--dataset is required (or set {ENV_DATA_DIR} to a directory with manifest.json)"
    )


def _load_codebooks(dataset: dio.Dataset) -> tuple[Codebook, Codebook]:
    l2 = load_codebook(dataset.codebook_path, level="L2")
    if dataset.l1_codebook_path is not None:
        l1 = load_codebook(dataset.l1_codebook_path, level="L1")
    else:
        l1 = synth_ula_codebook(6, 6, l2.angle_span, grid=l2.grid, level="L1")
    return l1, l2


def _sim_config(dataset: dio.Dataset, args) -> SimConfig:
    wavelength = getattr(args, "wavelength", None)
    alpha_hw = getattr(args, "alpha_hw", None)
    if wavelength is None:
        wavelength = dataset.sim.get("wavelength", 0.005)
    if alpha_hw is None:
        alpha_hw = dataset.sim.get("alpha_hw_deg", 10.0)
    return SimConfig(wavelength=float(wavelength), alpha_hw_deg=float(alpha_hw))


# --- commands ---


def _cmd_synth(args) -> int:
    with open(args.spec, "r", encoding="utf-8") as f:
        try:
            spec_doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{args.spec}: invalid JSON: {exc}") from exc
    if args.out_dir is None:
        raise ConfigurationError("--out-dir is required")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scenario_docs = spec_doc.get("scenarios", [spec_doc])

    shared = scenario_docs[0]
    cb_doc = shared.get("codebook", {})
    l1_doc = shared.get("l1_codebook", {})
    sim_doc = {
        "wavelength": shared.get("wavelength", 0.005),
        "alpha_hw_deg": shared.get("alpha_hw_deg", 10.0),
    }
    georef_doc = shared.get(
        "georef",
        {
            "origin_lat": DEFAULT_GEOREF.origin_lat,
            "origin_lon": DEFAULT_GEOREF.origin_lon,
            "camera_yaw_deg": DEFAULT_GEOREF.camera_yaw_deg,
        },
    )
    georef = GeoReference(
        origin_lat=float(georef_doc["origin_lat"]),
        origin_lon=float(georef_doc["origin_lon"]),
        camera_yaw_deg=float(georef_doc.get("camera_yaw_deg", 0.0)),
    )
    l2 = synth_ula_codebook(
        int(cb_doc.get("n_elements", 16)),
        int(cb_doc.get("n_beams", 64)),
        tuple(cb_doc.get("span", (-50.0, 50.0))),
        level="L2",
    )
    l1 = synth_ula_codebook(
        int(l1_doc.get("n_elements", 6)),
        int(l1_doc.get("n_beams", 6)),
        tuple(l1_doc.get("span", cb_doc.get("span", (-50.0, 50.0)))),
        level="L1",
    )
    sim_cfg = SimConfig(
        wavelength=float(sim_doc["wavelength"]), alpha_hw_deg=float(sim_doc["alpha_hw_deg"])
    )

    scenes_dir = out_dir / "scenes"
    scenes_dir.mkdir(exist_ok=True)
    all_samples = []
    unseen = []
    for doc in scenario_docs:
        scenario_id = str(doc.get("scenario_id", "synth"))
        spec = ScenarioSpec(
            n_reflectors=int(doc.get("n_reflectors", 3)),
            ue_range=tuple(doc.get("ue_range", (5.0, 50.0))),
            azimuth_range=tuple(doc.get("azimuth_range", (-50.0, 50.0))),
            reflectance_range=tuple(doc.get("reflectance_range", (0.2, 1.0))),
            noise_floor=float(doc.get("noise_floor", 0.0)),
            seed=int(doc.get("seed", 0)),
        )
        samples, scenes, _ = generate_dataset(
            spec,
            n_samples=int(doc.get("n_samples", 100)),
            scenario_id=scenario_id,
            codebook=l2,
            sim_config=sim_cfg,
            georef=georef,
            split_fractions=doc.get("splits"),
        )
        if doc.get("unseen", False):
            unseen.append(scenario_id)
        for sample, scene in zip(samples, scenes):
            save_scene(scene, scenes_dir / f"{sample.sample_id}.json", georef=georef)
        all_samples.extend(samples)

    save_codebook(l2, out_dir / "codebook.csv")
    save_codebook(l1, out_dir / "codebook_l1.csv")
    dio.save_samples_csv(out_dir / "samples.csv", all_samples)
    dio.save_manifest(
        out_dir / "manifest.json",
        {
            "samples_csv": "samples.csv",
            "codebook_csv": "codebook.csv",
            "l1_codebook_csv": "codebook_l1.csv",
            "scenes_dir": "scenes",
            "georef": georef_doc,
            "power_unit": "linear",
            "sim": sim_doc,
            "unseen_scenarios": unseen,
        },
    )
    logger.info("wrote %d samples to %s", len(all_samples), out_dir)
    return 0


def _cmd_reconstruct(args) -> int:
    dataset = dio.load_dataset(_resolve_dataset_path(args))
    _, l2 = _load_codebooks(dataset)
    k = args.k if args.k is not None else DEFAULT_RECONSTRUCT_K
    samples = dataset.subset(args.split)
    if not samples:
        raise DataError(f"no samples in split {args.split!r}")
    profiles = np.vstack([reconstruct_profile(s.measurements, l2, k) for s in samples])
    dio.save_profiles(args.out, profiles)
    logger.info("reconstructed %d profiles (k=%d) to %s", len(samples), k, args.out)
    return 0


def _cmd_simulate(args) -> int:
    if bool(args.scene) == bool(args.dataset):
        raise ConfigurationError("exactly one of --scene or --dataset is required")
    if args.scene:
        cfg = SimConfig(
            wavelength=args.wavelength if args.wavelength is not None else 0.005,
            alpha_hw_deg=args.alpha_hw if args.alpha_hw is not None else 10.0,
        )
        scene = load_scene(args.scene)
        profile, diag = simulate_profile(scene, cfg, return_diagnostics=True)
        dio.save_profiles(args.out, profile[None, :])
        diagnostics = [diag.to_dict()]
    else:
        dataset = dio.load_dataset(_resolve_dataset_path(args))
        cfg = _sim_config(dataset, args)
        rows = []
        diagnostics = []
        for sample in dataset.samples:
            scene = _load_sample_scene(dataset, sample.sample_id)
            profile, diag = simulate_profile(scene, cfg, return_diagnostics=True)
            rows.append(profile)
            diagnostics.append({"sample_id": sample.sample_id, **diag.to_dict()})
        dio.save_profiles(args.out, np.vstack(rows))
    dio.atomic_write_text(
        f"{args.out}.diag.json", json.dumps(diagnostics, indent=2, sort_keys=True) + "\n"
    )
    logger.info("simulated %d profiles to %s", len(diagnostics), args.out)
    return 0


def _load_sample_scene(dataset: dio.Dataset, sample_id: str):
    path = dataset.scene_path(sample_id)
    if not path.exists():
        raise DataError(f"scene file not found for sample {sample_id!r}: {path}")
    return load_scene(path)


def _cmd_adapt(args) -> int:
    if bool(args.pairs) == bool(args.dataset is not None):
        raise ConfigurationError("exactly one of --pairs or --dataset is required")
    train_cfg = TrainConfig(
        batch_size=args.batch_size if args.batch_size is not None else 256,
        learning_rate=args.lr if args.lr is not None else 1e-3,
        epochs=args.epochs if args.epochs is not None else 200,
        seed=args.seed if args.seed is not None else 0,
        init=args.init if args.init is not None else "identity",
    )

    if args.pairs:
        sims, gts = dio.load_pairs(args.pairs)
        groups = {None: (sims, gts)}
    else:
        dataset = dio.load_dataset(_resolve_dataset_path(args))
        _, l2 = _load_codebooks(dataset)
        cfg = _sim_config(dataset, args)
        k = args.k if args.k is not None else DEFAULT_RECONSTRUCT_K
        samples = dataset.subset(args.split)
        if args.scenario is not None:
            samples = [s for s in samples if s.scenario_id == args.scenario]
        if not samples:
            raise DataError(
                f"no samples in split {args.split!r}"
                + (f" for scenario {args.scenario!r}" if args.scenario else "")
            )
        pairs: dict[str | None, tuple[list, list]] = {}
        for sample in samples:
            scene = _load_sample_scene(dataset, sample.sample_id)
            # one mapping per scenario unless --global collapses them
            key = None if args.global_mapping else sample.scenario_id
            sims_g, gts_g = pairs.setdefault(key, ([], []))
            sims_g.append(simulate_profile(scene, cfg))
            gts_g.append(reconstruct_profile(sample.measurements, l2, k))
        groups = {
            key: (np.vstack(sims_g), np.vstack(gts_g))
            for key, (sims_g, gts_g) in sorted(
                pairs.items(), key=lambda item: item[0] or ""
            )
        }

    for scenario, (sims, gts) in groups.items():
        mapping = fit_mapping(list(zip(sims, gts)), train_cfg)
        if scenario is not None:
            mapping.trained_on["scenario_id"] = scenario
        path = _mapping_path(args.out, scenario, multi=len(groups) > 1)
        dio.save_mapping(mapping, path, fmt=args.format)
        logger.info(
            "fitted mapping on %d pairs%s, final loss %.6g, wrote %s",
            mapping.trained_on["n_samples"],
            f" (scenario {scenario})" if scenario else "",
            mapping.trained_on["final_loss"],
            path,
        )
    return 0


def _mapping_path(out, scenario: str | None, multi: bool) -> Path:
    out = Path(out)
    if scenario is None or not multi:
        return out
    return out.with_name(f"{out.stem}.{scenario}{out.suffix}")


class _MappingSet:
    """Scenario-to-mapping lookup: files carrying a scenario_id serve their
    scenario, a file without one is the global fallback."""

    def __init__(self, paths):
        self.per_scenario = {}
        self.fallback = None
        for path in paths:
            mapping = dio.load_mapping(path)
            scenario = mapping.trained_on.get("scenario_id")
            if scenario is None:
                self.fallback = mapping
            else:
                self.per_scenario[str(scenario)] = mapping

    def for_scenario(self, scenario_id: str):
        mapping = self.per_scenario.get(scenario_id, self.fallback)
        if mapping is None:
            raise DataError(
                f"no mapping covers scenario {scenario_id!r}; pass a mapping fitted "
                "on it or a global one"
            )
        return mapping


def _cmd_evaluate(args) -> int:
    dataset = dio.load_dataset(_resolve_dataset_path(args))
    l1, l2 = _load_codebooks(dataset)
    l2_to_l1 = map_l2_to_l1(l1, l2)
    cfg = _sim_config(dataset, args)
    k_max = args.k_max
    mappings = None
    if args.method == "dt-adapt":
        if not args.mapping:
            raise ConfigurationError("--mapping is required for method dt-adapt")
        paths = args.mapping if isinstance(args.mapping, (list, tuple)) else [args.mapping]
        mappings = _MappingSet(paths)

    samples = dataset.subset(args.split)
    if not samples:
        raise DataError(f"no samples in split {args.split!r}")

    preds: list[PredictionRecord] = []
    truths: list[GroundTruth] = []
    scenario_ids: list[str] = []
    skipped: list[str] = []
    for sample in sorted(samples, key=lambda s: s.sample_id):
        try:
            if args.method in ("dt", "dt-adapt"):
                scene = _load_sample_scene(dataset, sample.sample_id)
                profile = simulate_profile(scene, cfg)
                if mappings is not None:
                    profile = apply_mapping(mappings.for_scenario(sample.scenario_id), profile)
                pred = predict_from_profile(
                    profile, l1, l2, k_max, k_max, sample.sample_id, args.method
                )
            else:
                ue = gps_to_camera_frame(sample.ue_lat, sample.ue_lon, dataset.georef)
                az = azimuth_of(ue)
                pred = PredictionRecord(
                    sample_id=sample.sample_id,
                    predicted_l2=gps_los_rank(az, l2, k_max),
                    predicted_l1=gps_los_rank(az, l1, k_max),
                    method_tag=args.method,
                )
        except GeometryError as exc:
            logger.warning("skipping sample %s: %s", sample.sample_id, exc)
            skipped.append(f"{sample.sample_id}: {exc}")
            continue
        preds.append(pred)
        truths.append(
            GroundTruth.from_measurements(sample.sample_id, sample.measurements, l2_to_l1)
        )
        scenario_ids.append(sample.scenario_id)

    db_factor = DB_FACTOR_LITERAL if args.db_convention == "literal" else DB_FACTOR_POWER
    report = evaluate_predictions(
        preds,
        truths,
        scenario_ids,
        unseen_scenarios=dataset.unseen_scenarios,
        method=args.method,
        split=args.split,
        k_max=k_max,
        db_factor=db_factor,
    )
    report.warnings.extend(f"skipped {s}" for s in skipped)
    dio.save_report(report.to_dict(), args.report)
    if args.per_sample_csv:
        _write_per_sample_csv(args.per_sample_csv, preds, truths, scenario_ids, k_max, db_factor)
    logger.info("evaluated %d samples with method %s", len(preds), args.method)
    return 0


def _write_per_sample_csv(path, preds, truths, scenario_ids, k_max: int, db_factor: float) -> None:
    header = ["sample_id", "scenario_id", "best_l2", "best_l1", "pred_l2", "pred_l1"]
    header += [f"loss_db_top{k}" for k in range(1, k_max + 1)]
    lines = [",".join(header)]
    for p, t, sid in zip(preds, truths, scenario_ids):
        y_best = float(t.measurements[t.best_l2])
        losses = []
        for k in range(1, k_max + 1):
            y_pred = float(np.max(t.measurements[p.predicted_l2[:k]]))
            if y_best <= 0.0 or y_pred <= 0.0:
                losses.append("")
            else:
                losses.append(format(db_factor * np.log10(y_best / y_pred), ".17g"))
        lines.append(
            ",".join(
                [
                    p.sample_id,
                    sid,
                    str(t.best_l2),
                    str(t.best_l1),
                    str(int(p.predicted_l2[0])),
                    str(int(p.predicted_l1[0])),
                ]
                + losses
            )
        )
    dio.atomic_write_text(path, "\n".join(lines) + "\n")


def _cmd_report(args) -> int:
    dataset = dio.load_dataset(_resolve_dataset_path(args))
    _, l2 = _load_codebooks(dataset)
    cfg = _sim_config(dataset, args)
    k = args.k if args.k is not None else DEFAULT_RECONSTRUCT_K
    matches = [s for s in dataset.samples if s.sample_id == args.sample_id]
    if not matches:
        raise DataError(f"sample {args.sample_id!r} not found in dataset")
    sample = matches[0]
    measured = reconstruct_profile(sample.measurements, l2, k)
    scene = _load_sample_scene(dataset, sample.sample_id)
    dt = simulate_profile(scene, cfg)
    adapted = None
    if args.mapping:
        mapping = dio.load_mapping(args.mapping)
        adapted = apply_mapping(mapping, dt)

    angles = l2.grid.angles
    # the end_to_end column is a reserved slot for an external baseline
    lines = ["angle_deg,measured,dt,dt_adapt,end_to_end"]
    for j in range(l2.grid.n_angles):
        lines.append(
            ",".join(
                [
                    format(angles[j], ".17g"),
                    format(measured[j], ".17g"),
                    format(dt[j], ".17g"),
                    format(adapted[j], ".17g") if adapted is not None else "",
                    "",
                ]
            )
        )
    dio.atomic_write_text(args.out, "\n".join(lines) + "\n")
    logger.info("wrote profile overlay for sample %s to %s", args.sample_id, args.out)
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "reconstruct": _cmd_reconstruct,
    "simulate": _cmd_simulate,
    "adapt": _cmd_adapt,
    "evaluate": _cmd_evaluate,
    "report": _cmd_report,
}


def run(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose >= 2 else
        logging.INFO if args.verbose == 1 else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args = _apply_config(args)
        return _COMMANDS[args.command](args)
    except ConfigurationError as exc:
        logger.error("%s", exc)
        print(f"beamtwin: configuration error: {exc}", file=sys.stderr)
        return 1
    except (DataError, DataFormatError, GeometryError, DivergenceError) as exc:
        logger.error("%s", exc)
        print(f"beamtwin: data error: {exc}", file=sys.stderr)
        return 2
    except BeamTwinError as exc:
        print(f"beamtwin: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
