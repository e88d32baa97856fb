"""Beam-prediction tasks and evaluation metrics.

Covers the two downstream tasks (coarse/L1 and fine/L2 beam prediction
from an angular power profile), the GPS line-of-sight baseline, and the
evaluation metrics: L1 accuracy, received power loss with percentile
statistics, and the distance-based accuracy (DBA) score with the
seen/unseen scenario weighting.

All powers are linear-scale; decibels appear only in reported metrics.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .codebook import Codebook
from .errors import ConfigurationError, DataError
from .profiles import top_k_beams

logger = logging.getLogger(__name__)

#: DeepSense-challenge DBA constants: average over the first k_max ranks,
#: beam-index distance saturating at delta.
DBA_K_MAX = 3
DBA_DELTA = 5


@dataclass
class PredictionRecord:
    sample_id: str
    predicted_l2: np.ndarray
    predicted_l1: np.ndarray
    method_tag: str = ""

    def __post_init__(self):
        self.predicted_l2 = np.asarray(self.predicted_l2, dtype=int)
        self.predicted_l1 = np.asarray(self.predicted_l1, dtype=int)
        for name, arr in (("predicted_l2", self.predicted_l2), ("predicted_l1", self.predicted_l1)):
            if len(np.unique(arr)) != len(arr):
                raise ConfigurationError(f"{name} contains duplicate beam indices")


@dataclass
class GroundTruth:
    sample_id: str
    measurements: np.ndarray
    best_l2: int
    best_l1: int

    @classmethod
    def from_measurements(cls, sample_id: str, measurements, l2_to_l1: np.ndarray) -> "GroundTruth":
        y = np.asarray(measurements, dtype=float)
        best_l2 = int(np.argmax(y))  # ties resolve to the lower beam index
        return cls(
            sample_id=sample_id,
            measurements=y,
            best_l2=best_l2,
            best_l1=int(l2_to_l1[best_l2]),
        )


def predict_from_profile(
    profile,
    l1: Codebook,
    l2: Codebook,
    k1: int,
    k2: int,
    sample_id: str = "",
    method_tag: str = "",
) -> PredictionRecord:
    """Rank beams in both codebooks by simulated received power."""
    return PredictionRecord(
        sample_id=sample_id,
        predicted_l2=top_k_beams(profile, l2, k2),
        predicted_l1=top_k_beams(profile, l1, k1),
        method_tag=method_tag,
    )


def gps_los_rank(ue_azimuth_deg: float, codebook: Codebook, k: int) -> np.ndarray:
    """Beams ranked by gain at the UE azimuth bin (the LoS-only baseline).

    Azimuths outside the grid span are clamped to the nearest endpoint and
    logged; ties break toward the lower beam index.
    """
    if k < 1 or k > codebook.n_beams:
        raise ConfigurationError(f"k must be in [1, {codebook.n_beams}], got {k}")
    grid = codebook.grid
    if not grid.contains(ue_azimuth_deg):
        logger.warning(
            "UE azimuth %.2f deg outside grid span; clamping to nearest endpoint",
            ue_azimuth_deg,
        )
    j = grid.clipped_index(ue_azimuth_deg)
    order = np.argsort(-codebook.gain_matrix[:, j], kind="stable")
    return order[:k]


def gps_los_predict(ue_azimuth_deg: float, codebook: Codebook) -> int:
    """Single best beam by gain at the UE azimuth."""
    return int(gps_los_rank(ue_azimuth_deg, codebook, 1)[0])


def _check_aligned(preds: Sequence[PredictionRecord], truths: Sequence[GroundTruth]) -> None:
    if len(preds) != len(truths):
        raise DataError(f"{len(preds)} predictions vs {len(truths)} ground truths")
    for p, t in zip(preds, truths):
        if p.sample_id != t.sample_id:
            raise DataError(f"sample id mismatch: {p.sample_id!r} vs {t.sample_id!r}")


def l1_accuracy(preds: Sequence[PredictionRecord], truths: Sequence[GroundTruth]) -> float:
    """Fraction of samples whose true L1 beam appears among the predicted ones."""
    _check_aligned(preds, truths)
    if not preds:
        raise DataError("cannot compute accuracy over zero samples")
    hits = sum(1 for p, t in zip(preds, truths) if t.best_l1 in p.predicted_l1)
    return hits / len(preds)


#: The published loss formula applies 20*log10 to a power ratio; the
#: conventional power-ratio factor would be 10. Kept literal by default and
#: switchable where the loss is computed (CLI: --db-convention).
DB_FACTOR_LITERAL = 20.0
DB_FACTOR_POWER = 10.0


def power_loss(
    preds: Sequence[PredictionRecord],
    truths: Sequence[GroundTruth],
    k: int,
    db_factor: float = DB_FACTOR_LITERAL,
) -> tuple[float, np.ndarray]:
    """Received power loss of top-k L2 prediction, in dB.

    The aggregate follows the mean-of-ratios form
    db_factor*log10(mean_n(y_best / max y_predicted)); the per-sample dB
    values feed the percentile statistics. Samples whose best beam measured
    zero power are excluded with a warning.
    """
    _check_aligned(preds, truths)
    ratios = []
    per_sample_db = []
    skipped = 0
    for p, t in zip(preds, truths):
        if len(p.predicted_l2) < k:
            raise ConfigurationError(
                f"sample {p.sample_id!r} has {len(p.predicted_l2)} predictions, need {k}"
            )
        y_best = float(t.measurements[t.best_l2])
        if y_best <= 0.0:
            skipped += 1
            continue
        y_pred = float(np.max(t.measurements[p.predicted_l2[:k]]))
        ratio = y_best / y_pred if y_pred > 0.0 else np.inf
        ratios.append(ratio)
        per_sample_db.append(db_factor * np.log10(ratio))
    if skipped:
        logger.warning("power_loss: excluded %d samples with zero best-beam power", skipped)
    if not ratios:
        raise DataError("power_loss: no usable samples")
    aggregate = db_factor * np.log10(float(np.mean(ratios)))
    return aggregate, np.asarray(per_sample_db)


def loss_percentile(per_sample_db, q: float) -> float:
    """Linear-interpolated percentile of the per-sample losses."""
    values = np.asarray(per_sample_db, dtype=float)
    if values.size == 0:
        raise DataError("cannot take a percentile of an empty sequence")
    return float(np.percentile(values, q, method="linear"))


def dba_score(
    preds: Sequence[PredictionRecord],
    truths: Sequence[GroundTruth],
    k_max: int = DBA_K_MAX,
    delta: int = DBA_DELTA,
) -> float:
    """Distance-based accuracy over the top-k_max L2 predictions.

    DBA = 1 - (1/k_max) * sum_k Y_k with
    Y_k = mean_n min(min_{j<=k} |pred_{n,j} - best_n|, delta) / delta,
    so a perfect top-1 prediction on every sample scores exactly 1.
    """
    _check_aligned(preds, truths)
    if not preds:
        raise DataError("cannot compute DBA over zero samples")
    y_sum = 0.0
    for kk in range(1, k_max + 1):
        total = 0.0
        for p, t in zip(preds, truths):
            if len(p.predicted_l2) < k_max:
                raise ConfigurationError(
                    f"sample {p.sample_id!r} has {len(p.predicted_l2)} predictions, "
                    f"need {k_max}"
                )
            dist = np.min(np.abs(p.predicted_l2[:kk] - t.best_l2))
            total += min(float(dist), float(delta)) / float(delta)
        y_sum += total / len(preds)
    return 1.0 - y_sum / k_max


def overall_dba(per_scenario: Mapping[str, tuple[float, bool]]) -> float:
    """Weighted overall DBA: 1/2 on the unseen scenario and 1/6 on each of
    three seen scenarios; any other mix falls back to a plain mean."""
    if not per_scenario:
        raise DataError("overall_dba requires at least one scenario")
    unseen = [score for score, seen in per_scenario.values() if not seen]
    seen = [score for score, seen in per_scenario.values() if seen]
    if len(unseen) == 1 and len(seen) == 3:
        return 0.5 * unseen[0] + sum(seen) / 6.0
    logger.warning(
        "overall_dba: expected 1 unseen + 3 seen scenarios, got %d + %d; using plain mean",
        len(unseen),
        len(seen),
    )
    scores = [score for score, _ in per_scenario.values()]
    return float(np.mean(scores))


@dataclass
class EvaluationReport:
    method: str
    split: str
    n_samples: int
    k_max: int
    l1_accuracy: dict = field(default_factory=dict)
    power_loss_db: dict = field(default_factory=dict)
    dba_per_scenario: dict = field(default_factory=dict)
    dba_overall: float | None = None
    dba_weighting: str = "mean"
    warnings: list = field(default_factory=list)

    SCHEMA_VERSION = 1

    def to_dict(self) -> dict:
        return {
            "schema_version": self.SCHEMA_VERSION,
            "method": self.method,
            "split": self.split,
            "n_samples": self.n_samples,
            "k_max": self.k_max,
            "l1_accuracy": {str(k): v for k, v in self.l1_accuracy.items()},
            "power_loss_db": {str(k): v for k, v in self.power_loss_db.items()},
            "dba": {
                "per_scenario": self.dba_per_scenario,
                "overall": self.dba_overall,
                "weighting": self.dba_weighting,
            },
            "warnings": list(self.warnings),
        }


def evaluate_predictions(
    preds: Sequence[PredictionRecord],
    truths: Sequence[GroundTruth],
    scenario_ids: Sequence[str],
    unseen_scenarios: Sequence[str] = (),
    method: str = "",
    split: str = "",
    k_max: int = DBA_K_MAX,
    dba_delta: int = DBA_DELTA,
    db_factor: float = DB_FACTOR_LITERAL,
) -> EvaluationReport:
    """Fold predictions and ground truths into a full evaluation report.

    Computes L1 accuracy and top-k power loss (aggregate plus 50th/95th
    percentiles) for every k up to k_max, and the DBA score per scenario
    with the seen/unseen weighting when the scenario mix supports it.
    """
    _check_aligned(preds, truths)
    if len(scenario_ids) != len(preds):
        raise DataError("scenario_ids must align with predictions")
    report = EvaluationReport(method=method, split=split, n_samples=len(preds), k_max=k_max)

    for k in range(1, k_max + 1):
        preds_k = [
            PredictionRecord(p.sample_id, p.predicted_l2, p.predicted_l1[:k], p.method_tag)
            for p in preds
        ]
        report.l1_accuracy[k] = l1_accuracy(preds_k, truths)
        aggregate, per_sample = power_loss(preds, truths, k, db_factor=db_factor)
        report.power_loss_db[k] = {
            "aggregate": aggregate,
            "p50": loss_percentile(per_sample, 50.0),
            "p95": loss_percentile(per_sample, 95.0),
        }

    by_scenario: dict[str, tuple[list, list]] = {}
    for p, t, sid in zip(preds, truths, scenario_ids):
        by_scenario.setdefault(sid, ([], []))[0].append(p)
        by_scenario[sid][1].append(t)
    per_scenario: dict[str, tuple[float, bool]] = {}
    for sid, (ps, ts) in sorted(by_scenario.items()):
        score = dba_score(ps, ts, k_max=k_max, delta=dba_delta)
        per_scenario[sid] = (score, sid not in set(unseen_scenarios))
        report.dba_per_scenario[sid] = score
    n_unseen = sum(1 for _, seen in per_scenario.values() if not seen)
    n_seen = len(per_scenario) - n_unseen
    report.dba_weighting = "deepsense" if (n_unseen == 1 and n_seen == 3) else "mean"
    if report.dba_weighting == "mean" and len(per_scenario) > 1:
        report.warnings.append(
            "scenario mix is not 1 unseen + 3 seen; overall DBA is a plain mean"
        )
    report.dba_overall = overall_dba(per_scenario)
    return report
