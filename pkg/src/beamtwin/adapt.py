"""Sim-to-real calibration: a dense linear map over the angular grid.

The mapping M (n_angles x n_angles) minimizes the mean squared error
between mapped simulated profiles and measured ground-truth profiles.
``fit_mapping`` runs plain mini-batch gradient descent on that objective;
``closed_form_mapping`` solves the same convex problem exactly via the
normal equations and doubles as an independent reference for the
stochastic fit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DivergenceError

INIT_IDENTITY = "identity"
INIT_ZEROS = "zeros"


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 256
    learning_rate: float = 1e-3
    epochs: int = 200
    seed: int = 0
    init: str = INIT_IDENTITY
    # stop when the relative loss improvement over `patience` epochs
    # falls below `rel_tol`
    rel_tol: float = 1e-6
    patience: int = 10

    def __post_init__(self):
        if self.batch_size < 1:
            raise ConfigurationError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate <= 0:
            raise ConfigurationError(
                f"learning_rate must be positive, got {self.learning_rate}"
            )
        if self.epochs < 1:
            raise ConfigurationError(f"epochs must be >= 1, got {self.epochs}")
        if self.init not in (INIT_IDENTITY, INIT_ZEROS):
            raise ConfigurationError(f"unknown init {self.init!r}")


@dataclass
class AdaptationMapping:
    matrix: np.ndarray
    trained_on: dict = field(default_factory=dict)
    loss_curve: np.ndarray | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ConfigurationError(f"mapping matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ConfigurationError("mapping matrix contains non-finite entries")
        self.matrix = m

    @property
    def n_angles(self) -> int:
        return self.matrix.shape[0]


def _stack_pairs(pairs) -> tuple[np.ndarray, np.ndarray]:
    sims, gts = [], []
    for sim, gt in pairs:
        sims.append(np.asarray(sim, dtype=float))
        gts.append(np.asarray(gt, dtype=float))
    if not sims:
        raise ConfigurationError("training requires at least one (sim, gt) pair")
    X = np.vstack(sims)
    Y = np.vstack(gts)
    if X.shape != Y.shape:
        raise ConfigurationError(
            f"sim and ground-truth profiles disagree in shape: {X.shape} vs {Y.shape}"
        )
    return X, Y


def _mean_loss(M: np.ndarray, X: np.ndarray, Y: np.ndarray) -> float:
    with np.errstate(over="ignore", invalid="ignore"):
        resid = X @ M.T - Y
        return float(np.mean(np.sum(resid * resid, axis=1)))


def fit_mapping(pairs, cfg: TrainConfig | None = None) -> AdaptationMapping:
    """Fit the linear mapping by mini-batch gradient descent.

    Parameters
    ----------
    pairs : sequence of (sim, gt)
        Simulated and measured ground-truth profiles on the same grid.
    cfg : TrainConfig
        Batch size, learning rate, epoch budget, seed, and init.

    The data is reshuffled every epoch with the seeded generator; a final
    partial batch is used at its actual size. The per-batch gradient of the
    mean squared error is (2/b) (M r_sim - r_gt) r_sim^T summed over the
    batch. The returned mapping carries the per-epoch mean loss curve
    (entry 0 is the loss at initialization) and is bit-reproducible for a
    fixed seed, config, and input order.
    """
    cfg = cfg or TrainConfig()
    X, Y = _stack_pairs(pairs)
    n_samples, n_angles = X.shape
    rng = np.random.default_rng(cfg.seed)
    M = np.eye(n_angles) if cfg.init == INIT_IDENTITY else np.zeros((n_angles, n_angles))

    losses = [_mean_loss(M, X, Y)]
    epochs_run = 0
    for epoch in range(cfg.epochs):
        perm = rng.permutation(n_samples)
        for start in range(0, n_samples, cfg.batch_size):
            idx = perm[start : start + cfg.batch_size]
            Xb, Yb = X[idx], Y[idx]
            resid = Xb @ M.T - Yb
            M = M - cfg.learning_rate * (2.0 / len(idx)) * (resid.T @ Xb)
        loss = _mean_loss(M, X, Y)
        if not np.isfinite(loss):
            raise DivergenceError(
                f"loss became non-finite at epoch {epoch + 1}; reduce the learning rate"
            )
        losses.append(loss)
        epochs_run = epoch + 1
        if len(losses) > cfg.patience:
            before = losses[-1 - cfg.patience]
            if before - loss < cfg.rel_tol * max(before, np.finfo(float).tiny):
                break

    return AdaptationMapping(
        matrix=M,
        trained_on={
            "n_samples": n_samples,
            "seed": cfg.seed,
            "epochs": epochs_run,
            "batch_size": cfg.batch_size,
            "learning_rate": cfg.learning_rate,
            "init": cfg.init,
            "final_loss": losses[-1],
        },
        loss_curve=np.array(losses),
    )


def closed_form_mapping(pairs, ridge: float = 1e-8) -> AdaptationMapping:
    """Exact minimizer of the same objective via the normal equations.

    With profiles stacked as columns of R_sim and R_gt, the optimum is
    M = R_gt R_sim^T (R_sim R_sim^T)^{-1}; the ridge term is added only
    when the Gram matrix is rank-deficient.
    """
    X, Y = _stack_pairs(pairs)
    n_angles = X.shape[1]
    gram = X.T @ X
    if np.linalg.matrix_rank(gram) < n_angles:
        gram = gram + ridge * np.eye(n_angles)
    M = np.linalg.solve(gram, X.T @ Y).T
    return AdaptationMapping(
        matrix=M,
        trained_on={"n_samples": X.shape[0], "solver": "normal-equations", "ridge": ridge},
    )


def apply_mapping(
    mapping: AdaptationMapping,
    profile,
    clamp: bool = True,
    return_clamp_mass: bool = False,
):
    """Map a profile through M; negative outputs are clamped to zero so the
    result remains a valid power profile for downstream inner products."""
    r = np.asarray(profile, dtype=float)
    if r.ndim != 1 or r.shape[0] != mapping.n_angles:
        raise ConfigurationError(
            f"profile shape {r.shape} does not match mapping size {mapping.n_angles}"
        )
    out = mapping.matrix @ r
    clamp_mass = 0.0
    if clamp:
        negative = out < 0.0
        clamp_mass = float(-out[negative].sum())
        out = np.where(negative, 0.0, out)
    if return_clamp_mass:
        return out, clamp_mass
    return out
