"""Scikit-learn style estimators over the pipeline stages.

These wrap the functional core so the stages compose with sklearn
pipelines and model-selection tooling: measurement matrices transform into
profile matrices, scenes transform into simulated profiles, the adapter is
a genuinely fitted transformer, and the predictor ranks beams.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .adapt import AdaptationMapping, TrainConfig, closed_form_mapping, fit_mapping
from .codebook import Codebook, synth_ula_codebook
from .errors import ConfigurationError
from .profiles import reconstruct_profile
from .simulate import SimConfig, simulate_profile
from .validation import as_profile_matrix


def _default_l2() -> Codebook:
    return synth_ula_codebook(16, 64, (-50.0, 50.0))


class ProfileReconstructor(BaseEstimator, TransformerMixin):
    """Reconstruct angular power profiles from per-beam measurements.

    Parameters
    ----------
    codebook : Codebook or None
        Beam codebook; defaults to the synthetic 16-element, 64-beam one.
    top_k : int
        Number of strongest measurements accumulated per sample.
    """

    def __init__(self, codebook: Codebook | None = None, top_k: int = 16):
        self.codebook = codebook
        self.top_k = top_k

    def fit(self, X=None, y=None):
        self.codebook_ = self.codebook or _default_l2()
        if not 1 <= self.top_k <= self.codebook_.n_beams:
            raise ConfigurationError(
                f"top_k must be in [1, {self.codebook_.n_beams}], got {self.top_k}"
            )
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "codebook_"):
            self.fit()
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.vstack(
            [reconstruct_profile(row, self.codebook_, self.top_k) for row in X]
        )


class SceneSimulator(BaseEstimator, TransformerMixin):
    """Transform scenes into simulated angular power profiles.

    Accepts a sequence of Scene objects; per-scene diagnostics from the
    last transform are kept in ``diagnostics_``.
    """

    def __init__(
        self,
        wavelength: float = 0.005,
        alpha_hw_deg: float = 10.0,
        min_path_length: float = 0.1,
        exclude_ue_object: bool = True,
    ):
        self.wavelength = wavelength
        self.alpha_hw_deg = alpha_hw_deg
        self.min_path_length = min_path_length
        self.exclude_ue_object = exclude_ue_object

    def _config(self) -> SimConfig:
        return SimConfig(
            wavelength=self.wavelength,
            alpha_hw_deg=self.alpha_hw_deg,
            min_path_length=self.min_path_length,
            exclude_ue_object=self.exclude_ue_object,
        )

    def fit(self, X=None, y=None):
        self.config_ = self._config()
        return self

    def transform(self, scenes) -> np.ndarray:
        if not hasattr(self, "config_"):
            self.fit()
        profiles = []
        diagnostics = []
        for scene in scenes:
            profile, diag = simulate_profile(scene, self.config_, return_diagnostics=True)
            profiles.append(profile)
            diagnostics.append(diag)
        self.diagnostics_ = diagnostics
        return np.vstack(profiles)


class ProfileAdapter(BaseEstimator, TransformerMixin):
    """Learn the sim-to-real linear mapping and apply it.

    ``fit`` takes simulated profiles X and measured ground-truth profiles y
    (both (n_samples, n_angles)); ``transform`` maps profiles through the
    learned matrix and clamps negatives.

    Parameters
    ----------
    solver : {"sgd", "lstsq"}
        Mini-batch gradient descent (the default) or the closed-form
        normal-equations solution.
    """

    def __init__(
        self,
        batch_size: int = 256,
        learning_rate: float = 1e-3,
        epochs: int = 200,
        seed: int = 0,
        init: str = "identity",
        solver: str = "sgd",
    ):
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.seed = seed
        self.init = init
        self.solver = solver

    def fit(self, X, y):
        X = as_profile_matrix(X)
        y = as_profile_matrix(y)
        if X.shape != y.shape:
            raise ConfigurationError(f"X and y shapes differ: {X.shape} vs {y.shape}")
        pairs = list(zip(X, y))
        if self.solver == "sgd":
            cfg = TrainConfig(
                batch_size=self.batch_size,
                learning_rate=self.learning_rate,
                epochs=self.epochs,
                seed=self.seed,
                init=self.init,
            )
            self.mapping_ = fit_mapping(pairs, cfg)
        elif self.solver == "lstsq":
            self.mapping_ = closed_form_mapping(pairs)
        else:
            raise ConfigurationError(f"unknown solver {self.solver!r}")
        self.matrix_ = self.mapping_.matrix
        self.loss_curve_ = self.mapping_.loss_curve
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "mapping_"):
            raise ConfigurationError("ProfileAdapter must be fitted before transform")
        X = as_profile_matrix(X)
        out = X @ self.matrix_.T
        return np.where(out < 0.0, 0.0, out)

    def set_mapping(self, mapping: AdaptationMapping) -> "ProfileAdapter":
        """Install a previously trained mapping (e.g. loaded from disk)."""
        self.mapping_ = mapping
        self.matrix_ = mapping.matrix
        self.loss_curve_ = mapping.loss_curve
        self.n_features_in_ = mapping.n_angles
        return self


class BeamPredictor(BaseEstimator):
    """Rank codebook beams by simulated received power.

    ``predict`` returns a (n_samples, top_k) integer array of beam indices
    in descending power order.
    """

    def __init__(self, codebook: Codebook | None = None, top_k: int = 1):
        self.codebook = codebook
        self.top_k = top_k

    def fit(self, X=None, y=None):
        self.codebook_ = self.codebook or _default_l2()
        if not 1 <= self.top_k <= self.codebook_.n_beams:
            raise ConfigurationError(
                f"top_k must be in [1, {self.codebook_.n_beams}], got {self.top_k}"
            )
        return self

    def predict(self, X) -> np.ndarray:
        if not hasattr(self, "codebook_"):
            self.fit()
        X = as_profile_matrix(X, self.codebook_.grid)
        powers = X @ self.codebook_.gain_matrix.T
        order = np.argsort(-powers, axis=1, kind="stable")
        return order[:, : self.top_k]
