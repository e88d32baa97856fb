"""beamtwin: digital-twin toolkit for mmWave beam management.

Reconstructs angular power profiles from beam measurements, simulates them
from point-reflector scenes, calibrates simulation to measurement with a
learnable linear mapping, and evaluates beam-prediction downstream tasks.
"""

from .adapt import (
    AdaptationMapping,
    TrainConfig,
    apply_mapping,
    closed_form_mapping,
    fit_mapping,
)
from .codebook import (
    BeamProfile,
    Codebook,
    load_codebook,
    map_l2_to_l1,
    save_codebook,
    synth_ula_codebook,
    ula_gain,
)
from .errors import (
    BeamTwinError,
    ConfigurationError,
    DataError,
    DataFormatError,
    DivergenceError,
    GeometryError,
)
from .estimators import BeamPredictor, ProfileAdapter, ProfileReconstructor, SceneSimulator
from .grid import AngularGrid
from .metrics import (
    EvaluationReport,
    GroundTruth,
    PredictionRecord,
    dba_score,
    evaluate_predictions,
    gps_los_predict,
    gps_los_rank,
    l1_accuracy,
    loss_percentile,
    overall_dba,
    power_loss,
    predict_from_profile,
)
from .profiles import (
    reconstruct_profile,
    simulate_all_beam_powers,
    simulate_beam_power,
    top_k_beams,
)
from .scene import (
    GeoReference,
    PointReflector,
    ReflectanceTable,
    Scene,
    azimuth_of,
    camera_frame_to_gps,
    gps_to_camera_frame,
    identify_ue,
    load_scene,
    reflectance_for_class,
    save_scene,
)
from .simulate import (
    PathImpulse,
    SimConfig,
    SimDiagnostics,
    build_impulses,
    pathloss_los,
    pathloss_reflector,
    simulate_profile,
    sinc_kernel,
)
from .synthetic import ScenarioSpec, generate_dataset, generate_scenario

__version__ = "0.1.0"

__all__ = [
    "AdaptationMapping",
    "AngularGrid",
    "BeamPredictor",
    "BeamProfile",
    "BeamTwinError",
    "Codebook",
    "ConfigurationError",
    "DataError",
    "DataFormatError",
    "DivergenceError",
    "EvaluationReport",
    "GeoReference",
    "GeometryError",
    "GroundTruth",
    "PathImpulse",
    "PointReflector",
    "PredictionRecord",
    "ProfileAdapter",
    "ProfileReconstructor",
    "ReflectanceTable",
    "ScenarioSpec",
    "Scene",
    "SceneSimulator",
    "SimConfig",
    "SimDiagnostics",
    "TrainConfig",
    "apply_mapping",
    "azimuth_of",
    "build_impulses",
    "camera_frame_to_gps",
    "closed_form_mapping",
    "dba_score",
    "evaluate_predictions",
    "fit_mapping",
    "generate_dataset",
    "generate_scenario",
    "gps_los_predict",
    "gps_los_rank",
    "gps_to_camera_frame",
    "identify_ue",
    "l1_accuracy",
    "load_codebook",
    "load_scene",
    "loss_percentile",
    "map_l2_to_l1",
    "overall_dba",
    "pathloss_los",
    "pathloss_reflector",
    "power_loss",
    "predict_from_profile",
    "reconstruct_profile",
    "reflectance_for_class",
    "save_codebook",
    "save_scene",
    "simulate_all_beam_powers",
    "simulate_beam_power",
    "simulate_profile",
    "sinc_kernel",
    "synth_ula_codebook",
    "top_k_beams",
    "ula_gain",
]
