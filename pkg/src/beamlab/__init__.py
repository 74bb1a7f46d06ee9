"""beamlab: planar-array beam synthesis and benchmarking.

Exact phase-only steering and pattern math (:mod:`beamlab.array_core`),
802.15.3-style steering codebooks (:mod:`beamlab.codebook`), beam-quality
metrics (:mod:`beamlab.metrics`), a from-scratch neural phase regressor
(:mod:`beamlab.neural`), and experiment pipelines plus the CLI
(:mod:`beamlab.harness`, :mod:`beamlab.cli`).
"""

from .array_core import (
    ArrayGeometry,
    BeamPointingAngle,
    DirectionGrid,
    Directivity,
    PhaseVector,
    RadiationPattern,
    array_field,
    directivity,
    element_factor,
    find_peak,
    mgb_weights,
    planar_geometry,
    quantize_phases,
    radiation_pattern,
    wrap_phase_deg,
)
from .codebook import (
    Codebook,
    build_planar_codebook,
    calibrate_codebook,
    linear_codeword_phase,
    load_codebook,
    nearest_codeword,
    save_codebook,
)
from .metrics import (
    MetricSample,
    central_angle,
    central_angle_deg,
    cosine_similarity,
    empirical_cdf,
    quantiles,
)
from .neural import (
    MlpModel,
    ScalerPair,
    ScalerParams,
    TrainConfig,
    TrainedRegressor,
    adam_step,
    apply_scaler,
    fit,
    fit_scaler,
    forward,
    invert_scaler,
    load_model,
    predict_phases,
    save_model,
    snake_activation,
    tsigmoid_activation,
)
from .harness import (
    BeamDataset,
    CodebookProvider,
    EvalReport,
    MgbProvider,
    PipelineConfig,
    RegressorProvider,
    SectorSpec,
    evaluate_approach,
    export_report,
    generate_dataset,
    measure_inference_latency,
    quantization_sweep,
    run_pipeline,
    split_dataset,
    train_regressor,
)

__version__ = "0.1.0"
