"""Rule-generated legal-decision datasets, from-scratch network training,
and condition-level rationale evaluation of the trained models."""

__version__ = "0.1.0"

from .domains import (
    Condition,
    DomainSchema,
    FeatureSpec,
    SchemaValidationError,
    build_domain,
    complete_case,
    eval_condition,
    eval_label,
)
from .generation import (
    DEDICATED_TARGET,
    Dataset,
    DatasetMeta,
    GenerationError,
    GeneratorRequest,
    gen_tort,
    gen_welfare,
    generate,
)
from .dataset_io import DatasetFormatError, read_dataset, write_dataset
from .oracle import (
    ExpectedStats,
    VerificationReport,
    enumerate_tort,
    expected_stats,
    uniform_positive_rate,
    verify_dataset,
)
from .network import (
    AdamState,
    FeatureScaling,
    ModelParams,
    NetworkConfig,
    TrainConfig,
    TrainedModel,
    TrainingDivergedError,
    adam_update,
    forward,
    init_params,
    load_model,
    loss_and_grads,
    predict,
    save_model,
    train,
)
from .evaluation import (
    ConditionOracleModel,
    ConditionOutputTable,
    ConstantOutputModel,
    CurveDeviation,
    IdealCurve,
    LabelOracleModel,
    RationaleCurve,
    TurningPointReport,
    accuracy,
    condition_table,
    curve_deviation,
    ideal_curve,
    output_curve,
    turning_points,
    write_curve_tsv,
)
from .harness import (
    AggregateReport,
    CellAggregate,
    ExperimentPlan,
    derive_seed,
    emit_report,
    load_plan,
    replay,
    run_plan,
    save_plan,
)
