"""Peer-influence explanations for tabular classifiers.

Quantifies, for one prediction, how each feature's presence shifts every
other feature's attribution; renders the result as a support/attack graph
and recommends which feature(s) to alter to flip the prediction.
"""

from .data import (
    CATEGORICAL,
    NUMERICAL,
    Dataset,
    FeatureSchema,
    Instance,
    ReducedDataset,
    column_mean,
    load_csv,
    load_schema_file,
    nullify_instance,
    reduce_dataset,
    save_schema_file,
    split,
    write_csv,
)
from .errors import (
    CapacityError,
    ConsistencyError,
    DataParseError,
    DegenerateColumnError,
    EncodingError,
    ModelFormatError,
    PeerInfluenceError,
    SchemaError,
    TrainingError,
)
from .influence import (
    INCLUSIVE,
    ORIENTATION,
    STRICT,
    AlterationResult,
    ConflictMatrix,
    PeerInfluenceExplainer,
    PIExplanation,
    PIGraph,
    alt,
    calt,
    conflict_matrix,
    pearson_matrix,
    pi_explanation,
    pi_graph,
)
from .models import (
    GbdtClassifier,
    LogisticClassifier,
    load_model,
    save_model,
    train_gbdt,
    train_logistic,
)
from .shapley import (
    Attribution,
    ExplainerConfig,
    explain,
    shapley_exact,
    shapley_sampled,
    subsample_background,
)
from .synth import (
    CASE_FEATURES,
    DEFAULT_COEFFICIENTS,
    GeneratorConfig,
    LABEL_COLUMN,
    generate_synthetic,
)

__version__ = "0.1.0"

__all__ = [
    "Attribution",
    "AlterationResult",
    "CASE_FEATURES",
    "CATEGORICAL",
    "CapacityError",
    "ConflictMatrix",
    "ConsistencyError",
    "DEFAULT_COEFFICIENTS",
    "DataParseError",
    "Dataset",
    "DegenerateColumnError",
    "EncodingError",
    "ExplainerConfig",
    "FeatureSchema",
    "GbdtClassifier",
    "GeneratorConfig",
    "INCLUSIVE",
    "Instance",
    "LABEL_COLUMN",
    "LogisticClassifier",
    "ModelFormatError",
    "NUMERICAL",
    "ORIENTATION",
    "PIExplanation",
    "PIGraph",
    "PeerInfluenceError",
    "PeerInfluenceExplainer",
    "ReducedDataset",
    "STRICT",
    "SchemaError",
    "TrainingError",
    "alt",
    "calt",
    "column_mean",
    "conflict_matrix",
    "explain",
    "generate_synthetic",
    "load_csv",
    "load_model",
    "load_schema_file",
    "nullify_instance",
    "pearson_matrix",
    "pi_explanation",
    "pi_graph",
    "reduce_dataset",
    "save_model",
    "save_schema_file",
    "shapley_exact",
    "shapley_sampled",
    "split",
    "subsample_background",
    "train_gbdt",
    "train_logistic",
    "write_csv",
]
