"""Decompositional quantum graph classifier on a dense statevector simulator."""

from .checkpoint import load_checkpoint, save_checkpoint
from .crossval import Report, RunConfig, cross_validate, stratified_folds, write_report
from .errors import (
    CapacityError,
    DataError,
    DqgnnError,
    ParseError,
    TrainingError,
    UsageError,
)
from .graphdata import Graph, Subgraph, decompose_graph, parse_tudataset
from .mapping import (
    MappingParams,
    QuantumFeatureEncoder,
    encode_feature,
    hilbert_distance,
    mapping_loss,
    train_mapping,
)
from .model import (
    DQGNNClassifier,
    ModelParams,
    UlayerParams,
    accuracy,
    classify,
    count_parameters,
    embed_graphs,
    graph_embedding,
    subgraph_forward,
    train_model,
    training_loss,
)
from .optim import ObjectiveSpec, OptResult, minimize
from .qsim import (
    QuantumState,
    apply_cnot,
    apply_rotation,
    inner_product,
    measurement_entropy,
    tensor_product,
    zero_state,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "DQGNNClassifier",
    "DataError",
    "DqgnnError",
    "Graph",
    "MappingParams",
    "ModelParams",
    "ObjectiveSpec",
    "OptResult",
    "ParseError",
    "QuantumFeatureEncoder",
    "QuantumState",
    "Report",
    "RunConfig",
    "Subgraph",
    "TrainingError",
    "UlayerParams",
    "UsageError",
    "__version__",
    "accuracy",
    "apply_cnot",
    "apply_rotation",
    "classify",
    "count_parameters",
    "cross_validate",
    "decompose_graph",
    "embed_graphs",
    "encode_feature",
    "graph_embedding",
    "hilbert_distance",
    "inner_product",
    "load_checkpoint",
    "mapping_loss",
    "measurement_entropy",
    "minimize",
    "parse_tudataset",
    "save_checkpoint",
    "stratified_folds",
    "subgraph_forward",
    "tensor_product",
    "train_mapping",
    "train_model",
    "training_loss",
    "write_report",
    "zero_state",
]
