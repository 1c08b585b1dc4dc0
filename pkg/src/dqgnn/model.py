"""Decompositional graph classifier forward pass and training.

Per layer, each node's subgraph becomes a joint state: a trained rotation
block on the center qubit, a shared rotation block on every neighbor qubit,
a tensor product (chunked to the device capacity when the neighborhood is
large), and optional CNOT entanglement within each device-sized factor. The
measurement entropy of that joint state, normalized by its qubit count,
is re-encoded as the node's single-qubit input to the next layer. A graph's
embedding is the sum of final-layer node entropies, and classification
compares that scalar against two trained reference entropies.

Two observations keep training fast without changing any value: CNOT
networks permute measurement outcomes (entropy-invariant), and the
measurement distribution of a tensor product factorizes, so a joint
entropy is the sum of its per-qubit entropies. The batch engine uses this
identity; node_recursion walks the explicit statevector path, and the two
are tested against each other.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from functools import reduce

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from . import optim
from .errors import TrainingError, UsageError
from .graphdata import Graph, Subgraph, decompose_graph, partition_neighbors
from .mapping import (
    MappingParams,
    encode_feature,
    encode_rows,
    train_mapping,
)
from .qsim import (
    CnotGate,
    QuantumState,
    apply_cnot,
    apply_rotation,
    measurement_entropy,
    RotationGate,
    rotation_matrix,
    tensor_product,
)

HINGE_MARGIN = 0.1

DEFAULT_LAYERS = 3
DEFAULT_CAPACITY = 8

ENTANGLE_MODES = ("full", "ring", "off")


def _check_angles(angles, name: str) -> tuple:
    values = tuple(float(a) for a in angles)
    if len(values) != 3:
        raise UsageError(f"{name} must hold 3 angles, got {len(values)}")
    if not all(np.isfinite(values)):
        raise UsageError(f"{name} must be finite")
    return values


@dataclass(frozen=True)
class UlayerParams:
    """One layer's rotation angles: a center triple and a shared
    neighbor triple, each ordered (x, y, z)."""

    center_angles: tuple
    neighbor_angles: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "center_angles",
            _check_angles(self.center_angles, "center_angles"),
        )
        object.__setattr__(
            self, "neighbor_angles",
            _check_angles(self.neighbor_angles, "neighbor_angles"),
        )


@dataclass(frozen=True)
class ModelParams:
    """Full trained state: K layers, two class reference entropies, and
    the frozen feature encoder (None only for encoder-less counting)."""

    layers: tuple
    centroid_0: float
    centroid_1: float
    mapping: MappingParams | None

    def __post_init__(self):
        layers = tuple(self.layers)
        if len(layers) < 1:
            raise UsageError("at least one layer is required")
        if not all(isinstance(layer, UlayerParams) for layer in layers):
            raise UsageError("layers must be UlayerParams instances")
        if not (np.isfinite(self.centroid_0) and np.isfinite(self.centroid_1)):
            raise UsageError("centroids must be finite")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "centroid_0", float(self.centroid_0))
        object.__setattr__(self, "centroid_1", float(self.centroid_1))

    @property
    def layer_count(self) -> int:
        return len(self.layers)

    @property
    def feature_dim(self) -> int:
        return 0 if self.mapping is None else self.mapping.dimension


@dataclass(frozen=True)
class GraphEmbedding:
    """Scalar graph representation: total final-layer entropy in bits."""

    value: float

    def __post_init__(self):
        if not np.isfinite(self.value) or self.value < 0.0:
            raise UsageError(
                f"embedding must be a finite non-negative real, "
                f"got {self.value}"
            )
        object.__setattr__(self, "value", float(self.value))


def _entangle_mode(entangle) -> str:
    if entangle is True:
        return "full"
    if entangle is False:
        return "off"
    if entangle in ENTANGLE_MODES:
        return entangle
    raise UsageError(
        f"entangle must be a boolean or one of {ENTANGLE_MODES}, "
        f"got {entangle!r}"
    )


def ucov(state: QuantumState, angles) -> QuantumState:
    """Rotation block on a single qubit: RZ, then RY, then RX."""
    if state.qubit_count != 1:
        raise UsageError(
            f"ucov expects a single-qubit state, got {state.qubit_count}"
        )
    theta_x, theta_y, theta_z = _check_angles(angles, "angles")
    state = apply_rotation(state, RotationGate("z", theta_z, 0))
    state = apply_rotation(state, RotationGate("y", theta_y, 0))
    return apply_rotation(state, RotationGate("x", theta_x, 0))


def uent(state: QuantumState) -> QuantumState:
    """CNOT(i, j) for every pair i < j in lexicographic order."""
    q = state.qubit_count
    for control in range(q):
        for target in range(control + 1, q):
            state = apply_cnot(state, CnotGate(control, target))
    return state


def _ring_entangle(state: QuantumState) -> QuantumState:
    q = state.qubit_count
    if q < 2:
        return state
    if q == 2:
        return apply_cnot(state, CnotGate(0, 1))
    for control in range(q):
        state = apply_cnot(state, CnotGate(control, (control + 1) % q))
    return state


def _entangle_state(state: QuantumState, mode: str) -> QuantumState:
    if mode == "full":
        return uent(state)
    if mode == "ring":
        return _ring_entangle(state)
    return state


def _device_states(subgraph: Subgraph, node_states, layer: UlayerParams,
                   capacity: int, mode: str) -> list:
    """Per-device joint states before the classical merge.

    One device holds the whole subgraph when it fits; otherwise the center
    is its own device and neighbors are chunked, with entanglement applied
    only inside each device.
    """
    if capacity < 1:
        raise UsageError(f"capacity must be >= 1, got {capacity}")
    missing = [
        v for v in (subgraph.center, *subgraph.neighbors) if v not in node_states
    ]
    if missing:
        raise UsageError(f"missing node states for {missing}")

    center = ucov(node_states[subgraph.center], layer.center_angles)
    transformed = {
        v: ucov(node_states[v], layer.neighbor_angles)
        for v in subgraph.neighbors
    }

    if 1 + subgraph.degree <= capacity:
        joint = reduce(
            tensor_product,
            (transformed[v] for v in subgraph.neighbors),
            center,
        )
        return [_entangle_state(joint, mode)]

    devices = [_entangle_state(center, mode)]
    for chunk in partition_neighbors(subgraph, capacity).chunks:
        joint = reduce(
            tensor_product, (transformed[v] for v in chunk[1:]),
            transformed[chunk[0]],
        )
        devices.append(_entangle_state(joint, mode))
    return devices


def subgraph_forward(subgraph: Subgraph, node_states, layer: UlayerParams,
                     capacity: int, entangle) -> QuantumState:
    """Joint state of a subgraph: center factor first, then neighbors in
    ascending index order, chunk-merged when over capacity."""
    mode = _entangle_mode(entangle)
    devices = _device_states(subgraph, node_states, layer, capacity, mode)
    return reduce(tensor_product, devices)


def _reencode(normalized_entropy: float) -> QuantumState:
    half = 0.5 * np.pi * normalized_entropy
    return QuantumState(
        np.array([np.cos(half), np.sin(half)], dtype=np.complex128), 1
    )


def node_recursion(graph: Graph, params: ModelParams, capacity: int,
                   entangle) -> dict:
    """Per-node entropies after all layers, via explicit statevectors.

    Between layers each node's joint entropy is divided by its qubit count
    and re-encoded as RY(pi * h)|0>. Per-device entropies are summed rather
    than merged first; the two are equal because measurement distributions
    of tensor products factorize.
    """
    mode = _entangle_mode(entangle)
    if params.mapping is None:
        raise UsageError("model has no feature encoder")
    subgraphs = decompose_graph(graph)
    states = {
        v: encode_feature(graph.node_features[v], params.mapping)
        for v in range(graph.node_count)
    }
    entropies: dict = {}
    for index, layer in enumerate(params.layers):
        entropies = {}
        for subgraph in subgraphs:
            devices = _device_states(subgraph, states, layer, capacity, mode)
            entropies[subgraph.center] = sum(
                measurement_entropy(device) for device in devices
            )
        if index + 1 < len(params.layers):
            states = {
                s.center: _reencode(entropies[s.center] / (1 + s.degree))
                for s in subgraphs
            }
    return entropies


def graph_embedding(graph: Graph, params: ModelParams, capacity: int,
                    entangle) -> GraphEmbedding:
    """Sum of final-layer node entropies."""
    entropies = node_recursion(graph, params, capacity, entangle)
    return GraphEmbedding(max(sum(entropies.values()), 0.0))


def classify(embedding, params: ModelParams) -> int:
    """Label rule: 0 whenever |centroid_0 - h| >= |centroid_1 - h|."""
    value = (
        embedding.value
        if isinstance(embedding, GraphEmbedding)
        else float(embedding)
    )
    if not np.isfinite(value):
        raise UsageError(f"embedding must be finite, got {value}")
    if abs(params.centroid_0 - value) >= abs(params.centroid_1 - value):
        return 0
    return 1


class _GraphBatch:
    """Flat arrays over a graph list for the vectorized forward engine."""

    def __init__(self, graphs, mapping: MappingParams):
        if not graphs:
            raise UsageError("graph list is empty")
        dim = mapping.dimension
        features, owners, degrees = [], [], []
        neighbor_global = []
        offset = 0
        for gid, graph in enumerate(graphs):
            if graph.feature_dim != dim:
                raise UsageError(
                    f"graph {gid} has feature dimension {graph.feature_dim}, "
                    f"encoder expects {dim}"
                )
            adjacency = graph.adjacency()
            features.append(graph.node_features)
            owners.extend([gid] * graph.node_count)
            for v in range(graph.node_count):
                degrees.append(len(adjacency[v]))
                neighbor_global.extend(offset + u for u in adjacency[v])
            offset += graph.node_count
        self.graph_count = len(graphs)
        self.node_count = offset
        self.features = np.vstack(features)
        self.owners = np.asarray(owners, dtype=np.intp)
        self.degrees = np.asarray(degrees, dtype=np.intp)
        self.neighbors = np.asarray(neighbor_global, dtype=np.intp)
        self.centers = np.repeat(np.arange(offset, dtype=np.intp),
                                 self.degrees)
        self.labels = np.asarray([g.label for g in graphs], dtype=np.intp)
        self.initial = encode_rows(self.features, mapping.thetas)


def _rotation_block_matrix(angles) -> np.ndarray:
    theta_x, theta_y, theta_z = angles
    return (
        rotation_matrix("x", theta_x)
        @ rotation_matrix("y", theta_y)
        @ rotation_matrix("z", theta_z)
    )


def _row_entropies(amplitudes: np.ndarray) -> np.ndarray:
    probs = np.abs(amplitudes) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = probs * np.log2(probs)
    terms[probs <= 0.0] = 0.0
    return np.maximum(-terms.sum(axis=1), 0.0)


def _batch_embeddings(batch: _GraphBatch, layers) -> np.ndarray:
    """Graph embeddings for every graph in the batch.

    Exploits entropy additivity over tensor factors and entropy invariance
    under the basis-permuting CNOT layer, so neither capacity nor the
    entanglement mode can change these values.
    """
    amplitudes = batch.initial
    entropies = None
    for index, layer in enumerate(layers):
        center_amps = amplitudes @ _rotation_block_matrix(
            layer.center_angles
        ).T
        neighbor_amps = amplitudes @ _rotation_block_matrix(
            layer.neighbor_angles
        ).T
        center_entropy = _row_entropies(center_amps)
        neighbor_entropy = _row_entropies(neighbor_amps)
        entropies = center_entropy + np.bincount(
            batch.centers,
            weights=neighbor_entropy[batch.neighbors],
            minlength=batch.node_count,
        )
        if index + 1 < len(layers):
            half = 0.5 * np.pi * entropies / (1 + batch.degrees)
            amplitudes = np.stack(
                [np.cos(half), np.sin(half)], axis=1
            ).astype(np.complex128)
    return np.bincount(
        batch.owners, weights=entropies, minlength=batch.graph_count
    )


def embed_graphs(graphs, params: ModelParams, capacity: int = DEFAULT_CAPACITY,
                 entangle="full") -> np.ndarray:
    """Embeddings for a graph list via the batch engine."""
    _entangle_mode(entangle)
    if capacity < 1:
        raise UsageError(f"capacity must be >= 1, got {capacity}")
    if params.mapping is None:
        raise UsageError("model has no feature encoder")
    batch = _GraphBatch(graphs, params.mapping)
    return _batch_embeddings(batch, params.layers)


def _hinge_terms(embeddings: np.ndarray, labels: np.ndarray,
                 centroid_0: float, centroid_1: float) -> np.ndarray:
    dist_0 = np.abs(embeddings - centroid_0)
    dist_1 = np.abs(embeddings - centroid_1)
    own = np.where(labels == 0, dist_0, dist_1)
    other = np.where(labels == 0, dist_1, dist_0)
    # The label rule assigns class y when the embedding is closer to the
    # OTHER class's reference entropy (its ">=" comparison), so the margin
    # pushes each embedding toward the opposite centroid.
    return np.maximum(0.0, other - own + HINGE_MARGIN)


def training_loss(graphs, params: ModelParams,
                  capacity: int = DEFAULT_CAPACITY, entangle="full") -> float:
    """Mean hinge loss aligned with the classify rule."""
    if not graphs:
        raise UsageError("graph list is empty")
    embeddings = embed_graphs(graphs, params, capacity, entangle)
    labels = np.asarray([g.label for g in graphs], dtype=np.intp)
    terms = _hinge_terms(
        embeddings, labels, params.centroid_0, params.centroid_1
    )
    return float(terms.mean())


def predict_labels(graphs, params: ModelParams,
                   capacity: int = DEFAULT_CAPACITY,
                   entangle="full") -> np.ndarray:
    embeddings = embed_graphs(graphs, params, capacity, entangle)
    dist_0 = np.abs(params.centroid_0 - embeddings)
    dist_1 = np.abs(params.centroid_1 - embeddings)
    return np.where(dist_0 >= dist_1, 0, 1)


def accuracy(graphs, params: ModelParams, capacity: int = DEFAULT_CAPACITY,
             entangle="full") -> float:
    labels = np.asarray([g.label for g in graphs], dtype=np.intp)
    predictions = predict_labels(graphs, params, capacity, entangle)
    return float(np.mean(predictions == labels))


def count_parameters(params: ModelParams) -> int:
    """Free scalars: 6 per layer, 2 centroids, one per feature dimension."""
    return 6 * params.layer_count + 2 + params.feature_dim


@dataclass(frozen=True)
class ModelTrainResult:
    """Training outcome; warning marks an optimizer abort (best-so-far
    parameters are still returned)."""

    params: ModelParams
    initial_loss: float
    best_loss: float
    evaluations_used: int
    converged: bool
    warning: bool
    method: str


def _angles_to_layers(angles: np.ndarray) -> tuple:
    layers = []
    for k in range(angles.shape[0] // 6):
        chunk = angles[6 * k : 6 * k + 6]
        layers.append(
            UlayerParams(
                center_angles=tuple(chunk[:3]),
                neighbor_angles=tuple(chunk[3:]),
            )
        )
    return tuple(layers)


def _initial_centroids(embeddings: np.ndarray,
                       labels: np.ndarray) -> tuple:
    overall = float(embeddings.mean())
    # Class-y graphs end up assigned label y when they sit nearer the
    # opposite reference entropy, so seed centroid_0 from class 1 and
    # centroid_1 from class 0.
    of_class_1 = embeddings[labels == 1]
    of_class_0 = embeddings[labels == 0]
    centroid_0 = float(of_class_1.mean()) if of_class_1.size else overall
    centroid_1 = float(of_class_0.mean()) if of_class_0.size else overall
    return centroid_0, centroid_1


def train_model(train, mapping: MappingParams, seed: int, budget: int,
                layers: int = DEFAULT_LAYERS, capacity: int = DEFAULT_CAPACITY,
                entangle="full", tolerance: float = 1e-4,
                trace_path=None) -> ModelTrainResult:
    """Fit all layer angles plus both reference entropies.

    Angles start uniform in [0, pi] from the seed; centroids start at the
    per-class means of the initial embeddings. The evaluator wraps angle
    coordinates modulo 2 pi (the loss is periodic in them), leaving the
    centroid coordinates unbounded.
    """
    _entangle_mode(entangle)
    if not train:
        raise UsageError("training set is empty")
    if layers < 1:
        raise UsageError(f"layers must be >= 1, got {layers}")
    if budget < 0:
        raise UsageError(f"budget must be >= 0, got {budget}")

    batch = _GraphBatch(train, mapping)
    rng = np.random.default_rng(seed)
    init_angles = rng.uniform(0.0, np.pi, size=6 * layers)
    init_embeddings = _batch_embeddings(batch, _angles_to_layers(init_angles))
    centroid_0, centroid_1 = _initial_centroids(init_embeddings, batch.labels)
    initial = np.concatenate([init_angles, [centroid_0, centroid_1]])
    angle_count = 6 * layers

    def objective(point: np.ndarray) -> float:
        angles = np.mod(point[:angle_count], 2.0 * np.pi)
        embeddings = _batch_embeddings(batch, _angles_to_layers(angles))
        terms = _hinge_terms(
            embeddings, batch.labels, point[angle_count], point[angle_count + 1]
        )
        return float(terms.mean())

    def restart_point(restart_rng: np.random.Generator) -> np.ndarray:
        # Fresh angles escape flat hinge plateaus; the centroid seeds stay
        # at their data-driven values.
        angles = restart_rng.uniform(0.0, np.pi, size=angle_count)
        return np.concatenate([angles, [centroid_0, centroid_1]])

    spec = optim.ObjectiveSpec(
        dimension=angle_count + 2,
        evaluator=objective,
        budget=budget,
        tolerance=tolerance,
        seed=seed,
        restart_sampler=restart_point,
    )
    warning = False
    try:
        result = optim.minimize(spec, initial, trace_path=trace_path)
        best = result.best_point
        best_loss = result.best_value
        evaluations = result.evaluations_used
        converged = result.converged
        method = result.method
    except TrainingError as exc:
        warning = True
        best = exc.best_params if exc.best_params is not None else initial
        best_loss = objective(best)
        evaluations = exc.evaluations_used
        converged = False
        method = "aborted"

    params = ModelParams(
        layers=_angles_to_layers(np.mod(best[:angle_count], 2.0 * np.pi)),
        centroid_0=best[angle_count],
        centroid_1=best[angle_count + 1],
        mapping=mapping,
    )
    return ModelTrainResult(
        params=params,
        initial_loss=objective(initial),
        best_loss=float(best_loss),
        evaluations_used=evaluations,
        converged=converged,
        warning=warning,
        method=method,
    )


class DQGNNClassifier(ClassifierMixin, BaseEstimator):
    """Estimator wrapper over the full pipeline.

    X is a list of Graph objects. fit trains the feature encoder on the
    training set's node features, then the layer angles and reference
    entropies; predict applies the nearest-reference label rule.
    """

    def __init__(self, layers: int = DEFAULT_LAYERS,
                 capacity: int = DEFAULT_CAPACITY, entanglement: str = "full",
                 seed: int = 0, mapping_budget: int = 500,
                 model_budget: int = 2000):
        self.layers = layers
        self.capacity = capacity
        self.entanglement = entanglement
        self.seed = seed
        self.mapping_budget = mapping_budget
        self.model_budget = model_budget

    def _validated_graphs(self, X, y=None) -> list:
        graphs = list(X)
        if not graphs:
            raise UsageError("X must hold at least one graph")
        if not all(isinstance(g, Graph) for g in graphs):
            raise UsageError("X must be a sequence of Graph objects")
        if y is not None:
            labels = np.asarray(y, dtype=int)
            if labels.shape != (len(graphs),):
                raise UsageError(
                    f"y must have one label per graph, got shape "
                    f"{labels.shape} for {len(graphs)} graphs"
                )
            graphs = [
                dataclasses.replace(g, label=int(lab))
                for g, lab in zip(graphs, labels)
            ]
        return graphs

    def fit(self, X, y=None):
        graphs = self._validated_graphs(X, y)
        features = np.vstack([g.node_features for g in graphs])
        self.mapping_params_ = train_mapping(
            features, seed=self.seed, budget=self.mapping_budget
        )
        self.train_result_ = train_model(
            graphs,
            self.mapping_params_,
            seed=self.seed,
            budget=self.model_budget,
            layers=self.layers,
            capacity=self.capacity,
            entangle=self.entanglement,
        )
        self.model_params_ = self.train_result_.params
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = self.mapping_params_.dimension
        return self

    def decision_function(self, X) -> np.ndarray:
        check_is_fitted(self, "model_params_")
        graphs = self._validated_graphs(X)
        embeddings = embed_graphs(
            graphs, self.model_params_, self.capacity, self.entanglement
        )
        return np.abs(self.model_params_.centroid_0 - embeddings) - np.abs(
            self.model_params_.centroid_1 - embeddings
        )

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "model_params_")
        graphs = self._validated_graphs(X)
        return predict_labels(
            graphs, self.model_params_, self.capacity, self.entanglement
        )
