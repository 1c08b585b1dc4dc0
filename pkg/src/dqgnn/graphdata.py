"""Graph data model, TUDataset ingestion and subgraph decomposition.

Datasets arrive as the four-file TUDataset text layout. Node labels are
one-hot encoded over the dataset-wide label alphabet, the two raw graph
labels are remapped so the smaller becomes class 0, and per-node subgraphs
carry a center feature plus the features of its neighbors in ascending
node order.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, ParseError, UsageError


@dataclass(frozen=True)
class Graph:
    """Undirected graph with per-node feature vectors and a binary label.

    Edges are stored as sorted (low, high) pairs in lexicographic order.
    """

    node_count: int
    edges: tuple
    node_features: np.ndarray
    label: int

    def __post_init__(self):
        if self.node_count < 1:
            raise UsageError(f"node_count must be >= 1, got {self.node_count}")
        if self.label not in (0, 1):
            raise UsageError(f"label must be 0 or 1, got {self.label}")
        features = np.asarray(self.node_features, dtype=float)
        if features.ndim != 2 or features.shape[0] != self.node_count:
            raise UsageError(
                f"node_features must have shape ({self.node_count}, d), "
                f"got {features.shape}"
            )
        seen = set()
        normalized = []
        for a, b in self.edges:
            if a == b:
                raise UsageError(f"self-loop on node {a}")
            if not (0 <= a < self.node_count and 0 <= b < self.node_count):
                raise UsageError(
                    f"edge ({a}, {b}) out of range for {self.node_count} nodes"
                )
            pair = (min(a, b), max(a, b))
            if pair in seen:
                raise UsageError(f"duplicate edge {pair}")
            seen.add(pair)
            normalized.append(pair)
        features = features.copy()
        features.flags.writeable = False
        object.__setattr__(self, "node_features", features)
        object.__setattr__(self, "edges", tuple(sorted(normalized)))

    @property
    def feature_dim(self) -> int:
        return self.node_features.shape[1]

    def adjacency(self) -> list:
        """Neighbor lists in ascending node order."""
        neighbors = [[] for _ in range(self.node_count)]
        for a, b in self.edges:
            neighbors[a].append(b)
            neighbors[b].append(a)
        return [sorted(lst) for lst in neighbors]


@dataclass(frozen=True)
class Subgraph:
    """A center node together with its neighborhood's features."""

    center: int
    neighbors: tuple
    center_feature: np.ndarray
    neighbor_features: np.ndarray

    def __post_init__(self):
        neighbors = tuple(int(v) for v in self.neighbors)
        if list(neighbors) != sorted(set(neighbors)):
            raise UsageError("neighbors must be ascending and distinct")
        if self.center in neighbors:
            raise UsageError(f"center {self.center} listed as its own neighbor")
        center_feature = np.asarray(self.center_feature, dtype=float)
        neighbor_features = np.asarray(self.neighbor_features, dtype=float)
        if neighbor_features.size == 0:
            neighbor_features = neighbor_features.reshape(
                0, center_feature.shape[0]
            )
        if neighbor_features.shape != (len(neighbors), center_feature.shape[0]):
            raise UsageError(
                "neighbor_features must be one row per neighbor with the "
                "center's feature dimension"
            )
        center_feature = center_feature.copy()
        neighbor_features = neighbor_features.copy()
        center_feature.flags.writeable = False
        neighbor_features.flags.writeable = False
        object.__setattr__(self, "neighbors", neighbors)
        object.__setattr__(self, "center_feature", center_feature)
        object.__setattr__(self, "neighbor_features", neighbor_features)

    @property
    def degree(self) -> int:
        return len(self.neighbors)


@dataclass(frozen=True)
class NeighborChunks:
    """Disjoint consecutive slices of a neighbor list, each within capacity."""

    chunks: tuple
    chunk_capacity: int

    def __post_init__(self):
        if self.chunk_capacity < 1:
            raise UsageError(
                f"chunk_capacity must be >= 1, got {self.chunk_capacity}"
            )
        chunks = tuple(tuple(int(v) for v in chunk) for chunk in self.chunks)
        flat = [v for chunk in chunks for v in chunk]
        if any(len(chunk) == 0 for chunk in chunks):
            raise UsageError("empty chunk")
        if any(len(chunk) > self.chunk_capacity for chunk in chunks):
            raise UsageError("chunk exceeds capacity")
        if len(set(flat)) != len(flat):
            raise UsageError("chunks are not disjoint")
        object.__setattr__(self, "chunks", chunks)


def _read_lines(path: Path) -> list:
    if not path.is_file():
        raise DataError(f"missing dataset file: {path}")
    with open(path) as handle:
        return handle.read().splitlines()


def _parse_int(token: str, path: Path, lineno: int, what: str) -> int:
    try:
        return int(token.strip())
    except ValueError:
        raise ParseError(
            path, lineno, f"expected integer {what}, got {token.strip()!r}"
        ) from None


def parse_tudataset(dataset_dir, dataset_name: str) -> list:
    """Load a TUDataset-format directory into a list of Graph objects.

    Accepts either `<dir>/<NAME>_A.txt` or the common unpacked layout
    `<dir>/<NAME>/<NAME>_A.txt`. Indices in the files are 1-based; edges may
    appear in both directions and are deduplicated to undirected pairs.
    """
    root = Path(dataset_dir)
    if not (root / f"{dataset_name}_A.txt").is_file() and (
        root / dataset_name / f"{dataset_name}_A.txt"
    ).is_file():
        root = root / dataset_name

    adjacency_path = root / f"{dataset_name}_A.txt"
    indicator_path = root / f"{dataset_name}_graph_indicator.txt"
    graph_labels_path = root / f"{dataset_name}_graph_labels.txt"
    node_labels_path = root / f"{dataset_name}_node_labels.txt"

    indicator_lines = _read_lines(indicator_path)
    node_graph = []
    for lineno, line in enumerate(indicator_lines, start=1):
        if not line.strip():
            continue
        node_graph.append(
            _parse_int(line, indicator_path, lineno, "graph id") - 1
        )
    node_total = len(node_graph)
    if node_total == 0:
        raise ParseError(indicator_path, 1, "no nodes listed")

    label_lines = _read_lines(graph_labels_path)
    raw_graph_labels = []
    distinct = []
    for lineno, line in enumerate(label_lines, start=1):
        if not line.strip():
            continue
        raw = _parse_int(line, graph_labels_path, lineno, "graph label")
        if raw not in distinct:
            distinct.append(raw)
            if len(distinct) > 2:
                raise ParseError(
                    graph_labels_path,
                    lineno,
                    f"more than two distinct graph labels: "
                    f"{sorted(distinct)}",
                )
        raw_graph_labels.append(raw)
    graph_count = len(raw_graph_labels)
    label_map = {raw: idx for idx, raw in enumerate(sorted(set(distinct)))}

    for node, gid in enumerate(node_graph, start=1):
        if not 0 <= gid < graph_count:
            raise ParseError(
                indicator_path,
                node,
                f"graph id {gid + 1} has no label line "
                f"(labels cover 1..{graph_count})",
            )

    node_label_lines = _read_lines(node_labels_path)
    raw_node_labels = []
    for lineno, line in enumerate(node_label_lines, start=1):
        if not line.strip():
            continue
        raw_node_labels.append(
            _parse_int(line, node_labels_path, lineno, "node label")
        )
    if len(raw_node_labels) != node_total:
        raise ParseError(
            node_labels_path,
            len(raw_node_labels) + 1,
            f"{len(raw_node_labels)} node labels for {node_total} nodes",
        )
    alphabet = sorted(set(raw_node_labels))
    dim = len(alphabet)
    label_index = {lab: idx for idx, lab in enumerate(alphabet)}

    edge_lines = _read_lines(adjacency_path)
    edge_sets = [set() for _ in range(graph_count)]
    for lineno, line in enumerate(edge_lines, start=1):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(
                adjacency_path, lineno,
                f"expected 'i, j', got {line.strip()!r}"
            )
        a = _parse_int(parts[0], adjacency_path, lineno, "node index")
        b = _parse_int(parts[1], adjacency_path, lineno, "node index")
        if not (1 <= a <= node_total and 1 <= b <= node_total):
            raise ParseError(
                adjacency_path,
                lineno,
                f"edge ({a}, {b}) references a node outside 1..{node_total}",
            )
        if a == b:
            raise ParseError(adjacency_path, lineno, f"self-loop on node {a}")
        if node_graph[a - 1] != node_graph[b - 1]:
            raise ParseError(
                adjacency_path,
                lineno,
                f"edge ({a}, {b}) connects nodes of different graphs",
            )
        edge_sets[node_graph[a - 1]].add((min(a, b) - 1, max(a, b) - 1))

    # Renumber nodes within each graph, preserving global ascending order.
    members = [[] for _ in range(graph_count)]
    for node, gid in enumerate(node_graph):
        members[gid].append(node)

    graphs = []
    for gid in range(graph_count):
        local = {node: k for k, node in enumerate(members[gid])}
        count = len(members[gid])
        if count == 0:
            raise ParseError(
                indicator_path, 1, f"graph {gid + 1} has no nodes"
            )
        features = np.zeros((count, dim))
        for node in members[gid]:
            features[local[node], label_index[raw_node_labels[node]]] = 1.0
        edges = tuple(
            (local[a], local[b]) for a, b in sorted(edge_sets[gid])
        )
        graphs.append(
            Graph(
                node_count=count,
                edges=edges,
                node_features=features,
                label=label_map[raw_graph_labels[gid]],
            )
        )
    return graphs


def decompose_graph(graph: Graph) -> list:
    """Split a graph into one Subgraph per node (center plus neighbors)."""
    adjacency = graph.adjacency()
    subgraphs = []
    for center in range(graph.node_count):
        neighbors = adjacency[center]
        subgraphs.append(
            Subgraph(
                center=center,
                neighbors=tuple(neighbors),
                center_feature=graph.node_features[center],
                neighbor_features=graph.node_features[neighbors],
            )
        )
    return subgraphs


def partition_neighbors(subgraph: Subgraph, capacity: int) -> NeighborChunks:
    """Split the neighbor list into consecutive chunks of at most capacity."""
    if capacity < 1:
        raise UsageError(f"capacity must be >= 1, got {capacity}")
    neighbors = subgraph.neighbors
    chunks = tuple(
        neighbors[start : start + capacity]
        for start in range(0, len(neighbors), capacity)
    )
    return NeighborChunks(chunks=chunks, chunk_capacity=capacity)
