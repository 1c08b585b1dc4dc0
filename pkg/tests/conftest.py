import os
from pathlib import Path

import numpy as np
import pytest

from dqgnn.graphdata import Graph


def write_tudataset(root: Path, name: str, graphs) -> Path:
    """Write graphs to the four-file TUDataset text layout under root.

    Each graph is a dict with keys ``edges`` (0-based local pairs),
    ``node_labels`` (one int per node) and ``label`` (raw graph label).
    Edges are emitted in both directions, as real dumps do.
    """
    root.mkdir(parents=True, exist_ok=True)
    adjacency, indicator, graph_labels, node_labels = [], [], [], []
    offset = 0
    for gid, graph in enumerate(graphs, start=1):
        count = len(graph["node_labels"])
        indicator.extend([str(gid)] * count)
        graph_labels.append(str(graph["label"]))
        node_labels.extend(str(lab) for lab in graph["node_labels"])
        for a, b in graph["edges"]:
            adjacency.append(f"{offset + a + 1}, {offset + b + 1}")
            adjacency.append(f"{offset + b + 1}, {offset + a + 1}")
        offset += count
    (root / f"{name}_A.txt").write_text("\n".join(adjacency) + "\n")
    (root / f"{name}_graph_indicator.txt").write_text(
        "\n".join(indicator) + "\n"
    )
    (root / f"{name}_graph_labels.txt").write_text(
        "\n".join(graph_labels) + "\n"
    )
    (root / f"{name}_node_labels.txt").write_text(
        "\n".join(node_labels) + "\n"
    )
    return root


def graph_to_spec(graph):
    """Writer dict for a Graph whose features one-hot encode node labels."""
    return {
        "edges": list(graph.edges),
        "node_labels": [int(np.argmax(row)) for row in graph.node_features],
        "label": graph.label,
    }


def write_graphs(root: Path, name: str, graphs) -> Path:
    return write_tudataset(root, name, [graph_to_spec(g) for g in graphs])


@pytest.fixture
def tudataset_writer():
    return write_tudataset


def make_graph(edges, node_labels, label, dim=None):
    """Build a Graph with one-hot features from integer node labels."""
    dim = dim if dim is not None else max(node_labels) + 1
    features = np.zeros((len(node_labels), dim))
    for idx, lab in enumerate(node_labels):
        features[idx, lab] = 1.0
    return Graph(
        node_count=len(node_labels),
        edges=tuple(edges),
        node_features=features,
        label=label,
    )


@pytest.fixture
def graph_factory():
    return make_graph


def synthetic_dataset(count=24, seed=0, dim=3):
    """Small binary-labeled graph set where structure tracks the label.

    Class 0 graphs are short paths, class 1 graphs are larger near-cliques;
    the total qubit count per graph (sum of 1 + degree) never overlaps
    between classes, so scalar entropy embeddings can separate them.
    """
    rng = np.random.default_rng(seed)
    graphs = []
    for k in range(count):
        label = k % 2
        if label == 0:
            size = int(rng.integers(4, 6))
            edges = [(i, i + 1) for i in range(size - 1)]
        else:
            size = int(rng.integers(5, 7))
            edges = [
                (i, j) for i in range(size) for j in range(i + 1, size)
            ]
            drop = int(rng.integers(0, 2))
            edges = edges[: len(edges) - drop]
        labels = [int(v) for v in rng.integers(0, dim, size=size)]
        graphs.append(make_graph(edges, labels, label, dim=dim))
    return graphs


@pytest.fixture
def small_graph_set():
    return synthetic_dataset()


def mutag_dir():
    """Directory holding MUTAG files if available, else None."""
    candidates = []
    env = os.environ.get("DQGNN_DATASET_DIR")
    if env:
        candidates.append(Path(env))
    candidates.append(Path(__file__).resolve().parent.parent / "data")
    for root in candidates:
        for probe in (root, root / "MUTAG"):
            if (probe / "MUTAG_A.txt").is_file():
                return root
    return None
