"""Plain-text model checkpoints.

One key-value record per line; the header line documents the field order.
Floats are written with full round-trip precision so a reload reproduces
the model bitwise.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import DataError, ParseError
from .mapping import MappingParams
from .model import ModelParams, UlayerParams

HEADER = (
    "# dqgnn-checkpoint-v1: layers, capacity, entanglement, seed, "
    "centroid_0, centroid_1, layer <k> <cx cy cz nx ny nz>, "
    "mapping <d> <theta...>"
)


def _fmt(value: float) -> str:
    return repr(float(value))


def save_checkpoint(path, params: ModelParams, capacity: int,
                    entanglement: str, seed: int) -> None:
    if params.mapping is None:
        raise DataError("cannot checkpoint a model without a feature encoder")
    lines = [
        HEADER,
        f"layers {params.layer_count}",
        f"capacity {capacity}",
        f"entanglement {entanglement}",
        f"seed {seed}",
        f"centroid_0 {_fmt(params.centroid_0)}",
        f"centroid_1 {_fmt(params.centroid_1)}",
    ]
    for k, layer in enumerate(params.layers):
        angles = (*layer.center_angles, *layer.neighbor_angles)
        lines.append(f"layer {k} " + " ".join(_fmt(a) for a in angles))
    thetas = " ".join(_fmt(t) for t in params.mapping.thetas)
    lines.append(f"mapping {params.mapping.dimension} {thetas}")
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_float(token: str, path, lineno: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(
            path, lineno, f"expected a float, got {token!r}"
        ) from None


def _parse_int(token: str, path, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(
            path, lineno, f"expected an integer, got {token!r}"
        ) from None


def load_checkpoint(path):
    """Read a checkpoint; returns (ModelParams, config dict)."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"missing checkpoint file: {path}")
    lines = path.read_text().splitlines()

    scalars: dict = {}
    layer_rows: dict = {}
    mapping_params = None
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        key = parts[0]
        if key in ("layers", "capacity", "seed"):
            if len(parts) != 2:
                raise ParseError(path, lineno, f"malformed {key} line")
            scalars[key] = _parse_int(parts[1], path, lineno)
        elif key == "entanglement":
            if len(parts) != 2 or parts[1] not in ("full", "ring", "off"):
                raise ParseError(
                    path, lineno,
                    "entanglement must be one of full, ring, off",
                )
            scalars[key] = parts[1]
        elif key in ("centroid_0", "centroid_1"):
            if len(parts) != 2:
                raise ParseError(path, lineno, f"malformed {key} line")
            scalars[key] = _parse_float(parts[1], path, lineno)
        elif key == "layer":
            if len(parts) != 8:
                raise ParseError(
                    path, lineno, "layer lines need an index and 6 angles"
                )
            index = _parse_int(parts[1], path, lineno)
            angles = [_parse_float(p, path, lineno) for p in parts[2:]]
            layer_rows[index] = UlayerParams(
                center_angles=tuple(angles[:3]),
                neighbor_angles=tuple(angles[3:]),
            )
        elif key == "mapping":
            if len(parts) < 3:
                raise ParseError(
                    path, lineno, "mapping line needs a dimension and values"
                )
            dim = _parse_int(parts[1], path, lineno)
            values = [_parse_float(p, path, lineno) for p in parts[2:]]
            if len(values) != dim:
                raise ParseError(
                    path, lineno,
                    f"mapping declares {dim} values but lists {len(values)}",
                )
            mapping_params = MappingParams(np.array(values))
        else:
            raise ParseError(path, lineno, f"unknown field {key!r}")

    required = ("layers", "capacity", "entanglement", "seed", "centroid_0",
                "centroid_1")
    missing = [key for key in required if key not in scalars]
    if missing:
        raise DataError(f"{path}: missing fields {missing}")
    if mapping_params is None:
        raise DataError(f"{path}: missing mapping line")
    count = scalars["layers"]
    if sorted(layer_rows) != list(range(count)):
        raise DataError(
            f"{path}: expected layer lines 0..{count - 1}, "
            f"got {sorted(layer_rows)}"
        )

    params = ModelParams(
        layers=tuple(layer_rows[k] for k in range(count)),
        centroid_0=scalars["centroid_0"],
        centroid_1=scalars["centroid_1"],
        mapping=mapping_params,
    )
    config = {
        "capacity": scalars["capacity"],
        "entanglement": scalars["entanglement"],
        "seed": scalars["seed"],
    }
    return params, config
