"""Trainable single-qubit feature encoder.

A d-dimensional feature vector is written onto one qubit by d rotations:
gate i rotates about the axis x, y, z (cycling by i mod 3) through angle
thetas[i] * x[i]. The angles are trained so that pairwise state distances
mirror pairwise Euclidean feature distances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import optim
from .errors import TrainingError, UsageError
from .qsim import QuantumState, inner_product

_EPS = 1e-12

# Overlaps this close to 1 are float noise on identical states; arccos would
# amplify them to ~1e-7 distances, so they are snapped to exactly zero.
_UNIT_OVERLAP_SNAP = 1e-14

AXIS_CYCLE = ("x", "y", "z")


@dataclass(frozen=True)
class MappingParams:
    """Per-feature rotation scales (radians per unit feature value)."""

    thetas: np.ndarray

    def __post_init__(self):
        thetas = np.asarray(self.thetas, dtype=float)
        if thetas.ndim != 1 or thetas.shape[0] < 1:
            raise UsageError(
                f"thetas must be a non-empty vector, got shape {thetas.shape}"
            )
        if not np.all(np.isfinite(thetas)):
            raise UsageError("thetas must be finite")
        thetas = thetas.copy()
        thetas.flags.writeable = False
        object.__setattr__(self, "thetas", thetas)

    @property
    def dimension(self) -> int:
        return self.thetas.shape[0]


@dataclass(frozen=True)
class DistanceMatrices:
    """Feature-space and state-space distances, each scaled by its own max."""

    euclidean: np.ndarray
    hilbert: np.ndarray

    def __post_init__(self):
        for name in ("euclidean", "hilbert"):
            matrix = np.asarray(getattr(self, name), dtype=float)
            if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
                raise UsageError(f"{name} matrix must be square")
            if not np.allclose(matrix, matrix.T, atol=1e-9):
                raise UsageError(f"{name} matrix must be symmetric")
            if np.any(np.abs(np.diag(matrix)) > 1e-12):
                raise UsageError(f"{name} matrix must have a zero diagonal")
            matrix = matrix.copy()
            matrix.flags.writeable = False
            object.__setattr__(self, name, matrix)


def encode_rows(features: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """Encode each row of ``features`` to single-qubit amplitudes (n, 2)."""
    features = np.atleast_2d(np.asarray(features, dtype=float))
    if features.shape[1] != thetas.shape[0]:
        raise UsageError(
            f"feature dimension {features.shape[1]} does not match "
            f"{thetas.shape[0]} mapping parameters"
        )
    n = features.shape[0]
    amp0 = np.ones(n, dtype=np.complex128)
    amp1 = np.zeros(n, dtype=np.complex128)
    for i in range(thetas.shape[0]):
        half = 0.5 * thetas[i] * features[:, i]
        c, s = np.cos(half), np.sin(half)
        axis = AXIS_CYCLE[i % 3]
        if axis == "x":
            amp0, amp1 = c * amp0 - 1j * s * amp1, -1j * s * amp0 + c * amp1
        elif axis == "y":
            amp0, amp1 = c * amp0 - s * amp1, s * amp0 + c * amp1
        else:
            phase = np.exp(-1j * half)
            amp0, amp1 = phase * amp0, np.conj(phase) * amp1
    return np.stack([amp0, amp1], axis=1)


def encode_feature(x, params: MappingParams) -> QuantumState:
    """Encode one feature vector as a single-qubit state."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != params.dimension:
        raise UsageError(
            f"expected a feature vector of dimension {params.dimension}, "
            f"got shape {x.shape}"
        )
    amplitudes = encode_rows(x[None, :], params.thetas)[0]
    return QuantumState(amplitudes, 1)


def hilbert_distance(a: QuantumState, b: QuantumState) -> float:
    """arccos of the overlap magnitude; phase-invariant, in [0, pi/2]."""
    overlap = abs(inner_product(a, b))
    if overlap >= 1.0 - _UNIT_OVERLAP_SNAP:
        return 0.0
    return float(np.arccos(np.clip(overlap, 0.0, 1.0)))


def _normalized_euclidean(features: np.ndarray) -> np.ndarray:
    diff = features[:, None, :] - features[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    return dist / max(float(dist.max()), _EPS)


def _normalized_hilbert(features: np.ndarray,
                        thetas: np.ndarray) -> np.ndarray:
    states = encode_rows(features, thetas)
    overlap = np.abs(states @ states.conj().T)
    dist = np.arccos(np.clip(overlap, 0.0, 1.0))
    dist[overlap >= 1.0 - _UNIT_OVERLAP_SNAP] = 0.0
    return dist / max(float(dist.max()), _EPS)


def distance_matrices(features, params: MappingParams) -> DistanceMatrices:
    """Both normalized pairwise distance matrices for a feature set."""
    features = _check_feature_block(features, params.dimension)
    return DistanceMatrices(
        euclidean=_normalized_euclidean(features),
        hilbert=_normalized_hilbert(features, params.thetas),
    )


def _check_feature_block(features, dimension=None) -> np.ndarray:
    features = np.asarray(features, dtype=float)
    if features.ndim != 2:
        raise UsageError(
            f"features must be a 2-D array, got shape {features.shape}"
        )
    if features.shape[0] < 2:
        raise UsageError(
            f"need at least 2 feature vectors, got {features.shape[0]}"
        )
    if dimension is not None and features.shape[1] != dimension:
        raise UsageError(
            f"feature dimension {features.shape[1]} does not match "
            f"{dimension} mapping parameters"
        )
    return features


def mapping_loss(features, params: MappingParams) -> float:
    """Entrywise L1 gap between the two normalized distance matrices."""
    features = _check_feature_block(features, params.dimension)
    euclidean = _normalized_euclidean(features)
    hilbert = _normalized_hilbert(features, params.thetas)
    return float(np.sum(np.abs(euclidean - hilbert)))


def train_mapping(features, seed: int, budget: int) -> MappingParams:
    """Fit the encoder's rotation scales with the derivative-free minimizer.

    Duplicate feature vectors are collapsed first; with fewer than two
    distinct vectors there is nothing to preserve and the seeded random
    initialization is returned unchanged.
    """
    features = np.asarray(features, dtype=float)
    if features.ndim != 2 or features.shape[0] < 1:
        raise UsageError(
            f"features must be a non-empty 2-D array, got shape "
            f"{features.shape}"
        )
    dimension = features.shape[1]
    rng = np.random.default_rng(seed)
    initial = rng.uniform(0.0, np.pi, size=dimension)

    distinct = np.unique(features, axis=0)
    if distinct.shape[0] < 2:
        return MappingParams(initial)

    euclidean = _normalized_euclidean(distinct)

    def objective(thetas: np.ndarray) -> float:
        hilbert = _normalized_hilbert(distinct, thetas)
        return float(np.sum(np.abs(euclidean - hilbert)))

    spec = optim.ObjectiveSpec(
        dimension=dimension,
        evaluator=objective,
        budget=budget,
        seed=seed,
        # The loss has many basins (angle wrapping), so leftover budget
        # goes into fresh starts rather than being returned unused.
        restart_sampler=lambda rng: rng.uniform(0.0, np.pi, size=dimension),
    )
    try:
        result = optim.minimize(spec, initial)
    except TrainingError as exc:
        if exc.best_params is None:
            raise
        raise TrainingError(
            str(exc), best_params=MappingParams(exc.best_params)
        ) from None
    return MappingParams(result.best_point)


class QuantumFeatureEncoder(TransformerMixin, BaseEstimator):
    """Transformer that maps feature rows to single-qubit amplitudes.

    fit trains the rotation scales on the distinct rows of X; transform
    returns one (amplitude_0, amplitude_1) complex pair per input row.
    """

    def __init__(self, budget: int = 500, seed: int = 0):
        self.budget = budget
        self.seed = seed

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        self.n_features_in_ = X.shape[1]
        self.mapping_params_ = train_mapping(
            X, seed=self.seed, budget=self.budget
        )
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "mapping_params_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise UsageError(
                f"X has {X.shape[1]} features, encoder was fit with "
                f"{self.n_features_in_}"
            )
        return encode_rows(X, self.mapping_params_.thetas)
