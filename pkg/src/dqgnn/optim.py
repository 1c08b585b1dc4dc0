"""Derivative-free minimization.

The main path is a trust-region method built on a fully quadratic
interpolation model over (n+1)(n+2)/2 points. When the evaluation budget
cannot support that set, the minimizer degrades to a coordinate pattern
search with a finite-difference linear model. Both paths are deterministic
for a fixed seed and never report a value worse than one already seen.

A spec may supply a restart sampler; the search then begins again from a
sampled point whenever it converges with enough budget left for another
full interpolation set, keeping the best point across rounds.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import TrainingError, UsageError

RHO_BEG = 0.5
DEFAULT_TOLERANCE = 1e-4

_PRED_TINY = 1e-14


@dataclass(frozen=True)
class ObjectiveSpec:
    """Problem description handed to minimize.

    The evaluator must be deterministic and safe to call from multiple
    threads; the minimizer itself calls it sequentially. restart_sampler,
    when set, maps the minimizer's generator to a fresh starting point for
    multi-start runs on multimodal objectives.
    """

    dimension: int
    evaluator: Callable[[np.ndarray], float]
    budget: int
    tolerance: float = DEFAULT_TOLERANCE
    seed: int = 0
    restart_sampler: Callable[[np.random.Generator], np.ndarray] | None = None

    def __post_init__(self):
        if self.dimension < 1:
            raise UsageError(f"dimension must be >= 1, got {self.dimension}")
        if self.budget < 0:
            raise UsageError(f"budget must be >= 0, got {self.budget}")
        if not self.tolerance > 0:
            raise UsageError(f"tolerance must be > 0, got {self.tolerance}")
        if self.restart_sampler is not None and not callable(
            self.restart_sampler
        ):
            raise UsageError("restart_sampler must be callable or None")


@dataclass(frozen=True)
class OptResult:
    """Outcome of a minimize call.

    best_value is the evaluator's output at best_point as recorded when the
    point was evaluated. evaluations_used counts calls made during the
    search; the mandatory evaluation of the initial point is not charged
    against the budget. method records which path ran.
    """

    best_point: np.ndarray
    best_value: float
    evaluations_used: int
    converged: bool
    method: str


class _BudgetExhausted(Exception):
    pass


class _NonFinite(Exception):
    pass


class _Tracker:
    """Counts evaluations, enforces the budget and keeps the running best."""

    def __init__(self, spec: ObjectiveSpec):
        self.spec = spec
        self.used = 0
        self.best_point: np.ndarray | None = None
        self.best_value = np.inf
        self.trace: list[tuple[int, float]] = []
        self._index = 0

    def _record(self, point: np.ndarray, value: float) -> None:
        self.trace.append((self._index, value))
        self._index += 1
        if not np.isfinite(value):
            raise _NonFinite
        if value < self.best_value:
            self.best_value = value
            self.best_point = point.copy()

    def eval_initial(self, point: np.ndarray) -> float:
        value = float(self.spec.evaluator(point))
        self._record(point, value)
        return value

    def __call__(self, point: np.ndarray) -> float:
        if self.used >= self.spec.budget:
            raise _BudgetExhausted
        value = float(self.spec.evaluator(point))
        self.used += 1
        self._record(point, value)
        return value

    def remaining(self) -> int:
        return self.spec.budget - self.used


def _quadratic_features(disp: np.ndarray) -> np.ndarray:
    """Feature row(s) for the model c + g.d + 0.5 d'Hd over displacements."""
    d = np.atleast_2d(disp)
    n = d.shape[1]
    ones = np.ones((d.shape[0], 1))
    squares = 0.5 * d**2
    iu, ju = np.triu_indices(n, k=1)
    crosses = d[:, iu] * d[:, ju]
    return np.hstack([ones, d, squares, crosses])


def _unpack_model(coef: np.ndarray, n: int):
    const = coef[0]
    grad = coef[1 : n + 1]
    hess = np.zeros((n, n))
    np.fill_diagonal(hess, coef[n + 1 : 2 * n + 1])
    iu, ju = np.triu_indices(n, k=1)
    hess[iu, ju] = coef[2 * n + 1 :]
    hess[ju, iu] = coef[2 * n + 1 :]
    return const, grad, hess


def _fit_quadratic(points: np.ndarray, values: np.ndarray, center: np.ndarray):
    design = _quadratic_features(points - center)
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    return _unpack_model(coef, center.shape[0])


def _trust_region_step(grad: np.ndarray, hess: np.ndarray,
                       radius: float) -> np.ndarray:
    """Minimize g.s + 0.5 s'Hs over |s| <= radius (More-Sorensen style)."""
    if not (np.all(np.isfinite(grad)) and np.all(np.isfinite(hess))):
        norm = np.linalg.norm(grad)
        if np.isfinite(norm) and norm > 0:
            return -radius * grad / norm
        return np.zeros_like(grad)

    eigvals, eigvecs = np.linalg.eigh(hess)
    grad_rot = eigvecs.T @ grad

    def step_for(lam: float) -> np.ndarray:
        denom = eigvals + lam
        denom = np.where(denom == 0.0, np.finfo(float).tiny, denom)
        return -eigvecs @ (grad_rot / denom)

    wmin = float(eigvals[0])
    if wmin > 1e-12:
        interior = step_for(0.0)
        if np.linalg.norm(interior) <= radius:
            return interior

    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        lam_lo = max(0.0, -wmin) * (1.0 + 1e-12) + 1e-12
        norm_lo = np.linalg.norm(step_for(lam_lo))
        if norm_lo <= radius:
            # Hard case: the regularized step stays interior, so pad it
            # along the lowest eigenvector out to the boundary.
            base = step_for(lam_lo)
            direction = eigvecs[:, 0]
            b = 2.0 * float(base @ direction)
            c = float(base @ base) - radius**2
            tau = (-b + np.sqrt(max(b * b - 4.0 * c, 0.0))) / 2.0
            return base + tau * direction

        lam_hi = lam_lo + 1.0
        for _ in range(200):
            if np.linalg.norm(step_for(lam_hi)) < radius:
                break
            lam_hi *= 2.0
        for _ in range(120):
            lam_mid = 0.5 * (lam_lo + lam_hi)
            if np.linalg.norm(step_for(lam_mid)) > radius:
                lam_lo = lam_mid
            else:
                lam_hi = lam_mid
        return step_for(lam_hi)


def _initial_point_set(center: np.ndarray, radius: float) -> np.ndarray:
    """Displacement design that determines a full quadratic uniquely."""
    n = center.shape[0]
    rows = [np.zeros(n)]
    eye = np.eye(n)
    for i in range(n):
        rows.append(radius * eye[i])
        rows.append(-radius * eye[i])
    for i in range(n):
        for j in range(i + 1, n):
            rows.append(radius * (eye[i] + eye[j]))
    return center + np.array(rows)


def _run_quadratic(tracker: _Tracker, initial: np.ndarray, f_initial: float,
                   tolerance: float, rng: np.random.Generator) -> bool:
    n = initial.shape[0]
    points = _initial_point_set(initial, RHO_BEG)
    values = np.empty(points.shape[0])
    values[0] = f_initial
    for k in range(1, points.shape[0]):
        values[k] = tracker(points[k])

    radius = RHO_BEG
    failures = 0
    while True:
        if radius < tolerance:
            return True
        if tracker.remaining() <= 0:
            return False

        best_idx = int(np.argmin(values))
        center = points[best_idx]
        f_center = values[best_idx]

        if failures >= 3:
            # Poor geometry: swap the farthest point for a fresh one near
            # the center instead of trusting the model again.
            direction = rng.standard_normal(n)
            direction /= max(np.linalg.norm(direction), 1e-12)
            trial = center + radius * direction
            f_trial = tracker(trial)
            far = _farthest_index(points, center, best_idx)
            points[far], values[far] = trial, f_trial
            failures = 0
            continue

        _, grad, hess = _fit_quadratic(points, values, center)
        step = _trust_region_step(grad, hess, radius)
        predicted = -(grad @ step + 0.5 * step @ hess @ step)
        if np.linalg.norm(step) < 0.1 * tolerance or predicted < _PRED_TINY:
            radius *= 0.5
            continue

        trial = center + step
        f_trial = tracker(trial)
        ratio = (f_center - f_trial) / predicted
        far = _farthest_index(points, center, best_idx)
        points[far], values[far] = trial, f_trial

        if ratio < 0.1:
            radius *= 0.5
            failures += 1
        else:
            failures = 0
            if ratio > 0.7 and np.linalg.norm(step) >= 0.9 * radius:
                radius *= 2.0


def _farthest_index(points: np.ndarray, center: np.ndarray,
                    keep: int) -> int:
    dists = np.linalg.norm(points - center, axis=1)
    dists[keep] = -1.0
    return int(np.argmax(dists))


def _run_pattern(tracker: _Tracker, initial: np.ndarray, f_initial: float,
                 tolerance: float) -> bool:
    n = initial.shape[0]
    best = initial.copy()
    f_best = f_initial
    step = RHO_BEG
    eye = np.eye(n)
    while True:
        if step < tolerance:
            return True
        if tracker.remaining() <= 0:
            return False
        improved = False
        sides = np.zeros((n, 2))
        probed = np.zeros((n, 2), dtype=bool)
        for i in range(n):
            for side, sign in enumerate((1.0, -1.0)):
                value = tracker(best + sign * step * eye[i])
                sides[i, side], probed[i, side] = value, True
                if value < f_best:
                    best = best + sign * step * eye[i]
                    f_best = value
                    improved = True
                    break
        if not improved and probed.all():
            # Whole sweep failed: try one steepest-descent step from the
            # central-difference gradient before shrinking.
            grad = (sides[:, 0] - sides[:, 1]) / (2.0 * step)
            norm = np.linalg.norm(grad)
            if norm > 1e-12:
                trial = best - step * grad / norm
                value = tracker(trial)
                if value < f_best:
                    best, f_best = trial, value
                    improved = True
        if not improved:
            step *= 0.5


def minimize(spec: ObjectiveSpec, initial, trace_path=None) -> OptResult:
    """Minimize spec.evaluator starting from ``initial``.

    The initial point is always evaluated and is not charged against the
    budget, so a budget of zero returns the initial point with its value.
    A non-finite objective value aborts the search by raising TrainingError
    with the best finite point found so far attached. With a restart
    sampler, converged reports whether any round met the radius tolerance.
    """
    initial = np.asarray(initial, dtype=float)
    if initial.ndim != 1 or initial.shape[0] != spec.dimension:
        raise UsageError(
            f"initial point must be a vector of length {spec.dimension}, "
            f"got shape {initial.shape}"
        )

    n = spec.dimension
    npt = (n + 1) * (n + 2) // 2
    method = "quadratic" if spec.budget >= npt + n + 2 else "pattern"

    tracker = _Tracker(spec)
    rng = np.random.default_rng(spec.seed)
    converged = False
    try:
        start, f_start = initial, tracker.eval_initial(initial)
        while spec.budget > 0:
            if method == "quadratic":
                round_converged = _run_quadratic(
                    tracker, start, f_start, spec.tolerance, rng
                )
            else:
                round_converged = _run_pattern(
                    tracker, start, f_start, spec.tolerance
                )
            converged = converged or round_converged
            if (
                spec.restart_sampler is None
                or not round_converged
                or tracker.remaining() < npt + n + 2
            ):
                break
            start = np.asarray(spec.restart_sampler(rng), dtype=float)
            if start.shape != (n,):
                raise UsageError(
                    f"restart sampler must return a vector of length {n}, "
                    f"got shape {start.shape}"
                )
            f_start = tracker(start)
    except _BudgetExhausted:
        pass
    except _NonFinite:
        _write_trace(trace_path, tracker.trace)
        if tracker.best_point is None:
            raise TrainingError(
                "objective is not finite at the initial point"
            ) from None
        raise TrainingError(
            "objective became non-finite during optimization",
            best_params=tracker.best_point,
            evaluations_used=tracker.used,
        ) from None

    _write_trace(trace_path, tracker.trace)
    return OptResult(
        best_point=tracker.best_point,
        best_value=tracker.best_value,
        evaluations_used=tracker.used,
        converged=converged,
        method=method,
    )


def _write_trace(trace_path, rows) -> None:
    if trace_path is None:
        return
    with open(trace_path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["evaluation", "objective"])
        writer.writerows(rows)
