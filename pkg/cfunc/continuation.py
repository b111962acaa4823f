"""
Predictor-corrector path tracking for square polynomial homotopies

Shared by the fiber solver, the total-degree runs and the Hessian
fiber counts. A homotopy H(x, t) is traced from t0 to t1 with a Heun
predictor, a Newton corrector and step halving on corrector failure.
"""

import itertools
from abc import ABC, abstractmethod
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, List, Sequence, Tuple, TypeVar

import numpy as np
import structlog

from .config import TrackerSettings

logger = structlog.get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class PathStatus(str, Enum):
    """Outcome of one tracked path"""
    SUCCESS = "success"
    DIVERGED = "diverged"
    FAILED = "failed"


class SquareSystem(ABC):
    """F: C^m -> C^m with an analytic Jacobian"""

    @abstractmethod
    def residual(self, x: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def jacobian(self, x: np.ndarray) -> np.ndarray:
        ...


class Homotopy(ABC):
    """H(x, t) = 0 traced in the real parameter t"""

    @abstractmethod
    def residual(self, x: np.ndarray, t: float) -> np.ndarray:
        ...

    @abstractmethod
    def jacobian(self, x: np.ndarray, t: float) -> np.ndarray:
        ...

    def dt(self, x: np.ndarray, t: float) -> np.ndarray:
        """Partial derivative in t; central difference unless overridden"""
        h = 1e-7 * max(1.0, abs(t))
        return (self.residual(x, t + h) - self.residual(x, t - h)) / (2 * h)


class TotalDegreeHomotopy(Homotopy):
    """(1 - t) gamma (x_i^2 - r_i) + t F(x)"""

    def __init__(self, target: SquareSystem, r: np.ndarray, gamma: complex):
        self.target = target
        self.r = np.asarray(r, dtype=complex)
        self.gamma = complex(gamma)

    def start_points(self) -> List[np.ndarray]:
        roots = np.sqrt(self.r)
        return [roots * np.array(signs) for signs in itertools.product((1, -1), repeat=len(roots))]

    def residual(self, x, t):
        return (1 - t) * self.gamma * (x * x - self.r) + t * self.target.residual(x)

    def jacobian(self, x, t):
        return (1 - t) * self.gamma * np.diag(2 * x) + t * self.target.jacobian(x)

    def dt(self, x, t):
        return self.target.residual(x) - self.gamma * (x * x - self.r)


@dataclass
class PathResult:
    """End state of one path"""
    x: np.ndarray
    t: float
    status: PathStatus
    steps: int = 0
    rejected: int = 0


def solve_linear(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.solve(matrix, rhs)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(matrix, rhs, rcond=None)[0]


def _tangent(H: Homotopy, x: np.ndarray, t: float) -> np.ndarray:
    return -solve_linear(H.jacobian(x, t), H.dt(x, t))


def _correct(H: Homotopy, x: np.ndarray, t: float, settings: TrackerSettings) -> Tuple[np.ndarray, bool]:
    previous = None
    for _ in range(settings.corrector_iterations):
        delta = solve_linear(H.jacobian(x, t), -H.residual(x, t))
        if not np.all(np.isfinite(delta)):
            return x, False
        x = x + delta
        size = np.linalg.norm(delta)
        if size <= settings.corrector_tol * (1.0 + np.linalg.norm(x)):
            return x, True
        if previous is not None and size > 0.5 * previous:
            return x, False
        previous = size
    return x, False


def track_path(H: Homotopy, x0: np.ndarray, t0: float, t1: float,
               settings: TrackerSettings) -> PathResult:
    """Trace the solution x0 of H(., t0) to t1"""
    x = np.array(x0, dtype=complex)
    t = t0
    h = min(settings.initial_step, settings.max_step, t1 - t0)
    steps = rejected = easy = 0

    while t < t1:
        if steps + rejected >= settings.max_steps:
            return PathResult(x, t, PathStatus.FAILED, steps, rejected)
        h = min(h, t1 - t)
        t_next = t1 if h >= t1 - t else t + h

        v1 = _tangent(H, x, t)
        x_euler = x + h * v1
        v2 = _tangent(H, x_euler, t_next)
        x_pred = x + 0.5 * h * (v1 + v2)

        ok = bool(np.all(np.isfinite(x_pred)))
        if ok:
            x_new, ok = _correct(H, x_pred, t_next, settings)

        if ok:
            x, t = x_new, t_next
            steps += 1
            if np.linalg.norm(x) > settings.divergence_norm:
                return PathResult(x, t, PathStatus.DIVERGED, steps, rejected)
            easy += 1
            if easy >= 3:
                h = min(2 * h, settings.max_step)
                easy = 0
        else:
            rejected += 1
            easy = 0
            h *= 0.5
            if h < settings.min_step:
                logger.debug("Step size underflow", t=t, steps=steps)
                return PathResult(x, t, PathStatus.FAILED, steps, rejected)

    return PathResult(x, t, PathStatus.SUCCESS, steps, rejected)


def refine(system: SquareSystem, x: np.ndarray, iterations: int = 100,
           tol: float = 1e-12) -> np.ndarray:
    """
    Newton iteration on F(x) = 0.

    Converges linearly at a multiple root; stops once steps stall.
    """
    x = np.array(x, dtype=complex)
    best_x, best_res = x, np.linalg.norm(system.residual(x))
    for _ in range(iterations):
        delta = solve_linear(system.jacobian(x), -system.residual(x))
        if not np.all(np.isfinite(delta)):
            break
        x = x + delta
        res = np.linalg.norm(system.residual(x))
        if res < best_res:
            best_x, best_res = x, res
        if np.linalg.norm(delta) <= tol * (1.0 + np.linalg.norm(x)) or res == 0.0:
            break
    return best_x


def condition_number(system: SquareSystem, x: np.ndarray) -> float:
    s = np.linalg.svd(system.jacobian(x), compute_uv=False)
    if s[-1] == 0:
        return float("inf")
    return float(s[0] / s[-1])


def cluster_points(points: Sequence[np.ndarray], radius: float) -> List[List[int]]:
    """Group points within radius of a cluster's first member, in input order"""
    clusters: List[List[int]] = []
    anchors: List[np.ndarray] = []
    for index, point in enumerate(points):
        for cluster, anchor in zip(clusters, anchors):
            if np.linalg.norm(point - anchor) < radius:
                cluster.append(index)
                break
        else:
            clusters.append([index])
            anchors.append(point)
    return clusters


def map_paths(worker: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """Run worker over items, in a process pool when workers > 1; order is preserved"""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [worker(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, items, chunksize=max(1, len(items) // (4 * workers))))
