"""
The map Phi(f, g) = (fg, f^ . (g reflected)^) on a pair of coset spaces

Unknowns are the coset coordinates lambda_2..n of f and mu_2..n of g,
with lambda_1 = mu_1 = 1. The first coordinate of the second component is
implied by Parseval once both components of the target have equal sums.
"""

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import List, Sequence, Tuple

import numpy as np
import structlog

from ..config import RunConfig
from ..continuation import Homotopy, SquareSystem, condition_number
from ..equivariant_geometry import EquivariantSpace
from ..errors import DegenerateKernelError, SubspaceError
from ..group_fourier import CyclicFn, dft_matrix, reversal_matrix

logger = structlog.get_logger(__name__)

Target = Tuple[np.ndarray, np.ndarray]


class PhiSystem:
    """Phi in coset coordinates, with the target left open"""

    def __init__(self, space: EquivariantSpace):
        d = space.ctx.d
        reps = list(space.reps)
        transform = dft_matrix(d)
        self.space = space
        self.n = space.n
        self.A = (transform @ space.basis)[reps, :]
        self.B = (transform @ reversal_matrix(d) @ space.conj_basis)[reps, :]

    def split(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        m = self.n - 1
        lam = np.concatenate([[1.0 + 0j], x[:m]])
        mu = np.concatenate([[1.0 + 0j], x[m:]])
        return lam, mu

    @staticmethod
    def join(lam: np.ndarray, mu: np.ndarray) -> np.ndarray:
        return np.concatenate([lam[1:], mu[1:]])

    def phi(self, lam: np.ndarray, mu: np.ndarray) -> Target:
        return lam * mu, (self.A @ lam) * (self.B @ mu)

    def residual(self, x: np.ndarray, target: Target) -> np.ndarray:
        first, second = self.phi(*self.split(x))
        return np.concatenate([first[1:] - target[0][1:], second[1:] - target[1][1:]])

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        lam, mu = self.split(x)
        m = self.n - 1
        a_lam = self.A @ lam
        b_mu = self.B @ mu
        jac = np.zeros((2 * m, 2 * m), dtype=complex)
        jac[:m, :m] = np.diag(mu[1:])
        jac[:m, m:] = np.diag(lam[1:])
        jac[m:, :m] = b_mu[1:, None] * self.A[1:, 1:]
        jac[m:, m:] = a_lam[1:, None] * self.B[1:, 1:]
        return jac

    def functions(self, x: np.ndarray) -> Tuple[CyclicFn, CyclicFn]:
        lam, mu = self.split(x)
        return self.space.expand(lam), self.space.expand_conj(mu)

    def at(self, target: Target) -> "FixedPhi":
        return FixedPhi(self, target)


class FixedPhi(SquareSystem):
    """Phi(x) - w for a fixed target w"""

    def __init__(self, phi: PhiSystem, target: Target):
        self.phi = phi
        self.target = target

    def residual(self, x):
        return self.phi.residual(x, self.target)

    def jacobian(self, x):
        return self.phi.jacobian(x)


class FiberSegment(Homotopy):
    """Phi(x) = (1 - t) w_from + t w_to"""

    def __init__(self, phi: PhiSystem, w_from: Target, w_to: Target):
        self.phi = phi
        self.w_from = w_from
        self.w_to = w_to
        m = phi.n - 1
        self._velocity = -np.concatenate([(w_to[0] - w_from[0])[1:], (w_to[1] - w_from[1])[1:]])
        assert self._velocity.shape == (2 * m,)

    def _target(self, t: float) -> Target:
        return ((1 - t) * self.w_from[0] + t * self.w_to[0],
                (1 - t) * self.w_from[1] + t * self.w_to[1])

    def residual(self, x, t):
        return self.phi.residual(x, self._target(t))

    def jacobian(self, x, t):
        return self.phi.jacobian(x)

    def dt(self, x, t):
        return self._velocity


def in_w1(target: Target, tol: float = 1e-10) -> bool:
    """First component is 1 at the identity coset and both sums agree"""
    first, second = target
    scale = 1.0 + np.abs(first).sum()
    return abs(first[0] - 1) <= tol and abs(first.sum() - second.sum()) <= tol * scale


def coset_indicator(n: int) -> Target:
    """(1_H, 1_H) in coset coordinates"""
    e0 = np.zeros(n, dtype=complex)
    e0[0] = 1.0
    return e0, e0.copy()


def all_ones(n: int) -> Target:
    """(1 off 0, 1 off 0) in coset coordinates"""
    return np.ones(n, dtype=complex), np.ones(n, dtype=complex)


@dataclass
class StartPair:
    """One explicit solution over (1_H, 1_H)"""
    A: Tuple[int, ...]
    B: Tuple[int, ...]
    f: CyclicFn
    g: CyclicFn
    x: np.ndarray
    residual: float
    condition: float


@dataclass
class FiberProblem:
    """Fiber of Phi to reach from explicit start solutions"""
    space: EquivariantSpace
    target: Target
    start: Target
    start_solutions: List[np.ndarray] = field(default_factory=list)
    label: str = "lemma68"

    def __post_init__(self):
        for w in (self.target, self.start):
            if not in_w1(w):
                raise SubspaceError("targets must have first value 1 and equal sums")


def _kernel_coords(transform: np.ndarray, support: Sequence[int], zero_rows: Sequence[int],
                   rank_tol: float) -> np.ndarray:
    """The one coordinate vector supported on support whose transform vanishes on zero_rows"""
    n = transform.shape[0]
    support = list(support)
    if zero_rows:
        block = transform[np.ix_(list(zero_rows), support)]
        _, s, vh = np.linalg.svd(block)
        rank = int(np.sum(s > rank_tol * s[0])) if s.size else 0
        if len(support) - rank != 1:
            raise DegenerateKernelError(
                f"kernel of dimension {len(support) - rank} for support {support}"
            )
        vec = np.conj(vh[-1])
    else:
        if len(support) != 1:
            raise DegenerateKernelError(f"unconstrained support {support}")
        vec = np.ones(1, dtype=complex)
    coords = np.zeros(n, dtype=complex)
    coords[support] = vec
    return coords / coords[0]


def start_fiber(space: EquivariantSpace, config: RunConfig) -> List[StartPair]:
    """
    All explicit solutions over (1_H, 1_H).

    For cosets A, B containing H with #A + #B = n + 1, f is the kernel
    vector supported on A with transform vanishing off B, and g is the
    conjugate of the kernel vector for the complementary sets A', B'.
    """
    n = space.n
    phi = PhiSystem(space)
    target = coset_indicator(n)
    others = range(1, n)
    pairs: List[StartPair] = []

    for size_a in range(n):
        for extra_a in combinations(others, size_a):
            a_set = (0,) + extra_a
            comp_a = (0,) + tuple(i for i in others if i not in extra_a)
            for extra_b in combinations(others, n - 1 - size_a):
                b_set = (0,) + extra_b
                comp_b = (0,) + tuple(i for i in others if i not in extra_b)
                lam = _kernel_coords(phi.A, a_set, [j for j in range(n) if j not in b_set],
                                     config.tol.rank)
                lam_c = _kernel_coords(phi.A, comp_a, [j for j in range(n) if j not in comp_b],
                                       config.tol.rank)
                mu = np.conj(lam_c)
                x = PhiSystem.join(lam, mu)
                system = phi.at(target)
                first, second = phi.phi(lam, mu)
                scale = 1.0 + np.linalg.norm(lam) * np.linalg.norm(mu)
                residual = float(max(np.max(np.abs(first - target[0])),
                                     np.max(np.abs(second - target[1]))) / scale)
                f, g = phi.functions(x)
                pairs.append(StartPair(a_set, b_set, f, g, x, residual,
                                       condition_number(system, x)))

    expected = comb(2 * n - 2, n - 1)
    if len(pairs) != expected:
        raise DegenerateKernelError(f"{len(pairs)} start pairs, expected {expected}")
    worst = max(pair.residual for pair in pairs)
    if worst > config.tol.predicate * 100:
        logger.error("Start fiber residual too large", residual=worst)
        raise DegenerateKernelError(f"start pair misses (1_H, 1_H) by {worst:.2e}")
    logger.info("Built start fiber", space=space.label, pairs=len(pairs), residual=worst)
    return pairs


def start_fiber_problem(space: EquivariantSpace, config: RunConfig) -> FiberProblem:
    """Start at (1_H, 1_H) with the explicit solutions, target (1, 1)"""
    pairs = start_fiber(space, config)
    bad = [p for p in pairs if p.condition > config.tracker.singular_condition]
    if bad:
        logger.warning("Ill-conditioned start solutions", count=len(bad),
                       worst=max(p.condition for p in bad))
    return FiberProblem(space, all_ones(space.n), coset_indicator(space.n),
                        [p.x for p in pairs], "lemma68")
