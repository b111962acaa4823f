"""
Solving for C-functions in a coset space

Two routes to the same fiber Phi^{-1}(1, 1):
- lemma68: deform the explicit fiber over (1_H, 1_H) through a random
  waypoint to (1, 1)
- total-degree: a Bézout start system with 2^(2n-2) paths
"""

from dataclasses import dataclass
from enum import Enum
from math import gcd
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog

from ..config import RunConfig, Tolerances, TrackerSettings
from ..continuation import (
    PathStatus,
    TotalDegreeHomotopy,
    cluster_points,
    condition_number,
    map_paths,
    refine,
    track_path,
)
from ..equivariant_geometry import EquivariantSpace, SubgroupChar, equivariant_space, odd_space
from ..errors import OutOfRangeError, PathTrackingError
from ..group_fourier import CyclicFn, DirichletChar, GroupCtx, dft, is_c_function
from ..models import RealSolutionSplit, SolutionEntry, SolutionSet, SolutionTags
from .fiber import FiberProblem, FiberSegment, PhiSystem, Target, all_ones, start_fiber_problem

logger = structlog.get_logger(__name__)

# Endpoints farther out than this after the endgame count as diverged
FAR_NORM = 1e3
TAG_TOL = 1e-6
ORBIT_TOL = 1e-6


class SolveMethod(str, Enum):
    """How the start solutions are obtained"""
    LEMMA68 = "lemma68"
    TOTAL_DEGREE = "total-degree"


@dataclass
class _FiberJob:
    phi: PhiSystem
    x0: np.ndarray
    start: Target
    waypoint: Target
    target: Target
    tracker: TrackerSettings
    tol: Tolerances


@dataclass
class _TotalDegreeJob:
    homotopy: TotalDegreeHomotopy
    x0: np.ndarray
    tracker: TrackerSettings
    tol: Tolerances


Outcome = Tuple[PathStatus, np.ndarray, np.ndarray]


def _run_fiber_job(job: _FiberJob) -> Outcome:
    first = track_path(FiberSegment(job.phi, job.start, job.waypoint), job.x0, 0.0, 1.0, job.tracker)
    if first.status != PathStatus.SUCCESS:
        return first.status, first.x, first.x
    t_end = 1.0 - job.tracker.endgame_gap
    second = track_path(FiberSegment(job.phi, job.waypoint, job.target), first.x, 0.0, t_end,
                        job.tracker)
    if second.status != PathStatus.SUCCESS:
        return second.status, second.x, second.x
    x = refine(job.phi.at(job.target), second.x, job.tracker.refine_iterations, job.tol.newton)
    return PathStatus.SUCCESS, second.x, x


def _run_total_degree_job(job: _TotalDegreeJob) -> Outcome:
    t_end = 1.0 - job.tracker.endgame_gap
    result = track_path(job.homotopy, job.x0, 0.0, t_end, job.tracker)
    if result.status != PathStatus.SUCCESS:
        return result.status, result.x, result.x
    x = refine(job.homotopy.target, result.x, job.tracker.refine_iterations, job.tol.newton)
    return PathStatus.SUCCESS, result.x, x


def random_waypoint(n: int, rng: np.random.Generator) -> Target:
    """A generic point of W_1: first value 1 at H, equal sums"""
    w1 = rng.normal(size=n) + 1j * rng.normal(size=n)
    w1[0] = 1.0
    w2 = rng.normal(size=n) + 1j * rng.normal(size=n)
    w2[0] = w1.sum() - w2[1:].sum()
    return w1, w2


def _dirichlet_candidates(space: EquivariantSpace) -> List[DirichletChar]:
    if not space.ctx.is_prime:
        return []
    if space.sub is not None:
        return space.sub.extensions()
    return [chi for chi in DirichletChar.all(space.ctx.d) if chi.is_odd]


def tag_solution(f: CyclicFn, g: CyclicFn, multiplicity: int, condition: float,
                 space: EquivariantSpace, config: RunConfig) -> SolutionTags:
    off_zero = f.values[1:]
    dirichlet = None
    for chi in _dirichlet_candidates(space):
        if f.allclose(chi.values(), TAG_TOL):
            dirichlet = chi.t
            break
    unimodular = bool(np.max(np.abs(np.abs(off_zero) - 1.0)) <= TAG_TOL and g.allclose(f.conj(), TAG_TOL))
    return SolutionTags(
        is_dirichlet=dirichlet,
        is_unimodular=unimodular,
        is_real_valued=bool(np.max(np.abs(f.values.imag)) <= TAG_TOL),
        is_singular=multiplicity > 1 or condition > config.tracker.singular_condition,
    )


def _pairs(fn: CyclicFn) -> List[Tuple[float, float]]:
    return [(float(v.real), float(v.imag)) for v in fn.values]


def _canonical_key(entry: SolutionEntry):
    return [(round(re, 8), round(im, 8)) for re, im in entry.f]


def entry_functions(entry: SolutionEntry) -> Tuple[CyclicFn, CyclicFn]:
    """The pair (f, g) stored in a solution entry"""
    return CyclicFn.from_pairs(entry.f), CyclicFn.from_pairs(entry.g)


def _collect(phi: PhiSystem, target: Target, outcomes: Sequence[Outcome],
             config: RunConfig) -> Tuple[List[SolutionEntry], int, int]:
    """Cluster converged endpoints into entries; count diverged and failed paths"""
    system = phi.at(target)
    converged: List[np.ndarray] = []
    diverged = failed = 0
    for status, before, after in outcomes:
        if status == PathStatus.DIVERGED:
            diverged += 1
            continue
        if status == PathStatus.FAILED:
            failed += 1
            continue
        residual = np.linalg.norm(system.residual(after))
        jump = np.linalg.norm(after - before)
        if residual <= config.tol.residual and jump <= 0.1 * (1.0 + np.linalg.norm(before)):
            converged.append(after)
        elif np.linalg.norm(before) > FAR_NORM:
            diverged += 1
        else:
            failed += 1

    entries = []
    for cluster in cluster_points(converged, config.tol.cluster):
        members = np.array([converged[i] for i in cluster])
        x = members[0] if len(cluster) == 1 else members.mean(axis=0)
        f, g = phi.functions(x)
        condition = condition_number(system, x)
        entries.append(SolutionEntry(
            f=_pairs(f), g=_pairs(g),
            residual=float(np.linalg.norm(system.residual(x))),
            multiplicity=len(cluster),
            tags=tag_solution(f, g, len(cluster), condition, phi.space, config),
        ))
    entries.sort(key=_canonical_key)
    return entries, diverged, failed


def track(problem: FiberProblem, config: RunConfig) -> SolutionSet:
    """
    Deform every start solution to the target through one random waypoint.

    A failed path resamples the waypoint for the whole run so that all paths
    share one generic route; after max_retries the result is marked incomplete.
    """
    phi = PhiSystem(problem.space)
    d, n = problem.space.ctx.d, problem.space.n
    settings = config.tracker
    outcomes: List[Outcome] = []
    attempts = 0

    for attempt in range(settings.max_retries + 1):
        attempts = attempt + 1
        waypoint = random_waypoint(n, config.rng(d, n, attempt))
        jobs = [_FiberJob(phi, x0, problem.start, waypoint, problem.target, settings, config.tol)
                for x0 in problem.start_solutions]
        outcomes = map_paths(_run_fiber_job, jobs, config.workers)
        entries, diverged, failed = _collect(phi, problem.target, outcomes, config)
        if failed == 0 and diverged == 0:
            break
        logger.warning("Resampling waypoint", space=problem.space.label, attempt=attempts,
                       failed=failed, diverged=diverged)

    incomplete = failed > 0 or diverged > 0
    if incomplete:
        logger.error("Fiber incomplete after retries", space=problem.space.label,
                     attempts=attempts, failed=failed, diverged=diverged)

    result = SolutionSet(
        d=d, method=problem.label, seed=config.seed,
        total_paths=len(problem.start_solutions),
        diverged=diverged, failed=failed, incomplete=incomplete,
        waypoint_attempts=attempts, solutions=entries,
    )
    logger.info("Tracked fiber", space=problem.space.label, paths=result.total_paths,
                solutions=len(entries), multiplicity=result.total_multiplicity)
    return result


def track_total_degree(space: EquivariantSpace, config: RunConfig) -> SolutionSet:
    """All 2^(2n-2) total-degree paths for Phi = (1, 1)"""
    phi = PhiSystem(space)
    target = all_ones(space.n)
    system = phi.at(target)
    m = 2 * (space.n - 1)
    rng = config.rng(space.ctx.d, space.n, 2)
    r = rng.normal(size=m) + 1j * rng.normal(size=m)
    gamma = np.exp(2j * np.pi * rng.random())
    homotopy = TotalDegreeHomotopy(system, r, gamma)
    starts = homotopy.start_points()

    jobs = [_TotalDegreeJob(homotopy, x0, config.tracker, config.tol) for x0 in starts]
    outcomes = map_paths(_run_total_degree_job, jobs, config.workers)
    entries, diverged, failed = _collect(phi, target, outcomes, config)

    result = SolutionSet(
        d=space.ctx.d, method=SolveMethod.TOTAL_DEGREE.value, seed=config.seed,
        total_paths=len(starts), diverged=diverged, failed=failed,
        incomplete=failed > 0, solutions=entries,
    )
    if not result.balanced:
        raise PathTrackingError(
            f"{result.total_multiplicity} + {diverged} + {failed} != {len(starts)} paths"
        )
    logger.info("Tracked total-degree paths", space=space.label, paths=len(starts),
                solutions=len(entries), diverged=diverged, failed=failed)
    return result


def _line_solutions(method: SolveMethod, config: RunConfig) -> SolutionSet:
    """d = 3: the odd space is the line through delta_1 - delta_2, one point with f(1) = 1"""
    ctx = GroupCtx.of(3)
    space = odd_space(ctx)
    f = space.expand([1.0])
    g = f.inverse_off_zero()
    entry = SolutionEntry(
        f=_pairs(f), g=_pairs(g),
        residual=is_c_function(f, config.tol.predicate).residual,
        multiplicity=1,
        tags=tag_solution(f, g, 1, 1.0, space, config),
    )
    return SolutionSet(d=3, method=method.value, seed=config.seed, total_paths=1, solutions=[entry])


def solve_odd_cfunctions(d: int, method: SolveMethod = SolveMethod.LEMMA68,
                         config: Optional[RunConfig] = None) -> SolutionSet:
    """Every odd C-function on Z/dZ with f(1) = 1, with multiplicities"""
    config = config or RunConfig()
    method = SolveMethod(method)
    if d < 3 or d % 2 == 0:
        raise OutOfRangeError(f"d must be odd and at least 3, got {d}")
    ctx = GroupCtx.of(d)
    if d == 3:
        return _line_solutions(method, config)
    if method == SolveMethod.LEMMA68:
        ctx.require_prime()
        space = equivariant_space(SubgroupChar.odd(d))
        return track(start_fiber_problem(space, config), config)
    return track_total_degree(odd_space(ctx), config)


def solve_equivariant(sub: SubgroupChar, config: Optional[RunConfig] = None) -> SolutionSet:
    """C-functions in V_{H,c} via the explicit start fiber"""
    config = config or RunConfig()
    space = equivariant_space(sub)
    return track(start_fiber_problem(space, config), config)


def real_cfunction_p11(a: int = 1) -> CyclicFn:
    """
    A real-valued odd C-function on F_11 that is not a Dirichlet character.

    f(k) = (k/11) (c(a k^2) + 2 c(4 a k^2)) with c(m) = cos(2 pi m / 11);
    the five values a = 1..5 are its Galois conjugates.
    """
    if a % 11 == 0:
        raise OutOfRangeError("a must be a unit mod 11")
    ctx = GroupCtx.of(11)
    legendre = DirichletChar.legendre(11).values().values.real
    k = np.arange(11)
    c = lambda m: np.cos(2 * np.pi * (m % 11) / 11)  # noqa: E731
    values = legendre * (c(a * k * k) + 2 * c(4 * a * k * k))
    return CyclicFn(ctx, values)


def _contains(functions: Sequence[CyclicFn], f: CyclicFn) -> bool:
    return any(f.allclose(g, ORBIT_TOL) for g in functions)


def symmetry_orbit(f: CyclicFn) -> List[CyclicFn]:
    """
    Images of an odd f under x -> ux and f -> 1/f, normalized at 1.

    u and -u give the same image of an odd function, so u runs over
    the units up to d/2.
    """
    images: List[CyclicFn] = []
    for base in (f, f.inverse_off_zero()):
        for u in range(1, f.d // 2 + 1):
            if gcd(u, f.d) != 1:
                continue
            g = base.dilate(u).normalized()
            if not _contains(images, g):
                images.append(g)
    return images


def _values_cyclotomic(f: CyclicFn) -> bool:
    """Whether f(2) over the dilation class of f has an integral characteristic polynomial"""
    values = [f.dilate(u).normalized()(2).real for u in range(1, f.d // 2 + 1)]
    coeffs = np.poly(values)
    return bool(np.allclose(coeffs, np.round(coeffs), atol=ORBIT_TOL * np.max(np.abs(coeffs))))


def split_real_solutions(result: SolutionSet) -> RealSolutionSplit:
    """
    Split the real non-character solutions at p = 11.

    One part is the dilation-inversion orbit of real_cfunction_p11(1),
    whose values are conjugate in Q(zeta_11)^+. The rest are grouped
    into orbits of the same symmetries and tested for the same property.
    """
    if result.d != 11:
        raise OutOfRangeError(f"the real split is taken at d = 11, got {result.d}")
    real = [entry_functions(e)[0] for e in result.solutions
            if e.tags.is_real_valued and e.tags.is_dirichlet is None]
    family = symmetry_orbit(real_cfunction_p11(1).normalized())
    known = [f for f in real if _contains(family, f)]
    other = [f for f in real if not _contains(family, f)]

    sizes = []
    remaining = list(other)
    while remaining:
        orbit = symmetry_orbit(remaining[0])
        sizes.append(len(orbit))
        remaining = [f for f in remaining if not _contains(orbit, f)]

    fourier_closed = all(_contains(part, dft(f).normalized()) for part in (known, other) for f in part)
    split = RealSolutionSplit(
        p=11, total=len(real), cyclotomic_family=len(known), other=len(other),
        other_orbit_sizes=sizes,
        other_values_cyclotomic=_values_cyclotomic(other[0]) if other else None,
        fourier_closed=fourier_closed,
    )
    logger.info("Split real solutions", total=split.total, family=split.cyclotomic_family,
                other=split.other, orbits=sizes)
    return split
