"""
Search for biunimodular functions on F_p

f is parametrized by p - 1 phases with f(0) = 1, and |f^(k)|^2 = 1 is
solved by Levenberg-Marquardt from random starts, optionally joined by
starts jittered off the known families. Converged
points are matched against the gaussians and the Björck-Saffari orbit;
anything else is certified independently before it is reported as new.
"""

from typing import Dict, List, Optional, Tuple

import numpy as np
import structlog
from scipy.optimize import least_squares

from ..config import RunConfig
from ..errors import OutOfRangeError
from ..group_fourier import (
    CyclicFn,
    GroupCtx,
    bjorck_saffari,
    dft_matrix,
    gaussian_family,
    is_biunimodular,
)
from ..models import BiunimodularEntry, BiunimodularReport

logger = structlog.get_logger(__name__)

MATCH_TOL = 1e-6
SEED_JITTER = 1e-3

GAUSSIAN = "gaussian"
BJORCK_SAFFARI = "bjorck_saffari"
BJORCK_SAFFARI_MODULATED = "bjorck_saffari_modulated"
NEW = "new"


def _normalize_at_zero(values: np.ndarray) -> np.ndarray:
    return values / values[..., :1]


def known_families(ctx: GroupCtx) -> Tuple[np.ndarray, List[str]]:
    """
    Gaussians and the Björck-Saffari orbit under translation and modulation,
    each scaled to f(0) = 1, with their tags.
    """
    p = ctx.d
    rows: List[np.ndarray] = [g.values for g in gaussian_family(ctx)]
    tags = [GAUSSIAN] * len(rows)
    x = np.arange(p)
    for h in bjorck_saffari(ctx):
        for a in range(p):
            shifted = h.fn.translate(a).values
            for b in range(p):
                rows.append(shifted * np.exp(2j * np.pi * b * x / p))
                tags.append(BJORCK_SAFFARI if b == 0 else BJORCK_SAFFARI_MODULATED)
    return _normalize_at_zero(np.array(rows)), tags


class _PhaseProblem:
    """Residuals |f^(k)|^2 - 1 in the phases of f(1..p-1)"""

    def __init__(self, p: int):
        self.p = p
        self.transform = dft_matrix(p)

    def values(self, theta: np.ndarray) -> np.ndarray:
        return np.concatenate([[1.0 + 0j], np.exp(1j * theta)])

    def residual(self, theta: np.ndarray) -> np.ndarray:
        spectrum = self.transform @ self.values(theta)
        return np.abs(spectrum) ** 2 - 1.0

    def jacobian(self, theta: np.ndarray) -> np.ndarray:
        f = self.values(theta)
        spectrum = self.transform @ f
        partial = self.transform[:, 1:] * (1j * f[1:])[None, :]
        return 2.0 * np.real(np.conj(spectrum)[:, None] * partial)


def _match(values: np.ndarray, table: np.ndarray) -> Optional[int]:
    distance = np.max(np.abs(table - values[None, :]), axis=1)
    best = int(np.argmin(distance))
    return best if distance[best] <= MATCH_TOL else None


def biunimodular_search(p: int, starts: Optional[int] = None, config: Optional[RunConfig] = None,
                        seeded: bool = False) -> BiunimodularReport:
    """
    Distinct biunimodular functions with f(0) = 1 reached from random starts.

    starts defaults to config.budget.biunimodular_starts. With seeded, every
    gaussian and Björck-Saffari translate also contributes a jittered start;
    such runs only show the families are stable, not that a search finds them.
    """
    config = config or RunConfig()
    starts = config.budget.biunimodular_starts if starts is None else starts
    ctx = GroupCtx.of(p)
    ctx.require_prime()
    if p < 5:
        raise OutOfRangeError(f"search needs p >= 5, got {p}")
    if starts < 0:
        raise OutOfRangeError("starts must be non-negative")

    problem = _PhaseProblem(p)
    table, table_tags = known_families(ctx)
    rng = config.rng(p, 97)

    initial: List[np.ndarray] = []
    if seeded:
        seeds = table[[i for i, tag in enumerate(table_tags) if tag != BJORCK_SAFFARI_MODULATED]]
        for row in seeds:
            initial.append(np.angle(row[1:]) + SEED_JITTER * rng.normal(size=p - 1))
    for _ in range(starts):
        initial.append(rng.uniform(0.0, 2 * np.pi, size=p - 1))

    found: List[Tuple[np.ndarray, BiunimodularEntry]] = []
    converged = false_new = 0
    for theta0 in initial:
        result = least_squares(problem.residual, theta0, jac=problem.jacobian, method="lm",
                               xtol=1e-15, ftol=1e-15, gtol=1e-15)
        residual = float(np.max(np.abs(result.fun)))
        if residual > config.tol.residual:
            continue
        converged += 1
        values = problem.values(result.x)

        duplicate = next((entry for known, entry in found
                          if np.max(np.abs(known - values)) <= MATCH_TOL), None)
        if duplicate is not None:
            duplicate.hits += 1
            continue

        index = _match(values, table)
        tag = table_tags[index] if index is not None else NEW
        if tag == NEW and not is_biunimodular(CyclicFn(ctx, values), tol=config.tol.predicate * 10):
            false_new += 1
            logger.warning("Rejected uncertified candidate", p=p, residual=residual)
            continue
        entry = BiunimodularEntry(
            f=[(float(v.real), float(v.imag)) for v in values],
            tag=tag, residual=residual,
        )
        found.append((values, entry))

    counts: Dict[str, int] = {}
    hits: Dict[str, int] = {}
    for _, entry in found:
        counts[entry.tag] = counts.get(entry.tag, 0) + 1
        hits[entry.tag] = hits.get(entry.tag, 0) + entry.hits
    family_sizes = {tag: table_tags.count(tag) for tag in (GAUSSIAN, BJORCK_SAFFARI, BJORCK_SAFFARI_MODULATED)}
    entries = sorted((entry for _, entry in found),
                     key=lambda e: (e.tag, [(round(re, 8), round(im, 8)) for re, im in e.f]))

    logger.info("Biunimodular search finished", p=p, starts=len(initial), seeded=seeded,
                converged=converged, distinct=len(entries), **counts)
    return BiunimodularReport(p=p, seed=config.seed, starts=len(initial), seeded=seeded, converged=converged,
                              found=entries, counts=counts, hits=hits, family_sizes=family_sizes,
                              false_new=false_new)
