"""
Support sizes on F_p: the uncertainty bound and Chebotarev minors
"""

from itertools import combinations, product
from math import comb
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from ..config import RunConfig
from ..errors import OutOfRangeError, SizeMismatchError, ZeroFunctionError
from ..group_fourier import CyclicFn, GroupCtx, dft
from ..models import ChebotarevReport, UncertaintyReport

logger = structlog.get_logger(__name__)

DETERMINANT_TOL = 1e-9


def uncertainty_check(f: CyclicFn, tol: float = 1e-10) -> UncertaintyReport:
    """#supp f + #supp f^ >= p + 1 for nonzero f on F_p"""
    f.ctx.require_prime()
    p = f.d
    if f.norm() <= tol:
        raise ZeroFunctionError("the bound needs a nonzero function")
    scale = tol * max(1.0, float(np.max(np.abs(f.values))))
    support_f = len(f.support(scale))
    support_t = len(dft(f).support(scale))
    total = support_f + support_t
    return UncertaintyReport(p=p, support_f=support_f, support_transform=support_t,
                             holds=total >= p + 1, extremal=total == p + 1)


def uncertainty_sweep(p: int, samples: int, config: Optional[RunConfig] = None) -> List[UncertaintyReport]:
    """Random functions with random supports of every size"""
    config = config or RunConfig()
    ctx = GroupCtx.of(p)
    ctx.require_prime()
    rng = config.rng(p, 71)
    reports = []
    for _ in range(samples):
        size = int(rng.integers(1, p + 1))
        support = rng.choice(p, size=size, replace=False)
        values = np.zeros(p, dtype=complex)
        values[support] = rng.normal(size=size) + 1j * rng.normal(size=size)
        reports.append(uncertainty_check(CyclicFn(ctx, values)))
    failures = [r for r in reports if not r.holds]
    if failures:
        logger.error("Uncertainty bound violated", p=p, failures=len(failures))
    return reports


def chebotarev_minor(p: int, rows: Sequence[int], cols: Sequence[int]) -> ChebotarevReport:
    """Determinant of the (rows, cols) minor of [zeta_p^{jk}]"""
    GroupCtx.of(p).require_prime()
    rows, cols = list(rows), list(cols)
    if len(rows) != len(cols):
        raise SizeMismatchError(f"minor needs equal sizes, got {len(rows)} and {len(cols)}")
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        raise OutOfRangeError("rows and columns must be distinct")
    if any(not 0 <= x < p for x in rows + cols):
        raise OutOfRangeError(f"indices must lie in 0..{p - 1}")
    if not rows:
        det = 1.0 + 0j
    else:
        j = np.array(rows)[:, None]
        k = np.array(cols)[None, :]
        det = complex(np.linalg.det(np.exp(2j * np.pi * ((j * k) % p) / p)))
    return ChebotarevReport(p=p, rows=rows, cols=cols, determinant=(det.real, det.imag),
                            nonzero=abs(det) > DETERMINANT_TOL)


def _minor_subsets(p: int, size: int, config: RunConfig) -> Tuple[bool, Iterator[Tuple[Sequence[int], Sequence[int]]]]:
    """All (rows, cols) of one size, or a seeded random sample when there are too many"""
    budget = config.budget
    if comb(p, size) ** 2 <= budget.chebotarev_exhaustive:
        subsets = list(combinations(range(p), size))
        return True, product(subsets, subsets)
    rng = config.rng(p, size, 97)

    def sample() -> Iterator[Tuple[Sequence[int], Sequence[int]]]:
        for _ in range(budget.chebotarev_samples):
            yield (sorted(rng.choice(p, size=size, replace=False).tolist()),
                   sorted(rng.choice(p, size=size, replace=False).tolist()))

    return False, sample()


def chebotarev_scan(p: int, max_size: int,
                    config: Optional[RunConfig] = None) -> Tuple[int, List[ChebotarevReport]]:
    """
    Square minors up to max_size; returns the count checked and the vanishing ones.

    A size is enumerated exhaustively while its minor count stays within
    config.budget.chebotarev_exhaustive, and sampled at random otherwise.
    """
    config = config or RunConfig()
    GroupCtx.of(p).require_prime()
    if max_size < 1 or max_size > p:
        raise OutOfRangeError(f"max_size must lie in 1..{p}, got {max_size}")
    checked = 0
    vanishing = []
    for size in range(1, max_size + 1):
        exhaustive, minors = _minor_subsets(p, size, config)
        for rows, cols in minors:
            report = chebotarev_minor(p, rows, cols)
            checked += 1
            if not report.nonzero:
                vanishing.append(report)
        if not exhaustive:
            logger.debug("Sampled minors", p=p, size=size, samples=config.budget.chebotarev_samples)
    logger.info("Scanned minors", p=p, max_size=max_size, checked=checked, vanishing=len(vanishing))
    return checked, vanishing
