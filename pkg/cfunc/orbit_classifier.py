"""
Orbits of pairs (j, k) mod d under (j, k) -> (xj, xk) and j -> -j

A pair has a representative (j', k') with j' <= k' <= d - j' unless it
belongs to one of seven exceptional families; families are matched up to
the same equivalence.
"""

from math import gcd
from typing import Callable, Dict, List, Optional, Tuple

import structlog
from sympy import primefactors

from .cyclotomic_sums import ratio_is_root_of_unity
from .errors import OutOfRangeError
from .group_fourier import DirichletChar, GroupCtx
from .models import PairClass, PairScan, RatioBridge, RatioVerdict

logger = structlog.get_logger(__name__)


def _units(d: int) -> List[int]:
    return [x for x in range(1, d) if gcd(x, d) == 1] or [1]


def _pm(d: int, *residues: int) -> set:
    return {r % d for r in residues} | {(-r) % d for r in residues}


def _family_a(d: int, j: int, k: int) -> Optional[int]:
    if d % 2 == 0 and j == d // 2 and k != d // 2:
        return d // 2
    return None


def _family_pattern(period: int, js: Tuple[int, ...], ks: Tuple[int, ...]) -> Callable[[int, int, int], Optional[int]]:
    def match(d: int, j: int, k: int) -> Optional[int]:
        if d % period:
            return None
        m = d // period
        if j in _pm(d, *(a * m for a in js)) and k in _pm(d, *(b * m for b in ks)):
            return m
        return None
    return match


FAMILIES: Dict[str, Callable[[int, int, int], Optional[int]]] = {
    "a": _family_a,
    "b": _family_pattern(6, (2,), (1,)),
    "c": _family_pattern(10, (2,), (1,)),
    "d": _family_pattern(12, (3,), (2,)),
    "e": _family_pattern(12, (4,), (3,)),
    "f": _family_pattern(30, (6, 12), (5,)),
    "g": _family_pattern(30, (10,), (3, 9)),
}


def _orbit(d: int, j: int, k: int):
    for sign in (1, -1):
        for x in _units(d):
            yield (sign * x * j) % d, (x * k) % d, x, sign


def exceptional_family(d: int, j: int, k: int) -> Tuple[Optional[str], Optional[int]]:
    """Family label and parameter m of (j, k), up to equivalence"""
    for label, match in FAMILIES.items():
        for j2, k2, _, _ in _orbit(d, j, k):
            m = match(d, j2, k2)
            if m is not None:
                return label, m
    return None, None


def find_representative(d: int, j: int, k: int) -> PairClass:
    """
    Smallest (j', k') with j' <= k' <= d - j' equivalent to (j, k) or (-j, k).

    The witness is the (x, sign) with the smallest x reaching the chosen pair.
    """
    if d < 2:
        raise OutOfRangeError(f"d must be at least 2, got {d}")
    if not (0 < j < d and 0 < k < d):
        raise OutOfRangeError(f"need 0 < j, k < {d}, got ({j}, {k})")

    best = None
    for j2, k2, x, sign in _orbit(d, j, k):
        if j2 == 0 or k2 == 0:
            continue
        if j2 <= k2 <= d - j2:
            key = (j2, k2, x, -sign)
            if best is None or key < best:
                best = key

    label, m = exceptional_family(d, j, k)
    if best is None:
        return PairClass(d=d, j=j, k=k, exceptional_case=label, m=m)
    return PairClass(
        d=d, j=j, k=k,
        representative=(best[0], best[1]),
        witness_x=best[2], witness_sign=-best[3],
        exceptional_case=label, m=m,
    )


def scan_all_pairs(d: int) -> PairScan:
    """Classify every pair mod d; a mismatch is a pair where search and families disagree"""
    scan = PairScan(d=d, total_pairs=(d - 1) ** 2)
    for j in range(1, d):
        for k in range(1, d):
            pair = find_representative(d, j, k)
            no_rep = pair.representative is None
            in_family = pair.exceptional_case is not None
            if no_rep:
                scan.exceptional.append(pair)
                scan.families[pair.exceptional_case or "?"] = scan.families.get(pair.exceptional_case or "?", 0) + 1
            if no_rep != in_family:
                scan.mismatches.append(pair)
    if scan.mismatches:
        logger.warning("Representative search disagrees with families", d=d,
                       mismatches=len(scan.mismatches))
    return scan


def ratio_bridge(p: int) -> RatioBridge:
    """
    Pair classes mod p - 1 against the Jacobi ratios of (omega^-j, omega^-k).

    A pair has no representative exactly when its ratio is a root of unity,
    with one exception: at j = k = (p-1)/2 both characters are the Legendre
    character and the ratio is 1, while (m, m) is its own representative.
    Such pairs are listed apart from the mismatches.
    """
    GroupCtx.of(p).require_prime()
    if p < 5:
        raise OutOfRangeError(f"the bridge needs p >= 5, got {p}")
    d = p - 1
    m = d // 2
    report = RatioBridge(p=p, pairs=(d - 1) ** 2, exceptional=0, root_of_unity=0)
    for j in range(1, d):
        for k in range(1, d):
            exceptional = find_representative(d, j, k).representative is None
            ratio = ratio_is_root_of_unity(DirichletChar(p, -j), DirichletChar(p, -k))
            root = ratio.verdict == RatioVerdict.ROOT_OF_UNITY
            report.exceptional += exceptional
            report.root_of_unity += root
            if exceptional == root:
                continue
            if j == k == m:
                report.legendre_pairs.append((j, k))
            else:
                report.mismatches.append((j, k))
    if report.mismatches:
        logger.warning("Pair classes disagree with Jacobi ratios", p=p, mismatches=len(report.mismatches))
    return report


def jacobsthal(n: int) -> int:
    """Largest gap between consecutive integers coprime to n"""
    if n < 2:
        raise OutOfRangeError(f"n must be at least 2, got {n}")
    coprime = [r for r in range(1, n + 1) if gcd(r, n) == 1]
    gaps = [b - a for a, b in zip(coprime, coprime[1:])]
    gaps.append(coprime[0] + n - coprime[-1])
    return max(gaps)


def jacobsthal_bounds_hold(n: int) -> bool:
    """g(n) <= 2^omega(n), and g(n) <= n/3 when n > 10"""
    g = jacobsthal(n)
    ok = g <= 2 ** len(primefactors(n))
    if n > 10:
        ok = ok and 3 * g <= n
    return ok
