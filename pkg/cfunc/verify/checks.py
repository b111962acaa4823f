"""
Acceptance checks run by `cfunc verify`

Each check takes the run configuration and returns (passed, detail).
Fast checks finish in seconds; full checks include the p = 11 and
p = 13 counting runs, the d <= 120 orbit scan and the p = 11 search.
"""

from typing import List, Tuple

import numpy as np
from sympy import primerange

from ..config import RunConfig
from ..cyclotomic_sums import (
    CycInt,
    jacobi_sum_exact,
    ratio_is_root_of_unity,
    stickelberger_reduce,
)
from ..equivariant_geometry import (
    SubgroupChar,
    all_subgroup_chars,
    certify_anisotropy,
    equivariant_space,
    full_space,
    numeric_transversal_at,
    transversality_at,
)
from ..group_fourier import (
    DirichletChar,
    GroupCtx,
    bjorck_saffari,
    bjorck_saffari_translates,
    dft,
    gaussian_family,
    is_biunimodular,
    is_c_function,
)
from ..models import BiunimodularReport, SolutionSet
from ..orbit_classifier import ratio_bridge, scan_all_pairs
from ..solver.biunimodular import BJORCK_SAFFARI, GAUSSIAN, NEW, biunimodular_search
from ..solver.fiber import start_fiber
from ..solver.supports import chebotarev_scan, uncertainty_check, uncertainty_sweep
from ..solver.tracking import SolveMethod, entry_functions, solve_odd_cfunctions, split_real_solutions
from .registry import CheckLevel, CheckRegistry

registry = CheckRegistry()

Outcome = Tuple[bool, str]

# (p, t1, t2, value) with the value fixed up to complex conjugation
QUOTED_JACOBI = [
    (37, 9, 6, complex(-5, 2 * np.sqrt(3))),
    (73, 24, 18, complex(8, 3)),
    (109, 36, 18, complex(-1, -6 * np.sqrt(3))),
]

# d -> (total multiplicity, largest multiplicity, unimodular multiplicity, Dirichlet count)
EXPECTED_COUNTS = {
    7: (6, 4, 6, 3),
    9: (18, 1, 12, 0),
    11: (70, 16, 30, 5),
    13: (252, 1, 60, 6),
}

# p = 11 real non-characters: (total, cyclotomic family, others)
EXPECTED_REAL_SPLIT = (20, 10, 10)

# random starts that re-find every gaussian and Björck-Saffari translate at p = 7
BIUNIMODULAR_STARTS_P7 = 5000


def _summary(result: SolutionSet) -> Tuple[int, int, int, int]:
    largest = max((e.multiplicity for e in result.solutions), default=0)
    return (result.total_multiplicity, largest, result.unimodular_multiplicity,
            result.dirichlet_count)


def _count_check(d: int, method: SolveMethod, config: RunConfig) -> Outcome:
    return _count_outcome(d, solve_odd_cfunctions(d, method, config))


def _count_outcome(d: int, result: SolutionSet) -> Outcome:
    observed = _summary(result)
    expected = EXPECTED_COUNTS[d]
    bad = [e for e in result.solutions if not is_c_function(entry_functions(e)[0], 1e-6)]
    passed = observed == expected and not bad and not result.incomplete and result.balanced
    return passed, f"observed {observed}, expected {expected}, non C-functions {len(bad)}"


def _same_multiset(a: SolutionSet, b: SolutionSet, tol: float = 1e-6) -> bool:
    left = [(np.array(entry_functions(e)[0].values), e.multiplicity) for e in a.solutions]
    right = [(np.array(entry_functions(e)[0].values), e.multiplicity) for e in b.solutions]
    if len(left) != len(right):
        return False
    unused = list(range(len(right)))
    for values, mult in left:
        match = next((i for i in unused
                      if right[i][1] == mult and np.max(np.abs(right[i][0] - values)) <= tol), None)
        if match is None:
            return False
        unused.remove(match)
    return True


# Exact arithmetic


@registry.register("jacobi_exact", "exact")
def check_jacobi_exact(config: RunConfig) -> Outcome:
    """Quoted Jacobi sums, exact at p = 7"""
    at_seven = jacobi_sum_exact(DirichletChar(7, 3), DirichletChar(7, 2))
    ok = at_seven == CycInt.from_raw(6, [1, 2])
    misses: List[int] = []
    for p, t1, t2, value in QUOTED_JACOBI:
        z = jacobi_sum_exact(DirichletChar(p, t1), DirichletChar(p, t2)).to_complex()
        if min(abs(z - value), abs(z - value.conjugate())) > 1e-9:
            misses.append(p)
    return ok and not misses, f"p=7 exact: {ok}; mismatched primes: {misses}"


@registry.register("ratio_classification", "exact")
def check_ratio_classification(config: RunConfig) -> Outcome:
    """Root-of-unity verdicts match cases a-g for every pair at p <= 31"""
    checked = 0
    wrong = []
    for p in primerange(3, 32):
        for t1 in range(1, p - 1):
            for t2 in range(1, p - 1):
                report = ratio_is_root_of_unity(DirichletChar(p, t1), DirichletChar(p, t2))
                checked += 1
                if not report.consistent:
                    wrong.append((p, t1, t2))
    return not wrong, f"{checked} pairs, {len(wrong)} inconsistent {wrong[:5]}"


@registry.register("ratio_bridge", "exact")
def check_ratio_bridge(config: RunConfig) -> Outcome:
    """Pairs mod p - 1 without representative are the root-of-unity ratios, p <= 31"""
    mismatches = []
    legendre = 0
    for p in primerange(5, 32):
        report = ratio_bridge(p)
        mismatches.extend((p, j, k) for j, k in report.mismatches)
        legendre += len(report.legendre_pairs)
    return not mismatches, f"{len(mismatches)} mismatches {mismatches[:5]}, Legendre pairs apart {legendre}"


@registry.register("stickelberger", "exact")
def check_stickelberger(config: RunConfig) -> Outcome:
    """J_{j,k} = -C(j+k, k) mod p and vanishing iff j + k >= p, p <= 31"""
    wrong = []
    for p in primerange(3, 32):
        for j in range(1, p - 1):
            for k in range(1, p - 1):
                r = stickelberger_reduce(p, j, k)
                if not r.agree or r.vanishes != r.predicted_vanishing:
                    wrong.append((p, j, k))
    return not wrong, f"{len(wrong)} failures {wrong[:5]}"


def _orbit_scan(limit: int) -> Outcome:
    bad = [d for d in range(2, limit + 1) if not scan_all_pairs(d).consistent]
    return not bad, f"d = 2..{limit}, inconsistent: {bad}"


@registry.register("orbit_scan_small", "exact")
def check_orbit_scan_small(config: RunConfig) -> Outcome:
    """Representative search fails exactly on the families, d <= 40"""
    return _orbit_scan(40)


@registry.register("orbit_scan", "exact", CheckLevel.FULL)
def check_orbit_scan(config: RunConfig) -> Outcome:
    """Representative search fails exactly on the families, d <= 120"""
    return _orbit_scan(120)


# Geometry


@registry.register("transversality", "geometry")
def check_transversality(config: RunConfig) -> Outcome:
    """Criterion and tangent rank agree for every (H, c, chi), p <= 13"""
    checked = 0
    disagree = []
    for p in primerange(5, 14):
        for sub in all_subgroup_chars(p):
            for chi in sub.extensions():
                report = transversality_at(chi, sub, config.tol.rank)
                checked += 1
                if not report.agree:
                    disagree.append((p, sub.n, sub.c_exponent, chi.t))
    return not disagree, f"{checked} characters, disagreements {disagree[:5]}"


@registry.register("family_transversality", "geometry")
def check_family_transversality(config: RunConfig) -> Outcome:
    """Gaussians and Björck-Saffari points transverse; Legendre not, in the odd space"""
    failures = []
    for p in (3, 5, 7, 11, 13):
        ctx = GroupCtx.of(p)
        space = full_space(ctx)
        if not numeric_transversal_at(gaussian_family(ctx)[0], tol=config.tol.rank, space=space).numeric_verdict:
            failures.append(("gaussian", p))
        if p >= 5:
            for h in bjorck_saffari(ctx):
                if not numeric_transversal_at(h.fn, tol=config.tol.rank, space=space).numeric_verdict:
                    failures.append(("bjorck_saffari", p))
    for p in (7, 11):
        legendre = DirichletChar.legendre(p)
        report = transversality_at(legendre, SubgroupChar.odd(p), config.tol.rank)
        if report.numeric_verdict or report.criterion_verdict:
            failures.append(("legendre", p))
    return not failures, f"failures {failures}"


def _hessian(p: int, floor: float, config: RunConfig) -> Outcome:
    report = certify_anisotropy(p, config)
    n = report.n
    passed = (report.regular_fiber_count == report.expected_fiber_count
              and report.first_derivative_norm < 1e-6
              and report.min_norm > floor
              and sum(report.real_counts) <= 2 ** (n - 1))
    return passed, (f"fiber {report.regular_fiber_count}/{report.expected_fiber_count}, "
                    f"min |Q| {report.min_norm:.3e} (floor {floor}), real {report.real_counts}")


@registry.register("hessian_p7", "geometry")
def check_hessian_p7(config: RunConfig) -> Outcome:
    """Q at p = 7: 4 regular solutions, anisotropic, D Psi_0(0) = 0"""
    return _hessian(7, 1e-2, config)


@registry.register("hessian_p11", "geometry", CheckLevel.FULL)
def check_hessian_p11(config: RunConfig) -> Outcome:
    """Q at p = 11: 16 regular solutions, anisotropic, D Psi_0(0) = 0"""
    return _hessian(11, 1e-4, config)


# Counting


@registry.register("count_d7", "counting")
def check_count_d7(config: RunConfig) -> Outcome:
    """p = 7: 6 with multiplicity, Legendre cluster of 4"""
    return _count_check(7, SolveMethod.LEMMA68, config)


@registry.register("count_d9", "counting")
def check_count_d9(config: RunConfig) -> Outcome:
    """d = 9 by total degree: 18 regular solutions, 12 unimodular"""
    return _count_check(9, SolveMethod.TOTAL_DEGREE, config)


@registry.register("count_d11", "counting", CheckLevel.FULL)
def check_count_d11(config: RunConfig) -> Outcome:
    """p = 11: 70 with multiplicity, Legendre cluster of 16, real solutions 10 + 10"""
    result = solve_odd_cfunctions(11, SolveMethod.LEMMA68, config)
    passed, detail = _count_outcome(11, result)
    split = split_real_solutions(result)
    split_ok = ((split.total, split.cyclotomic_family, split.other) == EXPECTED_REAL_SPLIT
                and split.other_orbit_sizes == [10]
                and split.other_values_cyclotomic is False
                and split.fourier_closed)
    return passed and split_ok, (
        f"{detail}; real {split.total} = {split.cyclotomic_family} cyclotomic + "
        f"{split.other} in orbits {split.other_orbit_sizes}, Fourier closed {split.fourier_closed}"
    )


@registry.register("count_d13", "counting", CheckLevel.FULL)
def check_count_d13(config: RunConfig) -> Outcome:
    """p = 13: 252 regular solutions"""
    return _count_check(13, SolveMethod.LEMMA68, config)


def _agreement(p: int, config: RunConfig) -> Outcome:
    a = solve_odd_cfunctions(p, SolveMethod.LEMMA68, config)
    b = solve_odd_cfunctions(p, SolveMethod.TOTAL_DEGREE, config)
    same = _same_multiset(a, b)
    return same, f"{len(a.solutions)} vs {len(b.solutions)} distinct solutions"


@registry.register("method_agreement_p7", "counting")
def check_method_agreement_p7(config: RunConfig) -> Outcome:
    """Start fiber and total degree give the same solutions at p = 7"""
    return _agreement(7, config)


@registry.register("method_agreement_p11", "counting", CheckLevel.FULL)
def check_method_agreement_p11(config: RunConfig) -> Outcome:
    """Start fiber and total degree give the same solutions at p = 11"""
    return _agreement(11, config)


# Supports


@registry.register("uncertainty", "supports")
def check_uncertainty(config: RunConfig) -> Outcome:
    """Support bound on random functions, with equality on start-fiber functions"""
    violations = 0
    for p in (5, 7, 11, 13):
        violations += sum(1 for r in uncertainty_sweep(p, 10_000, config) if not r.holds)
    not_extremal = 0
    for p in (7, 11):
        for pair in start_fiber(equivariant_space(SubgroupChar.odd(p)), config):
            if not uncertainty_check(pair.f, 1e-8).extremal:
                not_extremal += 1
    return violations == 0 and not_extremal == 0, \
        f"violations {violations}, non-extremal kernel functions {not_extremal}"


def _chebotarev(plan, config: RunConfig) -> Outcome:
    total = 0
    vanishing = []
    for p, size in plan:
        checked, zeros = chebotarev_scan(p, size, config)
        total += checked
        vanishing.extend(zeros)
    return not vanishing, f"{total} minors, {len(vanishing)} vanishing"


@registry.register("chebotarev_small", "supports")
def check_chebotarev_small(config: RunConfig) -> Outcome:
    """All minors for p <= 7, size <= 2 at p = 11, 13"""
    return _chebotarev([(3, 3), (5, 5), (7, 7), (11, 2), (13, 2)], config)


@registry.register("chebotarev", "supports", CheckLevel.FULL)
def check_chebotarev(config: RunConfig) -> Outcome:
    """All minors of size <= 4 at p = 11, 13; sampled minors of sizes 5 to 8 at p = 13"""
    return _chebotarev([(11, 4), (13, 8)], config)


# Biunimodular


@registry.register("biunimodular_families", "biunimodular")
def check_biunimodular_families(config: RunConfig) -> Outcome:
    """Every gaussian and Björck-Saffari translate is biunimodular, p = 5..13"""
    failures = []
    for p in (5, 7, 11, 13):
        ctx = GroupCtx.of(p)
        family = gaussian_family(ctx) + bjorck_saffari_translates(ctx)
        failures.extend((p, i) for i, f in enumerate(family)
                        if not is_biunimodular(f, tol=config.tol.predicate))
        for h in bjorck_saffari(ctx):
            if not dft(h.fn).allclose(h.expected_transform(), 1e-10):
                failures.append((p, "transform"))
    return not failures, f"failures {failures[:5]}"


def _hit_rates(report: BiunimodularReport) -> str:
    families = ", ".join(
        f"{tag} {report.counts.get(tag, 0)}/{size} (hits {report.hits.get(tag, 0)})"
        for tag, size in report.family_sizes.items()
    )
    return (f"{report.starts} unseeded starts, {report.converged} converged: {families}, "
            f"new {report.counts.get(NEW, 0)}, false new {report.false_new}")


@registry.register("biunimodular_search_p7", "biunimodular")
def check_biunimodular_search_p7(config: RunConfig) -> Outcome:
    """Unseeded search at p = 7 finds all 42 gaussians and 28 translates"""
    report = biunimodular_search(7, starts=BIUNIMODULAR_STARTS_P7, config=config)
    passed = (report.coverage(GAUSSIAN) == 1.0 and report.coverage(BJORCK_SAFFARI) == 1.0
              and report.false_new == 0)
    return passed, _hit_rates(report)


@registry.register("biunimodular_search_p11", "biunimodular", CheckLevel.FULL)
def check_biunimodular_search_p11(config: RunConfig) -> Outcome:
    """Unseeded search at p = 11 over the configured budget hits both families; new finds are certified"""
    report = biunimodular_search(11, config=config)
    passed = (report.counts.get(GAUSSIAN, 0) > 0 and report.counts.get(BJORCK_SAFFARI, 0) > 0
              and report.false_new == 0)
    return passed, _hit_rates(report)
