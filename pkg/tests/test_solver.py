"""
Tests for the fiber solver and the odd C-function counts
"""

from math import comb

import numpy as np
import pytest

from cfunc.equivariant_geometry import SubgroupChar, equivariant_space
from cfunc.errors import NotAUnitError, NotPrimeError, OutOfRangeError, SubspaceError
from cfunc.group_fourier import CyclicFn, DirichletChar, dft, is_c_function
from cfunc.models import SolutionEntry, SolutionSet, SolutionTags
from cfunc.solver import FiberProblem, PhiSystem, SolveMethod, solve_equivariant, solve_odd_cfunctions, start_fiber
from cfunc.solver.fiber import all_ones, coset_indicator, in_w1
from cfunc.solver.tracking import (
    entry_functions,
    random_waypoint,
    real_cfunction_p11,
    split_real_solutions,
    symmetry_orbit,
)


def summary(result):
    largest = max(e.multiplicity for e in result.solutions)
    return (result.total_multiplicity, largest, result.unimodular_multiplicity, result.dirichlet_count)


def same_solutions(a, b, tol=1e-6):
    right = [(e.multiplicity, np.array(e.f)) for e in b.solutions]
    if len(a.solutions) != len(right):
        return False
    for entry in a.solutions:
        values = np.array(entry.f)
        match = next((i for i, (m, f) in enumerate(right)
                      if m == entry.multiplicity and np.max(np.abs(f - values)) <= tol), None)
        if match is None:
            return False
        right.pop(match)
    return True


def test_phi_jacobian():
    """Test the analytic Jacobian of Phi against central differences"""
    phi = PhiSystem(equivariant_space(SubgroupChar.odd(11)))
    rng = np.random.default_rng(8)
    x = rng.normal(size=8) + 1j * rng.normal(size=8)
    target = all_ones(5)
    h = 1e-6
    numeric = np.column_stack([
        (phi.residual(x + h * e, target) - phi.residual(x - h * e, target)) / (2 * h) for e in np.eye(8)
    ])
    assert np.allclose(phi.jacobian(x), numeric, atol=1e-6)


def test_waypoint_in_w1():
    """Test random waypoints satisfy the normalization and equal sums"""
    rng = np.random.default_rng(1)
    for n in (3, 5, 6):
        assert in_w1(random_waypoint(n, rng))
    assert in_w1(coset_indicator(4)) and in_w1(all_ones(4))


def test_fiber_problem_rejects_bad_target():
    """Test a target outside W_1 is refused"""
    space = equivariant_space(SubgroupChar.odd(7))
    bad = (np.array([2.0, 1.0, 1.0], dtype=complex), np.ones(3, dtype=complex))
    with pytest.raises(SubspaceError):
        FiberProblem(space, bad, coset_indicator(3))


@pytest.mark.parametrize("p", [7, 11])
def test_start_fiber(p, config):
    """Test the explicit fiber over (1_H, 1_H) has C(2n-2, n-1) solutions supported on A"""
    space = equivariant_space(SubgroupChar.odd(p))
    pairs = start_fiber(space, config)
    n = space.n
    assert len(pairs) == comb(2 * n - 2, n - 1)
    assert len({(pair.A, pair.B) for pair in pairs}) == len(pairs)
    for pair in pairs:
        assert pair.residual < 1e-8
        assert len(pair.A) + len(pair.B) == n + 1
        lam = space.coordinates(pair.f)
        off = [i for i in range(n) if i not in pair.A]
        assert np.all(np.abs(lam[off]) < 1e-9)


def test_count_p7(config):
    """Test p = 7: 6 with multiplicity, a Legendre cluster of 4, three characters"""
    result = solve_odd_cfunctions(7, SolveMethod.LEMMA68, config)
    assert summary(result) == (6, 4, 6, 3)
    assert not result.incomplete
    assert all(is_c_function(entry_functions(e)[0], 1e-6) for e in result.solutions)
    legendre = next(e for e in result.solutions if e.multiplicity == 4)
    assert legendre.tags.is_dirichlet == 3
    assert legendre.tags.is_singular


def test_count_d9_total_degree(config):
    """Test d = 9 by total degree: 18 regular solutions, 12 unimodular"""
    result = solve_odd_cfunctions(9, SolveMethod.TOTAL_DEGREE, config)
    assert result.total_paths == 2 ** 6
    assert summary(result) == (18, 1, 12, 0)
    assert result.balanced


def test_methods_agree_p7(config):
    """Test start fiber and total degree reach the same solutions at p = 7"""
    a = solve_odd_cfunctions(7, SolveMethod.LEMMA68, config)
    b = solve_odd_cfunctions(7, SolveMethod.TOTAL_DEGREE, config)
    assert same_solutions(a, b)


@pytest.mark.parametrize("d", [4, 8, 2, 1])
def test_rejects_even_or_small(d):
    """Test only odd d >= 3 are solved"""
    with pytest.raises(OutOfRangeError):
        solve_odd_cfunctions(d)


@pytest.mark.parametrize("method", list(SolveMethod))
def test_count_d3(method, config):
    """Test d = 3: the odd line holds one solution, the Legendre character"""
    result = solve_odd_cfunctions(3, method, config)
    assert summary(result) == (1, 1, 1, 1)
    assert result.balanced and not result.incomplete
    entry = result.solutions[0]
    assert entry.tags.is_dirichlet == 1
    assert entry.tags.is_real_valued and not entry.tags.is_singular
    f, g = entry_functions(entry)
    assert f.allclose(DirichletChar(3, 1).values())
    assert is_c_function(f)
    assert (f * g).allclose(CyclicFn.from_values([0, 1, 1]))


def test_start_fiber_needs_prime():
    """Test the start-fiber route refuses composite d"""
    with pytest.raises(NotPrimeError):
        solve_odd_cfunctions(9, SolveMethod.LEMMA68)


@pytest.mark.parametrize("a", [1, 2, 3, 4, 5])
def test_real_cfunction_p11(a):
    """Test the real-valued family at p = 11 is odd, C-function and not a character"""
    f = real_cfunction_p11(a)
    assert np.allclose(f.values.imag, 0.0)
    assert f.reflect().allclose(-f)
    assert is_c_function(f, 1e-9)
    normalized = f * (1 / f(1))
    for chi in DirichletChar.all(11):
        assert not normalized.allclose(chi.values(), 1e-6)


def test_real_cfunction_needs_unit():
    """Test a = 0 mod 11 is rejected"""
    with pytest.raises(OutOfRangeError):
        real_cfunction_p11(22)


# f(1..5) of a real odd C-function on F_11 outside the cyclotomic family
OTHER_REAL_P11 = [1.0, 11.208082411442, -1.031251436021, 1.833696621678, 1.726191927609]


def odd_from_half(values):
    half = np.array(values)
    return CyclicFn.from_values(np.concatenate([[0.0], half, -half[::-1]]))


def real_solution_set(functions):
    real = SolutionTags(is_real_valued=True, is_unimodular=False)
    entries = [
        SolutionEntry(f=[(float(v.real), 0.0) for v in f.values],
                      g=[(float(v.real), 0.0) for v in f.inverse_off_zero().values],
                      residual=0.0, multiplicity=1, tags=real)
        for f in functions
    ]
    return SolutionSet(d=11, method="lemma68", seed=0, total_paths=len(entries), solutions=entries)


def test_dilate():
    """Test dilation by a unit permutes values and rejects non-units"""
    f = CyclicFn.from_values(range(7))
    assert f.dilate(3)(2) == 6
    assert f.dilate(3).dilate(5).allclose(f)
    with pytest.raises(NotAUnitError):
        CyclicFn.from_values(range(9)).dilate(3)


def test_cyclotomic_real_orbit():
    """Test the real family at p = 11 is one orbit of ten under dilation and inversion"""
    orbit = symmetry_orbit(real_cfunction_p11(1).normalized())
    assert len(orbit) == 10
    assert all(is_c_function(f, 1e-9) for f in orbit)
    for a in range(1, 6):
        f = real_cfunction_p11(a).normalized()
        assert any(f.allclose(g, 1e-8) for g in orbit)
        assert any(f.inverse_off_zero().normalized().allclose(g, 1e-8) for g in orbit)
    for f in orbit:
        image = dft(f).normalized()
        assert np.allclose(image.values.imag, 0.0, atol=1e-9)
        assert any(image.allclose(g, 1e-8) for g in orbit)


def test_other_real_orbit():
    """Test a second real C-function at p = 11 has its own orbit of ten"""
    f = odd_from_half(OTHER_REAL_P11)
    assert is_c_function(f, 1e-9)
    orbit = symmetry_orbit(f)
    family = symmetry_orbit(real_cfunction_p11(1).normalized())
    assert len(orbit) == 10
    assert all(is_c_function(g, 1e-8) for g in orbit)
    assert not any(g.allclose(h, 1e-6) for g in orbit for h in family)


def test_split_real_solutions():
    """Test the twenty real solutions split into the cyclotomic family and one other orbit"""
    family = symmetry_orbit(real_cfunction_p11(1).normalized())
    other = symmetry_orbit(odd_from_half(OTHER_REAL_P11))
    split = split_real_solutions(real_solution_set(family + other))
    assert (split.total, split.cyclotomic_family, split.other) == (20, 10, 10)
    assert split.other_orbit_sizes == [10]
    assert split.other_values_cyclotomic is False
    assert split.fourier_closed


def test_split_needs_p11():
    """Test the split refuses other primes"""
    result = SolutionSet(d=7, method="lemma68", seed=0, total_paths=0)
    with pytest.raises(OutOfRangeError):
        split_real_solutions(result)


@pytest.mark.slow
def test_count_p11(config):
    """Test p = 11: 70 with multiplicity, twenty real-valued non-characters in two orbits"""
    result = solve_odd_cfunctions(11, SolveMethod.LEMMA68, config)
    assert summary(result) == (70, 16, 30, 5)
    real = [e for e in result.solutions if e.tags.is_real_valued and e.tags.is_dirichlet is None]
    assert len(real) == 20
    assert all(is_c_function(entry_functions(e)[0], 1e-6) for e in real)
    functions = [entry_functions(e)[0] for e in result.solutions]
    for a in range(1, 6):
        target = real_cfunction_p11(a).normalized()
        assert any(g.allclose(target, 1e-6) for g in functions)
        assert any(g.allclose(target.inverse_off_zero().normalized(), 1e-6) for g in functions)
    split = split_real_solutions(result)
    assert (split.cyclotomic_family, split.other) == (10, 10)
    assert split.other_orbit_sizes == [10]
    assert split.other_values_cyclotomic is False
    assert split.fourier_closed
    other = odd_from_half(OTHER_REAL_P11)
    assert any(g.allclose(other, 1e-6) for g in functions)


@pytest.mark.slow
def test_count_p13(config):
    """Test p = 13: 252 regular solutions, six characters"""
    result = solve_odd_cfunctions(13, SolveMethod.LEMMA68, config)
    assert summary(result) == (252, 1, 60, 6)


@pytest.mark.slow
def test_methods_agree_p11(config):
    """Test start fiber and total degree reach the same solutions at p = 11"""
    a = solve_odd_cfunctions(11, SolveMethod.LEMMA68, config)
    b = solve_odd_cfunctions(11, SolveMethod.TOTAL_DEGREE, config)
    assert same_solutions(a, b)


@pytest.mark.slow
def test_solve_equivariant_p13(config):
    """Test a non-odd (H, c) at p = 13 tracks C(4, 2) start solutions"""
    result = solve_equivariant(SubgroupChar(13, 3, 1), config)
    assert result.total_paths == comb(4, 2)
    assert result.solutions
    assert all(is_c_function(entry_functions(e)[0], 1e-6) for e in result.solutions)
