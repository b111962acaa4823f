"""
Tests for equivariant spaces, transversality and the Hessian at the Legendre character
"""

import numpy as np
import pytest

from cfunc import equivariant_geometry
from cfunc.config import SearchBudget
from cfunc.errors import OutOfRangeError, PrincipalCharacterError, SubspaceError
from cfunc.equivariant_geometry import (
    HessianFiber,
    SubgroupChar,
    _anisotropy_gradient,
    _anisotropy_objective,
    all_subgroup_chars,
    certify_anisotropy,
    classify_setup,
    equivariant_space,
    full_space,
    hessian_Q,
    numeric_transversal_at,
    odd_space,
    perturbation_split,
    psi_map,
    nontransverse_family,
    tangent_coefficients,
    transversality_at,
    w0_basis,
)
from cfunc.group_fourier import CyclicFn, DirichletChar, GroupCtx, bjorck_saffari, dft, dft_matrix, gaussian_family


def test_subgroup_char_validation():
    """Test index, triviality and principal checks on (H, c)"""
    with pytest.raises(OutOfRangeError):
        SubgroupChar(7, 4, 1)
    with pytest.raises(OutOfRangeError):
        SubgroupChar(7, 6, 1)
    with pytest.raises(PrincipalCharacterError):
        SubgroupChar(13, 4, 3)


def test_odd_subgroup_char():
    """Test H = {1, -1} with the sign character"""
    sub = SubgroupChar.odd(7)
    assert sub.n == 3 and sub.order_h == 2
    assert sorted(sub.elements()) == [1, 6]
    assert sub(6) == pytest.approx(-1.0)
    assert sub.c_is_odd
    assert sorted(chi.t for chi in sub.extensions()) == [1, 3, 5]
    with pytest.raises(SubspaceError):
        sub(3)


@pytest.mark.parametrize("p", [7, 11, 13])
def test_space_contains_extensions(p):
    """Test every extension of c lies in V(H, c) and its transform in the dual space"""
    for sub in all_subgroup_chars(p):
        space = equivariant_space(sub)
        assert space.n == sub.n
        for chi in sub.extensions():
            f = chi.values()
            assert space.contains(f)
            assert space.dual().contains(dft(f))
        for psi in sub.trivial_on_h():
            assert not space.contains(psi.values())


def test_odd_space_basis():
    """Test the odd space holds exactly the odd functions"""
    ctx = GroupCtx.of(9)
    space = odd_space(ctx)
    assert space.n == 4
    odd = space.expand([1, 2j, -1, 0.5])
    assert odd.reflect().allclose(-odd)
    assert not space.contains(CyclicFn(ctx, np.eye(9)[1]))


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_transversality_verdicts_agree(p, config):
    """Test the Jacobi-sum criterion and the tangent rank agree at every character"""
    for sub in all_subgroup_chars(p):
        for chi in sub.extensions():
            assert transversality_at(chi, sub, config.tol.rank).agree


@pytest.mark.parametrize("p", [7, 11])
def test_legendre_not_transverse(p):
    """Test the Legendre character fails transversality in the odd space"""
    report = transversality_at(DirichletChar.legendre(p), SubgroupChar.odd(p))
    assert report.criterion_verdict is False
    assert report.numeric_verdict is False
    assert report.intersection_dim > 0


def test_gaussian_transverse():
    """Test a gaussian is a transverse point of the full torus"""
    ctx = GroupCtx.of(7)
    g0 = gaussian_family(ctx)[0]
    assert numeric_transversal_at(g0).numeric_verdict
    assert numeric_transversal_at(g0, dft_matrix(7), space=full_space(ctx)).numeric_verdict


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_bjorck_saffari_transverse(p):
    """Test every Björck-Saffari function is a transverse point of the full torus"""
    for h in bjorck_saffari(GroupCtx.of(p)):
        report = numeric_transversal_at(h.fn)
        assert report.numeric_verdict
        assert report.intersection_dim == 0


def test_identity_transform_not_transverse():
    """Test the torus meets itself along its whole tangent space"""
    ctx = GroupCtx.of(7)
    report = numeric_transversal_at(gaussian_family(ctx)[0], np.eye(7))
    assert report.numeric_verdict is False
    assert report.intersection_dim == 6


def test_transform_must_be_unitary():
    """Test a non-unitary or wrongly sized transform is refused"""
    g0 = gaussian_family(GroupCtx.of(7))[0]
    with pytest.raises(SubspaceError):
        numeric_transversal_at(g0, 2 * np.eye(7))
    with pytest.raises(SubspaceError):
        numeric_transversal_at(g0, np.eye(5))


def test_transversality_needs_extension():
    """Test a character not extending c is rejected"""
    with pytest.raises(SubspaceError):
        transversality_at(DirichletChar(7, 2), SubgroupChar.odd(7))


@pytest.mark.parametrize("p, n", [(13, 3), (13, 4), (19, 3)])
def test_tangent_coefficients(p, n):
    """Test numeric coefficients against both Gauss and Jacobi expressions"""
    sub = SubgroupChar(p, n, 1)
    for chi in sub.extensions():
        for _, numeric, via_gauss, via_jacobi in tangent_coefficients(chi, sub):
            assert abs(numeric - via_gauss) < 1e-9
            assert abs(numeric - via_jacobi) < 1e-9


@pytest.mark.parametrize("d_c, n, label", [
    (2, 3, "i"), (2, 6, "ii"), (3, 4, "iii"), (3, 10, "iii"), (5, 6, "iv"), (4, 3, None), (3, 12, None),
])
def test_nontransverse_family(d_c, n, label):
    """Test the exceptional (d_c, n) families"""
    assert nontransverse_family(d_c, n) == label


def test_classify_setup():
    """Test the subgroup choice for safe and non-safe primes"""
    assert classify_setup(11).safe_prime
    assert classify_setup(23).branch == "safe_prime"
    choice = classify_setup(13)
    assert (choice.n, choice.d_c, choice.branch) == (3, 4, "odd_prime_factor")
    choice = classify_setup(17)
    assert (choice.n, choice.d_c, choice.branch) == (4, 4, "power_of_two")
    with pytest.raises(OutOfRangeError):
        classify_setup(7)


def test_classify_setup_refuses_exceptional_family(monkeypatch):
    """Test a setup landing in a non-transverse family raises"""
    monkeypatch.setattr(equivariant_geometry, "nontransverse_family", lambda d_c, n: "iii")
    with pytest.raises(SubspaceError):
        classify_setup(13)
    assert classify_setup(23).safe_prime


def test_hessian_q_domain():
    """Test Q rejects functions outside W_0 and primes with an even Legendre symbol"""
    ctx = GroupCtx.of(7)
    with pytest.raises(SubspaceError):
        hessian_Q(7, CyclicFn(ctx, np.eye(7)[1]))
    with pytest.raises(OutOfRangeError):
        hessian_Q(5, CyclicFn(GroupCtx.of(5), np.zeros(5)))


def test_hessian_q_is_quadratic():
    """Test Q(2 beta) = 4 Q(beta) on W_0"""
    ctx = GroupCtx.of(11)
    beta = CyclicFn(ctx, w0_basis(11) @ np.array([0.3, -1.2, 0.7, 0.1]))
    assert hessian_Q(11, beta * 2).allclose(hessian_Q(11, beta) * 4)


def random_w0(p, seed):
    z = np.random.default_rng(seed).normal(size=(p - 3) // 2)
    return CyclicFn(GroupCtx.of(p), w0_basis(p) @ (z / np.linalg.norm(z)))


def in_w0(f, tol=1e-9):
    scale = max(1.0, f.norm())
    return (abs(f(0)) < tol * scale and abs(f.values.sum()) < tol * scale
            and f.allclose(f.reflect(), tol * scale))


@pytest.mark.parametrize("p", [7, 11, 19])
def test_hessian_q_closure(p):
    """Test Q and Psi_0 map W_0 into W_0 and Q(i beta) = -Q(beta)"""
    beta = random_w0(p, p)
    assert in_w0(beta)
    q = hessian_Q(p, beta)
    assert in_w0(q)
    assert in_w0(CyclicFn(beta.ctx, psi_map(p, 0.7 * beta.values)))
    assert hessian_Q(p, beta * 1j).allclose(-q, 1e-12)


@pytest.mark.parametrize("p", [7, 11])
def test_psi_second_order(p):
    """Test Psi_0(eps beta) = eps^2 Q(beta) + o(eps^2)"""
    beta = random_w0(p, 2 * p)
    q = hessian_Q(p, beta).values
    remainders = [
        np.linalg.norm(psi_map(p, eps * beta.values) - eps ** 2 * q) / eps ** 2 for eps in (1e-2, 1e-3)
    ]
    assert np.linalg.norm(q) > 1e-3
    assert remainders[0] < 1e-2 * np.linalg.norm(q)
    assert remainders[1] < remainders[0] / 20


def test_anisotropy_gradient():
    """Test the batched analytic gradient of |Q|^2 / |z|^4 against central differences"""
    basis, chi0 = w0_basis(11), DirichletChar.legendre(11).values().values
    rng = np.random.default_rng(4)
    z = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    values, grad = _anisotropy_gradient(basis, chi0, z)
    assert np.allclose(values, _anisotropy_objective(basis, chi0, z))
    h = 1e-6
    for k in range(4):
        e = np.eye(4)[k]
        dx = (_anisotropy_objective(basis, chi0, z + h * e) - _anisotropy_objective(basis, chi0, z - h * e)) / (2 * h)
        dy = (_anisotropy_objective(basis, chi0, z + 1j * h * e)
              - _anisotropy_objective(basis, chi0, z - 1j * h * e)) / (2 * h)
        assert np.allclose(grad[:, k], dx + 1j * dy, atol=1e-6)


def test_hessian_fiber_jacobian():
    """Test the analytic Jacobian of Q - w against central differences"""
    rng = np.random.default_rng(3)
    system = HessianFiber(11, np.zeros(4))
    z = rng.normal(size=4) + 1j * rng.normal(size=4)
    h = 1e-6
    numeric = np.column_stack([
        (system.residual(z + h * e) - system.residual(z - h * e)) / (2 * h) for e in np.eye(4)
    ])
    assert np.allclose(system.jacobian(z), numeric, atol=1e-6)


def test_certify_anisotropy_p7(config):
    """Test Q at p = 7: four regular solutions, no small values on the sphere"""
    report = certify_anisotropy(7, config, trials=2000, polish=8)
    assert report.regular_fiber_count == report.expected_fiber_count == 4
    assert report.min_norm > 1e-2
    assert report.first_derivative_norm < 1e-6
    assert sum(report.real_counts) <= 4


def test_anisotropy_starts_from_config(config):
    """Test the start count defaults to the config budget and every start is minimized"""
    assert config.budget.anisotropy_starts == 10_000
    small = config.model_copy(update={"budget": SearchBudget(anisotropy_starts=50, anisotropy_polish=0)})
    report = certify_anisotropy(7, small)
    assert report.trials == 50
    assert report.min_norm > 1e-2
    with pytest.raises(OutOfRangeError):
        certify_anisotropy(7, config, trials=0)


@pytest.mark.slow
def test_perturbation_split_p7(config):
    """Test one sign of t keeps at most 2^(n-2) real solutions"""
    report = perturbation_split(7, config)
    assert report.w0_regular
    assert set(report.total_counts) == {"+", "-"}
    assert report.bounded_sign in ("+", "-")
