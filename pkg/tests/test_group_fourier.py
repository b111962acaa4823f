"""
Tests for functions on Z/dZ, the predicates and the classical families
"""

import numpy as np
import pytest

from cfunc.errors import ContextMismatchError, NotAUnitError, NotPrimeError, OutOfRangeError, ZeroFunctionError
from cfunc.group_fourier import (
    CyclicFn,
    DirichletChar,
    GroupCtx,
    bjorck_saffari,
    bjorck_saffari_translates,
    convolve,
    correlate,
    dft,
    dft_matrix,
    gauss_sign,
    gaussian,
    gaussian_family,
    idft,
    is_biunimodular,
    is_c_function,
    odd_basis,
)


def random_fn(d: int, seed: int = 0) -> CyclicFn:
    rng = np.random.default_rng(seed)
    return CyclicFn(GroupCtx.of(d), rng.normal(size=d) + 1j * rng.normal(size=d))


def test_group_context():
    """Test primitive roots and discrete logs"""
    ctx = GroupCtx.of(7)
    assert ctx.is_prime and ctx.primitive_root == 3
    assert [ctx.power(j) for j in range(6)] == [1, 3, 2, 6, 4, 5]
    assert all(ctx.power(ctx.dlog(x)) == x for x in range(1, 7))
    assert GroupCtx.of(9).primitive_root is None
    with pytest.raises(NotPrimeError):
        GroupCtx.of(9).dlog(2)
    with pytest.raises(OutOfRangeError):
        GroupCtx.of(1)


@pytest.mark.parametrize("d", [2, 4, 12])
def test_even_order_rejected(d):
    """Test groups of even order are refused"""
    with pytest.raises(OutOfRangeError):
        GroupCtx.of(d)
    with pytest.raises(OutOfRangeError):
        CyclicFn.from_values(np.ones(d))


def test_dft_is_unitary():
    """Test the DFT matrix is unitary and idft inverts dft"""
    for d in (5, 9, 12):
        m = dft_matrix(d)
        assert np.allclose(m @ m.conj().T, np.eye(d))
    f = random_fn(9)
    assert idft(dft(f)).allclose(f, 1e-12)


def test_convolution_theorem():
    """Test the transform of a convolution is sqrt(d) times the product"""
    f, g = random_fn(11, 1), random_fn(11, 2)
    lhs = dft(convolve(f, g)).values
    rhs = np.sqrt(11) * dft(f).values * dft(g).values
    assert np.allclose(lhs, rhs)


def test_correlation_definition():
    """Test correlate against a direct double loop"""
    f, g = random_fn(7, 3), random_fn(7, 4)
    direct = [sum(f((k - l) % 7) * np.conj(g(k)) for k in range(7)) for l in range(7)]
    assert np.allclose(correlate(f, g).values, direct)


def test_mixed_groups_rejected():
    """Test operations between different groups fail"""
    with pytest.raises(ContextMismatchError):
        random_fn(5) + random_fn(7)
    with pytest.raises(ContextMismatchError):
        CyclicFn(GroupCtx.of(5), np.ones(4))


def test_normalize_at_zero_value():
    """Test normalizing at a zero of f"""
    f = CyclicFn.delta(GroupCtx.of(5), 0)
    with pytest.raises(ZeroFunctionError):
        f.normalized(1)


def test_odd_dirichlet_character_is_c_function():
    """Test an odd character mod 7 is a C-function and punctured biunimodular"""
    chi = DirichletChar.teichmuller(7).values()
    report = is_c_function(chi)
    assert report.holds
    assert report.residual < 1e-12 and report.transform_residual < 1e-12
    assert is_biunimodular(chi, punctured=True)


def test_c_function_rejections():
    """Test the reasons reported for non C-functions"""
    ctx = GroupCtx.of(5)
    report = is_c_function(gaussian(ctx, 1))
    assert not report.holds and report.reason == "f(0) is not zero"
    report = is_c_function(odd_basis(ctx)[0])
    assert not report.holds and "vanishes" in report.reason


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_unimodular_equivalence(p):
    """Test C-function and punctured biunimodularity agree on unimodular functions"""
    for chi in DirichletChar.all(p, include_principal=True):
        f = chi.values()
        assert bool(is_c_function(f)) == bool(is_biunimodular(f, punctured=True))
    assert not is_c_function(DirichletChar.principal(p).values())


def test_gaussians_are_biunimodular():
    """Test gaussians on C_5 and C_7"""
    assert is_biunimodular(gaussian(GroupCtx.of(5), 1, 0))
    report = is_biunimodular(gaussian(GroupCtx.of(7), 3, 2))
    assert max(report.residual, report.transform_residual) < 1e-12
    with pytest.raises(NotAUnitError):
        gaussian(GroupCtx.of(9), 3)


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_gaussian_transform_identity(p):
    """Test g^(x) = eps_p conj(g(x/2)) for the gaussian g(x) = e(x^2/p)"""
    ctx = GroupCtx.of(p)
    g = gaussian(ctx, 1)
    half = ctx.inverse(2)
    expected = [gauss_sign(p) * np.conj(g((x * half) % p)) for x in range(p)]
    assert np.allclose(dft(g).values, expected)


def test_gauss_sign():
    """Test eps_p is 1 or i by p mod 4"""
    assert gauss_sign(13) == 1
    assert gauss_sign(11) == 1j


@pytest.mark.parametrize("p, count", [(5, 2), (7, 4), (11, 4), (13, 2)])
def test_bjorck_saffari(p, count):
    """Test the Björck-Saffari functions and their transforms"""
    family = bjorck_saffari(GroupCtx.of(p))
    assert len(family) == count
    for h in family:
        assert is_biunimodular(h.fn, tol=1e-10)
        assert dft(h.fn).allclose(h.expected_transform(), 1e-10)
    translates = bjorck_saffari_translates(GroupCtx.of(p))
    assert len(translates) == count * p
    assert all(is_biunimodular(f, tol=1e-10) for f in translates)


def test_bjorck_saffari_needs_p_at_least_5():
    """Test small primes are rejected"""
    with pytest.raises(OutOfRangeError):
        bjorck_saffari(GroupCtx.of(3))


def test_gaussian_family_size():
    """Test (p-1)p gaussians, all biunimodular"""
    family = gaussian_family(GroupCtx.of(7))
    assert len(family) == 42
    assert all(is_biunimodular(g) for g in family)


def test_character_arithmetic():
    """Test products, powers and parity of characters"""
    chi = DirichletChar.teichmuller(11)
    assert (chi ** 5) == DirichletChar.legendre(11)
    assert (chi * chi.conj()).is_principal
    assert chi.order == 10 and (chi ** 2).order == 5
    assert chi.parity == -1 and (chi ** 2).parity == 1
    assert chi(-1 % 11) == pytest.approx(-1)
    assert chi(GroupCtx.of(11).primitive_root) == pytest.approx(np.exp(2j * np.pi / 10))
