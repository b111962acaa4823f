"""
Exact cyclotomic arithmetic: Gauss and Jacobi sums in Z[zeta_m]

Elements are integer coefficient vectors in the power basis
1, zeta_m, ..., zeta_m^(phi(m)-1), reduced modulo the cyclotomic
polynomial. All verdicts here are exact; complex values are only reported.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import comb, gcd
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import structlog
from sympy import Poly, Symbol, divisors

from .errors import (
    ConductorMismatchError,
    ContextMismatchError,
    NotAUnitError,
    OutOfRangeError,
    PrincipalCharacterError,
)
from .group_fourier import DirichletChar, GroupCtx
from .models import (
    CycIntModel,
    GaussRatioReport,
    JacobiRatioClass,
    RatioVerdict,
    StickelbergerReduction,
)

logger = structlog.get_logger(__name__)

_X = Symbol("x")


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> Tuple[int, ...]:
    """Coefficients of Phi_m, constant term first, by exact division of x^m - 1"""
    if m < 1:
        raise OutOfRangeError(f"conductor must be positive, got {m}")
    quotient = Poly(_X ** m - 1, _X)
    for e in divisors(m)[:-1]:
        quotient = quotient.exquo(Poly(list(reversed(cyclotomic_polynomial(e))), _X))
    return tuple(int(c) for c in reversed(quotient.all_coeffs()))


def _reduce(m: int, raw: Sequence[int]) -> Tuple[int, ...]:
    """Fold exponents mod m, then reduce mod Phi_m"""
    folded = [0] * m
    for i, c in enumerate(raw):
        if c:
            folded[i % m] += int(c)
    phi = cyclotomic_polynomial(m)
    deg = len(phi) - 1
    for i in range(m - 1, deg - 1, -1):
        c = folded[i]
        if c:
            base = i - deg
            for j, a in enumerate(phi):
                if a:
                    folded[base + j] -= c * a
    return tuple(folded[:deg])


@dataclass(frozen=True)
class CycInt:
    """An element of Z[zeta_m]"""
    m: int
    coeffs: Tuple[int, ...]

    @classmethod
    def from_raw(cls, m: int, raw: Iterable[int]) -> "CycInt":
        """sum_i raw[i] zeta_m^i for any length of raw"""
        return cls(m, _reduce(m, list(raw)))

    @classmethod
    def zero(cls, m: int) -> "CycInt":
        return cls(m, (0,) * (len(cyclotomic_polynomial(m)) - 1))

    @classmethod
    def integer(cls, m: int, value: int) -> "CycInt":
        return cls.from_raw(m, [value])

    @classmethod
    def zeta(cls, m: int, k: int = 1) -> "CycInt":
        raw = [0] * m
        raw[k % m] = 1
        return cls.from_raw(m, raw)

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def _check(self, other: "CycInt") -> None:
        if other.m != self.m:
            raise ConductorMismatchError(f"conductors {self.m} and {other.m} differ")

    def __add__(self, other: Union["CycInt", int]) -> "CycInt":
        if isinstance(other, int):
            other = CycInt.integer(self.m, other)
        self._check(other)
        return CycInt(self.m, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> "CycInt":
        return CycInt(self.m, tuple(-a for a in self.coeffs))

    def __sub__(self, other: Union["CycInt", int]) -> "CycInt":
        if isinstance(other, int):
            other = CycInt.integer(self.m, other)
        return self + (-other)

    def __mul__(self, other: Union["CycInt", int]) -> "CycInt":
        if isinstance(other, int):
            return CycInt(self.m, tuple(a * other for a in self.coeffs))
        self._check(other)
        raw = [0] * self.m
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    raw[(i + j) % self.m] += a * b
        return CycInt.from_raw(self.m, raw)

    __rmul__ = __mul__

    def mul_zeta(self, k: int) -> "CycInt":
        """zeta_m^k * self"""
        raw = [0] * self.m
        for i, a in enumerate(self.coeffs):
            raw[(i + k) % self.m] += a
        return CycInt.from_raw(self.m, raw)

    def galois(self, a: int) -> "CycInt":
        """Image under zeta_m -> zeta_m^a"""
        if gcd(a, self.m) != 1:
            raise NotAUnitError(f"{a} is not a unit mod {self.m}")
        raw = [0] * self.m
        for i, c in enumerate(self.coeffs):
            raw[(a * i) % self.m] += c
        return CycInt.from_raw(self.m, raw)

    def conj(self) -> "CycInt":
        return self.galois(-1)

    def norm_squared(self) -> "CycInt":
        """self * conj(self), an element of the maximal real subring"""
        return self * self.conj()

    def lift(self, conductor: int) -> "CycInt":
        """The same number written in Z[zeta_M] for a multiple M of m"""
        if conductor % self.m:
            raise ConductorMismatchError(f"{self.m} does not divide {conductor}")
        step = conductor // self.m
        raw = [0] * conductor
        for i, c in enumerate(self.coeffs):
            raw[(i * step) % conductor] += c
        return CycInt.from_raw(conductor, raw)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_complex(self) -> complex:
        """Embedding zeta_m -> exp(2 pi i / m)"""
        powers = np.exp(2j * np.pi * np.arange(self.degree) / self.m)
        return complex(np.dot(np.array(self.coeffs, dtype=float), powers))

    def to_model(self) -> CycIntModel:
        return CycIntModel(m=self.m, coeffs=list(self.coeffs))

    @classmethod
    def from_model(cls, model: CycIntModel) -> "CycInt":
        element = cls(model.m, tuple(model.coeffs))
        if element.degree != len(cyclotomic_polynomial(model.m)) - 1:
            raise ConductorMismatchError("coefficient count does not match phi(m)")
        return element


def _check_same_prime(*chars: DirichletChar) -> int:
    primes = {chi.p for chi in chars}
    if len(primes) != 1:
        raise ContextMismatchError(f"characters modulo different primes: {sorted(primes)}")
    return primes.pop()


def gauss_conductor(p: int) -> int:
    return p * (p - 1)


def gauss_sum_exact(chi: DirichletChar) -> CycInt:
    """G(chi) = sum_x chi(x) zeta_p^x in Z[zeta_{p(p-1)}]"""
    if chi.is_principal:
        raise PrincipalCharacterError("Gauss sum of the principal character is not used")
    p = chi.p
    conductor = gauss_conductor(p)
    dlog = np.array([chi.ctx.dlog(x) for x in range(1, p)], dtype=np.int64)
    x = np.arange(1, p, dtype=np.int64)
    exps = (p * ((chi.t * dlog) % (p - 1)) + (p - 1) * x) % conductor
    counts = np.bincount(exps, minlength=conductor)
    return CycInt.from_raw(conductor, counts.tolist())


def jacobi_sum_exact(chi1: DirichletChar, chi2: DirichletChar) -> CycInt:
    """J(chi1, chi2) = sum_{x != 0, 1} chi1(x) chi2(1 - x) in Z[zeta_{p-1}]"""
    p = _check_same_prime(chi1, chi2)
    m = p - 1
    ctx = GroupCtx.of(p)
    exps = [
        (chi1.t * ctx.dlog(x) + chi2.t * ctx.dlog(1 - x)) % m
        for x in range(2, p)
    ]
    counts = np.bincount(np.array(exps, dtype=np.int64), minlength=m)
    return CycInt.from_raw(m, counts.tolist())


def gauss_jacobi_relation(chi1: DirichletChar, chi2: DirichletChar) -> bool:
    """G(chi1)G(chi2) = J(chi1,chi2)G(chi1 chi2), or J(chi, conj chi) = -chi(-1)"""
    p = _check_same_prime(chi1, chi2)
    product = chi1 * chi2
    jac = jacobi_sum_exact(chi1, chi2)
    if product.is_principal:
        return jac == CycInt.integer(p - 1, -chi1.parity)
    lhs = gauss_sum_exact(chi1) * gauss_sum_exact(chi2)
    rhs = jac.lift(gauss_conductor(p)) * gauss_sum_exact(product)
    return lhs == rhs


def _root_of_unity_witness(num: CycInt, den: CycInt) -> Optional[int]:
    """k with num = zeta_m^k den, or None"""
    if num.norm_squared() != den.norm_squared():
        return None
    for k in range(num.m):
        if den.mul_zeta(k) == num:
            return k
    return None


def ratio_case(chi1: DirichletChar, chi2: DirichletChar) -> Optional[str]:
    """
    Label a-g of the pairs whose Jacobi ratio is a root of unity.

    Case c needs chi1 = chi2^(+-2) on top of the orders (5, 10).
    """
    d1, d2 = chi1.order, chi2.order
    if d1 == 2:
        return "a"
    if (d1, d2) == (3, 6):
        return "b"
    if (d1, d2) == (5, 10) and chi1 in (chi2 ** 2, chi2 ** -2):
        return "c"
    if (d1, d2) == (4, 6):
        return "d"
    if (d1, d2) == (3, 4):
        return "e"
    if (d1, d2) == (5, 6):
        return "f"
    if (d1, d2) == (3, 10):
        return "g"
    return None


def ratio_is_root_of_unity(chi1: DirichletChar, chi2: DirichletChar) -> JacobiRatioClass:
    """Decide whether J(conj chi1, chi2) / J(chi1, chi2) is a root of unity"""
    p = _check_same_prime(chi1, chi2)
    if chi1.is_principal or chi2.is_principal:
        raise PrincipalCharacterError("both characters must be non-principal")
    num = jacobi_sum_exact(chi1.conj(), chi2)
    den = jacobi_sum_exact(chi1, chi2)
    k = _root_of_unity_witness(num, den)
    verdict = RatioVerdict.NOT_ROOT_OF_UNITY if k is None else RatioVerdict.ROOT_OF_UNITY
    return JacobiRatioClass(
        p=p, t1=chi1.t, t2=chi2.t,
        order1=chi1.order, order2=chi2.order,
        verdict=verdict, witness_k=k,
        case_label=ratio_case(chi1, chi2),
    )


def stickelberger_reduce(p: int, j: int, k: int) -> StickelbergerReduction:
    """J_{j,k} = sum_{x != 0,1} x^-j (1-x)^-k mod p, directly and as -C(j+k, k)"""
    GroupCtx.of(p).require_prime()
    if not (0 < j < p - 1 and 0 < k < p - 1):
        raise OutOfRangeError(f"need 0 < j, k < {p - 1}, got ({j}, {k})")
    direct = 0
    for x in range(2, p):
        direct += pow(x, p - 1 - j, p) * pow(1 - x, p - 1 - k, p)
    direct %= p
    binomial = (-comb(j + k, k)) % p
    return StickelbergerReduction(
        p=p, j=j, k=k, direct=direct, binomial=binomial,
        agree=direct == binomial, vanishes=direct == 0,
        predicted_vanishing=j + k >= p,
    )


def reduce_mod_prime_ideal(z: CycInt, p: int) -> int:
    """Image in F_p under zeta_{p-1} -> g0 (the ideal containing g0 - zeta)"""
    if z.m != p - 1:
        raise ConductorMismatchError(f"expected conductor {p - 1}, got {z.m}")
    g0 = GroupCtx.of(p).primitive_root
    value = 0
    for i, c in enumerate(z.coeffs):
        value += c * pow(g0, i, p)
    return value % p


def gauss_ratio_not_root_of_unity(chi: DirichletChar) -> GaussRatioReport:
    """Whether R(chi) = G(chi_0 chi)/G(chi) fails to be a root of unity"""
    p = chi.p
    chi0 = DirichletChar.legendre(p)
    if chi.is_principal or chi == chi0:
        # one of the two sums has modulus 1 and the other sqrt(p)
        return GaussRatioReport(p=p, t=chi.t, not_root_of_unity=True, method="modulus")

    ratio = ratio_is_root_of_unity(chi, chi0)
    if ratio.verdict == RatioVerdict.NOT_ROOT_OF_UNITY:
        return GaussRatioReport(p=p, t=chi.t, not_root_of_unity=True, method="jacobi")

    logger.warning("Jacobi test inconclusive, comparing Gauss sums", p=p, t=chi.t)
    k = _root_of_unity_witness(gauss_sum_exact(chi0 * chi), gauss_sum_exact(chi))
    return GaussRatioReport(p=p, t=chi.t, not_root_of_unity=k is None, method="gauss")

