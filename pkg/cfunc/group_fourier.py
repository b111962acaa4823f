"""
Functions on the cyclic group Z/dZ

Discrete Fourier transform, convolution, the C-function and
biunimodularity predicates, and the classical families living on a prime
field: Dirichlet characters, gaussians and Björck-Saffari functions.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np
import structlog
from sympy import isprime, primitive_root

from .errors import (
    ContextMismatchError,
    NotAUnitError,
    NotPrimeError,
    OutOfRangeError,
    ZeroFunctionError,
)

logger = structlog.get_logger(__name__)

Scalar = Union[int, float, complex]


@dataclass(frozen=True)
class GroupCtx:
    """The group Z/dZ, with primitive root data when d is prime"""
    d: int
    is_prime: bool
    primitive_root: Optional[int]

    @classmethod
    def of(cls, d: int) -> "GroupCtx":
        return _group_ctx(d)

    @property
    def half(self) -> int:
        """n = (d-1)/2, the dimension of the odd space for odd d"""
        return (self.d - 1) // 2

    def require_prime(self) -> None:
        if not self.is_prime:
            raise NotPrimeError(f"d = {self.d} is not prime")

    def dlog(self, x: int) -> int:
        """Discrete logarithm base the smallest primitive root"""
        self.require_prime()
        x %= self.d
        if x == 0:
            raise NotAUnitError("0 has no discrete logarithm")
        return int(_dlog_table(self.d)[x])

    def power(self, j: int) -> int:
        """g0^j mod p"""
        self.require_prime()
        return pow(self.primitive_root, j % (self.d - 1), self.d)

    def inverse(self, x: int) -> int:
        if gcd(x, self.d) != 1:
            raise NotAUnitError(f"{x} is not invertible mod {self.d}")
        return pow(x, -1, self.d)


@lru_cache(maxsize=None)
def _group_ctx(d: int) -> GroupCtx:
    if d < 3 or d % 2 == 0:
        raise OutOfRangeError(f"group order must be odd and at least 3, got {d}")
    prime = bool(isprime(d))
    root = int(primitive_root(d)) if prime else None
    return GroupCtx(d=d, is_prime=prime, primitive_root=root)


@lru_cache(maxsize=None)
def _dlog_table(p: int) -> np.ndarray:
    """dlog[x] for x in F_p^*, with dlog[0] = -1"""
    g0 = _group_ctx(p).primitive_root
    table = np.full(p, -1, dtype=np.int64)
    x = 1
    for j in range(p - 1):
        table[x] = j
        x = (x * g0) % p
    table.setflags(write=False)
    return table


def unity(d: int, k: int) -> complex:
    """exp(2 pi i k / d) with k reduced mod d first"""
    return complex(np.exp(2j * np.pi * (k % d) / d))


@lru_cache(maxsize=None)
def dft_matrix(d: int) -> np.ndarray:
    """Unitary DFT matrix, F[k, l] = exp(2 pi i k l / d) / sqrt(d)"""
    kl = np.outer(np.arange(d), np.arange(d)) % d
    matrix = np.exp(2j * np.pi * kl / d) / np.sqrt(d)
    matrix.setflags(write=False)
    return matrix


@lru_cache(maxsize=None)
def _difference_index(d: int) -> np.ndarray:
    idx = (np.arange(d)[:, None] - np.arange(d)[None, :]) % d
    idx.setflags(write=False)
    return idx


@lru_cache(maxsize=None)
def reversal_matrix(d: int) -> np.ndarray:
    """Permutation matrix of f -> f(-x)"""
    perm = np.zeros((d, d))
    perm[np.arange(d), (-np.arange(d)) % d] = 1.0
    perm.setflags(write=False)
    return perm


@dataclass(frozen=True, eq=False)
class CyclicFn:
    """A complex-valued function on Z/dZ"""
    ctx: GroupCtx
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex).reshape(-1)
        if vals.shape != (self.ctx.d,):
            raise ContextMismatchError(
                f"expected {self.ctx.d} values, got {vals.shape[0]}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_values(cls, values: Iterable[Scalar]) -> "CyclicFn":
        vals = np.asarray(list(values), dtype=complex)
        return cls(GroupCtx.of(len(vals)), vals)

    @classmethod
    def zeros(cls, ctx: GroupCtx) -> "CyclicFn":
        return cls(ctx, np.zeros(ctx.d, dtype=complex))

    @classmethod
    def delta(cls, ctx: GroupCtx, a: int = 0) -> "CyclicFn":
        vals = np.zeros(ctx.d, dtype=complex)
        vals[a % ctx.d] = 1.0
        return cls(ctx, vals)

    @classmethod
    def indicator(cls, ctx: GroupCtx, subset: Iterable[int]) -> "CyclicFn":
        vals = np.zeros(ctx.d, dtype=complex)
        for x in subset:
            vals[x % ctx.d] = 1.0
        return cls(ctx, vals)

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]]) -> "CyclicFn":
        return cls.from_values(complex(re, im) for re, im in pairs)

    @property
    def d(self) -> int:
        return self.ctx.d

    def __call__(self, x: int) -> complex:
        return complex(self.values[x % self.ctx.d])

    def _same_group(self, other: "CyclicFn") -> None:
        if other.ctx.d != self.ctx.d:
            raise ContextMismatchError(
                f"functions on Z/{self.ctx.d} and Z/{other.ctx.d} cannot be combined"
            )

    def __add__(self, other: "CyclicFn") -> "CyclicFn":
        self._same_group(other)
        return CyclicFn(self.ctx, self.values + other.values)

    def __sub__(self, other: "CyclicFn") -> "CyclicFn":
        self._same_group(other)
        return CyclicFn(self.ctx, self.values - other.values)

    def __neg__(self) -> "CyclicFn":
        return CyclicFn(self.ctx, -self.values)

    def __mul__(self, other: Union["CyclicFn", Scalar]) -> "CyclicFn":
        if isinstance(other, CyclicFn):
            self._same_group(other)
            return CyclicFn(self.ctx, self.values * other.values)
        return CyclicFn(self.ctx, self.values * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar: Scalar) -> "CyclicFn":
        return CyclicFn(self.ctx, self.values / complex(scalar))

    def conj(self) -> "CyclicFn":
        return CyclicFn(self.ctx, np.conj(self.values))

    def reflect(self) -> "CyclicFn":
        """x -> f(-x)"""
        return CyclicFn(self.ctx, self.values[(-np.arange(self.ctx.d)) % self.ctx.d])

    def translate(self, a: int) -> "CyclicFn":
        """x -> f(x - a)"""
        return CyclicFn(self.ctx, self.values[(np.arange(self.ctx.d) - a) % self.ctx.d])

    def dilate(self, u: int) -> "CyclicFn":
        """x -> f(u x) for a unit u"""
        self.ctx.inverse(u)
        return CyclicFn(self.ctx, self.values[(u * np.arange(self.ctx.d)) % self.ctx.d])

    def inverse_off_zero(self) -> "CyclicFn":
        """1/f on the nonzero residues, 0 at 0"""
        vals = np.zeros(self.ctx.d, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals[1:] = 1.0 / self.values[1:]
        return CyclicFn(self.ctx, vals)

    def support(self, tol: float = 1e-10) -> List[int]:
        return [int(x) for x in np.nonzero(np.abs(self.values) > tol)[0]]

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def normalized(self, at: int = 1) -> "CyclicFn":
        """f / f(at)"""
        pivot = self(at)
        if pivot == 0:
            raise ZeroFunctionError(f"cannot normalize at a zero of f (x = {at})")
        return self / pivot

    def allclose(self, other: "CyclicFn", tol: float = 1e-8) -> bool:
        self._same_group(other)
        return bool(np.max(np.abs(self.values - other.values)) <= tol)

    def to_pairs(self) -> List[List[float]]:
        return [[float(v.real), float(v.imag)] for v in self.values]

    def __repr__(self) -> str:
        return f"CyclicFn(d={self.ctx.d}, values={np.round(self.values, 6).tolist()})"


@dataclass(frozen=True)
class PredicateReport:
    """Verdict of a numerical predicate together with its residuals"""
    holds: bool
    residual: float
    transform_residual: float = 0.0
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.holds


def dft(f: CyclicFn) -> CyclicFn:
    """f^(k) = d^{-1/2} sum_l exp(2 pi i k l / d) f(l)"""
    return CyclicFn(f.ctx, dft_matrix(f.d) @ f.values)


def idft(f: CyclicFn) -> CyclicFn:
    return CyclicFn(f.ctx, np.conj(dft_matrix(f.d)) @ f.values)


def convolve(f: CyclicFn, g: CyclicFn) -> CyclicFn:
    """(f * g)(k) = sum_l f(k - l) g(l)"""
    f._same_group(g)
    return CyclicFn(f.ctx, f.values[_difference_index(f.d)] @ g.values)


def correlate(f: CyclicFn, g: CyclicFn) -> CyclicFn:
    """l -> sum_k f(k - l) conj(g(k))"""
    f._same_group(g)
    return CyclicFn(f.ctx, f.values[_difference_index(f.d).T] @ np.conj(g.values))


def is_c_function(f: CyclicFn, tol: float = 1e-10) -> PredicateReport:
    """
    Check sum_{k != 0} f(k - l) / f(k) = -1 for every l != 0.

    The transform form fg = 1, f^ . (g reflected)^ = 1 off 0 with g = 1/f
    is evaluated as a second residual; both must be within tol.
    """
    if abs(f(0)) > tol:
        return PredicateReport(False, abs(f(0)), reason="f(0) is not zero")
    nonzero = np.abs(f.values[1:])
    if np.any(nonzero <= tol):
        x = int(np.argmin(nonzero)) + 1
        return PredicateReport(False, float("inf"), reason=f"f vanishes at {x}")

    g = f.inverse_off_zero()
    sums = f.values[_difference_index(f.d).T] @ g.values
    residual = float(np.max(np.abs(sums[1:] + 1.0)))

    product = dft(f).values * dft(g.reflect()).values
    transform_residual = float(np.max(np.abs(product[1:] - 1.0)))

    holds = residual <= tol and transform_residual <= tol
    reason = None if holds else "autocorrelation condition fails"
    return PredicateReport(holds, residual, transform_residual, reason)


def is_biunimodular(f: CyclicFn, punctured: bool = False, tol: float = 1e-10) -> PredicateReport:
    """Unit modulus of f and f^ everywhere, or off 0 with zeros at 0 when punctured"""
    mod_f = np.abs(f.values)
    mod_t = np.abs(dft(f).values)
    if punctured:
        at_zero = max(mod_f[0], mod_t[0])
        if at_zero > tol:
            return PredicateReport(False, float(at_zero), reason="nonzero value at 0")
        residual = float(np.max(np.abs(mod_f[1:] - 1.0)))
        transform_residual = float(np.max(np.abs(mod_t[1:] - 1.0)))
    else:
        residual = float(np.max(np.abs(mod_f - 1.0)))
        transform_residual = float(np.max(np.abs(mod_t - 1.0)))
    holds = residual <= tol and transform_residual <= tol
    return PredicateReport(holds, residual, transform_residual,
                           None if holds else "modulus differs from 1")


def gaussian(ctx: GroupCtx, m: int, a: int = 0) -> CyclicFn:
    """g_{m,a}(x) = exp(2 pi i m (x - a)^2 / d)"""
    if gcd(m, ctx.d) != 1:
        raise NotAUnitError(f"m = {m} is not a unit mod {ctx.d}")
    x = np.arange(ctx.d, dtype=np.int64)
    exponents = (m * (x - a) ** 2) % ctx.d
    return CyclicFn(ctx, np.exp(2j * np.pi * exponents / ctx.d))


def gauss_sign(p: int) -> complex:
    """epsilon_p = G(chi_0)/sqrt(p): 1 for p = 1 mod 4, i for p = 3 mod 4"""
    ctx = GroupCtx.of(p)
    ctx.require_prime()
    if p == 2:
        raise OutOfRangeError("p must be odd")
    return 1.0 + 0j if p % 4 == 1 else 1j


def odd_basis_matrix(ctx: GroupCtx) -> np.ndarray:
    """Columns E_j = delta_j - delta_{-j}, j = 1..n"""
    if ctx.d % 2 == 0 or ctx.d < 3:
        raise OutOfRangeError(f"odd space needs odd d >= 3, got {ctx.d}")
    n = ctx.half
    basis = np.zeros((ctx.d, n), dtype=complex)
    for j in range(1, n + 1):
        basis[j, j - 1] = 1.0
        basis[ctx.d - j, j - 1] = -1.0
    return basis


def odd_basis(ctx: GroupCtx) -> List[CyclicFn]:
    """Basis E_1..E_n of the odd functions on Z/dZ"""
    basis = odd_basis_matrix(ctx)
    return [CyclicFn(ctx, basis[:, j]) for j in range(basis.shape[1])]


# Dirichlet characters


@lru_cache(maxsize=None)
def character_table(p: int) -> np.ndarray:
    """Row t holds the values of omega^t on F_p (0 at 0)"""
    ctx = GroupCtx.of(p)
    ctx.require_prime()
    dlog = _dlog_table(p)
    t = np.arange(p - 1)[:, None]
    exps = (t * dlog[None, 1:]) % (p - 1)
    table = np.zeros((p - 1, p), dtype=complex)
    table[:, 1:] = np.exp(2j * np.pi * exps / (p - 1))
    table.setflags(write=False)
    logger.debug("Built character table", p=p)
    return table


@dataclass(frozen=True)
class DirichletChar:
    """The character omega^t of F_p^*, extended by 0 at 0"""
    p: int
    t: int

    def __post_init__(self):
        GroupCtx.of(self.p).require_prime()
        if self.p == 2:
            raise OutOfRangeError("characters need an odd prime")
        object.__setattr__(self, "t", self.t % (self.p - 1))

    @classmethod
    def teichmuller(cls, p: int) -> "DirichletChar":
        return cls(p, 1)

    @classmethod
    def legendre(cls, p: int) -> "DirichletChar":
        return cls(p, (p - 1) // 2)

    @classmethod
    def principal(cls, p: int) -> "DirichletChar":
        return cls(p, 0)

    @classmethod
    def all(cls, p: int, include_principal: bool = False) -> List["DirichletChar"]:
        start = 0 if include_principal else 1
        return [cls(p, t) for t in range(start, p - 1)]

    @property
    def ctx(self) -> GroupCtx:
        return GroupCtx.of(self.p)

    @property
    def order(self) -> int:
        return (self.p - 1) // gcd(self.t, self.p - 1)

    @property
    def is_principal(self) -> bool:
        return self.t == 0

    @property
    def is_odd(self) -> bool:
        return self.t % 2 == 1

    @property
    def parity(self) -> int:
        """chi(-1)"""
        return -1 if self.is_odd else 1

    def exponent_at(self, x: int) -> int:
        """k with chi(x) = zeta_{p-1}^k"""
        return (self.t * self.ctx.dlog(x)) % (self.p - 1)

    def __call__(self, x: int) -> complex:
        return complex(character_table(self.p)[self.t, x % self.p])

    def values(self) -> CyclicFn:
        return CyclicFn(self.ctx, character_table(self.p)[self.t])

    def __mul__(self, other: "DirichletChar") -> "DirichletChar":
        if other.p != self.p:
            raise ContextMismatchError("characters modulo different primes")
        return DirichletChar(self.p, self.t + other.t)

    def __pow__(self, k: int) -> "DirichletChar":
        return DirichletChar(self.p, self.t * k)

    def conj(self) -> "DirichletChar":
        return DirichletChar(self.p, -self.t)


# Björck-Saffari functions


@dataclass(frozen=True)
class BjorckSaffari:
    """One (F_p^*)^2-invariant biunimodular function and its parameters"""
    fn: CyclicFn
    eps1: int
    eps2: int
    theta: float
    theta0: float

    def expected_transform(self) -> CyclicFn:
        """eps_p^{eps1} (e^{-i eps1 theta0} delta_0 + cos(theta) 1 + i eps1 eps2 sin(theta) chi_0)"""
        p = self.fn.d
        chi0 = DirichletChar.legendre(p).values().values
        vals = np.cos(self.theta) * (np.arange(p) != 0) + 1j * self.eps1 * self.eps2 * np.sin(self.theta) * chi0
        vals = vals.astype(complex)
        vals[0] = np.exp(-1j * self.eps1 * self.theta0)
        scale = gauss_sign(p) ** self.eps1
        return CyclicFn(self.fn.ctx, scale * vals)


def bjorck_saffari(ctx: GroupCtx) -> List[BjorckSaffari]:
    """
    The Björck-Saffari functions on F_p.

    p = 1 mod 4: h = delta_0 + cos(theta) 1_{F_p^*} + i eps sin(theta) chi_0,
    cos(theta) = 1/(1 + sqrt p); two functions.
    p = 3 mod 4: h = e^{i eps1 theta} delta_0 + cos(theta) 1_{F_p^*}
    + i eps2 sin(theta) chi_0, tan(theta) = sqrt p; four functions.
    """
    ctx.require_prime()
    p = ctx.d
    if p < 5:
        raise OutOfRangeError(f"Björck-Saffari functions need p >= 5, got {p}")
    chi0 = DirichletChar.legendre(p).values().values
    off_zero = (np.arange(p) != 0).astype(complex)

    if p % 4 == 1:
        theta = float(np.arccos(1.0 / (1.0 + np.sqrt(p))))
        signs = [(1, 1), (1, -1)]
        theta0 = 0.0
    else:
        theta = float(np.arctan(np.sqrt(p)))
        signs = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
        theta0 = theta

    family = []
    for eps1, eps2 in signs:
        vals = np.cos(theta) * off_zero + 1j * eps2 * np.sin(theta) * chi0
        vals[0] = np.exp(1j * eps1 * theta0)
        family.append(BjorckSaffari(CyclicFn(ctx, vals), eps1, eps2, theta, theta0))
    return family


def bjorck_saffari_translates(ctx: GroupCtx) -> List[CyclicFn]:
    """All translates x -> h(x - a) of the Björck-Saffari functions"""
    return [h.fn.translate(a) for h in bjorck_saffari(ctx) for a in range(ctx.d)]


def gaussian_family(ctx: GroupCtx) -> List[CyclicFn]:
    """The (p-1)p gaussians g_{m,a}, m a unit, a in F_p"""
    return [gaussian(ctx, m, a) for m in range(1, ctx.d) if gcd(m, ctx.d) == 1
            for a in range(ctx.d)]
