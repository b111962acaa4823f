"""
Equivariant subspaces, Clifford tori and local geometry at characters

Covers the (H, c)-equivariant spaces V_{H,c}, the transversality of the
torus T_{H,c} with the preimage of T_{H,conj c} under the Fourier
transform (criterion via exact Jacobi sums and numeric tangent ranks), the
choice of (H, c) for non-safe primes, and the Hessian map Q at the
Legendre character with its anisotropy and perturbation analysis.
"""

from dataclasses import dataclass
from math import gcd
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy.linalg import expm, null_space
from scipy.optimize import minimize
from sympy import isprime, primefactors

from .config import RunConfig
from .continuation import (
    Homotopy,
    PathStatus,
    SquareSystem,
    TotalDegreeHomotopy,
    cluster_points,
    condition_number,
    refine,
    track_path,
)
from .cyclotomic_sums import gauss_sum_exact, jacobi_sum_exact
from .errors import (
    NotPrimeError,
    OffTorusError,
    OutOfRangeError,
    PrincipalCharacterError,
    SubspaceError,
)
from .group_fourier import (
    CyclicFn,
    DirichletChar,
    GroupCtx,
    _difference_index,
    dft,
    dft_matrix,
    odd_basis_matrix,
)
from .models import (
    AnisotropyReport,
    PerturbationReport,
    SetupChoice,
    TransversalityReport,
)

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class SubgroupChar:
    """Index-n subgroup H = <g0^n> of F_p^* with the character c(g0^n) = e^{2 pi i c / #H}"""
    p: int
    n: int
    c_exponent: int

    def __post_init__(self):
        GroupCtx.of(self.p).require_prime()
        if self.n < 2 or (self.p - 1) % self.n:
            raise OutOfRangeError(f"index {self.n} does not divide p - 1 = {self.p - 1}")
        order = (self.p - 1) // self.n
        if order < 2:
            raise OutOfRangeError("H is trivial, no non-trivial character")
        c = self.c_exponent % order
        if c == 0:
            raise PrincipalCharacterError("c must be non-trivial on H")
        object.__setattr__(self, "c_exponent", c)

    @classmethod
    def odd(cls, p: int) -> "SubgroupChar":
        """H = {1, -1} with c(-1) = -1"""
        return cls(p, (p - 1) // 2, 1)

    @property
    def order_h(self) -> int:
        return (self.p - 1) // self.n

    @property
    def d_c(self) -> int:
        """Order of c"""
        return self.order_h // gcd(self.c_exponent, self.order_h)

    @property
    def contains_minus_one(self) -> bool:
        return self.order_h % 2 == 0

    @property
    def c_is_odd(self) -> bool:
        return self.contains_minus_one and self.c_exponent % 2 == 1

    def elements(self) -> List[int]:
        h0 = GroupCtx.of(self.p).power(self.n)
        return [pow(h0, j, self.p) for j in range(self.order_h)]

    def __call__(self, h: int) -> complex:
        e = GroupCtx.of(self.p).dlog(h)
        if e % self.n:
            raise SubspaceError(f"{h} is not in H")
        return complex(np.exp(2j * np.pi * self.c_exponent * (e // self.n) / self.order_h))

    def conj(self) -> "SubgroupChar":
        return SubgroupChar(self.p, self.n, -self.c_exponent)

    def extends(self, chi: DirichletChar) -> bool:
        return chi.p == self.p and chi.t % self.order_h == self.c_exponent

    def extensions(self) -> List[DirichletChar]:
        """The n Dirichlet characters restricting to c on H"""
        return [DirichletChar(self.p, self.c_exponent + self.order_h * s) for s in range(self.n)]

    def trivial_on_h(self) -> List[DirichletChar]:
        """Non-trivial characters of F_p^*/H"""
        return [DirichletChar(self.p, self.order_h * s) for s in range(1, self.n)]


@dataclass(frozen=True, eq=False)
class EquivariantSpace:
    """
    A subspace of functions on Z/dZ with a basis of coset functions.

    basis[:, i] is supported on the i-th coset and equals 1 at reps[i];
    conj_basis spans the space holding the Fourier transforms.
    neg_index[i] is the coset of -reps[i].
    """
    ctx: GroupCtx
    reps: Tuple[int, ...]
    basis: np.ndarray
    conj_basis: np.ndarray
    neg_index: Tuple[int, ...]
    label: str
    sub: Optional[SubgroupChar] = None

    @property
    def n(self) -> int:
        return len(self.reps)

    def expand(self, coords: Sequence[complex]) -> CyclicFn:
        return CyclicFn(self.ctx, self.basis @ np.asarray(coords, dtype=complex))

    def expand_conj(self, coords: Sequence[complex]) -> CyclicFn:
        return CyclicFn(self.ctx, self.conj_basis @ np.asarray(coords, dtype=complex))

    def coordinates(self, f: CyclicFn) -> np.ndarray:
        return np.array(f.values[list(self.reps)])

    def contains(self, f: CyclicFn, tol: float = 1e-8) -> bool:
        return self.expand(self.coordinates(f)).allclose(f, tol * max(1.0, f.norm()))

    def dual(self) -> "EquivariantSpace":
        """The space containing the Fourier transforms of this one"""
        sub = self.sub.conj() if self.sub is not None else None
        return EquivariantSpace(self.ctx, self.reps, self.conj_basis, self.basis,
                                self.neg_index, self.label + "*", sub)


def equivariant_space(sub: SubgroupChar) -> EquivariantSpace:
    """V_{H,c} with coset representatives g0^i, i = 0..n-1"""
    ctx = GroupCtx.of(sub.p)
    p, n = sub.p, sub.n
    basis = np.zeros((p, n), dtype=complex)
    for x in range(1, p):
        e = ctx.dlog(x)
        basis[x, e % n] = np.exp(2j * np.pi * sub.c_exponent * (e // n) / sub.order_h)
    reps = tuple(ctx.power(i) for i in range(n))
    neg = tuple((i + (p - 1) // 2) % n for i in range(n))
    return EquivariantSpace(ctx, reps, basis, np.conj(basis), neg,
                            f"V(p={p}, n={n}, c={sub.c_exponent})", sub)


def odd_space(ctx: GroupCtx) -> EquivariantSpace:
    """Odd functions on Z/dZ in the basis E_j = delta_j - delta_{-j}"""
    basis = odd_basis_matrix(ctx)
    n = basis.shape[1]
    return EquivariantSpace(ctx, tuple(range(1, n + 1)), basis, basis,
                            tuple(range(n)), f"odd(d={ctx.d})")


def full_space(ctx: GroupCtx) -> EquivariantSpace:
    """All functions on Z/dZ in the basis of point masses"""
    d = ctx.d
    eye = np.eye(d, dtype=complex)
    return EquivariantSpace(ctx, tuple(range(d)), eye, eye,
                            tuple((-x) % d for x in range(d)), f"full(d={d})")


# Transversality


def _torus_coordinates(space: EquivariantSpace, f: CyclicFn, tol: float) -> np.ndarray:
    if not space.contains(f, max(tol, 1e-8)):
        raise SubspaceError(f"function is not in {space.label}")
    coords = space.coordinates(f)
    moduli = np.abs(coords)
    if moduli[0] == 0 or np.max(np.abs(moduli - moduli[0])) > tol * moduli[0]:
        raise OffTorusError(f"coordinates of unequal modulus in {space.label}")
    return coords


def tangent_intersection_dim(f: CyclicFn, space: EquivariantSpace, tol: float = 1e-8,
                             transform: Optional[np.ndarray] = None) -> int:
    """
    Real dimension of T_f(torus) meeting T_f(F^-1 torus) inside P(space).

    F is the unitary DFT unless transform is given; a given transform must
    map space onto space.dual().

    Chart: lambda_i -> lambda_i (1 + v_i) for i >= 1, lambda_0 fixed. The
    source torus is Re v = 0; the target torus asks the relative change of
    every transform coordinate to have the same real part.
    """
    n = space.n
    if n == 1:
        return 0
    target = space.dual()
    lam = _torus_coordinates(space, f, tol)
    matrix = _unitary(transform, space.ctx.d, tol)
    image = (matrix @ space.basis)[list(target.reps), :]
    mu = image @ lam
    mu_mod = np.abs(mu)
    if mu_mod[0] == 0 or np.max(np.abs(mu_mod - mu_mod[0])) > tol * mu_mod[0]:
        raise OffTorusError("Fourier transform is off the target torus")

    kernel = (image * lam[None, :])[:, 1:]
    relative = (np.conj(mu)[:, None] * kernel) / mu_mod[0] ** 2
    rows = relative[1:] - relative[0]

    m = n - 1
    jac = np.zeros((2 * m, 2 * m))
    jac[:m, :m] = np.eye(m)
    jac[m:, :m] = rows.real
    jac[m:, m:] = -rows.imag
    s = np.linalg.svd(jac, compute_uv=False)
    rank = int(np.sum(s > tol * s[0]))
    return 2 * m - rank


def _unitary(transform: Optional[np.ndarray], d: int, tol: float) -> np.ndarray:
    if transform is None:
        return dft_matrix(d)
    matrix = np.asarray(transform, dtype=complex)
    if matrix.shape != (d, d) or not np.allclose(matrix.conj().T @ matrix, np.eye(d), atol=max(tol, 1e-10)):
        raise SubspaceError(f"transform must be a unitary {d} x {d} matrix")
    return matrix


def numeric_transversal_at(point: CyclicFn, transform: Optional[np.ndarray] = None, tol: float = 1e-8,
                           space: Optional[EquivariantSpace] = None) -> TransversalityReport:
    """
    Transversality at point from the rank of the joint tangent conditions.

    transform defaults to the unitary DFT, space to all functions on the
    group of point.
    """
    space = full_space(point.ctx) if space is None else space
    dim = tangent_intersection_dim(point, space, tol, transform)
    sub = space.sub
    return TransversalityReport(
        p=space.ctx.d, n=space.n,
        c_exponent=sub.c_exponent if sub else None,
        numeric_verdict=dim == 0, intersection_dim=dim,
    )


def criterion_transversal_at(chi: DirichletChar, sub: SubgroupChar) -> TransversalityReport:
    """Transverse iff J(chi, psi) != psi(-1) J(conj chi, psi) for every non-trivial psi trivial on H"""
    if not sub.extends(chi):
        raise SubspaceError(f"omega^{chi.t} does not extend c on H")
    offending = []
    for psi in sub.trivial_on_h():
        lhs = jacobi_sum_exact(chi, psi)
        rhs = jacobi_sum_exact(chi.conj(), psi) * psi.parity
        if lhs == rhs:
            offending.append(psi.t)
    return TransversalityReport(
        p=sub.p, n=sub.n, c_exponent=sub.c_exponent, chi_exponent=chi.t,
        criterion_verdict=not offending, offending_psi=offending,
    )


def transversality_at(chi: DirichletChar, sub: SubgroupChar, tol: float = 1e-8) -> TransversalityReport:
    """Criterion and numeric verdict at a character extending c"""
    report = criterion_transversal_at(chi, sub)
    space = equivariant_space(sub)
    dim = tangent_intersection_dim(chi.values(), space, tol)
    report.numeric_verdict = dim == 0
    report.intersection_dim = dim
    if not report.agree:
        logger.error("Transversality verdicts disagree", p=sub.p, n=sub.n,
                     c=sub.c_exponent, t=chi.t, dim=dim)
    return report


def tangent_coefficients(chi: DirichletChar, sub: SubgroupChar) -> List[Tuple[int, complex, complex, complex]]:
    """
    For each psi trivial on H: (psi exponent, numeric alpha, G(chi psi)/G(chi), G(psi)/J(chi, psi)).

    alpha_psi is the coefficient of conj(psi) in the transform of
    (1 + a psi) chi, relative to that of chi.
    """
    if not sub.extends(chi):
        raise SubspaceError(f"omega^{chi.t} does not extend c on H")
    base = dft(chi.values())(1)
    gauss_chi = gauss_sum_exact(chi).to_complex()
    rows = []
    for psi in sub.trivial_on_h():
        numeric = dft((chi * psi).values())(1) / base
        via_gauss = gauss_sum_exact(chi * psi).to_complex() / gauss_chi
        via_jacobi = gauss_sum_exact(psi).to_complex() / jacobi_sum_exact(chi, psi).to_complex()
        rows.append((psi.t, numeric, via_gauss, via_jacobi))
    return rows


def all_subgroup_chars(p: int) -> List[SubgroupChar]:
    """Every (H, c) with H proper of index n >= 2 and c non-trivial"""
    result = []
    for n in range(2, p - 1):
        if (p - 1) % n:
            continue
        order = (p - 1) // n
        result.extend(SubgroupChar(p, n, c) for c in range(1, order))
    return result


# Choice of (H, c) for non-safe primes


def nontransverse_family(d_c: int, n: int) -> Optional[str]:
    """Label i-iv of the (d_c, n) families where some character fails to be transverse"""
    if d_c == 2 and n % 2 == 1:
        return "i"
    if d_c == 2 and n % 12 == 6:
        return "ii"
    if d_c == 3 and (n % 4 == 0 or n % 10 == 0) and gcd(n, 3) == 1:
        return "iii"
    if d_c == 5 and n % 6 == 0 and gcd(n, 5) == 1:
        return "iv"
    return None


def classify_setup(p: int) -> SetupChoice:
    """
    Pick H of index n and c of order (p-1)/n for a non-safe prime p >= 11.

    n is the smallest odd prime factor of p - 1 when there is one, else 4.
    """
    if not isprime(p):
        raise NotPrimeError(f"{p} is not prime")
    if p < 11:
        raise OutOfRangeError(f"setup classification starts at p = 11, got {p}")
    half = (p - 1) // 2
    if isprime(half):
        return SetupChoice(p=p, safe_prime=True, branch="safe_prime")

    odd_factors = [q for q in primefactors(p - 1) if q != 2]
    if odd_factors:
        n, branch = odd_factors[0], "odd_prime_factor"
    else:
        n, branch = 4, "power_of_two"
    sub = SubgroupChar(p, n, 1)
    if not (sub.contains_minus_one and sub.c_is_odd):
        raise SubspaceError(f"chosen H for p = {p} does not give an odd c")
    family = nontransverse_family(sub.d_c, n)
    if family is not None:
        raise SubspaceError(f"setup for p = {p} (n = {n}, d_c = {sub.d_c}) falls in non-transverse family {family}")
    return SetupChoice(p=p, safe_prime=False, branch=branch, n=n,
                       d_c=sub.d_c, c_exponent=sub.c_exponent)


# Hessian at the Legendre character


def _require_legendre_odd(p: int) -> None:
    GroupCtx.of(p).require_prime()
    if p % 4 != 3:
        raise OutOfRangeError(f"the Legendre character is odd only for p = 3 mod 4, got {p}")


def w0_basis(p: int) -> np.ndarray:
    """Real orthonormal basis (p x (n-1)) of even beta with beta(0) = 0 and sum beta = 0"""
    ctx = GroupCtx.of(p)
    n = ctx.half
    even = np.zeros((p, n))
    for j in range(1, n + 1):
        even[j, j - 1] = even[p - j, j - 1] = 1 / np.sqrt(2)
    return even @ null_space(np.ones((1, n)))


def _legendre(p: int) -> np.ndarray:
    return DirichletChar.legendre(p).values().values


def _conv_matrix(a: np.ndarray) -> np.ndarray:
    """C with (C b)(k) = sum_l a(k - l) b(l)"""
    return a[_difference_index(len(a))]


def _batch_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.fft.ifft(np.fft.fft(a, axis=-1) * np.fft.fft(b, axis=-1), axis=-1)


def hessian_Q(p: int, beta: CyclicFn, tol: float = 1e-10) -> CyclicFn:
    """Q(beta) = chi0 beta * chi0 beta - chi0 * chi0 beta^2 on W_0"""
    _require_legendre_odd(p)
    vals = beta.values
    scale = max(1.0, beta.norm())
    if (abs(vals[0]) > tol * scale or abs(vals.sum()) > tol * scale
            or np.max(np.abs(vals - beta.reflect().values)) > tol * scale):
        raise SubspaceError("beta must be even with beta(0) = 0 and zero mean")
    chi0 = _legendre(p)
    a = chi0 * vals
    q = _conv_matrix(a) @ a - _conv_matrix(chi0) @ (chi0 * vals * vals)
    return CyclicFn(beta.ctx, q)


def psi_map(p: int, beta: np.ndarray, operator: Optional[np.ndarray] = None) -> np.ndarray:
    """Psi(beta) = U(chi0 e^{i beta}) * U(chi0 e^{-i beta}) - chi0 * chi0"""
    chi0 = _legendre(p)
    plus = chi0 * np.exp(1j * beta)
    minus = chi0 * np.exp(-1j * beta)
    if operator is not None:
        plus, minus = operator @ plus, operator @ minus
    return _conv_matrix(plus) @ minus - _conv_matrix(chi0) @ chi0


class HessianFiber(SquareSystem):
    """Q(z) - w in coordinates of W_0"""

    def __init__(self, p: int, w: np.ndarray):
        self.p = p
        self.basis = w0_basis(p)
        self.chi0 = _legendre(p)
        self.w = np.asarray(w, dtype=complex)

    def value(self, z: np.ndarray) -> np.ndarray:
        beta = self.basis @ z
        a = self.chi0 * beta
        q = _conv_matrix(a) @ a - _conv_matrix(self.chi0) @ (self.chi0 * beta * beta)
        return self.basis.T @ q

    def residual(self, z):
        return self.value(z) - self.w

    def jacobian(self, z):
        beta = self.basis @ z
        a = self.chi0 * beta
        first = 2 * _conv_matrix(a) @ (self.chi0[:, None] * self.basis)
        second = 2 * _conv_matrix(self.chi0) @ ((self.chi0 * beta)[:, None] * self.basis)
        return self.basis.T @ (first - second)


def _is_real(z: np.ndarray, tol: float = 1e-8) -> bool:
    return bool(np.max(np.abs(z.imag)) <= tol * (1.0 + np.max(np.abs(z))))


def _solve_total_degree(system: SquareSystem, m: int, config: RunConfig, *keys: int) -> List[np.ndarray]:
    """Distinct regular solutions of system via 2^m total-degree paths"""
    rng = config.rng(*keys)
    r = rng.normal(size=m) + 1j * rng.normal(size=m)
    gamma = np.exp(2j * np.pi * rng.random())
    homotopy = TotalDegreeHomotopy(system, r, gamma)
    settings = config.tracker
    t_end = 1.0 - settings.endgame_gap
    endpoints = []
    for start in homotopy.start_points():
        result = track_path(homotopy, start, 0.0, t_end, settings)
        if result.status != PathStatus.SUCCESS:
            continue
        x = refine(system, result.x, settings.refine_iterations, config.tol.newton)
        if np.linalg.norm(system.residual(x)) <= config.tol.residual:
            endpoints.append(x)
    solutions = []
    for cluster in cluster_points(endpoints, config.tol.cluster):
        x = endpoints[cluster[0]]
        if len(cluster) == 1 and condition_number(system, x) < settings.singular_condition:
            solutions.append(x)
    return solutions


def _batch_q(basis: np.ndarray, chi0: np.ndarray, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    beta = z @ basis.T
    a = chi0 * beta
    q = _batch_convolve(a, a) - _batch_convolve(np.broadcast_to(chi0, a.shape), chi0 * beta * beta)
    return beta, a, q


def _anisotropy_objective(basis: np.ndarray, chi0: np.ndarray, z: np.ndarray) -> np.ndarray:
    """|Q(z)|^2 / |z|^4 for a batch of coordinate rows"""
    q = _batch_q(basis, chi0, z)[2]
    return np.sum(np.abs(q) ** 2, axis=-1) / np.sum(np.abs(z) ** 2, axis=-1) ** 2


def _anisotropy_gradient(basis: np.ndarray, chi0: np.ndarray,
                         z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Objective and its gradient for a batch of coordinate rows.

    The gradient is packed as d/dRe z + i d/dIm z. Q is holomorphic in z,
    so d|Q|^2 packs to 2 J^H Q with J the complex Jacobian.
    """
    beta, a, q = _batch_q(basis, chi0, z)
    chi = np.broadcast_to(chi0, a.shape)
    norms = np.sum(np.abs(z) ** 2, axis=-1)
    size = np.sum(np.abs(q) ** 2, axis=-1)
    pull = np.empty(z.shape, dtype=complex)
    for k in range(basis.shape[1]):
        column = chi0 * basis[:, k]
        jk = 2 * _batch_convolve(a, np.broadcast_to(column, a.shape)) - 2 * _batch_convolve(chi, column * beta)
        pull[:, k] = np.sum(np.conj(jk) * q, axis=-1)
    grad = 2 * pull / norms[:, None] ** 2 - 4 * (size / norms ** 3)[:, None] * z
    return size / norms ** 2, grad


def _descend(basis: np.ndarray, chi0: np.ndarray, z: np.ndarray, steps: int) -> Tuple[np.ndarray, np.ndarray]:
    """Batched gradient descent on the unit sphere, one adaptive step length per row"""
    z = z / np.linalg.norm(z, axis=1, keepdims=True)
    values, grad = _anisotropy_gradient(basis, chi0, z)
    step = np.full(len(z), 0.1)
    for _ in range(steps):
        trial = z - step[:, None] * grad
        trial /= np.linalg.norm(trial, axis=1, keepdims=True)
        trial_values, trial_grad = _anisotropy_gradient(basis, chi0, trial)
        better = trial_values < values
        z[better], values[better], grad[better] = trial[better], trial_values[better], trial_grad[better]
        step = np.where(better, step * 1.5, step * 0.5)
    return z, values


def certify_anisotropy(p: int, config: RunConfig, trials: Optional[int] = None,
                       polish: Optional[int] = None) -> AnisotropyReport:
    """
    Numerical evidence that Q has no nonzero complex zero.

    Minimizes |Q|^2 / |beta|^4 from trials random starts on the unit sphere
    of W_0 (default config.budget.anisotropy_starts), refines the best with
    BFGS, counts a regular fiber of Q by continuation, counts real
    solutions of Q = +-w for real w, and checks D Psi_0(0) = 0 by finite
    differences.
    """
    _require_legendre_odd(p)
    budget = config.budget
    trials = budget.anisotropy_starts if trials is None else trials
    polish = budget.anisotropy_polish if polish is None else polish
    if trials < 1:
        raise OutOfRangeError(f"need at least one start, got {trials}")
    n = GroupCtx.of(p).half
    m = n - 1
    basis = w0_basis(p)
    chi0 = _legendre(p)
    rng = config.rng(p, 1)

    samples = rng.normal(size=(trials, m)) + 1j * rng.normal(size=(trials, m))
    samples, values = _descend(basis, chi0, samples, budget.anisotropy_steps)
    best = float(values.min())
    for index in np.argsort(values)[:polish]:
        x0 = np.concatenate([samples[index].real, samples[index].imag])
        res = minimize(
            lambda x: float(_anisotropy_objective(basis, chi0, (x[:m] + 1j * x[m:])[None, :])[0]),
            x0, method="BFGS",
        )
        best = min(best, float(res.fun))
    min_norm = float(np.sqrt(best))
    logger.info("Anisotropy minimization done", p=p, trials=trials, min_norm=min_norm)

    w = rng.normal(size=m) + 1j * rng.normal(size=m)
    regular = _solve_total_degree(HessianFiber(p, w), m, config, p, 2)

    w_real = rng.normal(size=m)
    real_solutions = _solve_total_degree(HessianFiber(p, w_real), m, config, p, 3)
    plus = sum(1 for z in real_solutions if _is_real(z))
    minus = sum(1 for z in real_solutions if _is_real(1j * z))

    h = 1e-4
    derivative = 0.0
    for k in range(m):
        direction = basis[:, k]
        diff = (psi_map(p, h * direction) - psi_map(p, -h * direction)) / (2 * h)
        derivative = max(derivative, float(np.linalg.norm(diff)))

    note = ""
    if 2 ** (n - 1) != 2 ** ((p - 1) // 2):
        note = (f"Legendre multiplicity taken as 2^(n-1) = {2 ** (n - 1)}; "
                f"the value 2^((p-1)/2) = {2 ** ((p - 1) // 2)} is not used")

    return AnisotropyReport(
        p=p, n=n, trials=trials, min_norm=min_norm,
        regular_fiber_count=len(regular), expected_fiber_count=2 ** m,
        real_counts=(plus, minus), first_derivative_norm=derivative,
        legendre_multiplicity_note=note,
    )


class _BlowUpHomotopy(Homotopy):
    """Psi_{sign s^2}(s B v)/s^2 with s running from s_lo to s_hi"""

    def __init__(self, p: int, generator: np.ndarray, odd: np.ndarray, sign: int,
                 s_lo: float, s_hi: float):
        self.p = p
        self.basis = w0_basis(p)
        self.chi0 = _legendre(p)
        self.generator = generator
        self.odd = odd
        self.sign = sign
        self.s_lo = s_lo
        self.s_hi = s_hi

    def _s(self, tau: float) -> float:
        return self.s_lo + tau * (self.s_hi - self.s_lo)

    def operator(self, s: float) -> np.ndarray:
        p = self.p
        rotation = expm(self.sign * s * s * self.generator)
        return self.odd @ rotation @ self.odd.T + (np.eye(p) - self.odd @ self.odd.T)

    def system(self, s: float) -> "_FixedBlowUp":
        return _FixedBlowUp(self, s)

    def residual(self, v, tau):
        return self.system(self._s(tau)).residual(v)

    def jacobian(self, v, tau):
        return self.system(self._s(tau)).jacobian(v)


class _FixedBlowUp(SquareSystem):
    def __init__(self, family: _BlowUpHomotopy, s: float):
        self.family = family
        self.s = s
        self.op = family.operator(s)

    def residual(self, v):
        fam, s = self.family, self.s
        beta = fam.basis @ v
        return fam.basis.T @ psi_map(fam.p, s * beta, self.op) / (s * s)

    def jacobian(self, v):
        fam, s = self.family, self.s
        beta = s * (fam.basis @ v)
        plus = fam.chi0 * np.exp(1j * beta)
        minus = fam.chi0 * np.exp(-1j * beta)
        u_plus, u_minus = self.op @ plus, self.op @ minus
        d_plus = self.op @ (1j * plus[:, None] * fam.basis)
        d_minus = self.op @ (-1j * minus[:, None] * fam.basis)
        columns = _conv_matrix(u_minus) @ d_plus + _conv_matrix(u_plus) @ d_minus
        return fam.basis.T @ columns / s


def perturbation_split(p: int, config: RunConfig,
                       times: Sequence[float] = (1e-2, 4e-3, 1e-3)) -> PerturbationReport:
    """
    Solutions of Psi_t = 0 near 0 for t = +-times, Psi_t built from e^{t X0}.

    With beta = s v and t = +-s^2 the equation becomes Q(v) = +-w0 + O(s),
    w0 = -2 (X0 chi0) * chi0; each of the 2^(n-1) solutions at s = 0 is
    continued to s = sqrt(t).
    """
    _require_legendre_odd(p)
    ctx = GroupCtx.of(p)
    n = ctx.half
    m = n - 1
    basis = w0_basis(p)
    chi0 = _legendre(p)
    odd = odd_basis_matrix(ctx).real / np.sqrt(2)

    generator = w0 = None
    start: List[np.ndarray] = []
    for attempt in range(config.tracker.max_retries + 1):
        rng = config.rng(p, 4, attempt)
        a = rng.normal(size=(n, n))
        generator = a - a.T
        moved = odd @ generator @ odd.T @ chi0
        w0_full = -2 * (_conv_matrix(moved) @ chi0)
        w0 = basis.T @ w0_full
        if np.linalg.norm(basis @ w0 - w0_full) > 1e-8 * max(1.0, np.linalg.norm(w0_full)):
            raise SubspaceError("w0 left W_0")
        start = _solve_total_degree(HessianFiber(p, w0), m, config, p, 5, attempt)
        if len(start) == 2 ** m:
            break
        logger.warning("w0 not regular, resampling", p=p, attempt=attempt, found=len(start))
    regular = len(start) == 2 ** m

    report = PerturbationReport(p=p, n=n, w0_regular=regular, times=list(times),
                                total_counts={}, real_counts={}, max_norms={})
    for sign, key in ((1, "+"), (-1, "-")):
        seeds = start if sign == 1 else [1j * z for z in start]
        totals, reals, norms = [], [], []
        for t in times:
            s_hi = float(np.sqrt(t))
            s_lo = 0.05 * s_hi
            homotopy = _BlowUpHomotopy(p, generator, odd, sign, s_lo, s_hi)
            low = homotopy.system(s_lo)
            betas = []
            for v0 in seeds:
                v = refine(low, v0, 20, config.tol.newton)
                result = track_path(homotopy, v, 0.0, 1.0, config.tracker)
                if result.status != PathStatus.SUCCESS:
                    continue
                top = homotopy.system(s_hi)
                v = refine(top, result.x, 20, config.tol.newton)
                if np.linalg.norm(top.residual(v)) <= config.tol.residual:
                    betas.append(s_hi * (basis @ v))
            distinct = [betas[c[0]] for c in cluster_points(betas, config.tol.cluster * s_hi)]
            totals.append(len(distinct))
            reals.append(sum(1 for b in distinct if _is_real(b)))
            norms.append(max((float(np.linalg.norm(b)) for b in distinct), default=0.0))
        report.total_counts[key] = totals
        report.real_counts[key] = reals
        report.max_norms[key] = norms

    bound = 2 ** (n - 2)
    for key in ("+", "-"):
        if report.real_counts[key][-1] <= bound:
            report.bounded_sign = key
            break
    return report
