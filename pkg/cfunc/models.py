"""
Report models: the JSON surface of every toolkit operation
"""

from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field


class CycIntModel(BaseModel):
    """Cyclotomic integer in the power basis of Z[zeta_m]"""
    m: int = Field(..., description="Conductor")
    coeffs: List[int] = Field(..., description="Coefficients of 1, zeta, ..., zeta^(phi(m)-1)")


class JacobiReport(BaseModel):
    """Exact Jacobi sum J(omega^t1, omega^t2)"""
    p: int
    t1: int
    t2: int
    complex: Tuple[float, float] = Field(..., description="Value under zeta_m -> exp(2 pi i / m)")
    cycint: Optional[CycIntModel] = None


class RatioVerdict(str, Enum):
    """Whether J(conj chi1, chi2)/J(chi1, chi2) is a root of unity"""
    ROOT_OF_UNITY = "root_of_unity"
    NOT_ROOT_OF_UNITY = "not_root_of_unity"


class JacobiRatioClass(BaseModel):
    """Classification of one Jacobi sum ratio"""
    p: int
    t1: int
    t2: int
    order1: int
    order2: int
    verdict: RatioVerdict
    witness_k: Optional[int] = Field(None, description="k with ratio = zeta_{p-1}^k")
    case_label: Optional[str] = Field(None, description="Case a-g when the orders predict a root of unity")

    @property
    def consistent(self) -> bool:
        return (self.verdict == RatioVerdict.ROOT_OF_UNITY) == (self.case_label is not None)


class StickelbergerReduction(BaseModel):
    """Direct and binomial evaluation of J_{j,k} mod p"""
    p: int
    j: int
    k: int
    direct: int
    binomial: int
    agree: bool
    vanishes: bool
    predicted_vanishing: bool = Field(..., description="j + k >= p")


class GaussRatioReport(BaseModel):
    """Whether G(chi_0 chi)/G(chi) is a root of unity"""
    p: int
    t: int
    not_root_of_unity: bool
    method: str


class PairClass(BaseModel):
    """Equivalence data of a pair (j, k) mod d"""
    d: int
    j: int
    k: int
    representative: Optional[Tuple[int, int]] = None
    witness_x: Optional[int] = None
    witness_sign: Optional[int] = None
    exceptional_case: Optional[str] = None
    m: Optional[int] = None


class PairScan(BaseModel):
    """All pairs (j, k) mod d, exceptional ones listed"""
    d: int
    total_pairs: int
    exceptional: List[PairClass] = Field(default_factory=list)
    mismatches: List[PairClass] = Field(default_factory=list)
    families: Dict[str, int] = Field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return not self.mismatches


class RatioBridge(BaseModel):
    """Pair classes mod p - 1 against Jacobi ratios of (omega^-j, omega^-k)"""
    p: int
    pairs: int
    exceptional: int = Field(..., description="Pairs without a representative")
    root_of_unity: int = Field(..., description="Pairs whose ratio is a root of unity")
    legendre_pairs: List[Tuple[int, int]] = Field(
        default_factory=list,
        description="(m, m) with m = (p-1)/2: ratio 1 although (m, m) is its own representative",
    )
    mismatches: List[Tuple[int, int]] = Field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.mismatches


class TransversalityReport(BaseModel):
    """Criterion and numeric verdicts at one point of a Clifford torus"""
    p: int
    n: int
    c_exponent: Optional[int] = None
    chi_exponent: Optional[int] = None
    criterion_verdict: Optional[bool] = None
    numeric_verdict: Optional[bool] = None
    intersection_dim: Optional[int] = None
    offending_psi: List[int] = Field(default_factory=list)

    @property
    def agree(self) -> bool:
        if self.criterion_verdict is None or self.numeric_verdict is None:
            return True
        return self.criterion_verdict == self.numeric_verdict


class SetupChoice(BaseModel):
    """Subgroup and character chosen for a non-safe prime"""
    p: int
    safe_prime: bool
    branch: str
    n: Optional[int] = None
    d_c: Optional[int] = None
    c_exponent: Optional[int] = None


class AnisotropyReport(BaseModel):
    """Numerical evidence on the Hessian quadratic map Q"""
    p: int
    n: int
    trials: int
    min_norm: float = Field(..., description="Smallest |Q(beta)| found on the unit sphere")
    regular_fiber_count: int
    expected_fiber_count: int
    real_counts: Tuple[int, int] = Field(..., description="Real solutions of Q = w and Q = -w")
    first_derivative_norm: float = Field(..., description="Finite-difference |D Psi_0(0)|")
    legendre_multiplicity_note: str = ""


class PerturbationReport(BaseModel):
    """Real solution counts of Psi_t = 0 near 0 for small |t|"""
    p: int
    n: int
    w0_regular: bool
    times: List[float]
    total_counts: Dict[str, List[int]]
    real_counts: Dict[str, List[int]]
    max_norms: Dict[str, List[float]]
    bounded_sign: Optional[str] = Field(None, description="Sign with at most 2^(n-2) real solutions")


class SolutionTags(BaseModel):
    """Classification flags of one solution"""
    is_dirichlet: Optional[int] = Field(None, description="Exponent t when f = omega^t")
    is_unimodular: bool = False
    is_real_valued: bool = False
    is_singular: bool = False


class SolutionEntry(BaseModel):
    """One clustered endpoint (f, g) with multiplicity"""
    f: List[Tuple[float, float]]
    g: List[Tuple[float, float]]
    residual: float
    multiplicity: int
    tags: SolutionTags = Field(default_factory=SolutionTags)


class SolutionSet(BaseModel):
    """Clustered solutions of one continuation run"""
    d: int
    method: str
    seed: int
    total_paths: int
    diverged: int = 0
    failed: int = 0
    incomplete: bool = False
    waypoint_attempts: int = 1
    solutions: List[SolutionEntry] = Field(default_factory=list)

    @property
    def total_multiplicity(self) -> int:
        return sum(entry.multiplicity for entry in self.solutions)

    @property
    def unimodular_multiplicity(self) -> int:
        return sum(e.multiplicity for e in self.solutions if e.tags.is_unimodular)

    @property
    def dirichlet_count(self) -> int:
        return sum(1 for e in self.solutions if e.tags.is_dirichlet is not None)

    @property
    def balanced(self) -> bool:
        return self.total_multiplicity + self.diverged + self.failed == self.total_paths


class RealSolutionSplit(BaseModel):
    """Real-valued non-character solutions at p = 11, split by orbit"""
    p: int
    total: int
    cyclotomic_family: int = Field(..., description="real_cfunction_p11(a) and their inverses")
    other: int
    other_orbit_sizes: List[int] = Field(
        default_factory=list, description="Orbits of the others under x -> ux and f -> 1/f"
    )
    other_values_cyclotomic: Optional[bool] = Field(
        None, description="Whether the others' values are conjugate in Q(zeta_11)^+"
    )
    fourier_closed: bool = Field(..., description="Normalized transforms stay in each part")


class UncertaintyReport(BaseModel):
    """Support sizes of f and its transform"""
    p: int
    support_f: int
    support_transform: int
    holds: bool
    extremal: bool


class ChebotarevReport(BaseModel):
    """Square minor of the p-th root of unity matrix"""
    p: int
    rows: List[int]
    cols: List[int]
    determinant: Tuple[float, float]
    nonzero: bool


class BiunimodularEntry(BaseModel):
    """A converged biunimodular function with its family tag"""
    f: List[Tuple[float, float]]
    tag: str
    residual: float
    hits: int = 1


class BiunimodularReport(BaseModel):
    """Outcome of a phase-torus Newton search"""
    p: int
    seed: int
    starts: int
    seeded: bool = False
    converged: int
    found: List[BiunimodularEntry] = Field(default_factory=list)
    counts: Dict[str, int] = Field(default_factory=dict, description="Distinct functions per tag")
    hits: Dict[str, int] = Field(default_factory=dict, description="Converged starts per tag")
    family_sizes: Dict[str, int] = Field(default_factory=dict, description="Known functions per family tag")
    false_new: int = 0

    def coverage(self, tag: str) -> float:
        """Share of a known family that was found"""
        size = self.family_sizes.get(tag, 0)
        return self.counts.get(tag, 0) / size if size else 0.0


class CheckResult(BaseModel):
    """Outcome of one acceptance check"""
    name: str
    category: str
    passed: bool
    seconds: float
    detail: str = ""
