"""
Run configuration: tolerances, tracker settings, seeding and output format
"""

import os
from enum import Enum
from typing import Any, Optional

import numpy as np
from dotenv import load_dotenv
from pydantic import BaseModel, Field

DEFAULT_SEED = 20240601

SEED_ENV = "CFUNC_SEED"
WORKERS_ENV = "CFUNC_WORKERS"
FORMAT_ENV = "CFUNC_FORMAT"
LOG_LEVEL_ENV = "CFUNC_LOG_LEVEL"


class OutputFormat(str, Enum):
    """Report output formats"""
    JSON = "json"
    CSV = "csv"
    TABLE = "table"


class Tolerances(BaseModel):
    """Numerical tolerances shared by predicates, rank tests and the solver"""
    predicate: float = Field(1e-10, gt=0, description="Predicate residual tolerance")
    rank: float = Field(1e-8, gt=0, description="Relative singular value cutoff")
    cluster: float = Field(1e-4, gt=0, description="Endpoint clustering radius")
    newton: float = Field(1e-12, gt=0, description="Newton step tolerance")
    residual: float = Field(1e-8, gt=0, description="Accepted endpoint residual")


class TrackerSettings(BaseModel):
    """Predictor-corrector settings"""
    min_step: float = Field(1e-12, gt=0, description="Smallest step in path parameter")
    max_step: float = Field(0.05, gt=0, description="Largest step in path parameter")
    initial_step: float = Field(0.01, gt=0, description="First step attempted")
    endgame_gap: float = Field(1e-6, ge=0, description="Paths stop at t = 1 - gap")
    corrector_iterations: int = Field(4, ge=1, description="Newton iterations per step")
    corrector_tol: float = Field(1e-9, gt=0, description="Relative corrector tolerance")
    refine_iterations: int = Field(100, ge=1, description="Endpoint Newton iterations")
    max_retries: int = Field(5, ge=0, description="Waypoint resamples on failure")
    divergence_norm: float = Field(1e8, gt=0, description="Norm at which a path diverges")
    max_steps: int = Field(50000, ge=1, description="Step budget per path segment")
    singular_condition: float = Field(1e7, gt=0, description="Condition number marking a singular endpoint")


class SearchBudget(BaseModel):
    """Start and sample counts of the multi-start searches"""
    anisotropy_starts: int = Field(10_000, ge=1, description="Sphere points minimized for min |Q|")
    anisotropy_steps: int = Field(200, ge=0, description="Batched descent steps per start")
    anisotropy_polish: int = Field(32, ge=0, description="Best starts refined by BFGS")
    biunimodular_starts: int = Field(100_000, ge=0, description="Random phase-torus starts")
    chebotarev_exhaustive: int = Field(600_000, ge=1, description="Largest minor count enumerated exhaustively")
    chebotarev_samples: int = Field(5_000, ge=1, description="Random minors per size above the exhaustive bound")


class RunConfig(BaseModel):
    """Configuration of one toolkit run"""
    seed: int = Field(DEFAULT_SEED, ge=0, lt=2**64, description="Global random seed")
    tol: Tolerances = Field(default_factory=Tolerances)
    tracker: TrackerSettings = Field(default_factory=TrackerSettings)
    budget: SearchBudget = Field(default_factory=SearchBudget)
    workers: int = Field(1, ge=1, description="Worker processes for path tracking")
    output_format: OutputFormat = Field(OutputFormat.JSON, description="Report format")

    @classmethod
    def from_env(cls, **overrides: Any) -> "RunConfig":
        """Build a config from .env / environment, then explicit overrides"""
        load_dotenv()
        values: dict = {}
        if os.getenv(SEED_ENV):
            values["seed"] = int(os.environ[SEED_ENV])
        if os.getenv(WORKERS_ENV):
            values["workers"] = int(os.environ[WORKERS_ENV])
        if os.getenv(FORMAT_ENV):
            values["output_format"] = os.environ[FORMAT_ENV]
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def rng(self, *keys: int) -> np.random.Generator:
        """Deterministic stream derived from the global seed and integer keys"""
        return np.random.default_rng(np.random.SeedSequence([self.seed, *keys]))

    def with_seed(self, seed: Optional[int]) -> "RunConfig":
        if seed is None:
            return self
        return self.model_copy(update={"seed": seed})
