"""
Pydantic schemas for family parameters, experiment configs and reports.
"""
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from dynamics.precision import Precision


class Family(str, Enum):
    """Generators for eps-sequences."""
    CONSTANT = 'Constant'
    ALPHA_FORM = 'AlphaForm'
    EXAMPLE1 = 'Example1'
    EXAMPLE2 = 'Example2'
    EXAMPLE3 = 'Example3'
    THEOREM5_LINEAR = 'Theorem5Linear'
    THEOREM7_BAND = 'Theorem7Band'
    COUNTEREXAMPLE = 'Counterexample'
    CUSTOM = 'Custom'


class Command(str, Enum):
    COMPOSE = 'compose'
    CHECK = 'check'
    RATE = 'rate'
    COUNTEREXAMPLE = 'counterexample'
    IDENTITIES = 'identities'
    PLANAR = 'planar'
    BASELINE = 'baseline'
    REDUCTION = 'reduction'
    VALIDATE = 'validate'


class OutputFormat(str, Enum):
    CSV = 'csv'
    STRUCTURED = 'structured-text'


# Family parameters

class FamilyParams(BaseModel):
    """Family-specific parameters; unused fields stay None."""
    model_config = ConfigDict(frozen=True, extra='forbid')

    m: Optional[int] = Field(None, ge=0, description="Example1: N = 2m+1, Example2: N = 4m+2")
    A: Optional[float] = Field(None, description="Theorem5Linear slope constant")
    C: Optional[float] = Field(None, gt=0, description="Theorem7Band half-width constant, eps_k in pi/N +- C/N^3")
    seed: Optional[int] = Field(None, ge=0, description="Theorem7Band random seed")
    alpha_coeffs: Optional[List[float]] = Field(None, description="AlphaForm: alpha(k) = sum_j c_j (2k/N - 1)^j")
    tail: float = Field(0.0, description="AlphaForm: coefficient of the 1/N^3 term")
    values: Optional[List[float]] = Field(None, description="Custom: explicit eps_1..eps_N")


class GridSpec(BaseModel):
    """Compact set K sampled on a square grid intersected with a disk."""
    model_config = ConfigDict(frozen=True, extra='forbid')

    center: complex = Field(0j, description="Disk center")
    radius: float = Field(0.5, gt=0, description="Disk radius")
    points_per_side: int = Field(10, ge=1, description="Grid points per side of the bounding square")


# Reports

class ConditionReport(BaseModel):
    """Convergence-condition quantities for one sequence."""
    family: Family
    N: int
    precision: Precision
    S: float = Field(..., ge=0, description="|sum a_k U_k^2|")
    S_angle: float = Field(..., ge=0, description="|sum (pi^2/N^2 - eps_k^2) U_k^2|")
    S_difference: float = Field(..., description="S - S_angle")
    S_scaled: float = Field(..., description="N * S")
    band: float = Field(..., ge=0, description="max_k N^3 |a_k|")
    band_angle: float = Field(..., ge=0, description="max_k N^3 |pi^2/N^2 - eps_k^2|")
    alpha_pairing: Optional[float] = Field(None, ge=0, description="max_k N |alpha(k) + alpha(N-k)|")
    A_threshold: float = Field(..., gt=0)
    verdict_S: bool
    verdict_band: bool


class ReductionReport(BaseModel):
    """Convergence conditions across an N schedule."""
    family: Family
    params: FamilyParams
    Ns: List[int]
    S_scaled: List[float]
    band: List[float]
    alpha_pairing: List[Optional[float]]
    A_threshold: float
    max_S_scaled: float
    max_band: float
    S_scaled_ratio: float = Field(..., description="max/min of N*S over the schedule")
    passes: bool


class CompositionReport(BaseModel):
    """One composed F_N and its distances."""
    family: Family
    N: int
    precision: Precision
    a: float
    b: float
    c: float
    d: float
    determinant_drift: float = Field(..., ge=0, description="|det F_N - 1|")
    map_error: float = Field(..., ge=0, description="sup-grid |F_N(z) - z|")
    matrix_error: float = Field(..., ge=0, description="entrywise distance from -I")
    two_path_deviation: float = Field(..., ge=0, description="relative gap to the recurrence entries")


class ConvergenceReport(BaseModel):
    """Sup-grid distance of F_N from the identity across N."""
    family: Family
    params: FamilyParams
    precision: Precision
    grid: GridSpec
    Ns: List[int]
    errs: List[float]
    scaled: List[float]
    running_slope: List[Optional[float]]
    matrix_errs: List[float] = Field(..., description="entrywise distance of F_N from -I")
    fit_slope: Optional[float]
    fit_C: float
    C_ratio: float = Field(..., description="max/min of N*err")

    @model_validator(mode='after')
    def _check_lengths(self):
        n = len(self.Ns)
        if not (len(self.errs) == len(self.scaled) == len(self.running_slope) == len(self.matrix_errs) == n):
            raise ValueError("Ns, errs, scaled, running_slope and matrix_errs must have equal length")
        if any(s > self.fit_C for s in self.scaled):
            raise ValueError("fit_C must dominate N*err for every N")
        return self


class CounterexampleReport(BaseModel):
    """Distance of F_N from the identity and from its limit z/(1+z)."""
    precision: Precision
    grid: GridSpec
    Ns: List[int]
    identity_errs: List[float]
    limit_errs: List[float]
    limit_scaled: List[float]
    limit_C: float
    limit_C_ratio: float
    identity_lower_bound: float = Field(..., description="max over grid of |z^2/(1+z)| minus limit_C/N at the largest N")
    condition_reports: List[ConditionReport]


class IdentityReport(BaseModel):
    """Structural identity suite for one sequence."""
    family: Family
    N: int
    precision: Precision
    entries_deviation: float
    entries_tolerance: float
    shift_residual: float
    wronskian_residual: float
    nevai_ratio: float
    nevai_worst_n: int
    lemma4_C: float
    lemma4_max_dev: float
    lemma4_holds: bool
    lemma5_eps: float
    lemma5_max_dev: float
    lemma5_holds: bool
    pN_abs: float
    pN1_plus1_abs: float
    ptildeN_abs: float
    ptildeN1_minus1_abs: float
    passed: bool


class PlanarOrbitReport(BaseModel):
    """Deviation of the skew-product orbit from (z, 0)."""
    map_name: str
    coupling: float
    z: complex
    w: complex
    multiplier: int
    basin_flag: bool
    basin_status: str
    n_values: List[int]
    pre_iterates: List[int]
    orbit_lengths: List[int]
    dev_z: List[float]
    dev_w: List[float]
    deviations: List[float]

    @model_validator(mode='after')
    def _check_lengths(self):
        n = len(self.n_values)
        if not all(len(v) == n for v in (self.pre_iterates, self.orbit_lengths, self.dev_z, self.dev_w, self.deviations)):
            raise ValueError("orbit report columns must have equal length")
        return self


# Experiment configuration

class ExperimentConfig(BaseModel):
    """One runnable experiment; round-trips through the key=value file format."""
    model_config = ConfigDict(extra='forbid')

    command: Command = Field(..., description="Which experiment to run")
    family: Optional[Family] = Field(None, description="Sequence family")
    params: FamilyParams = Field(default_factory=FamilyParams, description="Family parameters")
    precision: Precision = Field(Precision.STANDARD, description="std or ext")
    seed: Optional[int] = Field(None, ge=0, description="Seed for randomized families")
    N: Optional[int] = Field(None, ge=1, description="Single sequence length")
    Ns: Optional[List[int]] = Field(None, description="Schedule of sequence lengths")
    n_values: Optional[List[int]] = Field(None, description="Planar: values of n")
    multiplier: Optional[int] = Field(None, ge=1, description="Planar: iterate-count multiplier, defaults to 1 for H and 2 for L")
    planar_map: str = Field('H', description="Planar: H or L")
    z: complex = Field(0.1 + 0j, description="Planar: starting z")
    w: complex = Field(0.05 + 0j, description="Planar: starting w")
    offset: float = Field(0.0, description="Baseline: eps = pi/(N + offset)")
    form: str = Field('angle', description="Baseline: angle or chord")
    A_threshold: Optional[float] = Field(None, gt=0, description="Bound A for N*S and the band")
    grid: GridSpec = Field(default_factory=GridSpec, description="Evaluation grid")
    output_path: Optional[str] = Field(None, description="Report directory")
    output_format: OutputFormat = Field(OutputFormat.CSV, description="csv or structured-text")

    def effective_params(self) -> FamilyParams:
        """Family parameters with the config-level seed filled in."""
        if self.seed is not None and self.params.seed is None:
            return self.params.model_copy(update={'seed': self.seed})
        return self.params

    def schedule(self) -> List[int]:
        if self.Ns:
            return list(self.Ns)
        return [self.N] if self.N is not None else []
