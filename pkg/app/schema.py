import math
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.exceptions import ArgumentError, ParseError


class Subsystem(str, Enum):
    """Factors of the control (x) target space"""

    CONTROL = "control"
    TARGET = "target"


class ChannelKind(str, Enum):
    """Channel families addressable by label"""

    DEPOLARIZING = "depolarizing"
    AMPLITUDE = "amplitude"
    PHASE = "phase"


CHANNEL_VALUES = tuple(kind.value for kind in ChannelKind)


class ValidationSuite(str, Enum):
    """Invariant suites run by the validate command"""

    CPTP = "cptp"
    SWITCH = "switch"
    CAPACITY = "capacity"
    HARDWARE = "hardware"
    DAMPING = "damping"
    ALL = "all"


class OutputFormat(str, Enum):
    TEXT = "text"
    CSV = "csv"


FORMAT_VALUES = tuple(fmt.value for fmt in OutputFormat)

BLOCH_TOLERANCE = 1e-10


class StokesVector(BaseModel):
    """Stokes triple with S2 on the real and S3 on the imaginary off-diagonal"""

    s1: float
    s2: float
    s3: float

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_bloch_ball(self):
        if self.norm_squared > 1 + BLOCH_TOLERANCE:
            raise ArgumentError(
                f"Unphysical Stokes vector {self.as_tuple()}: norm {self.norm:.12g} > 1"
            )
        return self

    @property
    def norm_squared(self) -> float:
        return self.s1**2 + self.s2**2 + self.s3**2

    @property
    def norm(self) -> float:
        return math.sqrt(self.norm_squared)

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.s1, self.s2, self.s3)


class CapacityResult(BaseModel):
    """Holevo capacity of the switch with the two entropies it is built from"""

    q: float
    gamma: float
    h_control: float = Field(..., description="Entropy of the control marginal (bits)")
    h_min: float = Field(..., description="Minimum output entropy (bits)")
    chi: float = Field(..., description="1 + h_control - h_min (bits)")
    argmin_target: Tuple[float, float] = Field(
        (0.0, 0.0), description="(theta, phi) of the minimising pure target"
    )

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_capacity(self):
        if abs(self.chi - (1.0 + self.h_control - self.h_min)) > 1e-12:
            raise ArgumentError("chi must equal 1 + h_control - h_min")
        if not -1e-10 <= self.chi <= 1 + 1e-10:
            raise ArgumentError(f"chi = {self.chi} lies outside [0, 1]")
        return self

    @classmethod
    def from_entropies(
        cls,
        q: float,
        gamma: float,
        h_control: float,
        h_min: float,
        argmin_target: Tuple[float, float] = (0.0, 0.0),
    ) -> "CapacityResult":
        return cls(
            q=q,
            gamma=gamma,
            h_control=h_control,
            h_min=h_min,
            chi=1.0 + h_control - h_min,
            argmin_target=argmin_target,
        )


class MeasurementRecord(BaseModel):
    """Measured S2 of the control for one Pauli pair"""

    i: int
    j: int
    s2: float
    sigma: float = 0.0

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_record(self):
        if not (0 <= self.i <= 3 and 0 <= self.j <= 3):
            raise ParseError(f"Pauli indices ({self.i}, {self.j}) outside 0..3")
        if not (math.isfinite(self.s2) and math.isfinite(self.sigma)):
            raise ParseError(f"non-finite s2 or sigma for pair ({self.i}, {self.j})")
        if abs(self.s2) > 1:
            raise ParseError(f"|s2| = {abs(self.s2)} > 1 for pair ({self.i}, {self.j})")
        if self.sigma < 0:
            raise ParseError(f"negative sigma for pair ({self.i}, {self.j})")
        return self


class MeasurementSet(BaseModel):
    records: List[MeasurementRecord]
    metadata: str = ""

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_pairs(self):
        seen = set()
        for record in self.records:
            pair = (record.i, record.j)
            if pair in seen:
                raise ParseError(f"duplicate pair {pair}")
            seen.add(pair)
        missing = [(i, j) for i in range(4) for j in range(4) if (i, j) not in seen]
        if missing:
            names = ", ".join(f"({i}, {j})" for i, j in missing)
            raise ParseError(f"missing pair(s) {names}")
        return self

    def record(self, i: int, j: int) -> MeasurementRecord:
        for record in self.records:
            if record.i == i and record.j == j:
                return record
        raise KeyError((i, j))

    def s2_matrix(self) -> List[List[float]]:
        return [[self.record(i, j).s2 for j in range(4)] for i in range(4)]

    def sigma_matrix(self) -> List[List[float]]:
        return [[self.record(i, j).sigma for j in range(4)] for i in range(4)]


class VisibilityModel(BaseModel):
    v: float = Field(..., description="Visibility in [0, 1]")
    v_err: float = Field(0.0, description="1 sigma uncertainty")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_visibility(self):
        if not 0 <= self.v <= 1:
            raise ArgumentError(f"visibility {self.v} outside [0, 1]")
        if self.v_err < 0:
            raise ArgumentError("visibility uncertainty must be non-negative")
        return self

    def bounds(self) -> Tuple[float, float]:
        """v -/+ v_err, clamped into [0, 1]"""
        return (max(0.0, self.v - self.v_err), min(1.0, self.v + self.v_err))


class SweepConfig(BaseModel):
    q_min: float = 0.0
    q_max: float = 1.0
    steps: int = 101
    gamma: float = 0.5
    visibility: Optional[Tuple[float, float]] = None
    measurements: Optional[str] = None
    out: str

    @model_validator(mode="after")
    def _check_sweep(self):
        if not (0 <= self.q_min <= 1 and 0 <= self.q_max <= 1):
            raise ArgumentError("q bounds must lie in [0, 1]")
        if self.q_min >= self.q_max:
            raise ArgumentError("q_min must be below q_max")
        if self.steps < 2:
            raise ArgumentError("steps must be at least 2")
        if not 0 <= self.gamma <= 1:
            raise ArgumentError("gamma must lie in [0, 1]")
        return self


class CheckResult(BaseModel):
    """Outcome of one invariant check"""

    name: str
    deviation: float
    tolerance: float
    passed: bool

    def __str__(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: deviation={self.deviation:.3e} tol={self.tolerance:.1e}"


class ValidationReport(BaseModel):
    suite: str
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def __str__(self):
        lines = [f"suite {self.suite}: {len(self.checks)} checks"]
        lines.extend(str(check) for check in self.checks)
        return "\n".join(lines)
