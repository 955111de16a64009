"""Kraus-form noise channels and definite-order composition."""

from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.config import config
from app.exceptions import ArgumentError, InternalError, StateValidationError
from app.qmath import ALLOWED_DIMS, DensityMatrix, pauli
from app.schema import ChannelKind


class KrausChannel(BaseModel):
    """An ordered Kraus set. Zero operators are kept so indices match their labels."""

    operators: List[np.ndarray]
    label: str = "channel"

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("operators", mode="before")
    @classmethod
    def _validate_operators(cls, value):
        ops = [np.array(op, dtype=complex) for op in value]
        if not ops:
            raise ArgumentError("A channel needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2 or shape[0] != shape[1] or shape[0] not in ALLOWED_DIMS:
            raise ArgumentError(f"Unsupported Kraus operator shape {shape}")
        if any(op.shape != shape for op in ops):
            raise ArgumentError("All Kraus operators must share one dimension")
        for op in ops:
            op.flags.writeable = False
        return ops

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self) -> int:
        return len(self.operators)


class CPTPReport(BaseModel):
    label: str
    deviation: float = Field(..., description="max |sum K^dagger K - I|")
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance


class PauliMixture(BaseModel):
    """Pauli error probabilities (p0, p1, p2, p3) of a depolarising channel"""

    q: float
    p: Tuple[float, float, float, float]

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_probabilities(self):
        if any(x < 0 for x in self.p) or abs(sum(self.p) - 1) > 1e-14:
            raise ArgumentError(f"Invalid Pauli probabilities {self.p}")
        return self


def _check_strength(name: str, value: float) -> float:
    if not 0 <= value <= 1:
        raise ArgumentError(f"{name} = {value} outside [0, 1]")
    return float(value)


def depolarizing_mixture(q: float) -> PauliMixture:
    q = _check_strength("q", q)
    return PauliMixture(q=q, p=(1 - 3 * q / 4, q / 4, q / 4, q / 4))


def depolarizing_kraus(q: float) -> KrausChannel:
    mixture = depolarizing_mixture(q)
    ops = [np.sqrt(p) * pauli(k) for k, p in enumerate(mixture.p)]
    return KrausChannel(operators=ops, label=f"depolarizing(q={q:g})")


def amplitude_damping_kraus(gamma: float) -> KrausChannel:
    gamma = _check_strength("gamma", gamma)
    a0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    a1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausChannel(operators=[a0, a1], label=f"amplitude(gamma={gamma:g})")


def phase_damping_kraus(phi_strength: float) -> KrausChannel:
    strength = _check_strength("phi_strength", phi_strength)
    p0 = np.sqrt(1 - strength) * np.eye(2, dtype=complex)
    p1 = np.sqrt(strength) * np.array([[1, 0], [0, 0]], dtype=complex)
    p2 = np.sqrt(strength) * np.array([[0, 0], [0, 1]], dtype=complex)
    return KrausChannel(operators=[p0, p1, p2], label=f"phase(phi={strength:g})")


def identity_channel(dim: int = 2) -> KrausChannel:
    return KrausChannel(operators=[np.eye(dim, dtype=complex)], label="identity")


def channel_by_kind(kind: ChannelKind, strength: float) -> KrausChannel:
    builders = {
        ChannelKind.DEPOLARIZING: depolarizing_kraus,
        ChannelKind.AMPLITUDE: amplitude_damping_kraus,
        ChannelKind.PHASE: phase_damping_kraus,
    }
    try:
        builder = builders[ChannelKind(kind)]
    except ValueError:
        raise ArgumentError(f"Unknown channel kind: {kind}")
    return builder(strength)


def validate_cptp(ch: KrausChannel, tolerance: Optional[float] = None) -> CPTPReport:
    tolerance = config.numerics.cptp_tol if tolerance is None else tolerance
    completeness = sum(op.conj().T @ op for op in ch.operators)
    deviation = float(np.max(np.abs(completeness - np.eye(ch.dim))))
    return CPTPReport(label=ch.label, deviation=deviation, tolerance=tolerance)


def require_cptp(ch: KrausChannel) -> None:
    report = validate_cptp(ch)
    if not report.passed:
        raise ArgumentError(
            f"Channel {ch.label} is not trace preserving (deviation {report.deviation:.3e})"
        )


def kraus_sum(ops: List[np.ndarray], m: np.ndarray) -> np.ndarray:
    """sum K m K^dagger without any validation."""
    return sum(op @ m @ op.conj().T for op in ops)


def apply_channel(ch: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(matrix=rho)
    if rho.dim != ch.dim:
        raise ArgumentError(f"Channel dimension {ch.dim} does not match state {rho.dim}")
    require_cptp(ch)

    out = kraus_sum(ch.operators, rho.matrix)
    try:
        return DensityMatrix(matrix=out)
    except StateValidationError as e:
        raise InternalError(f"{ch.label} produced an unphysical state: {e}")


def compose_definite(chA: KrausChannel, chB: KrausChannel) -> KrausChannel:
    """chA after chB: the product set {A_a B_b}."""
    if chA.dim != chB.dim:
        raise ArgumentError("Composed channels must share a dimension")
    ops = [a @ b for a in chA.operators for b in chB.operators]
    composed = KrausChannel(operators=ops, label=f"{chA.label}o{chB.label}")
    require_cptp(composed)
    return composed
