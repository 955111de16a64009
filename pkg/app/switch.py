"""The quantum switch of two single-qubit channels.

The control qubit selects the order: |0> applies chA after chB, |1> applies
chB after chA. With a control in superposition the two orders interfere.
"""

from typing import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from app.channels import (
    KrausChannel,
    apply_channel,
    depolarizing_mixture,
    require_cptp,
)
from app.exceptions import ArgumentError
from app.qmath import DensityMatrix, partial_trace, pauli, stokes_from_density
from app.schema import StokesVector, Subsystem


_KET_BRA = {
    (0, 0): np.array([[1, 0], [0, 0]], dtype=complex),
    (0, 1): np.array([[0, 1], [0, 0]], dtype=complex),
    (1, 0): np.array([[0, 0], [1, 0]], dtype=complex),
    (1, 1): np.array([[0, 0], [0, 1]], dtype=complex),
}
_CONTROL_X = np.kron(pauli(1), pauli(0))


class SwitchInput(BaseModel):
    """Product input: control sqrt(gamma)|0> + sqrt(1 - gamma)|1> and a target state"""

    gamma: float
    target: DensityMatrix

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("gamma")
    @classmethod
    def _check_gamma(cls, value):
        if not 0 <= value <= 1:
            raise ArgumentError(f"gamma = {value} outside [0, 1]")
        return value

    @field_validator("target", mode="before")
    @classmethod
    def _coerce_target(cls, value):
        if isinstance(value, DensityMatrix):
            return value
        return DensityMatrix(matrix=value)

    @property
    def control_ket(self) -> np.ndarray:
        return np.array([np.sqrt(self.gamma), np.sqrt(1 - self.gamma)], dtype=complex)

    @property
    def control(self) -> DensityMatrix:
        ket = self.control_ket
        return DensityMatrix(matrix=np.outer(ket, ket.conj()))

    def product_state(self) -> DensityMatrix:
        return DensityMatrix(matrix=np.kron(self.control.matrix, self.target.matrix))


def _check_index(index: int) -> None:
    if index not in (0, 1, 2, 3):
        raise ArgumentError(f"Pauli index {index} outside 0..3")


def commutation_sign(i: int, j: int) -> int:
    """+1 if sigma_i and sigma_j commute, -1 if they anticommute."""
    _check_index(i)
    _check_index(j)
    return 1 if i == 0 or j == 0 or i == j else -1


def theoretical_signs() -> np.ndarray:
    return np.array([[commutation_sign(i, j) for j in range(4)] for i in range(4)], dtype=float)


def switch_kraus(chA: KrausChannel, chB: KrausChannel) -> KrausChannel:
    """S_ab = |0><0| (x) A_a B_b + |1><1| (x) B_b A_a."""
    if chA.dim != 2 or chB.dim != 2:
        raise ArgumentError("The switch takes two single-qubit channels")
    require_cptp(chA)
    require_cptp(chB)

    ops = [
        np.kron(_KET_BRA[0, 0], a @ b) + np.kron(_KET_BRA[1, 1], b @ a)
        for a in chA.operators
        for b in chB.operators
    ]
    switched = KrausChannel(operators=ops, label=f"switch[{chA.label},{chB.label}]")
    require_cptp(switched)
    return switched


def apply_switch(chA: KrausChannel, chB: KrausChannel, input: SwitchInput) -> DensityMatrix:
    return apply_channel(switch_kraus(chA, chB), input.product_state())


def pauli_pair_raw(i: int, j: int, gamma: float, target: np.ndarray) -> np.ndarray:
    """Four-term switch output for unitaries sigma_i, sigma_j; linear in ``target``."""
    forward = pauli(i) @ pauli(j)
    backward = pauli(j) @ pauli(i)
    coherence = np.sqrt(gamma * (1 - gamma))
    return (
        gamma * np.kron(_KET_BRA[0, 0], forward @ target @ forward.conj().T)
        + (1 - gamma) * np.kron(_KET_BRA[1, 1], backward @ target @ backward.conj().T)
        + coherence * np.kron(_KET_BRA[0, 1], forward @ target @ backward.conj().T)
        + coherence * np.kron(_KET_BRA[1, 0], backward @ target @ forward.conj().T)
    )


def pauli_pair_switch(i: int, j: int, input: SwitchInput) -> DensityMatrix:
    _check_index(i)
    _check_index(j)
    return DensityMatrix(matrix=pauli_pair_raw(i, j, input.gamma, input.target.matrix))


def depolarizing_switch_raw(q: float, gamma: float, target: np.ndarray) -> np.ndarray:
    p = depolarizing_mixture(q).p
    out = np.zeros((4, 4), dtype=complex)
    # fixed lexicographic (i, j) order keeps the sum bitwise reproducible
    for i in range(4):
        for j in range(4):
            weight = p[i] * p[j]
            if weight:
                out = out + weight * pauli_pair_raw(i, j, gamma, target)
    return out


def depolarizing_switch_mixture(q: float, input: SwitchInput) -> DensityMatrix:
    return DensityMatrix(
        matrix=depolarizing_switch_raw(q, input.gamma, input.target.matrix)
    )


def control_s2(rho: DensityMatrix) -> float:
    """tr((X (x) I) rho), the diagonal/antidiagonal contrast of the control."""
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(matrix=rho)
    if rho.dim != 4:
        raise ArgumentError("control_s2 expects a two-qubit state")
    return float(np.trace(_CONTROL_X @ rho.matrix).real)


def control_marginal_stokes(rho: DensityMatrix) -> StokesVector:
    return stokes_from_density(partial_trace(rho, Subsystem.CONTROL))


def project_control(rho: DensityMatrix, theta: float, phi: float) -> np.ndarray:
    """<M|rho|M> over the control for |M> = cos(theta)|0> + e^{i phi} sin(theta)|1>.

    The result is left unnormalised; its trace is the probability of the outcome.
    """
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(matrix=rho)
    if rho.dim != 4:
        raise ArgumentError("project_control expects a two-qubit state")
    m = np.array([np.cos(theta), np.exp(1j * phi) * np.sin(theta)], dtype=complex)
    blocks = rho.matrix.reshape(2, 2, 2, 2)  # (c, t, c', t')
    return np.einsum("c,cadb,d->ab", m.conj(), blocks, m)


def normalize_conditional(m: np.ndarray) -> DensityMatrix:
    trace = np.trace(m).real
    if trace <= 1e-15:
        raise ArgumentError("Conditional state has zero probability")
    return DensityMatrix(matrix=m / trace)


def switch_transfer_matrix(fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """16x4 matrix L with vec(fn(t)) = L vec(t) for a target-linear ``fn``.

    Vectorisation is row-major on both sides.
    """
    columns = []
    for a in range(2):
        for b in range(2):
            basis = np.zeros((2, 2), dtype=complex)
            basis[a, b] = 1.0
            columns.append(np.asarray(fn(basis), dtype=complex).reshape(16))
    return np.stack(columns, axis=1)
