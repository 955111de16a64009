"""Dense linear algebra and state utilities for one and two qubits.

Composite indices are ordered as 2 * control + target, so ``tensor`` always
places the control factor first. Entropies are reported in bits.
"""

from typing import Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from app.config import config
from app.exceptions import ArgumentError, StateValidationError
from app.schema import StokesVector, Subsystem


ALLOWED_DIMS = (2, 4)

_PAULIS = (
    np.array([[1, 0], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
for _sigma in _PAULIS:
    _sigma.flags.writeable = False


def _as_square(m, allowed=ALLOWED_DIMS) -> np.ndarray:
    arr = np.asarray(m.matrix if isinstance(m, DensityMatrix) else m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ArgumentError(f"Expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] not in allowed:
        raise ArgumentError(f"Matrix dimension {arr.shape[0]} not in {allowed}")
    return arr


def hermitian_deviation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


class DensityMatrix(BaseModel):
    """A Hermitian, unit-trace, positive semidefinite 2x2 or 4x4 matrix.

    Construction validates all three properties against the ``[numerics]``
    tolerances and freezes the underlying array.
    """

    matrix: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("matrix", mode="before")
    @classmethod
    def _validate_matrix(cls, value):
        arr = np.array(value, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise StateValidationError(f"Density matrix must be square, got {arr.shape}")
        if arr.shape[0] not in ALLOWED_DIMS:
            raise StateValidationError(f"Density matrix dimension {arr.shape[0]} unsupported")

        numerics = config.numerics
        herm = hermitian_deviation(arr)
        if herm > numerics.hermitian_tol:
            raise StateValidationError(f"Matrix is not Hermitian (deviation {herm:.3e})")
        trace = np.trace(arr)
        if abs(trace - 1) > numerics.trace_tol:
            raise StateValidationError(f"Trace {trace.real:.15g} differs from 1")
        lowest = float(np.linalg.eigvalsh(arr)[0])
        if lowest < -numerics.psd_tol:
            raise StateValidationError(f"Negative eigenvalue {lowest:.3e}")

        arr.flags.writeable = False
        return arr

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_ket(cls, ket: Sequence[complex]) -> "DensityMatrix":
        vec = np.asarray(ket, dtype=complex)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ArgumentError("Zero vector is not a state")
        vec = vec / norm
        return cls(matrix=np.outer(vec, vec.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int = 2) -> "DensityMatrix":
        return cls(matrix=np.eye(dim, dtype=complex) / dim)


MatrixLike = Union[np.ndarray, DensityMatrix]


def pauli(index: int) -> np.ndarray:
    """Return sigma_index (sigma_0 is the identity); the array is read-only."""
    if index not in (0, 1, 2, 3):
        raise ArgumentError(f"Pauli index {index} outside 0..3")
    return _PAULIS[index]


def tensor(a: MatrixLike, b: MatrixLike) -> np.ndarray:
    """Kronecker product of two single-qubit operators, control factor first."""
    left = _as_square(a, allowed=(2,))
    right = _as_square(b, allowed=(2,))
    return np.kron(left, right)


def partial_trace(rho: DensityMatrix, keep: Union[Subsystem, str]) -> DensityMatrix:
    keep = Subsystem(keep)
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(matrix=rho)
    if rho.dim != 4:
        raise ArgumentError("partial_trace expects a two-qubit state")

    blocks = rho.matrix.reshape(2, 2, 2, 2)  # (c, t, c', t')
    if keep is Subsystem.CONTROL:
        reduced = np.einsum("ajbj->ab", blocks)
    else:
        reduced = np.einsum("iaib->ab", blocks)
    return DensityMatrix(matrix=reduced)


def eig_hermitian(m: MatrixLike) -> np.ndarray:
    """Real spectrum of a Hermitian matrix in descending order."""
    arr = _as_square(m)
    if hermitian_deviation(arr) > 1e-10:
        raise StateValidationError("eig_hermitian requires a Hermitian matrix")
    return np.linalg.eigvalsh(arr)[::-1]


def _entropy_terms(eigs: np.ndarray) -> np.ndarray:
    psd_tol = config.numerics.psd_tol
    if np.any(eigs < -psd_tol):
        raise StateValidationError(f"Eigenvalue {eigs.min():.3e} below -{psd_tol}")
    clamped = np.clip(eigs, 0.0, None)
    safe = np.where(clamped > 0, clamped, 1.0)
    return -clamped * np.log2(safe)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-sum(lambda log2 lambda) with 0 log 0 = 0."""
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(matrix=rho)
    entropy = float(np.sum(_entropy_terms(eig_hermitian(rho.matrix))))
    return max(entropy, 0.0)


def spectral_entropies(stack: np.ndarray) -> np.ndarray:
    """Entropies of an (N, d, d) stack of Hermitian matrices, in bits."""
    eigs = np.linalg.eigvalsh(stack)
    return np.maximum(np.sum(_entropy_terms(eigs), axis=-1), 0.0)


def binary_entropy(p: float) -> float:
    if p < -1e-12 or p > 1 + 1e-12:
        raise ArgumentError(f"Probability {p} outside [0, 1]")
    p = min(max(p, 0.0), 1.0)
    if p == 0.0 or p == 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def stokes_from_density(rho: DensityMatrix) -> StokesVector:
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(matrix=rho)
    if rho.dim != 2:
        raise ArgumentError("Stokes parameters are defined for a single qubit")
    m = rho.matrix
    s = np.array([2 * m[0, 0].real - 1, 2 * m[0, 1].real, 2 * m[0, 1].imag])
    # states inside the psd_tol window may sit just outside the unit ball
    norm = float(np.linalg.norm(s))
    if norm > 1:
        s = s / norm
    s1, s2, s3 = s.tolist()
    return StokesVector(s1=s1, s2=s2, s3=s3)


def stokes_matrix(s1: float, s2: float, s3: float) -> np.ndarray:
    """Unvalidated 1/2 [[1 + S1, S2 + i S3], [S2 - i S3, 1 - S1]]."""
    return 0.5 * np.array(
        [[1 + s1, s2 + 1j * s3], [s2 - 1j * s3, 1 - s1]], dtype=complex
    )


def density_from_stokes(s: Union[StokesVector, Sequence[float]]) -> DensityMatrix:
    if not isinstance(s, StokesVector):
        s1, s2, s3 = s
        s = StokesVector(s1=s1, s2=s2, s3=s3)
    return DensityMatrix(matrix=stokes_matrix(*s.as_tuple()))


def pure_target(theta: float, phi: float) -> np.ndarray:
    """|psi><psi| for cos(theta/2)|0> + e^{i phi} sin(theta/2)|1> (unvalidated)."""
    ket = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
    return np.outer(ket, ket.conj())


def pure_targets(thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """Stack of pure single-qubit projectors, shape (N, 2, 2)."""
    kets = np.stack(
        [np.cos(thetas / 2) + 0j, np.exp(1j * phis) * np.sin(thetas / 2)], axis=-1
    )
    return np.einsum("na,nb->nab", kets, kets.conj())


def random_density(
    rng: np.random.Generator, dim: int = 2, pure: bool = False
) -> DensityMatrix:
    if pure:
        ket = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return DensityMatrix.from_ket(ket)
    ginibre = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = ginibre @ ginibre.conj().T
    m = m / np.trace(m)
    return DensityMatrix(matrix=(m + m.conj().T) / 2)


def random_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    ginibre = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(ginibre)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_stokes(rng: np.random.Generator, radius: Optional[float] = None) -> StokesVector:
    """Uniform direction; radius uniform in the ball unless given."""
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    r = rng.uniform(0, 1) ** (1 / 3) if radius is None else radius
    s1, s2, s3 = (direction * r).tolist()
    return StokesVector(s1=s1, s2=s2, s3=s3)
