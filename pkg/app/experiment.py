"""Measured control coherences, visibility model and the prism hardware model."""

import csv
import io
from pathlib import Path
from typing import BinaryIO, Dict, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
from pydantic import BaseModel

from app.capacity import holevo_from_branches
from app.config import SearchSettings, config
from app.exceptions import ArgumentError, ParseError
from app.logger import logger
from app.qmath import pauli
from app.schema import (
    CapacityResult,
    CheckResult,
    MeasurementRecord,
    MeasurementSet,
    VisibilityModel,
)
from app.switch import commutation_sign, theoretical_signs


CSV_HEADER = ["i", "j", "s2", "sigma"]
BUNDLED_TABLE_PATH = config.data_root / "table1.csv"

# (phase, (theta_1[, theta_2])) of the phase plate and inverting prisms per Pauli
HARDWARE_SETTINGS: Dict[int, Tuple[float, Tuple[float, ...]]] = {
    0: (0.0, (np.pi / 2, np.pi / 2)),
    1: (0.0, (np.pi / 4,)),
    2: (np.pi / 2, (np.pi / 2, np.pi / 4)),
    3: (0.0, (np.pi / 2,)),
}

MeasurementSource = Union[bytes, str, Path, BinaryIO, TextIO]


def _decode(data: bytes, provenance: str) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(f"{provenance} is not UTF-8: {e}")


def _read_text(source: MeasurementSource) -> Tuple[str, str]:
    if isinstance(source, bytes):
        return _decode(source, "<bytes>"), "<bytes>"
    if isinstance(source, (str, Path)):
        path = Path(source)
        try:
            data = path.read_bytes()
        except OSError as e:
            raise ParseError(f"cannot read {path}: {e}")
        return _decode(data, str(path)), str(path)
    provenance = getattr(source, "name", "<stream>")
    try:
        data = source.read()
    except UnicodeDecodeError as e:
        raise ParseError(f"{provenance} is not UTF-8: {e}")
    if isinstance(data, bytes):
        data = _decode(data, provenance)
    return data, provenance


def load_measurements(source: MeasurementSource = BUNDLED_TABLE_PATH) -> MeasurementSet:
    """Parse the ``i,j,s2,sigma`` CSV schema into a validated MeasurementSet."""
    text, provenance = _read_text(source)
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [cell.strip() for cell in rows[0]] != CSV_HEADER:
        raise ParseError(f"header must be {','.join(CSV_HEADER)}", row=1)

    records: List[MeasurementRecord] = []
    seen = set()
    for line_number, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(CSV_HEADER):
            raise ParseError(f"expected 4 fields, got {len(row)}", row=line_number)
        try:
            i, j = int(row[0]), int(row[1])
            s2, sigma = float(row[2]), float(row[3])
        except ValueError:
            raise ParseError(f"malformed values {row}", row=line_number)
        if (i, j) in seen:
            raise ParseError(f"duplicate pair ({i}, {j})", row=line_number)
        seen.add((i, j))
        try:
            records.append(MeasurementRecord(i=i, j=j, s2=s2, sigma=sigma))
        except ParseError as e:
            raise ParseError(e.message, row=line_number)

    measurements = MeasurementSet(records=records, metadata=provenance)
    logger.debug(f"Loaded {len(records)} measurement records from {provenance}")
    return measurements


def dump_measurements(meas: MeasurementSet) -> str:
    """Serialise with LF line endings, records in (i, j) order."""
    lines = [",".join(CSV_HEADER)]
    for record in sorted(meas.records, key=lambda r: (r.i, r.j)):
        lines.append(f"{record.i},{record.j},{record.s2!r},{record.sigma!r}")
    return "\n".join(lines) + "\n"


def ideal_measurements(v: float = 1.0) -> MeasurementSet:
    """Theoretical +/-1 coherences scaled by a visibility, without uncertainty."""
    if not 0 <= v <= 1:
        raise ArgumentError(f"visibility {v} outside [0, 1]")
    records = [
        MeasurementRecord(i=i, j=j, s2=commutation_sign(i, j) * v, sigma=0.0)
        for i in range(4)
        for j in range(4)
    ]
    return MeasurementSet(records=records, metadata=f"ideal v={v:g}")


def reconstruct_capacity(
    meas: MeasurementSet,
    q: float,
    gamma: float = 0.5,
    settings: Optional[SearchSettings] = None,
) -> CapacityResult:
    return holevo_from_branches(meas.s2_matrix(), q, gamma, settings)


def visibility_band(
    vm: VisibilityModel,
    q: float,
    gamma: float = 0.5,
    settings: Optional[SearchSettings] = None,
) -> Tuple[float, float]:
    signs = theoretical_signs()
    chis = [
        holevo_from_branches(signs * v, q, gamma, settings).chi for v in vm.bounds()
    ]
    return min(chis), max(chis)


def monte_carlo_band(
    meas: MeasurementSet,
    q: float,
    gamma: float = 0.5,
    n: int = None,
    seed: int = None,
    settings: Optional[SearchSettings] = None,
) -> Tuple[float, float]:
    """Mean and standard deviation of chi under Gaussian resampling of each S2."""
    n = config.experiment.mc_samples if n is None else n
    seed = config.experiment.mc_seed if seed is None else seed
    if n < 100:
        raise ArgumentError(f"Monte Carlo needs at least 100 samples, got {n}")

    rng = np.random.default_rng(seed)
    means = np.asarray(meas.s2_matrix())
    sigmas = np.asarray(meas.sigma_matrix())
    samples = np.clip(rng.normal(means, sigmas, size=(n, 4, 4)), -1.0, 1.0)

    chis = np.array(
        [holevo_from_branches(sample, q, gamma, settings).chi for sample in samples]
    )
    logger.debug(f"Monte Carlo over {n} samples (seed {seed}) at q={q:g}")
    offsets = chis - chis[0]
    return float(chis[0] + np.mean(offsets)), float(np.std(offsets))


def prism_rotation(theta: float) -> np.ndarray:
    """Inverting prism at physical angle theta: reflects and rotates by 2 theta."""
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    return np.array([[-c, s], [s, c]], dtype=complex)


def prism_unitary(phi: float, thetas: Sequence[float]) -> np.ndarray:
    """e^{i phi} R(theta_n) ... R(theta_1)."""
    if len(thetas) not in (1, 2):
        raise ArgumentError("prism_unitary takes one or two prism angles")
    u = np.eye(2, dtype=complex)
    for theta in thetas:
        u = prism_rotation(theta) @ u
    return np.exp(1j * phi) * u


def phase_insensitive_distance(u: np.ndarray, v: np.ndarray) -> float:
    """max-norm distance after aligning the global phase of ``v`` to ``u``."""
    overlap = np.trace(v.conj().T @ u)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-15 else 1.0
    return float(np.max(np.abs(u - phase * v)))


class HardwareCheck(BaseModel):
    pauli_index: int
    distance: float = 0.0
    raw_distance: float = 0.0
    tolerance: float = 1e-12

    @property
    def passed(self) -> bool:
        return self.distance <= self.tolerance

    def to_check(self) -> CheckResult:
        return CheckResult(
            name=f"prism settings reproduce sigma_{self.pauli_index}",
            deviation=self.distance,
            tolerance=self.tolerance,
            passed=self.passed,
        )


def verify_hardware_settings(
    perturbation: float = 0.0, tolerance: float = 1e-12
) -> List[HardwareCheck]:
    """Compare each prism setting with its Pauli, optionally offsetting theta_1."""
    checks = []
    for k, (phi, thetas) in HARDWARE_SETTINGS.items():
        angles = (thetas[0] + perturbation,) + tuple(thetas[1:])
        u = prism_unitary(phi, angles)
        checks.append(
            HardwareCheck(
                pauli_index=k,
                distance=phase_insensitive_distance(u, pauli(k)),
                raw_distance=float(np.max(np.abs(u - pauli(k)))),
                tolerance=tolerance,
            )
        )
    return checks


class BranchRow(BaseModel):
    """Ideal outcome of one Pauli pair inside the switch"""

    i: int
    j: int
    target: Tuple[complex, complex]
    control: str
    s2: int


def branch_table(target: Sequence[complex] = (0, 1)) -> List[BranchRow]:
    """Ideal output target sigma_i sigma_j|psi> and control label (D or A) per pair."""
    ket = np.asarray(target, dtype=complex)
    rows = []
    for i in range(4):
        for j in range(4):
            out = pauli(i) @ pauli(j) @ ket
            sign = commutation_sign(i, j)
            rows.append(
                BranchRow(
                    i=i,
                    j=j,
                    target=(complex(out[0]), complex(out[1])),
                    control="D" if sign > 0 else "A",
                    s2=sign,
                )
            )
    return rows
