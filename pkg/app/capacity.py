"""Holevo capacity of the switch and the definite-order baseline.

chi = 1 + H(control marginal) - H_min, where H_min is the smallest entropy of
the two-qubit output over pure target inputs. Entropy is concave, so pure
inputs suffice.
"""

from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize

from app.channels import depolarizing_mixture
from app.config import SearchSettings, config
from app.exceptions import ArgumentError, StateValidationError
from app.logger import logger
from app.qmath import (
    DensityMatrix,
    binary_entropy,
    partial_trace,
    pauli,
    pure_target,
    pure_targets,
    spectral_entropies,
    stokes_matrix,
    von_neumann_entropy,
)
from app.schema import CapacityResult, Subsystem
from app.switch import depolarizing_switch_raw, switch_transfer_matrix


class TargetStateBuilder:
    """Maps pure-target Bloch angles to switch outputs through a linear transfer map.

    Calling the builder with scalar angles returns a validated DensityMatrix;
    ``batch`` evaluates whole grids at once and skips per-state validation.
    """

    def __init__(self, transfer: np.ndarray, label: str = ""):
        if transfer.shape != (16, 4):
            raise ArgumentError(f"Transfer matrix must be 16x4, got {transfer.shape}")
        self.transfer = transfer
        self.label = label

    @classmethod
    def from_linear_map(
        cls, fn: Callable[[np.ndarray], np.ndarray], label: str = ""
    ) -> "TargetStateBuilder":
        return cls(switch_transfer_matrix(fn), label=label)

    def batch(self, thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
        targets = pure_targets(np.asarray(thetas, float), np.asarray(phis, float))
        flat = np.einsum("kl,nl->nk", self.transfer, targets.reshape(-1, 4))
        return flat.reshape(-1, 4, 4)

    def __call__(self, theta: float, phi: float) -> DensityMatrix:
        out = (self.transfer @ pure_target(theta, phi).reshape(4)).reshape(4, 4)
        return DensityMatrix(matrix=(out + out.conj().T) / 2)


StateBuilder = Union[TargetStateBuilder, Callable[[float, float], DensityMatrix]]


def _evaluate(builder: StateBuilder, thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    if isinstance(builder, TargetStateBuilder):
        stack = builder.batch(thetas, phis)
        if np.max(np.abs(np.trace(stack, axis1=1, axis2=2) - 1)) > config.numerics.trace_tol * 10:
            raise StateValidationError(f"Builder {builder.label} is not trace preserving")
        return spectral_entropies((stack + np.conj(np.swapaxes(stack, 1, 2))) / 2)
    return np.array(
        [von_neumann_entropy(builder(float(t), float(p))) for t, p in zip(thetas, phis)]
    )


def _objective(builder: StateBuilder) -> Callable[[np.ndarray], float]:
    """Entropy at a single (theta, phi), without the per-call batching overhead."""
    if isinstance(builder, TargetStateBuilder):
        transfer = builder.transfer

        def entropy(x: np.ndarray) -> float:
            out = (transfer @ pure_target(x[0], x[1]).reshape(4)).reshape(1, 4, 4)
            return float(spectral_entropies((out + np.conj(np.swapaxes(out, 1, 2))) / 2)[0])

        return entropy
    return lambda x: von_neumann_entropy(builder(float(x[0]), float(x[1])))


def min_output_entropy(
    state_builder: StateBuilder, settings: Optional[SearchSettings] = None
) -> Tuple[float, Tuple[float, float]]:
    """Coarse Bloch-sphere grid followed by a Powell refinement from the grid minimum.

    Powell starts along the theta and phi axes and is deterministic. Returns the
    minimum entropy in bits and the (theta, phi) attaining it.
    """
    settings = settings or config.search

    thetas = np.linspace(0.0, np.pi, settings.theta_points)
    phis = np.arange(settings.phi_points) * (2 * np.pi / settings.phi_points)
    grid_t, grid_p = np.meshgrid(thetas, phis, indexing="ij")
    grid_t, grid_p = grid_t.ravel(), grid_p.ravel()

    entropies = _evaluate(state_builder, grid_t, grid_p)
    best = int(np.argmin(entropies))
    h_grid = float(entropies[best])
    theta, phi = float(grid_t[best]), float(grid_p[best])

    refined = minimize(
        _objective(state_builder),
        x0=np.array([theta, phi]),
        method="Powell",
        bounds=[(0.0, np.pi), (None, None)],
        options={
            "xtol": settings.min_step,
            "ftol": settings.tolerance,
            "maxiter": settings.max_sweeps,
        },
    )
    h = h_grid
    if refined.fun < h_grid:
        h = float(refined.fun)
        theta, phi = float(refined.x[0]), float(refined.x[1]) % (2 * np.pi)

    logger.debug(
        f"min output entropy: grid {h_grid:.12g}, refined {h:.12g} after {refined.nfev} evaluations"
    )
    return max(h, 0.0), (theta, phi)


def _check_unit(name: str, value: float) -> float:
    if not 0 <= value <= 1:
        raise ArgumentError(f"{name} = {value} outside [0, 1]")
    return float(value)


def _capacity(
    builder: TargetStateBuilder,
    q: float,
    gamma: float,
    settings: Optional[SearchSettings],
) -> CapacityResult:
    h_min, argmin = min_output_entropy(builder, settings)
    output = builder(*argmin)
    h_control = von_neumann_entropy(partial_trace(output, Subsystem.CONTROL))
    return CapacityResult.from_entropies(q, gamma, h_control, h_min, argmin)


def holevo_switch(
    q: float, gamma: float = 0.5, settings: Optional[SearchSettings] = None
) -> CapacityResult:
    """Capacity of two depolarising channels of strength q inside the switch."""
    q = _check_unit("q", q)
    gamma = _check_unit("gamma", gamma)
    builder = TargetStateBuilder.from_linear_map(
        lambda t: depolarizing_switch_raw(q, gamma, t), label=f"switch(q={q:g})"
    )
    return _capacity(builder, q, gamma, settings)


def holevo_classical(q: float) -> float:
    """Capacity of the definite-order composition, a Bloch shrink by (1 - q)^2."""
    q = _check_unit("q", q)
    shrink = (1 - q) ** 2
    return 1.0 - binary_entropy((1 + shrink) / 2)


def branch_control_stokes(s2: float, gamma: float) -> Tuple[float, float, float]:
    """Control Stokes vector of one branch carrying measured coherence s2.

    At gamma = 1/2 this is (0, s2, 0).
    """
    return (2 * gamma - 1, 2 * np.sqrt(gamma * (1 - gamma)) * s2, 0.0)


def branch_mixture_raw(
    s: np.ndarray, q: float, gamma: float, target: np.ndarray
) -> np.ndarray:
    p = depolarizing_mixture(q).p
    out = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            weight = p[i] * p[j]
            if not weight:
                continue
            u = pauli(i) @ pauli(j)
            control = stokes_matrix(*branch_control_stokes(s[i, j], gamma))
            out = out + weight * np.kron(control, u @ target @ u.conj().T)
    return out


def holevo_from_branches(
    s: Sequence[Sequence[float]],
    q: float,
    gamma: float = 0.5,
    settings: Optional[SearchSettings] = None,
) -> CapacityResult:
    """Capacity rebuilt from per-pair S2 values mixed with weights p_i p_j."""
    s = np.asarray(s, dtype=float)
    if s.shape != (4, 4):
        raise ArgumentError(f"Expected a 4x4 table of S2 values, got {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ArgumentError("Measured S2 values must be finite")
    if np.any(np.abs(s) > 1):
        raise ArgumentError("Measured |S2| exceeds 1")
    q = _check_unit("q", q)
    gamma = _check_unit("gamma", gamma)

    builder = TargetStateBuilder.from_linear_map(
        lambda t: branch_mixture_raw(s, q, gamma, t), label=f"branches(q={q:g})"
    )
    return _capacity(builder, q, gamma, settings)


def entropy_race(
    q: float, gamma: float = 0.5, settings: Optional[SearchSettings] = None
) -> Tuple[float, float]:
    result = holevo_switch(q, gamma, settings)
    return result.h_control, result.h_min


def capacity_sweep(
    qs: Sequence[float], gamma: float = 0.5, settings: Optional[SearchSettings] = None
) -> List[CapacityResult]:
    """holevo_switch over ascending q."""
    return [holevo_switch(q, gamma, settings) for q in sorted(qs)]


def capacity_minimum(
    qs: Sequence[float], gamma: float = 0.5, settings: Optional[SearchSettings] = None
) -> Tuple[float, float]:
    """(q, chi) of the smallest switch capacity on the grid.

    chi falls to a single interior minimum and rises again, so a ternary search
    over the sorted grid visits a logarithmic number of points.
    """
    grid = np.unique(np.asarray(qs, dtype=float))
    if grid.size == 0:
        raise ArgumentError("capacity_minimum needs at least one q")

    chis: Dict[int, float] = {}

    def chi_at(k: int) -> float:
        if k not in chis:
            chis[k] = holevo_switch(float(grid[k]), gamma, settings).chi
        return chis[k]

    lo, hi = 0, grid.size - 1
    while hi - lo > 2:
        third = (hi - lo) // 3
        left, right = lo + third, hi - third
        if chi_at(left) < chi_at(right):
            hi = right - 1
        elif chi_at(left) > chi_at(right):
            lo = left + 1
        else:
            lo, hi = left, right
    best = min(range(lo, hi + 1), key=chi_at)

    logger.debug(f"capacity minimum after {len(chis)} of {grid.size} grid points")
    return float(grid[best]), chis[best]


def entropy_crossover(
    qs: Sequence[float], gamma: float = 0.5, settings: Optional[SearchSettings] = None
) -> float:
    """First q where the control entropy grows faster than the minimum entropy."""
    results = capacity_sweep(qs, gamma, settings)
    q = np.array([r.q for r in results])
    slope_control = np.diff([r.h_control for r in results]) / np.diff(q)
    slope_min = np.diff([r.h_min for r in results]) / np.diff(q)
    midpoints = (q[1:] + q[:-1]) / 2
    # ignore q = 0 where both slopes start at zero
    ahead = np.nonzero((slope_control > slope_min) & (midpoints > midpoints[0]))[0]
    if len(ahead) == 0:
        raise ArgumentError("No crossover on the given grid")
    return float(midpoints[ahead[0]])
