"""Invariant suites behind ``causal-switch validate``.

Each suite draws its random inputs from a fixed seed so reports are
reproducible run to run.
"""

from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from app.capacity import holevo_classical, holevo_switch
from app.channels import (
    KrausChannel,
    amplitude_damping_kraus,
    apply_channel,
    channel_by_kind,
    depolarizing_kraus,
    phase_damping_kraus,
    validate_cptp,
)
from app.config import SearchSettings
from app.experiment import verify_hardware_settings
from app.logger import logger
from app.qmath import random_density
from app.schema import ChannelKind, CheckResult, ValidationReport, ValidationSuite
from app.switch import (
    SwitchInput,
    apply_switch,
    commutation_sign,
    control_marginal_stokes,
    control_s2,
    depolarizing_switch_mixture,
    pauli_pair_switch,
    project_control,
)


SEED = 20190315
RANDOM_DRAWS = 100

# depolarising switch outputs have a target-independent entropy
VALIDATION_SEARCH = SearchSettings(theta_points=8, phi_points=16)


def _check(name: str, deviation: float, tolerance: float) -> CheckResult:
    return CheckResult(
        name=name,
        deviation=float(deviation),
        tolerance=tolerance,
        passed=bool(deviation <= tolerance),
    )


def cptp_suite(kinds: Optional[Sequence[ChannelKind]] = None) -> List[CheckResult]:
    kinds = list(ChannelKind) if kinds is None else [ChannelKind(k) for k in kinds]
    rng = np.random.default_rng(SEED)
    checks = []
    for strength in np.linspace(0, 1, 11):
        for ch in (channel_by_kind(kind, strength) for kind in kinds):
            report = validate_cptp(ch)
            checks.append(_check(f"{ch.label} completeness", report.deviation, report.tolerance))

    doubled = validate_cptp(KrausChannel(operators=[np.eye(2), np.eye(2)], label="{I, I}"))
    checks.append(_check("{I, I} is rejected", 0.0 if not doubled.passed else 1.0, 0.0))

    worst_trace = 0.0
    worst_psd = 0.0
    for _ in range(RANDOM_DRAWS):
        strength = rng.uniform()
        rho = random_density(rng)
        for ch in (channel_by_kind(kind, strength) for kind in kinds):
            out = apply_channel(ch, rho).matrix
            worst_trace = max(worst_trace, abs(np.trace(out) - 1))
            worst_psd = max(worst_psd, -min(0.0, float(np.linalg.eigvalsh(out)[0])))
    checks.append(_check("apply_channel preserves trace", worst_trace, 1e-12))
    checks.append(_check("apply_channel preserves positivity", worst_psd, 1e-10))
    return checks


def switch_suite() -> List[CheckResult]:
    rng = np.random.default_rng(SEED)
    checks = []
    target = SwitchInput(gamma=0.5, target=np.diag([0.0, 1.0]))
    for i in range(4):
        for j in range(4):
            s2 = control_s2(pauli_pair_switch(i, j, target))
            checks.append(
                _check(f"S2(sigma_{i}, sigma_{j}) sign", abs(s2 - commutation_sign(i, j)), 1e-12)
            )

    worst_oracle = 0.0
    worst_preserved = 0.0
    worst_s2 = 0.0
    for _ in range(RANDOM_DRAWS):
        q, gamma = rng.uniform(), rng.uniform()
        input = SwitchInput(gamma=gamma, target=random_density(rng))
        mixed = depolarizing_switch_mixture(q, input)
        kraus = apply_switch(depolarizing_kraus(q), depolarizing_kraus(q), input)
        worst_oracle = max(worst_oracle, float(np.max(np.abs(mixed.matrix - kraus.matrix))))

        s_in = control_marginal_stokes(input.product_state())
        s_out = control_marginal_stokes(mixed)
        worst_preserved = max(
            worst_preserved, abs(s_out.s1 - s_in.s1), abs(s_out.s3 - s_in.s3)
        )
        worst_s2 = max(worst_s2, abs(s_out.s2 - s_in.s2 * (1 - 3 * q**2 / 4)))
    checks.append(_check("pauli mixture equals Kraus path", worst_oracle, 1e-12))
    checks.append(_check("S1 and S3 preserved", worst_preserved, 1e-10))
    checks.append(_check("S2 scales by 1 - 3q^2/4", worst_s2, 1e-10))
    return checks


def capacity_suite(settings: Optional[SearchSettings] = None) -> List[CheckResult]:
    settings = settings or VALIDATION_SEARCH
    checks = [
        _check(
            "chi(q=1, gamma=1/2) = 4.88e-2",
            abs(holevo_switch(1.0, 0.5, settings).chi - 4.88e-2),
            5e-5,
        ),
        _check("classical chi(q=0) = 1", abs(holevo_classical(0.0) - 1.0), 0.0),
        _check("classical chi(q=1) = 0", abs(holevo_classical(1.0)), 1e-12),
    ]
    worst_definite = 0.0
    for q in np.linspace(0, 1, 11):
        for gamma in (0.0, 1.0):
            chi = holevo_switch(q, gamma, settings).chi
            worst_definite = max(worst_definite, abs(chi - holevo_classical(q)))
    checks.append(_check("definite order matches classical", worst_definite, 1e-8))
    return checks


def hardware_suite() -> List[CheckResult]:
    return [check.to_check() for check in verify_hardware_settings()]


def _amplitude_expected(rho: np.ndarray, gamma: float, p: float, theta: float, phi: float):
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    cross = np.sqrt(p * (1 - p)) * np.cos(phi) * np.sin(2 * theta)
    common = p * c2 + (1 - p) * s2 + cross
    r00 = rho[0, 0] * common + rho[1, 1] * gamma * (
        (2 - gamma) * p * c2
        + (2 - gamma) * (1 - p) * s2
        + 2 * np.sqrt(1 - gamma) * cross
    )
    return np.array(
        [
            [r00, rho[0, 1] * (1 - gamma) * common],
            [rho[1, 0] * (1 - gamma) * common, rho[1, 1] * (1 - gamma) ** 2 * common],
        ]
    )


def _phase_expected(rho: np.ndarray, strength: float, p: float, theta: float, phi: float):
    common = (
        p * np.cos(theta) ** 2
        + (1 - p) * np.sin(theta) ** 2
        + np.sqrt(p * (1 - p)) * np.cos(phi) * np.sin(2 * theta)
    )
    decay = (1 - strength) ** 2
    return common * np.array(
        [[rho[0, 0], decay * rho[0, 1]], [decay * rho[1, 0], rho[1, 1]]]
    )


def damping_suite(draws: int = 200) -> List[CheckResult]:
    rng = np.random.default_rng(SEED)
    worst_amp = worst_phase = worst_full_amp = worst_full_phase = 0.0
    for _ in range(draws):
        strength, p = rng.uniform(), rng.uniform()
        theta, phi = rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)
        rho = random_density(rng)
        input = SwitchInput(gamma=p, target=rho)

        amp = amplitude_damping_kraus(strength)
        got = project_control(apply_switch(amp, amp, input), theta, phi)
        expected = _amplitude_expected(rho.matrix, strength, p, theta, phi)
        worst_amp = max(worst_amp, float(np.max(np.abs(got - expected))))

        ph = phase_damping_kraus(strength)
        got = project_control(apply_switch(ph, ph, input), theta, phi)
        expected = _phase_expected(rho.matrix, strength, p, theta, phi)
        worst_phase = max(worst_phase, float(np.max(np.abs(got - expected))))

        full = amplitude_damping_kraus(1.0)
        out = project_control(apply_switch(full, full, input), theta, phi)
        worst_full_amp = max(worst_full_amp, float(np.max(np.abs(out[0, 1:]))), abs(out[1, 1]))

        full = phase_damping_kraus(1.0)
        out = project_control(apply_switch(full, full, input), theta, phi)
        worst_full_phase = max(worst_full_phase, abs(out[0, 1]), abs(out[1, 0]))

    return [
        _check("amplitude damping conformance", worst_amp, 1e-10),
        _check("phase damping conformance", worst_phase, 1e-10),
        _check("full amplitude damping leaves |0><0|", worst_full_amp, 1e-10),
        _check("full phase damping removes coherence", worst_full_phase, 1e-12),
    ]


SUITES: Dict[ValidationSuite, Callable[[], List[CheckResult]]] = {
    ValidationSuite.CPTP: cptp_suite,
    ValidationSuite.SWITCH: switch_suite,
    ValidationSuite.CAPACITY: capacity_suite,
    ValidationSuite.HARDWARE: hardware_suite,
    ValidationSuite.DAMPING: damping_suite,
}


def run_suite(
    suite: Union[ValidationSuite, str] = ValidationSuite.ALL,
    channels: Optional[Sequence[ChannelKind]] = None,
) -> ValidationReport:
    """Run one suite or all of them; ``channels`` narrows the families the cptp suite covers."""
    suite = ValidationSuite(suite)
    selected = list(SUITES) if suite is ValidationSuite.ALL else [suite]

    report = ValidationReport(suite=suite.value)
    for name in selected:
        checks = cptp_suite(channels) if name is ValidationSuite.CPTP else SUITES[name]()
        for check in checks:
            if check.passed:
                logger.info(f"{name.value}: {check}")
            else:
                logger.warning(f"{name.value}: {check}")
            report.checks.append(check)
    return report
