import time

import numpy as np
import pytest

from app.capacity import (
    TargetStateBuilder,
    branch_control_stokes,
    branch_mixture_raw,
    capacity_minimum,
    capacity_sweep,
    entropy_crossover,
    entropy_race,
    holevo_classical,
    holevo_from_branches,
    holevo_switch,
    min_output_entropy,
)
from app.channels import amplitude_damping_kraus, apply_channel
from app.config import SearchSettings
from app.exceptions import ArgumentError
from app.experiment import load_measurements
from app.qmath import DensityMatrix, binary_entropy, pure_target, spectral_entropies
from app.schema import CapacityResult
from app.switch import depolarizing_switch_raw, theoretical_signs


def test_full_depolarization(fast_search):
    result = holevo_switch(1.0, 0.5, fast_search)
    assert result.chi == pytest.approx(4.88e-2, abs=5e-5)
    assert result.h_control == pytest.approx(0.95443, abs=1e-5)
    assert result.h_min == pytest.approx(1.90564, abs=1e-5)


def test_full_depolarization_default_search():
    assert holevo_switch(1.0).chi == pytest.approx(4.88e-2, abs=5e-5)


def test_clean_channels_carry_one_bit(fast_search):
    result = holevo_switch(0.0, 0.5, fast_search)
    assert result.chi == pytest.approx(1.0, abs=1e-10)
    assert result.h_control == pytest.approx(0.0, abs=1e-10)


def test_capacity_minimum(fast_search):
    q, chi = capacity_minimum(np.linspace(0, 1, 1001), 0.5, fast_search)
    assert q == pytest.approx(0.7778, abs=2e-3)
    assert chi == pytest.approx(3.32e-2, abs=5e-5)


def test_entropy_crossover_sits_at_minimum(fast_search):
    qs = np.linspace(0, 1, 101)
    assert entropy_crossover(qs, 0.5, fast_search) == pytest.approx(0.7778, abs=0.01)


def test_entropy_race_components(fast_search):
    h_control, h_min = entropy_race(0.5, 0.5, fast_search)
    assert h_control == pytest.approx(binary_entropy((1 + (1 - 3 * 0.25 / 4)) / 2), abs=1e-10)
    assert 0 < h_min < 2


def test_capacity_sweep_is_ascending(fast_search):
    results = capacity_sweep([0.9, 0.1, 0.5], 0.5, fast_search)
    assert [r.q for r in results] == [0.1, 0.5, 0.9]


def test_classical_endpoints():
    assert holevo_classical(0.0) == 1.0
    assert holevo_classical(1.0) <= 1e-12
    assert holevo_classical(0.5) == pytest.approx(0.04557, abs=1e-5)


def test_classical_monotone():
    values = [holevo_classical(q) for q in np.linspace(0, 1, 101)]
    assert all(a > b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("q", [-0.01, 1.01])
def test_strength_domain(q):
    with pytest.raises(ArgumentError):
        holevo_classical(q)
    with pytest.raises(ArgumentError):
        holevo_switch(q)


def test_gamma_one_half_is_optimal(fast_search):
    for q in (0.3, 0.7778, 1.0):
        best = holevo_switch(q, 0.5, fast_search).chi
        for gamma in (0.05, 0.2, 0.4, 0.6, 0.8, 0.95):
            assert holevo_switch(q, gamma, fast_search).chi <= best + 1e-10


@pytest.mark.parametrize("gamma", [0.0, 1.0])
def test_definite_control_matches_classical(gamma, fast_search):
    for q in np.linspace(0, 1, 11):
        chi = holevo_switch(q, gamma, fast_search).chi
        assert chi == pytest.approx(holevo_classical(q), abs=1e-8)


def test_switch_beats_definite_order_at_full_noise(fast_search):
    assert holevo_switch(1.0, 0.5, fast_search).chi > holevo_classical(1.0)


def test_ideal_branches_reproduce_switch(fast_search):
    signs = theoretical_signs()
    for q in np.linspace(0, 1, 50):
        for gamma in (0.5, 0.3):
            expected = holevo_switch(q, gamma, fast_search).chi
            got = holevo_from_branches(signs, q, gamma, fast_search).chi
            assert got == pytest.approx(expected, abs=1e-10)


def test_branch_control_stokes():
    assert branch_control_stokes(-0.8, 0.5) == pytest.approx((0.0, -0.8, 0.0))
    assert branch_control_stokes(1.0, 1.0) == pytest.approx((1.0, 0.0, 0.0))


def test_branches_validate_input():
    with pytest.raises(ArgumentError):
        holevo_from_branches(np.full((4, 4), 1.2), 0.5)
    with pytest.raises(ArgumentError):
        holevo_from_branches(np.ones((3, 3)), 0.5)


def test_uniform_coherence_scales_down_capacity(fast_search):
    signs = theoretical_signs()
    ideal = holevo_from_branches(signs, 1.0, 0.5, fast_search).chi
    degraded = holevo_from_branches(0.853 * signs, 1.0, 0.5, fast_search).chi
    assert degraded < ideal


def test_builder_rejects_bad_transfer():
    with pytest.raises(ArgumentError):
        TargetStateBuilder(np.zeros((4, 4)))


def test_builder_scalar_and_batch_agree():
    builder = TargetStateBuilder.from_linear_map(lambda t: depolarizing_switch_raw(0.4, 0.5, t))
    single = builder(0.9, 2.1)
    batch = builder.batch(np.array([0.9]), np.array([2.1]))
    assert isinstance(single, DensityMatrix)
    assert np.allclose(single.matrix, batch[0], atol=1e-14)


def test_min_output_entropy_with_callable_builder():
    channel = amplitude_damping_kraus(0.5)

    def builder(theta, phi):
        return apply_channel(channel, DensityMatrix(matrix=pure_target(theta, phi)))

    settings = SearchSettings(theta_points=5, phi_points=4, min_step=1e-4)
    h_min, (theta, _) = min_output_entropy(builder, settings)
    # |0> is a fixed point of amplitude damping
    assert h_min == pytest.approx(0.0, abs=1e-6)
    assert theta == pytest.approx(0.0, abs=1e-3)


def test_capacity_result_identity_enforced():
    with pytest.raises(ArgumentError):
        CapacityResult(q=0.5, gamma=0.5, h_control=0.5, h_min=1.0, chi=0.9)


def test_capacity_minimum_default_search_is_fast():
    start = time.perf_counter()
    q, chi = capacity_minimum(np.linspace(0, 1, 1001), 0.5, SearchSettings())
    assert time.perf_counter() - start < 10
    assert q == pytest.approx(0.7778, abs=2e-3)
    assert chi == pytest.approx(3.32e-2, abs=5e-5)


def test_capacity_minimum_at_grid_edge(fast_search):
    q, chi = capacity_minimum(np.linspace(0, 0.5, 51), 0.5, fast_search)
    assert q == 0.5
    assert chi == pytest.approx(holevo_switch(0.5, 0.5, fast_search).chi, abs=1e-12)


def test_switch_capacity_has_single_interior_minimum(fast_search):
    qs = np.linspace(0, 1, 100)
    chis = np.array([r.chi for r in capacity_sweep(qs, 0.5, fast_search)])
    assert np.all(chis > 0)

    lowest = int(np.argmin(chis))
    assert 0 < lowest < len(qs) - 1
    assert qs[lowest] == pytest.approx(0.7778, abs=0.006)
    steps = np.diff(chis)
    assert np.all(steps[:lowest] < 0)
    assert np.all(steps[lowest:] > 0)


@pytest.fixture(scope="module")
def measured_builder():
    s = load_measurements().s2_matrix()
    return TargetStateBuilder.from_linear_map(
        lambda t: branch_mixture_raw(np.asarray(s), 1.0, 0.5, t), label="measured"
    )


def _entropies(builder, thetas, phis):
    stack = builder.batch(thetas, phis)
    return spectral_entropies((stack + np.conj(np.swapaxes(stack, 1, 2))) / 2)


def test_min_output_entropy_against_random_sample(measured_builder):
    rng = np.random.default_rng(77)
    thetas = np.arccos(rng.uniform(-1, 1, 10_000))
    phis = rng.uniform(0, 2 * np.pi, 10_000)
    sampled = float(_entropies(measured_builder, thetas, phis).min())

    h_min, _ = min_output_entropy(measured_builder)
    assert h_min <= sampled + 1e-12
    assert sampled - h_min <= 1e-4


def test_refinement_stays_close_to_grid(measured_builder):
    settings = SearchSettings()
    thetas = np.linspace(0, np.pi, settings.theta_points)
    phis = np.arange(settings.phi_points) * (2 * np.pi / settings.phi_points)
    grid_t, grid_p = np.meshgrid(thetas, phis, indexing="ij")
    grid_min = float(_entropies(measured_builder, grid_t.ravel(), grid_p.ravel()).min())

    h_min, (theta, phi) = min_output_entropy(measured_builder, settings)
    assert 0 <= grid_min - h_min <= 1e-4
    assert 0 <= theta <= np.pi
    assert 0 <= phi <= 2 * np.pi


def test_branches_reject_non_finite():
    s = theoretical_signs().astype(float)
    s[1, 2] = np.nan
    with pytest.raises(ArgumentError):
        holevo_from_branches(s, 0.5)
