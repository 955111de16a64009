import io

import numpy as np
import pytest

from app.capacity import holevo_switch
from app.config import SearchSettings
from app.exceptions import ArgumentError, ParseError
from app.experiment import (
    BUNDLED_TABLE_PATH,
    branch_table,
    dump_measurements,
    ideal_measurements,
    load_measurements,
    monte_carlo_band,
    phase_insensitive_distance,
    prism_rotation,
    prism_unitary,
    reconstruct_capacity,
    verify_hardware_settings,
    visibility_band,
)
from app.qmath import pauli
from app.schema import VisibilityModel


MC_SEARCH = SearchSettings(theta_points=16, phi_points=32, min_step=1e-6)
VISIBILITY = VisibilityModel(v=0.853, v_err=0.018)


@pytest.fixture(scope="module")
def table():
    return load_measurements()


def test_bundled_table(table):
    assert len(table.records) == 16
    assert table.record(0, 0).s2 == pytest.approx(0.8547)
    assert table.record(3, 2).s2 == pytest.approx(-0.8575)
    assert table.record(2, 3).sigma == pytest.approx(0.0008)
    assert table.record(1, 2).s2 == pytest.approx(-0.8434)
    assert table.metadata == str(BUNDLED_TABLE_PATH)


def test_measured_signs_match_theory(table):
    for i in range(4):
        for j in range(4):
            commute = i == 0 or j == 0 or i == j
            assert (table.record(i, j).s2 > 0) == commute


@pytest.mark.parametrize("q, low, high", [(1.0, 3.26e-2, 3.56e-2), (0.78, 2.00e-2, 2.30e-2)])
def test_reconstruction_matches_reported_values(table, q, low, high):
    chi = reconstruct_capacity(table, q).chi
    assert low <= chi <= high


@pytest.mark.parametrize("q", [1.0, 0.78])
def test_visibility_band_contains_reconstruction(table, q):
    lo, hi = visibility_band(VISIBILITY, q)
    assert lo < hi
    assert lo <= reconstruct_capacity(table, q).chi <= hi


def test_visibility_band_values(fast_search):
    lo, hi = visibility_band(VISIBILITY, 1.0, settings=fast_search)
    assert lo == pytest.approx(0.03317, abs=5e-5)
    assert hi == pytest.approx(0.03627, abs=5e-5)


def test_zero_width_band_equals_scaled_ideal(fast_search):
    for q in np.linspace(0, 1, 6):
        lo, hi = visibility_band(VisibilityModel(v=0.9, v_err=0.0), q, settings=fast_search)
        expected = reconstruct_capacity(ideal_measurements(0.9), q, settings=fast_search).chi
        assert lo == hi
        assert lo == pytest.approx(expected, abs=1e-12)


def test_visibility_bounds_are_clamped():
    assert VisibilityModel(v=0.99, v_err=0.05).bounds() == pytest.approx((0.94, 1.0))
    with pytest.raises(ArgumentError):
        VisibilityModel(v=1.2)


def test_reconstruction_at_q_zero_below_one(table):
    assert reconstruct_capacity(table, 0.0).chi < 1


def test_ideal_data_reproduces_switch(fast_search):
    chi = reconstruct_capacity(ideal_measurements(), 1.0, settings=fast_search).chi
    assert chi == pytest.approx(4.88e-2, abs=5e-5)
    assert chi == pytest.approx(holevo_switch(1.0, 0.5, fast_search).chi, abs=1e-10)


def test_monte_carlo_band(table):
    mean, std = monte_carlo_band(table, 1.0, n=100, seed=7, settings=MC_SEARCH)
    assert mean == pytest.approx(reconstruct_capacity(table, 1.0, settings=MC_SEARCH).chi, abs=2e-3)
    assert 0 < std < 1e-3


def test_monte_carlo_is_seeded(table):
    first = monte_carlo_band(table, 0.5, n=100, seed=3, settings=MC_SEARCH)
    second = monte_carlo_band(table, 0.5, n=100, seed=3, settings=MC_SEARCH)
    assert first == second


def test_monte_carlo_needs_enough_samples(table):
    with pytest.raises(ArgumentError):
        monte_carlo_band(table, 1.0, n=50)


def test_load_from_bytes_and_stream():
    text = BUNDLED_TABLE_PATH.read_text(encoding="utf-8")
    from_bytes = load_measurements(text.encode("utf-8"))
    from_stream = load_measurements(io.StringIO(text))
    assert from_bytes.s2_matrix() == from_stream.s2_matrix()


def test_dump_is_loadable(table):
    again = load_measurements(dump_measurements(table).encode("utf-8"))
    assert again.s2_matrix() == table.s2_matrix()
    assert again.sigma_matrix() == table.sigma_matrix()


def _rows(*lines):
    return ("i,j,s2,sigma\n" + "\n".join(lines) + "\n").encode("utf-8")


def _full_rows(**override):
    rows = {(i, j): f"{i},{j},0.5,0.01" for i in range(4) for j in range(4)}
    rows.update(override)
    return list(rows.values())


def test_parse_bad_header():
    with pytest.raises(ParseError) as e:
        load_measurements(b"a,b,c,d\n0,0,1,0\n")
    assert e.value.row == 1


def test_parse_malformed_value():
    rows = _full_rows()
    rows[4] = "1,0,abc,0.01"
    with pytest.raises(ParseError) as e:
        load_measurements(_rows(*rows))
    assert e.value.row == 6
    assert "row 6" in str(e.value)


def test_parse_out_of_range_coherence():
    rows = _full_rows()
    rows[0] = "0,0,1.5,0.01"
    with pytest.raises(ParseError) as e:
        load_measurements(_rows(*rows))
    assert e.value.row == 2


def test_parse_bad_index():
    rows = _full_rows()
    rows[15] = "3,4,0.5,0.01"
    with pytest.raises(ParseError) as e:
        load_measurements(_rows(*rows))
    assert e.value.row == 17


def test_parse_duplicate_pair():
    rows = _full_rows() + ["2,2,0.5,0.01"]
    with pytest.raises(ParseError) as e:
        load_measurements(_rows(*rows))
    assert e.value.row == 18


def test_parse_missing_pair():
    rows = _full_rows()[:-1]
    with pytest.raises(ParseError, match=r"missing pair\(s\) \(3, 3\)"):
        load_measurements(_rows(*rows))


def test_parse_unreadable_path(tmp_path):
    with pytest.raises(ParseError):
        load_measurements(tmp_path / "absent.csv")


def test_hardware_settings_reproduce_paulis():
    checks = verify_hardware_settings()
    assert [c.pauli_index for c in checks] == [0, 1, 2, 3]
    assert all(c.passed and c.distance <= 1e-12 for c in checks)


def test_hardware_sensitivity_to_prism_angle():
    checks = verify_hardware_settings(perturbation=np.radians(0.5))
    for check in checks:
        assert not check.passed
        assert check.distance == pytest.approx(0.0175, abs=5e-4)


def test_global_phase_is_ignored():
    assert phase_insensitive_distance(1j * pauli(2), pauli(2)) == pytest.approx(0, abs=1e-15)
    assert phase_insensitive_distance(pauli(1), pauli(3)) > 0.5


def test_prism_unitary_takes_one_or_two_prisms():
    with pytest.raises(ArgumentError):
        prism_unitary(0.0, ())


def test_branch_table():
    rows = {(r.i, r.j): r for r in branch_table()}
    assert len(rows) == 16
    assert rows[0, 0].control == "D" and rows[0, 0].target == (0, 1)
    assert rows[0, 2].target == pytest.approx((-1j, 0))
    assert rows[1, 2].control == "A" and rows[1, 2].s2 == -1
    assert rows[3, 3].control == "D"


@pytest.mark.parametrize("s2, sigma", [("nan", "0.01"), ("0.5", "nan"), ("inf", "0.01")])
def test_parse_non_finite_values(s2, sigma):
    rows = _full_rows()
    rows[0] = f"0,0,{s2},{sigma}"
    with pytest.raises(ParseError) as e:
        load_measurements(_rows(*rows))
    assert e.value.row == 2


def test_parse_invalid_utf8(tmp_path):
    with pytest.raises(ParseError, match="UTF-8"):
        load_measurements(b"i,j,s2,sigma\n0,0,0.85\xff,0\n")

    path = tmp_path / "latin.csv"
    path.write_bytes(b"i,j,s2,sigma\n0,0,0.85\xff,0\n")
    with pytest.raises(ParseError, match="UTF-8"):
        load_measurements(path)


def test_monte_carlo_without_uncertainty(fast_search):
    meas = ideal_measurements(0.9)
    mean, std = monte_carlo_band(meas, 0.37, n=100, settings=fast_search)
    assert std == 0.0
    assert mean == reconstruct_capacity(meas, 0.37, settings=fast_search).chi


def test_visibility_raises_capacity(fast_search):
    for q in (1.0, 0.78):
        chis = [
            visibility_band(VisibilityModel(v=v), q, settings=fast_search)[0]
            for v in np.linspace(0.5, 1.0, 6)
        ]
        assert all(b >= a - 1e-12 for a, b in zip(chis, chis[1:]))


def test_prism_unitary_is_unitary(rng):
    for _ in range(1000):
        phi = rng.uniform(0, 2 * np.pi)
        thetas = tuple(rng.uniform(-np.pi, np.pi, size=rng.integers(1, 3)))
        u = prism_unitary(phi, thetas)
        assert np.allclose(u @ u.conj().T, np.eye(2), atol=1e-12)


def test_prism_rotation_is_a_reflection():
    r = prism_rotation(0.3)
    assert np.allclose(r @ r, np.eye(2), atol=1e-15)
    assert np.linalg.det(r).real == pytest.approx(-1.0)


def test_hardware_settings_match_without_phase_alignment():
    checks = verify_hardware_settings()
    assert all(check.raw_distance <= 1e-12 for check in checks)
