import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instances import bilinear
from satmec.channel import (
    ChannelModel,
    FadingKind,
    FadingSpec,
    GridSpec,
    PathLossParams,
    RadioMap,
    build_radio_map,
    link_rate,
    load_radio_map,
    lookup_gain,
    lookup_gain_db,
    sample_fading,
    save_radio_map,
    shannon_rate,
)
from satmec.model import Link, LinkKind, Position

GRID = GridSpec((0.0, 0.0), 100.0, 11, 6)


def test_reference_distance_gives_g0():
    pl = PathLossParams(-40.0, 10.0, 3.0)
    assert pl.gain_db(10.0) == -40.0
    # clamped below d0
    assert pl.gain_db(1.0) == -40.0


def test_zero_exponent_uniform():
    m = build_radio_map(PathLossParams(-55.0, 1.0, 0.0), GRID, Position(300, 200, 50))
    assert np.all(m.values["user-access"] == -55.0)


def test_ten_km_example():
    assert PathLossParams(-60.0, 1e3, 2.0).gain_db(10e3) == pytest.approx(-80.0)


def test_map_values_follow_formula():
    tx = Position(250.0, 130.0, 20.0)
    pl = PathLossParams(-30.0, 1.0, 2.7)
    m = build_radio_map(pl, GRID, tx, LinkKind.FEEDER)
    xs, ys = GRID.axes()
    j, i = 4, 7
    d = math.sqrt((xs[i] - tx.x) ** 2 + (ys[j] - tx.y) ** 2 + tx.z**2)
    assert m.values["feeder"][j, i] == pytest.approx(-30.0 - 27.0 * math.log10(d))


def test_degenerate_grid():
    with pytest.raises(ValueError):
        GridSpec((0, 0), 0.0, 3, 3)
    with pytest.raises(ValueError):
        GridSpec((0, 0), 1.0, 1, 3)


def test_nonfinite_map_rejected():
    with pytest.raises(ValueError):
        RadioMap(GridSpec((0, 0), 1.0, 2, 2), {"x": np.array([[0.0, np.nan], [0.0, 0.0]])})


def _two_point_map(a, b):
    return RadioMap(GridSpec((0.0, 0.0), 10.0, 2, 2), {"user-access": np.array([[a, b], [a, b]])})


def test_lookup_on_node_exact():
    m = build_radio_map(PathLossParams(-30.0, 1.0, 2.0), GRID, Position(123, 45, 10))
    xs, ys = GRID.axes()
    for j in range(GRID.ny):
        for i in range(GRID.nx):
            assert lookup_gain_db(m, Position(xs[i], ys[j])) == m.values["user-access"][j, i]


def test_lookup_midpoint():
    m = _two_point_map(-60.0, -80.0)
    assert lookup_gain_db(m, Position(5.0, 0.0)) == pytest.approx(-70.0)
    assert lookup_gain(m, Position(5.0, 0.0)) == pytest.approx(1e-7)


def test_lookup_clamps():
    m = _two_point_map(-60.0, -80.0)
    assert lookup_gain_db(m, Position(-100.0, 50.0)) == -60.0
    assert lookup_gain_db(m, Position(1e6, -3.0)) == -80.0


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 1100), st.floats(-50, 600))
def test_lookup_matches_bilinear_oracle(x, y):
    m = build_radio_map(PathLossParams(-30.0, 1.0, 3.1), GRID, Position(420, 260, 35), LinkKind.USER_SATELLITE)
    xs, ys = GRID.axes()
    expected = bilinear(xs, ys, m.values["user-satellite"], x, y)
    assert lookup_gain_db(m, Position(x, y), "user-satellite") == pytest.approx(expected, abs=1e-9)


def test_lookup_continuous_across_cells():
    m = build_radio_map(PathLossParams(-30.0, 1.0, 3.1), GRID, Position(420, 260, 35))
    for x in (100.0, 500.0, 900.0):
        left = lookup_gain_db(m, Position(x - 1e-9, 250.0))
        right = lookup_gain_db(m, Position(x + 1e-9, 250.0))
        assert abs(left - right) < 1e-6


def test_multi_class_map_needs_class():
    m = RadioMap(GRID, {"a": np.zeros((6, 11)), "b": np.ones((6, 11))})
    with pytest.raises(ValueError):
        lookup_gain_db(m, Position(0, 0))
    assert lookup_gain_db(m, Position(0, 0), "b") == 1.0


def test_radio_map_file_round_trip(tmp_path):
    m1 = build_radio_map(PathLossParams(-30.0, 1.0, 3.1), GRID, Position(420, 260, 35))
    m2 = build_radio_map(PathLossParams(-20.0, 1.0, 2.0), GRID, Position(0, 0, 600e3), LinkKind.USER_SATELLITE)
    both = RadioMap(GRID, {**m1.values, **m2.values}, epoch=12.5)
    save_radio_map(both, tmp_path / "map.txt")
    assert load_radio_map(tmp_path / "map.txt") == both


def test_rate_zero_power():
    assert shannon_rate(0.0, 1e-10, 1e6, 4e-21) == 0.0


def test_rate_fifteen_db():
    snr = 10 ** 1.5
    noise = 4e-21
    B = 10e6
    p = snr * noise * B / 1e-10
    link = Link("a", "b", LinkKind.USER_ACCESS, B, noise)
    assert link_rate(p, 1e-10, link) / B == pytest.approx(5.0278, abs=1e-4)
    assert link_rate(p, 1e-10, link) == pytest.approx(50.278e6, rel=1e-4)


@pytest.mark.parametrize("snr_db", [30.0, 40.0, 50.0])
def test_doubling_power_adds_one_bit(snr_db):
    B = 1e6
    p = 10 ** (snr_db / 10) * 4e-21 * B / 1e-10
    gain = shannon_rate(2 * p, 1e-10, B, 4e-21) - shannon_rate(p, 1e-10, B, 4e-21)
    assert gain == pytest.approx(B, rel=0.05)


def test_negative_power_rejected():
    with pytest.raises(ValueError):
        shannon_rate(-1.0, 1.0, 1.0, 1.0)


def test_rate_increasing_concave():
    ps = np.linspace(1e-3, 1.0, 500)
    r = shannon_rate(ps, 3e-12, 2e6, 4e-21)
    assert np.all(np.diff(r) > 0)
    assert np.all(np.diff(r, 2) <= 1e-9 * r[1:-1])


def test_fading_none_is_one():
    rng = np.random.default_rng(0)
    assert sample_fading(FadingSpec(), rng) == 1.0
    assert np.all(sample_fading(FadingSpec(FadingKind.RICIAN, math.inf), rng, 10) == 1.0)


@pytest.mark.parametrize("spec", [FadingSpec(FadingKind.RAYLEIGH), FadingSpec(FadingKind.RICIAN, 3.0)])
def test_fading_unit_mean(spec):
    draws = sample_fading(spec, np.random.default_rng(2024), 100_000)
    assert np.all(draws >= 0)
    assert abs(draws.mean() - 1.0) < 0.01


def test_rician_concentrates_with_k():
    rng = np.random.default_rng(5)
    assert sample_fading(FadingSpec(FadingKind.RICIAN, 1e6), rng, 10_000).std() < 0.01


def test_fading_spec_validation():
    with pytest.raises(ValueError):
        FadingSpec(FadingKind.RICIAN, -1.0)
    assert FadingSpec("rayleigh").kind is FadingKind.RAYLEIGH


def test_channel_model_routes_through_maps():
    params = {"user-access": PathLossParams(-40.0, 1.0, 3.0), "feeder": PathLossParams(-5.0, 1.0, 2.0)}
    uav = Position(500.0, 300.0, 100.0)
    ground = Position(333.0, 111.0, 0.0)
    closed = ChannelModel(params)
    mapped = ChannelModel(params, GRID)
    exact = closed.gain_db("user-access", ground, uav)
    assert exact == pytest.approx(-40.0 - 30.0 * math.log10(ground.distance_to(uav)))
    # interpolated, so close but not identical off the lattice
    assert mapped.gain_db("user-access", ground, uav) == pytest.approx(exact, abs=0.5)
    # both endpoints airborne or unmapped class: closed form
    a, b = Position(0, 0, 100), Position(10, 0, 600e3)
    assert mapped.gain_db("feeder", a, b) == closed.gain_db("feeder", a, b)
    with pytest.raises(KeyError):
        closed.gain("isl", a, b)
