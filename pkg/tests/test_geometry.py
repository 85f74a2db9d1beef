import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satmec.geometry import (
    SPEED_OF_LIGHT,
    OrbitDescriptor,
    OrbitKind,
    VisibilityWindow,
    lloyd,
    merge_windows,
    nearest_association,
    place_uavs,
    propagation_delay,
    satellite_position,
    visibility_windows,
)
from satmec.model import Node, NodeKind, Position

coords = st.floats(-1e7, 1e7, allow_nan=False)
positions = st.builds(Position, coords, coords, st.floats(0, 4e7))


def leo(radius=1000e3, speed=7000.0, period=3000.0, origin=(-2000e3, 0.0), direction=(1.0, 0.0)):
    return OrbitDescriptor(OrbitKind.LEO_TRACK, 600e3, radius, origin, direction, speed, period)


def test_delay_zero_distance():
    assert propagation_delay(Position(3, 4, 5), Position(3, 4, 5)) == 0.0


@pytest.mark.parametrize("h, expected_ms, places", [(600e3, 2.0014, 4), (35_786e3, 119.37, 2)])
def test_delay_overhead(h, expected_ms, places):
    d = propagation_delay(Position(0, 0), Position(0, 0, h))
    assert d == pytest.approx(h / SPEED_OF_LIGHT, rel=1e-12)
    assert round(d * 1e3, places) == expected_ms


@given(positions, positions, positions)
def test_delay_metric(a, b, c):
    assert propagation_delay(a, b) == propagation_delay(b, a)
    assert propagation_delay(a, c) <= propagation_delay(a, b) + propagation_delay(b, c) + 1e-12


def test_geo_is_fixed():
    geo = OrbitDescriptor(OrbitKind.GEO, 35_786e3, 5e6, origin=(1.0, 2.0))
    assert satellite_position(geo, 0) == satellite_position(geo, 12345.6) == Position(1.0, 2.0, 35_786e3)


def test_leo_periodic_and_speed():
    o = leo()
    assert satellite_position(o, 0) == satellite_position(o, o.pass_period)
    p = satellite_position(o, 10.0)
    assert p.x - o.origin[0] == pytest.approx(70e3)
    assert p.z == 600e3


def test_direction_normalized():
    o = leo(direction=(3.0, 4.0))
    assert o.direction == pytest.approx((0.6, 0.8))
    p = satellite_position(o, 1.0)
    assert math.hypot(p.x - o.origin[0], p.y - o.origin[1]) == pytest.approx(7000.0)


@pytest.mark.parametrize(
    "kwargs",
    [dict(altitude=0.0), dict(coverage_radius=-1.0), dict(pass_period=0.0), dict(ground_speed=0.0)],
)
def test_orbit_validation(kwargs):
    base = dict(kind=OrbitKind.LEO_TRACK, altitude=1.0, coverage_radius=1.0, ground_speed=1.0, pass_period=1.0)
    with pytest.raises(ValueError):
        OrbitDescriptor(**{**base, **kwargs})


def test_window_invariant():
    with pytest.raises(ValueError):
        VisibilityWindow(2.0, 2.0)


def test_geo_windows():
    geo = OrbitDescriptor(OrbitKind.GEO, 35_786e3, 1000e3)
    assert visibility_windows(geo, Position(10e3, 0), 500.0) == [VisibilityWindow(0.0, 500.0)]
    assert visibility_windows(geo, Position(2000e3, 0), 500.0) == []


def test_never_covered():
    assert visibility_windows(leo(), Position(0, 1500e3), 1e5) == []


def test_overhead_pass_length():
    o = leo()
    windows = visibility_windows(o, Position(0, 0), o.pass_period)
    assert len(windows) == 1
    assert windows[0].length == pytest.approx(2e6 / 7000, rel=1e-12)
    assert windows[0].start == pytest.approx(1000e3 / 7000)


def test_windows_match_sampling():
    """Brute-force oracle: sample the ground distance densely and compare coverage."""
    o = leo(period=500.0)
    g = Position(300e3, 400e3)
    T = 1700.0
    windows = visibility_windows(o, g, T)
    ts = np.linspace(0, T, 20001)[:-1]
    inside = np.array([satellite_position(o, t).ground_distance_to(g) <= o.coverage_radius for t in ts])
    covered = np.array([any(w.start <= t <= w.end for w in windows) for t in ts])
    # disagreement only within one sample of a window edge
    step = ts[1] - ts[0]
    for t in ts[inside != covered]:
        assert min(min(abs(t - w.start), abs(t - w.end)) for w in windows) <= step


@settings(max_examples=60, deadline=None)
@given(st.floats(1.0, 4999.0), st.floats(0.0, 1e6), st.floats(-1.5e6, 1.5e6))
def test_windows_split_invariant(split, gx, gy):
    o = leo(period=900.0)
    T = 5000.0
    g = Position(gx, gy)
    whole = visibility_windows(o, g, T)
    parts = merge_windows(visibility_windows(o, g, (0.0, split)) + visibility_windows(o, g, (split, T)))
    assert len(whole) == len(parts)
    for a, b in zip(whole, parts):
        assert a.start == pytest.approx(b.start) and a.end == pytest.approx(b.end)
    for a, b in zip(whole, whole[1:]):
        assert a.end < b.start


def test_place_one_uav_centroid():
    (u,) = place_uavs([Position(0, 0), Position(2000, 0)], 1, 100.0)
    assert (u.x, u.y, u.z) == pytest.approx((1000.0, 0.0, 100.0))


def test_place_one_per_mtd_and_extras():
    pts = [Position(0, 0), Position(5, 0), Position(0, 7)]
    out = place_uavs(pts, 3, 50.0)
    assert [(p.x, p.y, p.z) for p in out] == [(0, 0, 50.0), (5, 0, 50.0), (0, 7, 50.0)]
    extra = place_uavs(pts, 5, 50.0)
    assert extra[3] == extra[4] == Position(5 / 3, 7 / 3, 50.0)


def _best_two_partition(pts):
    best = None
    for mask in range(1, 2 ** (len(pts) - 1)):
        a = pts[[bool(mask >> i & 1) for i in range(len(pts))]]
        b = pts[[not (mask >> i & 1) for i in range(len(pts))]]
        cost = ((a - a.mean(0)) ** 2).sum() + ((b - b.mean(0)) ** 2).sum()
        if best is None or cost < best[0] - 1e-9:
            best = (cost, sorted([tuple(a.mean(0)), tuple(b.mean(0))]))
    return best


def test_square_two_partition():
    pts = np.array([(0, 0), (10e3, 0), (0, 10e3), (10e3, 10e3)], float)
    cost, centers = _best_two_partition(pts)
    out = place_uavs([Position(*p) for p in pts], 2, 100.0)
    got = np.array([(p.x, p.y) for p in out])
    d = ((pts[:, None] - got[None]) ** 2).sum(2).min(1).sum()
    assert d == pytest.approx(cost)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.floats(-1e4, 1e4), st.floats(-1e4, 1e4)), min_size=3, max_size=7, unique=True))
def test_two_uavs_match_brute_force(raw):
    pts = np.array(raw, float)
    cost, _ = _best_two_partition(pts)
    out = place_uavs([Position(*p) for p in pts], 2, 100.0)
    got = np.array([(p.x, p.y) for p in out])
    d = ((pts[:, None] - got[None]) ** 2).sum(2).min(1).sum()
    assert d <= cost * (1 + 1e-9) + 1e-6


def test_place_uavs_deterministic():
    rng = np.random.default_rng(3)
    pts = [Position(*xy) for xy in rng.uniform(-1e4, 1e4, (20, 2))]
    assert place_uavs(pts, 4, 80.0) == place_uavs(pts, 4, 80.0)


def test_place_uavs_errors():
    with pytest.raises(ValueError):
        place_uavs([Position(0, 0)], 0, 1.0)
    with pytest.raises(ValueError):
        place_uavs([], 1, 1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 5))
def test_lloyd_monotone(seed, k):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(30, 2)) * 1e3
    init = pts[rng.choice(30, k, replace=False)]
    _, _, history = lloyd(pts, init)
    assert all(b <= a * (1 + 1e-12) for a, b in zip(history, history[1:]))


def _mtds(points):
    return [Node(f"m{i}", NodeKind.MTD, position=Position(*p)) for i, p in enumerate(points)]


def test_association_single_and_tie():
    m = _mtds([(0, 0), (5, 5)])
    assert nearest_association(m, [Position(1, 1, 10)]) == {"m0": 0, "m1": 0}
    tie = nearest_association(_mtds([(0, 0)]), [Position(1, 0, 0), Position(-1, 0, 0)])
    assert tie == {"m0": 0}


def test_association_matches_brute_force():
    rng = np.random.default_rng(9)
    mtds = _mtds(rng.uniform(-1e3, 1e3, (5, 2)))
    uavs = [Position(x, y, 100.0) for x, y in rng.uniform(-1e3, 1e3, (3, 2))]
    got = nearest_association(mtds, uavs)
    for m in mtds:
        d = [math.dist((m.position.x, m.position.y, 0.0), (u.x, u.y, u.z)) for u in uavs]
        assert got[m.id] == min(range(3), key=lambda j: (d[j], j))


def test_merge_windows():
    ws = [VisibilityWindow(5, 6), VisibilityWindow(0, 2), VisibilityWindow(1, 3), VisibilityWindow(3, 4)]
    assert merge_windows(ws) == [VisibilityWindow(0, 4), VisibilityWindow(5, 6)]
    assert merge_windows([]) == []
