"""From geometry to a latency budget for one offloaded task."""

from dataclasses import replace

import numpy as np

from satmec.channel import (
    ChannelModel,
    FadingKind,
    FadingSpec,
    GridSpec,
    PathLossParams,
    build_radio_map,
    lookup_gain_db,
    sample_fading,
)
from satmec.geometry import OrbitDescriptor, OrbitKind, satellite_position, visibility_windows
from satmec.latency import route_gains, route_latency, route_powers
from satmec.model import Position, Task, reachable_servers
from satmec.structures import StructureKind, StructureSpec, build_structure

# A LEO track passing straight over the origin.
orbit = OrbitDescriptor(OrbitKind.LEO_TRACK, 600e3, 1200e3, (-2000e3, 0.0), (1.0, 0.0), 7000.0, 5400.0)
for w in visibility_windows(orbit, Position(0, 0), 5400.0):
    print(f"visible from t={w.start:.1f} s to t={w.end:.1f} s ({w.length:.1f} s)")

# A radio map around a UAV, read back at an off-grid point.
grid = GridSpec((-1000.0, -1000.0), 50.0, 41, 41)
rmap = build_radio_map(PathLossParams(-40.0, 1.0, 3.0), grid, Position(0, 0, 100))
print(f"gain 230 m east of the UAV: {lookup_gain_db(rmap, Position(230, 0)):.2f} dB")

# Small-scale fading has unit mean.
draws = sample_fading(FadingSpec(FadingKind.RICIAN, 5.0), np.random.default_rng(0), 100_000)
print(f"Rician K=5: mean {draws.mean():.4f}, 5th percentile {np.percentile(draws, 5):.3f}")

# Latency of one task offloaded on orbit versus after the feeder link.
t = build_structure(StructureSpec(StructureKind.ON_ORBIT, n_mtds=1, gateway_capacity=1e10))
t = t.replace_nodes([replace(t.node("sat0"), orbit=orbit)])
channel = ChannelModel({
    "user-satellite": PathLossParams(-20.0, 1.0, 2.0),
    "feeder": PathLossParams(-10.0, 1.0, 2.0),
})
task = Task(1e6, 5e8, "mtd0")
when = 320.0
print(f"\nsatellite at t={when:.0f} s: {satellite_position(orbit, when)}")
for server in ("sat0", "gw0"):
    route = dict(reachable_servers(t, "mtd0"))[server]
    bd = route_latency(task, route, route_powers(route, 0.1), route_gains(t, route, channel, when),
                       t.node(server).server.capacity, t, when)
    print(f"{server}: transmit {sum(bd.transmit)*1e3:.1f} ms, propagate {sum(bd.propagation)*1e3:.2f} ms, "
          f"compute {bd.compute*1e3:.1f} ms, total {bd.total*1e3:.1f} ms")
