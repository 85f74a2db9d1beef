"""Regenerate the bundled scenario files under src/satmec/data/.

    python scripts/build_scenarios.py
"""

from __future__ import annotations

import math
from pathlib import Path

from satmec.channel import ChannelModel, FadingKind, FadingSpec, GridSpec, PathLossParams
from satmec.geometry import OrbitDescriptor, OrbitKind
from satmec.model import Link, LinkKind, MecServer, Node, NodeKind, Position, Task, Topology
from satmec.orchestration import DemandSnapshot, MtdDemand, UavFleet
from satmec.placement import PlacementProblem
from satmec.scenario import Scenario, serialize_scenario

DATA = Path(__file__).resolve().parents[1] / "src" / "satmec" / "data"
NOISE = 4e-21  # W/Hz, about -174 dBm/Hz


def leo_over(x: float, y: float, phase: float, period: float, speed: float = 7000.0, radius: float = 1200e3):
    """LEO track whose sub-satellite point sits at (x, y) at time ``phase`` into each pass."""
    return OrbitDescriptor(
        OrbitKind.LEO_TRACK,
        altitude=600e3,
        coverage_radius=radius,
        origin=(x - speed * phase, y),
        direction=(1.0, 0.0),
        ground_speed=speed,
        pass_period=period,
    )


def case_study() -> Scenario:
    """Extended forward-link structure: gateway, satellite, two UAV servers, data center, MTDs."""
    tau = 30.0
    p_max = 0.1
    budget = 9.6  # four segments, enough for 3.2 of them at full power
    mtd_xy = [(-400.0, 150.0), (-250.0, -300.0), (900.0, 200.0)]
    mtds = [
        Node(f"mtd{i}", NodeKind.MTD, position=Position(x, y, 0.0), p_max=p_max, energy_budget=budget)
        for i, (x, y) in enumerate(mtd_xy)
    ]
    uav_server = MecServer(capacity=4e9, active_power=40.0, idle_power=8.0)
    uavs = [
        Node("uav0", NodeKind.ACCESS, position=Position(-300.0, -50.0, 100.0), server=uav_server),
        Node("uav1", NodeKind.ACCESS, position=Position(800.0, 100.0, 100.0), server=uav_server),
    ]
    # the satellite passes over the area during the process (t = 0..120 s)
    sat = Node("sat0", NodeKind.SATELLITE, orbit=leo_over(0.0, 0.0, 60.0, 5400.0, radius=2000e3))
    gw = Node(
        "gw0", NodeKind.GATEWAY, position=Position(300e3, -200e3, 0.0),
        server=None,
    )
    cloud = Node("cloud", NodeKind.CLOUD, position=Position(1200e3, -900e3, 0.0),
                 server=MecServer(capacity=1e12))
    links = []
    for m in mtds:
        for u in uavs:
            links.append(Link(m.id, u.id, LinkKind.USER_ACCESS, 1e6, NOISE))
        links.append(Link(m.id, sat.id, LinkKind.USER_SATELLITE, 0.2e6, NOISE))
    for u in uavs:
        links.append(Link(u.id, sat.id, LinkKind.ACCESS_SATELLITE, 5e6, NOISE, tx_power=2.0))
    links.append(Link(sat.id, gw.id, LinkKind.FEEDER, 50e6, NOISE, tx_power=20.0))
    links.append(Link(gw.id, cloud.id, LinkKind.FIBER, 10e9, NOISE, fixed_prop_delay=0.02))
    topo = Topology(tuple(mtds + uavs + [sat, gw, cloud]), tuple(links), ("computing-in-forward-link",))
    channel = ChannelModel(
        {
            "user-access": PathLossParams(-50.0, 1.0, 3.5),
            "user-satellite": PathLossParams(-20.0, 1.0, 2.0),
            "access-satellite": PathLossParams(-10.0, 1.0, 2.0),
            "feeder": PathLossParams(-5.0, 1.0, 2.0),
        },
        GridSpec((-2000.0, -2000.0), 50.0, 81, 81),
    )
    tasks = tuple(Task(1e6, 5e8, m.id) for m in mtds)
    return Scenario(
        topology=topo,
        tasks=tasks,
        channel=channel,
        durations=(tau,) * 4,
        fading=FadingSpec(FadingKind.RICIAN, 10.0),
    )


def demand_periods() -> Scenario:
    """Four demand periods over a two-gateway, two-satellite network with one UAV in reserve.

    Sensors near the origin reach sat0 and, through its feeders, either
    gateway. A mine cluster sits under a weak satellite uplink, so only a UAV
    overhead serves it in time. Vehicles far to the north see only sat1,
    whose ISL to sat0 is too slow to reach the gateways in time.
    """
    period = 3600.0
    gw_server = MecServer(capacity=1e11, active_power=100.0, idle_power=30.0)
    sat_server = MecServer(capacity=5e9, active_power=150.0, idle_power=40.0)
    nodes = [
        Node("sat0", NodeKind.SATELLITE, orbit=leo_over(0.0, 0.0, period / 2, period), server=sat_server),
        Node("sat1", NodeKind.SATELLITE, orbit=leo_over(0.0, 1500e3, period / 2, period), server=sat_server),
        Node("gw0", NodeKind.GATEWAY, position=Position(200e3, 0.0, 0.0), server=gw_server),
        Node("gw1", NodeKind.GATEWAY, position=Position(-200e3, 0.0, 0.0), server=gw_server),
        Node("cloud", NodeKind.CLOUD, position=Position(0.0, -800e3, 0.0), server=MecServer(capacity=1e12)),
    ]
    p_max, budget = 0.5, 1e4
    groups = {
        "sensor": [(3e3 * math.cos(a), 3e3 * math.sin(a)) for a in [i * math.pi / 3 for i in range(6)]],
        "mine": [(40e3 + dx, 10e3 + dy) for dx, dy in [(0, 0), (150, 0), (0, 150), (150, 150), (-150, 60), (60, -150)]],
        "vehicle": [(x, 1500e3 + y) for x, y in [(0, 0), (5e3, 0), (0, 5e3), (-5e3, -5e3)]],
    }
    links = []
    for g, pts in groups.items():
        for i, (x, y) in enumerate(pts):
            mid = f"{g}{i}"
            nodes.append(Node(mid, NodeKind.MTD, position=Position(x, y, 0.0), p_max=p_max, energy_budget=budget))
            if g == "vehicle":
                links.append(Link(mid, "sat1", LinkKind.USER_SATELLITE, 10e6, NOISE))
            else:
                links.append(Link(mid, "sat0", LinkKind.USER_SATELLITE, 10e6 if g == "sensor" else 0.2e6, NOISE))
    links += [
        Link("sat1", "sat0", LinkKind.ISL, 1e6, NOISE, tx_power=1.0, power=20.0),
        Link("sat0", "sat1", LinkKind.ISL, 1e6, NOISE, tx_power=1.0, power=20.0),
        Link("sat0", "gw0", LinkKind.FEEDER, 100e6, NOISE, tx_power=20.0),
        Link("sat0", "gw1", LinkKind.FEEDER, 100e6, NOISE, tx_power=20.0),
        Link("gw0", "cloud", LinkKind.FIBER, 10e9, NOISE, fixed_prop_delay=0.5),
        Link("gw1", "cloud", LinkKind.FIBER, 10e9, NOISE, fixed_prop_delay=0.5),
    ]
    topo = Topology(tuple(nodes), tuple(links), ("computing-on-orbit", "computing-after-feeder-link"))
    channel = ChannelModel(
        {
            "user-access": PathLossParams(-40.0, 1.0, 2.5),
            "user-satellite": PathLossParams(-20.0, 1.0, 2.0),
            "access-satellite": PathLossParams(-10.0, 1.0, 2.0),
            "feeder": PathLossParams(-5.0, 1.0, 2.0),
            "isl": PathLossParams(-10.0, 1.0, 2.0),
        }
    )

    def demands(group: str, n: int, data: float, cycles: float, target: float, rate: float):
        return [MtdDemand(Task(data, cycles, f"{group}{i}"), target, rate) for i in range(n)]

    sensors = lambda n: demands("sensor", n, 1e6, 5e9, SENSOR_TARGET, 0.5)
    mines = lambda n: demands("mine", n, 0.1e6, 2e7, 0.04, 5.0)
    vehicles = lambda n: demands("vehicle", n, 0.5e6, 2e8, 0.6, 2.0)
    periods = (
        DemandSnapshot(1, period, tuple(sensors(6)), "sensing"),
        DemandSnapshot(2, period, tuple(sensors(3)), "light sensing"),
        DemandSnapshot(3, period, tuple(mines(4) + vehicles(3)), "mining and traffic"),
        DemandSnapshot(4, period, tuple(mines(6) + vehicles(4)), "peak mining and traffic"),
    )
    fleet = UavFleet(
        size=1,
        altitude=100.0,
        server=MecServer(capacity=1e10, active_power=40.0, idle_power=8.0),
        access_bandwidth=5e6,
        relay_bandwidth=5e6,
        noise_psd=NOISE,
        relay_power=2.0,
    )
    return Scenario(topology=topo, channel=channel, periods=periods, fleet=fleet)


SENSOR_TARGET = 0.45


def placement_ring4() -> Scenario:
    """Four-satellite ring with unit demand; one hardened server is optimal."""
    sats = tuple(
        Node(f"sat{i}", NodeKind.SATELLITE, orbit=leo_over(0.0, 1500e3 * i, 0.0, 5400.0)) for i in range(4)
    )
    cloud = Node("cloud", NodeKind.CLOUD, position=Position(0.0, 0.0, 0.0), server=MecServer(capacity=1e12))
    links = []
    for i in range(4):
        j = (i + 1) % 4
        links.append(Link(f"sat{i}", f"sat{j}", LinkKind.ISL, 1e9, NOISE, tx_power=1.0))
        links.append(Link(f"sat{j}", f"sat{i}", LinkKind.ISL, 1e9, NOISE, tx_power=1.0))
    problem = PlacementProblem(demand=(1.0, 1.0, 1.0, 1.0), hardening_cost=3.0, isl_cost=1.0, hop_budget=2)
    return Scenario(topology=Topology(sats + (cloud,), tuple(links)), placement=problem)


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    for name, build in (("case_study", case_study), ("demand_periods", demand_periods), ("placement_ring4", placement_ring4)):
        (DATA / f"{name}.yaml").write_text(serialize_scenario(build()))


if __name__ == "__main__":
    main()
