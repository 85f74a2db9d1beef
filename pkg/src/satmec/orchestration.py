"""Medium-timescale orchestration: per-period server activation and UAV dispatch.

Every period starts with all orchestrated servers off. The greedy policy walks
the static servers in ascending active power (node id breaks ties), then adds
UAVs one at a time, and stops as soon as every active MTD meets its latency
target. Cloud servers are always available and are not orchestrated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Protocol, Sequence

import numpy as np

from .channel import ChannelModel
from .geometry import node_position, place_uavs
from .latency import route_gains, route_latency, route_powers
from .model import Link, LinkKind, MecServer, Node, NodeKind, Position, Task, Topology, reachable_servers


@dataclass(frozen=True)
class MtdDemand:
    task: Task
    target: float  # s
    rate: float = 0.0  # tasks per second, drives the duty fraction

    def __post_init__(self) -> None:
        if not self.target > 0:
            raise ValueError("latency target must be positive")


@dataclass(frozen=True)
class DemandSnapshot:
    period: int
    duration: float
    demands: tuple[MtdDemand, ...] = ()
    label: str = ""

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise ValueError("period duration must be positive")
        object.__setattr__(self, "demands", tuple(self.demands))

    @property
    def active(self) -> list[str]:
        return [d.task.owner for d in self.demands]


@dataclass(frozen=True)
class UavFleet:
    size: int
    altitude: float
    server: MecServer
    access_bandwidth: float
    relay_bandwidth: float
    noise_psd: float
    relay_power: float  # W, UAV to satellite

    def __post_init__(self) -> None:
        if self.size < 0:
            raise ValueError("fleet size must be nonnegative")


@dataclass(frozen=True)
class PeriodDecision:
    period: int
    server_on: Mapping[str, bool]
    duty: Mapping[str, float]
    isl_on: Mapping[str, bool]
    uav_positions: tuple[Position, ...]
    structure_tags: tuple[str, ...]
    latencies: Mapping[str, float] = field(default_factory=dict)
    satisfaction: float = 1.0

    @property
    def active_servers(self) -> list[str]:
        return sorted(s for s, on in self.server_on.items() if on)

    @property
    def uav_count(self) -> int:
        return len(self.uav_positions)


@dataclass(frozen=True)
class TimelineEntry:
    start: float
    duration: float
    decision: PeriodDecision
    energy: float


@dataclass(frozen=True)
class OrchestrationTimeline:
    entries: tuple[TimelineEntry, ...]
    reference: tuple[TimelineEntry, ...]  # always-on decisions, same periods

    @property
    def energy(self) -> float:
        return sum(e.energy for e in self.entries)

    @property
    def reference_energy(self) -> float:
        return sum(e.energy for e in self.reference)


def uav_nodes(positions: Sequence[Position], fleet: UavFleet) -> list[Node]:
    return [Node(f"uav{i}", NodeKind.ACCESS, position=p, server=fleet.server) for i, p in enumerate(positions)]


def deploy_uavs(network: Topology, positions: Sequence[Position], fleet: UavFleet) -> Topology:
    """Add UAV servers with access links from every MTD and relay links to every satellite."""
    uavs = uav_nodes(positions, fleet)
    links: list[Link] = []
    for u in uavs:
        for m in network.mtds:
            links.append(Link(m.id, u.id, LinkKind.USER_ACCESS, fleet.access_bandwidth, fleet.noise_psd))
        for s in network.nodes_of(NodeKind.SATELLITE):
            links.append(
                Link(u.id, s.id, LinkKind.ACCESS_SATELLITE, fleet.relay_bandwidth, fleet.noise_psd, tx_power=fleet.relay_power)
            )
    tags = network.structure_tags + (("computing-in-forward-link",) if uavs else ())
    return Topology(network.nodes + tuple(uavs), network.links + tuple(links), tags)


def orchestrated_servers(network: Topology) -> list[Node]:
    """Static servers subject to on/off decisions, in activation order."""
    nodes = [n for n in network.servers if n.kind != NodeKind.CLOUD]
    return sorted(nodes, key=lambda n: (n.server.active_power, n.id))


@dataclass
class _Evaluation:
    latencies: dict[str, float]
    routes: dict[str, tuple[str, tuple[Link, ...]]]
    satisfied: int


def _predict(
    demand: DemandSnapshot,
    network: Topology,
    channel: ChannelModel,
    on: set[str],
    t: float,
    max_sweeps: int = 50,
) -> _Evaluation:
    """Best-route latency per active MTD with equal CPU sharing (round-robin best response)."""
    by_id = {d.task.owner: d for d in demand.demands}
    candidates: dict[str, list[tuple[str, tuple[Link, ...], float]]] = {}
    for owner, d in by_id.items():
        mtd = network.node(owner)
        opts = []
        for server, route in reachable_servers(network, owner):
            node = network.node(server)
            if node.kind != NodeKind.CLOUD and server not in on:
                continue
            gains = route_gains(network, route, channel, t)
            # latency with the whole server, compute term added under sharing below
            bd = route_latency(d.task, route, route_powers(route, mtd.p_max), gains, node.server.capacity, network, t)
            opts.append((server, route, sum(bd.transmit) + sum(bd.propagation)))
        candidates[owner] = opts

    choice: dict[str, int] = {}
    loads: dict[str, int] = {}

    def cost(owner: str, idx: int, extra: int) -> float:
        server, _, comm = candidates[owner][idx]
        cap = network.node(server).server.capacity
        return comm + by_id[owner].task.cycles * (loads.get(server, 0) + extra) / cap

    for owner in by_id:
        opts = candidates[owner]
        if not opts:
            continue
        best = min(range(len(opts)), key=lambda i: (cost(owner, i, 1), i))
        choice[owner] = best
        loads[opts[best][0]] = loads.get(opts[best][0], 0) + 1
    for _ in range(max_sweeps):
        changed = False
        for owner, cur in list(choice.items()):
            srv = candidates[owner][cur][0]
            loads[srv] -= 1
            best = min(range(len(candidates[owner])), key=lambda i: (cost(owner, i, 1), i))
            if cost(owner, best, 1) >= cost(owner, cur, 1):
                best = cur
            loads[candidates[owner][best][0]] = loads.get(candidates[owner][best][0], 0) + 1
            if best != cur:
                choice[owner] = best
                changed = True
        if not changed:
            break

    lat, routes, ok = {}, {}, 0
    for owner, d in by_id.items():
        if owner not in choice:
            lat[owner] = math.inf
            continue
        idx = choice[owner]
        lat[owner] = cost(owner, idx, 0)
        routes[owner] = candidates[owner][idx][:2]
        ok += lat[owner] <= d.target
    return _Evaluation(lat, routes, ok)


def _structure_tags(on: set[str], network: Topology) -> tuple[str, ...]:
    tags = []
    kinds = {network.node(s).kind for s in on}
    if NodeKind.ACCESS in kinds:
        tags.append("computing-in-forward-link")
    if NodeKind.SATELLITE in kinds:
        tags.append("computing-on-orbit")
    if NodeKind.GATEWAY in kinds:
        tags.append("computing-after-feeder-link")
    return tuple(tags)


def _decision(
    demand: DemandSnapshot, network: Topology, on: set[str], uav_positions: Sequence[Position], ev: _Evaluation
) -> PeriodDecision:
    rates = {d.task.owner: d for d in demand.demands}
    load: dict[str, float] = {}
    for owner, (server, _) in ev.routes.items():
        d = rates[owner]
        load[server] = load.get(server, 0.0) + d.rate * d.task.cycles
    server_on, duty = {}, {}
    for n in network.servers:
        if n.kind == NodeKind.CLOUD:
            continue
        server_on[n.id] = n.id in on
        duty[n.id] = min(1.0, load.get(n.id, 0.0) / n.server.capacity) if n.id in on else 0.0
    used = {link.name for _, r in ev.routes.values() for link in r}
    isl_on = {link.name: link.name in used for link in network.links if link.kind == LinkKind.ISL}
    n_active = len(demand.demands)
    return PeriodDecision(
        period=demand.period,
        server_on=server_on,
        duty=duty,
        isl_on=isl_on,
        uav_positions=tuple(uav_positions),
        structure_tags=_structure_tags(on, network),
        latencies=ev.latencies,
        satisfaction=ev.satisfied / n_active if n_active else 1.0,
    )


class ActivationPolicy(Protocol):
    def __call__(
        self, demand: DemandSnapshot, network: Topology, fleet: UavFleet, channel: ChannelModel, t: float
    ) -> tuple[PeriodDecision, Topology]: ...


def greedy_activation(
    demand: DemandSnapshot, network: Topology, fleet: UavFleet, channel: ChannelModel, t: float
) -> tuple[PeriodDecision, Topology]:
    """Cheapest-first activation that stops once every target is met."""
    on: set[str] = set()
    ev = _predict(demand, network, channel, on, t)
    n = len(demand.demands)
    if ev.satisfied == n:
        return _decision(demand, network, on, (), ev), network
    for node in orchestrated_servers(network):
        on.add(node.id)
        ev = _predict(demand, network, channel, on, t)
        if ev.satisfied == n:
            return _decision(demand, network, on, (), ev), network

    deployed, positions = network, []
    unmet = [network.node(o) for o, lat in ev.latencies.items() if lat > _target(demand, o)]
    for count in range(1, fleet.size + 1):
        positions = place_uavs([node_position(m) for m in unmet], count, fleet.altitude)
        deployed = deploy_uavs(network, positions, fleet)
        trial_on = on | {u.id for u in deployed.nodes_of(NodeKind.ACCESS) if u.id.startswith("uav")}
        ev = _predict(demand, deployed, channel, trial_on, t)
        if ev.satisfied == n:
            return _decision(demand, deployed, trial_on, positions, ev), deployed
    on_final = on | {u.id for u in deployed.nodes_of(NodeKind.ACCESS) if u.id.startswith("uav")}
    return _decision(demand, deployed, on_final, positions, ev), deployed


def always_on(
    demand: DemandSnapshot, network: Topology, fleet: UavFleet, channel: ChannelModel, t: float
) -> tuple[PeriodDecision, Topology]:
    """Reference decision: every static server and ISL on, the whole fleet deployed.

    UAVs are placed over the MTDs the static servers leave unmet (all active
    MTDs when none are), the same rule the greedy policy applies.
    """
    on = {n.id for n in orchestrated_servers(network)}
    positions: list[Position] = []
    deployed = network
    if fleet.size and demand.demands:
        ev = _predict(demand, network, channel, on, t)
        owners = [o for o, lat in ev.latencies.items() if lat > _target(demand, o)] or demand.active
        positions = place_uavs([node_position(network.node(o)) for o in owners], fleet.size, fleet.altitude)
        deployed = deploy_uavs(network, positions, fleet)
        on |= {u.id for u in deployed.nodes_of(NodeKind.ACCESS) if u.id.startswith("uav")}
    ev = _predict(demand, deployed, channel, on, t)
    decision = _decision(demand, deployed, on, positions, ev)
    decision = replace(decision, isl_on={name: True for name in decision.isl_on})
    return decision, deployed


def _target(demand: DemandSnapshot, owner: str) -> float:
    for d in demand.demands:
        if d.task.owner == owner:
            return d.target
    raise KeyError(owner)


def orchestrate_period(
    demand: DemandSnapshot,
    network: Topology,
    fleet: UavFleet,
    channel: ChannelModel,
    policy: ActivationPolicy = greedy_activation,
    start: float = 0.0,
) -> PeriodDecision:
    """Decide one period; latencies are predicted at the period midpoint."""
    decision, _ = policy(demand, network, fleet, channel, start + demand.duration / 2.0)
    return decision


def period_energy(decision: PeriodDecision, network: Topology, duration: float, fleet: Optional[UavFleet] = None) -> float:
    """Server and ISL energy over one period, joules.

    An on server draws ``duty * active + (1 - duty) * idle``; an off server
    draws nothing. An on ISL draws its link ``power``.
    """
    total = 0.0
    servers = {n.id: n.server for n in network.servers}
    if fleet is not None:
        servers.update({f"uav{i}": fleet.server for i in range(len(decision.uav_positions))})
    for sid, on in decision.server_on.items():
        if not on:
            continue
        s = servers[sid]
        u = decision.duty.get(sid, 0.0)
        total += duration * (u * s.active_power + (1.0 - u) * s.idle_power)
    isl_power = {link.name: link.power for link in network.links if link.kind == LinkKind.ISL}
    for name, on in decision.isl_on.items():
        if on:
            total += duration * isl_power.get(name, 0.0)
    return total


def run_orchestration(
    scenario: Sequence[DemandSnapshot],
    network: Topology,
    fleet: UavFleet,
    channel: ChannelModel,
    policy: ActivationPolicy = greedy_activation,
) -> OrchestrationTimeline:
    """Apply the policy period by period and the always-on reference alongside."""
    if not scenario:
        raise ValueError("need at least one period")
    entries, reference = [], []
    t = 0.0
    for demand in scenario:
        mid = t + demand.duration / 2.0
        for pol, sink in ((policy, entries), (always_on, reference)):
            decision, deployed = pol(demand, network, fleet, channel, mid)
            sink.append(TimelineEntry(t, demand.duration, decision, period_energy(decision, deployed, demand.duration)))
        t += demand.duration
    return OrchestrationTimeline(tuple(entries), tuple(reference))


TIMELINE_CSV_HEADER = (
    "schedule",
    "period",
    "start_s",
    "active_servers",
    "uav_count",
    "structures",
    "latency_p50_s",
    "latency_p95_s",
    "latency_max_s",
    "satisfaction",
    "energy_j",
)


def _pct(values: list[float], q: float) -> float:
    return float(np.percentile(values, q)) if values else 0.0


def timeline_rows(timeline: OrchestrationTimeline) -> list[list[str]]:
    rows = []
    for schedule, entries in (("on-demand", timeline.entries), ("always-on", timeline.reference)):
        for e in entries:
            d = e.decision
            lats = list(d.latencies.values())
            servers = d.active_servers
            rows.append(
                [
                    schedule,
                    str(d.period),
                    repr(e.start),
                    " ".join(f"{s}:{d.duty.get(s, 0.0):.4f}" for s in servers),
                    str(d.uav_count),
                    " ".join(d.structure_tags),
                    repr(_pct(lats, 50)),
                    repr(_pct(lats, 95)),
                    repr(max(lats) if lats else 0.0),
                    repr(d.satisfaction),
                    repr(e.energy),
                ]
            )
    return rows
