"""Builders for the three minimal satellite-MEC structures and their composition.

Every builder wires the same skeleton (MTDs, satellites, gateways, a cloud
reached over fiber) and differs only in where the MEC server sits:

* computing-in-forward-link: on the access platforms (UAV/HAP) between MTDs
  and the satellite,
* computing-on-orbit: on the satellites,
* computing-after-feeder-link: at the gateways.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

from .geometry import OrbitDescriptor, OrbitKind, place_uavs
from .model import Link, LinkKind, MecServer, Node, NodeKind, Position, Topology, validate_topology

THERMAL_NOISE_PSD = 10 ** (-174 / 10) / 1000  # W/Hz, -174 dBm/Hz


class StructureKind(str, Enum):
    FORWARD_LINK = "computing-in-forward-link"
    ON_ORBIT = "computing-on-orbit"
    AFTER_FEEDER_LINK = "computing-after-feeder-link"


DEFAULT_BANDWIDTH = {
    LinkKind.USER_ACCESS: 10e6,
    LinkKind.USER_SATELLITE: 5e6,
    LinkKind.ACCESS_SATELLITE: 20e6,
    LinkKind.FEEDER: 100e6,
    LinkKind.ISL: 200e6,
    LinkKind.FIBER: 10e9,
}

DEFAULT_RELAY_POWER = {
    LinkKind.ACCESS_SATELLITE: 5.0,
    LinkKind.FEEDER: 20.0,
    LinkKind.ISL: 10.0,
}

# (capacity cycles/s, active W, idle W)
TIER_DEFAULTS = {
    NodeKind.ACCESS: (5e9, 40.0, 8.0),
    NodeKind.SATELLITE: (1e10, 60.0, 15.0),
    NodeKind.GATEWAY: (5e10, 300.0, 60.0),
    NodeKind.CLOUD: (1e12, 0.0, 0.0),
}

_SERVER_TIER = {
    StructureKind.FORWARD_LINK: NodeKind.ACCESS,
    StructureKind.ON_ORBIT: NodeKind.SATELLITE,
    StructureKind.AFTER_FEEDER_LINK: NodeKind.GATEWAY,
}


def default_orbit(index: int = 0) -> OrbitDescriptor:
    """LEO track at 600 km passing over the origin, satellites spaced 300 km apart."""
    return OrbitDescriptor(
        OrbitKind.LEO_TRACK,
        altitude=600e3,
        coverage_radius=1500e3,
        origin=(-1500e3, 300e3 * index),
        direction=(1.0, 0.0),
        ground_speed=7000.0,
        pass_period=3000e3 / 7000.0,
    )


@dataclass(frozen=True)
class StructureSpec:
    kind: StructureKind
    n_mtds: int = 1
    n_aps: int = 0
    n_satellites: int = 1
    n_gateways: int = 1
    # a tier gets a server when its capacity is given; the structure's own tier always does
    ap_capacity: Optional[float] = None
    satellite_capacity: Optional[float] = None
    gateway_capacity: Optional[float] = None
    cloud_capacity: float = TIER_DEFAULTS[NodeKind.CLOUD][0]
    bandwidth: Mapping[LinkKind, float] = field(default_factory=dict)
    noise_psd: float = THERMAL_NOISE_PSD
    mtd_p_max: float = 0.2
    mtd_energy: float = 10.0
    area_radius: float = 5e3
    ap_altitude: float = 100.0
    cloud_delay: float = 0.02
    gateway_interconnect: bool = False
    direct_satellite_access: bool = False
    mtd_positions: Optional[Sequence[Position]] = None
    prefix: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", StructureKind(self.kind))
        if self.kind == StructureKind.FORWARD_LINK and self.n_aps == 0:
            object.__setattr__(self, "n_aps", 1)


def _sunflower(n: int, radius: float) -> list[Position]:
    golden = math.pi * (3 - math.sqrt(5))
    out = []
    for i in range(n):
        r = radius * math.sqrt((i + 0.5) / n)
        out.append(Position(r * math.cos(i * golden), r * math.sin(i * golden), 0.0))
    return out


def _server(tier: NodeKind, capacity: Optional[float], required: bool) -> Optional[MecServer]:
    if capacity is None and not required:
        return None
    cap, active, idle = TIER_DEFAULTS[tier]
    return MecServer(
        capacity=cap if capacity is None else capacity,
        active_power=active,
        idle_power=idle,
        hardened=tier == NodeKind.SATELLITE,
    )


def build_structure(spec: StructureSpec) -> Topology:
    """Build the topology of one minimal structure (or its multi-node extension)."""
    if spec.n_mtds < 1:
        raise ValueError("structure needs at least one MTD")
    if spec.n_satellites < 1:
        raise ValueError("structure needs at least one satellite")
    if spec.n_gateways < 1:
        raise ValueError("structure needs at least one gateway")
    if spec.kind == StructureKind.FORWARD_LINK and spec.n_aps < 1:
        raise ValueError("computing-in-forward-link needs at least one access platform")

    tier = _SERVER_TIER[spec.kind]
    bw = {**DEFAULT_BANDWIDTH, **{LinkKind(k): v for k, v in spec.bandwidth.items()}}
    pre = spec.prefix

    def link(src: str, dst: str, kind: LinkKind, **kw) -> Link:
        return Link(src, dst, kind, bw[kind], spec.noise_psd, tx_power=DEFAULT_RELAY_POWER.get(kind), **kw)

    mtd_pos = list(spec.mtd_positions) if spec.mtd_positions is not None else _sunflower(spec.n_mtds, spec.area_radius)
    if len(mtd_pos) != spec.n_mtds:
        raise ValueError("mtd_positions length must equal n_mtds")
    mtds = [
        Node(f"{pre}mtd{i}", NodeKind.MTD, position=p, p_max=spec.mtd_p_max, energy_budget=spec.mtd_energy)
        for i, p in enumerate(mtd_pos)
    ]
    aps = []
    if spec.n_aps:
        ap_server = _server(NodeKind.ACCESS, spec.ap_capacity, tier == NodeKind.ACCESS)
        for i, p in enumerate(place_uavs(mtd_pos, spec.n_aps, spec.ap_altitude)):
            aps.append(Node(f"{pre}ap{i}", NodeKind.ACCESS, position=p, server=ap_server))
    sat_server = _server(NodeKind.SATELLITE, spec.satellite_capacity, tier == NodeKind.SATELLITE)
    sats = [
        Node(f"{pre}sat{i}", NodeKind.SATELLITE, orbit=default_orbit(i), server=sat_server)
        for i in range(spec.n_satellites)
    ]
    gw_server = _server(NodeKind.GATEWAY, spec.gateway_capacity, tier == NodeKind.GATEWAY)
    gws = [
        Node(f"{pre}gw{i}", NodeKind.GATEWAY, position=Position(200e3 * (i + 1), -100e3, 0.0), server=gw_server)
        for i in range(spec.n_gateways)
    ]
    cloud = Node(
        f"{pre}cloud",
        NodeKind.CLOUD,
        position=Position(1000e3, -1000e3, 0.0),
        server=_server(NodeKind.CLOUD, spec.cloud_capacity, True),
    )

    links: list[Link] = []
    if spec.kind == StructureKind.FORWARD_LINK:
        for m in mtds:
            links += [link(m.id, a.id, LinkKind.USER_ACCESS) for a in aps]
        for a in aps:
            links += [link(a.id, s.id, LinkKind.ACCESS_SATELLITE) for s in sats]
    if spec.kind != StructureKind.FORWARD_LINK or spec.direct_satellite_access:
        for m in mtds:
            links += [link(m.id, s.id, LinkKind.USER_SATELLITE) for s in sats]
    if len(sats) > 1:
        # ring of inter-satellite links, both directions
        pairs = [(i, (i + 1) % len(sats)) for i in range(len(sats) if len(sats) > 2 else 1)]
        for i, j in pairs:
            links.append(link(sats[i].id, sats[j].id, LinkKind.ISL))
            links.append(link(sats[j].id, sats[i].id, LinkKind.ISL))
    for s in sats:
        links += [link(s.id, g.id, LinkKind.FEEDER) for g in gws]
    for g in gws:
        links.append(link(g.id, cloud.id, LinkKind.FIBER, fixed_prop_delay=spec.cloud_delay))
    if spec.gateway_interconnect:
        for g in gws:
            for h in gws:
                if g.id != h.id:
                    links.append(link(g.id, h.id, LinkKind.FIBER, fixed_prop_delay=0.0))

    return Topology(tuple(mtds + aps + sats + gws + [cloud]), tuple(links), (spec.kind.value,))


def compose(parts: Sequence[Topology], shared: Iterable[str] = ()) -> Topology:
    """Union several topologies, merging the listed shared node ids once.

    Raises:
        ValueError: a node id appears in several parts without being shared,
            or a shared id has different definitions across parts.
    """
    shared = set(shared)
    nodes: dict[str, Node] = {}
    links: list[Link] = []
    seen_links: set[Link] = set()
    tags: list[str] = []
    for part in parts:
        for n in part.nodes:
            prev = nodes.get(n.id)
            if prev is None:
                nodes[n.id] = n
            elif n.id not in shared:
                raise ValueError(f"node id {n.id!r} occurs in several parts but is not shared")
            elif prev != n:
                raise ValueError(f"conflicting definitions for shared node {n.id!r}")
        for link in part.links:
            if link not in seen_links:
                seen_links.add(link)
                links.append(link)
        tags += [t for t in part.structure_tags if t not in tags]
    missing = [s for s in shared if s not in nodes]
    if missing:
        raise ValueError(f"shared ids not present in any part: {sorted(missing)}")
    return Topology(tuple(nodes.values()), tuple(links), tuple(tags))


def with_servers_active(t: Topology, active: Mapping[str, bool]) -> Topology:
    """Copy of ``t`` with server activation set to 1/0 per the mapping."""
    nodes = []
    for n in t.nodes:
        if n.server is not None and n.id in active:
            n = replace(n, server=replace(n.server, activation=1.0 if active[n.id] else 0.0))
        nodes.append(n)
    return Topology(tuple(nodes), t.links, t.structure_tags)


def check_structure(t: Topology) -> None:
    report = validate_topology(t)
    if report:
        raise ValueError("invalid topology: " + "; ".join(report))
