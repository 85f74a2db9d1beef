"""Domain data model: nodes, servers, links, tasks and topologies.

All values are frozen dataclasses. Invariant violations are not raised at
construction time; :func:`validate_topology` reports them as data so that a
malformed scenario can still be loaded and inspected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import TYPE_CHECKING, Iterable, Optional

if TYPE_CHECKING:
    from .geometry import OrbitDescriptor


class NodeKind(str, Enum):
    MTD = "mtd"
    ACCESS = "access"
    SATELLITE = "satellite"
    GATEWAY = "gateway"
    CLOUD = "cloud"


class LinkKind(str, Enum):
    USER_ACCESS = "user-access"
    ACCESS_SATELLITE = "access-satellite"
    USER_SATELLITE = "user-satellite"
    FEEDER = "feeder"
    ISL = "isl"
    FIBER = "fiber"


@dataclass(frozen=True)
class Position:
    """Point in the fixed Cartesian ground frame, meters (z is altitude)."""

    x: float
    y: float
    z: float = 0.0

    def distance_to(self, other: Position) -> float:
        return math.sqrt((self.x - other.x) ** 2 + (self.y - other.y) ** 2 + (self.z - other.z) ** 2)

    def ground_distance_to(self, other: Position) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def ground(self) -> Position:
        return Position(self.x, self.y, 0.0)

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in (self.x, self.y, self.z))


@dataclass(frozen=True)
class MecServer:
    capacity: float  # CPU cycles per second
    active_power: float = 0.0  # W
    idle_power: float = 0.0  # W
    activation: float = 1.0
    hardened: bool = False


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    position: Optional[Position] = None
    orbit: Optional["OrbitDescriptor"] = None
    server: Optional[MecServer] = None
    p_max: Optional[float] = None  # MTD only, W
    energy_budget: Optional[float] = None  # MTD only, J

    @property
    def has_server(self) -> bool:
        return self.server is not None


@dataclass(frozen=True)
class Link:
    src: str
    dst: str
    kind: LinkKind
    bandwidth: float  # Hz
    noise_psd: float  # W/Hz
    activation: float = 1.0
    fixed_prop_delay: Optional[float] = None  # s, overrides geometric delay
    tx_power: Optional[float] = None  # W radiated by a relaying src; MTD hops use the plan power
    power: float = 0.0  # W drawn while the link is switched on (energy accounting)

    @property
    def name(self) -> str:
        return f"{self.src}->{self.dst}"


@dataclass(frozen=True)
class Task:
    data_size: float  # bits
    cycles: float  # CPU cycles
    owner: str


Route = tuple[Link, ...]


@dataclass(frozen=True)
class Topology:
    nodes: tuple[Node, ...]
    links: tuple[Link, ...]
    structure_tags: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "links", tuple(self.links))
        object.__setattr__(self, "structure_tags", tuple(self.structure_tags))

    @cached_property
    def _by_id(self) -> dict[str, Node]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def _out_links(self) -> dict[str, list[Link]]:
        out: dict[str, list[Link]] = {n.id: [] for n in self.nodes}
        for link in self.links:
            out.setdefault(link.src, []).append(link)
        return out

    def node(self, node_id: str) -> Node:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise KeyError(f"unknown node id {node_id!r}") from None

    def has_node(self, node_id: str) -> bool:
        return node_id in self._by_id

    def out_links(self, node_id: str) -> list[Link]:
        return self._out_links.get(node_id, [])

    def nodes_of(self, kind: NodeKind) -> list[Node]:
        return [n for n in self.nodes if n.kind == kind]

    @property
    def mtds(self) -> list[Node]:
        return self.nodes_of(NodeKind.MTD)

    @property
    def servers(self) -> list[Node]:
        return [n for n in self.nodes if n.server is not None]

    def replace_nodes(self, nodes: Iterable[Node]) -> Topology:
        """Return a copy with the given nodes substituted by id."""
        repl = {n.id: n for n in nodes}
        return Topology(
            tuple(repl.get(n.id, n) for n in self.nodes), self.links, self.structure_tags
        )


def _in_unit(v: float) -> bool:
    return 0.0 <= v <= 1.0


def validate_topology(t: Topology) -> list[str]:
    """Check every type invariant and MTD-to-server reachability.

    Returns:
        Human-readable violations; empty iff the topology is valid.
    """
    report: list[str] = []
    seen: set[str] = set()
    for n in t.nodes:
        if n.id in seen:
            report.append(f"node {n.id}: duplicate node id")
        seen.add(n.id)
        if n.position is None and n.orbit is None:
            report.append(f"node {n.id}: missing position")
        if n.position is not None:
            if not n.position.is_finite():
                report.append(f"node {n.id}: non-finite position")
            elif n.position.z < 0:
                report.append(f"node {n.id}: negative altitude")
        if n.orbit is not None and n.kind != NodeKind.SATELLITE:
            report.append(f"node {n.id}: orbit given for non-satellite node")
        s = n.server
        if s is not None:
            if not s.capacity > 0:
                report.append(f"node {n.id}: nonpositive server capacity")
            if not _in_unit(s.activation):
                report.append(f"node {n.id}: server activation outside [0, 1]")
            if s.idle_power > s.active_power:
                report.append(f"node {n.id}: idle power exceeds active power")
            if s.idle_power < 0 or s.active_power < 0:
                report.append(f"node {n.id}: negative server power")
        if n.kind == NodeKind.MTD:
            if s is not None:
                report.append(f"node {n.id}: MTD carries a server")
            if n.p_max is None or not n.p_max > 0:
                report.append(f"node {n.id}: nonpositive max transmit power")
            if n.energy_budget is None or not n.energy_budget > 0:
                report.append(f"node {n.id}: nonpositive energy budget")
        if n.kind == NodeKind.CLOUD and s is None:
            report.append(f"node {n.id}: cloud without server")

    for link in t.links:
        where = f"link {link.name}"
        for end in (link.src, link.dst):
            if not t.has_node(end):
                report.append(f"{where}: unknown endpoint {end}")
        if link.src == link.dst:
            report.append(f"{where}: self loop")
        if not link.bandwidth > 0:
            report.append(f"{where}: nonpositive bandwidth ({link.bandwidth:g})")
        if not link.noise_psd > 0:
            report.append(f"{where}: nonpositive noise psd ({link.noise_psd:g})")
        if not _in_unit(link.activation):
            report.append(f"{where}: activation outside [0, 1]")
        if link.fixed_prop_delay is not None and link.fixed_prop_delay < 0:
            report.append(f"{where}: negative fixed propagation delay")
        if link.tx_power is not None and link.tx_power < 0:
            report.append(f"{where}: negative transmit power")

    for mtd in t.mtds:
        if not _reaches_server(t, mtd.id):
            report.append(f"node {mtd.id}: unreachable MTD (no route to any server)")
    return report


def _reaches_server(t: Topology, start: str) -> bool:
    stack, seen = [start], {start}
    while stack:
        cur = stack.pop()
        for link in t.out_links(cur):
            nxt = link.dst
            if nxt in seen or not t.has_node(nxt):
                continue
            if t.node(nxt).server is not None:
                return True
            seen.add(nxt)
            stack.append(nxt)
    return False


def reachable_servers(
    t: Topology,
    mtd: str,
    exclude_inactive: bool = False,
    max_hops: Optional[int] = None,
) -> list[tuple[str, Route]]:
    """Enumerate simple routes from ``mtd`` to every server-bearing node.

    Routes may pass through server nodes on the way to a farther server
    (e.g. satellite server, then gateway, then cloud).

    Args:
        exclude_inactive: skip links with activation 0 and servers whose
            activation is 0.
        max_hops: optional cap on route length.

    Returns:
        ``(server_id, route)`` pairs ordered by hop count, then by link order
        in the topology.
    """
    t.node(mtd)

    def usable(link: Link) -> bool:
        return not exclude_inactive or link.activation > 0

    def serves(node: Node) -> bool:
        if node.server is None:
            return False
        return not exclude_inactive or node.server.activation > 0

    found: list[tuple[str, Route]] = []

    def walk(cur: str, path: list[Link], visited: set[str]) -> None:
        if max_hops is not None and len(path) >= max_hops:
            return
        for link in t.out_links(cur):
            if link.dst in visited or not usable(link) or not t.has_node(link.dst):
                continue
            path.append(link)
            node = t.node(link.dst)
            if serves(node):
                found.append((node.id, tuple(path)))
            visited.add(link.dst)
            walk(link.dst, path, visited)
            visited.discard(link.dst)
            path.pop()

    walk(mtd, [], {mtd})
    # stable sort keeps DFS discovery order within equal hop counts
    found.sort(key=lambda item: len(item[1]))
    return found
