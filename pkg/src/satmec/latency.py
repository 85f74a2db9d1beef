"""Communication plus computing latency of a single offloading task."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .channel import ChannelModel, link_rate
from .geometry import node_position, propagation_delay
from .model import Link, LinkKind, Route, Task, Topology


class InfeasibleRouteError(ValueError):
    """A hop on the route has zero rate."""


@dataclass(frozen=True)
class ResourcePair:
    comm: float
    comp: float

    def __post_init__(self) -> None:
        for name, v in (("comm", self.comm), ("comp", self.comp)):
            if not 0 < v <= 1:
                raise ValueError(f"normalized {name} resource must lie in (0, 1], got {v}")


@dataclass(frozen=True)
class LatencyModelParams:
    alpha: float  # s, weight of 1/comm
    beta: float  # s, weight of 1/comp

    def __post_init__(self) -> None:
        if self.alpha < 0 or self.beta < 0 or not self.alpha + self.beta > 0:
            raise ValueError("need alpha, beta >= 0 with alpha + beta > 0")


def schematic_latency(r: ResourcePair, p: LatencyModelParams) -> float:
    """Latency as a linear combination of reciprocal normalized resources."""
    return p.alpha / r.comm + p.beta / r.comp


def compute_latency(task: Task, f_alloc: float) -> float:
    if not f_alloc > 0:
        raise ValueError("allocated CPU rate must be positive")
    return task.cycles / f_alloc


def server_share(capacity: float, n_tasks: int) -> float:
    """Equal split of a server among the tasks it runs in one segment."""
    if n_tasks < 1:
        raise ValueError("n_tasks must be >= 1")
    if not capacity > 0:
        raise ValueError("capacity must be positive")
    return capacity / n_tasks


@dataclass(frozen=True)
class LatencyBreakdown:
    transmit: tuple[float, ...]
    propagation: tuple[float, ...]
    compute: float

    @property
    def total(self) -> float:
        return sum(self.transmit) + sum(self.propagation) + self.compute

    CSV_HEADER = ("task", "route", "transmit_s", "propagation_s", "compute_s", "total_s")

    def csv_row(self, task_id: str, route_id: str) -> list[str]:
        return [
            task_id,
            route_id,
            repr(sum(self.transmit)),
            repr(sum(self.propagation)),
            repr(self.compute),
            repr(self.total),
        ]


def hop_delay(link: Link, topology: Topology, t: float = 0.0) -> float:
    if link.fixed_prop_delay is not None:
        return link.fixed_prop_delay
    a = node_position(topology.node(link.src), t)
    b = node_position(topology.node(link.dst), t)
    return propagation_delay(a, b)


def route_gains(topology: Topology, route: Route, channel: ChannelModel, t: float = 0.0) -> list[float]:
    """Large-scale linear gain of every hop at time ``t`` (1.0 on fiber hops)."""
    out = []
    for link in route:
        if link.kind == LinkKind.FIBER:
            out.append(1.0)
            continue
        a = node_position(topology.node(link.src), t)
        b = node_position(topology.node(link.dst), t)
        out.append(channel.gain(link.kind, a, b))
    return out


def route_powers(route: Route, first_hop_power: float) -> list[float]:
    """First hop at the MTD's power, relays at their link ``tx_power``."""
    powers = [first_hop_power]
    for link in route[1:]:
        powers.append(0.0 if link.tx_power is None else link.tx_power)
    return powers


def route_latency(
    task: Task,
    route: Route,
    powers: Sequence[float],
    gains: Sequence[float],
    f_alloc: float,
    topology: Topology,
    t: float = 0.0,
    p_max: Optional[float] = None,
) -> LatencyBreakdown:
    """Store-and-forward latency of ``task`` along ``route``.

    Fiber hops carry no transmission time, only their propagation delay.
    Result return to the MTD is not included.
    """
    if len(powers) != len(route) or len(gains) != len(route):
        raise ValueError("need one power and one gain per hop")
    if p_max is not None and powers[0] > p_max:
        raise ValueError("first-hop power exceeds the MTD's cap")
    transmit, prop = [], []
    for link, p, g in zip(route, powers, gains):
        if link.kind == LinkKind.FIBER:
            transmit.append(0.0)
        else:
            rate = link_rate(p, g, link)
            if not rate > 0:
                raise InfeasibleRouteError(f"zero rate on hop {link.name}")
            transmit.append(task.data_size / rate)
        prop.append(hop_delay(link, topology, t))
    return LatencyBreakdown(tuple(transmit), tuple(prop), compute_latency(task, f_alloc))
