"""Scenario files: YAML documents describing a network and its workloads.

Top-level keys (``schema_version`` is mandatory, everything else optional)::

    schema_version: 1
    nodes:      [{id, kind, position: [x, y, z] | orbit: {...}, server: {...}, p_max, energy_budget}]
    links:      [{src, dst, kind, bandwidth, noise_psd, activation, fixed_prop_delay, tx_power, power}]
    tasks:      [{owner, data_size, cycles}]
    channel:    {path_loss: {<link class>: {g0_db, d0, exponent}}, grid: {origin, spacing, nx, ny, classes}}
    process:    {durations: [...], fading: {kind, k_factor}}
    periods:    [{period, duration, label, demands: [{owner, data_size, cycles, target, rate}]}]
    fleet:      {size, altitude, server, access_bandwidth, relay_bandwidth, noise_psd, relay_power}
    placement:  {demand: [...], hardening_cost, isl_cost, hop_budget}

See ``docs/scenario-format.md`` for field units and defaults.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import yaml

from .channel import ChannelModel, FadingKind, FadingSpec, GridSpec, PathLossParams
from .geometry import OrbitDescriptor, OrbitKind
from .model import Link, LinkKind, MecServer, Node, NodeKind, Position, Task, Topology
from .orchestration import DemandSnapshot, MtdDemand, UavFleet
from .placement import PlacementProblem

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    """Malformed scenario document; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class _LineDict(dict):
    line: Optional[int] = None


class _LineLoader(yaml.SafeLoader):
    def construct_mapping(self, node, deep=False):
        mapping = _LineDict(super().construct_mapping(node, deep=deep))
        mapping.line = node.start_mark.line + 1
        return mapping


_LineLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _LineLoader.construct_mapping)
# YAML 1.1 reads 1e6 and 1.0e12 as strings; accept unsigned exponents too
_LineLoader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(
        r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
        |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
        |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
        |[-+]?\.(?:inf|Inf|INF)
        |\.(?:nan|NaN|NAN))$""",
        re.X,
    ),
    list("-+0123456789."),
)


@dataclass(frozen=True)
class Scenario:
    topology: Topology
    tasks: tuple[Task, ...] = ()
    channel: Optional[ChannelModel] = None
    durations: tuple[float, ...] = ()
    fading: FadingSpec = field(default_factory=FadingSpec)
    periods: tuple[DemandSnapshot, ...] = ()
    fleet: Optional[UavFleet] = None
    placement: Optional[PlacementProblem] = None


def _line(d: Any) -> Optional[int]:
    return getattr(d, "line", None)


def _req(d: dict, key: str, where: str) -> Any:
    if key not in d:
        raise ScenarioError(f"{where}: missing required field {key!r}", _line(d))
    return d[key]


def _num(d: dict, key: str, where: str, default: Any = ...) -> Any:
    if key not in d:
        if default is ...:
            raise ScenarioError(f"{where}: missing required field {key!r}", _line(d))
        return default
    v = d[key]
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioError(f"{where}: field {key!r} must be a number, got {v!r}", _line(d))
    return float(v)


def _enum(cls, value: Any, where: str, d: dict):
    try:
        return cls(value)
    except ValueError:
        allowed = ", ".join(e.value for e in cls)
        raise ScenarioError(f"{where}: {value!r} is not one of {allowed}", _line(d)) from None


def _position(v: Any, where: str, d: dict) -> Position:
    if not isinstance(v, list) or len(v) not in (2, 3) or not all(isinstance(c, (int, float)) for c in v):
        raise ScenarioError(f"{where}: position must be [x, y] or [x, y, z]", _line(d))
    return Position(*(float(c) for c in v))


def _server(d: Optional[dict], where: str) -> Optional[MecServer]:
    if d is None:
        return None
    return MecServer(
        capacity=_num(d, "capacity", where),
        active_power=_num(d, "active_power", where, 0.0),
        idle_power=_num(d, "idle_power", where, 0.0),
        activation=_num(d, "activation", where, 1.0),
        hardened=bool(d.get("hardened", False)),
    )


def _orbit(d: dict, where: str) -> OrbitDescriptor:
    try:
        return OrbitDescriptor(
            kind=_enum(OrbitKind, _req(d, "kind", where), where, d),
            altitude=_num(d, "altitude", where),
            coverage_radius=_num(d, "coverage_radius", where),
            origin=tuple(d.get("origin", (0.0, 0.0))),
            direction=tuple(d.get("direction", (1.0, 0.0))),
            ground_speed=_num(d, "ground_speed", where, 0.0),
            pass_period=_num(d, "pass_period", where, 0.0),
        )
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"{where}: {exc}", _line(d)) from None


def _node(d: dict, i: int) -> Node:
    if not isinstance(d, dict):
        raise ScenarioError(f"nodes[{i}] must be a mapping")
    node_id = str(_req(d, "id", f"nodes[{i}]"))
    where = f"node {node_id}"
    return Node(
        id=node_id,
        kind=_enum(NodeKind, _req(d, "kind", where), where, d),
        position=_position(d["position"], where, d) if "position" in d else None,
        orbit=_orbit(d["orbit"], where) if "orbit" in d else None,
        server=_server(d.get("server"), where),
        p_max=_num(d, "p_max", where, None),
        energy_budget=_num(d, "energy_budget", where, None),
    )


def _link(d: dict, i: int) -> Link:
    if not isinstance(d, dict):
        raise ScenarioError(f"links[{i}] must be a mapping")
    where = f"link {d.get('src')}->{d.get('dst')}"
    return Link(
        src=str(_req(d, "src", where)),
        dst=str(_req(d, "dst", where)),
        kind=_enum(LinkKind, _req(d, "kind", where), where, d),
        bandwidth=_num(d, "bandwidth", where),
        noise_psd=_num(d, "noise_psd", where),
        activation=_num(d, "activation", where, 1.0),
        fixed_prop_delay=_num(d, "fixed_prop_delay", where, None),
        tx_power=_num(d, "tx_power", where, None),
        power=_num(d, "power", where, 0.0),
    )


def _task(d: dict, where: str) -> Task:
    return Task(
        data_size=_num(d, "data_size", where),
        cycles=_num(d, "cycles", where),
        owner=str(_req(d, "owner", where)),
    )


def _list(doc: dict, key: str) -> list:
    v = doc.get(key, [])
    if v is None:
        return []
    if not isinstance(v, list):
        raise ScenarioError(f"{key!r} must be a list", _line(doc))
    return v


def _channel(d: dict) -> ChannelModel:
    params = {}
    pl = _req(d, "path_loss", "channel")
    for cls, p in pl.items():
        _enum(LinkKind, cls, "channel.path_loss", pl)
        where = f"channel.path_loss.{cls}"
        try:
            params[cls] = PathLossParams(_num(p, "g0_db", where), _num(p, "d0", where), _num(p, "exponent", where))
        except ValueError as exc:
            if isinstance(exc, ScenarioError):
                raise
            raise ScenarioError(f"{where}: {exc}", _line(p)) from None
    grid = None
    if d.get("grid") is not None:
        g = d["grid"]
        grid = GridSpec(tuple(float(v) for v in _req(g, "origin", "channel.grid")), _num(g, "spacing", "channel.grid"),
                        int(_req(g, "nx", "channel.grid")), int(_req(g, "ny", "channel.grid")))
        if "classes" in g:
            return ChannelModel(params, grid, tuple(str(c) for c in g["classes"]))
    return ChannelModel(params, grid)


def _period(d: dict, i: int) -> DemandSnapshot:
    where = f"periods[{i}]"
    demands = []
    for j, e in enumerate(_list(d, "demands")):
        w = f"{where}.demands[{j}]"
        demands.append(MtdDemand(_task(e, w), _num(e, "target", w), _num(e, "rate", w, 0.0)))
    try:
        period = d.get("period", i + 1)
        if not isinstance(period, int) or isinstance(period, bool):
            raise ScenarioError(f"{where}: period must be an integer", _line(d))
        return DemandSnapshot(period, _num(d, "duration", where), tuple(demands), str(d.get("label", "")))
    except ValueError as exc:
        raise ScenarioError(f"{where}: {exc}", _line(d)) from None


def _fleet(d: dict) -> UavFleet:
    w = "fleet"
    return UavFleet(
        size=int(_req(d, "size", w)),
        altitude=_num(d, "altitude", w),
        server=_server(_req(d, "server", w), w),
        access_bandwidth=_num(d, "access_bandwidth", w),
        relay_bandwidth=_num(d, "relay_bandwidth", w),
        noise_psd=_num(d, "noise_psd", w),
        relay_power=_num(d, "relay_power", w),
    )


def parse_scenario(text: str) -> Scenario:
    try:
        doc = yaml.load(text, Loader=_LineLoader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise ScenarioError(f"YAML syntax error: {exc.problem}", mark.line + 1 if mark else None) from None
    except yaml.YAMLError as exc:
        raise ScenarioError(f"YAML error: {exc}") from None
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a mapping at top level")
    version = doc.get("schema_version")
    if version is None:
        raise ScenarioError("missing mandatory schema_version", 1)
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})", _line(doc))

    nodes = tuple(_node(d, i) for i, d in enumerate(_list(doc, "nodes")))
    links = tuple(_link(d, i) for i, d in enumerate(_list(doc, "links")))
    tags = tuple(str(t) for t in _list(doc, "structure_tags"))
    topology = Topology(nodes, links, tags)
    tasks = tuple(_task(d, f"tasks[{i}]") for i, d in enumerate(_list(doc, "tasks")))

    channel = _channel(doc["channel"]) if doc.get("channel") else None
    durations: tuple[float, ...] = ()
    fading = FadingSpec()
    if doc.get("process"):
        proc = doc["process"]
        durations = tuple(float(v) for v in _req(proc, "durations", "process"))
        if proc.get("fading"):
            f = proc["fading"]
            k = f.get("k_factor", 0.0)
            fading = FadingSpec(_enum(FadingKind, f.get("kind", "none"), "process.fading", f),
                                math.inf if k == "inf" else float(k))
    periods = tuple(_period(d, i) for i, d in enumerate(_list(doc, "periods")))
    fleet = _fleet(doc["fleet"]) if doc.get("fleet") else None
    placement = None
    if doc.get("placement"):
        p = doc["placement"]
        try:
            placement = PlacementProblem(
                tuple(float(v) for v in _req(p, "demand", "placement")),
                _num(p, "hardening_cost", "placement"),
                _num(p, "isl_cost", "placement"),
                int(_req(p, "hop_budget", "placement")),
            )
        except ValueError as exc:
            if isinstance(exc, ScenarioError):
                raise
            raise ScenarioError(f"placement: {exc}", _line(p)) from None
    return Scenario(topology, tasks, channel, durations, fading, periods, fleet, placement)


def load_scenario(path: Union[str, Path]) -> Scenario:
    return parse_scenario(Path(path).read_text())


# --- serialization -----------------------------------------------------------


def _drop_none(d: dict) -> dict:
    return {k: v for k, v in d.items() if v is not None}


def _server_doc(s: Optional[MecServer]) -> Optional[dict]:
    if s is None:
        return None
    return {
        "capacity": s.capacity,
        "active_power": s.active_power,
        "idle_power": s.idle_power,
        "activation": s.activation,
        "hardened": s.hardened,
    }


def _node_doc(n: Node) -> dict:
    d: dict[str, Any] = {"id": n.id, "kind": n.kind.value}
    if n.position is not None:
        d["position"] = [float(n.position.x), float(n.position.y), float(n.position.z)]
    if n.orbit is not None:
        o = n.orbit
        d["orbit"] = {
            "kind": o.kind.value,
            "altitude": o.altitude,
            "coverage_radius": o.coverage_radius,
            "origin": [float(v) for v in o.origin],
            "direction": [float(v) for v in o.direction],
            "ground_speed": o.ground_speed,
            "pass_period": o.pass_period,
        }
    d["server"] = _server_doc(n.server)
    d["p_max"] = n.p_max
    d["energy_budget"] = n.energy_budget
    return _drop_none(d)


def _link_doc(link: Link) -> dict:
    return _drop_none(
        {
            "src": link.src,
            "dst": link.dst,
            "kind": link.kind.value,
            "bandwidth": link.bandwidth,
            "noise_psd": link.noise_psd,
            "activation": link.activation,
            "fixed_prop_delay": link.fixed_prop_delay,
            "tx_power": link.tx_power,
            "power": link.power,
        }
    )


def topology_doc(t: Topology) -> dict:
    return {
        "structure_tags": list(t.structure_tags),
        "nodes": [_node_doc(n) for n in t.nodes],
        "links": [_link_doc(link) for link in t.links],
    }


def serialize_scenario(s: Scenario) -> str:
    doc: dict[str, Any] = {"schema_version": SCHEMA_VERSION, **topology_doc(s.topology)}
    if s.tasks:
        doc["tasks"] = [{"owner": t.owner, "data_size": t.data_size, "cycles": t.cycles} for t in s.tasks]
    if s.channel is not None:
        ch: dict[str, Any] = {
            "path_loss": {
                k: {"g0_db": p.g0_db, "d0": p.d0, "exponent": p.exponent} for k, p in s.channel.params.items()
            }
        }
        if s.channel.grid is not None:
            g = s.channel.grid
            ch["grid"] = {"origin": list(g.origin), "spacing": g.spacing, "nx": g.nx, "ny": g.ny,
                          "classes": list(s.channel.mapped)}
        doc["channel"] = ch
    if s.durations:
        k = s.fading.k_factor
        doc["process"] = {
            "durations": list(s.durations),
            "fading": {"kind": s.fading.kind.value, "k_factor": "inf" if math.isinf(k) else k},
        }
    if s.periods:
        doc["periods"] = [
            {
                "period": p.period,
                "duration": p.duration,
                "label": p.label,
                "demands": [
                    {"owner": d.task.owner, "data_size": d.task.data_size, "cycles": d.task.cycles,
                     "target": d.target, "rate": d.rate}
                    for d in p.demands
                ],
            }
            for p in s.periods
        ]
    if s.fleet is not None:
        f = s.fleet
        doc["fleet"] = {
            "size": f.size,
            "altitude": f.altitude,
            "server": _server_doc(f.server),
            "access_bandwidth": f.access_bandwidth,
            "relay_bandwidth": f.relay_bandwidth,
            "noise_psd": f.noise_psd,
            "relay_power": f.relay_power,
        }
    if s.placement is not None:
        p = s.placement
        doc["placement"] = {
            "demand": list(p.demand),
            "hardening_cost": p.hardening_cost,
            "isl_cost": p.isl_cost,
            "hop_budget": p.hop_budget,
        }
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None, width=120)


def serialize_topology(t: Topology) -> str:
    return serialize_scenario(Scenario(t))


def parse_topology(text: str) -> Topology:
    return parse_scenario(text).topology
