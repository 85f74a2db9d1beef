"""Process-oriented joint power allocation and offloading.

A *process* is a medium-timescale period split into K segments. Before the
process starts, every MTD chooses, per segment, which candidate route to
offload over and at what power to transmit, under a process-wide energy
budget. Only large-scale gains are used for the decision; fading enters
through :func:`evaluate_plan`.

The latency of one task (MTD m, segment k, route r) is

    D_m / R(p_mk; first hop) + relay transmit + propagation + C_m * n / F

where n is the number of tasks sharing the route's server in segment k and F
its capacity. The plan objective is the sum over all tasks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Literal, Mapping, Optional, Sequence

import numpy as np
from scipy.special import lambertw

from .channel import ChannelModel, FadingSpec, sample_fading
from .geometry import nearest_association, node_position
from .latency import hop_delay, route_gains
from .model import LinkKind, NodeKind, Route, Task, Topology, reachable_servers

SENTINEL_LATENCY = 1e6  # s, charged for a task sent with zero power
MAX_EXACT_ASSIGNMENTS = 1 << 12
TRIAL_BLOCK = 4096
LN2 = math.log(2.0)


@dataclass(frozen=True)
class Hop:
    gain: float  # large-scale linear gain
    bandwidth: float
    noise_psd: float
    prop_delay: float
    tx_power: Optional[float] = None  # None: the MTD's planned power (first hop only)
    wired: bool = False  # fiber: no transmission time

    def rate(self, power: float, fading: float = 1.0) -> float:
        snr = power * self.gain * fading / (self.noise_psd * self.bandwidth)
        return self.bandwidth * math.log2(1.0 + snr)


@dataclass(frozen=True)
class RouteOption:
    server: str
    hops: tuple[Hop, ...]
    label: str = ""

    def __post_init__(self) -> None:
        if not self.hops:
            raise ValueError("route option needs at least one hop")
        first = self.hops[0]
        if first.wired or first.tx_power is not None:
            raise ValueError("first hop must be the MTD's radio hop")
        for h in self.hops:
            if not h.gain > 0 and not h.wired:
                raise ValueError("hop gains must be positive")

    def tail_delay(self, data_size: float) -> float:
        """Relay transmission plus all propagation delay."""
        total = sum(h.prop_delay for h in self.hops)
        for h in self.hops[1:]:
            if not h.wired:
                total += data_size / h.rate(h.tx_power or 0.0)
        return total


@dataclass(frozen=True)
class MtdProfile:
    id: str
    data_size: float  # bits per task
    cycles: float  # CPU cycles per task
    energy_budget: float  # J over the whole process
    p_max: float  # W


@dataclass(frozen=True)
class Process:
    durations: tuple[float, ...]
    mtds: tuple[MtdProfile, ...]
    options: tuple[tuple[tuple[RouteOption, ...], ...], ...]  # [mtd][segment][route]
    capacities: Mapping[str, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "durations", tuple(float(d) for d in self.durations))
        if len(self.durations) < 1:
            raise ValueError("process needs at least one segment")
        if any(not d > 0 for d in self.durations):
            raise ValueError("segment durations must be positive")
        if len(self.options) != len(self.mtds):
            raise ValueError("need route options for every MTD")
        for m, per_seg in zip(self.mtds, self.options):
            if not m.energy_budget > 0:
                raise ValueError(f"MTD {m.id}: energy budget must be positive")
            if not m.p_max > 0:
                raise ValueError(f"MTD {m.id}: power cap must be positive")
            if m.data_size <= 0 or m.cycles <= 0:
                raise ValueError(f"MTD {m.id}: task sizes must be positive")
            if len(per_seg) != self.K:
                raise ValueError(f"MTD {m.id}: need options for each of {self.K} segments")
            for opts in per_seg:
                if not opts:
                    raise ValueError(f"MTD {m.id}: segment without candidate routes")
                for o in opts:
                    if not self.capacities.get(o.server, 0) > 0:
                        raise ValueError(f"server {o.server} has no positive capacity")

    @property
    def K(self) -> int:
        return len(self.durations)

    @property
    def M(self) -> int:
        return len(self.mtds)

    def n_routes(self, m: int, k: int) -> int:
        return len(self.options[m][k])


@dataclass(frozen=True)
class Plan:
    targets: np.ndarray  # (M, K) route index into proc.options[m][k]
    powers: np.ndarray  # (M, K) W
    method: str = ""

    def labels(self, proc: Process) -> list[list[str]]:
        return [
            [proc.options[m][k][int(self.targets[m, k])].label or proc.options[m][k][int(self.targets[m, k])].server
             for k in range(proc.K)]
            for m in range(proc.M)
        ]


@dataclass(frozen=True)
class PlanObjective:
    total: float
    per_task: np.ndarray  # (M, K) s


# --- task latency model ------------------------------------------------------


def _comm_latency(data_size: float, hop: Hop, power: float) -> float:
    if power <= 0:
        return math.inf
    return data_size / hop.rate(power)


def _server_loads(proc: Process, targets: np.ndarray, powers: np.ndarray, k: int) -> dict[str, int]:
    loads: dict[str, int] = {}
    for m in range(proc.M):
        if powers[m, k] > 0:
            s = proc.options[m][k][int(targets[m, k])].server
            loads[s] = loads.get(s, 0) + 1
    return loads


def task_latencies(proc: Process, targets: np.ndarray, powers: np.ndarray) -> np.ndarray:
    """Predicted latency of every task under large-scale gains.

    Zero-power tasks are charged :data:`SENTINEL_LATENCY` and do not load a server.
    """
    out = np.empty((proc.M, proc.K))
    for k in range(proc.K):
        loads = _server_loads(proc, targets, powers, k)
        for m, prof in enumerate(proc.mtds):
            p = float(powers[m, k])
            if p <= 0:
                out[m, k] = SENTINEL_LATENCY
                continue
            opt = proc.options[m][k][int(targets[m, k])]
            share = proc.capacities[opt.server] / loads[opt.server]
            out[m, k] = (
                _comm_latency(prof.data_size, opt.hops[0], p)
                + opt.tail_delay(prof.data_size)
                + prof.cycles / share
            )
    return out


def plan_objective(proc: Process, plan: Plan) -> PlanObjective:
    lat = task_latencies(proc, plan.targets, plan.powers)
    return PlanObjective(float(lat.sum()), lat)


def check_feasible(proc: Process, plan: Plan, slack: float = 1e-12) -> None:
    """Raise if a plan breaks a power cap or an energy budget."""
    tau = np.array(proc.durations)
    for m, prof in enumerate(proc.mtds):
        p = plan.powers[m]
        if np.any(p < 0) or np.any(p > prof.p_max + slack):
            raise ValueError(f"MTD {prof.id}: power outside [0, p_max]")
        if float(p @ tau) > prof.energy_budget + slack:
            raise ValueError(f"MTD {prof.id}: energy budget exceeded")


# --- power allocation --------------------------------------------------------


def _powers_for_multiplier(lam, a, c, p_max):
    # stationarity x^2 e^x = c / lam with x = ln(1 + a p); closed form via Lambert W
    x = 2.0 * lambertw(np.sqrt(c / lam) / 2.0).real
    return np.minimum(np.expm1(x) / a, p_max)


def allocate_power(
    gains: Sequence[float],
    durations: Sequence[float],
    data_size: float,
    bandwidth: float | Sequence[float],
    noise_psd: float | Sequence[float],
    energy: float,
    p_max: float,
) -> np.ndarray:
    """Minimize total transmit latency over segments under an energy budget.

    Solves ``min sum_k D / R_k(p_k)`` subject to ``sum_k p_k tau_k <= E`` and
    ``0 <= p_k <= p_max`` by bisection on the budget multiplier. For a given
    multiplier each segment's stationarity condition is solved in closed form.
    The returned powers never exceed the budget.
    """
    g = np.asarray(gains, dtype=float)
    tau = np.asarray(durations, dtype=float)
    bw = np.broadcast_to(np.asarray(bandwidth, dtype=float), g.shape)
    n0 = np.broadcast_to(np.asarray(noise_psd, dtype=float), g.shape)
    if g.shape != tau.shape:
        raise ValueError("need one gain per segment")
    if not energy > 0 or not p_max > 0:
        raise ValueError("energy budget and power cap must be positive")
    if np.any(g <= 0):
        raise ValueError("gains must be positive")

    a = g / (n0 * bw)
    c = data_size * LN2 * a / (bw * tau)
    if float(p_max * tau.sum()) <= energy:
        return np.full(g.shape, float(p_max))

    def usage(lam: float) -> float:
        return float(_powers_for_multiplier(lam, a, c, p_max) @ tau)

    # at lam_lo every segment sits at its cap
    x_cap = np.log1p(a * p_max)
    lam_lo = float(np.min(c / (x_cap**2 * np.exp(x_cap))))
    lam_hi = lam_lo * 2.0
    while usage(lam_hi) > energy:
        lam_lo, lam_hi = lam_hi, lam_hi * 4.0
    for _ in range(200):
        mid = math.sqrt(lam_lo * lam_hi)
        if not lam_lo < mid < lam_hi:
            break
        if usage(mid) > energy:
            lam_lo = mid
        else:
            lam_hi = mid
    return _powers_for_multiplier(lam_hi, a, c, p_max)


@dataclass(frozen=True)
class KKTReport:
    multiplier: float
    stationarity: float  # max relative violation over uncapped segments
    cap_condition: float  # max relative violation at capped segments
    budget: float  # relative budget excess
    complementarity: float  # relative slack when the multiplier is positive


def kkt_residuals(
    powers: Sequence[float],
    gains: Sequence[float],
    durations: Sequence[float],
    data_size: float,
    bandwidth: float | Sequence[float],
    noise_psd: float | Sequence[float],
    energy: float,
    p_max: float,
    cap_tol: float = 1e-12,
) -> KKTReport:
    """KKT residuals of a power allocation, from the latency derivative directly."""
    p = np.asarray(powers, dtype=float)
    g = np.asarray(gains, dtype=float)
    tau = np.asarray(durations, dtype=float)
    bw = np.broadcast_to(np.asarray(bandwidth, dtype=float), g.shape)
    n0 = np.broadcast_to(np.asarray(noise_psd, dtype=float), g.shape)
    a = g / (n0 * bw)
    rate = bw * np.log2(1.0 + a * p)
    # -d/dp of D / R(p), per unit duration
    marginal = data_size * bw * a / ((1.0 + a * p) * LN2) / rate**2 / tau
    capped = p >= p_max * (1.0 - cap_tol)
    used = float(p @ tau)
    slack = (energy - used) / energy
    if np.any(~capped):
        lam = float(np.mean(marginal[~capped]))
        stat = float(np.max(np.abs(marginal[~capped] - lam)) / lam)
    else:
        lam = float(np.min(marginal)) if abs(slack) <= 1e-9 else 0.0
        stat = 0.0
    cap_cond = float(np.max(np.maximum(lam - marginal[capped], 0.0)) / lam) if lam > 0 and np.any(capped) else 0.0
    return KKTReport(
        multiplier=lam,
        stationarity=stat,
        cap_condition=cap_cond,
        budget=max(-slack, 0.0),
        complementarity=abs(slack) if lam > 0 else 0.0,
    )


def _route_powers(proc: Process, m: int, routes: Sequence[int]) -> np.ndarray:
    prof = proc.mtds[m]
    hops = [proc.options[m][k][r].hops[0] for k, r in enumerate(routes)]
    return allocate_power(
        [h.gain for h in hops],
        proc.durations,
        prof.data_size,
        [h.bandwidth for h in hops],
        [h.noise_psd for h in hops],
        prof.energy_budget,
        prof.p_max,
    )


def _allocate_all(proc: Process, targets: np.ndarray) -> np.ndarray:
    return np.array([_route_powers(proc, m, targets[m]) for m in range(proc.M)])


# --- schemes -----------------------------------------------------------------


def _exact(proc: Process) -> Plan:
    per_mtd = []
    for m in range(proc.M):
        choices = list(itertools.product(*(range(proc.n_routes(m, k)) for k in range(proc.K))))
        entries = []
        for routes in choices:
            p = _route_powers(proc, m, routes)
            prof = proc.mtds[m]
            comm = sum(
                _comm_latency(prof.data_size, proc.options[m][k][r].hops[0], p[k])
                + proc.options[m][k][r].tail_delay(prof.data_size)
                for k, r in enumerate(routes)
            )
            entries.append((routes, p, comm))
        per_mtd.append(entries)
    n_assign = math.prod(len(e) for e in per_mtd)
    if n_assign > MAX_EXACT_ASSIGNMENTS:
        raise ValueError(f"exact enumeration over {n_assign} assignments exceeds {MAX_EXACT_ASSIGNMENTS}")

    cycles = [prof.cycles for prof in proc.mtds]
    servers = [[[o.server for o in proc.options[m][k]] for k in range(proc.K)] for m in range(proc.M)]
    best_val, best = math.inf, None
    for combo in itertools.product(*per_mtd):
        total = sum(e[2] for e in combo)
        for k in range(proc.K):
            loads: dict[str, list[float]] = {}
            for m, e in enumerate(combo):
                loads.setdefault(servers[m][k][e[0][k]], []).append(cycles[m])
            for s, cs in loads.items():
                total += len(cs) * sum(cs) / proc.capacities[s]
        if total < best_val * (1.0 - 1e-12):
            best_val, best = total, combo
    assert best is not None
    return Plan(np.array([e[0] for e in best], dtype=int), np.array([e[1] for e in best]), "exact")


def _segment_best_response(proc: Process, targets: np.ndarray, powers: np.ndarray, k: int, max_sweeps: int = 50) -> None:
    """Round-robin: each MTD in turn moves to the route minimizing the segment's total latency."""
    for _ in range(max_sweeps):
        changed = False
        for m in range(proc.M):
            if proc.n_routes(m, k) == 1:
                continue
            current = int(targets[m, k])
            costs = []
            for r in range(proc.n_routes(m, k)):
                targets[m, k] = r
                costs.append(task_latencies_segment(proc, targets, powers, k))
            best = current
            for r, c in enumerate(costs):
                if c < costs[best] * (1.0 - 1e-12):
                    best = r
            targets[m, k] = best
            changed |= best != current
        if not changed:
            return


def task_latencies_segment(
    proc: Process, targets: np.ndarray, powers: np.ndarray, k: int, members: Optional[Sequence[int]] = None
) -> float:
    """Total latency of segment ``k`` counting only ``members`` (default: all MTDs)."""
    members = range(proc.M) if members is None else members
    loads: dict[str, int] = {}
    for m in members:
        if powers[m, k] > 0:
            s = proc.options[m][k][int(targets[m, k])].server
            loads[s] = loads.get(s, 0) + 1
    total = 0.0
    for m in members:
        prof = proc.mtds[m]
        p = float(powers[m, k])
        if p <= 0:
            total += SENTINEL_LATENCY
            continue
        opt = proc.options[m][k][int(targets[m, k])]
        total += (
            _comm_latency(prof.data_size, opt.hops[0], p)
            + opt.tail_delay(prof.data_size)
            + prof.cycles * loads[opt.server] / proc.capacities[opt.server]
        )
    return total


def _sequential_start(proc: Process, targets: np.ndarray, powers: np.ndarray, k: int) -> None:
    """Insert MTDs one at a time, each onto its best route given those already placed."""
    for m in range(proc.M):
        best_r, best_c = 0, math.inf
        for r in range(proc.n_routes(m, k)):
            targets[m, k] = r
            c = task_latencies_segment(proc, targets, powers, k, range(m + 1))
            if c < best_c * (1.0 - 1e-12):
                best_r, best_c = r, c
        targets[m, k] = best_r


def state_oriented_baseline(proc: Process) -> Plan:
    """Myopic per-segment scheme: spend as much power as possible now, route greedily."""
    tau = proc.durations
    remaining = np.array([prof.energy_budget for prof in proc.mtds], dtype=float)
    targets = np.zeros((proc.M, proc.K), dtype=int)
    powers = np.zeros((proc.M, proc.K))
    for k in range(proc.K):
        for m, prof in enumerate(proc.mtds):
            powers[m, k] = max(min(prof.p_max, remaining[m] / tau[k]), 0.0)
            remaining[m] = max(remaining[m] - powers[m, k] * tau[k], 0.0)
        _sequential_start(proc, targets, powers, k)
        _segment_best_response(proc, targets, powers, k)
    return Plan(targets, powers, "state-oriented")


def satellite_only_baseline(proc: Process, label: str = "satellite") -> Plan:
    """Every task goes over the satellite route; powers from :func:`allocate_power`."""
    targets = np.zeros((proc.M, proc.K), dtype=int)
    for m in range(proc.M):
        for k in range(proc.K):
            idx = [r for r, o in enumerate(proc.options[m][k]) if o.label == label]
            if not idx:
                raise ValueError(f"MTD {proc.mtds[m].id} has no {label!r} route in segment {k}")
            targets[m, k] = idx[0]
    return Plan(targets, _allocate_all(proc, targets), "satellite-only")


def _alternating_from(proc: Process, start: Plan, max_iter: int = 100, tol: float = 1e-9) -> tuple[Plan, float]:
    targets = start.targets.copy()
    powers = start.powers.copy()
    value = plan_objective(proc, Plan(targets, powers)).total
    for _ in range(max_iter):
        for k in range(proc.K):
            _segment_best_response(proc, targets, powers, k)
        new_powers = _allocate_all(proc, targets)
        candidate = plan_objective(proc, Plan(targets, new_powers)).total
        if candidate <= plan_objective(proc, Plan(targets, powers)).total:
            powers = new_powers
        else:
            candidate = plan_objective(proc, Plan(targets, powers)).total
        improvement = value - candidate
        value = min(value, candidate)
        if improvement < tol * max(1.0, abs(value)):
            break
    return Plan(targets, powers, "alternating"), value


def _alternating(proc: Process) -> Plan:
    uniform = np.array(
        [[min(prof.p_max, prof.energy_budget / sum(proc.durations))] * proc.K for prof in proc.mtds]
    )
    starts = [Plan(np.zeros((proc.M, proc.K), dtype=int), uniform), state_oriented_baseline(proc)]
    try:
        starts.append(satellite_only_baseline(proc))
    except ValueError:
        pass
    best_plan, best_val = None, math.inf
    for s in starts:
        plan, val = _alternating_from(proc, s)
        if val < best_val * (1.0 - 1e-12):
            best_plan, best_val = plan, val
    assert best_plan is not None
    return best_plan


def optimize_process(proc: Process, method: Literal["exact", "alternating"] = "exact") -> tuple[Plan, PlanObjective]:
    """Jointly choose routes and powers for the whole process.

    ``exact`` enumerates every route assignment and solves the power
    allocation of each MTD for it; ``alternating`` alternates round-robin
    route best responses with power re-allocation, started from the uniform,
    state-oriented and satellite-only plans, keeping the best.
    """
    if method == "exact":
        plan = _exact(proc)
    elif method == "alternating":
        plan = _alternating(proc)
    else:
        raise ValueError(f"unknown method {method!r}")
    return plan, plan_objective(proc, plan)


def exact_size(proc: Process) -> int:
    return math.prod(proc.n_routes(m, k) for m in range(proc.M) for k in range(proc.K))


# --- Monte Carlo evaluation --------------------------------------------------


@dataclass(frozen=True)
class RealizedStats:
    trials: int
    mean: float  # mean of the per-trial total latency
    p50: float
    p95: float
    task_mean: float  # over all task samples
    task_p50: float
    task_p95: float


def _stats(totals: np.ndarray, tasks: np.ndarray) -> RealizedStats:
    return RealizedStats(
        trials=len(totals),
        mean=float(totals.mean()),
        p50=float(np.percentile(totals, 50)),
        p95=float(np.percentile(totals, 95)),
        task_mean=float(tasks.mean()),
        task_p50=float(np.percentile(tasks, 50)),
        task_p95=float(np.percentile(tasks, 95)),
    )


def evaluate_plan(
    plan: Plan,
    proc: Process,
    fading: FadingSpec,
    trials: int,
    seed: int,
) -> RealizedStats:
    """Monte Carlo latency of a plan under small-scale fading on every hop.

    Trials are drawn in fixed blocks of :data:`TRIAL_BLOCK`; block ``b`` uses
    ``numpy.random.default_rng([seed, b])`` and draws an array shaped
    (trials, M, K, hops). Results therefore do not depend on how blocks are
    scheduled. With a deterministic fading spec the predicted latencies are
    returned exactly.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    predicted = task_latencies(proc, plan.targets, plan.powers)
    if fading.deterministic:
        total = float(predicted.sum())
        return _stats(np.array([total]), predicted.ravel())

    M, K = proc.M, proc.K
    H = max(len(proc.options[m][k][int(plan.targets[m, k])].hops) for m in range(M) for k in range(K))
    gain = np.ones((M, K, H))
    bw = np.ones((M, K, H))
    n0 = np.ones((M, K, H))
    power = np.zeros((M, K, H))
    radio = np.zeros((M, K, H), dtype=bool)
    fixed = np.zeros((M, K))  # propagation + compute
    data = np.array([prof.data_size for prof in proc.mtds])[:, None, None]
    dead = np.zeros((M, K), dtype=bool)
    for k in range(K):
        loads = _server_loads(proc, plan.targets, plan.powers, k)
        for m, prof in enumerate(proc.mtds):
            opt = proc.options[m][k][int(plan.targets[m, k])]
            if plan.powers[m, k] <= 0:
                dead[m, k] = True
                continue
            fixed[m, k] = sum(h.prop_delay for h in opt.hops) + prof.cycles * loads[opt.server] / proc.capacities[opt.server]
            for i, h in enumerate(opt.hops):
                if h.wired:
                    continue
                radio[m, k, i] = True
                gain[m, k, i], bw[m, k, i], n0[m, k, i] = h.gain, h.bandwidth, h.noise_psd
                power[m, k, i] = plan.powers[m, k] if i == 0 else (h.tx_power or 0.0)

    totals, task_samples = [], []
    for b, start in enumerate(range(0, trials, TRIAL_BLOCK)):
        n = min(TRIAL_BLOCK, trials - start)
        rng = np.random.default_rng([seed, b])
        f = sample_fading(fading, rng, (n, M, K, H))
        snr = power * gain * f / (n0 * bw)
        with np.errstate(divide="ignore"):
            tx = np.where(radio, data / (bw * np.log2(1.0 + snr)), 0.0)
        lat = tx.sum(axis=3) + fixed
        lat = np.where(dead, SENTINEL_LATENCY, lat)
        totals.append(lat.sum(axis=(1, 2)))
        task_samples.append(lat.ravel())
    return _stats(np.concatenate(totals), np.concatenate(task_samples))


# --- building a process from a topology -------------------------------------


def case_study_routes(topology: Topology) -> dict[str, list[tuple[str, Route]]]:
    """Candidate routes per MTD: its nearest UAV server, and satellite-to-cloud.

    The UAV route is the single user-access hop to the nearest server-bearing
    access platform. The satellite route is the shortest route that starts
    with a user-satellite hop and ends at the cloud.
    """
    uavs = [n for n in topology.nodes_of(NodeKind.ACCESS) if n.server is not None]
    assoc = nearest_association(topology.mtds, [node_position(u) for u in uavs]) if uavs else {}
    out: dict[str, list[tuple[str, Route]]] = {}
    for mtd in topology.mtds:
        routes = reachable_servers(topology, mtd.id)
        chosen: list[tuple[str, Route]] = []
        if uavs:
            uav = uavs[assoc[mtd.id]].id
            direct = [r for s, r in routes if s == uav and len(r) == 1]
            if direct:
                chosen.append(("uav", direct[0]))
        sat = [
            r
            for s, r in routes
            if topology.node(s).kind == NodeKind.CLOUD and r[0].kind == LinkKind.USER_SATELLITE
        ]
        if sat:
            chosen.append(("satellite", sat[0]))
        if not chosen:
            raise ValueError(f"MTD {mtd.id} has no candidate route")
        out[mtd.id] = chosen
    return out


def build_process(
    topology: Topology,
    channel: ChannelModel,
    tasks: Sequence[Task],
    durations: Sequence[float],
    routes: Optional[Mapping[str, Sequence[tuple[str, Route]]]] = None,
    start: float = 0.0,
) -> Process:
    """Sample hop gains and delays at each segment midpoint into a :class:`Process`."""
    if routes is None:
        routes = case_study_routes(topology)
    by_owner = {t.owner: t for t in tasks}
    mids, t = [], start
    for d in durations:
        mids.append(t + d / 2.0)
        t += d
    profiles, options = [], []
    for mtd in topology.mtds:
        if mtd.id not in by_owner:
            continue
        task = by_owner[mtd.id]
        profiles.append(MtdProfile(mtd.id, task.data_size, task.cycles, mtd.energy_budget, mtd.p_max))
        per_seg = []
        for tm in mids:
            opts = []
            for label, route in routes[mtd.id]:
                gains = route_gains(topology, route, channel, tm)
                hops = tuple(
                    Hop(
                        gain=g,
                        bandwidth=link.bandwidth,
                        noise_psd=link.noise_psd,
                        prop_delay=hop_delay(link, topology, tm),
                        tx_power=None if i == 0 else (link.tx_power or 0.0),
                        wired=link.kind == LinkKind.FIBER,
                    )
                    for i, (link, g) in enumerate(zip(route, gains))
                )
                opts.append(RouteOption(route[-1].dst, hops, label))
            per_seg.append(tuple(opts))
        options.append(tuple(per_seg))
    capacities = {n.id: n.server.capacity for n in topology.servers}
    return Process(tuple(durations), tuple(profiles), tuple(options), capacities)


PLAN_CSV_HEADER = ("scheme", "mtd", "segment", "target", "power_w", "predicted_s")


def plan_rows(proc: Process, plan: Plan, scheme: str) -> list[list[str]]:
    lat = task_latencies(proc, plan.targets, plan.powers)
    labels = plan.labels(proc)
    return [
        [scheme, prof.id, str(k), labels[m][k], repr(float(plan.powers[m, k])), repr(float(lat[m, k]))]
        for m, prof in enumerate(proc.mtds)
        for k in range(proc.K)
    ]


