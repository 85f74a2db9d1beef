"""Random instance generators and independent oracles shared by the tests.

The oracles deliberately avoid the package's solvers: they recompute Shannon
rates, latencies and costs from scratch and search by brute force.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from satmec.optimizer import Hop, MtdProfile, Process, RouteOption

NOISE = 4e-21
SENTINEL = 1e6


def random_process(rng: np.random.Generator, M: int, K: int, tight: bool = True) -> Process:
    """Two candidate routes per segment: a UAV server, or satellite relay to the cloud."""
    tau = rng.uniform(5.0, 20.0, K)
    mtds, options = [], []
    for m in range(M):
        p_max = rng.uniform(0.1, 0.5)
        budget = p_max * tau.sum() * rng.uniform(0.2, 0.9 if tight else 1.5)
        mtds.append(MtdProfile(f"m{m}", rng.uniform(2e5, 2e6), rng.uniform(1e8, 1e9), budget, p_max))
        uav = f"uav{int(rng.integers(0, 2))}"
        per_seg = []
        for _ in range(K):
            direct = RouteOption(uav, (Hop(10 ** rng.uniform(-11, -8.5), 1e6, NOISE, 1e-6),), "uav")
            via_sat = RouteOption(
                "cloud",
                (
                    Hop(10 ** rng.uniform(-13, -10), 1e6, NOISE, 2e-3),
                    Hop(1e-12, 5e7, NOISE, 2e-3, tx_power=10.0),
                    Hop(1.0, 1.0, 1.0, 0.01, wired=True),
                ),
                "satellite",
            )
            per_seg.append((direct, via_sat))
        options.append(tuple(per_seg))
    caps = {"uav0": rng.uniform(1e9, 5e9), "uav1": rng.uniform(1e9, 5e9), "cloud": 1e11}
    return Process(tuple(tau), tuple(mtds), tuple(options), caps)


# --- latency, from first principles ------------------------------------------


def shannon(p, g, bandwidth, noise):
    return bandwidth * np.log2(1.0 + np.asarray(p) * g / (noise * bandwidth))


def tail(option: RouteOption, data: float) -> float:
    t = 0.0
    for i, h in enumerate(option.hops):
        t += h.prop_delay
        if i > 0 and not h.wired:
            t += data / float(shannon(h.tx_power, h.gain, h.bandwidth, h.noise_psd))
    return t


def objective(proc: Process, targets, powers) -> float:
    """Total predicted latency, written independently of the package."""
    total = 0.0
    for k in range(proc.K):
        load: dict[str, int] = {}
        for m in range(proc.M):
            if powers[m][k] > 0:
                s = proc.options[m][k][targets[m][k]].server
                load[s] = load.get(s, 0) + 1
        for m, prof in enumerate(proc.mtds):
            p = powers[m][k]
            if p <= 0:
                total += SENTINEL
                continue
            opt = proc.options[m][k][targets[m][k]]
            h = opt.hops[0]
            total += prof.data_size / float(shannon(p, h.gain, h.bandwidth, h.noise_psd))
            total += tail(opt, prof.data_size)
            total += prof.cycles * load[opt.server] / proc.capacities[opt.server]
    return total


# --- power grid search ---------------------------------------------------------


def grid_power(gains, taus, data, bandwidth, noise, energy, p_max, step_frac):
    """Minimum of sum_k D/R_k over a power lattice.

    The first K-1 powers range over multiples of ``step_frac * p_max``; the
    last one spends whatever budget is left (capped at p_max), which is
    optimal for any fixed prefix because latency falls with power.
    """
    K = len(gains)
    n = int(round(1.0 / step_frac))
    levels = p_max * np.arange(1, n + 1) / n
    gains = np.asarray(gains, float)
    taus = np.asarray(taus, float)
    bw = np.broadcast_to(np.asarray(bandwidth, float), gains.shape)
    n0 = np.broadcast_to(np.asarray(noise, float), gains.shape)
    if K == 1:
        p = min(p_max, energy / taus[0])
        return data / float(shannon(p, gains[0], bw[0], n0[0])), np.array([p])
    lat = [data / shannon(levels, gains[k], bw[k], n0[k]) for k in range(K - 1)]
    spent = [levels * taus[k] for k in range(K - 1)]
    total_lat = lat[0]
    total_spent = spent[0]
    for k in range(1, K - 1):
        total_lat = np.add.outer(total_lat, lat[k])
        total_spent = np.add.outer(total_spent, spent[k])
    last = np.minimum(p_max, (energy - total_spent) / taus[-1])
    with np.errstate(divide="ignore", invalid="ignore"):
        last_lat = np.where(last > 0, data / shannon(np.maximum(last, 0.0), gains[-1], bw[-1], n0[-1]), np.inf)
    value = total_lat + last_lat
    idx = np.unravel_index(int(np.argmin(value)), value.shape)
    powers = np.array([levels[i] for i in idx] + [last[idx]])
    return float(value[idx]), powers


def grid_process(proc: Process, step_frac: float = 1e-3) -> float:
    """Brute-force optimum: every route assignment times a power lattice per MTD."""
    comm = []
    for m, prof in enumerate(proc.mtds):
        table = {}
        for routes in itertools.product(*(range(proc.n_routes(m, k)) for k in range(proc.K))):
            opts = [proc.options[m][k][r] for k, r in enumerate(routes)]
            first = [o.hops[0] for o in opts]
            value, _ = grid_power(
                [h.gain for h in first], proc.durations, prof.data_size,
                [h.bandwidth for h in first], [h.noise_psd for h in first],
                prof.energy_budget, prof.p_max, step_frac,
            )
            table[routes] = value + sum(tail(o, prof.data_size) for o in opts)
        comm.append(table)
    best = math.inf
    for combo in itertools.product(*(list(t.items()) for t in comm)):
        total = sum(v for _, v in combo)
        for k in range(proc.K):
            load: dict[str, list[float]] = {}
            for m, (routes, _) in enumerate(combo):
                s = proc.options[m][k][routes[k]].server
                load.setdefault(s, []).append(proc.mtds[m].cycles)
            for s, cyc in load.items():
                total += len(cyc) * sum(cyc) / proc.capacities[s]
        best = min(best, total)
    return best


# --- placement -----------------------------------------------------------------


def brute_force_placement(demand, hardening, isl, budget):
    """Cheapest subset by explicit enumeration of combinations; ties go to the smallest tuple."""
    n = len(demand)
    best, best_subset = math.inf, None
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            hops = [min(min(abs(i - s), n - abs(i - s)) for s in subset) for i in range(n)]
            if max(hops) > budget:
                continue
            cost = hardening * size + isl * sum(d * h for d, h in zip(demand, hops))
            if cost < best or (cost == best and subset < best_subset):
                best, best_subset = cost, subset
    return best_subset, best


# --- bilinear interpolation ----------------------------------------------------


def bilinear(xs, ys, values, x, y):
    """Textbook bilinear formula on a rectilinear grid, clamped to the hull."""
    x = min(max(x, xs[0]), xs[-1])
    y = min(max(y, ys[0]), ys[-1])
    i = max(0, min(int(np.searchsorted(xs, x, side="right")) - 1, len(xs) - 2))
    j = max(0, min(int(np.searchsorted(ys, y, side="right")) - 1, len(ys) - 2))
    x1, x2, y1, y2 = xs[i], xs[i + 1], ys[j], ys[j + 1]
    q11, q21 = values[j, i], values[j, i + 1]
    q12, q22 = values[j + 1, i], values[j + 1, i + 1]
    return (
        q11 * (x2 - x) * (y2 - y) + q21 * (x - x1) * (y2 - y) + q12 * (x2 - x) * (y - y1) + q22 * (x - x1) * (y - y1)
    ) / ((x2 - x1) * (y2 - y1))
