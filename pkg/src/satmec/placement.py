"""MEC server placement on a ring constellation.

Putting a radiation-hardened server on a satellite costs ``hardening_cost``;
a satellite without one relays its demand over ISLs to the nearest server at
``isl_cost`` per hop and unit of demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

INFEASIBLE = math.inf


class InfeasiblePlacementError(ValueError):
    pass


@dataclass(frozen=True)
class PlacementProblem:
    demand: tuple[float, ...]  # served MTDs per satellite, ring order
    hardening_cost: float
    isl_cost: float
    hop_budget: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "demand", tuple(float(d) for d in self.demand))
        if len(self.demand) < 1:
            raise ValueError("need at least one satellite")
        if self.hardening_cost < 0 or self.isl_cost < 0:
            raise ValueError("costs must be nonnegative")
        if self.hop_budget < 0:
            raise ValueError("hop budget must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.demand)


def ring_hops(n: int) -> np.ndarray:
    i = np.arange(n)
    d = np.abs(i[:, None] - i[None, :])
    return np.minimum(d, n - d)


def placement_cost(problem: PlacementProblem, servers: Iterable[int]) -> float:
    """Hardening plus ISL relay cost; ``INFEASIBLE`` if a satellite is out of hop budget."""
    servers = sorted(set(servers))
    if not servers:
        return INFEASIBLE
    if servers[0] < 0 or servers[-1] >= problem.n:
        raise ValueError("server index outside the ring")
    hops = ring_hops(problem.n)[:, servers].min(axis=1)
    if hops.max() > problem.hop_budget:
        return INFEASIBLE
    return problem.hardening_cost * len(servers) + problem.isl_cost * float(np.dot(problem.demand, hops))


def _exhaustive(problem: PlacementProblem) -> tuple[int, ...]:
    n = problem.n
    if n > 20:
        raise ValueError("exhaustive placement is limited to 20 satellites")
    hops = ring_hops(n)
    demand = np.array(problem.demand)
    best_cost, best_subset = INFEASIBLE, None
    chunk = 1 << 14
    for start in range(1, 1 << n, chunk):
        masks = np.arange(start, min(start + chunk, 1 << n))
        member = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
        # nearest-server hops per satellite under each mask
        near = np.where(member[:, None, :], hops[None, :, :], n).min(axis=2)
        cost = problem.hardening_cost * member.sum(axis=1) + problem.isl_cost * (near @ demand)
        cost = np.where(near.max(axis=1) > problem.hop_budget, np.inf, cost)
        lo = cost.min()
        if not np.isfinite(lo) or lo > best_cost:
            continue
        for idx in np.flatnonzero(cost == lo):
            subset = tuple(int(i) for i in np.flatnonzero(member[idx]))
            if lo < best_cost or subset < best_subset:
                best_cost, best_subset = float(lo), subset
    if best_subset is None:
        raise InfeasiblePlacementError("no server subset meets the hop budget")
    return best_subset


def _greedy(problem: PlacementProblem) -> tuple[int, ...]:
    current = list(range(problem.n))
    cost = placement_cost(problem, current)
    if math.isinf(cost):
        raise InfeasiblePlacementError("no server subset meets the hop budget")
    while len(current) > 1:
        best_cost, best_drop = cost, None
        for s in current:
            c = placement_cost(problem, [x for x in current if x != s])
            if c < best_cost:
                best_cost, best_drop = c, s
        if best_drop is None:
            break
        current.remove(best_drop)
        cost = best_cost
    return tuple(current)


def optimize_placement(
    problem: PlacementProblem, method: Literal["exhaustive", "greedy"] = "exhaustive"
) -> tuple[int, ...]:
    """Choose which satellites carry a server.

    ``exhaustive`` scans every nonempty subset and returns the cheapest, ties
    going to the lexicographically smallest subset. ``greedy`` starts from
    all satellites and keeps removing the server whose removal lowers the
    cost most (lowest index on ties) until no removal helps.
    """
    if method == "exhaustive":
        return _exhaustive(problem)
    if method == "greedy":
        return _greedy(problem)
    raise ValueError(f"unknown placement method {method!r}")


PLACEMENT_CSV_HEADER = ("subset", "cost", "method")


def placement_rows(problem: PlacementProblem, methods: Sequence[str]) -> list[list[str]]:
    rows = []
    for m in methods:
        subset = optimize_placement(problem, m)  # type: ignore[arg-type]
        rows.append([" ".join(f"sat{i}" for i in subset), repr(placement_cost(problem, subset)), m])
    return rows

