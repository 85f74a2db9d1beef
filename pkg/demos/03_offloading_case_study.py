"""Joint offloading and power allocation on the bundled case study.

Three MTDs share an energy budget across four segments while a UAV server
and a satellite-to-cloud route compete for their tasks.
"""

from satmec.cli import bundled_path
from satmec.optimizer import (
    build_process,
    evaluate_plan,
    optimize_process,
    plan_objective,
    satellite_only_baseline,
    state_oriented_baseline,
)
from satmec.scenario import load_scenario

sc = load_scenario(bundled_path("case_study.yaml"))
proc = build_process(sc.topology, sc.channel, sc.tasks, sc.durations)

plans = {
    "exact": optimize_process(proc, "exact")[0],
    "alternating": optimize_process(proc, "alternating")[0],
    "state-oriented": state_oriented_baseline(proc),
    "satellite-only": satellite_only_baseline(proc),
}

print(f"{'scheme':16s} {'predicted':>10s} {'realized':>10s}")
for name, plan in plans.items():
    pred = plan_objective(proc, plan).total
    real = evaluate_plan(plan, proc, sc.fading, 5000, seed=1).mean
    print(f"{name:16s} {pred:10.4f} {real:10.4f}")

best = plans["exact"]
print("\nexact plan, route and power per segment:")
for m, row in enumerate(best.labels(proc)):
    cells = "  ".join(f"{lab:>9s}@{p:.3f}W" for lab, p in zip(row, best.powers[m]))
    print(f"  {proc.mtds[m].id}: {cells}")
