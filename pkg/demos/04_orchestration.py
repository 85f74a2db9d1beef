"""Switching servers on only when demand needs them.

Four periods of changing demand. The on-demand policy is compared with
keeping every server, ISL and UAV running.
"""

from satmec.cli import bundled_path
from satmec.orchestration import run_orchestration
from satmec.scenario import load_scenario

sc = load_scenario(bundled_path("demand_periods.yaml"))
tl = run_orchestration(sc.periods, sc.topology, sc.fleet, sc.channel)

for e, ref in zip(tl.entries, tl.reference):
    d = e.decision
    print(f"period {d.period} ({d.satisfaction:.0%} met): {', '.join(d.active_servers) or 'nothing'}"
          f"  {e.energy/1e3:8.1f} kJ  (always-on {ref.energy/1e3:.1f} kJ)")

saving = 1 - tl.energy / tl.reference_energy
print(f"\ntotal {tl.energy/1e6:.3f} MJ vs {tl.reference_energy/1e6:.3f} MJ, saving {saving:.1%}")
