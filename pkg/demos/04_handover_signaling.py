#!/usr/bin/env python3
"""End-to-end handover simulation: signaling cost and key-sharing latency.

Runs the 16-cell reference scenario (20 UEs at 60 km/h on a torus) and
compares cumulative key-exchange signaling of ledger-based key sharing
against the per-handover baselines, then shows how prestaging keys from
predicted handovers hides the block-verification wait.
"""

import dataclasses

from ncsecsim import (
    PredictionConfig,
    RunConfig,
    cumulative_key_exchanges,
    run_simulation,
    write_run_artifacts,
)

config = dataclasses.replace(RunConfig(seed=1), horizon_ms=60_000)
result = run_simulation(config)

print(f"60 s, seed {config.seed}: {len(result.events)} handover triggers, "
      f"{len(result.blocks)} ledger blocks")

first_seen = set()
firsts = []
for proc in sorted(result.completed, key=lambda p: p.t_trigger):
    if proc.t_cell not in first_seen:
        first_seen.add(proc.t_cell)
        firsts.append(proc)
print(f"first handovers into the {len(firsts)} visited cells cost 3 key signals each;")
print(f"the other {len(result.completed) - len(firsts)} handovers cost 1.")

print("\ncumulative key-exchange signals (same trigger stream for all schemes):")
series = {label: dict(cumulative_key_exchanges(trace, 60_000))
          for label, trace in result.scheme_traces.items()}
print(f"{'t [s]':>6} {'blockchain':>11} {'macsig':>8} {'hmac':>6}")
for t in range(0, 60_001, 10_000):
    print(f"{t // 1000:>6} {series['blockchain'][t]:>11} "
          f"{series['macsig'][t]:>8} {series['hmac'][t]:>6}")

cross = next(t for t in range(0, 60_001, 1000)
             if series["blockchain"][t] < series["macsig"][t])
print(f"\nledger curve drops below the baselines at t = {cross / 1000:.0f} s "
      f"and then grows half as fast (1 signal per HO instead of 2).")

# --- key-sharing latency, with and without prediction --------------------
def first_ho_waits(res):
    seen, waits = set(), []
    for proc in sorted(res.completed, key=lambda p: p.t_trigger):
        if proc.t_cell not in seen:
            seen.add(proc.t_cell)
            waits.append(proc.prep_wait_ms)
    return waits

waits = first_ho_waits(result)
print(f"\nwithout prediction, first-HO key waits span "
      f"{min(waits)}..{max(waits)} ms (block verification, always < 1000 ms)")

predicted = run_simulation(dataclasses.replace(
    config, prediction=PredictionConfig(enabled=True, accuracy=0.8, lead_ms=1000)))
pw = first_ho_waits(predicted)
zero = sum(1 for w in pw if w == 0)
print(f"with 80%-accurate prediction (lead = one collection period), "
      f"{zero}/{len(pw)} first HOs wait 0 ms")

paths = write_run_artifacts(result, "out/demo_handover")
print("\nartifacts written:")
for name, path in sorted(paths.items()):
    print(f"  {name}: {path}")
