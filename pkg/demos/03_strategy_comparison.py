"""Compare verification strategies on one synthetic workload.

Runs cvar / base / unct / actl sessions with an oracle labeler at a 10%
budget and prints pickup (machine errors found) and resulting F1 side by side.
Takes about half a minute.
"""

from riskloop.fixtures import build_scenario
from riskloop.orchestrator import SessionConfig, run_session

scenario = build_scenario(seed=1)
n = len(scenario.workload.pairs)
budget = n // 10
print(f"workload: {n} pairs, budget {budget} (10%)\n")
print(f"{'strategy':>8} {'pickup':>8} {'precision':>10} {'recall':>8} {'f1':>8}")

for strategy in ("cvar", "base", "unct", "actl"):
    config = SessionConfig(strategy=strategy, budget=budget, seed=1)
    session, report = run_session(
        scenario.workload, scenario.classifier, scenario.gold, config,
        features=scenario.features,
        train_indices=scenario.train_indices, train_labels=scenario.train_labels)
    _, p, r, f1 = report.quality_curve[-1]
    print(f"{strategy:>8} {session.pickup:>8} {p:>10.3f} {r:>8.3f} {f1:>8.3f}")

print("\ncvar typically finds ~2x the machine errors of the expectation/")
print("uncertainty baselines at the same budget, because contradicting token")
print("evidence from earlier labels redirects the queue toward clustered errors.")
