"""Run both decision models on the cheap-service and dear-service scenarios over several seeds.

    python scripts/reproduce_tables.py --seeds 0 1 2 3 4 --out runs/tables
"""

import argparse
import csv
from dataclasses import replace
from pathlib import Path

import numpy as np

from regret_team.cli import METRIC_ROWS, MODEL_TITLES, comparison_table
from regret_team.engine import simulate
from regret_team.regret import DecisionModel
from regret_team.scenario import parse_scenario, resolve_scenario


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--scenarios", nargs="+", default=["condition1", "condition2"])
    parser.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3, 4])
    parser.add_argument("--out", type=Path, default=Path("runs/tables"))
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    rows = []
    for ref in args.scenarios:
        resolved = resolve_scenario(ref)
        base = parse_scenario(resolved.text, resolved.source)
        per_model = {m: [] for m in DecisionModel}
        for seed in args.seeds:
            results = {}
            for model in DecisionModel:
                metrics, _ = simulate(replace(base, seed=seed, decision_model=model))
                results[model] = metrics
                per_model[model].append(metrics)
                rows.append({"scenario": base.name, "seed": seed, "model": model.value, **metrics.as_dict()})
            print(f"{base.name} seed {seed}")
            print(comparison_table(results)[0])

        print(f"{base.name}: mean over seeds {args.seeds}")
        print(" " * 30 + "".join(f"{MODEL_TITLES[m]:>18}" for m in DecisionModel))
        for key, label, _ in METRIC_ROWS:
            cells = "".join(
                f"{np.mean([getattr(m, key) for m in per_model[model]]):>18.2f}" for model in DecisionModel
            )
            print(f"{label:<30}{cells}")
        print()

    with open(args.out / "tables.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {args.out / 'tables.csv'}")


if __name__ == "__main__":
    main()
