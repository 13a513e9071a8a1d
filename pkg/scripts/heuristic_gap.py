"""How far the backward greedy line falls short of the exhaustive optimum, by batch size."""

import argparse

import numpy as np

from regret_team.queueing import (
    LineCostSchedule,
    ServiceRequest,
    accumulated_advantage,
    exact_optimal_queue,
    heuristic_queue,
)
from regret_team.regret import DecisionModel, RegretParams


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--draws", type=int, default=500)
    parser.add_argument("--max-batch", type=int, default=7)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--model", choices=[m.value for m in DecisionModel], default="regret")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    model = DecisionModel(args.model)
    params = RegretParams(c_range=30.0) if model is DecisionModel.REGRET else None
    print(f"{'N':>3} {'draws':>6} {'suboptimal':>11} {'mean gap':>10} {'max gap':>10}")
    for size in range(1, args.max_batch + 1):
        gaps = []
        for _ in range(args.draws):
            sched = LineCostSchedule(-rng.uniform(0.5, 10.0))
            reqs = [ServiceRequest(i, rng.uniform(0.3, 1.0), -rng.uniform(1.0, 60.0)) for i in range(size)]
            h = accumulated_advantage(heuristic_queue(reqs, sched, params, model), reqs, sched, params, model)
            x = accumulated_advantage(exact_optimal_queue(reqs, sched, params, model), reqs, sched, params, model)
            if x > 0:
                gaps.append((x - h) / x)
        gaps = np.asarray(gaps) if gaps else np.zeros(1)
        print(f"{size:>3} {args.draws:>6} {np.count_nonzero(gaps > 0):>11} {gaps.mean():>10.4%} {gaps.max():>10.4%}")


if __name__ == "__main__":
    main()
