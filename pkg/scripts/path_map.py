"""Single-robot planned path on a 20x20 region with a 50-step horizon, saved as SVG."""

import argparse
import json
from pathlib import Path

from regret_team.engine import build_scenario, run
from regret_team.render import path_svg
from regret_team.scenario import parse_scenario, resolve_scenario


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default="single_robot")
    parser.add_argument("--step", type=int, default=150, help="step at which to capture the plan")
    parser.add_argument("--out", type=Path, default=Path("runs/single_robot"))
    args = parser.parse_args()

    resolved = resolve_scenario(args.scenario)
    world = build_scenario(parse_scenario(resolved.text, resolved.source))
    run(world, dump_path=(0, args.step))
    if world.path_dump is None:
        raise SystemExit(f"robot 0 did not plan at step {args.step}")
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "path.json").write_text(json.dumps(world.path_dump, sort_keys=True) + "\n")
    (args.out / "path.svg").write_bytes(path_svg(world.path_dump))
    print(f"plan value {world.path_dump['value']:.2f}, wrote {args.out / 'path.svg'}")


if __name__ == "__main__":
    main()
