"""Command-line front end.

Exit codes: 0 success, 2 malformed input (scenario, log, dump), 3 step-limit
safeguard tripped.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from .engine import (
    RunMetrics,
    StepLimitExceeded,
    build_scenario,
    events_to_jsonl,
    metrics_from_events,
    run,
)
from .regret import DecisionModel
from .render import path_svg, queue_timeline_svg
from .scenario import (
    SEARCH_PATH_ENV,
    ScenarioError,
    bundled_scenarios,
    dump_scenario,
    parse_scenario,
    resolve_scenario,
)

EXIT_OK, EXIT_INPUT, EXIT_LIMIT = 0, 2, 3

METRIC_ROWS = (
    ("average_queue_length", "Average queue length:", "{:.2f}"),
    ("pct_objects_found", "Percentage of objects found:", "{:.1f}%"),
    ("n_human_services", "Number of human services:", "{:d}"),
    ("task_duration_steps", "Task duration (steps):", "{:d}"),
)
MODEL_TITLES = {DecisionModel.REGRET: "Regret Theory", DecisionModel.EXPECTED_VALUE: "Expected Value"}


@dataclass(frozen=True)
class RunManifest:
    scenario: str
    models: tuple[DecisionModel, ...]
    out_dir: Path
    seed: Optional[int] = None
    render: bool = False
    dump_path: Optional[tuple[int, int]] = None
    extra: dict = field(default_factory=dict)


def write_atomic(path: Path, data: bytes | str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_events(path: Path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: {exc.msg}") from exc
    return records


def comparison_table(results: dict[DecisionModel, RunMetrics]) -> tuple[str, str]:
    """Human-readable table (rows: metrics, columns: models) and its CSV twin."""
    models = list(results)
    width = max(len(label) for _, label, _ in METRIC_ROWS) + 2
    lines = [" " * width + "".join(f"{MODEL_TITLES[m]:>18}" for m in models)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["metric"] + [m.value for m in models])
    for key, label, fmt in METRIC_ROWS:
        values = [getattr(results[m], key) for m in models]
        lines.append(f"{label:<{width}}" + "".join(f"{fmt.format(v):>18}" for v in values))
        writer.writerow([key] + [repr(v) if isinstance(v, float) else v for v in values])
    return "\n".join(lines) + "\n", buf.getvalue()


def _load(ref: str):
    resolved = resolve_scenario(ref)
    return parse_scenario(resolved.text, resolved.source)


def cmd_run(manifest: RunManifest) -> int:
    config = _load(manifest.scenario)
    if manifest.seed is not None:
        config = replace(config, seed=manifest.seed)
    out = manifest.out_dir
    write_atomic(out / "scenario.toml", dump_scenario(config))

    results: dict[DecisionModel, RunMetrics] = {}
    status = EXIT_OK
    for model in manifest.models:
        world = build_scenario(replace(config, decision_model=model))
        model_dir = out / model.value
        try:
            run(world, dump_path=manifest.dump_path)
        except StepLimitExceeded as exc:
            print(f"error: {model.value}: {exc}", file=sys.stderr)
            status = EXIT_LIMIT
        log_path = model_dir / "events.jsonl"
        write_atomic(log_path, events_to_jsonl(world.events))
        if status == EXIT_LIMIT:
            break
        # reported figures come from the log on disk, not from the in-memory world
        metrics = metrics_from_events(read_events(log_path))
        results[model] = metrics
        write_atomic(
            model_dir / "metrics.json", json.dumps(metrics.as_dict(), sort_keys=True, indent=2) + "\n"
        )
        if world.path_dump is not None:
            write_atomic(model_dir / "path.json", json.dumps(world.path_dump, sort_keys=True) + "\n")
        if manifest.render:
            write_atomic(model_dir / "queue.svg", queue_timeline_svg(world.events))
            if world.path_dump is not None:
                write_atomic(model_dir / "path.svg", path_svg(world.path_dump))

    if results:
        text, table_csv = comparison_table(results)
        write_atomic(out / "comparison.txt", text)
        write_atomic(out / "comparison.csv", table_csv)
        print(f"{config.name} (seed {config.seed})")
        print(text, end="")
    return status


def cmd_render(src: Path, dest: Optional[Path]) -> int:
    try:
        records = read_events(src)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if not records:
        print(f"error: {src}: empty input", file=sys.stderr)
        return EXIT_INPUT
    try:
        if records[0].get("type") == "path":
            svg = path_svg(records[0])
        else:
            svg = queue_timeline_svg(records)
    except (ValueError, KeyError) as exc:
        print(f"error: {src}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    dest = dest or src.with_suffix(".svg")
    write_atomic(dest, svg)
    print(dest)
    return EXIT_OK


def _sweep_one(text: str, source: str, seed: int, model: str) -> dict:
    config = replace(parse_scenario(text, source), seed=seed, decision_model=DecisionModel(model))
    world = build_scenario(config)
    try:
        metrics = run(world)
        status = "ok"
    except StepLimitExceeded as exc:
        metrics, status = exc.metrics, "step_limit"
    row = {"scenario": config.name, "seed": seed, "model": model, "status": status}
    row.update(metrics.as_dict() if metrics else {})
    return row


def cmd_sweep(ref: str, seeds: Sequence[int], models: Sequence[DecisionModel], out: Path, workers: int) -> int:
    resolved = resolve_scenario(ref)
    parse_scenario(resolved.text, resolved.source)
    jobs = [(resolved.text, resolved.source, s, m.value) for s in seeds for m in models]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_one, *zip(*jobs)))
    else:
        rows = [_sweep_one(*job) for job in jobs]
    buf = io.StringIO()
    fields = ["scenario", "seed", "model", "status"] + [k for k, _, _ in METRIC_ROWS]
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    write_atomic(out / "sweep.csv", buf.getvalue())
    print(buf.getvalue(), end="")
    return EXIT_LIMIT if any(r["status"] != "ok" for r in rows) else EXIT_OK


def cmd_validate(refs: Sequence[str]) -> int:
    status = EXIT_OK
    for ref in refs:
        try:
            config = _load(ref)
        except ScenarioError as exc:
            print(f"error: {exc}", file=sys.stderr)
            status = EXIT_INPUT
        else:
            print(f"ok: {ref} ({config.name})")
    return status


def _models(value: str) -> tuple[DecisionModel, ...]:
    if value == "both":
        return (DecisionModel.REGRET, DecisionModel.EXPECTED_VALUE)
    return (DecisionModel(value),)


def _dump_spec(value: str) -> tuple[int, int]:
    try:
        robot, step = value.split(":")
        return int(robot), int(step)
    except ValueError:
        raise argparse.ArgumentTypeError("expected ROBOT:STEP, e.g. 0:60")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regret-team",
        description="Human/multi-robot search with regret-theoretic service requests.",
        epilog=f"Scenarios are looked up as paths, then in ${SEARCH_PATH_ENV}, then among "
        f"bundled ones: {', '.join(bundled_scenarios())}.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    model_choices = ["regret", "ev", "both"]

    p = sub.add_parser("run", help="simulate a scenario and write metrics, logs and tables")
    p.add_argument("scenario")
    p.add_argument("--model", default="both", choices=model_choices)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path, default=Path("runs"))
    p.add_argument("--render", action="store_true", help="also write SVG renders")
    p.add_argument("--dump-path", type=_dump_spec, metavar="ROBOT:STEP",
                   help="save that robot's plan at that step as path.json")

    p = sub.add_parser("render", help="render an event log or path dump to SVG")
    p.add_argument("input", type=Path)
    p.add_argument("-o", "--out", type=Path)

    p = sub.add_parser("sweep", help="run many seeds and models, write sweep.csv")
    p.add_argument("scenario")
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3, 4])
    p.add_argument("--model", default="both", choices=model_choices)
    p.add_argument("--out", type=Path, default=Path("runs"))
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("validate", help="check scenario files")
    p.add_argument("scenarios", nargs="+")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            manifest = RunManifest(
                scenario=args.scenario,
                models=_models(args.model),
                out_dir=args.out,
                seed=args.seed,
                render=args.render,
                dump_path=args.dump_path,
            )
            return cmd_run(manifest)
        if args.command == "render":
            return cmd_render(args.input, args.out)
        if args.command == "sweep":
            return cmd_sweep(args.scenario, args.seeds, _models(args.model), args.out, args.workers)
        return cmd_validate(args.scenarios)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
