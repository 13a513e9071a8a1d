"""Scenario files: versioned TOML, strict keys, line-anchored diagnostics."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import tomli
import tomli_w

from .engine import ConfigError, ScenarioConfig
from .regret import DecisionModel, RegretParams
from .sensing import SensorModel

FORMAT_VERSION = 1
SEARCH_PATH_ENV = "REGRET_TEAM_PATH"

# section -> key -> (accepted types, required)
_NUM = (int, float)
SCHEMA: dict[str, dict[str, tuple[tuple[type, ...], bool]]] = {
    "": {"version": ((int,), True), "name": ((str,), True)},
    "team": {
        "n_robots": ((int,), True),
        "rows": ((int,), True),
        "cols": ((int,), True),
        "services_per_step": ((int,), True),
    },
    "environment": {
        "prior_interval": ((list,), True),
        "total_objects": ((int,), True),
        "seed": ((int,), True),
    },
    "sensor": {
        "p_oa_given_sa": (_NUM, True),
        "p_op_given_sp": (_NUM, True),
        "overrides": ((list,), False),
    },
    "costs": {
        "c_wrong": (_NUM, True),
        "unit_cost": (_NUM, True),
        "c_range": (_NUM, False),
    },
    "decision": {"model": ((str,), True), "regret": ((dict,), True)},
    "decision.regret": {
        "alpha1": (_NUM, True),
        "alpha2": (_NUM, True),
        "alpha3": (_NUM, True),
        "beta1": (_NUM, True),
        "beta2": (_NUM, True),
    },
    "planner": {
        "horizon": ((int,), True),
        "beam_width": ((int, str), True),
        "kappa": (_NUM, True),
    },
    "run": {
        "step_limit_multiple": ((int,), True),
        "stop_when_all_found": ((bool,), True),
    },
}
_OVERRIDE_KEYS = {"robot": (int,), "p_oa_given_sa": _NUM, "p_op_given_sp": _NUM}


class ScenarioError(ValueError):
    def __init__(self, message: str, line: int = 1, source: str = "<scenario>"):
        super().__init__(f"{source}:{line}: {message}")
        self.message = message
        self.line = line
        self.source = source


class _Locator:
    """Maps (section, key) to the line where it is written."""

    _header = re.compile(r"^\s*\[\[?\s*([A-Za-z0-9_.\- ]+?)\s*\]\]?\s*(#.*)?$")
    _key = re.compile(r"^\s*([A-Za-z0-9_\-]+)\s*=")

    def __init__(self, text: str):
        self.headers: dict[str, int] = {}
        self.keys: dict[tuple[str, str], int] = {}
        section = ""
        for lineno, line in enumerate(text.splitlines(), start=1):
            m = self._header.match(line)
            if m:
                section = m.group(1).replace(" ", "")
                self.headers.setdefault(section, lineno)
                continue
            m = self._key.match(line)
            if m:
                self.keys.setdefault((section, m.group(1)), lineno)

    def line(self, section: str, key: Optional[str] = None) -> int:
        if key is not None and (section, key) in self.keys:
            return self.keys[(section, key)]
        return self.headers.get(section, 1)


def parse_scenario(text: str, source: str = "<scenario>") -> ScenarioConfig:
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ScenarioError(str(exc), int(m.group(1)) if m else 1, source) from exc
    loc = _Locator(text)

    def fail(message: str, section: str, key: Optional[str] = None):
        raise ScenarioError(message, loc.line(section, key), source)

    def table(section: str) -> dict:
        node: Any = doc
        for part in section.split(".") if section else []:
            node = node.get(part) if isinstance(node, dict) else None
            if node is None:
                fail(f"missing section [{section}]", "")
        if not isinstance(node, dict):
            fail(f"[{section}] must be a table", section)
        spec = SCHEMA[section]
        for key, value in node.items():
            if not section and key in SCHEMA:
                continue
            if key not in spec:
                where = f"[{section}]" if section else "top level"
                if isinstance(value, dict):
                    fail(f"unknown section '{key}' in {where}", f"{section}.{key}".lstrip("."))
                fail(f"unknown key '{key}' in {where}", section, key)
            types, _ = spec[key]
            if isinstance(value, bool) and bool not in types:
                fail(f"'{key}' has the wrong type", section, key)
            if not isinstance(value, types):
                fail(f"'{key}' must be {' or '.join(t.__name__ for t in types)}", section, key)
        for key, (_, required) in spec.items():
            if required and key not in node:
                fail(f"missing key '{key}'", section)
        return node

    top = table("")
    if top["version"] != FORMAT_VERSION:
        fail(f"unsupported version {top['version']} (expected {FORMAT_VERSION})", "", "version")

    team = table("team")
    env = table("environment")
    sensor = table("sensor")
    costs = table("costs")
    decision = table("decision")
    regret = table("decision.regret")
    planner = table("planner")
    run = table("run")

    interval = env["prior_interval"]
    if len(interval) != 2 or not all(
        isinstance(v, _NUM) and not isinstance(v, bool) for v in interval
    ):
        fail("prior_interval must be [lo, hi]", "environment", "prior_interval")

    overrides = []
    for item in sensor.get("overrides", []):
        if not isinstance(item, dict) or set(item) != set(_OVERRIDE_KEYS):
            fail(f"each sensor override needs exactly {sorted(_OVERRIDE_KEYS)}", "sensor", "overrides")
        for key, types in _OVERRIDE_KEYS.items():
            if isinstance(item[key], bool) or not isinstance(item[key], types):
                fail(f"override '{key}' has the wrong type", "sensor", "overrides")
        try:
            overrides.append(
                (item["robot"], SensorModel(float(item["p_oa_given_sa"]), float(item["p_op_given_sp"])))
            )
        except ValueError as exc:
            fail(str(exc), "sensor", "overrides")

    try:
        model = DecisionModel(decision["model"])
    except ValueError:
        fail(
            f"model must be one of {[m.value for m in DecisionModel]}", "decision", "model"
        )

    beam = planner["beam_width"]
    if isinstance(beam, str):
        if beam != "unbounded":
            fail("beam_width must be an integer or \"unbounded\"", "planner", "beam_width")
        beam = None

    def build(section, key, factory):
        try:
            return factory()
        except ValueError as exc:
            fail(str(exc), section, key)

    sensor_model = build(
        "sensor",
        None,
        lambda: SensorModel(float(sensor["p_oa_given_sa"]), float(sensor["p_op_given_sp"])),
    )
    regret_params = build(
        "decision.regret",
        None,
        lambda: RegretParams(**{k: float(regret[k]) for k in SCHEMA["decision.regret"]}),
    )
    try:
        return ScenarioConfig(
            name=top["name"],
            n_robots=team["n_robots"],
            rows=team["rows"],
            cols=team["cols"],
            services_per_step=team["services_per_step"],
            prior_interval=(float(interval[0]), float(interval[1])),
            total_objects=env["total_objects"],
            seed=env["seed"],
            sensor=sensor_model,
            sensor_overrides=tuple(overrides),
            c_wrong=float(costs["c_wrong"]),
            unit_cost=float(costs["unit_cost"]),
            c_range=float(costs["c_range"]) if "c_range" in costs else None,
            regret=regret_params,
            decision_model=model,
            horizon=planner["horizon"],
            beam_width=beam,
            kappa=float(planner["kappa"]),
            step_limit_multiple=run["step_limit_multiple"],
            stop_when_all_found=run["stop_when_all_found"],
        )
    except ConfigError as exc:
        fail(str(exc), "")


def dump_scenario(config: ScenarioConfig) -> str:
    """Canonical TOML form of ``config``."""
    sensor: dict[str, Any] = {
        "p_oa_given_sa": config.sensor.p_oa_given_sa,
        "p_op_given_sp": config.sensor.p_op_given_sp,
    }
    if config.sensor_overrides:
        sensor["overrides"] = [
            {"robot": rid, "p_oa_given_sa": s.p_oa_given_sa, "p_op_given_sp": s.p_op_given_sp}
            for rid, s in config.sensor_overrides
        ]
    costs: dict[str, Any] = {"c_wrong": config.c_wrong, "unit_cost": config.unit_cost}
    if config.c_range is not None:
        costs["c_range"] = config.c_range
    regret = config.regret
    doc = {
        "version": FORMAT_VERSION,
        "name": config.name,
        "team": {
            "n_robots": config.n_robots,
            "rows": config.rows,
            "cols": config.cols,
            "services_per_step": config.services_per_step,
        },
        "environment": {
            "prior_interval": list(config.prior_interval),
            "total_objects": config.total_objects,
            "seed": config.seed,
        },
        "sensor": sensor,
        "costs": costs,
        "decision": {
            "model": config.decision_model.value,
            "regret": {
                "alpha1": regret.alpha1,
                "alpha2": regret.alpha2,
                "alpha3": regret.alpha3,
                "beta1": regret.beta1,
                "beta2": regret.beta2,
            },
        },
        "planner": {
            "horizon": config.horizon,
            "beam_width": "unbounded" if config.beam_width is None else config.beam_width,
            "kappa": config.kappa,
        },
        "run": {
            "step_limit_multiple": config.step_limit_multiple,
            "stop_when_all_found": config.stop_when_all_found,
        },
    }
    return tomli_w.dumps(doc)


def load_scenario(path: str | os.PathLike) -> ScenarioConfig:
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), str(path))


def bundled_scenarios() -> list[str]:
    root = resources.files("regret_team") / "scenarios"
    return sorted(p.name[: -len(".toml")] for p in root.iterdir() if p.name.endswith(".toml"))


@dataclass(frozen=True)
class ResolvedScenario:
    source: str
    text: str


def resolve_scenario(ref: str) -> ResolvedScenario:
    """Find a scenario by path, then in ``$REGRET_TEAM_PATH``, then among bundled ones."""
    candidates = [Path(ref)]
    for root in filter(None, os.environ.get(SEARCH_PATH_ENV, "").split(os.pathsep)):
        candidates += [Path(root) / ref, Path(root) / f"{ref}.toml"]
    for cand in candidates:
        if cand.is_file():
            return ResolvedScenario(str(cand), cand.read_text(encoding="utf-8"))
    bundled = resources.files("regret_team") / "scenarios" / f"{ref}.toml"
    if bundled.is_file():
        return ResolvedScenario(f"<bundled:{ref}>", bundled.read_text(encoding="utf-8"))
    raise ScenarioError(f"scenario '{ref}' not found", 1, ref)
