"""Discrete-time simulation of one operator serving a team of searching robots.

Each step, in order:

1. every free robot moves one planned cell and observes it;
2. a robot whose advantage for human service at line position 1 is positive
   raises a request, otherwise it declares its own observation;
3. the agent re-forms the line over all pending requests; rejected robots
   declare their own observation and move on;
4. the operator serves the head of the line; served cells get the true label.

Environment randomness (priors, object placement, observations) is drawn once
per seed so runs under different decision models see the same world.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .planner import CostField, PlanState, plan
from .queueing import LineCostSchedule, ServiceRequest, heuristic_queue
from .regret import DecisionModel, RegretParams, service_advantage
from .sensing import SensorModel, correct_detection_probs

LOG_VERSION = 1


class ConfigError(ValueError):
    pass


class StepLimitExceeded(RuntimeError):
    def __init__(self, message: str, metrics: "RunMetrics"):
        super().__init__(message)
        self.metrics = metrics


class Phase(enum.Enum):
    MOVING = "moving"
    WAITING = "waiting"
    DONE = "done"


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "scenario"
    n_robots: int = 10
    rows: int = 10
    cols: int = 10
    prior_interval: tuple[float, float] = (0.0, 0.2)
    total_objects: int = 100
    sensor: SensorModel = SensorModel(0.7, 0.7)
    sensor_overrides: tuple[tuple[int, SensorModel], ...] = ()
    c_wrong: float = -30.0
    unit_cost: float = -1.5
    c_range: Optional[float] = None
    services_per_step: int = 3
    regret: RegretParams = RegretParams()
    decision_model: DecisionModel = DecisionModel.REGRET
    horizon: int = 10
    beam_width: Optional[int] = 64
    kappa: float = 2.0
    seed: int = 0
    step_limit_multiple: int = 4
    stop_when_all_found: bool = True

    def __post_init__(self):
        problems = []
        if self.n_robots < 1:
            problems.append("n_robots must be >= 1")
        if self.rows < 1 or self.cols < 1:
            problems.append("region dimensions must be >= 1")
        lo, hi = self.prior_interval
        if not 0.0 <= lo <= hi <= 1.0:
            problems.append(f"prior_interval must satisfy 0 <= lo <= hi <= 1, got {self.prior_interval}")
        if not 0 <= self.total_objects <= self.n_cells:
            problems.append(f"total_objects must lie in [0, {self.n_cells}]")
        if self.c_wrong > 0:
            problems.append("c_wrong must be <= 0")
        if self.unit_cost >= 0:
            problems.append("unit_cost must be negative")
        if self.c_range is not None and self.c_range <= 0:
            problems.append("c_range must be positive")
        if self.services_per_step < 1:
            problems.append("services_per_step must be >= 1")
        if self.horizon < 1:
            problems.append("horizon must be >= 1")
        if self.beam_width is not None and self.beam_width < 1:
            problems.append("beam_width must be >= 1")
        if self.kappa < 0:
            problems.append("kappa must be >= 0")
        if self.step_limit_multiple < 1:
            problems.append("step_limit_multiple must be >= 1")
        for rid, _ in self.sensor_overrides:
            if not 0 <= rid < self.n_robots:
                problems.append(f"sensor override for unknown robot {rid}")
        if problems:
            raise ConfigError("; ".join(problems))

    @property
    def cells_per_region(self) -> int:
        return self.rows * self.cols

    @property
    def n_cells(self) -> int:
        return self.n_robots * self.cells_per_region

    @property
    def max_steps(self) -> int:
        return self.step_limit_multiple * self.n_cells

    def sensor_for(self, robot_id: int) -> SensorModel:
        return dict(self.sensor_overrides).get(robot_id, self.sensor)

    def effective_c_range(self) -> float:
        """Largest cost magnitude the scenario can produce: wrong detection or the last line slot."""
        if self.c_range is not None:
            return self.c_range
        return max(abs(self.c_wrong), abs(self.unit_cost * self.n_robots))

    def regret_params(self) -> RegretParams:
        return replace(self.regret, c_range=self.effective_c_range())


@dataclass(frozen=True)
class Environment:
    """Frozen random draws; indexed ``[robot, cell]``."""

    priors: np.ndarray
    truth: np.ndarray
    obs_present: np.ndarray

    def hashes(self) -> dict[str, str]:
        return {
            name: hashlib.sha256(np.ascontiguousarray(getattr(self, name)).tobytes()).hexdigest()
            for name in ("priors", "truth", "obs_present")
        }


@dataclass(frozen=True)
class RunMetrics:
    average_queue_length: float
    pct_objects_found: float
    n_human_services: int
    task_duration_steps: int

    def as_dict(self) -> dict:
        return {
            "average_queue_length": self.average_queue_length,
            "pct_objects_found": self.pct_objects_found,
            "n_human_services": self.n_human_services,
            "task_duration_steps": self.task_duration_steps,
        }


@dataclass
class RobotState:
    robot_id: int
    unvisited: set
    current: Optional[int] = None
    phase: Phase = Phase.MOVING
    position: Optional[int] = None
    requested_at: Optional[int] = None
    labels: dict = field(default_factory=dict)


@dataclass
class World:
    config: ScenarioConfig
    env: Environment
    params: RegretParams
    schedule: LineCostSchedule
    p_r: np.ndarray
    fields: list
    robots: list
    step_index: int = 0
    found: int = 0
    finished: bool = False
    events: list = field(default_factory=list)
    dump_request: Optional[tuple[int, int]] = None
    path_dump: Optional[dict] = None


def draw_environment(config: ScenarioConfig) -> Environment:
    """Sample priors, object placement and every robot's observations."""
    prior_seq, object_seq, obs_seq = np.random.SeedSequence(config.seed).spawn(3)
    shape = (config.n_robots, config.cells_per_region)

    lo, hi = config.prior_interval
    priors = np.random.default_rng(prior_seq).uniform(lo, hi, size=shape)

    weights = priors.ravel()
    truth = np.zeros(weights.shape[0], dtype=bool)
    if config.total_objects:
        if np.count_nonzero(weights) < config.total_objects:
            raise ConfigError(
                f"cannot place {config.total_objects} objects: only "
                f"{np.count_nonzero(weights)} cells have a positive prior"
            )
        chosen = np.random.default_rng(object_seq).choice(
            weights.shape[0], size=config.total_objects, replace=False, p=weights / weights.sum()
        )
        truth[chosen] = True
    truth = truth.reshape(shape)

    u = np.random.default_rng(obs_seq).uniform(size=shape)
    obs_present = np.empty(shape, dtype=bool)
    for rid in range(config.n_robots):
        sensor = config.sensor_for(rid)
        p_op = np.where(truth[rid], sensor.p_op_given_sp, sensor.p_op_given_sa)
        obs_present[rid] = u[rid] < p_op
    return Environment(priors, truth, obs_present)


def build_scenario(config: ScenarioConfig) -> World:
    env = draw_environment(config)
    p_r = np.empty_like(env.priors)
    fields = []
    for rid in range(config.n_robots):
        p_r[rid] = correct_detection_probs(env.priors[rid], config.sensor_for(rid))
        local = (1.0 - p_r[rid]) * config.c_wrong
        fields.append(CostField.for_grid(config.rows, config.cols, local, config.kappa))
    robots = [
        RobotState(rid, set(range(config.cells_per_region))) for rid in range(config.n_robots)
    ]
    world = World(
        config=config,
        env=env,
        params=config.regret_params(),
        schedule=LineCostSchedule(config.unit_cost),
        p_r=p_r,
        fields=fields,
        robots=robots,
    )
    world.events.append(
        {
            "type": "header",
            "version": LOG_VERSION,
            "scenario": config.name,
            "model": config.decision_model.value,
            "seed": config.seed,
            "n_robots": config.n_robots,
            "rows": config.rows,
            "cols": config.cols,
            "total_objects": config.total_objects,
            "env_hash": env.hashes(),
        }
    )
    return world


def _declare(world: World, robot: RobotState, cell: int, by: str, out: list) -> None:
    truth = bool(world.env.truth[robot.robot_id, cell])
    label = truth if by == "human" else bool(world.env.obs_present[robot.robot_id, cell])
    robot.labels[cell] = label
    if truth and label:
        world.found += 1
    out.append(
        {"robot": robot.robot_id, "cell": cell, "label": label, "truth": truth, "by": by}
    )


def _release(robot: RobotState) -> None:
    robot.position = None
    robot.requested_at = None
    robot.phase = Phase.MOVING if robot.unvisited else Phase.DONE


def _move(world: World, robot: RobotState) -> int:
    cfg = world.config
    state = PlanState(robot.current, frozenset(robot.unvisited), cfg.horizon, cfg.beam_width)
    planned = plan(state, world.fields[robot.robot_id])
    if world.dump_request == (robot.robot_id, world.step_index):
        world.path_dump = path_dump(world, robot, planned)
    cell = planned.head
    robot.unvisited.discard(cell)
    robot.current = cell
    return cell


def step(world: World) -> World:
    if world.finished:
        raise RuntimeError("simulation already finished")
    cfg = world.config
    world.step_index += 1
    declarations: list = []
    requests: list[int] = []
    cost_first = world.schedule.cost_at(1)

    for robot in world.robots:
        if robot.phase is not Phase.MOVING:
            continue
        cell = _move(world, robot)
        p_r = float(world.p_r[robot.robot_id, cell])
        e = service_advantage(cost_first, cfg.c_wrong, p_r, world.params, cfg.decision_model)
        if e > 0:
            robot.phase = Phase.WAITING
            robot.requested_at = world.step_index
            requests.append(robot.robot_id)
        else:
            _declare(world, robot, cell, "robot", declarations)
            _release(robot)

    waiting = [r for r in world.robots if r.phase is Phase.WAITING]
    reqs = [
        ServiceRequest(
            r.robot_id, float(world.p_r[r.robot_id, r.current]), cfg.c_wrong, r.requested_at
        )
        for r in waiting
    ]
    assign = heuristic_queue(reqs, world.schedule, world.params, cfg.decision_model)

    for rid in assign.rejected:
        robot = world.robots[rid]
        _declare(world, robot, robot.current, "robot", declarations)
        _release(robot)

    served = list(assign.line[: cfg.services_per_step])
    for rid in served:
        robot = world.robots[rid]
        _declare(world, robot, robot.current, "human", declarations)
        _release(robot)
    for pos, rid in enumerate(assign.line[cfg.services_per_step :], start=1):
        world.robots[rid].position = pos

    world.events.append(
        {
            "type": "step",
            "step": world.step_index,
            "requests": requests,
            "queue": list(assign.line),
            "rejected": list(assign.rejected),
            "served": served,
            "declarations": declarations,
            "phases": {
                str(r.robot_id): r.phase.value
                + (f":{r.position}" if r.phase is Phase.WAITING else "")
                for r in world.robots
            },
        }
    )

    all_found = cfg.total_objects > 0 and world.found == cfg.total_objects
    if (cfg.stop_when_all_found and all_found) or all(
        r.phase is Phase.DONE for r in world.robots
    ):
        world.finished = True
    return world


def metrics_from_events(events) -> RunMetrics:
    """Recompute run metrics from an event stream (header + step records)."""
    header = next((e for e in events if e.get("type") == "header"), None)
    if header is None:
        raise ValueError("event log has no header record")
    steps = [e for e in events if e.get("type") == "step"]
    if not steps:
        raise ValueError("event log has no step records")
    found = services = 0
    for rec in steps:
        for d in rec["declarations"]:
            services += d["by"] == "human"
            found += d["truth"] and d["label"]
    total = header["total_objects"]
    return RunMetrics(
        average_queue_length=math.fsum(len(s["queue"]) for s in steps) / len(steps),
        pct_objects_found=100.0 * found / total if total else 100.0,
        n_human_services=services,
        task_duration_steps=len(steps),
    )


def run(world: World, dump_path: Optional[tuple[int, int]] = None) -> RunMetrics:
    """Step until done; ``dump_path=(robot, step)`` captures that robot's plan at that step."""
    world.dump_request = dump_path
    limit = world.config.max_steps
    while not world.finished:
        if world.step_index >= limit:
            metrics = metrics_from_events(world.events) if world.step_index else None
            raise StepLimitExceeded(f"no completion after {limit} steps", metrics)
        step(world)
    metrics = metrics_from_events(world.events)
    world.events.append({"type": "summary", **metrics.as_dict()})
    return metrics


def simulate(config: ScenarioConfig) -> tuple[RunMetrics, World]:
    world = build_scenario(config)
    return run(world), world


def events_to_jsonl(events) -> str:
    return "".join(json.dumps(e, sort_keys=True, separators=(",", ":")) + "\n" for e in events)


def path_dump(world: World, robot: RobotState, planned) -> dict:
    """Everything needed to draw one robot's region and plan."""
    cfg = world.config
    rid = robot.robot_id
    visited = sorted(set(range(cfg.cells_per_region)) - robot.unvisited)
    return {
        "type": "path",
        "robot": rid,
        "step": world.step_index,
        "rows": cfg.rows,
        "cols": cfg.cols,
        "horizon": cfg.horizon,
        "local_cost": [float(v) for v in world.fields[rid].local_cost],
        "visited": visited,
        "current": robot.current,
        "path": list(planned.cells),
        "step_values": list(planned.step_values),
        "value": planned.value,
        "objects": [int(c) for c in np.nonzero(world.env.truth[rid])[0]],
    }
