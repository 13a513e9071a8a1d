"""Ordering concurrent human-service requests into a waiting line.

Each requesting robot either receives a line position ``1..M`` or is rejected
(it keeps its own detection). The value of an assignment is the sum of every
robot's advantage at its option, measured against its own-detection option.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .regret import DecisionModel, RegretParams, service_advantage

MAX_EXACT_BATCH = 8


class BatchTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class ServiceRequest:
    """``submitted`` is the step the request was raised; it only breaks exact ties."""

    robot_id: int
    p_r: float
    c_wrong: float
    submitted: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_r <= 1.0:
            raise ValueError(f"p_r must lie in [0, 1], got {self.p_r}")
        if self.c_wrong > 0:
            raise ValueError(f"c_wrong must be <= 0, got {self.c_wrong}")


@dataclass(frozen=True)
class LineCostSchedule:
    """Cost of waiting at line position ``n``: ``unit_cost * n``."""

    unit_cost: float

    def __post_init__(self):
        if not self.unit_cost < 0:
            raise ValueError(f"unit_cost must be negative, got {self.unit_cost}")

    def cost_at(self, n: int) -> float:
        if n < 1:
            raise ValueError(f"line positions start at 1, got {n}")
        return self.unit_cost * n


@dataclass(frozen=True)
class QueueAssignment:
    """``line[i]`` holds position ``i + 1``; everyone in ``rejected`` keeps own detection."""

    line: tuple[int, ...]
    rejected: tuple[int, ...]

    def __post_init__(self):
        ids = list(self.line) + list(self.rejected)
        if len(set(ids)) != len(ids):
            raise ValueError(f"robot assigned twice: line={self.line} rejected={self.rejected}")

    @classmethod
    def from_positions(cls, positions: Mapping[int, int | None]) -> "QueueAssignment":
        """Build from ``robot_id -> position`` (``None`` for rejection)."""
        queued = {rid: n for rid, n in positions.items() if n is not None}
        taken = sorted(queued.values())
        if len(set(taken)) != len(taken):
            raise ValueError(f"position collision in {positions}")
        if taken != list(range(1, len(taken) + 1)):
            raise ValueError(f"positions must be contiguous from 1, got {taken}")
        line = tuple(sorted(queued, key=queued.__getitem__))
        rejected = tuple(sorted(rid for rid, n in positions.items() if n is None))
        return cls(line, rejected)

    @property
    def length(self) -> int:
        return len(self.line)

    @property
    def positions(self) -> dict[int, int | None]:
        out: dict[int, int | None] = {rid: i + 1 for i, rid in enumerate(self.line)}
        out.update({rid: None for rid in self.rejected})
        return out


def advantage_at(
    req: ServiceRequest,
    sched: LineCostSchedule,
    n: int | None,
    params: RegretParams | None,
    model: DecisionModel = DecisionModel.REGRET,
) -> float:
    """Advantage of ``req`` at line position ``n``; rejection (``None``) is worth 0."""
    if n is None:
        return 0.0
    return service_advantage(sched.cost_at(n), req.c_wrong, req.p_r, params, model)


def _by_id(reqs: Iterable[ServiceRequest]) -> list[ServiceRequest]:
    reqs = sorted(reqs, key=lambda r: r.robot_id)
    ids = [r.robot_id for r in reqs]
    if len(set(ids)) != len(ids):
        raise ValueError(f"duplicate robot ids in batch: {ids}")
    return reqs


def accumulated_advantage(
    assign: QueueAssignment,
    reqs: Iterable[ServiceRequest],
    sched: LineCostSchedule,
    params: RegretParams | None,
    model: DecisionModel = DecisionModel.REGRET,
) -> float:
    reqs = _by_id(reqs)
    positions = assign.positions
    if set(positions) != {r.robot_id for r in reqs}:
        raise ValueError(
            f"assignment covers {sorted(positions)}, batch has {[r.robot_id for r in reqs]}"
        )
    return math.fsum(advantage_at(r, sched, positions[r.robot_id], params, model) for r in reqs)


def delta_advantage(
    req: ServiceRequest,
    sched: LineCostSchedule,
    n: int,
    params: RegretParams | None,
    *,
    line_length: int,
    model: DecisionModel = DecisionModel.REGRET,
) -> float:
    """Change in advantage from moving ``req`` back from position ``n`` to ``n + 1``.

    Position ``line_length + 1`` does not exist in the line and stands for
    rejection, so at ``n == line_length`` the result is ``-advantage_at(n)``.
    """
    if not 1 <= n <= line_length:
        raise ValueError(f"position {n} outside line of length {line_length}")
    later = None if n == line_length else n + 1
    return advantage_at(req, sched, later, params, model) - advantage_at(
        req, sched, n, params, model
    )


def exact_optimal_queue(
    reqs: Iterable[ServiceRequest],
    sched: LineCostSchedule,
    params: RegretParams | None,
    model: DecisionModel = DecisionModel.REGRET,
    max_batch: int = MAX_EXACT_BATCH,
) -> QueueAssignment:
    """Enumerate every (subset, ordering) and return the best assignment.

    Ties go to the shorter line, then to the lexicographically smallest
    position vector (robots in id order, rejection encoded as ``M + 1``).
    """
    reqs = _by_id(reqs)
    n_req = len(reqs)
    if n_req > max_batch:
        raise BatchTooLargeError(
            f"batch of {n_req} exceeds exact limit {max_batch}; use heuristic_queue"
        )
    table = [
        [0.0] + [advantage_at(r, sched, n, params, model) for n in range(1, n_req + 1)]
        for r in reqs
    ]
    best_value = -math.inf
    best_key: tuple[int, tuple[int, ...]] | None = None
    best_order: tuple[int, ...] = ()
    for m in range(n_req + 1):
        for order in itertools.permutations(range(n_req), m):
            pos = [m + 1] * n_req
            for slot, idx in enumerate(order):
                pos[idx] = slot + 1
            value = math.fsum(table[i][p] if p <= m else 0.0 for i, p in enumerate(pos))
            key = (m, tuple(pos))
            if value > best_value or (value == best_value and key < best_key):
                best_value, best_key, best_order = value, key, order
    line = tuple(reqs[i].robot_id for i in best_order)
    rejected = tuple(r.robot_id for r in reqs if r.robot_id not in line)
    return QueueAssignment(line, rejected)


def heuristic_queue(
    reqs: Iterable[ServiceRequest],
    sched: LineCostSchedule,
    params: RegretParams | None,
    model: DecisionModel = DecisionModel.REGRET,
) -> QueueAssignment:
    """Backward greedy line formation.

    The line length ``M`` grows while more robots still prefer waiting at
    position ``M`` than there are positions. Robots that would not gain from
    position ``M`` are rejected; if more candidates remain than positions, the
    ones losing least by rejection are rejected too. Positions are then filled
    from the back: the robot whose advantage drops least by moving one place
    back is the least urgent and takes the rearmost free slot.
    """
    cands = _by_id(reqs)
    cache: dict[tuple[int, int | None], float] = {}

    def e(r: ServiceRequest, n: int | None) -> float:
        key = (r.robot_id, n)
        if key not in cache:
            cache[key] = advantage_at(r, sched, n, params, model)
        return cache[key]

    m = 0
    n_q = len(cands)
    while m < n_q:
        m += 1
        n_q = sum(1 for r in cands if e(r, m) > 0)
    # the loop stops one past the last fillable length when n_q < m
    if n_q < m:
        m -= 1

    rejected = [r for r in cands if m == 0 or e(r, m) <= 0]
    remaining = [r for r in cands if r not in rejected]

    # ties: the newest request takes the rear slot, then the lowest robot id
    def pick(pool: Sequence[ServiceRequest], delta) -> ServiceRequest:
        return min(pool, key=lambda r: (-delta(r), -r.submitted, r.robot_id))

    # surplus candidates occupy the virtual slots behind the line, valued as rejection
    while len(remaining) > m:
        r = pick(remaining, lambda r: -e(r, m))
        remaining.remove(r)
        rejected.append(r)

    line: list[int] = [0] * m
    for n in range(m, 0, -1):
        later = None if n == m else n + 1
        r = pick(remaining, lambda r, n=n, later=later: e(r, later) - e(r, n))
        remaining.remove(r)
        line[n - 1] = r.robot_id
    return QueueAssignment(tuple(line), tuple(sorted(r.robot_id for r in rejected)))
