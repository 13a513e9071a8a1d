"""Receding-horizon path planning over unvisited cells.

The value of a path is the sum over its steps of transition cost plus the
expected detection cost of the cell entered. Planning is a forward dynamic
program whose state is (set of cells used, last cell); partial paths sharing a
state are merged, keeping the better one. With a finite beam only the
``beam_width`` best states survive each depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

UNBOUNDED: Optional[int] = None


@dataclass(frozen=True)
class PlanState:
    current_cell: Optional[int]
    unvisited: frozenset
    horizon: int
    beam_width: Optional[int] = 64

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.beam_width is not None and self.beam_width < 1:
            raise ValueError(f"beam_width must be >= 1 or UNBOUNDED, got {self.beam_width}")
        if self.current_cell is not None and self.current_cell in self.unvisited:
            raise ValueError(f"current cell {self.current_cell} is marked unvisited")


@dataclass(frozen=True)
class CostField:
    """Expected local cost per cell and distance-proportional transition cost.

    ``local_cost`` is indexed by cell; ``coords`` holds cell-center positions.
    """

    local_cost: np.ndarray
    coords: np.ndarray
    kappa: float
    transition: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        local = np.asarray(self.local_cost, dtype=float)
        coords = np.asarray(self.coords, dtype=float)
        if coords.shape != (local.shape[0], 2):
            raise ValueError("coords must have shape (n_cells, 2)")
        diff = coords[:, None, :] - coords[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        object.__setattr__(self, "local_cost", local)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "transition", -self.kappa * dist)

    @classmethod
    def for_grid(cls, rows: int, cols: int, local_cost, kappa: float) -> "CostField":
        r, c = np.divmod(np.arange(rows * cols), cols)
        return cls(np.asarray(local_cost, dtype=float).ravel(), np.stack([r, c], axis=1), kappa)

    @property
    def n_cells(self) -> int:
        return self.local_cost.shape[0]

    def transition_cost(self, i: Optional[int], j: int) -> float:
        """Entering the region (``i is None``) is free."""
        if i is None:
            return 0.0
        return float(self.transition[i, j])

    def step_value(self, i: Optional[int], j: int) -> float:
        return self.transition_cost(i, j) + float(self.local_cost[j])


@dataclass(frozen=True)
class PlannedPath:
    cells: tuple[int, ...]
    value: float
    step_values: tuple[float, ...]

    @property
    def head(self) -> int:
        return self.cells[0]


def path_value(start: Optional[int], cells, field: CostField) -> float:
    """Left fold of step values along ``cells``."""
    value = 0.0
    prev = start
    for cell in cells:
        value = value + field.step_value(prev, cell)
        prev = cell
    return value


def plan(state: PlanState, field: CostField) -> PlannedPath:
    if not state.unvisited:
        raise ValueError("nothing left to plan: unvisited set is empty")
    n = field.n_cells
    depth = min(state.horizon, len(state.unvisited))

    allowed = np.zeros(n, dtype=bool)
    allowed[list(state.unvisited)] = True
    if state.current_cell is None:
        first_steps = field.local_cost.copy()
    else:
        first_steps = field.transition[state.current_cell] + field.local_cost

    # beam arrays, one row per surviving partial path
    acc = np.zeros(1)
    last = np.full(1, -1)
    used = np.zeros((1, n), dtype=bool)
    masks = [0]
    history: list[tuple[np.ndarray, np.ndarray]] = []

    for d in range(depth):
        if d == 0:
            steps = first_steps[None, :]
        else:
            steps = field.transition[last] + field.local_cost[None, :]
        cand = acc[:, None] + steps
        cand = np.where(used | ~allowed[None, :], -np.inf, cand)
        flat = cand.ravel()
        order = _ranked(flat, state.beam_width)

        parents, cells, values, new_masks = [], [], [], []
        seen: set[tuple[int, int]] = set()
        for idx in order:
            value = flat[idx]
            if value == -np.inf:
                break
            parent, cell = divmod(int(idx), n)
            key = (masks[parent] | (1 << cell), cell)
            if key in seen:
                continue
            seen.add(key)
            parents.append(parent)
            cells.append(cell)
            values.append(value)
            new_masks.append(key[0])
            if state.beam_width is not None and len(parents) == state.beam_width:
                break

        parents_arr = np.asarray(parents)
        cells_arr = np.asarray(cells)
        used = used[parents_arr]
        used[np.arange(len(cells)), cells_arr] = True
        acc = np.asarray(values, dtype=float)
        last = cells_arr
        masks = new_masks
        history.append((parents_arr, cells_arr))

    # survivors are ranked best-first, so row 0 is the plan
    path = []
    row = 0
    for parents_arr, cells_arr in reversed(history):
        path.append(int(cells_arr[row]))
        row = int(parents_arr[row])
    path.reverse()

    step_values = []
    prev = state.current_cell
    for cell in path:
        step_values.append(field.step_value(prev, cell))
        prev = cell
    return PlannedPath(tuple(path), float(acc[0]), tuple(step_values))


def _ranked(flat: np.ndarray, beam_width: Optional[int]):
    """Yield indices of ``flat`` best-first, ties broken by flat index.

    With a finite beam a shortlist is ranked first; the remainder is only
    sorted if merged duplicates exhaust the shortlist.
    """
    size = flat.shape[0]
    if beam_width is None or 4 * beam_width >= size:
        idx = np.arange(size)
        yield from idx[np.lexsort((idx, -flat))]
        return
    k = 4 * beam_width
    threshold = np.partition(flat, size - k)[size - k]
    inside = flat >= threshold
    shortlist = np.nonzero(inside)[0]
    yield from shortlist[np.lexsort((shortlist, -flat[shortlist]))]
    rest = np.nonzero(~inside)[0]
    yield from rest[np.lexsort((rest, -flat[rest]))]


def replan_after_step(state: PlanState, field: CostField, visited_cell: int) -> PlanState:
    if visited_cell not in state.unvisited:
        raise ValueError(f"cell {visited_cell} is not unvisited")
    return PlanState(
        current_cell=visited_cell,
        unvisited=state.unvisited - {visited_cell},
        horizon=state.horizon,
        beam_width=state.beam_width,
    )
