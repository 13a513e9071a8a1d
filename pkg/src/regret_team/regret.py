"""Regret-theoretic decision mathematics.

A decision-maker compares two options column by column. Each column pairs the
two options' costs and carries a joint probability; the cost differences are
normalized by ``c_range``, passed through the regret function ``Q`` and
weighted by a Prelec probability weight.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class Choice(enum.Enum):
    PREFER_FIRST = "prefer_first"
    PREFER_SECOND = "prefer_second"
    INDIFFERENT = "indifferent"


class DecisionModel(enum.Enum):
    REGRET = "regret"
    EXPECTED_VALUE = "ev"


@dataclass(frozen=True)
class RegretParams:
    """Parameters of one decision-maker.

    ``alpha*`` shape the regret function, ``beta*`` the probability weight.
    ``c_range`` maps costs into roughly [-1, 0] before ``Q`` is applied.
    """

    alpha1: float = 1.0
    alpha2: float = 5.0
    alpha3: float = 1.0
    beta1: float = 0.35
    beta2: float = 0.5
    c_range: float = 1.0

    def __post_init__(self):
        # alpha1 == 0 is the linear degenerate case, used to recover expected value
        if self.alpha1 < 0:
            raise ValueError(f"alpha1 must be >= 0, got {self.alpha1}")
        for name in ("alpha2", "alpha3", "beta1", "beta2", "c_range"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value}")


@dataclass(frozen=True)
class Prospect:
    """Two-column cost vector; ``cost_a`` occurs with probability ``p``."""

    cost_a: float
    cost_b: float
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"column probability must lie in [0, 1], got {self.p}")

    @classmethod
    def certain(cls, cost: float, p: float) -> "Prospect":
        return cls(cost, cost, p)

    @classmethod
    def risky(cls, c_wrong: float, p: float) -> "Prospect":
        """Own-detection option: no cost when correct, ``c_wrong`` otherwise."""
        return cls(0.0, c_wrong, p)


def q_value(dc: float, params: RegretParams) -> float:
    """Regret intensity of a normalized cost difference."""
    if not math.isfinite(dc):
        raise ValueError(f"cost difference must be finite, got {dc}")
    return params.alpha1 * math.sinh(params.alpha2 * dc) + params.alpha3 * dc


def w_weight(p: float, params: RegretParams) -> float:
    """Prelec weight ``exp(-beta1 * (-log p) ** beta2)`` with ``w(0) = 0``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    if p == 0.0:
        return 0.0
    return math.exp(-params.beta1 * (-math.log(p)) ** params.beta2)


def net_advantage_regret(first: Prospect, second: Prospect, params: RegretParams) -> float:
    """Net advantage of ``first`` over the reference ``second``."""
    if first.p != second.p:
        raise ValueError(
            f"prospects must share column probabilities, got {first.p} and {second.p}"
        )
    w = w_weight(first.p, params)
    q_a = q_value((first.cost_a - second.cost_a) / params.c_range, params)
    q_b = q_value((first.cost_b - second.cost_b) / params.c_range, params)
    return w * q_a + (1.0 - w) * q_b


def net_advantage_ev(c_h: float, c_w: float, p_r: float) -> float:
    """Expected-value advantage of a certain cost ``c_h`` over own detection."""
    if not 0.0 <= p_r <= 1.0:
        raise ValueError(f"p_r must lie in [0, 1], got {p_r}")
    return c_h - (1.0 - p_r) * c_w


def decide(e: float) -> Choice:
    if e > 0:
        return Choice.PREFER_FIRST
    if e < 0:
        return Choice.PREFER_SECOND
    return Choice.INDIFFERENT


def service_advantage(
    cost: float,
    c_wrong: float,
    p_r: float,
    params: RegretParams | None,
    model: DecisionModel = DecisionModel.REGRET,
) -> float:
    """Advantage of certain human service at ``cost`` over trusting the robot."""
    if model is DecisionModel.EXPECTED_VALUE:
        return net_advantage_ev(cost, c_wrong, p_r)
    if params is None:
        raise ValueError("regret model requires RegretParams")
    return net_advantage_regret(
        Prospect.certain(cost, p_r), Prospect.risky(c_wrong, p_r), params
    )
