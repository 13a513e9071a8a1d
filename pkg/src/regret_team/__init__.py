"""Regret-theoretic service requests, queue ordering and path planning for a human/multi-robot search team."""

from .regret import (
    Choice,
    DecisionModel,
    Prospect,
    RegretParams,
    decide,
    net_advantage_ev,
    net_advantage_regret,
    q_value,
    w_weight,
)

__all__ = [
    "Choice",
    "DecisionModel",
    "Prospect",
    "RegretParams",
    "decide",
    "net_advantage_ev",
    "net_advantage_regret",
    "q_value",
    "w_weight",
]
