"""Sensor model, correct-detection probability and per-cell belief."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class Observation(enum.Enum):
    PRESENT = "o_p"
    ABSENT = "o_a"


@dataclass(frozen=True)
class SensorModel:
    p_oa_given_sa: float
    p_op_given_sp: float

    def __post_init__(self):
        for name in ("p_oa_given_sa", "p_op_given_sp"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")

    @property
    def p_op_given_sa(self) -> float:
        return 1.0 - self.p_oa_given_sa

    @property
    def p_oa_given_sp(self) -> float:
        return 1.0 - self.p_op_given_sp


@dataclass(frozen=True)
class CellPrior:
    p_sp: float

    def __post_init__(self):
        if not 0.0 <= self.p_sp <= 1.0:
            raise ValueError(f"prior must lie in [0, 1], got {self.p_sp}")


@dataclass(frozen=True)
class DetectionBelief:
    """Probability that the declared label (the raw observation) is correct."""

    p_correct: float


def correct_detection_prob(prior: CellPrior, sensor: SensorModel) -> float:
    # affine form: exactly the sensor accuracy when the sensor is symmetric
    return sensor.p_oa_given_sa + (sensor.p_op_given_sp - sensor.p_oa_given_sa) * prior.p_sp


def correct_detection_probs(priors: np.ndarray, sensor: SensorModel) -> np.ndarray:
    """Vectorized ``correct_detection_prob`` over an array of priors."""
    priors = np.asarray(priors, dtype=float)
    return sensor.p_oa_given_sa + (sensor.p_op_given_sp - sensor.p_oa_given_sa) * priors


def observation_prob(prior: CellPrior, sensor: SensorModel, obs: Observation) -> float:
    p_op = sensor.p_op_given_sp * prior.p_sp + sensor.p_op_given_sa * (1.0 - prior.p_sp)
    return p_op if obs is Observation.PRESENT else 1.0 - p_op


def posterior_correctness(
    prior: CellPrior, sensor: SensorModel, obs: Observation
) -> DetectionBelief:
    """Bayes posterior that the state matches ``obs``."""
    if obs is Observation.PRESENT:
        hit = sensor.p_op_given_sp * prior.p_sp
        evidence = hit + sensor.p_op_given_sa * (1.0 - prior.p_sp)
    else:
        hit = sensor.p_oa_given_sa * (1.0 - prior.p_sp)
        evidence = hit + sensor.p_oa_given_sp * prior.p_sp
    if evidence <= 0.0:
        raise ValueError(f"observation {obs.value} has zero probability under this prior")
    return DetectionBelief(hit / evidence)


def expected_local_cost(prior: CellPrior, sensor: SensorModel, c_wrong: float) -> float:
    """Expected detection cost of a cell: correct costs nothing, wrong costs ``c_wrong``."""
    if c_wrong > 0:
        raise ValueError(f"c_wrong must be <= 0, got {c_wrong}")
    return (1.0 - correct_detection_prob(prior, sensor)) * c_wrong
