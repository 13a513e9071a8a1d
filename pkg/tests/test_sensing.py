import numpy as np
import pytest
from hypothesis import given, strategies as st

from regret_team.sensing import (
    CellPrior,
    Observation,
    SensorModel,
    correct_detection_prob,
    correct_detection_probs,
    expected_local_cost,
    observation_prob,
    posterior_correctness,
)

prob = st.floats(min_value=0.0, max_value=1.0)


def test_examples():
    assert correct_detection_prob(CellPrior(0.2), SensorModel(0.7, 0.9)) == pytest.approx(0.74, abs=1e-12)
    post = posterior_correctness(CellPrior(0.2), SensorModel(0.7, 0.7), Observation.PRESENT)
    # 0.14 / (0.14 + 0.24)
    assert post.p_correct == pytest.approx(7 / 19, abs=1e-12)


def test_symmetric_sensor_is_exact():
    sensor = SensorModel(0.7, 0.7)
    for p in np.linspace(0, 0.2, 41):
        assert correct_detection_prob(CellPrior(float(p)), sensor) == 0.7


@given(prob, prob, prob)
def test_total_probability(p_sp, a, b):
    prior, sensor = CellPrior(p_sp), SensorModel(a, b)
    total = observation_prob(prior, sensor, Observation.PRESENT) + observation_prob(
        prior, sensor, Observation.ABSENT
    )
    assert total == pytest.approx(1.0, abs=1e-12)


@given(prob, prob, prob)
def test_p_r_is_mixture_of_accuracies(p_sp, a, b):
    p_r = correct_detection_prob(CellPrior(p_sp), SensorModel(a, b))
    direct = a * (1 - p_sp) + b * p_sp
    assert p_r == pytest.approx(direct, abs=1e-12)
    assert min(a, b) - 1e-12 <= p_r <= max(a, b) + 1e-12


@given(prob, prob, prob)
def test_p_r_is_expected_posterior(p_sp, a, b):
    prior, sensor = CellPrior(p_sp), SensorModel(a, b)
    total = 0.0
    for obs in Observation:
        weight = observation_prob(prior, sensor, obs)
        if weight > 0:
            total += weight * posterior_correctness(prior, sensor, obs).p_correct
    assert total == pytest.approx(correct_detection_prob(prior, sensor), abs=1e-9)


def test_zero_evidence_raises():
    with pytest.raises(ValueError):
        posterior_correctness(CellPrior(0.0), SensorModel(1.0, 0.5), Observation.PRESENT)


def test_vectorized_matches_scalar():
    sensor = SensorModel(0.6, 0.85)
    priors = np.linspace(0, 1, 17)
    expected = [correct_detection_prob(CellPrior(float(p)), sensor) for p in priors]
    np.testing.assert_allclose(correct_detection_probs(priors, sensor), expected, atol=1e-15)


def test_monte_carlo_agreement():
    rng = np.random.default_rng(7)
    prior, sensor = CellPrior(0.15), SensorModel(0.65, 0.8)
    n = 200_000
    present = rng.random(n) < prior.p_sp
    reads_present = np.where(present, rng.random(n) < sensor.p_op_given_sp, rng.random(n) < sensor.p_op_given_sa)
    assert np.mean(reads_present == present) == pytest.approx(correct_detection_prob(prior, sensor), abs=0.005)


def test_expected_local_cost():
    assert expected_local_cost(CellPrior(0.1), SensorModel(0.7, 0.7), -30.0) == pytest.approx(-9.0)
    with pytest.raises(ValueError):
        expected_local_cost(CellPrior(0.1), SensorModel(0.7, 0.7), 1.0)


@pytest.mark.parametrize("bad", [-0.01, 1.01])
def test_validation(bad):
    with pytest.raises(ValueError):
        SensorModel(bad, 0.5)
    with pytest.raises(ValueError):
        CellPrior(bad)
