"""Myopic selection, reward shaping and Bayesian belief updates."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crsense import strategy
from crsense.strategy import SensingResult, StrategyConfig
from crsense.traffic import MarkovChainParams

CHAINS = [MarkovChainParams(0.2, 0.8)] * 4


class TestReward:
    def test_bandwidth_constant(self):
        cfg = StrategyConfig("bandwidth", adaptive_reward=False, bandwidth=2.0)
        gamma = np.array([0.1, 10.0, 100.0])
        np.testing.assert_allclose(strategy.compute_reward(cfg, gamma, np.zeros(3)), 2.0)

    def test_capacity_log(self):
        cfg = StrategyConfig("capacity", adaptive_reward=False)
        out = strategy.compute_reward(cfg, np.array([1.0, 3.0]), np.zeros(2))
        np.testing.assert_allclose(out, [1.0, 2.0])

    def test_adaptive_scaling(self):
        cfg = StrategyConfig("bandwidth", adaptive_reward=True)
        out = strategy.compute_reward(cfg, np.ones(3), np.array([0.0, 0.25, 1.0]))
        np.testing.assert_allclose(out, [1.0, 0.75, 0.0])

    def test_validation(self):
        with pytest.raises(ValueError):
            StrategyConfig("snr", adaptive_reward=False)
        with pytest.raises(ValueError):
            StrategyConfig("bandwidth", adaptive_reward=False, bandwidth=0.0)


class TestSelectChannel:
    def test_argmax(self):
        rng = np.random.default_rng(0)
        belief = np.array([0.5, 0.9, 0.1])
        rewards = np.array([1.0, 1.0, 10.0])
        # scores: 0.5, 0.9, 1.0
        assert strategy.select_channel(belief, rewards, rng) == 2

    def test_tie_break_uniform(self):
        rng = np.random.default_rng(1)
        belief = np.array([0.5, 0.5, 0.25])
        rewards = np.array([1.0, 1.0, 2.0])
        picks = [strategy.select_channel(belief, rewards, rng) for _ in range(3000)]
        counts = np.bincount(picks, minlength=3)
        assert counts[2] > 0  # 0.25 * 2 ties with the others
        for c in counts:
            assert abs(c / 3000 - 1 / 3) < 0.05

    def test_validation(self):
        rng = np.random.default_rng(2)
        with pytest.raises(ValueError):
            strategy.select_channel(np.array([0.5]), np.array([1.0, 2.0]), rng)
        with pytest.raises(ValueError):
            strategy.select_channel(np.array([]), np.array([]), rng)


class TestBeliefCorrect:
    def test_perfect_sensing(self):
        idle = SensingResult(a=1, p_fa_used=0.0, p_md_used=0.0)
        busy = SensingResult(a=0, p_fa_used=0.0, p_md_used=0.0)
        assert strategy.belief_correct(0.5, idle) == 1.0
        assert strategy.belief_correct(0.5, busy) == 0.0

    def test_hand_computed_update(self):
        result = SensingResult(a=1, p_fa_used=0.2, p_md_used=0.1)
        theta = 0.5
        expected = (0.8 * 0.5) / (0.8 * 0.5 + 0.1 * 0.5)
        assert strategy.belief_correct(theta, result) == pytest.approx(expected)

    def test_sensed_idle_raises_belief(self):
        result = SensingResult(a=1, p_fa_used=0.1, p_md_used=0.1)
        for theta in (0.2, 0.5, 0.8):
            assert strategy.belief_correct(theta, result) > theta

    def test_sensed_busy_lowers_belief(self):
        result = SensingResult(a=0, p_fa_used=0.1, p_md_used=0.1)
        for theta in (0.2, 0.5, 0.8):
            assert strategy.belief_correct(theta, result) < theta

    def test_uninformative_sensing_is_neutral(self):
        # idle verdict equally likely under both hypotheses: 1 - p_fa = p_md
        result = SensingResult(a=1, p_fa_used=0.3, p_md_used=0.7)
        assert strategy.belief_correct(0.4, result) == pytest.approx(0.4)

    def test_impossible_observation(self):
        result = SensingResult(a=0, p_fa_used=0.0, p_md_used=1.0)
        with pytest.raises(ZeroDivisionError):
            strategy.belief_correct(0.7, result)

    @given(
        theta=st.floats(0.01, 0.99),
        p_fa=st.floats(0.01, 0.99),
        p_md=st.floats(0.01, 0.99),
        a=st.integers(0, 1),
    )
    @settings(max_examples=100, deadline=None)
    def test_stays_in_unit_interval(self, theta, p_fa, p_md, a):
        out = strategy.belief_correct(theta, SensingResult(a=a, p_fa_used=p_fa, p_md_used=p_md))
        assert 0.0 <= out <= 1.0


class TestBeliefPropagate:
    def test_stationary_is_fixed_point(self):
        belief = strategy.belief_init(CHAINS)
        np.testing.assert_allclose(strategy.belief_propagate(belief, None, CHAINS), belief)

    def test_correction_applied_before_step(self):
        belief = np.full(4, 0.5)
        out = strategy.belief_propagate(belief, (2, 1.0), CHAINS)
        assert out[2] == pytest.approx(0.8)  # p11 * 1.0
        np.testing.assert_allclose(out[[0, 1, 3]], 0.5)

    def test_converges_to_stationary(self):
        belief = np.array([0.0, 1.0, 0.3, 0.9])
        for _ in range(60):
            belief = strategy.belief_propagate(belief, None, CHAINS)
        np.testing.assert_allclose(belief, 0.5, atol=1e-12)

    @given(st.floats(0.0, 1.0))
    @settings(max_examples=50, deadline=None)
    def test_contracts_toward_stationary(self, theta):
        belief = np.full(4, theta)
        out = strategy.belief_propagate(belief, None, CHAINS)
        assert abs(out[0] - 0.5) <= abs(theta - 0.5) + 1e-12


class TestSensingResultValidation:
    def test_outcome_range(self):
        with pytest.raises(ValueError):
            SensingResult(a=2, p_fa_used=0.1, p_md_used=0.1)
        with pytest.raises(ValueError):
            SensingResult(a=1, p_fa_used=1.1, p_md_used=0.1)
