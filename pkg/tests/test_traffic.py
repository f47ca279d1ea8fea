"""Two-state Markov occupancy chains."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crsense import traffic
from crsense.traffic import BUSY, IDLE, MarkovChainParams


class TestStationary:
    def test_reference_value(self):
        # p01 = 0.2, p11 = 0.8 -> idle prob 0.2 / (0.2 + 0.2) = 0.5
        assert traffic.stationary_idle_prob(MarkovChainParams(0.2, 0.8)) == pytest.approx(0.5)

    def test_always_idle(self):
        assert traffic.stationary_idle_prob(MarkovChainParams(1.0, 1.0)) == 1.0

    def test_degenerate_raises(self):
        with pytest.raises(ValueError):
            traffic.stationary_idle_prob(MarkovChainParams(0.0, 1.0))

    @given(st.floats(0.01, 1.0), st.floats(0.0, 0.99))
    @settings(max_examples=50, deadline=None)
    def test_fixed_point(self, p01, p11):
        """The stationary idle probability is invariant under one step."""
        pi = traffic.stationary_idle_prob(MarkovChainParams(p01, p11))
        stepped = pi * p11 + (1.0 - pi) * p01
        assert stepped == pytest.approx(pi, abs=1e-12)

    def test_params_validation(self):
        with pytest.raises(ValueError):
            MarkovChainParams(-0.1, 0.5)
        with pytest.raises(ValueError):
            MarkovChainParams(0.5, 1.1)


class TestOccupancyDynamics:
    CHAINS = [MarkovChainParams(0.2, 0.8)] * 2000

    def test_init_stationary_fraction(self):
        rng = np.random.default_rng(0)
        states = traffic.init_occupancy(self.CHAINS, rng)
        assert states.shape == (2000,)
        assert set(np.unique(states)) <= {BUSY, IDLE}
        n = len(self.CHAINS)
        assert abs(states.mean() - 0.5) < 3 * np.sqrt(0.25 / n)

    def test_step_transition_frequencies(self):
        rng = np.random.default_rng(1)
        states = traffic.init_occupancy(self.CHAINS, rng)
        reps = 50
        idle_given_idle = []
        idle_given_busy = []
        for _ in range(reps):
            nxt = traffic.step_occupancy(states, self.CHAINS, rng)
            idle_given_idle.extend(nxt[states == IDLE] == IDLE)
            idle_given_busy.extend(nxt[states == BUSY] == IDLE)
            states = nxt
        f11 = np.mean(idle_given_idle)
        f01 = np.mean(idle_given_busy)
        assert f11 == pytest.approx(0.8, abs=3 * np.sqrt(0.16 / len(idle_given_idle)))
        assert f01 == pytest.approx(0.2, abs=3 * np.sqrt(0.16 / len(idle_given_busy)))

    def test_deterministic_chains(self):
        rng = np.random.default_rng(2)
        frozen = [MarkovChainParams(0.0, 1.0), MarkovChainParams(1.0, 0.0)]
        states = np.array([BUSY, IDLE], dtype=np.int8)
        nxt = traffic.step_occupancy(states, frozen, rng)
        # first chain: busy stays busy; second: idle flips to busy
        assert nxt.tolist() == [BUSY, BUSY]

    def test_channels_use_own_params(self):
        rng = np.random.default_rng(3)
        chains = [MarkovChainParams(1.0, 1.0), MarkovChainParams(0.0, 0.0)]
        states = np.array([BUSY, IDLE], dtype=np.int8)
        nxt = traffic.step_occupancy(states, chains, rng)
        assert nxt.tolist() == [IDLE, BUSY]
