"""Two-state Markov primary-user occupancy, one independent chain per channel.

State convention: 0 = busy, 1 = idle.  p01 is the busy-to-idle transition
probability and p11 the idle-to-idle probability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["MarkovChainParams", "stationary_idle_prob", "init_occupancy", "step_occupancy"]

BUSY, IDLE = 0, 1


@dataclass(frozen=True)
class MarkovChainParams:
    p01: float  # busy -> idle
    p11: float  # idle -> idle

    def __post_init__(self):
        if not (0.0 <= self.p01 <= 1.0 and 0.0 <= self.p11 <= 1.0):
            raise ValueError(f"transition probabilities out of range: {self}")


def stationary_idle_prob(params: MarkovChainParams) -> float:
    denom = params.p01 + 1.0 - params.p11
    if denom == 0.0:
        raise ValueError("degenerate chain: p01 = 0 and p11 = 1 has no unique stationary law")
    return params.p01 / denom


def init_occupancy(params_per_channel, rng: np.random.Generator) -> np.ndarray:
    """Stationary initial occupancy, one independent draw per channel."""
    idle_probs = np.array([stationary_idle_prob(p) for p in params_per_channel])
    return (rng.random(idle_probs.shape) < idle_probs).astype(np.int8)


def step_occupancy(states: np.ndarray, params_per_channel, rng: np.random.Generator) -> np.ndarray:
    """Advance every channel one slot under its own chain."""
    p01 = np.array([p.p01 for p in params_per_channel])
    p11 = np.array([p.p11 for p in params_per_channel])
    idle_next_prob = np.where(states == IDLE, p11, p01)
    return (rng.random(states.shape) < idle_next_prob).astype(np.int8)
