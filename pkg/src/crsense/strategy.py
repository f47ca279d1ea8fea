"""Belief maintenance and myopic channel selection for one secondary user.

The belief vector holds per-channel posterior idle probabilities.  Selection
maximizes belief times reward; after sensing, the sensed channel's belief is
corrected by the detector's reliability and every channel is propagated one
step through its Markov chain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .traffic import MarkovChainParams, stationary_idle_prob

__all__ = [
    "StrategyConfig",
    "SensingResult",
    "belief_init",
    "compute_reward",
    "select_channel",
    "belief_correct",
    "belief_propagate",
]


@dataclass(frozen=True)
class StrategyConfig:
    """Reward shaping for the myopic policy."""

    reward_mode: str  # "bandwidth" | "capacity"
    adaptive_reward: bool  # scale base reward by (1 - instantaneous p_fa)
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.reward_mode not in ("bandwidth", "capacity"):
            raise ValueError(f"unknown reward_mode {self.reward_mode!r}")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")


@dataclass(frozen=True)
class SensingResult:
    a: int  # 1 = sensed idle, 0 = sensed busy
    p_fa_used: float
    p_md_used: float

    def __post_init__(self):
        if self.a not in (0, 1):
            raise ValueError(f"sensing outcome must be 0 or 1, got {self.a}")
        if not (0.0 <= self.p_fa_used <= 1.0 and 0.0 <= self.p_md_used <= 1.0):
            raise ValueError(f"reliability probabilities out of range: {self}")


def belief_init(params_per_channel) -> np.ndarray:
    """Stationary idle probabilities, the belief at the first slot."""
    return np.array([stationary_idle_prob(p) for p in params_per_channel])


def compute_reward(cfg: StrategyConfig, gamma, p_fa_inst):
    """Per-channel sensing reward: bandwidth or capacity base, optionally
    scaled by the success probability (1 - instantaneous false alarm)."""
    gamma = np.asarray(gamma, dtype=float)
    base = cfg.bandwidth * (np.log2(1.0 + gamma) if cfg.reward_mode == "capacity" else np.ones_like(gamma))
    if cfg.adaptive_reward:
        base = (1.0 - np.asarray(p_fa_inst, dtype=float)) * base
    return base


def select_channel(belief: np.ndarray, rewards: np.ndarray, rng: np.random.Generator) -> int:
    """argmax of belief * reward, ties broken uniformly at random."""
    if belief.shape != rewards.shape or belief.size == 0:
        raise ValueError("belief and rewards must be equal-length, non-empty")
    score = belief * rewards
    best = np.flatnonzero(score == score.max())
    if best.size == 1:
        return int(best[0])
    return int(rng.choice(best))


def belief_correct(theta_n: float, result: SensingResult) -> float:
    """Bayes update of one channel's idle belief given the sensing outcome."""
    p_fa, p_md = result.p_fa_used, result.p_md_used
    if result.a == 1:
        num = (1.0 - p_fa) * theta_n
        denom = num + p_md * (1.0 - theta_n)
    else:
        num = p_fa * theta_n
        denom = num + (1.0 - p_md) * (1.0 - theta_n)
    if denom == 0.0:
        raise ZeroDivisionError("impossible observation: zero-probability sensing outcome")
    return num / denom


def belief_propagate(belief: np.ndarray, corrected, params_per_channel) -> np.ndarray:
    """One Markov step of every channel's belief; the sensed channel (if any)
    starts from its corrected value."""
    theta = belief.copy()
    if corrected is not None:
        n, theta_r = corrected
        theta[n] = theta_r
    p01 = np.array([p.p01 for p in params_per_channel])
    p11 = np.array([p.p11 for p in params_per_channel])
    return p11 * theta + p01 * (1.0 - theta)
