"""Slotted multichannel MAC simulation of secondary-user sensing and access.

Each slot: PU occupancy steps, fresh SNR fields are drawn, every SU picks a
channel myopically, senses it (Bernoulli outcome from the detector's
probabilities, or from a simulated decision statistic), transmits if it
sensed idle, and updates its belief.  At most one SU wins a contended idle
channel; any transmission on a busy channel collides with the PU.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import detection, strategy, traffic
from .channel import (
    FadingSpec,
    db_to_linear,
    draw_field,
    draw_mismatched_field,
    conditional_pdf,
)
from .config import ScenarioConfig
from .detection import DetectorConfig

__all__ = ["SlotRecord", "Metrics", "run_episode", "run_monte_carlo", "EpisodeResult"]

WORKERS_ENV = "CRSENSE_WORKERS"

Z95 = 1.959963984540054


@dataclass
class SlotRecord:
    chosen: np.ndarray  # (M,) channel index per SU
    sensed_idle: np.ndarray  # (M,) bool
    true_idle: np.ndarray  # (M,) bool, occupancy of the chosen channel
    transmitted: np.ndarray  # (M,) bool
    success: np.ndarray  # (M,) bool
    su_rate: np.ndarray  # (M,) bits this slot
    pu_active: np.ndarray  # (N,) bool
    pu_collided: np.ndarray  # (N,) bool
    pu_rate: np.ndarray  # (N,) bits this slot


@dataclass
class Metrics:
    su_throughput: float  # bits/slot/SU
    pu_throughput: float  # bits/slot/channel
    collision_rate: float  # missed / sensed-busy slots
    su_ci: float = 0.0  # 95% half-widths (replication-level)
    pu_ci: float = 0.0
    sensed_busy: int = 0
    missed: int = 0
    replications: int = 1


@dataclass
class EpisodeResult:
    records: List[SlotRecord]
    metrics: Metrics


class _Detector:
    """Per-scenario detector state: thresholds and probability evaluators."""

    def __init__(self, cfg: ScenarioConfig):
        self.mode = cfg.threshold_mode
        self.scenario = cfg
        self.mean_lam = cfg.pu_su.mean_linear
        self.target_is_one = cfg.pmd_target >= 1.0
        if self.mode == "perfect" or self.target_is_one:
            self.det = None
            return
        self.det = DetectorConfig(
            nu=cfg.nu,
            pmd_target=cfg.pmd_target,
            threshold_mode=cfg.threshold_mode if cfg.threshold_mode != "perfect" else "fixed",
            approx_mode=cfg.approx_mode,
            cooperative_l=cfg.cooperative_l,
        )
        if self.mode in ("fixed", "cooperative"):
            L = cfg.cooperative_l if self.mode == "cooperative" else 1
            branch = DetectorConfig(
                nu=cfg.nu,
                pmd_target=cfg.pmd_target ** (1.0 / L),
                approx_mode=cfg.approx_mode,
            )
            self.tau_fixed = self._invert_fixed(branch, cfg.pu_su)
            self.pfa_branch = float(detection.pfa_from_threshold(branch, self.tau_fixed))
            fused = detection.fusion_or(
                detection.DetectionProbabilities(p_md=branch.pmd_target, p_fa=self.pfa_branch), L
            )
            self.pfa_used = fused.p_fa
            self.pmd_used = fused.p_md
        elif self.mode == "mismatched":
            self._build_mismatch_table(cfg)

    @staticmethod
    def _invert_fixed(det: DetectorConfig, spec: FadingSpec) -> float:
        if spec.kind == "rayleigh":
            return detection.threshold_fixed(det, spec.mean_linear)
        return detection.threshold_fixed_lognormal(det, spec.mu_db, spec.sigma_db)

    def _build_mismatch_table(self, cfg: ScenarioConfig):
        # tau_hat depends only on the observed SNR; precompute on a grid and
        # interpolate.  Grid covers the exponential marginal far into its tail.
        mean = self.mean_lam
        grid = np.concatenate([[0.0], np.geomspace(1e-3 * mean, 50.0 * mean, 79)])
        taus = np.array(
            [
                detection.threshold_mismatched(self.det, lh, cfg.nmse, mean, conditional_pdf)
                for lh in grid
            ]
        )
        self._mm_grid = grid
        self._mm_taus = taus

    # --- per-slot evaluations -------------------------------------------

    def thresholds(self, lam: np.ndarray, lam_hat: Optional[np.ndarray]):
        """(M, N) thresholds for CSI-driven modes; None for constant-threshold ones."""
        if self.target_is_one or self.mode == "perfect":
            return None
        if self.mode == "adaptive":
            return detection.threshold_adaptive(self.det, lam)
        if self.mode == "mismatched":
            return np.interp(lam_hat, self._mm_grid, self._mm_taus)
        return None

    def pfa_matrix(self, tau: Optional[np.ndarray], shape):
        """(M, N) instantaneous false-alarm probabilities for reward shaping."""
        if self.target_is_one or self.mode == "perfect":
            return np.zeros(shape)
        if self.mode in ("adaptive", "mismatched"):
            return detection.pfa_from_threshold(self.det, tau)
        return np.full(shape, self.pfa_used)

    def sense(self, chosen, busy, lam_sel, tau_sel, pfa_sel, rng: np.random.Generator):
        """Sensing outcomes (True = idle) for the selected channels.

        lam_sel/tau_sel/pfa_sel are per-SU values at the chosen channels;
        busy flags the PU-active channels.  Cooperative mode resolves one
        fused decision per channel (the fusion center's verdict is shared by
        every SU that sensed that channel); all other modes draw per SU.
        """
        busy_sel = busy[chosen]
        m = chosen.shape[0]
        if self.mode == "perfect":
            return ~busy_sel
        if self.target_is_one:
            return np.ones(m, dtype=bool)
        use_statistic = self.scenario.sensing_sim == "statistic"
        if self.mode == "cooperative":
            L = self.scenario.cooperative_l
            verdict = {}
            for n in sorted(set(chosen.tolist())):
                if busy[n]:
                    lam_branches = rng.exponential(self.mean_lam, size=L)
                    if use_statistic:
                        stat = rng.noncentral_chisquare(
                            2 * self.det.nu, 2 * self.det.nu * lam_branches
                        )
                        verdict[n] = bool(np.all(stat <= self.tau_fixed))
                    else:
                        p_miss = float(
                            np.prod(
                                detection.pmd_instantaneous(self.det, lam_branches, self.tau_fixed)
                            )
                        )
                        verdict[n] = rng.random() < p_miss
                elif use_statistic:
                    stat = rng.chisquare(2 * self.det.nu, size=L)
                    verdict[n] = bool(np.all(stat <= self.tau_fixed))
                else:
                    verdict[n] = rng.random() >= self.pfa_used
            return np.array([verdict[n] for n in chosen])
        idle = np.empty(m, dtype=bool)
        for i in range(m):
            tau_i = self.tau_fixed if self.mode == "fixed" else float(tau_sel[i])
            if use_statistic:
                stat = detection.simulate_decision_statistic(
                    self.det, float(lam_sel[i]) if busy_sel[i] else 0.0, rng
                )
                idle[i] = stat <= tau_i
            elif busy_sel[i]:
                p_miss = float(detection.pmd_instantaneous(self.det, float(lam_sel[i]), tau_i))
                idle[i] = rng.random() < p_miss
            else:
                p_alarm = self.pfa_used if self.mode == "fixed" else float(pfa_sel[i])
                idle[i] = rng.random() >= p_alarm
        return idle

    def reliability(self, pfa_sel_i: float):
        """(p_fa, p_md) the belief update should attribute to this sensing."""
        if self.mode == "perfect":
            return 0.0, 0.0
        if self.target_is_one:
            return 0.0, 1.0
        if self.mode in ("fixed", "cooperative"):
            return self.pfa_used, self.pmd_used
        return pfa_sel_i, self.scenario.pmd_target


def _episode_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence(seed))


def run_episode(cfg: ScenarioConfig, seed, detector: Optional[_Detector] = None) -> EpisodeResult:
    """One T-slot episode; deterministic for a given (config, seed)."""
    rng = _episode_rng(seed)
    det = detector if detector is not None else _Detector(cfg)
    chains = cfg.chains()
    strat = strategy.StrategyConfig(
        reward_mode=cfg.reward_mode,
        adaptive_reward=cfg.threshold_mode in ("adaptive", "mismatched"),
        bandwidth=cfg.bandwidth,
    )
    occupancy = traffic.init_occupancy(chains, rng)
    beliefs = np.tile(strategy.belief_init(chains), (cfg.m, 1))
    pu_mean = float(db_to_linear(cfg.pu_pu_snr_db))

    records: List[SlotRecord] = []
    for _ in range(cfg.t):
        occupancy = traffic.step_occupancy(occupancy, chains, rng)
        busy = occupancy == traffic.BUSY

        lam = draw_field(cfg.pu_su, cfg.m, cfg.n, rng)
        gamma = draw_field(cfg.su_su, cfg.m, cfg.n, rng)
        lam_hat = None
        if cfg.threshold_mode == "mismatched":
            lam, lam_hat = draw_mismatched_field(det.mean_lam, cfg.nmse, cfg.m, cfg.n, rng)

        tau = det.thresholds(lam, lam_hat)
        pfa_inst = det.pfa_matrix(tau, (cfg.m, cfg.n))
        rewards = strategy.compute_reward(strat, gamma, pfa_inst)

        chosen = np.array(
            [strategy.select_channel(beliefs[m], rewards[m], rng) for m in range(cfg.m)]
        )
        rows = np.arange(cfg.m)
        busy_sel = busy[chosen]
        lam_sel = lam[rows, chosen]
        tau_sel = tau[rows, chosen] if tau is not None else None
        pfa_sel = pfa_inst[rows, chosen]

        sensed_idle = det.sense(chosen, busy, lam_sel, tau_sel, pfa_sel, rng)

        # Access: transmit on sensed-idle channels; one winner per idle channel.
        transmitted = sensed_idle.copy()
        success = np.zeros(cfg.m, dtype=bool)
        su_rate = np.zeros(cfg.m)
        pu_collided = np.zeros(cfg.n, dtype=bool)
        for n in set(chosen[transmitted].tolist()):
            contenders = rows[(chosen == n) & transmitted]
            if busy[n]:
                pu_collided[n] = True
                continue
            winner = contenders[0] if contenders.size == 1 else rng.choice(contenders)
            success[winner] = True
            su_rate[winner] = cfg.bandwidth * math.log2(1.0 + gamma[winner, n])

        pu_rate = np.zeros(cfg.n)
        active = np.flatnonzero(busy & ~pu_collided)
        if active.size:
            gamma_pu = rng.exponential(pu_mean, size=active.size)
            pu_rate[active] = cfg.bandwidth * np.log2(1.0 + gamma_pu)

        # Belief update: correct the sensed channel, propagate all of them.
        for m in range(cfg.m):
            p_fa_used, p_md_used = det.reliability(float(pfa_sel[m]))
            result = strategy.SensingResult(
                a=int(sensed_idle[m]), p_fa_used=p_fa_used, p_md_used=p_md_used
            )
            theta_r = strategy.belief_correct(beliefs[m, chosen[m]], result)
            beliefs[m] = strategy.belief_propagate(beliefs[m], (chosen[m], theta_r), chains)

        records.append(
            SlotRecord(
                chosen=chosen,
                sensed_idle=sensed_idle,
                true_idle=~busy_sel,
                transmitted=transmitted,
                success=success,
                su_rate=su_rate,
                pu_active=busy.copy(),
                pu_collided=pu_collided,
                pu_rate=pu_rate,
            )
        )

    return EpisodeResult(records=records, metrics=_aggregate(cfg, records))


def _aggregate(cfg: ScenarioConfig, records: List[SlotRecord]) -> Metrics:
    su_total = sum(float(r.su_rate.sum()) for r in records)
    pu_total = sum(float(r.pu_rate.sum()) for r in records)
    sensed_busy = sum(int(np.sum(~r.true_idle)) for r in records)
    missed = sum(int(np.sum(~r.true_idle & r.sensed_idle)) for r in records)
    return Metrics(
        su_throughput=su_total / (cfg.m * cfg.t),
        pu_throughput=pu_total / (cfg.n * cfg.t),
        collision_rate=missed / sensed_busy if sensed_busy else 0.0,
        sensed_busy=sensed_busy,
        missed=missed,
    )


def _run_rep(args):
    cfg, rep = args
    seq = np.random.SeedSequence([cfg.seed & 0xFFFFFFFFFFFFFFFF, rep])
    det = _Detector(cfg)
    m = run_episode(cfg, seq, detector=det).metrics
    return m.su_throughput, m.pu_throughput, m.sensed_busy, m.missed


def run_monte_carlo(cfg: ScenarioConfig, workers: Optional[int] = None) -> Metrics:
    """Replicated episodes with independent streams derived from (seed, rep)."""
    reps = cfg.replications
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    det = _Detector(cfg)  # precomputed thresholds shared across reps
    if workers > 1 and reps > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_rep, [(cfg, r) for r in range(reps)], chunksize=8))
    else:
        rows = []
        for r in range(reps):
            seq = np.random.SeedSequence([cfg.seed & 0xFFFFFFFFFFFFFFFF, r])
            m = run_episode(cfg, seq, detector=det).metrics
            rows.append((m.su_throughput, m.pu_throughput, m.sensed_busy, m.missed))
    su = np.array([r[0] for r in rows])
    pu = np.array([r[1] for r in rows])
    sensed_busy = sum(r[2] for r in rows)
    missed = sum(r[3] for r in rows)
    su_ci = Z95 * su.std(ddof=1) / math.sqrt(reps) if reps > 1 else 0.0
    pu_ci = Z95 * pu.std(ddof=1) / math.sqrt(reps) if reps > 1 else 0.0
    return Metrics(
        su_throughput=float(su.mean()),
        pu_throughput=float(pu.mean()),
        collision_rate=missed / sensed_busy if sensed_busy else 0.0,
        su_ci=float(su_ci),
        pu_ci=float(pu_ci),
        sensed_busy=sensed_busy,
        missed=missed,
        replications=reps,
    )
