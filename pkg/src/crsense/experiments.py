"""Experiment presets sweeping the main operating parameters to CSV tables.

Each preset regenerates one of the headline comparisons: ROC of fixed vs
adaptive thresholds, throughput vs miss-rate target, cooperative fusion vs
single-detector adaptation, shadowing correlation, and CSI mismatch.
The CSV schema is `x,series,mean,ci95` with one row per (x, series).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

from . import detection
from .channel import FadingSpec
from .config import ScenarioConfig, default_config
from .detection import DetectorConfig
from .simulator import Metrics, run_monte_carlo

__all__ = ["ResultTable", "PRESETS", "build_preset_table", "run_preset", "run_scenario_table", "write_csv"]

PRESET_IDS = ("fig2", "fig3", "fig4", "fig5", "fig6")

FIG2_TARGETS = (0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5)
FIG3_TARGETS = (0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0)
FIG4_BRANCHES = (1, 2, 5, 10, 15, 20, 25, 30, 35, 40)
FIG5_RHOS = (0.0, 0.3, 0.5, 0.7, 0.8, 0.9)
FIG6_NMSES = (1e-3, 1e-2, 0.1, 0.3, 0.6, 1.0)


@dataclass
class ResultTable:
    rows: List[Tuple[float, str, float, float]]  # (x, series, mean, ci95)

    def sorted(self) -> "ResultTable":
        return ResultTable(rows=sorted(self.rows, key=lambda r: (r[0], r[1])))

    def series(self, name: str) -> List[Tuple[float, float, float]]:
        return [(x, m, ci) for (x, s, m, ci) in self.sorted().rows if s == name]

    def value(self, x: float, series: str) -> Tuple[float, float]:
        for rx, rs, m, ci in self.rows:
            if rs == series and abs(rx - x) <= 1e-12 * max(1.0, abs(x)):
                return m, ci
        raise KeyError(f"no row for x={x}, series={series!r}")


def write_csv(table: ResultTable, path) -> None:
    """Write the canonical sorted table; atomic so failures leave no partial file."""
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("x,series,mean,ci95\n")
            for x, series, mean, ci in table.sorted().rows:
                fh.write(f"{x:.9g},{series},{mean:.9g},{ci:.9g}\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def _mc_rows(cfg: ScenarioConfig, x: float, series: str, workers, pu_series: bool = False):
    m: Metrics = run_monte_carlo(cfg, workers=workers)
    rows = [(x, series, m.su_throughput, m.su_ci)]
    if pu_series:
        rows.append((x, f"{series}:pu", m.pu_throughput, m.pu_ci))
    return rows


def _base(reps: Optional[int], seed: Optional[int]) -> ScenarioConfig:
    cfg = default_config()
    if reps is not None:
        cfg = replace(cfg, replications=reps)
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    return cfg.validate()


def roc_table(reps=None, seed=None, workers=None) -> ResultTable:
    """Fixed vs adaptive ROC points; pure numerics, no simulation."""
    det = DetectorConfig(nu=100, pmd_target=0.1, approx_mode="exact")
    lam_bar = 0.1  # -10 dB
    rows = []
    for mode in ("fixed", "adaptive"):
        for p_fa, target in detection.roc_curve(mode, det, lam_bar, FIG2_TARGETS):
            rows.append((target, mode, p_fa, 0.0))
    return ResultTable(rows).sorted()


FIG3_POLICIES = (
    ("myopic-fixed", "fixed", "bandwidth"),
    ("su-csi-fixed", "fixed", "capacity"),
    ("pu-csi-adaptive", "adaptive", "bandwidth"),
    ("combined-adaptive", "adaptive", "capacity"),
    ("myopic-perfect", "perfect", "bandwidth"),
    ("su-csi-perfect", "perfect", "capacity"),
)


def throughput_table(reps=None, seed=None, workers=None) -> ResultTable:
    """SU and PU throughput vs miss-rate target for the four policies plus
    the two perfect-sensing references."""
    base = _base(reps, seed)
    rows = []
    for name, tmode, rmode in FIG3_POLICIES:
        for target in FIG3_TARGETS:
            if tmode == "perfect" and target != FIG3_TARGETS[0]:
                # perfect sensing does not depend on the target; replicate the
                # first point so every (x, series) pair exists.
                ref = [r for r in rows if r[1] in (name, f"{name}:pu") and r[0] == FIG3_TARGETS[0]]
                rows.extend((target, s, m, ci) for (_, s, m, ci) in ref)
                continue
            cfg = replace(base, threshold_mode=tmode, reward_mode=rmode, pmd_target=target)
            rows.extend(_mc_rows(cfg.validate(), target, name, workers, pu_series=True))
    return ResultTable(rows).sorted()


def cooperative_table(reps=None, seed=None, workers=None) -> ResultTable:
    """Cooperative OR-rule throughput vs branch count, against the
    single-detector adaptive reference."""
    base = _base(reps, seed)
    rows = []
    ref_cfg = replace(base, threshold_mode="adaptive", reward_mode="bandwidth")
    ref = run_monte_carlo(ref_cfg.validate(), workers=workers)
    for L in FIG4_BRANCHES:
        cfg = replace(base, threshold_mode="cooperative", reward_mode="bandwidth", cooperative_l=L)
        rows.extend(_mc_rows(cfg.validate(), float(L), "cooperative", workers))
        rows.append((float(L), "adaptive-ref", ref.su_throughput, ref.su_ci))
    return ResultTable(rows).sorted()


def shadowing_table(reps=None, seed=None, workers=None) -> ResultTable:
    """Throughput vs shadowing correlation under correlated lognormal fading."""
    base = _base(reps, seed)
    rows = []
    for rho in FIG5_RHOS:
        pu_su = FadingSpec("lognormal", mu_db=-10.0, sigma_db=5.0, rho=rho)
        su_su = FadingSpec("lognormal", mu_db=10.0, sigma_db=5.0, rho=0.0)
        for series, tmode in (("adaptive", "adaptive"), ("fixed", "fixed")):
            cfg = replace(
                base, threshold_mode=tmode, reward_mode="bandwidth", pu_su=pu_su, su_su=su_su
            )
            rows.extend(_mc_rows(cfg.validate(), rho, series, workers))
    return ResultTable(rows).sorted()


def mismatch_table(reps=None, seed=None, workers=None) -> ResultTable:
    """Throughput vs CSI estimation error, with perfect-CSI and fixed baselines."""
    base = _base(reps, seed)
    rows = []
    adaptive_ref = run_monte_carlo(
        replace(base, threshold_mode="adaptive", reward_mode="bandwidth").validate(),
        workers=workers,
    )
    fixed_ref = run_monte_carlo(
        replace(base, threshold_mode="fixed", reward_mode="bandwidth").validate(),
        workers=workers,
    )
    for nmse in FIG6_NMSES:
        cfg = replace(base, threshold_mode="mismatched", reward_mode="bandwidth", nmse=nmse)
        rows.extend(_mc_rows(cfg.validate(), nmse, "mismatched", workers))
        rows.append((nmse, "adaptive-ref", adaptive_ref.su_throughput, adaptive_ref.su_ci))
        rows.append((nmse, "fixed-ref", fixed_ref.su_throughput, fixed_ref.su_ci))
    return ResultTable(rows).sorted()


PRESETS = {
    "fig2": roc_table,
    "fig3": throughput_table,
    "fig4": cooperative_table,
    "fig5": shadowing_table,
    "fig6": mismatch_table,
}


def build_preset_table(figure: str, reps=None, seed=None, workers=None) -> ResultTable:
    if figure not in PRESETS:
        raise ValueError(f"unknown figure {figure!r}; choose from {PRESET_IDS}")
    return PRESETS[figure](reps=reps, seed=seed, workers=workers)


def run_preset(figure: str, out_path, reps=None, seed=None, workers=None) -> ResultTable:
    table = build_preset_table(figure, reps=reps, seed=seed, workers=workers)
    write_csv(table, out_path)
    return table


def run_scenario_table(cfg: ScenarioConfig, workers=None) -> ResultTable:
    """Single-scenario metrics in the common table schema."""
    m = run_monte_carlo(cfg, workers=workers)
    x = cfg.pmd_target
    return ResultTable(
        rows=[
            (x, "su_throughput", m.su_throughput, m.su_ci),
            (x, "pu_throughput", m.pu_throughput, m.pu_ci),
            (x, "collision_rate", m.collision_rate, 0.0),
        ]
    ).sorted()
