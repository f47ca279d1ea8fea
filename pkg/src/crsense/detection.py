"""Energy-detection statistics, threshold inversion and hard-decision fusion.

All probabilities refer to an energy detector whose decision statistic is
central chi-square with 2*nu degrees of freedom under noise only, and
noncentral chi-square (noncentrality 2*nu*lam) when the primary signal is
present with per-sample SNR lam.  Thresholds tau are expressed in the units
of that statistic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special, stats

__all__ = [
    "DetectorConfig",
    "DetectionProbabilities",
    "regularized_upper_gamma",
    "marcum_q",
    "pfa_from_threshold",
    "pmd_instantaneous",
    "pmd_average_rayleigh",
    "pmd_average_lognormal",
    "pmd_average",
    "threshold_fixed_lognormal",
    "threshold_fixed",
    "threshold_fixed_for_density",
    "threshold_adaptive",
    "threshold_mismatched",
    "threshold_cooperative",
    "fusion_or",
    "simulate_decision_statistic",
    "roc_curve",
    "average_pfa_adaptive",
    "exponential_pdf",
]

# Quadrature / inversion tolerances.
QUAD_REL_TOL = 1e-8
INVERT_PROB_TOL = 1e-9
INVERT_MAX_ITER = 200
SNR_TAIL_FACTOR = 40.0  # exponential tail mass beyond 40*mean is < 1e-17


class NumericsError(RuntimeError):
    """Inversion or quadrature failed to converge."""


@dataclass(frozen=True)
class DetectorConfig:
    """Energy-detector settings: sample count, miss-rate target, modes."""

    nu: int
    pmd_target: float
    threshold_mode: str = "fixed"  # fixed | adaptive | mismatched | cooperative
    approx_mode: str = "exact"  # exact | gaussian
    cooperative_l: int = 1

    def __post_init__(self):
        if self.nu < 1:
            raise ValueError(f"nu must be >= 1, got {self.nu}")
        if not 0.0 < self.pmd_target < 1.0:
            raise ValueError(f"pmd_target must be in (0,1), got {self.pmd_target}")
        if self.threshold_mode not in ("fixed", "adaptive", "mismatched", "cooperative"):
            raise ValueError(f"unknown threshold_mode {self.threshold_mode!r}")
        if self.approx_mode not in ("exact", "gaussian"):
            raise ValueError(f"unknown approx_mode {self.approx_mode!r}")
        if self.cooperative_l < 1:
            raise ValueError(f"cooperative_l must be >= 1, got {self.cooperative_l}")


@dataclass(frozen=True)
class DetectionProbabilities:
    p_md: float
    p_fa: float

    def __post_init__(self):
        if not (0.0 <= self.p_md <= 1.0 and 0.0 <= self.p_fa <= 1.0):
            raise ValueError(f"probabilities out of range: {self}")


def regularized_upper_gamma(nu: int, x) -> float:
    """Gamma(nu, x) / Gamma(nu); equals 1 at x = 0, decreasing in x."""
    if nu < 1:
        raise ValueError(f"nu must be >= 1, got {nu}")
    if np.any(np.asarray(x) < 0):
        raise ValueError("x must be nonnegative")
    return special.gammaincc(nu, x)


def marcum_q(nu: int, a: float, b: float) -> float:
    """Generalized Marcum Q-function Q_nu(a, b).

    Evaluated through the noncentral chi-square survival function:
    Q_nu(a, b) = Pr[X > b^2] with X ~ ncx2(2*nu, a^2).
    """
    if a < 0 or b < 0:
        raise ValueError("a and b must be nonnegative")
    if nu < 1:
        raise ValueError(f"nu must be >= 1, got {nu}")
    if b == 0:
        return 1.0
    if a == 0:
        return float(special.gammaincc(nu, b * b / 2.0))
    q = float(stats.ncx2.sf(b * b, 2 * nu, a * a))
    if not np.isfinite(q):
        raise NumericsError(f"marcum_q({nu}, {a}, {b}) did not converge")
    return min(max(q, 0.0), 1.0)


def _gauss_h0_moments(nu):
    return 2.0 * nu, math.sqrt(4.0 * nu)


def _gauss_h1_moments(nu, lam):
    lam = np.asarray(lam, dtype=float)
    return 2.0 * nu * (1.0 + lam), np.sqrt(4.0 * nu * (1.0 + 2.0 * lam))


def pfa_from_threshold(cfg: DetectorConfig, tau):
    """False alarm probability at threshold tau (noise-only hypothesis)."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be nonnegative")
    if cfg.approx_mode == "exact":
        out = special.gammaincc(cfg.nu, tau / 2.0)
    else:
        mu, sig = _gauss_h0_moments(cfg.nu)
        out = special.ndtr((mu - tau) / sig)
    return out if out.ndim else float(out)


def pmd_instantaneous(cfg: DetectorConfig, lam, tau):
    """Miss probability at instantaneous per-sample SNR lam and threshold tau."""
    lam = np.asarray(lam, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if np.any(lam < 0) or np.any(tau < 0):
        raise ValueError("lam and tau must be nonnegative")
    if cfg.approx_mode == "exact":
        # 1 - Q_nu(sqrt(2 nu lam), sqrt(tau)) = ncx2 cdf at tau
        lam_b, tau_b = np.broadcast_arrays(lam, tau)
        out = np.empty(lam_b.shape, dtype=float)
        zero = lam_b == 0
        if np.any(zero):
            out[zero] = special.gammainc(cfg.nu, tau_b[zero] / 2.0)
        if np.any(~zero):
            out[~zero] = stats.ncx2.cdf(tau_b[~zero], 2 * cfg.nu, 2 * cfg.nu * lam_b[~zero])
        if not (lam.ndim or tau.ndim):
            out = out.reshape(())
    else:
        mu, sig = _gauss_h1_moments(cfg.nu, lam)
        out = special.ndtr((tau - mu) / sig)
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


def exponential_pdf(mean: float):
    """Density of an exponential SNR (Rayleigh-faded amplitude)."""
    if mean <= 0:
        raise ValueError("mean must be positive")

    def pdf(lam):
        lam = np.asarray(lam, dtype=float)
        return np.exp(-lam / mean) / mean

    return pdf


def pmd_average(cfg: DetectorConfig, pdf, upper: float, tau: float) -> float:
    """Miss probability averaged over an SNR density on [0, upper]."""
    if tau == 0:
        return 0.0
    val, err = integrate.quad(
        lambda lam: pmd_instantaneous(cfg, lam, tau) * pdf(lam),
        0.0,
        upper,
        epsrel=QUAD_REL_TOL,
        epsabs=1e-12,
        limit=200,
    )
    if not np.isfinite(val):
        raise NumericsError("average miss-probability quadrature failed")
    return min(max(val, 0.0), 1.0)


def pmd_average_lognormal(cfg: DetectorConfig, mu_db: float, sigma_db: float, tau: float) -> float:
    """Miss probability averaged over lognormal shadowing, integrated in the
    dB domain where the density is Gaussian (the linear-scale tail is too
    heavy for direct quadrature)."""
    if sigma_db <= 0:
        raise ValueError("sigma_db must be positive")
    if tau == 0:
        return 0.0
    norm = 1.0 / math.sqrt(2.0 * math.pi)

    def integrand(z):
        lam = 10.0 ** ((mu_db + sigma_db * z) / 10.0)
        return pmd_instantaneous(cfg, lam, tau) * norm * math.exp(-0.5 * z * z)

    val, _ = integrate.quad(integrand, -10.0, 10.0, epsrel=QUAD_REL_TOL, epsabs=1e-12, limit=200)
    if not np.isfinite(val):
        raise NumericsError("lognormal miss-probability quadrature failed")
    return min(max(val, 0.0), 1.0)


def threshold_fixed_lognormal(cfg: DetectorConfig, mu_db: float, sigma_db: float) -> float:
    """Fixed threshold meeting the miss target under lognormal shadowing."""
    return _invert_monotone_pmd(
        lambda tau: pmd_average_lognormal(cfg, mu_db, sigma_db, tau),
        cfg.pmd_target,
        2.0 * cfg.nu,
    )


def pmd_average_rayleigh(cfg: DetectorConfig, lambda_bar: float, tau: float) -> float:
    """Miss probability averaged over Rayleigh fading (exponential SNR)."""
    if lambda_bar <= 0:
        raise ValueError("lambda_bar must be positive")
    return pmd_average(cfg, exponential_pdf(lambda_bar), SNR_TAIL_FACTOR * lambda_bar, tau)


def _invert_monotone_pmd(pmd_of_tau, target: float, tau_hint: float) -> float:
    """Bisect the increasing map tau -> pmd for pmd(tau) = target.

    Brackets by exponential growth from tau_hint, then bisects until the
    probability residual is below INVERT_PROB_TOL.
    """
    lo, lo_val = 0.0, 0.0
    hi = max(tau_hint, 1.0)
    hi_val = pmd_of_tau(hi)
    grow = 0
    while hi_val < target:
        lo, lo_val = hi, hi_val
        hi *= 2.0
        hi_val = pmd_of_tau(hi)
        grow += 1
        if grow > 60:
            raise NumericsError(f"failed to bracket threshold for target {target}")
    for _ in range(INVERT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        mid_val = pmd_of_tau(mid)
        if abs(mid_val - target) <= INVERT_PROB_TOL:
            return mid
        if mid_val < target:
            lo, lo_val = mid, mid_val
        else:
            hi, hi_val = mid, mid_val
    # Flat plateaus can stall the probability residual; accept the bracket
    # midpoint if it is tight in tau.
    if hi - lo <= 1e-9 * max(hi, 1.0):
        return 0.5 * (lo + hi)
    raise NumericsError(f"threshold bisection did not reach tolerance {INVERT_PROB_TOL}")


def threshold_fixed(cfg: DetectorConfig, lambda_bar: float) -> float:
    """Fixed threshold meeting the miss target averaged over Rayleigh fading."""
    return _invert_monotone_pmd(
        lambda tau: pmd_average_rayleigh(cfg, lambda_bar, tau),
        cfg.pmd_target,
        2.0 * cfg.nu * (1.0 + lambda_bar),
    )


def threshold_fixed_for_density(cfg: DetectorConfig, pdf, upper: float) -> float:
    """Fixed threshold meeting the miss target for an arbitrary SNR density."""
    return _invert_monotone_pmd(
        lambda tau: pmd_average(cfg, pdf, upper, tau),
        cfg.pmd_target,
        2.0 * cfg.nu,
    )


def threshold_adaptive(cfg: DetectorConfig, lam):
    """Threshold meeting the miss target at the instantaneous SNR lam.

    Closed form in Gaussian mode, bisection in exact mode.  Clamped at 0
    when the closed form goes negative (miss probability 0 <= target).
    """
    if cfg.approx_mode == "gaussian":
        lam = np.asarray(lam, dtype=float)
        if np.any(lam < 0):
            raise ValueError("lam must be nonnegative")
        mu, sig = _gauss_h1_moments(cfg.nu, lam)
        tau = mu + sig * special.ndtri(cfg.pmd_target)
        tau = np.clip(tau, 0.0, None)
        return tau if tau.ndim else float(tau)
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(lam_arr < 0):
        raise ValueError("lam must be nonnegative")
    taus = np.array(
        [
            _invert_monotone_pmd(
                lambda tau, l=l: pmd_instantaneous(cfg, l, tau),
                cfg.pmd_target,
                2.0 * cfg.nu * (1.0 + l),
            )
            for l in lam_arr
        ]
    )
    return taus if np.ndim(lam) else float(taus[0])


def threshold_mismatched(
    cfg: DetectorConfig,
    lambda_hat: float,
    nmse: float,
    lambda_bar: float,
    conditional_pdf,
) -> float:
    """Threshold meeting the miss target in expectation over f(lam | lambda_hat).

    conditional_pdf(lam, lambda_hat, nmse, lambda_bar) supplies the density
    of the true SNR given its mismatched observation.
    """
    if lambda_hat < 0:
        raise ValueError("lambda_hat must be nonnegative")
    if not 0.0 < nmse <= 1.0:
        raise ValueError("nmse must be in (0, 1]")
    rho_sq = 1.0 - nmse
    # Integrate over the amplitude u = sqrt(lam): the conditional density is a
    # Gaussian-shaped ridge centered at rho*sqrt(lambda_hat) with width ~
    # sqrt(lambda_bar*nmse), which adaptive quadrature on lam misses when the
    # ridge is narrow.
    center = math.sqrt(rho_sq * lambda_hat)
    width = math.sqrt(lambda_bar * nmse)
    u_lo = max(0.0, center - 12.0 * width)
    u_hi = center + 12.0 * width

    def expected_pmd(tau):
        if tau == 0:
            return 0.0
        val, _ = integrate.quad(
            lambda u: pmd_instantaneous(cfg, u * u, tau)
            * conditional_pdf(u * u, lambda_hat, nmse, lambda_bar)
            * 2.0
            * u,
            u_lo,
            u_hi,
            epsrel=QUAD_REL_TOL,
            epsabs=1e-12,
            limit=200,
        )
        return min(max(val, 0.0), 1.0)

    return _invert_monotone_pmd(
        expected_pmd, cfg.pmd_target, 2.0 * cfg.nu * (1.0 + rho_sq * lambda_hat + lambda_bar)
    )


def fusion_or(p: DetectionProbabilities, L: int) -> DetectionProbabilities:
    """OR-rule hard combining of L independent detectors."""
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    return DetectionProbabilities(p_md=p.p_md**L, p_fa=1.0 - (1.0 - p.p_fa) ** L)


def threshold_cooperative(cfg: DetectorConfig, lambda_bar: float, L: int) -> float:
    """Common per-branch threshold such that the fused miss rate hits the target."""
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    branch_cfg = DetectorConfig(
        nu=cfg.nu,
        pmd_target=cfg.pmd_target ** (1.0 / L),
        threshold_mode="fixed",
        approx_mode=cfg.approx_mode,
    )
    return threshold_fixed(branch_cfg, lambda_bar)


def simulate_decision_statistic(cfg: DetectorConfig, lam: float, rng: np.random.Generator) -> float:
    """One draw of the energy statistic (chi-square family, 2*nu dof)."""
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    if lam == 0:
        return float(rng.chisquare(2 * cfg.nu))
    return float(rng.noncentral_chisquare(2 * cfg.nu, 2 * cfg.nu * lam))


def average_pfa_adaptive(cfg: DetectorConfig, lambda_bar: float) -> float:
    """False-alarm probability of the SNR-adaptive threshold, averaged over fading."""
    pdf = exponential_pdf(lambda_bar)
    val, _ = integrate.quad(
        lambda lam: pfa_from_threshold(cfg, threshold_adaptive(cfg, lam)) * pdf(lam),
        0.0,
        SNR_TAIL_FACTOR * lambda_bar,
        epsrel=QUAD_REL_TOL,
        epsabs=1e-12,
        limit=200,
    )
    return min(max(val, 0.0), 1.0)


def roc_curve(mode: str, cfg: DetectorConfig, lambda_bar: float, target_grid):
    """ROC operating points (p_fa, p_md_target) for fixed or adaptive thresholds."""
    grid = list(target_grid)
    if not grid or any(not 0.0 < t < 1.0 for t in grid):
        raise ValueError("target grid entries must lie in (0, 1)")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("target grid must be strictly increasing")
    points = []
    for target in grid:
        cfg_t = DetectorConfig(
            nu=cfg.nu,
            pmd_target=target,
            threshold_mode=cfg.threshold_mode,
            approx_mode=cfg.approx_mode,
        )
        if mode == "fixed":
            tau = threshold_fixed(cfg_t, lambda_bar)
            points.append((float(pfa_from_threshold(cfg_t, tau)), target))
        elif mode == "adaptive":
            points.append((average_pfa_adaptive(cfg_t, lambda_bar), target))
        else:
            raise ValueError(f"unknown ROC mode {mode!r}")
    return points
