"""Per-slot SNR field generation and the mismatched-CSI observation model.

Fields are (M, N) arrays of linear instantaneous SNR: one row per secondary
user, one column per channel.  Block fading: every slot is an independent
draw; the lognormal generator adds first-order spatial correlation along
the user axis only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

__all__ = [
    "FadingSpec",
    "GainField",
    "db_to_linear",
    "draw_rayleigh_field",
    "draw_correlated_lognormal_field",
    "draw_field",
    "draw_mismatched_pair",
    "draw_mismatched_field",
    "conditional_pdf",
    "lognormal_snr_pdf",
]


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


@dataclass(frozen=True)
class FadingSpec:
    """Marginal fading model for one link class (PU-to-SU or SU-to-SU)."""

    kind: str  # "rayleigh" | "lognormal"
    mean_snr_db: float = 0.0  # rayleigh: mean of the exponential SNR, in dB
    mu_db: float = 0.0  # lognormal: dB-scale mean
    sigma_db: float = 1.0  # lognormal: dB spread
    rho: float = 0.0  # lognormal: adjacent-user shadowing correlation

    def __post_init__(self):
        if self.kind not in ("rayleigh", "lognormal"):
            raise ValueError(f"unknown fading kind {self.kind!r}")
        if self.kind == "lognormal":
            if self.sigma_db <= 0:
                raise ValueError("sigma_db must be positive")
            if not 0.0 <= self.rho < 1.0:
                raise ValueError("rho must be in [0, 1)")

    @property
    def mean_linear(self) -> float:
        """Mean linear SNR of the marginal distribution."""
        if self.kind == "rayleigh":
            return float(db_to_linear(self.mean_snr_db))
        ln10_10 = np.log(10.0) / 10.0
        return float(np.exp(self.mu_db * ln10_10 + 0.5 * (self.sigma_db * ln10_10) ** 2))


@dataclass
class GainField:
    """Instantaneous SNRs for one slot: PU-to-SU (lam), SU-to-SU (gamma)."""

    lam: np.ndarray
    gamma: np.ndarray
    lam_hat: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.lam.shape != self.gamma.shape:
            raise ValueError("lam and gamma shapes differ")
        if np.any(self.lam < 0) or np.any(self.gamma < 0):
            raise ValueError("SNR entries must be nonnegative")


def draw_rayleigh_field(mean_snr_linear: float, M: int, N: int, rng: np.random.Generator):
    """i.i.d. exponential SNR entries (Rayleigh-faded amplitudes)."""
    if mean_snr_linear <= 0:
        raise ValueError("mean_snr_linear must be positive")
    return rng.exponential(mean_snr_linear, size=(M, N))


def draw_correlated_lognormal_field(
    mu_db: float, sigma_db: float, rho: float, M: int, N: int, rng: np.random.Generator
):
    """Lognormal SNR with Gudmundson-type correlation rho^|m-m'| across users.

    Realized as an AR(1) pass over the user axis of a standard normal field,
    independently per channel; converted from dB to linear scale.
    """
    if sigma_db <= 0:
        raise ValueError("sigma_db must be positive")
    if not 0.0 <= rho < 1.0:
        raise ValueError("rho must be in [0, 1)")
    z = rng.standard_normal((M, N))
    x = np.empty_like(z)
    x[0] = z[0]
    c = np.sqrt(1.0 - rho * rho)
    for m in range(1, M):
        x[m] = rho * x[m - 1] + c * z[m]
    return db_to_linear(mu_db + sigma_db * x)


def draw_field(spec: FadingSpec, M: int, N: int, rng: np.random.Generator):
    if spec.kind == "rayleigh":
        return draw_rayleigh_field(db_to_linear(spec.mean_snr_db), M, N, rng)
    return draw_correlated_lognormal_field(spec.mu_db, spec.sigma_db, spec.rho, M, N, rng)


def _correlated_exponential(mean: float, nmse: float, shape, rng: np.random.Generator):
    """Jointly draw (lam, lam_hat) from the outdated-estimate Rayleigh model.

    Actual and observed complex amplitudes are jointly circular Gaussian with
    amplitude correlation rho_e, rho_e^2 = 1 - nmse; the squared magnitudes,
    scaled by the mean SNR, give the true and observed SNRs.
    """
    rho = np.sqrt(1.0 - nmse)
    h = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    e = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    h_hat = rho * h + np.sqrt(1.0 - rho * rho) * e
    lam = mean * np.abs(h) ** 2
    lam_hat = mean * np.abs(h_hat) ** 2
    return lam, lam_hat


def draw_mismatched_pair(mean_snr_linear: float, nmse: float, rng: np.random.Generator):
    """One (true SNR, observed SNR) pair; nmse=0 is perfect CSI, 1 independent."""
    if mean_snr_linear <= 0:
        raise ValueError("mean_snr_linear must be positive")
    if not 0.0 <= nmse <= 1.0:
        raise ValueError("nmse must be in [0, 1]")
    if nmse == 0.0:
        lam = rng.exponential(mean_snr_linear)
        return lam, lam
    lam, lam_hat = _correlated_exponential(mean_snr_linear, nmse, (), rng)
    return float(lam), float(lam_hat)


def draw_mismatched_field(mean_snr_linear: float, nmse: float, M: int, N: int, rng):
    """(M, N) field of jointly drawn true and observed SNRs."""
    if nmse == 0.0:
        lam = draw_rayleigh_field(mean_snr_linear, M, N, rng)
        return lam, lam.copy()
    return _correlated_exponential(mean_snr_linear, nmse, (M, N), rng)


def conditional_pdf(lam, lambda_hat: float, nmse: float, mean_snr_linear: float):
    """Density of the true SNR given its mismatched observation.

    Rician-power (noncentral exponential) form; reduces to the unconditional
    exponential density at nmse=1.  Evaluated with the exponentially scaled
    Bessel function for stability at small nmse.
    """
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0) or lambda_hat < 0:
        raise ValueError("SNRs must be nonnegative")
    if not 0.0 < nmse <= 1.0:
        raise ValueError("nmse must be in (0, 1]")
    if mean_snr_linear <= 0:
        raise ValueError("mean_snr_linear must be positive")
    rho_sq = 1.0 - nmse
    c = mean_snr_linear * nmse
    rho = np.sqrt(rho_sq)
    arg = 2.0 * rho * np.sqrt(lam * lambda_hat) / c
    # exp(-(lam + rho^2 lam_hat)/c) * I0(arg) = exp(-(sqrt(lam)-rho sqrt(lam_hat))^2/c) * i0e(arg)
    out = np.exp(-((np.sqrt(lam) - rho * np.sqrt(lambda_hat)) ** 2) / c) * special.i0e(arg) / c
    return out if out.ndim else float(out)


def lognormal_snr_pdf(mu_db: float, sigma_db: float):
    """Density of a lognormal linear SNR specified by dB mean and spread."""
    ln10_10 = np.log(10.0) / 10.0
    mu = mu_db * ln10_10
    sig = sigma_db * ln10_10

    def pdf(lam):
        lam = np.asarray(lam, dtype=float)
        out = np.zeros_like(lam)
        pos = lam > 0
        out = np.where(
            pos,
            np.exp(-((np.log(np.where(pos, lam, 1.0)) - mu) ** 2) / (2.0 * sig * sig))
            / (np.where(pos, lam, 1.0) * sig * np.sqrt(2.0 * np.pi)),
            0.0,
        )
        return out if out.ndim else float(out)

    return pdf
