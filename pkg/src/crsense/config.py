"""Scenario configuration and the flat `key = value` config-file format.

Unset keys fall back to the default network scenario: 20 SU pairs, 40
channels, 20 slots, [p01 p11] = [0.2 0.8], nu = 100 samples, PU-to-SU SNR
-10 dB, SU-to-SU and PU-to-PU SNR 10 dB, Rayleigh fading throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .channel import FadingSpec
from .traffic import MarkovChainParams

__all__ = ["ScenarioConfig", "ConfigError", "load_config", "parse_config", "default_config"]

THRESHOLD_MODES = ("fixed", "adaptive", "mismatched", "cooperative", "perfect")
REWARD_MODES = ("bandwidth", "capacity")
APPROX_MODES = ("exact", "gaussian")
SENSING_SIMS = ("bernoulli", "statistic")


class ConfigError(ValueError):
    """Config file failed to parse or violated an invariant."""


@dataclass(frozen=True)
class ScenarioConfig:
    m: int = 20  # SU pairs
    n: int = 40  # channels
    t: int = 20  # slots per episode
    p01: float = 0.2  # busy -> idle
    p11: float = 0.8  # idle -> idle
    nu: int = 100
    pmd_target: float = 0.1
    threshold_mode: str = "fixed"
    reward_mode: str = "bandwidth"
    approx_mode: str = "gaussian"
    bandwidth: float = 1.0
    pu_su: FadingSpec = field(default_factory=lambda: FadingSpec("rayleigh", mean_snr_db=-10.0))
    su_su: FadingSpec = field(default_factory=lambda: FadingSpec("rayleigh", mean_snr_db=10.0))
    pu_pu_snr_db: float = 10.0
    nmse: float = 0.0  # mismatched mode only
    cooperative_l: int = 1  # cooperative mode only
    sensing_sim: str = "bernoulli"
    replications: int = 500
    seed: int = 20130901

    def validate(self) -> "ScenarioConfig":
        for name in ("m", "n", "t", "replications"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.nu < 1:
            raise ConfigError(f"nu must be >= 1, got {self.nu}")
        if not 0.0 < self.pmd_target <= 1.0:
            raise ConfigError(f"pmd_target must be in (0, 1], got {self.pmd_target}")
        for name, value in (("p01", self.p01), ("p11", self.p11)):
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {value}")
        if self.threshold_mode not in THRESHOLD_MODES:
            raise ConfigError(f"threshold_mode must be one of {THRESHOLD_MODES}")
        if self.reward_mode not in REWARD_MODES:
            raise ConfigError(f"reward_mode must be one of {REWARD_MODES}")
        if self.approx_mode not in APPROX_MODES:
            raise ConfigError(f"approx_mode must be one of {APPROX_MODES}")
        if self.sensing_sim not in SENSING_SIMS:
            raise ConfigError(f"sensing_sim must be one of {SENSING_SIMS}")
        if not 0.0 <= self.nmse <= 1.0:
            raise ConfigError(f"nmse must be in [0, 1], got {self.nmse}")
        if self.cooperative_l < 1:
            raise ConfigError(f"cooperative_l must be >= 1, got {self.cooperative_l}")
        if self.bandwidth <= 0:
            raise ConfigError(f"bandwidth must be positive, got {self.bandwidth}")
        if self.threshold_mode == "mismatched" and self.nmse == 0.0:
            raise ConfigError("mismatched mode requires nmse > 0 (use adaptive mode for perfect CSI)")
        return self

    @property
    def chain(self) -> MarkovChainParams:
        return MarkovChainParams(p01=self.p01, p11=self.p11)

    def chains(self):
        return [self.chain] * self.n


def default_config() -> ScenarioConfig:
    return ScenarioConfig().validate()


def _fading_from_keys(prefix: str, keys: dict) -> FadingSpec:
    kind = keys.pop(f"{prefix}.kind", "rayleigh")
    if kind == "rayleigh":
        spec = FadingSpec("rayleigh", mean_snr_db=float(keys.pop(f"{prefix}.mean_snr_db", 0.0)))
    elif kind == "lognormal":
        spec = FadingSpec(
            "lognormal",
            mu_db=float(keys.pop(f"{prefix}.mu_db", 0.0)),
            sigma_db=float(keys.pop(f"{prefix}.sigma_db", 5.0)),
            rho=float(keys.pop(f"{prefix}.rho", 0.0)),
        )
    else:
        raise ConfigError(f"{prefix}.kind must be rayleigh or lognormal, got {kind!r}")
    return spec


_SCALAR_KEYS = {
    "m": int,
    "n": int,
    "t": int,
    "p01": float,
    "p11": float,
    "nu": int,
    "pmd_target": float,
    "threshold_mode": str,
    "reward_mode": str,
    "approx_mode": str,
    "bandwidth": float,
    "pu_pu_snr_db": float,
    "nmse": float,
    "cooperative_l": int,
    "sensing_sim": str,
    "replications": int,
    "seed": int,
}

_FADING_KEYS = {
    f"fading.{link}.{k}"
    for link in ("pu_su", "su_su")
    for k in ("kind", "mean_snr_db", "mu_db", "sigma_db", "rho")
}


def parse_config(text: str) -> ScenarioConfig:
    """Parse `key = value` lines into a validated scenario config."""
    raw: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {line.strip()!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if key not in _SCALAR_KEYS and key not in _FADING_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        raw[key] = (lineno, value)

    overrides = {}
    for key, caster in _SCALAR_KEYS.items():
        if key in raw:
            lineno, value = raw.pop(key)
            try:
                overrides[key] = caster(value)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from None

    fading_raw = {key: value for key, (_, value) in raw.items()}
    try:
        for link, attr in (("pu_su", "pu_su"), ("su_su", "su_su")):
            prefix = f"fading.{link}"
            sub = {k: v for k, v in fading_raw.items() if k.startswith(prefix + ".")}
            if not sub:
                continue
            overrides[attr] = _fading_from_keys(prefix, sub)
            if sub:
                extra = ", ".join(sorted(sub))
                raise ConfigError(f"keys not applicable for {prefix}.kind: {extra}")
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None

    try:
        cfg = replace(ScenarioConfig(), **overrides)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    return cfg.validate()


def load_config(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
