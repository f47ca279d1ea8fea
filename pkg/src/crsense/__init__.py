"""Cognitive-radio spectrum sensing simulator with CSI-adaptive thresholds."""

from .channel import FadingSpec, GainField, conditional_pdf, draw_mismatched_pair
from .config import ConfigError, ScenarioConfig, default_config, load_config, parse_config
from .detection import (
    DetectionProbabilities,
    DetectorConfig,
    fusion_or,
    marcum_q,
    pfa_from_threshold,
    pmd_average_rayleigh,
    pmd_instantaneous,
    regularized_upper_gamma,
    roc_curve,
    threshold_adaptive,
    threshold_cooperative,
    threshold_fixed,
    threshold_mismatched,
)
from .simulator import Metrics, run_episode, run_monte_carlo
from .traffic import MarkovChainParams, stationary_idle_prob

__version__ = "0.1.0"
