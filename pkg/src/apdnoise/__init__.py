"""Stochastic gain-noise model for multilayer graded-bandgap and staircase
avalanche photodiodes: closed-form mean gain and excess noise factors, exact
enumeration of gain distributions, seeded Monte Carlo estimates, and
cascade-network noise factors with a Friis contrast baseline.
"""

from .cascade import (
    CascadeNetwork,
    CascadeStage,
    bangera_stage_factor,
    bangera_total,
    friis_total,
    stage_input_noise,
    staircase_to_cascade_equivalence,
)
from .errors import (
    InvalidNetworkError,
    InvalidProbabilityError,
    InvalidSpectrumError,
    NoiseModelError,
    StateSpaceLimitError,
)
from .exact import (
    GainDistribution,
    distribution_moments,
    enumerate_distribution,
    exact_enf,
    random_device,
)
from .model import (
    ELEMENTARY_CHARGE,
    DeviceSpec,
    GainMoments,
    IonizationSpectrum,
    NoiseReport,
    StaircaseSpec,
    device_enf,
    device_mean_gain,
    equal_p_enf,
    layer_enf,
    layer_moments,
    noise_spectral_intensity,
    probability_from_gain,
    staircase_enf,
    staircase_mean_gain,
    step_enf,
    step_internal_noise,
)
from .montecarlo import McConfig, McEstimate, estimate, sample_gain, sample_gains

__version__ = "0.1.0"

__all__ = [
    "ELEMENTARY_CHARGE",
    "CascadeNetwork",
    "CascadeStage",
    "DeviceSpec",
    "GainDistribution",
    "GainMoments",
    "InvalidNetworkError",
    "InvalidProbabilityError",
    "InvalidSpectrumError",
    "IonizationSpectrum",
    "McConfig",
    "McEstimate",
    "NoiseModelError",
    "NoiseReport",
    "StaircaseSpec",
    "StateSpaceLimitError",
    "bangera_stage_factor",
    "bangera_total",
    "device_enf",
    "device_mean_gain",
    "distribution_moments",
    "enumerate_distribution",
    "equal_p_enf",
    "estimate",
    "exact_enf",
    "friis_total",
    "layer_enf",
    "layer_moments",
    "noise_spectral_intensity",
    "probability_from_gain",
    "random_device",
    "sample_gain",
    "sample_gains",
    "stage_input_noise",
    "staircase_enf",
    "staircase_mean_gain",
    "staircase_to_cascade_equivalence",
    "step_enf",
    "step_internal_noise",
]
