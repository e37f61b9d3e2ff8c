"""Closed-form gain and excess-noise statistics for multilayer graded-bandgap
and staircase avalanche photodiodes.

The device is modelled as a chain of statistically independent multiplication
layers.  A single input electron entering layer x picks up a random number of
secondaries X_x, so the layer contributes one random factor (1 + X_x) to the
total gain; the total gain is the product of these factors (times the
absorption-stage gain m0).  Staircase operation is the Bernoulli special case
where each step generates at most one secondary.

Note this is a one-factor-per-layer process: every electron entering a layer
is multiplied by the same realized factor.  It is not a per-carrier branching
cascade (where each electron would ionize independently), which has the same
mean gain but different second moments.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass

from .errors import InvalidProbabilityError, InvalidSpectrumError, NoiseModelError

# Electron charge in coulombs (exact SI value).
ELEMENTARY_CHARGE = 1.602176634e-19

# Slack allowed when checking that spectrum probabilities sum to at most 1,
# so inputs carrying float rounding noise are not rejected.
PROBABILITY_SUM_SLACK = 1e-12


@dataclass(frozen=True)
class IonizationSpectrum:
    """Ionization spectrum of one multiplication layer.

    probs[i-1] is the probability that one input electron generates exactly i
    secondaries; the remaining mass 1 - sum(probs) is the no-ionization
    probability.  An all-zero list describes a passive layer.
    """

    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if not probs:
            raise InvalidSpectrumError("probs must contain at least one entry")
        for i, p in enumerate(probs):
            if not 0.0 <= p <= 1.0:
                raise InvalidSpectrumError(f"probs[{i}] = {p!r} is outside [0, 1]")
        total = sum(probs)
        if total > 1.0 + PROBABILITY_SUM_SLACK:
            raise InvalidSpectrumError(f"sum(probs) = {total!r} exceeds 1")

    @property
    def max_secondaries(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class DeviceSpec:
    """Ordered multiplication layers plus the absorption-stage gain m0.

    m0 is modelled as noiseless deterministic scaling: it multiplies the mean
    gain by m0 and the mean-square gain by m0**2, leaving every excess noise
    factor unchanged.
    """

    layers: tuple[IonizationSpectrum, ...]
    m0: float = 1.0

    def __post_init__(self):
        layers = tuple(self.layers)
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "m0", float(self.m0))
        if not layers:
            raise InvalidSpectrumError("device needs at least one layer")
        for i, layer in enumerate(layers):
            if not isinstance(layer, IonizationSpectrum):
                raise InvalidSpectrumError(f"layers[{i}] is not an IonizationSpectrum")
        if not (math.isfinite(self.m0) and self.m0 > 0.0):
            raise NoiseModelError(f"m0 = {self.m0!r} must be positive and finite")

    @classmethod
    def from_probs(cls, layer_probs, m0: float = 1.0) -> "DeviceSpec":
        """Build a device from bare probability lists, one list per layer."""
        return cls(tuple(IonizationSpectrum(tuple(p)) for p in layer_probs), m0)


@dataclass(frozen=True)
class StaircaseSpec:
    """Bernoulli step probabilities: step x doubles an input electron with
    probability step_probs[x-1] and passes it through otherwise."""

    step_probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.step_probs)
        object.__setattr__(self, "step_probs", probs)
        if not probs:
            raise InvalidProbabilityError("step_probs must contain at least one entry")
        for i, p in enumerate(probs):
            if not 0.0 <= p <= 1.0:
                raise InvalidProbabilityError(
                    f"step_probs[{i}] = {p!r} is outside [0, 1]"
                )

    @property
    def steps(self) -> int:
        return len(self.step_probs)

    def as_device(self) -> DeviceSpec:
        """Equivalent generalized device built from one-entry spectra."""
        return DeviceSpec(tuple(IonizationSpectrum((p,)) for p in self.step_probs))


@dataclass(frozen=True)
class GainMoments:
    """Mean, mean square, and variance of a gain random variable."""

    mean: float
    mean_square: float
    variance: float

    @classmethod
    def from_mean_square(cls, mean: float, mean_square: float) -> "GainMoments":
        return cls(mean=mean, mean_square=mean_square,
                   variance=mean_square - mean * mean)


@dataclass(frozen=True)
class NoiseReport:
    """Total and per-layer excess noise factors with the gain moments behind
    them; spectral_intensity is filled only when a current is supplied."""

    total_enf: float
    per_layer_enf: tuple[float, ...]
    moments: GainMoments
    spectral_intensity: float | None = None


def layer_moments(spectrum: IonizationSpectrum) -> GainMoments:
    """Moments of the single-layer gain factor 1 + X.

    mean        = 1 + sum_i i * p_i
    mean_square = 1 + sum_i i * (i + 2) * p_i
    """
    mean = 1.0 + sum((i + 1) * p for i, p in enumerate(spectrum.probs))
    mean_square = 1.0 + sum((i + 1) * (i + 3) * p for i, p in enumerate(spectrum.probs))
    return GainMoments.from_mean_square(mean, mean_square)


def layer_enf(spectrum: IonizationSpectrum) -> float:
    """Excess noise factor of one layer: <(1+X)^2> / <1+X>^2."""
    m = layer_moments(spectrum)
    return m.mean_square / (m.mean * m.mean)


def device_mean_gain(device: DeviceSpec) -> float:
    """Mean total gain m0 * prod_x <1 + X_x>."""
    return device.m0 * math.prod(layer_moments(layer).mean for layer in device.layers)


def device_enf(device: DeviceSpec, current: float | None = None) -> NoiseReport:
    """Total excess noise factor as the product of per-layer factors.

    Layer independence makes both <m> and <m^2> factor into per-layer
    products, so the total ENF is the product of per-layer ENFs.  The moments
    carry the m0 scaling; the ENF does not see it.
    """
    per_layer = []
    mean = 1.0
    mean_square = 1.0
    for layer in device.layers:
        m = layer_moments(layer)
        per_layer.append(m.mean_square / (m.mean * m.mean))
        mean *= m.mean
        mean_square *= m.mean_square
    total = math.prod(per_layer)
    mean *= device.m0
    mean_square *= device.m0 * device.m0
    intensity = None
    if current is not None:
        intensity = noise_spectral_intensity(mean_square, current)
    return NoiseReport(
        total_enf=total,
        per_layer_enf=tuple(per_layer),
        moments=GainMoments.from_mean_square(mean, mean_square),
        spectral_intensity=intensity,
    )


def step_enf(p: float) -> float:
    """Excess noise factor of one Bernoulli step: (1 + 3p) / (1 + p)^2."""
    _check_step_probability(p)
    return (1.0 + 3.0 * p) / ((1.0 + p) * (1.0 + p))


def staircase_mean_gain(spec: StaircaseSpec) -> float:
    """Mean staircase gain prod_x (1 + p_x)."""
    return math.prod(1.0 + p for p in spec.step_probs)


def staircase_enf(spec: StaircaseSpec, current: float | None = None) -> NoiseReport:
    """Total staircase excess noise factor prod_x (1 + 3 p_x) / (1 + p_x)^2."""
    per_step = tuple(step_enf(p) for p in spec.step_probs)
    mean = math.prod(1.0 + p for p in spec.step_probs)
    mean_square = math.prod(1.0 + 3.0 * p for p in spec.step_probs)
    intensity = None
    if current is not None:
        intensity = noise_spectral_intensity(mean_square, current)
    return NoiseReport(
        total_enf=math.prod(per_step),
        per_layer_enf=per_step,
        moments=GainMoments.from_mean_square(mean, mean_square),
        spectral_intensity=intensity,
    )


def equal_p_enf(p: float, n: int) -> float:
    """Total ENF of n identical Bernoulli steps: [(1 + 3p) / (1 + p)^2]^n."""
    n = _check_step_count(n)
    return step_enf(p) ** n


def step_internal_noise(p: float) -> float:
    """Internal-noise component of one Bernoulli step: p(1-p)/(1+p)^2.

    Equals var(1+X)/<1+X>^2, so step_enf(p) == 1 + step_internal_noise(p).
    """
    _check_step_probability(p)
    return p * (1.0 - p) / ((1.0 + p) * (1.0 + p))


def noise_spectral_intensity(mean_square_gain: float, current: float) -> float:
    """Shot-noise current spectral intensity 2 q <m^2> I in A^2/Hz.

    `current` is the combined photo plus dark current in amperes.
    """
    if not mean_square_gain >= 1.0:
        raise NoiseModelError(
            f"mean_square_gain = {mean_square_gain!r} must be >= 1"
        )
    if not current >= 0.0:
        raise NoiseModelError(f"current = {current!r} must be non-negative")
    return 2.0 * ELEMENTARY_CHARGE * mean_square_gain * current


def probability_from_gain(target_gain: float, n: int) -> float:
    """Equal-p solution of (1 + p)^n = target_gain, i.e. gain^(1/n) - 1."""
    n = _check_step_count(n)
    if not 1.0 <= target_gain <= 2.0 ** n:
        raise NoiseModelError(
            f"target_gain = {target_gain!r} is outside [1, 2^{n}]"
        )
    p = target_gain ** (1.0 / n) - 1.0
    return min(max(p, 0.0), 1.0)


def _check_step_probability(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise InvalidProbabilityError(f"p = {p!r} is outside [0, 1]")


def _check_step_count(n) -> int:
    try:
        n = operator.index(n)
    except TypeError:
        raise NoiseModelError(f"step count n = {n!r} must be an integer") from None
    if n < 1:
        raise NoiseModelError(f"step count n = {n} must be >= 1")
    return n
