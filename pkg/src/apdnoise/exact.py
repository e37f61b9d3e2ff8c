"""Exact total-gain distributions by enumeration of the joint layer outcomes.

Ground truth for the closed forms in `model`: the layer-by-layer fold below
keeps the complete probability mass function (outcomes with equal total gain
are merged), so its moments are exact up to float rounding and independent of
any product formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import StateSpaceLimitError
from .model import DeviceSpec, GainMoments, IonizationSpectrum

# Default cap on the joint outcome count prod_x (m_x + 1); enumeration raises
# rather than truncating when a device would exceed it.
DEFAULT_OUTCOME_CAP = 10_000_000


@dataclass(frozen=True)
class GainDistribution:
    """Exact PMF of the total gain.

    Keys of `probs` are the integer gain in units of m0 (the product of the
    per-layer factors 1 + X_x); multiply by m0 for physical gain values.
    Integer keys keep the aggregation of equal-gain outcomes exact.
    """

    probs: dict[int, float]
    m0: float = 1.0

    def entries(self) -> dict[float, float]:
        """PMF keyed by physical gain value (integer key times m0)."""
        return {k * self.m0: v for k, v in self.probs.items()}

    def support(self) -> tuple[int, ...]:
        """Sorted integer gain values (units of m0) with nonzero mass."""
        return tuple(self.probs)


def enumerate_distribution(
    device: DeviceSpec, max_outcomes: int = DEFAULT_OUTCOME_CAP
) -> GainDistribution:
    """Exact distribution of m0 * prod_x (1 + X_x) over all joint outcomes."""
    required = math.prod(layer.max_secondaries + 1 for layer in device.layers)
    if required > max_outcomes:
        raise StateSpaceLimitError(required, max_outcomes)

    dist = {1: 1.0}
    for layer in device.layers:
        factors = [(1, 1.0 - sum(layer.probs))]
        factors += [(i + 2, p) for i, p in enumerate(layer.probs)]
        folded: dict[int, float] = {}
        # Sorted iteration fixes the accumulation order of merged outcomes.
        for gain, pg in sorted(dist.items()):
            for f, pf in factors:
                if pf <= 0.0:
                    continue
                key = gain * f
                folded[key] = folded.get(key, 0.0) + pg * pf
        dist = folded
    return GainDistribution(probs=dict(sorted(dist.items())), m0=device.m0)


def distribution_moments(dist: GainDistribution) -> GainMoments:
    """Mean and mean square of the gain, directly from the PMF."""
    mean = dist.m0 * math.fsum(k * p for k, p in dist.probs.items())
    mean_square = dist.m0 ** 2 * math.fsum(k * k * p for k, p in dist.probs.items())
    return GainMoments.from_mean_square(mean, mean_square)


def exact_enf(device: DeviceSpec, max_outcomes: int = DEFAULT_OUTCOME_CAP) -> float:
    """<m^2>/<m>^2 from the exact distribution; the reference value the
    closed-form `model.device_enf` must reproduce."""
    m = distribution_moments(enumerate_distribution(device, max_outcomes))
    return m.mean_square / (m.mean * m.mean)


def random_device(rng, max_layers: int = 6, max_secondaries: int = 4,
                  m0: float = 1.0) -> DeviceSpec:
    """Random device for equivalence testing.

    Per-slot probabilities are drawn uniformly and divided by (sum + 1e-12)
    whenever the sum exceeds 1, so every generated spectrum is valid.  `rng`
    is a numpy Generator; seed it at the call site for reproducibility.
    """
    layers = []
    for _ in range(int(rng.integers(1, max_layers + 1))):
        probs = rng.random(int(rng.integers(1, max_secondaries + 1)))
        total = float(probs.sum())
        if total > 1.0:
            probs = probs / (total + 1e-12)
        layers.append(IonizationSpectrum(tuple(float(p) for p in probs)))
    return DeviceSpec(tuple(layers), m0)
