"""Seeded Monte Carlo sampling of the gain process.

Each trial draws one secondary count per layer (inverse CDF over the layer
spectrum with the no-ionization mass first) and multiplies the per-layer
factors 1 + X_x.  This samples the same one-factor-per-layer process the
closed forms describe, not a per-carrier branching cascade.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoiseModelError
from .model import DeviceSpec, GainMoments


@dataclass(frozen=True)
class McConfig:
    """Trial count, master seed, and number of independent sample streams."""

    trials: int
    seed: int
    partitions: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise NoiseModelError(f"trials = {self.trials} must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise NoiseModelError(f"seed = {self.seed} must fit in 64 unsigned bits")
        if not 1 <= self.partitions <= self.trials:
            raise NoiseModelError(
                f"partitions = {self.partitions} must be in [1, trials]"
            )


@dataclass(frozen=True)
class McEstimate:
    """Sample gain moments with a plug-in ENF and its standard errors."""

    moments: GainMoments
    enf_estimate: float
    std_error_mean: float
    std_error_enf: float
    trials: int


def sample_gains(device: DeviceSpec, rng: np.random.Generator,
                 size: int) -> np.ndarray:
    """Vectorized gain samples: one categorical draw per layer per trial."""
    gains = np.full(size, float(device.m0))
    for layer in device.layers:
        cdf = np.cumsum([1.0 - sum(layer.probs), *layer.probs])
        x = np.searchsorted(cdf, rng.random(size), side="right")
        np.minimum(x, layer.max_secondaries, out=x)  # rounding guard at u ~ 1
        gains *= x + 1
    return gains


def sample_gain(device: DeviceSpec, rng: np.random.Generator) -> float:
    """One draw of the total gain m0 * prod_x (1 + X_x)."""
    return float(sample_gains(device, rng, 1)[0])


def estimate(device: DeviceSpec, cfg: McConfig) -> McEstimate:
    """Sample moments, plug-in ENF, and delta-method standard errors.

    Partition k draws from substream k of SeedSequence(cfg.seed), and the
    per-partition power sums are merged in partition order, so a fixed
    (device, seed, trials, partitions) reproduces the estimate bit for bit
    whether partitions run sequentially or concurrently.
    """
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.partitions)
    s1 = s2 = s3 = s4 = 0.0
    for size, stream in zip(_partition_sizes(cfg.trials, cfg.partitions), streams):
        g = sample_gains(device, np.random.default_rng(stream), size)
        g2 = g * g
        s1 += float(g.sum())
        s2 += float(g2.sum())
        s3 += float((g2 * g).sum())
        s4 += float((g2 * g2).sum())

    t = float(cfg.trials)
    m1 = s1 / t
    m2 = s2 / t
    m3 = s3 / t
    m4 = s4 / t
    enf = m2 / (m1 * m1)

    # Delta method for f(mu1, mu2) = mu2 / mu1^2 applied to the sample means
    # of (g, g^2):
    #   var(f_hat) ~ [d1^2 var(g) + 2 d1 d2 cov(g, g^2) + d2^2 var(g^2)] / T
    # with d1 = df/dmu1 = -2 mu2 / mu1^3 and d2 = df/dmu2 = 1 / mu1^2, and
    # plug-in central moments var(g) = m2 - m1^2, cov(g, g^2) = m3 - m1 m2,
    # var(g^2) = m4 - m2^2.
    var_g = max(m2 - m1 * m1, 0.0)
    cov_g_g2 = m3 - m1 * m2
    var_g2 = max(m4 - m2 * m2, 0.0)
    d1 = -2.0 * m2 / (m1 * m1 * m1)
    d2 = 1.0 / (m1 * m1)
    var_enf = (d1 * d1 * var_g + 2.0 * d1 * d2 * cov_g_g2 + d2 * d2 * var_g2) / t

    return McEstimate(
        moments=GainMoments(mean=m1, mean_square=m2, variance=var_g),
        enf_estimate=enf,
        std_error_mean=math.sqrt(var_g / t),
        std_error_enf=math.sqrt(max(var_enf, 0.0)),
        trials=cfg.trials,
    )


def _partition_sizes(trials: int, partitions: int) -> list[int]:
    base, extra = divmod(trials, partitions)
    return [base + 1 if k < extra else base for k in range(partitions)]
