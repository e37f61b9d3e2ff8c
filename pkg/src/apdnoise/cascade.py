"""Cascade-network noise factors and their staircase equivalence.

A network is an input noise power followed by stages, each with a power gain
and internal/external noise powers (any consistent units; only ratios enter
the formulas).  The total noise factor used here is the product of per-stage
factors, which is exactly what the staircase excess noise factor obeys.  The
classical Friis combination is provided as a contrast baseline only and is
never used in ENF computations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidNetworkError, NoiseModelError
from .model import StaircaseSpec, staircase_enf, step_internal_noise


@dataclass(frozen=True)
class CascadeStage:
    """One amplifier stage: power gain plus internal and externally added
    noise powers (both referred to the stage output)."""

    power_gain: float
    internal_noise: float = 0.0
    external_noise: float = 0.0

    def __post_init__(self):
        if not self.power_gain > 0.0:
            raise InvalidNetworkError(
                f"power_gain = {self.power_gain!r} must be positive"
            )
        if not self.internal_noise >= 0.0:
            raise InvalidNetworkError(
                f"internal_noise = {self.internal_noise!r} must be non-negative"
            )
        if not self.external_noise >= 0.0:
            raise InvalidNetworkError(
                f"external_noise = {self.external_noise!r} must be non-negative"
            )


@dataclass(frozen=True)
class CascadeNetwork:
    """Input noise power followed by an ordered list of stages."""

    input_noise: float
    stages: tuple[CascadeStage, ...]

    def __post_init__(self):
        stages = tuple(self.stages)
        object.__setattr__(self, "stages", stages)
        if not self.input_noise > 0.0:
            raise InvalidNetworkError(
                f"input_noise = {self.input_noise!r} must be positive"
            )
        if not stages:
            raise InvalidNetworkError("network needs at least one stage")


def _check_stage_index(net: CascadeNetwork, stage: int) -> int:
    if not 1 <= stage <= len(net.stages):
        raise IndexError(f"stage {stage} out of range 1..{len(net.stages)}")
    return int(stage)


def _referred_noise(net: CascadeNetwork, x: int) -> float:
    """Noise power at the output of stage x excluding stage x's own noise:
    the input noise and every earlier stage's noise, each amplified through
    all gains up to and including stage x."""
    denom = net.input_noise * math.prod(s.power_gain for s in net.stages[:x])
    for k in range(x - 1):
        tail = math.prod(s.power_gain for s in net.stages[k + 1:x])
        denom += (net.stages[k].internal_noise + net.stages[k].external_noise) * tail
    return denom


def stage_input_noise(net: CascadeNetwork, stage: int) -> float:
    """Total noise power at the input of the given 1-based stage (all
    upstream noise referred to that point)."""
    x = _check_stage_index(net, stage)
    return _referred_noise(net, x) / net.stages[x - 1].power_gain


def bangera_stage_factor(net: CascadeNetwork, stage: int) -> float:
    """Bangera noise factor of one stage.

    F_x = 1 + (N_int + N_ext) / D_x, where D_x amplifies the input noise and
    every earlier stage's noise through all gains up to stage x.  With all
    external noises zero this reduces to 1 + the stage's internal-noise
    component.
    """
    x = _check_stage_index(net, stage)
    s = net.stages[x - 1]
    denom = _referred_noise(net, x)
    factor = 1.0 + (s.internal_noise + s.external_noise) / denom
    # Equivalent form through the stage input noise N_i(x) = D_x / G_x; the
    # two evaluations must agree.
    n_in_gain = stage_input_noise(net, x) * s.power_gain
    split = 1.0 + s.internal_noise / n_in_gain + s.external_noise / n_in_gain
    assert math.isclose(factor, split, rel_tol=1e-12, abs_tol=1e-12)
    return factor


def bangera_total(net: CascadeNetwork) -> float:
    """Bangera total noise factor: the product of all stage factors."""
    return math.prod(
        bangera_stage_factor(net, x) for x in range(1, len(net.stages) + 1)
    )


def friis_total(stage_factors, stage_power_gains) -> float:
    """Classical Friis cascade combination F_1 + sum_k (F_k - 1)/prod_{j<k} G_j.

    Contrast baseline only: lets callers quantify how far the power-gain
    weighted combination falls from the product rule for a given network.
    """
    factors = [float(f) for f in stage_factors]
    gains = [float(g) for g in stage_power_gains]
    if len(factors) != len(gains):
        raise NoiseModelError(
            f"{len(factors)} stage factors vs {len(gains)} power gains"
        )
    if not factors:
        raise NoiseModelError("need at least one stage")
    for i, f in enumerate(factors):
        if not f >= 1.0:
            raise NoiseModelError(f"stage_factors[{i}] = {f!r} must be >= 1")
    for i, g in enumerate(gains):
        if not g > 0.0:
            raise NoiseModelError(f"stage_power_gains[{i}] = {g!r} must be positive")

    total = factors[0]
    g_accum = 1.0
    for k in range(1, len(factors)):
        g_accum *= gains[k - 1]
        total += (factors[k] - 1.0) / g_accum
    return total


def staircase_to_cascade_equivalence(spec: StaircaseSpec) -> tuple[float, float]:
    """Product of per-step factors 1 + var(m_x)/<m_x>^2 next to the staircase
    ENF.  The two must agree for every valid spec; returning both makes the
    agreement checkable."""
    product = math.prod(1.0 + step_internal_noise(p) for p in spec.step_probs)
    return product, staircase_enf(spec).total_enf
