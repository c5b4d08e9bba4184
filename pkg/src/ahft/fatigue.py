"""Exponential fatigue accumulation: f(t) = 1 - exp(-rate * t).

Fatigue grows from 0 toward 1 as exposure time increases; ``rate`` (per
hour) controls how fast.  The three operations here convert between the
fatigue value observed after some exposure, the underlying rate, and the
fatigue expected after a different exposure.  All durations are in hours.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    FatigueOutOfRange,
    NegativeTime,
    NonPositiveRate,
    NonPositiveTime,
)


@dataclass(frozen=True)
class FatigueCurve:
    """A fatigue-accumulation curve, fully determined by its hourly rate."""

    rate: float

    def __post_init__(self):
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise NonPositiveRate(f"rate must be positive and finite, got {self.rate!r}")

    def at(self, t: float) -> float:
        return fatigue_at(self.rate, t)


def fatigue_at(rate: float, t: float) -> float:
    """Fatigue accumulated after ``t`` hours at the given hourly rate.

    Strictly increasing in both arguments; 0 at t=0; approaches 1 as
    t grows.  Uses expm1 so tiny exposures keep full precision.
    """
    if not (rate > 0 and math.isfinite(rate)):
        raise NonPositiveRate(f"rate must be positive and finite, got {rate!r}")
    if t < 0 or not math.isfinite(t):
        raise NegativeTime(f"t must be a nonnegative finite number of hours, got {t!r}")
    return -math.expm1(-rate * t)


def rate_from_fatigue(f: float, t: float) -> float:
    """Hourly rate that produces fatigue ``f`` after ``t`` hours.

    Exact inverse of :func:`fatigue_at`: rate = -ln(1 - f) / t.  Fatigue
    values of exactly 0 or 1 are rejected (logarithm singularity).
    """
    if not (0.0 < f < 1.0):
        raise FatigueOutOfRange(f"fatigue must lie strictly in (0, 1), got {f!r}")
    if not (t > 0 and math.isfinite(t)):
        raise NonPositiveTime(f"t must be a positive finite number of hours, got {t!r}")
    return -math.log1p(-f) / t


def rescale_fatigue(f_observed: float, t_observed: float, t_target: float) -> float:
    """Fatigue expected after ``t_target`` hours, given an observation.

    Composition of the two conversions above: recover the rate from
    (f_observed, t_observed), then evaluate the curve at t_target.
    """
    return fatigue_at(rate_from_fatigue(f_observed, t_observed), t_target)
