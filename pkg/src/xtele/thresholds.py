"""Concurrence thresholds above which each pipeline beats the classical 2/3.

Flags are ``True`` (quantum), ``False`` (classical) or ``None`` when ``c14``
lies within ``GUARD`` of the threshold and the comparison is meaningless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channels import XState, x_concurrence
from .errors import ExtractionImpossibleError

GUARD = 1e-12


@dataclass(frozen=True)
class ThresholdReport:
    c14: float
    c_x_th: float
    c_x_use_th: float
    c_x_use_0_th: float
    quantum_plain: bool | None
    quantum_use_total: bool | None
    quantum_use_filtered: bool | None


def exceeds(value: float, threshold: float, guard: float = GUARD) -> bool | None:
    """Guarded ``value > threshold``; ``None`` inside the guard band."""
    if abs(value - threshold) <= guard:
        return None
    return value > threshold


def c_x_threshold(x: XState) -> float:
    return (math.sqrt(x.r22) - math.sqrt(x.r33)) ** 2


def c_x_use_threshold(x: XState) -> float:
    return c_x_threshold(x) + (math.sqrt(x.r44 / x.r11) - 1.0) * (x.r22 + x.r33)


def c_x_use_0_threshold(x: XState) -> float:
    return (math.sqrt(x.r11 * x.r22) - math.sqrt(x.r33 * x.r44)) ** 2 / math.sqrt(x.r11 * x.r44)


def compute_thresholds(x: XState) -> ThresholdReport:
    if not x.r11 > 0.0:
        raise ExtractionImpossibleError("USE thresholds undefined for r11 = 0")
    c14 = x_concurrence(x).c14
    cx, cu, c0 = c_x_threshold(x), c_x_use_threshold(x), c_x_use_0_threshold(x)
    return ThresholdReport(c14, cx, cu, c0, exceeds(c14, cx), exceeds(c14, cu), exceeds(c14, c0))


def threshold_inversion_region(x: XState) -> bool:
    """Whether filtering after USE needs less entanglement than plain teleportation.

    Holds exactly when ``r33 < r22 sqrt(r11/r44)``.
    """
    if not x.r44 > 0.0:
        return False
    return x.r33 < x.r22 * math.sqrt(x.r11 / x.r44)
