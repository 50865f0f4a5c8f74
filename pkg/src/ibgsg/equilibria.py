"""Equilibria of the fault-on sine-form model.

Roots of ``p_const + sine_amp * sin(delta + sine_phase) = 0`` within one
period: the stable point sits where the restoring slope is negative, the two
adjacent unstable points bracket it exactly 2*pi apart.  Closed-form roots are
cross-checked against a bisection root-finder at construction time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EquilibriumVerificationError
from .reduced_model import ModelCoeffs

_VERIFY_TOL = 1e-9


@dataclass(frozen=True)
class EquilibriumSet:
    """Stable point and its two adjacent unstable neighbours (rad).

    When no stable point exists the angles are NaN, ``exists`` is False and
    ``margin = |sine_amp| - |p_const|`` is <= 0.
    """

    sep: float
    uep_left: float
    uep_right: float
    exists: bool
    margin: float


def _residual(coeffs: ModelCoeffs, delta: float) -> float:
    return coeffs.p_const + coeffs.sine_amp * math.sin(delta + coeffs.sine_phase)


def _bisect(f, lo: float, hi: float, iters: int = 200) -> float:
    flo = f(lo)
    if flo == 0.0:
        return lo
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (flo > 0.0) == (fmid > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
        if hi - lo <= 4.0 * math.ulp(max(abs(lo), abs(hi))):
            break
    return 0.5 * (lo + hi)


def find_equilibria(coeffs: ModelCoeffs) -> EquilibriumSet:
    """Closed-form equilibria, bisection-verified.

    Raises :class:`EquilibriumVerificationError` if the closed form and the
    independent bisection disagree by more than 1e-9 rad.
    """
    a, b, phi = coeffs.p_const, coeffs.sine_amp, coeffs.sine_phase
    if b == 0.0:
        return EquilibriumSet(math.nan, math.nan, math.nan, False, -abs(a))
    margin = abs(b) - abs(a)
    s = -a / b
    if abs(s) > 1.0:
        return EquilibriumSet(math.nan, math.nan, math.nan, False, margin)
    asin_s = math.asin(s)
    sep = -phi + asin_s
    uep_right = -phi + math.pi - asin_s
    uep_left = uep_right - 2.0 * math.pi
    if margin > 0.0:
        # Monotone brackets: restoring slope b*cos(delta+phi) changes sign at
        # +-pi/2 around the phase, so each root is the only one in its bracket.
        f = lambda x: _residual(coeffs, x)
        checks = (
            (sep, _bisect(f, -phi - 0.5 * math.pi, -phi + 0.5 * math.pi)),
            (uep_right, _bisect(f, -phi + 0.5 * math.pi, -phi + 1.5 * math.pi)),
            (uep_left, _bisect(f, -phi - 1.5 * math.pi, -phi - 0.5 * math.pi)),
        )
        for closed, bisected in checks:
            if abs(closed - bisected) > _VERIFY_TOL:
                raise EquilibriumVerificationError(
                    f"closed-form root {closed!r} vs bisection {bisected!r}"
                )
    return EquilibriumSet(sep, uep_left, uep_right, abs(s) < 1.0, margin)


def approx_equilibria(coeffs: ModelCoeffs) -> EquilibriumSet:
    """Phase-neglecting approximation, valid for a large inertia ratio."""
    a, b = coeffs.p_const, coeffs.sine_amp
    if b == 0.0:
        return EquilibriumSet(math.nan, math.nan, math.nan, False, -abs(a))
    margin = abs(b) - abs(a)
    s = -a / b
    if abs(s) > 1.0:
        return EquilibriumSet(math.nan, math.nan, math.nan, False, margin)
    sep = math.asin(s)
    return EquilibriumSet(sep, -math.pi - sep, math.pi - sep, abs(s) < 1.0, margin)
