"""Energy bookkeeping for the sine-form model.

Kinetic plus potential energy is conserved along undamped motion; with the
cosine damping term the dissipation line integral closes the balance.  The
potential reference is chosen so the stable equilibrium sits at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equilibria import EquilibriumSet
from .errors import IbgsgError
from .reduced_model import ModelCoeffs


@dataclass(frozen=True)
class EnergyBreakdown:
    e_k: float
    e_p: float
    e_dis: float
    v: float
    lam: float


def kinetic(t_eq: float, domega, omega_b: float):
    """Kinetic energy 0.5 * omega_b * t_eq * domega**2 (broadcasts)."""
    return 0.5 * omega_b * t_eq * np.square(domega)


def potential(coeffs: ModelCoeffs, delta, lam: float = 0.0):
    """Potential energy -p_const*delta + sine_amp*cos(delta+phase) + lam."""
    d = np.asarray(delta, dtype=float)
    e_p = -coeffs.p_const * d + coeffs.sine_amp * np.cos(d + coeffs.sine_phase) + lam
    return float(e_p) if np.ndim(delta) == 0 else e_p


def reference_constant(coeffs: ModelCoeffs, eq: EquilibriumSet) -> float:
    """Offset making the potential zero at the stable point (zero without one)."""
    if not eq.exists:
        return 0.0
    return -potential(coeffs, eq.sep, 0.0)


def evaluate(
    coeffs: ModelCoeffs, delta: float, domega: float, lam: float = 0.0,
    e_dis: float = 0.0,
) -> EnergyBreakdown:
    """Point evaluation of the full accounting."""
    e_k = float(kinetic(coeffs.t_eq, domega, coeffs.omega_b))
    e_p = float(potential(coeffs, delta, lam))
    return EnergyBreakdown(e_k=e_k, e_p=e_p, e_dis=e_dis, v=e_k + e_p + e_dis, lam=lam)


def dissipation_increments(delta, domega, damp_coeff: float):
    """Per-interval trapezoidal increments of the dissipation line integral."""
    delta = np.asarray(delta, dtype=float)
    domega = np.asarray(domega, dtype=float)
    if delta.size < 2:
        raise IbgsgError("dissipation integral needs at least 2 samples")
    f = np.cos(delta) * domega
    return damp_coeff * 0.5 * (f[1:] + f[:-1]) * np.diff(delta)


def dissipation_along(trajectory, damp_coeff: float) -> float:
    """Damping dissipation accumulated along a sampled trajectory.

    Trapezoidal accumulation of ``damp_coeff * integral(cos(delta) * domega
    d delta)``; the integration variable is the angle, so the value is a line
    integral and does not require monotone samples.
    """
    return float(np.sum(dissipation_increments(trajectory.delta, trajectory.domega, damp_coeff)))


def uep_kinetic_delta(coeffs: ModelCoeffs) -> float:
    """Kinetic-energy change over one undamped period between adjacent UEPs.

    Equals 2*pi times the constant drive term: the cosine parts of the
    potential cancel across a full period, leaving only the tilt.
    """
    return 2.0 * math.pi * coeffs.p_const
