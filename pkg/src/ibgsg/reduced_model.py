"""Constants of the relative (delta, delta-omega) model and its sine form.

The machine swing equation and the synchronization loop's power-frequency
analogue combine into one second-order model for the relative angle.  For a
pure reactive-current injection (cos(phi_I) = 0) the drive collapses to

    t_eq * d(domega)/dt = p_const + sine_amp * sin(delta + sine_phase)
                          - damp_coeff * cos(delta) * domega

with ``sine_amp <= 0`` under the adopted sign convention (phi_I = -pi/2 for a
negative q-axis injection, which keeps the loop's equivalent inertia
positive).  The general drive for arbitrary injection angle is exposed
separately for validation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import network
from .errors import IbgsgError, ModelInapplicableError, UnsupportedInjectionError
from .network import CurrentInjection, ReducedNetwork

SINE_FORM_COS_TOL = 1e-9
RISK_TOL = 1e-9


@dataclass(frozen=True)
class SGParams:
    """Machine data: swing inertia coefficient (s), mechanical power, EMF."""

    t_g: float
    p_m: float
    e_g: float

    def __post_init__(self):
        if not self.t_g > 0.0:
            raise IbgsgError("inertia coefficient t_g must be positive")
        if self.p_m < 0.0:
            raise IbgsgError("mechanical power p_m must be nonnegative")


@dataclass(frozen=True)
class PLLParams:
    """PI gains of the synchronization loop (pu/pu and 1/s)."""

    k_p: float
    k_i: float

    def __post_init__(self):
        if self.k_p < 0.0:
            raise IbgsgError("proportional gain k_p must be nonnegative")
        if not self.k_i > 0.0:
            raise IbgsgError("integral gain k_i must be positive")


@dataclass(frozen=True)
class ModelCoeffs:
    """Sine-form constants of the relative model.

    t_p            loop equivalent inertia (s), positive by convention
    t_eq           system equivalent inertia t_p*t_g/(t_p+t_g) (s)
    alpha          relative inertia ratio t_g/t_p
    p_const        constant relative input power (pu)
    sine_amp       sine amplitude (pu), always <= 0
    sine_phase     sine phase (rad)
    damp_coeff     damping magnitude (pu*s), >= 0 for k_p >= 0
    dp_cos_coeff   coefficient of cos(delta) in the loop damping term (pu*s)
    p_in_eq        relative input power (pu), constant in the sine form
    omega_b        base angular frequency carried along for convenience
    """

    t_p: float
    t_eq: float
    alpha: float
    p_const: float
    sine_amp: float
    sine_phase: float
    damp_coeff: float
    dp_cos_coeff: float
    p_in_eq: float
    omega_b: float


@dataclass(frozen=True)
class PowerShortages:
    """Fault-on power-deficit decomposition of the constant drive term.

    p_ps / dp_ps    inverter output and shortage with the machine removed
    p_gs / dp_gs    machine output and shortage with the inverter removed
    weighted_dp_ps  alpha * dp_ps, the inverter's equivalent shortage
    """

    p_ps: float
    dp_ps: float
    p_gs: float
    dp_gs: float
    weighted_dp_ps: float


class LosRisk(enum.Enum):
    ACCELERATING = "accelerating"
    DECELERATING = "decelerating"
    MARGINAL = "marginal"


def current_polar(i_d: float, i_q: float) -> CurrentInjection:
    """Build a polar injection from d/q components."""
    return CurrentInjection(math.hypot(i_d, i_q), math.atan2(i_q, i_d))


def smib_coefficients(
    red_fault: ReducedNetwork,
    sg: SGParams,
    pll: PLLParams,
    inj: CurrentInjection,
    omega_b: float,
) -> ModelCoeffs:
    """Sine-form constants from the fault-on reduction.

    Requires a pure reactive injection (|cos phi_I| < 1e-9); for other angles
    only the general evaluation (:func:`relative_power_imbalance`) applies.
    """
    sin_phi = math.sin(inj.phi_i)
    if inj.i * abs(sin_phi) < 1e-15:
        raise ModelInapplicableError(
            "reduction undefined for i_q = 0 (sin(phi_I) = 0) during fault-on"
        )
    if abs(math.cos(inj.phi_i)) >= SINE_FORM_COS_TOL:
        raise UnsupportedInjectionError(
            f"sine form requires cos(phi_I) = 0; got phi_I = {inj.phi_i:.6g}"
        )
    t_p = -inj.i * sin_phi / pll.k_i
    if t_p <= 0.0:
        raise ModelInapplicableError(
            "loop equivalent inertia is not positive; use a negative q-axis injection"
        )
    alpha = sg.t_g / t_p
    t_eq = t_p * sg.t_g / (t_p + sg.t_g)
    p_ps = red_fault.z_eq * inj.i**2 * math.cos(red_fault.phi_z)
    p_const = (-alpha * p_ps + red_fault.p_gs - sg.p_m) / (1.0 + alpha)
    two_phi_g = 2.0 * red_fault.phi_g
    sine_amp = (
        -red_fault.u_g
        * inj.i
        / (1.0 + alpha)
        * math.hypot(alpha + math.cos(two_phi_g), math.sin(two_phi_g))
    )
    sine_phase = math.atan2(math.sin(two_phi_g), alpha + math.cos(two_phi_g))
    damp_coeff = (
        alpha / (1.0 + alpha) * pll.k_p / pll.k_i * omega_b * red_fault.u_g * inj.i
    )
    dp_cos_coeff = -pll.k_p / pll.k_i * omega_b * red_fault.u_g * inj.i * sin_phi
    p_in_eq = -sg.p_m / (1.0 + alpha)
    return ModelCoeffs(
        t_p=t_p,
        t_eq=t_eq,
        alpha=alpha,
        p_const=p_const,
        sine_amp=sine_amp,
        sine_phase=sine_phase,
        damp_coeff=damp_coeff,
        dp_cos_coeff=dp_cos_coeff,
        p_in_eq=p_in_eq,
        omega_b=omega_b,
    )


def _inertias(sg: SGParams, pll: PLLParams, inj: CurrentInjection):
    sin_phi = math.sin(inj.phi_i)
    if inj.i * abs(sin_phi) < 1e-15:
        raise ModelInapplicableError("i_q = 0: no power-frequency reduction")
    t_p = -inj.i * sin_phi / pll.k_i
    if t_p <= 0.0:
        raise ModelInapplicableError("loop equivalent inertia is not positive")
    return t_p, sg.t_g


def relative_power_imbalance(
    red: ReducedNetwork,
    sg: SGParams,
    pll: PLLParams,
    inj: CurrentInjection,
    delta,
    domega,
    omega_b: float,
):
    """General drive of the relative model: t_eq * d(domega)/dt.

    Valid for any injection with i_q != 0; equals the sine form when
    cos(phi_I) = 0.  ``delta`` and ``domega`` broadcast.
    """
    t_p, t_g = _inertias(sg, pll, inj)
    wp = t_g / (t_p + t_g)
    wg = t_p / (t_p + t_g)
    p_p, p_p_star = network.ibg_power(red, delta, inj)
    p_g = network.sg_power(red, delta, inj)
    p_in = wp * p_p_star - wg * sg.p_m
    p_out = wp * p_p - wg * p_g
    return p_in - p_out - equivalent_damping(red, sg, pll, inj, delta, omega_b) * domega


def equivalent_damping(
    red: ReducedNetwork,
    sg: SGParams,
    pll: PLLParams,
    inj: CurrentInjection,
    delta,
    omega_b: float,
):
    """Equivalent damping coefficient of the relative model at ``delta``."""
    t_p, t_g = _inertias(sg, pll, inj)
    d_p = (
        -pll.k_p
        / pll.k_i
        * omega_b
        * red.u_g
        * inj.i
        * math.sin(inj.phi_i)
        * np.cos(delta)
    )
    return t_g / (t_p + t_g) * d_p


def power_shortages(
    red_fault: ReducedNetwork,
    sg: SGParams,
    inj: CurrentInjection,
    coeffs: ModelCoeffs,
) -> PowerShortages:
    """Split the constant drive term into the two source-alone deficits."""
    p_ps = red_fault.z_eq * inj.i**2 * math.cos(red_fault.phi_z)
    p_star_alone = (
        red_fault.z_eq
        * inj.i**2
        * math.cos(inj.phi_i + red_fault.phi_z)
        * math.cos(inj.phi_i)
    )
    dp_ps = p_star_alone - p_ps
    dp_gs = sg.p_m - red_fault.p_gs
    return PowerShortages(
        p_ps=p_ps,
        dp_ps=dp_ps,
        p_gs=red_fault.p_gs,
        dp_gs=dp_gs,
        weighted_dp_ps=coeffs.alpha * dp_ps,
    )


def classify_los_risk(p_const: float, tol: float = RISK_TOL) -> LosRisk:
    """Which loss-of-synchronization direction the constant drive permits."""
    if p_const > tol:
        return LosRisk.ACCELERATING
    if p_const < -tol:
        return LosRisk.DECELERATING
    return LosRisk.MARGINAL
