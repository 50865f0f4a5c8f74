"""Fault-instant state jumps and the energy-function stability criterion.

At the fault instant the equivalent-source angle moves, so the relative angle
jumps by the angle difference; the loop's proportional path turns the q-axis
voltage discontinuity into a frequency jump.  Stability during the fault-on
period is then a race between the initial kinetic energy and the potential
barriers toward the two adjacent unstable points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import energy
from .equilibria import EquilibriumSet
from .errors import BeyondUepError, NoPrefaultEquilibriumError
from .network import CurrentInjection, ReducedNetwork, pcc_voltage
from .reduced_model import LosRisk, ModelCoeffs, PLLParams, classify_los_risk


@dataclass(frozen=True)
class InitialState:
    """Pre-fault angle and the post-jump state.

    delta_post = delta_pre + (phi_g_pre - phi_g_fault) exactly;
    domega_post = k_p * u_q_post exactly.
    """

    delta_pre: float
    delta_post: float
    domega_post: float
    u_q_post: float
    e_k_post: float


@dataclass(frozen=True)
class CriterionVerdict:
    """Areas, margins and the stable/unstable decision.

    ``stable_unified`` is the single condition covering both directions;
    ``stable_type_specific`` checks only the barrier the constant drive can
    push toward.  ``no_sep`` marks certain loss of synchronization.
    """

    risk: LosRisk
    s1: float
    s2: float
    s3: float
    e_k_post: float
    margin_decel: float
    margin_accel: float
    stable_unified: bool
    stable_type_specific: bool
    no_sep: bool

    @property
    def outcome(self) -> str:
        """Headline label: ``stable`` or the predicted LOS direction."""
        if self.stable_type_specific:
            return "stable"
        if self.risk is LosRisk.MARGINAL:
            return (
                "accelerating-los"
                if self.margin_accel <= self.margin_decel
                else "decelerating-los"
            )
        return f"{self.risk.value}-los"


def prefault_angle(red_pre: ReducedNetwork, inj_pre: CurrentInjection) -> float:
    """Stable-branch root of the pre-fault q-axis voltage.

    Solves u_q = 0 on the principal branch; raises
    :class:`NoPrefaultEquilibriumError` when the injection cannot be balanced.
    """
    if red_pre.u_g <= 0.0:
        raise NoPrefaultEquilibriumError("pre-fault source magnitude is zero")
    s = red_pre.z_eq * inj_pre.i * math.sin(inj_pre.phi_i + red_pre.phi_z) / red_pre.u_g
    if abs(s) > 1.0:
        raise NoPrefaultEquilibriumError(
            f"no pre-fault operating point: |{s:.6g}| > 1"
        )
    return math.asin(s)


def initial_jump(
    red_pre: ReducedNetwork,
    red_fault: ReducedNetwork,
    delta_pre: float,
    pll: PLLParams,
    inj_fault: CurrentInjection,
    coeffs: ModelCoeffs,
) -> InitialState:
    """State immediately after the fault is applied.

    The pre-fault q-axis voltage is exactly zero (equilibrium), so the
    frequency jump is purely the proportional path acting on the post-fault
    voltage.
    """
    delta_post = delta_pre + red_pre.phi_g - red_fault.phi_g
    _, u_q_post = pcc_voltage(red_fault, delta_post, inj_fault)
    domega_post = pll.k_p * u_q_post
    e_k_post = float(energy.kinetic(coeffs.t_eq, domega_post, coeffs.omega_b))
    return InitialState(
        delta_pre=delta_pre,
        delta_post=delta_post,
        domega_post=float(domega_post),
        u_q_post=float(u_q_post),
        e_k_post=e_k_post,
    )


def areas(coeffs: ModelCoeffs, eq: EquilibriumSet, delta_post: float):
    """Acceleration/deceleration areas measured from the post-jump angle.

    s1: barrier from the stable point to the left UEP;
    s2: potential of the post-jump point above the stable point;
    s3: barrier from the post-jump point to the right UEP.
    The crossing energies are then s1 - s2 (left) and s3 (right).
    """
    if not eq.exists:
        raise BeyondUepError(delta_post, "left" if coeffs.p_const < 0 else "right")
    if delta_post < eq.uep_left:
        raise BeyondUepError(delta_post, "left")
    if delta_post > eq.uep_right:
        raise BeyondUepError(delta_post, "right")
    e_sep = energy.potential(coeffs, eq.sep)
    s1 = energy.potential(coeffs, eq.uep_left) - e_sep
    s2 = energy.potential(coeffs, delta_post) - e_sep
    s3 = energy.potential(coeffs, eq.uep_right) - energy.potential(coeffs, delta_post)
    return s1, s2, s3


def assess(coeffs: ModelCoeffs, eq: EquilibriumSet, init: InitialState) -> CriterionVerdict:
    """Full criterion: barriers vs initial kinetic energy.

    Without a stable point the verdict is certain LOS in the direction of the
    constant drive.  A post-jump angle beyond a UEP yields negative margin on
    that side, i.e. an instant LOS verdict.
    """
    risk = classify_los_risk(coeffs.p_const)
    if not eq.exists:
        return CriterionVerdict(
            risk=risk,
            s1=math.nan,
            s2=math.nan,
            s3=math.nan,
            e_k_post=init.e_k_post,
            margin_decel=math.nan,
            margin_accel=math.nan,
            stable_unified=False,
            stable_type_specific=False,
            no_sep=True,
        )
    # Potential differences stay meaningful outside [uep_left, uep_right]:
    # the corresponding margin just turns negative.
    e_sep = energy.potential(coeffs, eq.sep)
    e_post = energy.potential(coeffs, init.delta_post)
    s1 = energy.potential(coeffs, eq.uep_left) - e_sep
    s2 = e_post - e_sep
    s3 = energy.potential(coeffs, eq.uep_right) - e_post
    margin_decel = (s1 - s2) - init.e_k_post
    margin_accel = s3 - init.e_k_post
    stable_unified = init.e_k_post < min(s1 - s2, s3)
    if risk is LosRisk.ACCELERATING:
        stable_type_specific = init.e_k_post < s3
    elif risk is LosRisk.DECELERATING:
        stable_type_specific = init.e_k_post < s1 - s2
    else:
        stable_type_specific = stable_unified
    return CriterionVerdict(
        risk=risk,
        s1=s1,
        s2=s2,
        s3=s3,
        e_k_post=init.e_k_post,
        margin_decel=margin_decel,
        margin_accel=margin_accel,
        stable_unified=stable_unified,
        stable_type_specific=stable_type_specific,
        no_sep=False,
    )
