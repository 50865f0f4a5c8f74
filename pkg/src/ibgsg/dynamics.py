"""Fixed-step time-domain simulation with fault switching and LOS detection.

Two models share one driver: the four-state machine/loop model (angles,
machine speed, integrator state; the loop speed is an output, so the
fault-instant frequency jump emerges from the algebraic voltage discontinuity
rather than a state reset) and the two-state relative model.  The pre-fault
stretch is held at the algebraic equilibrium; integration starts when the
fault topology is switched in, aligned to a step boundary.

Network quantities are quasi-static phasors throughout; there are no network
differential equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import criterion, energy, equilibria, kernels, network
from .errors import IbgsgError, IntegrationBlowUpError, UnsupportedInjectionError
from .network import BaseQuantities, CurrentInjection, ReducedNetwork
from .reduced_model import (
    LosRisk,
    ModelCoeffs,
    PLLParams,
    SGParams,
    current_polar,
    smib_coefficients,
)

LOS_MARGIN = 1e-3
TRAJECTORY_CSV_HEADER = "t,delta,domega,omega_g,omega_p,P_g,P_p,u_q,E_k,E_p,E_dis,V"


@dataclass(frozen=True)
class SimConfig:
    """Integration settings.

    ``t_fault`` is rounded to the nearest step boundary at validation; ``None``
    disables the fault.  ``damping_enabled`` applies to the reduced model only
    (the full model's damping lives in the loop's proportional path and cannot
    be removed without also removing the frequency jump).  ``stop_on_los``
    truncates the run at the first crossing, which sweeps use.
    """

    t_end: float
    dt: float = 1e-4
    t_fault: float | None = 0.5
    model: str = "full"
    damping_enabled: bool = True
    stop_on_los: bool = False

    def __post_init__(self):
        if not 0.0 < self.dt <= 1e-3:
            raise IbgsgError("dt must be in (0, 1e-3] s")
        if not self.t_end > 0.0:
            raise IbgsgError("t_end must be positive")
        if self.model not in ("full", "reduced"):
            raise IbgsgError("model must be 'full' or 'reduced'")
        if self.model == "full" and not self.damping_enabled:
            raise IbgsgError(
                "damping cannot be disabled in the full model; it is intrinsic "
                "to the loop's proportional path"
            )
        if self.t_fault is not None:
            rounded = round(self.t_fault / self.dt) * self.dt
            object.__setattr__(self, "t_fault", rounded)
            if not rounded < self.t_end:
                raise IbgsgError("t_fault must be smaller than t_end")
            if rounded < 0.0:
                raise IbgsgError("t_fault must be nonnegative")


@dataclass(frozen=True)
class FullState:
    """Machine angle and speed, loop angle, loop integrator state."""

    theta_g: float
    omega_g: float
    theta_p: float
    x_i: float

    def as_array(self):
        return np.array([self.theta_g, self.omega_g, self.theta_p, self.x_i])


@dataclass(frozen=True)
class ReducedState:
    delta: float
    domega: float

    def as_array(self):
        return np.array([self.delta, self.domega])


@dataclass(frozen=True)
class LosEvent:
    kind: LosRisk
    time: float


@dataclass
class Trajectory:
    """Uniformly sampled time series; columns may be NaN where not modelled."""

    t: np.ndarray
    delta: np.ndarray
    domega: np.ndarray
    omega_g: np.ndarray
    omega_p: np.ndarray
    p_g: np.ndarray
    p_p: np.ndarray
    u_q: np.ndarray
    e_k: np.ndarray
    e_p: np.ndarray
    e_dis: np.ndarray
    v: np.ndarray

    def __len__(self):
        return self.t.size

    def columns(self):
        return (
            self.t, self.delta, self.domega, self.omega_g, self.omega_p,
            self.p_g, self.p_p, self.u_q, self.e_k, self.e_p, self.e_dis,
            self.v,
        )

    def write_csv(self, stream) -> None:
        """Write the canonical CSV (12 significant digits, '.' decimal)."""
        stream.write(TRAJECTORY_CSV_HEADER + "\n")
        cols = self.columns()
        for i in range(len(self)):
            stream.write(",".join(f"{c[i]:.12g}" for c in cols) + "\n")


@dataclass
class SimResult:
    trajectory: Trajectory
    los: LosEvent | None
    final_state: FullState | ReducedState
    config: SimConfig
    coeffs: ModelCoeffs | None = None
    equilibrium: equilibria.EquilibriumSet | None = None
    initial: criterion.InitialState | None = None
    fault_index: int | None = field(default=None)


def derivatives_full(
    state,
    red: ReducedNetwork,
    inj: CurrentInjection,
    sg: SGParams,
    pll: PLLParams,
    base: BaseQuantities,
):
    """Reference right-hand side of the four-state model (kernels inline it)."""
    theta_g, omega_g, theta_p, x_i = np.asarray(state, dtype=float)
    delta = theta_p - theta_g - red.phi_g
    _, u_q = network.pcc_voltage(red, delta, inj)
    omega_p = base.omega_0 + pll.k_p * u_q + x_i
    p_g = network.sg_power(red, delta, inj)
    return np.array(
        [
            base.omega_b * (omega_g - base.omega_0),
            (sg.p_m - p_g) / sg.t_g,
            base.omega_b * (omega_p - base.omega_0),
            pll.k_i * u_q,
        ]
    )


def derivatives_reduced(state, coeffs: ModelCoeffs, damping_enabled: bool = True):
    """Right-hand side of the two-state relative model."""
    delta, domega = np.asarray(state, dtype=float)
    drive = coeffs.p_const + coeffs.sine_amp * math.sin(delta + coeffs.sine_phase)
    if damping_enabled:
        drive -= coeffs.damp_coeff * math.cos(delta) * domega
    return np.array([coeffs.omega_b * domega, drive / coeffs.t_eq])


def rk4_step(state, deriv_fn, dt: float):
    """One classical fourth-order step; no topology switching mid-step."""
    if not dt > 0.0:
        raise IbgsgError("dt must be positive")
    y = np.asarray(state, dtype=float)
    if not np.all(np.isfinite(y)):
        raise IbgsgError("non-finite state")
    k1 = np.asarray(deriv_fn(y))
    k2 = np.asarray(deriv_fn(y + 0.5 * dt * k1))
    k3 = np.asarray(deriv_fn(y + 0.5 * dt * k2))
    k4 = np.asarray(deriv_fn(y + dt * k3))
    return y + dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4)


def detect_los(
    delta,
    t,
    eq: equilibria.EquilibriumSet | None,
    delta_ref: float,
    p_const: float,
    margin: float = LOS_MARGIN,
) -> LosEvent | None:
    """Scan sampled angles for the first unrecoverable crossing.

    With equilibria: beyond the right UEP plus margin is an accelerating
    event, below the left UEP minus margin a decelerating one.  Without a
    stable point, one full revolution away from ``delta_ref`` is the event and
    the constant drive's sign fixes the direction.
    """
    delta = np.asarray(delta)
    t = np.asarray(t)
    if eq is not None and eq.exists:
        above = delta > eq.uep_right + margin
        below = delta < eq.uep_left - margin
        idx_a = int(np.argmax(above)) if above.any() else None
        idx_b = int(np.argmax(below)) if below.any() else None
        if idx_a is None and idx_b is None:
            return None
        if idx_b is None or (idx_a is not None and idx_a <= idx_b):
            return LosEvent(LosRisk.ACCELERATING, float(t[idx_a]))
        return LosEvent(LosRisk.DECELERATING, float(t[idx_b]))
    away = np.abs(delta - delta_ref) > 2.0 * math.pi
    if not away.any():
        return None
    idx = int(np.argmax(away))
    kind = LosRisk.ACCELERATING if p_const >= 0.0 else LosRisk.DECELERATING
    return LosEvent(kind, float(t[idx]))


def _los_event_from_kernel(los_idx, los_code, offset, dt, p_const) -> LosEvent | None:
    if los_idx < 0:
        return None
    time = (offset + los_idx) * dt
    if los_code == 1:
        return LosEvent(LosRisk.ACCELERATING, time)
    if los_code == 2:
        return LosEvent(LosRisk.DECELERATING, time)
    kind = LosRisk.ACCELERATING if p_const >= 0.0 else LosRisk.DECELERATING
    return LosEvent(kind, time)


def _nan(n):
    return np.full(n, math.nan)


class _Pieces:
    """Bundle of per-scenario derived objects shared by both models."""

    def __init__(self, scenario):
        self.base = scenario.base
        self.sg = scenario.sg
        self.pll = scenario.pll
        self.topology = scenario.topology
        self.fault_injection = scenario.fault_injection
        self.red_pre = network.reduce(scenario.topology.without_fault())
        self.inj_pre = current_polar(*scenario.prefault_injection)
        self.delta_pre = criterion.prefault_angle(self.red_pre, self.inj_pre)
        self.red_fault = None
        self.inj_fault = None
        self.coeffs = None
        self.eq = None
        self.init = None
        self.lam = 0.0

    def prepare_fault(self):
        self.red_fault = network.reduce(self.topology)
        self.inj_fault = current_polar(*self.fault_injection)
        try:
            self.coeffs = smib_coefficients(
                self.red_fault, self.sg, self.pll, self.inj_fault,
                self.base.omega_b,
            )
        except UnsupportedInjectionError:
            self.coeffs = None
            return
        self.eq = equilibria.find_equilibria(self.coeffs)
        self.init = criterion.initial_jump(
            self.red_pre, self.red_fault, self.delta_pre, self.pll,
            self.inj_fault, self.coeffs,
        )
        self.lam = energy.reference_constant(self.coeffs, self.eq)


def _los_bounds(pieces):
    if pieces.eq is not None and pieces.eq.exists:
        return (
            pieces.eq.uep_left - LOS_MARGIN,
            pieces.eq.uep_right + LOS_MARGIN,
            0.0,
            True,
        )
    ref = pieces.init.delta_post if pieces.init is not None else pieces.delta_pre
    return 0.0, 0.0, ref, False


def _fault_energy_columns(pieces, delta, domega, edis):
    c = pieces.coeffs
    if c is None:
        n = delta.size
        return _nan(n), _nan(n), _nan(n), _nan(n)
    e_k = energy.kinetic(c.t_eq, domega, c.omega_b)
    e_p = energy.potential(c, delta, pieces.lam)
    return e_k, e_p, edis, e_k + e_p + edis


def simulate(scenario, config: SimConfig | None = None, backend=None) -> SimResult:
    """Run one scenario and return the sampled trajectory plus any LOS event.

    Raises :class:`IntegrationBlowUpError` (with the truncated result
    attached) if the state leaves the representable range.
    """
    cfg = config if config is not None else scenario.sim
    kern = backend if backend is not None else kernels.active
    pieces = _Pieces(scenario)

    n_total = int(round(cfg.t_end / cfg.dt))
    has_fault = pieces.topology.r_f is not None and cfg.t_fault is not None
    n_fault = int(round(cfg.t_fault / cfg.dt)) if has_fault else n_total + 1
    if has_fault:
        pieces.prepare_fault()
        if cfg.model == "reduced" and pieces.coeffs is None:
            raise UnsupportedInjectionError(
                "reduced model requires a pure reactive fault injection"
            )

    if cfg.model == "full":
        return _simulate_full(scenario, cfg, kern, pieces, n_total, n_fault, has_fault)
    return _simulate_reduced(scenario, cfg, kern, pieces, n_total, n_fault, has_fault)


def _prefault_observables(pieces, pll, base, n_pre, model):
    """Columns for the frozen pre-fault stretch (indices 0 .. n_pre-1)."""
    red, inj = pieces.red_pre, pieces.inj_pre
    delta = np.full(n_pre, pieces.delta_pre)
    _, u_q = network.pcc_voltage(red, delta, inj)
    p_g = network.sg_power(red, delta, inj)
    p_p, _ = network.ibg_power(red, delta, inj)
    if model == "full":
        omega_g = np.full(n_pre, base.omega_0)
        omega_p = base.omega_0 + pll.k_p * u_q  # integrator state is zero
    else:
        omega_g = _nan(n_pre)
        omega_p = _nan(n_pre)
    return dict(
        delta=delta,
        domega=np.zeros(n_pre),
        omega_g=omega_g,
        omega_p=omega_p,
        p_g=p_g,
        p_p=np.broadcast_to(p_p, (n_pre,)).copy(),
        u_q=u_q,
        e_k=_nan(n_pre),
        e_p=_nan(n_pre),
        e_dis=_nan(n_pre),
        v=_nan(n_pre),
    )


def _assemble(cfg, cols_pre, cols_fault, n_done_total):
    t = np.arange(n_done_total + 1) * cfg.dt
    data = {}
    for key in cols_fault:
        if cols_pre is not None:
            data[key] = np.concatenate([cols_pre[key], cols_fault[key]])
        else:
            data[key] = cols_fault[key]
    return Trajectory(t=t, **data)


def _simulate_full(scenario, cfg, kern, pieces, n_total, n_fault, has_fault):
    base, sg, pll = pieces.base, pieces.sg, pieces.pll
    theta_p0 = pieces.delta_pre + pieces.red_pre.phi_g
    state0 = FullState(0.0, base.omega_0, theta_p0, 0.0)

    if not has_fault:
        cols = _prefault_observables(pieces, pll, base, n_total + 1, "full")
        traj = _assemble(cfg, None, cols, n_total)
        return SimResult(traj, None, state0, cfg)

    red, inj = pieces.red_fault, pieces.inj_fault
    lo, hi, ref, use_bounds = _los_bounds(pieces)
    d_aux = pieces.coeffs.damp_coeff if pieces.coeffs is not None else 0.0
    thg, omg, thp, xi, edis, status, los_idx, los_code = kern.integrate_full(
        state0.theta_g,
        state0.omega_g,
        state0.theta_p,
        state0.x_i,
        n_total - n_fault,
        cfg.dt,
        base.omega_b,
        base.omega_0,
        sg.t_g,
        sg.p_m,
        pll.k_p,
        pll.k_i,
        red.u_g,
        red.phi_g,
        red.z_eq * inj.i * math.sin(inj.phi_i + red.phi_z),
        red.u_g * inj.i,
        2.0 * red.phi_g + inj.phi_i,
        red.p_gs,
        d_aux,
        lo,
        hi,
        ref,
        use_bounds,
        cfg.stop_on_los,
    )
    delta = thp - thg - red.phi_g
    _, u_q = network.pcc_voltage(red, delta, inj)
    omega_p = base.omega_0 + pll.k_p * u_q + xi
    domega = omega_p - omg
    e_k, e_p, e_dis, v = _fault_energy_columns(pieces, delta, domega, edis)
    cols_fault = dict(
        delta=delta,
        domega=domega,
        omega_g=omg,
        omega_p=omega_p,
        p_g=network.sg_power(red, delta, inj),
        p_p=network.ibg_power(red, delta, inj)[0],
        u_q=u_q,
        e_k=e_k,
        e_p=e_p,
        e_dis=e_dis,
        v=v,
    )
    cols_pre = _prefault_observables(pieces, pll, base, n_fault, "full")
    n_done = n_fault + thg.size - 1
    traj = _assemble(cfg, cols_pre, cols_fault, n_done)
    los = _los_event_from_kernel(
        los_idx, los_code, n_fault, cfg.dt,
        pieces.coeffs.p_const if pieces.coeffs else 0.0,
    )
    final = FullState(thg[-1], omg[-1], thp[-1], xi[-1])
    result = SimResult(
        traj, los, final, cfg,
        coeffs=pieces.coeffs, equilibrium=pieces.eq, initial=pieces.init,
        fault_index=n_fault,
    )
    if status == 2:
        raise IntegrationBlowUpError(traj.t[-1], result)
    return result


def _simulate_reduced(scenario, cfg, kern, pieces, n_total, n_fault, has_fault):
    base, pll = pieces.base, pieces.pll

    if not has_fault:
        cols = _prefault_observables(pieces, pll, base, n_total + 1, "reduced")
        traj = _assemble(cfg, None, cols, n_total)
        return SimResult(traj, None, ReducedState(pieces.delta_pre, 0.0), cfg)

    c = pieces.coeffs
    init = pieces.init
    red, inj = pieces.red_fault, pieces.inj_fault
    lo, hi, ref, use_bounds = _los_bounds(pieces)
    d_eff = c.damp_coeff if cfg.damping_enabled else 0.0
    delta, domega, edis, status, los_idx, los_code = kern.integrate_reduced(
        init.delta_post,
        init.domega_post,
        n_total - n_fault,
        cfg.dt,
        c.p_const,
        c.sine_amp,
        c.sine_phase,
        d_eff,
        c.t_eq,
        c.omega_b,
        lo,
        hi,
        ref,
        use_bounds,
        cfg.stop_on_los,
    )
    _, u_q = network.pcc_voltage(red, delta, inj)
    e_k, e_p, e_dis, v = _fault_energy_columns(pieces, delta, domega, edis)
    n_rows = delta.size
    cols_fault = dict(
        delta=delta,
        domega=domega,
        omega_g=_nan(n_rows),
        omega_p=_nan(n_rows),
        p_g=network.sg_power(red, delta, inj),
        p_p=network.ibg_power(red, delta, inj)[0],
        u_q=u_q,
        e_k=e_k,
        e_p=e_p,
        e_dis=e_dis,
        v=v,
    )
    cols_pre = _prefault_observables(pieces, pll, base, n_fault, "reduced")
    n_done = n_fault + n_rows - 1
    traj = _assemble(cfg, cols_pre, cols_fault, n_done)
    los = _los_event_from_kernel(los_idx, los_code, n_fault, cfg.dt, c.p_const)
    result = SimResult(
        traj, los, ReducedState(delta[-1], domega[-1]), cfg,
        coeffs=c, equilibrium=pieces.eq, initial=init, fault_index=n_fault,
    )
    if status == 2:
        raise IntegrationBlowUpError(traj.t[-1], result)
    return result
