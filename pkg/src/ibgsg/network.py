"""Complex-impedance reduction of the inverter/synchronous-generator circuit.

The two-source circuit (EMF behind the machine-side line, current-source
inverter behind its own line, shared load bus) is collapsed, by superposition,
into a Thevenin-style pair seen from the inverter terminal: a source
``u_g /_ phi_g`` plus an equivalent impedance ``z_eq /_ phi_z``.  A bolted
fault through ``R_f`` at the load bus is modelled by paralleling ``R_f`` with
the load impedance, which is what reproduces the measured residual bus
voltages.

All quantities are per unit; angles are radians normalized to (-pi, pi].
Everything here is pure arithmetic over immutable values and is safe to call
from any number of workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import IbgsgError


def normalize_angle(angle: float) -> float:
    """Map an angle to (-pi, pi]."""
    a = math.remainder(angle, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    return a


@dataclass(frozen=True)
class BaseQuantities:
    """Per-unit base: power (VA), voltage (V), angular frequency (rad/s)."""

    s_b: float
    u_b: float
    omega_b: float
    omega_0: float = 1.0

    def __post_init__(self):
        for name in ("s_b", "u_b", "omega_b"):
            if not getattr(self, name) > 0.0:
                raise IbgsgError(f"base quantity {name} must be positive")

    @property
    def z_b(self) -> float:
        """Base impedance u_b**2 / s_b, in ohms."""
        return self.u_b**2 / self.s_b


@dataclass(frozen=True)
class Impedance:
    """Rectangular-form impedance in pu; polar values are derived views."""

    re: float
    im: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise IbgsgError("impedance components must be finite")

    @property
    def z(self) -> complex:
        return complex(self.re, self.im)

    @property
    def mag(self) -> float:
        return abs(self.z)

    @property
    def ang(self) -> float:
        return normalize_angle(math.atan2(self.im, self.re))

    @classmethod
    def from_complex(cls, value: complex) -> "Impedance":
        return cls(value.real, value.imag)


@dataclass(frozen=True)
class CurrentInjection:
    """Polar current injection in the inverter synchronization frame."""

    i: float
    phi_i: float

    def __post_init__(self):
        if self.i < 0.0:
            raise IbgsgError("current magnitude must be nonnegative")
        object.__setattr__(self, "phi_i", normalize_angle(self.phi_i))

    @property
    def i_d(self) -> float:
        return self.i * math.cos(self.phi_i)

    @property
    def i_q(self) -> float:
        return self.i * math.sin(self.phi_i)


@dataclass(frozen=True)
class NetworkTopology:
    """Circuit data: EMF magnitude, three branch impedances, optional fault.

    ``r_f`` is the fault resistance in pu (scenario files carry ohms and
    convert once at ingestion); ``None`` means the healthy topology.
    """

    e_g: float
    z_g: Impedance
    z_p: Impedance
    z_l: Impedance
    r_f: float | None = None

    def __post_init__(self):
        if not self.e_g > 0.0:
            raise IbgsgError("EMF magnitude e_g must be positive")
        if abs(self.z_g.z + self.z_l.z) == 0.0:
            raise IbgsgError("z_g + z_l must have nonzero magnitude")
        if self.r_f is not None and not self.r_f > 0.0:
            raise IbgsgError("fault resistance must be positive when present")

    def without_fault(self) -> "NetworkTopology":
        return replace(self, r_f=None)


@dataclass(frozen=True)
class ReducedNetwork:
    """Thevenin-style reduction of one topology state.

    ``u_g /_ phi_g`` is the equivalent source seen from the inverter terminal,
    ``z_eq /_ phi_z`` the equivalent impedance behind it, ``phi_gl`` and
    ``z_gl_mag`` the polar form of ``z_g + z_l_eff``, and ``p_gs`` the machine
    output power with the inverter removed.
    """

    u_g: float
    phi_g: float
    phi_gl: float
    z_eq: float
    phi_z: float
    z_gl_mag: float
    p_gs: float


def ohms_to_pu(r_ohm: float, base: BaseQuantities) -> float:
    """Convert a resistance in ohms to per unit on ``base``."""
    if r_ohm < 0.0:
        raise IbgsgError("resistance must be nonnegative")
    return r_ohm / base.z_b


def pu_to_ohms(r_pu: float, base: BaseQuantities) -> float:
    """Inverse of :func:`ohms_to_pu`."""
    if r_pu < 0.0:
        raise IbgsgError("resistance must be nonnegative")
    return r_pu * base.z_b


def effective_load(z_l: Impedance, r_f: float | None = None) -> Impedance:
    """Load impedance with the optional fault resistance in parallel."""
    if z_l.mag == 0.0:
        raise IbgsgError("load impedance must have nonzero magnitude")
    if r_f is None:
        return z_l
    if not r_f > 0.0:
        raise IbgsgError("fault resistance must be positive")
    denom = z_l.z + r_f
    if abs(denom) == 0.0:
        raise IbgsgError("degenerate parallel combination (zero admittance sum)")
    return Impedance.from_complex(z_l.z * r_f / denom)


def reduce(topology: NetworkTopology) -> ReducedNetwork:
    """Collapse one topology state into its equivalent source and impedance."""
    z_l_eff = effective_load(topology.z_l, topology.r_f).z
    z_g = topology.z_g.z
    z_gl = z_g + z_l_eff
    if abs(z_gl) == 0.0:
        raise IbgsgError("degenerate reduction: |z_g + z_l_eff| = 0")
    source = z_l_eff / z_gl * topology.e_g
    z_eq_c = topology.z_p.z + z_g * z_l_eff / z_gl
    p_gs = topology.e_g**2 * math.cos(math.atan2(z_gl.imag, z_gl.real)) / abs(z_gl)
    return ReducedNetwork(
        u_g=abs(source),
        phi_g=normalize_angle(math.atan2(source.imag, source.real)),
        phi_gl=normalize_angle(math.atan2(z_gl.imag, z_gl.real)),
        z_eq=abs(z_eq_c),
        phi_z=normalize_angle(math.atan2(z_eq_c.imag, z_eq_c.real)),
        z_gl_mag=abs(z_gl),
        p_gs=p_gs,
    )


def pcc_voltage(red: ReducedNetwork, delta, inj: CurrentInjection):
    """d/q components of the inverter terminal voltage in its own frame.

    ``delta`` may be a scalar or an ndarray; returns ``(u_d, u_q)``.
    """
    drop = red.z_eq * inj.i
    u_d = red.u_g * np.cos(delta) + drop * math.cos(inj.phi_i + red.phi_z)
    u_q = -red.u_g * np.sin(delta) + drop * math.sin(inj.phi_i + red.phi_z)
    return u_d, u_q


def sg_power(red: ReducedNetwork, delta, inj: CurrentInjection):
    """Machine electrical output power at relative angle ``delta``."""
    return red.p_gs - red.u_g * inj.i * np.cos(delta + 2.0 * red.phi_g + inj.phi_i)


def ibg_power(red: ReducedNetwork, delta, inj: CurrentInjection):
    """Inverter actual and reference powers ``(p_p, p_p_star)``.

    ``p_p_star = u_d * i_d`` is an analysis aid, not a control reference.
    """
    ug_i = red.u_g * inj.i
    self_term = red.z_eq * inj.i**2
    p_p = ug_i * np.cos(delta + inj.phi_i) + self_term * math.cos(red.phi_z)
    p_p_star = (
        ug_i * np.cos(delta) * math.cos(inj.phi_i)
        + self_term * math.cos(inj.phi_i + red.phi_z) * math.cos(inj.phi_i)
    )
    return p_p, p_p_star


def load_bus_voltage(topology: NetworkTopology, delta, inj: CurrentInjection):
    """Load-bus voltage magnitude from the node equation, machine frame."""
    z_l_eff = effective_load(topology.z_l, topology.r_f).z
    z_g = topology.z_g.z
    if abs(z_g) == 0.0 or abs(z_g + z_l_eff) == 0.0:
        raise IbgsgError("degenerate node equation")
    z_par = z_g * z_l_eff / (z_g + z_l_eff)
    red = reduce(topology)
    inj_angle = delta + red.phi_g + inj.phi_i
    total = z_par * (topology.e_g / z_g + inj.i * np.exp(1j * np.asarray(inj_angle)))
    return np.abs(total) if np.ndim(delta) else float(abs(total))
