"""Scenario files, golden benchmark cases, case orchestration and sweeps.

A scenario is one YAML document with sections ``base``, ``topology``, ``sg``,
``pll``, ``injections`` and ``sim``.  Impedances are rectangular pu pairs; the
fault resistance is given in ohms (mirroring how such cases are tabulated) and
converted to pu once at ingestion.  Injections default to rated active current
before the fault and pure rated reactive current during it, both overridable.

``run_case`` chains the whole pipeline (reduction, coefficients, equilibria,
fault-instant jump, criterion, full-model simulation) and flags whether the
criterion verdict agrees with the simulated outcome.
"""

from __future__ import annotations

import copy
import importlib.resources
import math
from dataclasses import dataclass, replace

import numpy as np
import yaml

from . import criterion, dynamics, equilibria, network
from .criterion import CriterionVerdict, InitialState
from .dynamics import SimConfig, SimResult
from .equilibria import EquilibriumSet
from .errors import IbgsgError, ScenarioValidationError
from .network import BaseQuantities, Impedance, NetworkTopology
from .reduced_model import (
    LosRisk,
    ModelCoeffs,
    PLLParams,
    SGParams,
    current_polar,
    smib_coefficients,
)

SWEEP_FIXED_COLUMNS = [
    "a",
    "sign_a",
    "sep_exists",
    "S1",
    "S2",
    "S3",
    "Ek0",
    "margin_decel",
    "margin_accel",
    "stable_unified",
    "stable_type_specific",
]
MAX_GRID_POINTS = 10**6
BUILTIN_PREFIX = "builtin:"
TABLE2_CASE_NAMES = ("case_i", "case_ii", "case_iii", "case_iv", "case_v")


@dataclass(frozen=True)
class Scenario:
    """Validated inputs for one study."""

    base: BaseQuantities
    topology: NetworkTopology
    sg: SGParams
    pll: PLLParams
    prefault_injection: tuple[float, float]
    fault_injection: tuple[float, float]
    sim: SimConfig


# ---------------------------------------------------------------------------
# Parsing and validation
# ---------------------------------------------------------------------------


def _as_mapping(value, path):
    if not isinstance(value, dict):
        raise ScenarioValidationError(path, "expected a mapping")
    return value


def _check_keys(mapping, allowed, path):
    unknown = set(mapping) - set(allowed)
    if unknown:
        raise ScenarioValidationError(
            path, f"unknown keys {sorted(unknown)}; allowed: {sorted(allowed)}"
        )


def _number(mapping, key, path, default=None, positive=False, nonneg=False):
    if key not in mapping or mapping[key] is None:
        if default is not None:
            return default
        raise ScenarioValidationError(f"{path}.{key}", "missing required number")
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioValidationError(f"{path}.{key}", f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ScenarioValidationError(f"{path}.{key}", "must be finite")
    if positive and not value > 0.0:
        raise ScenarioValidationError(f"{path}.{key}", "must be positive")
    if nonneg and value < 0.0:
        raise ScenarioValidationError(f"{path}.{key}", "must be nonnegative")
    return value


def _impedance(mapping, key, path):
    section = _as_mapping(
        mapping.get(key) or _missing(f"{path}.{key}"), f"{path}.{key}"
    )
    _check_keys(section, {"re", "im"}, f"{path}.{key}")
    return Impedance(
        _number(section, "re", f"{path}.{key}"),
        _number(section, "im", f"{path}.{key}"),
    )


def _missing(path):
    raise ScenarioValidationError(path, "missing required section")


def _injection_pair(value, path):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ScenarioValidationError(path, "expected a pair [i_d, i_q]")
    out = []
    for i, item in enumerate(value):
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ScenarioValidationError(f"{path}[{i}]", "expected a number")
        if not math.isfinite(float(item)):
            raise ScenarioValidationError(f"{path}[{i}]", "must be finite")
        out.append(float(item))
    return tuple(out)


def parse_scenario(raw: dict) -> Scenario:
    """Validate a raw mapping and build a :class:`Scenario`.

    Violations raise :class:`ScenarioValidationError` carrying the dotted
    field path.
    """
    raw = _as_mapping(raw, "")
    _check_keys(raw, {"base", "topology", "sg", "pll", "injections", "sim"}, "scenario")

    base_m = _as_mapping(raw.get("base") or _missing("base"), "base")
    _check_keys(base_m, {"s_b", "u_b", "omega_b", "omega_0"}, "base")
    base = BaseQuantities(
        s_b=_number(base_m, "s_b", "base", positive=True),
        u_b=_number(base_m, "u_b", "base", positive=True),
        omega_b=_number(base_m, "omega_b", "base", positive=True),
        omega_0=_number(base_m, "omega_0", "base", default=1.0, positive=True),
    )

    topo_m = _as_mapping(raw.get("topology") or _missing("topology"), "topology")
    _check_keys(topo_m, {"e_g", "z_g", "z_p", "z_l", "r_f_ohm"}, "topology")
    e_g = _number(topo_m, "e_g", "topology", positive=True)
    r_f_pu = None
    if topo_m.get("r_f_ohm") is not None:
        r_f_ohm = _number(topo_m, "r_f_ohm", "topology")
        if not r_f_ohm > 0.0:
            raise ScenarioValidationError("topology.r_f_ohm", "must be positive")
        r_f_pu = network.ohms_to_pu(r_f_ohm, base)
    try:
        topology = NetworkTopology(
            e_g=e_g,
            z_g=_impedance(topo_m, "z_g", "topology"),
            z_p=_impedance(topo_m, "z_p", "topology"),
            z_l=_impedance(topo_m, "z_l", "topology"),
            r_f=r_f_pu,
        )
    except IbgsgError as exc:
        raise ScenarioValidationError("topology", str(exc)) from exc

    sg_m = _as_mapping(raw.get("sg") or _missing("sg"), "sg")
    _check_keys(sg_m, {"t_g", "p_m"}, "sg")
    try:
        sg = SGParams(
            t_g=_number(sg_m, "t_g", "sg", positive=True),
            p_m=_number(sg_m, "p_m", "sg", nonneg=True),
            e_g=e_g,
        )
    except IbgsgError as exc:
        raise ScenarioValidationError("sg", str(exc)) from exc

    pll_m = _as_mapping(raw.get("pll") or _missing("pll"), "pll")
    _check_keys(pll_m, {"k_p", "k_i"}, "pll")
    try:
        pll = PLLParams(
            k_p=_number(pll_m, "k_p", "pll", nonneg=True),
            k_i=_number(pll_m, "k_i", "pll", positive=True),
        )
    except IbgsgError as exc:
        raise ScenarioValidationError("pll", str(exc)) from exc

    inj_m = _as_mapping(raw.get("injections") or _missing("injections"), "injections")
    _check_keys(inj_m, {"i_r", "prefault", "fault"}, "injections")
    i_r = None
    if inj_m.get("i_r") is not None:
        i_r = _number(inj_m, "i_r", "injections", positive=True)
    if inj_m.get("prefault") is not None:
        prefault = _injection_pair(inj_m["prefault"], "injections.prefault")
    elif i_r is not None:
        prefault = (i_r, 0.0)
    else:
        raise ScenarioValidationError(
            "injections.prefault", "missing (provide it or injections.i_r)"
        )
    if inj_m.get("fault") is not None:
        fault = _injection_pair(inj_m["fault"], "injections.fault")
    elif i_r is not None:
        fault = (0.0, -i_r)
    else:
        raise ScenarioValidationError(
            "injections.fault", "missing (provide it or injections.i_r)"
        )
    if fault[1] == 0.0:
        raise ScenarioValidationError(
            "injections.fault", "fault-on q-axis current must be nonzero"
        )

    sim_m = _as_mapping(raw.get("sim", {}) or {}, "sim")
    _check_keys(
        sim_m,
        {"dt", "t_fault", "t_end", "model", "damping", "stop_on_los"},
        "sim",
    )
    model = sim_m.get("model", "full")
    damping = sim_m.get("damping", True)
    stop_on_los = sim_m.get("stop_on_los", False)
    if not isinstance(damping, bool):
        raise ScenarioValidationError("sim.damping", "expected a boolean")
    if not isinstance(stop_on_los, bool):
        raise ScenarioValidationError("sim.stop_on_los", "expected a boolean")
    t_fault = None
    if sim_m.get("t_fault") is not None:
        t_fault = _number(sim_m, "t_fault", "sim", nonneg=True)
    try:
        sim = SimConfig(
            t_end=_number(sim_m, "t_end", "sim", default=3.0, positive=True),
            dt=_number(sim_m, "dt", "sim", default=1e-4, positive=True),
            t_fault=t_fault,
            model=model,
            damping_enabled=damping,
            stop_on_los=stop_on_los,
        )
    except IbgsgError as exc:
        raise ScenarioValidationError("sim", str(exc)) from exc

    return Scenario(
        base=base,
        topology=topology,
        sg=sg,
        pll=pll,
        prefault_injection=prefault,
        fault_injection=fault,
        sim=sim,
    )


def apply_overrides(raw: dict, overrides) -> dict:
    """Set dotted-path overrides on a raw mapping (values parsed as YAML)."""
    out = copy.deepcopy(raw)
    for path, value in (overrides or {}).items():
        if isinstance(value, str):
            value = yaml.safe_load(value)
        parts = path.split(".")
        node = out
        for part in parts[:-1]:
            nxt = node.get(part)
            if nxt is None:
                nxt = {}
                node[part] = nxt
            if not isinstance(nxt, dict):
                raise ScenarioValidationError(path, f"cannot descend into {part!r}")
            node = nxt
        node[parts[-1]] = value
    return out


def resolve_scenario_path(path: str):
    """Resolve ``builtin:<name>`` to the packaged scenario file."""
    if isinstance(path, str) and path.startswith(BUILTIN_PREFIX):
        name = path[len(BUILTIN_PREFIX):]
        resource = importlib.resources.files("ibgsg.data") / f"{name}.yaml"
        if not resource.is_file():
            raise ScenarioValidationError(
                "scenario", f"no builtin scenario named {name!r}"
            )
        return resource
    return path


def load_raw(path) -> dict:
    """Read a scenario file into a raw mapping."""
    resource = resolve_scenario_path(path)
    try:
        text = (
            resource.read_text()
            if hasattr(resource, "read_text")
            else open(resource).read()
        )
    except OSError as exc:
        raise ScenarioValidationError("scenario", f"cannot read {path!r}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioValidationError("scenario", f"malformed YAML: {exc}") from exc
    if raw is None:
        raise ScenarioValidationError("scenario", "empty scenario file")
    return _as_mapping(raw, "scenario")


def load_scenario(path, overrides=None) -> Scenario:
    """Load, override and validate a scenario file."""
    return parse_scenario(apply_overrides(load_raw(path), overrides))


# ---------------------------------------------------------------------------
# Case orchestration
# ---------------------------------------------------------------------------


@dataclass
class CaseAnalysis:
    """Criterion-side pipeline products (no simulation)."""

    scenario: Scenario
    red_pre: network.ReducedNetwork
    red_fault: network.ReducedNetwork
    coeffs: ModelCoeffs
    eq: EquilibriumSet
    init: InitialState
    verdict: CriterionVerdict


@dataclass
class CaseReport:
    analysis: CaseAnalysis
    sim: SimResult
    predicted: str
    simulated: str
    agreement: bool


def analyze_case(scenario: Scenario) -> CaseAnalysis:
    """Run the criterion pipeline: reductions, coefficients, jump, verdict."""
    if scenario.topology.r_f is None:
        raise ScenarioValidationError("topology.r_f_ohm", "analysis requires a fault")
    red_pre = network.reduce(scenario.topology.without_fault())
    red_fault = network.reduce(scenario.topology)
    inj_pre = current_polar(*scenario.prefault_injection)
    inj_fault = current_polar(*scenario.fault_injection)
    coeffs = smib_coefficients(
        red_fault, scenario.sg, scenario.pll, inj_fault, scenario.base.omega_b
    )
    eq = equilibria.find_equilibria(coeffs)
    delta_pre = criterion.prefault_angle(red_pre, inj_pre)
    init = criterion.initial_jump(
        red_pre, red_fault, delta_pre, scenario.pll, inj_fault, coeffs
    )
    verdict = criterion.assess(coeffs, eq, init)
    return CaseAnalysis(scenario, red_pre, red_fault, coeffs, eq, init, verdict)


def _sim_label(result: SimResult) -> str:
    return "stable" if result.los is None else f"{result.los.kind.value}-los"


def run_case(scenario: Scenario, backend=None) -> CaseReport:
    """Criterion plus full-model simulation plus the agreement flag."""
    analysis = analyze_case(scenario)
    sim_cfg = replace(scenario.sim, model="full", damping_enabled=True)
    sim = dynamics.simulate(scenario, sim_cfg, backend=backend)
    predicted = analysis.verdict.outcome
    simulated = _sim_label(sim)
    return CaseReport(
        analysis=analysis,
        sim=sim,
        predicted=predicted,
        simulated=simulated,
        agreement=predicted == simulated,
    )


# ---------------------------------------------------------------------------
# Golden benchmark cases
# ---------------------------------------------------------------------------

# Expected outcome per case: constant-drive sign, binding barrier, whether the
# initial kinetic energy exceeds it, and the verdict labels.
_TABLE2_EXPECTED = {
    "case_i": ("negative", "decel", True, "decelerating-los", "decelerating-los"),
    "case_ii": ("positive", "accel", True, "accelerating-los", "accelerating-los"),
    "case_iii": ("positive", "accel", False, "stable", "stable"),
    "case_iv": ("positive", "accel", False, "stable", "stable"),
    "case_v": ("positive", "accel", False, "stable", "stable"),
}


@dataclass
class GoldenRow:
    name: str
    report: CaseReport
    expected_criterion: str
    expected_simulation: str
    condition_ok: bool
    criterion_ok: bool
    simulation_ok: bool

    @property
    def ok(self) -> bool:
        return self.condition_ok and self.criterion_ok and self.simulation_ok

    @property
    def condition_label(self) -> str:
        sign, barrier, exceeds, _, _ = _TABLE2_EXPECTED[self.name]
        a_txt = "a<0" if sign == "negative" else "a>0"
        cmp_txt = ">" if exceeds else "<"
        barrier_txt = "S1-S2" if barrier == "decel" else "S3"
        return f"{a_txt}, Ek0 {cmp_txt} {barrier_txt}"


@dataclass
class GoldenResult:
    rows: list

    @property
    def all_ok(self) -> bool:
        return all(row.ok for row in self.rows)


def table2_scenarios() -> dict:
    """The five packaged benchmark scenarios, keyed case_i .. case_v."""
    return {
        name: load_scenario(BUILTIN_PREFIX + name) for name in TABLE2_CASE_NAMES
    }


def run_table2(backend=None) -> GoldenResult:
    """Run the five golden cases and check signs, verdicts and simulations."""
    rows = []
    for name, scenario in table2_scenarios().items():
        report = run_case(scenario, backend=backend)
        sign, barrier, exceeds, want_crit, want_sim = _TABLE2_EXPECTED[name]
        verdict = report.analysis.verdict
        a = report.analysis.coeffs.p_const
        sign_ok = a < 0 if sign == "negative" else a > 0
        barrier_value = (
            verdict.s1 - verdict.s2 if barrier == "decel" else verdict.s3
        )
        relation_ok = (
            verdict.e_k_post > barrier_value
            if exceeds
            else verdict.e_k_post < barrier_value
        )
        rows.append(
            GoldenRow(
                name=name,
                report=report,
                expected_criterion=want_crit,
                expected_simulation=want_sim,
                condition_ok=bool(sign_ok and relation_ok),
                criterion_ok=report.predicted == want_crit,
                simulation_ok=report.simulated == want_sim,
            )
        )
    return GoldenResult(rows)


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepAxis:
    path: str
    start: float
    stop: float
    count: int

    def values(self):
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepSpec:
    """Grid definition over dotted scenario paths, row-major evaluation."""

    raw_scenario: dict
    axes: tuple
    check_sim: bool = False

    def __post_init__(self):
        if not self.axes:
            raise ScenarioValidationError("sweep.axes", "at least one axis required")
        total = 1
        for axis in self.axes:
            if axis.count < 1:
                raise ScenarioValidationError(
                    f"sweep.axes.{axis.path}", "count must be >= 1"
                )
            total *= axis.count
        if total > MAX_GRID_POINTS:
            raise ScenarioValidationError(
                "sweep.axes", f"grid of {total} points exceeds {MAX_GRID_POINTS}"
            )


@dataclass
class SweepResult:
    header: list
    rows: list
    errors: list

    def write_csv(self, stream) -> None:
        stream.write(",".join(self.header) + "\n")
        for row in self.rows:
            stream.write(",".join(_format_cell(v) for v in row) + "\n")


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def sweep(spec: SweepSpec, backend=None) -> SweepResult:
    """Evaluate the criterion pipeline on every grid point.

    Per-point component errors are recorded (path, message) and leave a row of
    NaNs rather than aborting the sweep.  Row order is row-major over the axes
    in the order given, so output is deterministic.
    """
    header = [axis.path for axis in spec.axes] + list(SWEEP_FIXED_COLUMNS)
    if spec.check_sim:
        header.append("sim_agrees")
    grids = [axis.values() for axis in spec.axes]
    shape = tuple(len(g) for g in grids)
    rows = []
    errors = []
    for flat_idx in range(int(np.prod(shape))):
        idx = np.unravel_index(flat_idx, shape)
        values = [float(grids[k][i]) for k, i in enumerate(idx)]
        overrides = {axis.path: val for axis, val in zip(spec.axes, values)}
        row = list(values)
        try:
            scen = parse_scenario(apply_overrides(spec.raw_scenario, overrides))
            analysis = analyze_case(scen)
            verdict = analysis.verdict
            a = analysis.coeffs.p_const
            row += [
                a,
                int(np.sign(a)) if abs(a) > 1e-9 else 0,
                analysis.eq.exists,
                verdict.s1,
                verdict.s2,
                verdict.s3,
                verdict.e_k_post,
                verdict.margin_decel,
                verdict.margin_accel,
                verdict.stable_unified,
                verdict.stable_type_specific,
            ]
            if spec.check_sim:
                sim_cfg = replace(
                    scen.sim, model="full", damping_enabled=True, stop_on_los=True
                )
                sim = dynamics.simulate(scen, sim_cfg, backend=backend)
                row.append(verdict.outcome == _sim_label(sim))
        except IbgsgError as exc:
            errors.append((flat_idx, str(exc)))
            row += [math.nan] * (len(header) - len(row))
        rows.append(row)
    return SweepResult(header, rows, errors)


# ---------------------------------------------------------------------------
# Randomized parameter-box sampling (property-test harness)
# ---------------------------------------------------------------------------


def sample_box_scenarios(
    n: int,
    seed: int = 0,
    kitg_range=(36.0, 415.0),
    kp_ratio_range=(0.005, 0.05),
    tg_range=(0.5, 2.0),
    rf_ohm_range=(0.02, 0.30),
    require_sep: bool = True,
    max_draws: int = 100_000,
):
    """Draw scenarios from the typical-parameter box around the benchmark grid.

    The integral-gain/inertia product and the fault resistance are drawn
    log-uniformly; draws whose fault-on model has no stable point are
    discarded when ``require_sep`` is set.
    """
    rng = np.random.default_rng(seed)
    template = load_raw(BUILTIN_PREFIX + "case_iii")
    out = []
    for _ in range(max_draws):
        if len(out) >= n:
            break
        kitg = math.exp(rng.uniform(math.log(kitg_range[0]), math.log(kitg_range[1])))
        t_g = rng.uniform(*tg_range)
        k_i = kitg / t_g
        k_p = rng.uniform(*kp_ratio_range) * k_i
        r_f = math.exp(
            rng.uniform(math.log(rf_ohm_range[0]), math.log(rf_ohm_range[1]))
        )
        overrides = {
            "sg.t_g": t_g,
            "pll.k_i": k_i,
            "pll.k_p": k_p,
            "topology.r_f_ohm": r_f,
        }
        scen = parse_scenario(apply_overrides(template, overrides))
        if require_sep:
            red_fault = network.reduce(scen.topology)
            coeffs = smib_coefficients(
                red_fault, scen.sg, scen.pll,
                current_polar(*scen.fault_injection), scen.base.omega_b,
            )
            if not equilibria.find_equilibria(coeffs).exists:
                continue
        out.append(scen)
    if len(out) < n:
        raise IbgsgError(f"could only draw {len(out)} of {n} requested scenarios")
    return out
