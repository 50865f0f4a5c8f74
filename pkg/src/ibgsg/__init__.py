"""Transient-stability toolkit for a PLL-synchronized inverter source coupled
to a synchronous machine: circuit reduction, the relative-angle reduced model,
energy-function stability criterion, and a validating time-domain simulator.
"""

from . import kernels
from .criterion import (
    CriterionVerdict,
    InitialState,
    areas,
    assess,
    initial_jump,
    prefault_angle,
)
from .dynamics import (
    LosEvent,
    SimConfig,
    SimResult,
    Trajectory,
    detect_los,
    rk4_step,
    simulate,
)
from .energy import dissipation_along, kinetic, potential, uep_kinetic_delta
from .equilibria import EquilibriumSet, approx_equilibria, find_equilibria
from .errors import (
    BeyondUepError,
    IbgsgError,
    IntegrationBlowUpError,
    ModelInapplicableError,
    NoPrefaultEquilibriumError,
    ScenarioValidationError,
    UnsupportedInjectionError,
)
from .network import (
    BaseQuantities,
    CurrentInjection,
    Impedance,
    NetworkTopology,
    ReducedNetwork,
    effective_load,
    ibg_power,
    load_bus_voltage,
    ohms_to_pu,
    pcc_voltage,
    pu_to_ohms,
    reduce,
    sg_power,
)
from .reduced_model import (
    LosRisk,
    ModelCoeffs,
    PLLParams,
    PowerShortages,
    SGParams,
    classify_los_risk,
    current_polar,
    power_shortages,
    smib_coefficients,
)
from .scenario import (
    CaseReport,
    Scenario,
    SweepAxis,
    SweepSpec,
    analyze_case,
    load_scenario,
    run_case,
    run_table2,
    sample_box_scenarios,
    sweep,
    table2_scenarios,
)

__version__ = "0.1.0"
