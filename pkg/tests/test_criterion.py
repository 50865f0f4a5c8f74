import math

import numpy as np
import pytest
from scipy.integrate import quad

from ibgsg import criterion, network
from ibgsg.criterion import InitialState, areas, assess, initial_jump, prefault_angle
from ibgsg.equilibria import EquilibriumSet, find_equilibria
from ibgsg.errors import BeyondUepError, NoPrefaultEquilibriumError
from ibgsg.network import CurrentInjection, ReducedNetwork, pcc_voltage
from ibgsg.reduced_model import LosRisk, PLLParams, current_polar

from conftest import make_topology
from test_equilibria import synthetic_coeffs


def make_red(u_g=1.0, phi_g=0.0, z_eq=0.4, phi_z=1.2):
    return ReducedNetwork(
        u_g=u_g, phi_g=phi_g, phi_gl=0.2, z_eq=z_eq, phi_z=phi_z,
        z_gl_mag=1.0, p_gs=1.0,
    )


class TestPrefaultAngle:
    def test_no_injection(self, topology_healthy):
        red = network.reduce(topology_healthy)
        assert prefault_angle(red, CurrentInjection(0.0, 0.0)) == 0.0

    def test_vanishing_phase_sum(self):
        red = make_red(phi_z=0.3)
        assert prefault_angle(red, CurrentInjection(0.8, -0.3)) == pytest.approx(
            0.0, abs=1e-15
        )

    def test_benchmark_operating_point(self, topology_healthy):
        red = network.reduce(topology_healthy)
        inj = current_polar(0.8, 0.0)
        delta = prefault_angle(red, inj)
        assert delta == pytest.approx(0.31451891527982, rel=1e-12)
        _, u_q = pcc_voltage(red, delta, inj)
        assert abs(u_q) < 1e-12
        # independent bisection on the q-axis voltage over the stable branch
        lo, hi = -math.pi / 2, math.pi / 2
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if pcc_voltage(red, mid, inj)[1] > 0:
                lo = mid
            else:
                hi = mid
        assert delta == pytest.approx(0.5 * (lo + hi), abs=1e-10)

    def test_unbalanceable_injection(self):
        red = make_red(u_g=0.05, z_eq=1.0, phi_z=1.4)
        with pytest.raises(NoPrefaultEquilibriumError):
            prefault_angle(red, current_polar(0.0, -0.9))


class TestInitialJump:
    def test_no_disturbance(self, golden_analyses):
        # same reduction and injection at the operating point: nothing jumps
        a = golden_analyses["case_iii"]
        inj_pre = current_polar(*a.scenario.prefault_injection)
        delta_pre = prefault_angle(a.red_pre, inj_pre)
        init = initial_jump(
            a.red_pre, a.red_pre, delta_pre, a.scenario.pll, inj_pre, a.coeffs
        )
        assert init.delta_post == delta_pre
        assert abs(init.domega_post) < 1e-15
        assert init.e_k_post < 1e-28

    def test_zero_proportional_gain(self, golden_analyses):
        a = golden_analyses["case_i"]
        init = initial_jump(
            a.red_pre, a.red_fault, a.init.delta_pre,
            PLLParams(k_p=0.0, k_i=220.0),
            current_polar(*a.scenario.fault_injection), a.coeffs,
        )
        assert init.domega_post == 0.0
        assert init.e_k_post == 0.0
        assert init.delta_post == a.init.delta_post  # angle jump unaffected

    def test_benchmark_jump_values(self, golden_analyses):
        init = golden_analyses["case_i"].init
        assert init.delta_pre == pytest.approx(0.31451891527982, rel=1e-12)
        assert init.delta_post == pytest.approx(1.66800200695633, rel=1e-12)
        assert init.u_q_post == pytest.approx(-0.0314180672755925, rel=1e-12)
        assert init.domega_post == pytest.approx(init.u_q_post * 1.0, rel=1e-15)

    def test_jump_geometry(self, golden_analyses):
        a = golden_analyses["case_i"]
        eq = find_equilibria(a.coeffs)
        assert a.init.delta_post > eq.sep
        assert a.init.domega_post < 0.0

    def test_angle_jump_is_source_angle_shift(self, golden_analyses):
        a = golden_analyses["case_v"]
        assert a.init.delta_post - a.init.delta_pre == pytest.approx(
            a.red_pre.phi_g - a.red_fault.phi_g, rel=1e-15
        )


class TestAreas:
    def test_start_at_sep(self):
        c = synthetic_coeffs(0.1, -0.5, 0.05)
        eq = find_equilibria(c)
        s1, s2, s3 = areas(c, eq, eq.sep)
        assert s2 == pytest.approx(0.0, abs=1e-16)
        assert s1 > 0.0 and s3 > 0.0

    def test_start_at_right_uep(self):
        c = synthetic_coeffs(0.1, -0.5, 0.05)
        eq = find_equilibria(c)
        _, _, s3 = areas(c, eq, eq.uep_right)
        assert s3 == pytest.approx(0.0, abs=1e-16)

    def test_quadrature_oracle(self, golden_analyses):
        # areas equal the integral of the drive mismatch between the curves
        for name in ("case_i", "case_iii"):
            c = golden_analyses[name].coeffs
            eq = find_equilibria(c)
            delta_post = golden_analyses[name].init.delta_post
            s1, s2, s3 = areas(c, eq, delta_post)
            integrand = lambda x: -c.p_const - c.sine_amp * math.sin(x + c.sine_phase)
            q1, _ = quad(integrand, eq.sep, eq.uep_left)
            q2, _ = quad(integrand, eq.sep, delta_post)
            q3, _ = quad(integrand, delta_post, eq.uep_right)
            assert s1 == pytest.approx(q1, abs=1e-9)
            assert s2 == pytest.approx(q2, abs=1e-9)
            assert s3 == pytest.approx(q3, abs=1e-9)

    def test_all_nonnegative_on_goldens(self, golden_analyses):
        for analysis in golden_analyses.values():
            eq = find_equilibria(analysis.coeffs)
            s1, s2, s3 = areas(analysis.coeffs, eq, analysis.init.delta_post)
            assert s1 >= 0.0 and s2 >= 0.0 and s3 >= 0.0

    def test_monotone_in_start_angle(self):
        c = synthetic_coeffs(0.08, -0.5, 0.02)
        eq = find_equilibria(c)
        grid = np.linspace(eq.sep, eq.uep_right, 50)
        s2_values, s3_values = [], []
        for d0 in grid:
            _, s2, s3 = areas(c, eq, d0)
            s2_values.append(s2)
            s3_values.append(s3)
        assert np.all(np.diff(s2_values) >= -1e-15)
        assert np.all(np.diff(s3_values) <= 1e-15)

    def test_beyond_uep(self):
        c = synthetic_coeffs(0.1, -0.5, 0.0)
        eq = find_equilibria(c)
        with pytest.raises(BeyondUepError) as err:
            areas(c, eq, eq.uep_right + 0.1)
        assert err.value.side == "right"
        with pytest.raises(BeyondUepError):
            areas(c, eq, eq.uep_left - 0.1)

    def test_no_sep(self):
        c = synthetic_coeffs(0.9, -0.5, 0.0)
        with pytest.raises(BeyondUepError):
            areas(c, find_equilibria(c), 0.0)


def _init(delta_post, e_k):
    return InitialState(
        delta_pre=0.0, delta_post=delta_post,
        domega_post=-math.sqrt(e_k) if e_k else 0.0,
        u_q_post=0.0, e_k_post=e_k,
    )


class TestAssess:
    def test_golden_verdicts(self, golden_analyses):
        expected = {
            "case_i": (LosRisk.DECELERATING, False),
            "case_ii": (LosRisk.ACCELERATING, False),
            "case_iii": (LosRisk.ACCELERATING, True),
            "case_iv": (LosRisk.ACCELERATING, True),
            "case_v": (LosRisk.ACCELERATING, True),
        }
        for name, (risk, stable) in expected.items():
            verdict = golden_analyses[name].verdict
            assert verdict.risk is risk, name
            assert verdict.stable_type_specific is stable, name
            assert not verdict.no_sep

    def test_case_i_barrier_is_negative(self, golden_analyses):
        # the post-jump point sits above the left barrier: certain LOS
        v = golden_analyses["case_i"].verdict
        assert v.s1 - v.s2 < 0.0
        assert v.margin_decel < 0.0

    def test_unified_implies_type_specific(self, golden_analyses):
        for analysis in golden_analyses.values():
            v = analysis.verdict
            if v.stable_unified:
                assert v.stable_type_specific

    def test_no_sep_verdict(self):
        c = synthetic_coeffs(0.9, -0.5, 0.0)
        verdict = assess(c, find_equilibria(c), _init(0.0, 0.1))
        assert verdict.no_sep
        assert not verdict.stable_unified and not verdict.stable_type_specific
        assert verdict.risk is LosRisk.ACCELERATING
        assert verdict.outcome == "accelerating-los"
        assert math.isnan(verdict.s3)

    def test_beyond_uep_instant_los(self):
        c = synthetic_coeffs(0.1, -0.5, 0.0)
        eq = find_equilibria(c)
        verdict = assess(c, eq, _init(eq.uep_right + 0.2, 0.0))
        assert verdict.margin_accel < 0.0
        assert not verdict.stable_unified
        assert verdict.outcome == "accelerating-los"

    def test_decelerating_type_uses_left_barrier(self):
        c = synthetic_coeffs(-0.05, -0.5, 0.0)
        eq = find_equilibria(c)
        s1, s2, _ = areas(c, eq, 0.1)
        verdict = assess(c, eq, _init(0.1, (s1 - s2) * 0.5))
        assert verdict.risk is LosRisk.DECELERATING
        assert verdict.stable_type_specific
        verdict = assess(c, eq, _init(0.1, (s1 - s2) * 1.01))
        assert not verdict.stable_type_specific
        assert verdict.outcome == "decelerating-los"

    def test_marginal_risk_uses_both_barriers(self):
        c = synthetic_coeffs(0.0, -0.5, 0.0)
        eq = find_equilibria(c)
        verdict = assess(c, eq, _init(0.1, 1e-4))
        assert verdict.risk is LosRisk.MARGINAL
        assert verdict.stable_type_specific == verdict.stable_unified


class TestVerdictEnergyCoupling:
    def test_initial_energy_flows_into_verdict(self, golden_analyses):
        a = golden_analyses["case_ii"]
        assert a.verdict.e_k_post == a.init.e_k_post
        assert a.verdict.margin_accel == pytest.approx(
            a.verdict.s3 - a.init.e_k_post, rel=1e-14
        )
        assert a.verdict.margin_decel == pytest.approx(
            (a.verdict.s1 - a.verdict.s2) - a.init.e_k_post, rel=1e-14
        )
