import math

import numpy as np
import pytest

from ibgsg import network
from ibgsg.equilibria import approx_equilibria, find_equilibria
from ibgsg.reduced_model import ModelCoeffs, PLLParams, SGParams, smib_coefficients

from conftest import E_G, OMEGA_B, P_M, make_topology
from test_reduced_model import INJ_FAULT


def synthetic_coeffs(a, b, phi):
    return ModelCoeffs(
        t_p=0.01, t_eq=0.0099, alpha=100.0, p_const=a, sine_amp=b,
        sine_phase=phi, damp_coeff=0.0, dp_cos_coeff=0.0, p_in_eq=0.0,
        omega_b=OMEGA_B,
    )


def drive(c, delta):
    return c.p_const + c.sine_amp * math.sin(delta + c.sine_phase)


def oracle_bisect(c, lo, hi, n=200):
    flo = drive(c, lo)
    for _ in range(n):
        mid = 0.5 * (lo + hi)
        fm = drive(c, mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestClosedForm:
    def test_symmetric_well(self):
        eq = find_equilibria(synthetic_coeffs(0.0, -1.0, 0.0))
        assert eq.exists
        assert eq.sep == pytest.approx(0.0, abs=1e-15)
        assert eq.uep_left == pytest.approx(-math.pi, rel=1e-15)
        assert eq.uep_right == pytest.approx(math.pi, rel=1e-15)

    def test_saddle_node_boundary(self):
        eq = find_equilibria(synthetic_coeffs(0.5, -0.5, 0.1))
        assert not eq.exists
        assert eq.margin == pytest.approx(0.0, abs=1e-15)
        assert eq.sep == pytest.approx(eq.uep_right, rel=1e-12)  # merged roots

    def test_no_equilibrium(self):
        eq = find_equilibria(synthetic_coeffs(0.8, -0.5, 0.0))
        assert not eq.exists
        assert eq.margin < 0.0
        assert math.isnan(eq.sep)

    def test_zero_amplitude(self):
        eq = find_equilibria(synthetic_coeffs(0.3, 0.0, 0.0))
        assert not eq.exists

    def test_residuals_and_ordering(self, golden_analyses):
        for name in ("case_i", "case_ii", "case_iii", "case_iv", "case_v"):
            c = golden_analyses[name].coeffs
            eq = find_equilibria(c)
            assert eq.exists
            for root in (eq.sep, eq.uep_left, eq.uep_right):
                assert abs(drive(c, root)) < 1e-12
            assert eq.uep_left < eq.sep < eq.uep_right
            assert eq.uep_right - eq.uep_left == pytest.approx(
                2 * math.pi, abs=1e-9
            )

    def test_stability_slope_signs(self, golden_analyses):
        # numerical derivative of the drive: negative at the stable point,
        # positive at the unstable ones
        c = golden_analyses["case_iii"].coeffs
        eq = find_equilibria(c)
        h = 1e-7
        for root, sign in ((eq.sep, -1), (eq.uep_left, 1), (eq.uep_right, 1)):
            slope = (drive(c, root + h) - drive(c, root - h)) / (2 * h)
            assert sign * slope > 0.0

    def test_against_independent_bisection(self, golden_analyses):
        c = golden_analyses["case_iii"].coeffs
        eq = find_equilibria(c)
        phi = c.sine_phase
        assert eq.sep == pytest.approx(
            oracle_bisect(c, -phi - math.pi / 2, -phi + math.pi / 2), abs=1e-12
        )
        assert eq.uep_right == pytest.approx(
            oracle_bisect(c, -phi + math.pi / 2, -phi + 1.5 * math.pi), abs=1e-12
        )
        assert eq.sep < math.pi / 2  # principal-branch stable root


class TestApproximation:
    def test_exact_when_phase_zero(self):
        c = synthetic_coeffs(0.2, -0.7, 0.0)
        exact = find_equilibria(c)
        approx = approx_equilibria(c)
        assert approx.sep == pytest.approx(exact.sep, abs=1e-12)
        assert approx.uep_left == pytest.approx(exact.uep_left, abs=1e-12)
        assert approx.uep_right == pytest.approx(exact.uep_right, abs=1e-12)

    def test_trivial_center(self):
        approx = approx_equilibria(synthetic_coeffs(0.0, -1.0, 0.05))
        assert approx.sep == 0.0
        assert approx.uep_left == pytest.approx(-math.pi)
        assert approx.uep_right == pytest.approx(math.pi)

    def test_large_ratio_error_bound(self, golden_analyses):
        for name in ("case_i", "case_iii"):  # ratios 440 and 100
            c = golden_analyses[name].coeffs
            assert c.alpha >= 100.0
            exact = find_equilibria(c)
            approx = approx_equilibria(c)
            assert abs(approx.sep - exact.sep) < 0.02
            assert abs(approx.uep_left - exact.uep_left) < 0.02
            assert abs(approx.uep_right - exact.uep_right) < 0.02

    def test_error_shrinks_with_ratio(self, base):
        red = network.reduce(make_topology(0.05 / base.z_b))
        sg = SGParams(t_g=0.8, p_m=P_M, e_g=E_G)
        errors = []
        for k_i in (50.0, 500.0, 5000.0):
            c = smib_coefficients(red, sg, PLLParams(1.0, k_i), INJ_FAULT, OMEGA_B)
            exact = find_equilibria(c)
            approx = approx_equilibria(c)
            errors.append(
                max(
                    abs(approx.sep - exact.sep),
                    abs(approx.uep_left - exact.uep_left),
                    abs(approx.uep_right - exact.uep_right),
                )
            )
        assert errors[0] > errors[1] > errors[2]

    def test_same_existence_rule(self):
        c = synthetic_coeffs(0.8, -0.5, 0.0)
        assert not approx_equilibria(c).exists
        assert approx_equilibria(c).margin < 0.0
