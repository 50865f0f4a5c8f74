import math

import pytest

from ibgsg import kernels, scenario as scn
from ibgsg.network import BaseQuantities, Impedance, NetworkTopology

# Benchmark circuit numbers shared by many oracles.
E_G = 1.05
P_M = 0.2465
Z_L = complex(0.99, 0.1)
Z_G = complex(0.01, 0.1)
Z_P = complex(0.01, 0.3)
S_B = 20e3
U_B = 690.0
OMEGA_B = 100.0 * math.pi
I_RATED = 0.8


@pytest.fixture(scope="session")
def base():
    return BaseQuantities(s_b=S_B, u_b=U_B, omega_b=OMEGA_B)


def make_topology(r_f_pu=None):
    return NetworkTopology(
        e_g=E_G,
        z_g=Impedance(Z_G.real, Z_G.imag),
        z_p=Impedance(Z_P.real, Z_P.imag),
        z_l=Impedance(Z_L.real, Z_L.imag),
        r_f=r_f_pu,
    )


@pytest.fixture(scope="session")
def topology_healthy():
    return make_topology()


@pytest.fixture(scope="session")
def topology_faulted(base):
    return make_topology(0.05 / base.z_b)


@pytest.fixture(scope="session")
def golden_scenarios():
    return scn.table2_scenarios()


@pytest.fixture(scope="session")
def golden_analyses(golden_scenarios):
    return {name: scn.analyze_case(s) for name, s in golden_scenarios.items()}


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    return kernels.get_backend(request.param)
