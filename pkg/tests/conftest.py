"""Shared fixtures.

The expensive objects (certified pulse solves, eigensolves, threshold
searches, long time integrations) are session-scoped so the unit tests
and the acceptance suite share one computation each.
"""

import numpy as np
import pytest

# one line per acceptance criterion, echoed after the run
_criterion_lines = []


def record_criterion(line: str) -> None:
    _criterion_lines.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_criterion_lines):
            terminalreporter.write_line(line)

from glpulse.ansatz import AnsatzState, solve_pulse
from glpulse.grids import Grid
from glpulse.operators import shrink_mode
from glpulse.params import ModelParams
from glpulse.profiles import eval_profile
from glpulse import stability


@pytest.fixture(scope="session")
def pulse_L5_y1():
    """Certified pulse at L=5, y=1 on the default grid."""
    return solve_pulse(ModelParams.from_L(5.0, y=1.0))


@pytest.fixture(scope="session")
def stab_L5_y1(pulse_L5_y1):
    """Linearization + small-spectrum report at L=5, y=1 (h=0.04 grid)."""
    params = ModelParams.from_L(5.0, y=1.0)
    grid = Grid.for_params(params, h_max=0.04, order=8)
    state = solve_pulse(params, grid=grid)
    sub = stability.restrict_state(state)
    lin = stability.assemble_D(sub)
    report = stability.small_spectrum_D(lin)
    return {"state": sub, "lin": lin, "report": report}


@pytest.fixture(scope="session")
def alpha_c_L3():
    return stability.find_alpha_c(ModelParams.from_L(3.0))


@pytest.fixture(scope="session")
def alpha_c_L4():
    return stability.find_alpha_c(ModelParams.from_L(4.0))


def exact_real_pulse(L):
    """alpha = 0 steady state: the real profile with no phase content."""
    params = ModelParams.from_L(L)
    grid = Grid.for_params(params)
    prof = eval_profile(params, grid.x)
    pulse = AnsatzState(params=params, grid=grid, xi=prof.r,
                        eta=np.zeros_like(prof.r), tau=0.0, eps=0.0,
                        a_coeffs=(0.0, 0.0, 0.0, 0.0), eps_flat_value=0.0)
    lam, _ = shrink_mode(params, grid)
    return params, pulse, lam


# ---------------------------------------------------------------------------
# long time integrations (acceptance criteria 12/13); run once per session
# ---------------------------------------------------------------------------

SWEEP_Y = [0.3, 0.6, 1.0, 1.5]


@pytest.fixture(scope="session")
def sweep_simplified_L3():
    from glpulse.evolution import alpha_sweep
    return alpha_sweep(3.0, SWEEP_Y, mu=(0.0, 0.0, 1.0, 0.0), T=1000.0)


@pytest.fixture(scope="session")
def sweep_mu11_L3():
    from glpulse.evolution import alpha_sweep
    return alpha_sweep(3.0, SWEEP_Y, mu=(0.0, 0.0, 1.0, 1.0), T=1000.0)


@pytest.fixture(scope="session")
def matrix_L25():
    """L=2.5 column of the verdict matrix: alpha=0 and y in {0.3, 1.0}."""
    from glpulse.evolution import alpha_sweep, stabilization_experiment
    params, pulse, lam = exact_real_pulse(2.5)
    alpha0 = stabilization_experiment(params, T=1000.0, pulse=pulse, m11=lam)
    swept = alpha_sweep(2.5, [0.3, 1.0], T=1000.0)
    return {"alpha0": alpha0, "y03": swept[0], "y10": swept[1],
            "lambda_flat": lam}
