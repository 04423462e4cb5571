import dataclasses
import math

import numpy as np
import pytest

from glpulse.errors import ConfigError
from glpulse.evolution import (BLOWUP_AMPLITUDE, FourierGrid, SimulationDiverged,
                               Stepper, align_to_orbit, evolve,
                               fitted_log_slope, grid_for_pulse,
                               homogeneous_drift, kink_speed_experiment,
                               left_front_position, level_crossing_width,
                               make_state, modulo_symmetry_distance,
                               pulse_on_grid, stabilization_experiment, step)
from glpulse.ansatz import solve_pulse
from glpulse.params import ModelParams, kink_quantities


def small_grid(width=40.0, n=512):
    return FourierGrid(width=width, n=n)


def smooth_field(grid, seed=0):
    rng = np.random.default_rng(seed)
    u = np.zeros(grid.n, dtype=complex)
    for k in range(1, 6):
        a, b = rng.standard_normal(2)
        u += (a + 1j * b) * np.exp(-grid.x ** 2 / (4.0 + k)) \
            * np.cos(2 * np.pi * k * grid.x / grid.width)
    return 0.3 * u


def test_grid_validation():
    with pytest.raises(ConfigError):
        FourierGrid(width=10.0, n=100)
    with pytest.raises(ConfigError):
        FourierGrid(width=-1.0, n=64)
    g = grid_for_pulse(ModelParams.from_L(3.0))
    assert g.width >= 4.0 * (3.0 + 25.0)
    assert g.dx <= 0.06


def test_parseval():
    g = small_grid()
    u = smooth_field(g)
    uh = np.fft.fft(u)
    assert g.norm_l2(u) ** 2 == pytest.approx(
        np.sum(np.abs(uh) ** 2) * g.dx / g.n, rel=1e-12)


def run_steps(u, params, grid, nsteps=10, dt=0.01):
    stepper = Stepper(params, grid, dt)
    state = make_state(u, params, grid)
    for _ in range(nsteps):
        state = step(state, dt, stepper=stepper)
    return state.u


def test_phase_equivariance():
    g = small_grid()
    p = ModelParams.from_L(3.0, eps=1e-4)
    u = smooth_field(g)
    phase = np.exp(1j * 0.7)
    a = run_steps(phase * u, p, g)
    b = phase * run_steps(u, p, g)
    assert np.max(np.abs(a - b)) < 1e-10


def test_translation_equivariance_integer_cells():
    g = small_grid()
    p = ModelParams.from_L(3.0, eps=1e-4)
    u = smooth_field(g)
    shift = 17
    a = run_steps(np.roll(u, shift), p, g)
    b = np.roll(run_steps(u, p, g), shift)
    assert np.max(np.abs(a - b)) < 1e-12


def test_conjugation_equivariance():
    g = small_grid()
    u = smooth_field(g)
    p = ModelParams.from_L(3.0, eps=1e-4, mu=(0.0, 0.0, 1.0, 0.5))
    p_neg = dataclasses.replace(p, mu=(0.0, 0.0, -1.0, -0.5))
    a = run_steps(np.conj(u), p_neg, g)
    b = np.conj(run_steps(u, p, g))
    assert np.max(np.abs(a - b)) < 1e-12


def test_zero_fixed_point():
    g = small_grid(n=64)
    p = ModelParams.from_L(3.0)
    out = run_steps(np.zeros(g.n, dtype=complex), p, g, nsteps=50)
    assert np.all(out == 0.0)


def test_etd2rk_second_order():
    g = small_grid()
    p = ModelParams.from_L(3.0, eps=1e-4)
    u = smooth_field(g, seed=3)
    sols = {}
    for dt in (0.02, 0.01, 0.005):
        n = int(round(1.0 / dt))
        sols[dt] = run_steps(u, p, g, nsteps=n, dt=dt)
    e1 = np.max(np.abs(sols[0.02] - sols[0.01]))
    e2 = np.max(np.abs(sols[0.01] - sols[0.005]))
    assert 3.2 <= e1 / e2 <= 5.0


def test_align_exact_orbit_copy():
    g = small_grid()
    ref = smooth_field(g, seed=5)
    d0, X0, psi0 = align_to_orbit(ref, ref, g)
    assert d0 < 1e-12 and abs(X0) < 1e-10 and abs(psi0) < 1e-10
    # known rotation + integer-cell shift must be recovered exactly
    shift_cells = 41
    X_true = shift_cells * g.dx
    psi_true = 1.234
    moved = np.exp(1j * psi_true) * np.roll(ref, shift_cells)
    d, X, psi = align_to_orbit(moved, ref, g)
    assert d < 1e-10
    assert X == pytest.approx(X_true, abs=1e-9)
    assert psi == pytest.approx(psi_true, abs=1e-9)


def test_align_subcell_shift():
    # fractional-cell translation via the FFT shift theorem
    g = small_grid()
    ref = smooth_field(g, seed=8)
    X_true = 0.3 * g.dx
    moved = np.fft.ifft(np.fft.fft(ref) * np.exp(-1j * g.wavenumbers * X_true))
    d, X, _ = align_to_orbit(moved, ref, g)
    assert d < 1e-10
    assert X == pytest.approx(X_true, abs=1e-9)


def test_distance_detects_shape_change():
    g = small_grid()
    ref = smooth_field(g, seed=5)
    bump = 0.05 * np.exp(-(g.x - 3.0) ** 2)
    d = modulo_symmetry_distance(ref + bump, ref, g)
    assert d > 0.01


def test_level_crossing_width():
    g = small_grid()
    sigma = 2.0
    u = np.exp(-g.x ** 2 / (2.0 * sigma ** 2)).astype(complex)
    w = level_crossing_width(g, np.abs(u) ** 2, 0.5)
    assert w == pytest.approx(2.0 * sigma * math.sqrt(math.log(2.0)),
                              rel=1e-3)


def test_left_front_position():
    g = small_grid()
    u = 0.5 * (1.0 + np.tanh(g.x + 4.0))
    pos = left_front_position(g, u, 0.5)
    assert pos == pytest.approx(-4.0, abs=1e-2)


def test_fitted_log_slope_exact():
    t = np.linspace(0.0, 100.0, 101)
    v = 3.0 * np.exp(0.01 * t)
    assert fitted_log_slope(t, v) == pytest.approx(0.01, rel=1e-10)


def test_pulse_embedding(pulse_L5_y1):
    p = pulse_L5_y1.params_solved()
    g = grid_for_pulse(p)
    field = pulse_on_grid(pulse_L5_y1, g)
    # zero beyond the solver window, pulse values inside
    outside = np.abs(g.x) > pulse_L5_y1.grid.X
    assert np.all(field[outside] == 0.0)
    i = np.argmin(np.abs(g.x))            # x = 0 is a sample of both grids
    assert field[i] == pytest.approx(
        pulse_L5_y1.u[pulse_L5_y1.grid.mid], rel=1e-9)
    assert g.norm_l2(field) > 0.1


def test_blow_up_detected():
    g = small_grid(n=64)
    p = ModelParams.from_L(3.0)
    u = (BLOWUP_AMPLITUDE + 1.0) * np.ones(g.n, dtype=complex)
    state = make_state(u, p, g)
    # the quintic term is defocusing, so use a step too small to decay
    # back under the cap
    with pytest.raises(SimulationDiverged) as exc:
        step(state, 1e-5)
    assert exc.value.state.blown_up


def test_evolve_history_cadence():
    g = small_grid()
    p = ModelParams.from_L(3.0, eps=1e-4)
    state = make_state(smooth_field(g), p, g)
    out = evolve(state, T=5.0, dt=0.01, cadence=1.0)
    h = out.history
    assert len(h.times) == 6                    # t = 0 included
    assert np.allclose(np.diff(h.times), 1.0, atol=1e-9)
    assert out.t == pytest.approx(5.0, abs=1e-9)
    d = h.as_dict()
    assert set(d) >= {"times", "amp_max", "half_width"}


def test_homogeneous_drift_values():
    assert homogeneous_drift(0.01, 0.0, T=20.0) == 0.0
    assert homogeneous_drift(0.01, 0.03, T=20.0) < 1e-6


def test_kink_speed_against_formula():
    res = kink_speed_experiment(0.01, 0.03, T=200.0)
    kq = kink_quantities(0.01, 0.03)
    assert res.c_formula == pytest.approx(kq.c, rel=1e-12)
    assert abs(res.c_measured - res.c_formula) <= 0.01 * abs(res.c_formula)


def test_stabilization_unstable_quickly():
    p = ModelParams.from_L(2.5)
    pulse = solve_pulse(p)
    from glpulse.stability import m11_of_state
    m11 = m11_of_state(pulse)
    res = stabilization_experiment(pulse.params_solved(), T=30.0,
                                   pulse=pulse, m11=m11)
    assert res.verdict == "unstable"
    assert res.slope > 1e-5
    d = res.as_dict()
    assert d["verdict"] == "unstable" and "alpha" in d
