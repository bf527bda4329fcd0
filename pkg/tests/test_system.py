import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from crossgram.benchmark import BenchmarkSpec, inverse_sylvester_procedure
from crossgram.errors import DivergenceError, ResonanceError, ShapeError
from crossgram.system import (LtiSystem, TimeGrid, Trajectory, adjoint, impulse_state_response,
                              rk4_substeps, simulate, transfer_function)

SCALAR = LtiSystem([[-1.0]], [[1.0]], [[1.0]])
GRID = TimeGrid(0.01, 100)


def test_shape_checks():
    with pytest.raises(ShapeError):
        LtiSystem(np.zeros((2, 3)), np.zeros((2, 1)), np.zeros((1, 2)))
    with pytest.raises(ShapeError):
        LtiSystem(np.eye(2), np.zeros((3, 1)), np.zeros((1, 2)))
    with pytest.raises(ShapeError):
        LtiSystem(np.eye(2), np.zeros((2, 1)), np.zeros((1, 3)))


def test_vector_io_maps_are_promoted():
    sys = LtiSystem(-np.eye(3), [1.0, 2.0, 3.0], [1.0, 0.0, 0.0])
    assert (sys.N, sys.M, sys.Q) == (3, 1, 1)
    assert sys.is_square() and sys.is_dissipative()


def test_grid():
    assert GRID.horizon == pytest.approx(1.0)
    assert len(GRID.times) == 101
    assert TimeGrid.from_horizon(20.0, 0.01).count == 2000
    np.testing.assert_allclose(GRID.weights("rectangle").sum(), 1.0)
    np.testing.assert_allclose(GRID.weights("trapezoid").sum(), 1.0)
    with pytest.raises(ValueError):
        TimeGrid(-0.1, 10)
    with pytest.raises(ValueError):
        TimeGrid(0.1, 0)


def test_scalar_decay_accuracy():
    state, output = simulate(SCALAR, [1.0], None, GRID)
    assert abs(state.samples[-1, 0] - np.exp(-1.0)) <= 1e-9
    np.testing.assert_array_equal(state.samples, output.samples)


def test_zero_input_zero_state():
    state, output = simulate(SCALAR, None, None, GRID)
    assert not state.samples.any() and not output.samples.any()


def test_integrator_is_exact_for_ramp():
    sys = LtiSystem([[0.0]], [[1.0]], [[1.0]])
    state, _ = simulate(sys, None, np.ones((100, 1)), GRID)
    np.testing.assert_allclose(state.samples[:, 0], GRID.times, rtol=0, atol=1e-13)


def test_input_shape_checked():
    with pytest.raises(ShapeError):
        simulate(SCALAR, None, np.ones((10, 1)), GRID)


def test_divergence_names_step():
    sys = LtiSystem([[-5000.0]], [[1.0]], [[1.0]])
    with pytest.raises(DivergenceError) as info:
        simulate(sys, [1.0], None, GRID)
    assert info.value.step is not None and info.value.step >= 1
    assert "step" in str(info.value)


def test_substeps_restore_stability():
    sys = LtiSystem([[-500.0]], [[1.0]], [[1.0]])
    m = rk4_substeps(sys.A, GRID.step)
    assert m == 5
    state, _ = simulate(sys, [1.0], None, GRID, substeps=m)
    assert np.all(np.abs(state.samples[1:]) < 1e-2)


def test_impulse_response():
    x = impulse_state_response(SCALAR, [1.0], 1.0, GRID)
    np.testing.assert_allclose(x.samples[:, 0], np.exp(-GRID.times), rtol=1e-9)
    assert not impulse_state_response(SCALAR, [1.0], 0.0, GRID).samples.any()
    sys = LtiSystem(-np.eye(2), [[1.0, 2.0], [3.0, 4.0]], np.eye(2))
    x = impulse_state_response(sys, [0.0, 1.0], 1.0, GRID)
    np.testing.assert_array_equal(x.samples[0], [2.0, 4.0])


def test_adjoint():
    sys = LtiSystem([[-1.0, 1.0], [0.0, -2.0]], [[1.0], [0.0]], [[0.0, 1.0]])
    adj = adjoint(sys)
    np.testing.assert_array_equal(adj.A, [[-1.0, 0.0], [1.0, -2.0]])
    np.testing.assert_array_equal(adj.B, [[0.0], [1.0]])
    np.testing.assert_array_equal(adj.C, [[1.0, 0.0]])
    twice = adjoint(adj)
    for X, Y in ((twice.A, sys.A), (twice.B, sys.B), (twice.C, sys.C)):
        np.testing.assert_array_equal(X, Y)


def test_adjoint_of_symmetric_system_is_itself():
    sys = inverse_sylvester_procedure(BenchmarkSpec(N=6, seed=4)).sys
    adj = adjoint(sys)
    np.testing.assert_array_equal(adj.A, sys.A)
    np.testing.assert_array_equal(adj.B, sys.B)


def test_primal_and_adjoint_impulse_coincide_for_sss():
    sys = inverse_sylvester_procedure(BenchmarkSpec(N=12, M=2, seed=3)).sys
    for m in range(2):
        e = np.eye(2)[m]
        x = impulse_state_response(sys, e, 1.0, GRID, substeps=rk4_substeps(sys.A, GRID.step))
        z = impulse_state_response(adjoint(sys), e, 1.0, GRID,
                                   substeps=rk4_substeps(sys.A, GRID.step))
        np.testing.assert_allclose(x.samples, z.samples, rtol=0,
                                   atol=1e-12 * np.abs(x.samples).max())


def test_transfer_function():
    assert transfer_function(SCALAR, 0.0)[0, 0] == pytest.approx(1.0)
    assert abs(transfer_function(SCALAR, 1e6j)[0, 0]) < 1e-4
    zero = LtiSystem([[-1.0]], [[0.0]], [[1.0]])
    assert transfer_function(zero, 1j)[0, 0] == 0
    with pytest.raises(ResonanceError):
        transfer_function(LtiSystem([[0.0]], [[1.0]], [[1.0]]), 0.0)


def test_trajectory_csv_roundtrip(tmp_path):
    _, y = simulate(SCALAR, [1.0], None, GRID)
    y.to_csv(tmp_path / "y.csv")
    back = Trajectory.from_csv(tmp_path / "y.csv")
    np.testing.assert_array_equal(back.samples, y.samples)
    first = (tmp_path / "y.csv").read_text().splitlines()[1].split(",")
    assert float(first[0]) == 0.01


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_rk4_fourth_order(seed):
    rng = np.random.default_rng(seed)
    n = 6
    G = rng.standard_normal((n, n))
    A = G - (np.abs(np.linalg.eigvals(G).real).max() + 1.0) * np.eye(n)
    sys = LtiSystem(A, np.zeros((n, 1)), np.zeros((1, n)))
    x0 = rng.standard_normal(n)
    T = 1.0
    exact = expm(A * T) @ x0
    errors = []
    for h in (0.1, 0.05):
        grid = TimeGrid.from_horizon(T, h)
        state, _ = simulate(sys, x0, None, grid)
        errors.append(np.linalg.norm(state.samples[-1] - exact))
    assert errors[0] / errors[1] >= 12


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_simulate_linearity(seed):
    rng = np.random.default_rng(seed)
    n, m = 5, 2
    A = -np.eye(n) + 0.3 * rng.standard_normal((n, n))
    sys = LtiSystem(A, rng.standard_normal((n, m)), rng.standard_normal((2, n)))
    grid = TimeGrid(0.05, 40)
    u1 = rng.standard_normal((40, m))
    u2 = rng.standard_normal((40, m))
    _, y1 = simulate(sys, None, u1, grid)
    _, y2 = simulate(sys, None, u2, grid)
    _, y12 = simulate(sys, None, u1 + u2, grid)
    ref = y12.samples
    assert np.linalg.norm(ref - y1.samples - y2.samples) <= 1e-10 * max(np.linalg.norm(ref), 1.0)
