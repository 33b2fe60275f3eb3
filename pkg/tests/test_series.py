import math

import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss

from viscowave.errors import GridTooCoarse, SingularSystem
from viscowave.model import InitialData, Normalization, SpectralBasis
from viscowave.modal import exact_coefficients
from viscowave.series import (
    ExpSum,
    SolutionField,
    auto_steps,
    modal_exp_sum,
    stack_exp_sums,
    trace_times,
    values_on_grid,
    volterra_oracle,
    volterra_oracle_batch,
)
from viscowave.spectrum import exact_roots


def _gauss_integral(fn, T, nodes=600):
    x, w = leggauss(nodes)
    t = 0.5 * T * (x + 1.0)
    return float(np.sum(0.5 * T * w * fn(t)))


@pytest.fixture
def real_pair():
    # conjugate pair plus a decaying real term: a real-valued signal
    return ExpSum(
        np.array([0.8 + 0.3j, 0.8 - 0.3j, -0.4]),
        np.array([-0.05 + 1.3j, -0.05 - 1.3j, -0.2]),
    )


def test_exp_sum_evaluation(real_pair):
    t = np.linspace(0.0, 4.0, 9)
    direct = np.sum(
        real_pair.amps[:, None] * np.exp(real_pair.exps[:, None] * t[None, :]), axis=0
    )
    np.testing.assert_allclose(real_pair(t), direct.real, atol=1e-15)


def test_exp_sum_derivative(real_pair):
    t = np.linspace(0.1, 3.0, 7)
    h = 1e-6
    fd = (real_pair(t + h) - real_pair(t - h)) / (2.0 * h)
    np.testing.assert_allclose(real_pair.derivative()(t), fd, atol=1e-7)


def test_exp_sum_algebra(real_pair):
    t = np.linspace(0.0, 2.0, 5)
    np.testing.assert_allclose(real_pair.scaled(2.5)(t), 2.5 * real_pair(t), atol=1e-14)
    both = real_pair + real_pair.scaled(-1.0)
    np.testing.assert_allclose(both(t), 0.0, atol=1e-14)


def test_time_reversal(real_pair):
    T = 3.7
    rev = real_pair.time_reversed(T)
    t = np.linspace(0.0, T, 11)
    np.testing.assert_allclose(rev(t), real_pair(T - t), atol=1e-13)


def test_integral_product_matches_quadrature(real_pair):
    other = ExpSum(np.array([0.5, 0.5]), np.array([0.9j, -0.9j]))
    T = 3.0
    exact = real_pair.integral_product(other, T)
    quad = _gauss_integral(lambda t: real_pair(t) * other(t), T)
    assert exact == pytest.approx(quad, abs=1e-12)
    assert real_pair.l2_norm(T) == pytest.approx(
        math.sqrt(_gauss_integral(lambda t: real_pair(t) ** 2, T)), rel=1e-12
    )


def test_integral_product_small_exponent_branch():
    # |z T| below the series window exercises the Taylor evaluation
    tiny = ExpSum(np.array([1.0]), np.array([1e-9 + 0j]))
    one = ExpSum(np.array([1.0]), np.array([0.0 + 0j]))
    T = 2.0
    assert tiny.integral_product(one, T) == pytest.approx(2.0 + 1e-9 * 2.0, rel=1e-12)


def test_convolve_complement_matches_quadrature(params, real_pair):
    # (I - K*) y at fixed t, K the two-term exponential kernel
    shifted = real_pair.convolve_complement(params)
    for t in (0.5, 1.7, 3.2):
        x, w = leggauss(400)
        s = 0.5 * t * (x + 1.0)
        conv = float(np.sum(0.5 * t * w * params.kernel(t - s) * real_pair(s)))
        assert shifted(np.array([t]))[0] == pytest.approx(real_pair(t) - conv, abs=1e-12)


def test_convolve_complement_singular_exponent(params):
    clash = ExpSum(np.array([1.0]), np.array([-params.r1 + 0j]))
    with pytest.raises(SingularSystem):
        clash.convolve_complement(params)


def test_stack_exp_sums_dedupes():
    a = ExpSum(np.array([1.0, 2.0]), np.array([0.5j, -0.1 + 0j]))
    b = ExpSum(np.array([3.0]), np.array([0.5j]))
    A, exps = stack_exp_sums([a, b])
    assert A.shape == (2, exps.size)
    assert exps.size == 2
    t = np.linspace(0.0, 1.0, 5)
    vals = values_on_grid(A, exps, t)
    np.testing.assert_allclose(vals[0], a(t), atol=1e-14)
    np.testing.assert_allclose(vals[1], b(t), atol=1e-14)


def test_modal_exp_sum_matches_time_stepper(params):
    lam = 9.0
    r = exact_roots(params, lam, n=3)
    co = exact_coefficients(params, r, 0.7, -0.2)
    signal = modal_exp_sum(r, co)
    times, values = volterra_oracle(params, lam, 0.7, -0.2, 12.0)
    np.testing.assert_allclose(signal(times), values, atol=1e-8)


def test_oracle_batch_matches_single(params):
    lams = np.array([1.0, 4.0])
    times, traj = volterra_oracle_batch(params, lams, np.array([1.0, 0.3]), np.array([0.0, 0.1]), 5.0)
    t1, v1 = volterra_oracle(params, 4.0, 0.3, 0.1, 5.0)
    np.testing.assert_allclose(times, t1, atol=1e-15)
    np.testing.assert_allclose(traj[:, 1], v1, atol=1e-12)


def test_auto_steps_scaling():
    base = auto_steps(10.0, 10.0)
    assert auto_steps(20.0, 10.0) > base
    assert auto_steps(10.0, 20.0) > base
    assert auto_steps(1.0, 1.0) >= 16


def test_solution_field_initial_data(params):
    basis = SpectralBasis(params, Normalization.ORTHONORMAL)
    data = InitialData(np.array([1.0, 0.0, -0.5]), np.array([0.2, 0.3, 0.0]))
    field = SolutionField.from_data(params, basis, data)
    x = np.linspace(0.0, math.pi, 41)
    np.testing.assert_allclose(
        field.evaluate(np.array([0.0]), x), basis.synthesize(data.u0, x), atol=1e-12
    )
    np.testing.assert_allclose(
        field.evaluate_velocity(np.array([0.0]), x),
        basis.synthesize(data.u1, x),
        atol=1e-10,
    )


def test_solution_field_dirichlet(params):
    basis = SpectralBasis(params, Normalization.ORTHONORMAL)
    data = InitialData(np.array([0.4, -0.1]), np.array([0.0, 0.2]))
    field = SolutionField.from_data(params, basis, data)
    t = np.linspace(0.0, 6.0, 13)
    ends = field.evaluate(t, np.array([0.0, math.pi]))
    np.testing.assert_allclose(ends, 0.0, atol=1e-13)


def test_boundary_trace_matches_exp_sum(params):
    basis = SpectralBasis(params, Normalization.ORTHONORMAL)
    data = InitialData(np.array([0.3, 0.5, -0.2]), np.array([0.0, 0.1, 0.4]))
    field = SolutionField.from_data(params, basis, data)
    times = trace_times(field.roots[-1].omega.real, 8.0)
    trace = field.boundary_trace(times)
    closed = field.trace_exp_sum()
    np.testing.assert_allclose(trace.values, closed(times), atol=1e-12)
    left = field.boundary_trace(times, left=True)
    closed_left = field.trace_exp_sum(left=True)
    np.testing.assert_allclose(left.values, closed_left(times), atol=1e-12)


def test_boundary_trace_rejects_sparse_grid(params):
    basis = SpectralBasis(params, Normalization.ORTHONORMAL)
    data = InitialData(np.zeros(20), np.ones(20))
    field = SolutionField.from_data(params, basis, data)
    with pytest.raises(GridTooCoarse):
        field.boundary_trace(np.linspace(0.0, 8.0, 9))


def test_long_time_limit_is_constant_mode_sum(params):
    # oscillation and rho decay leave only the zero-frequency amplitudes
    lam = 4.0
    r = exact_roots(params, lam, n=2)
    co = exact_coefficients(params, r, 1.0, 0.5)
    signal = modal_exp_sum(r, co)
    late = signal(np.array([400.0]))[0]
    assert late == pytest.approx(co.R1, abs=1e-12)
