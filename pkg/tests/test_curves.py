import numpy as np
import pytest
import sympy

import targetflow as tf
from targetflow.errors import ResolutionTooLow, SelfIntersecting

from conftest import (bean_raw, circle_raw, curvature_extrema_oracle,
                      ellipse_raw, raw_curvature, raw_length_quad)

# frozen oracle values (dense closed-form sampling / adaptive quadrature)
BEAN_LENGTH = 40.56685805305811
BEAN_KMIN = -0.8888888888888888
BEAN_KMAX = 0.6686674144447661
ELLIPSE_LENGTH = 9.688448220547677


def test_circle_length(circle256):
    assert circle256.length == pytest.approx(2 * np.pi, abs=1e-12)


def test_ellipse_length(ellipse512):
    oracle = raw_length_quad(ellipse_raw(2.0, 1.0))
    assert oracle == pytest.approx(ELLIPSE_LENGTH, abs=1e-9)
    assert ellipse512.length == pytest.approx(oracle, abs=1e-9)


def test_bean_length(bean512):
    # spec'd oracle: 1e6-sample quadrature of |eta'| on the raw parametrization
    raw = bean_raw()
    s = np.linspace(0, 2 * np.pi, 10 ** 6, endpoint=False)
    d = raw["d1"](s)
    oracle = np.mean(np.hypot(d[:, 0], d[:, 1])) * 2 * np.pi
    assert oracle == pytest.approx(BEAN_LENGTH, abs=1e-9)
    assert bean512.length == pytest.approx(oracle, abs=1e-9)


def test_bean_is_embedded_nonconvex(bean512):
    assert bean512.kmin < 0 < bean512.kmax
    assert tf.polygon_is_simple(bean512.position)


def test_curvature_profile_circle():
    curve = tf.build_target(tf.CurveSpec("circle", {"radius": 2.0}), 256)
    k, kmin, kmax = tf.curvature_profile(curve)
    assert np.allclose(k, 0.5, atol=1e-11)
    assert kmin == pytest.approx(0.5, abs=1e-11)
    assert kmax == pytest.approx(0.5, abs=1e-11)


def test_curvature_profile_ellipse(ellipse512):
    _, kmin, kmax = tf.curvature_profile(ellipse512)
    assert kmax == pytest.approx(2.0, abs=1e-7)    # a / b^2
    assert kmin == pytest.approx(0.25, abs=1e-7)   # b / a^2


def test_curvature_profile_bean(bean512):
    lo, hi = curvature_extrema_oracle(bean_raw(), samples=200_000)
    assert lo == pytest.approx(BEAN_KMIN, abs=1e-9)
    assert hi == pytest.approx(BEAN_KMAX, abs=1e-9)
    _, kmin, kmax = tf.curvature_profile(bean512)
    assert kmin == pytest.approx(lo, abs=2e-6)
    assert kmax == pytest.approx(hi, abs=2e-6)


def oracle_params_at_nodes(raw, u_nodes):
    """Raw parameters of arclength nodes via trapezoid cumulative arclength
    (independent of the package's spectral antiderivative + PCHIP path)."""
    m = 2 ** 18
    s_dense = np.linspace(0, 2 * np.pi, m + 1)
    speed = np.hypot(raw["d1"](s_dense)[:, 0], raw["d1"](s_dense)[:, 1])
    arc = np.concatenate(
        [[0.0], np.cumsum(0.5 * (speed[:-1] + speed[1:]))]) * (2 * np.pi / m)
    return np.interp(u_nodes, arc, s_dense)


@pytest.mark.parametrize("spec,raw,n", [
    (tf.CurveSpec("circle", {"radius": 1.0}), circle_raw(1.0), 256),
    (tf.CurveSpec("ellipse", {"a": 2.0, "b": 1.0}), ellipse_raw(2.0, 1.0), 256),
    (tf.CurveSpec("ellipse", {"a": 2.0, "b": 1.0}), ellipse_raw(2.0, 1.0), 512),
    (tf.CurveSpec("bean"), bean_raw(), 512),
    (tf.CurveSpec("bean"), bean_raw(), 1024),
])
def test_curvature_against_closed_form(spec, raw, n):
    curve = tf.build_target(spec, n)
    s_at = oracle_params_at_nodes(raw, curve.u)
    k_oracle = raw_curvature(raw, s_at)
    assert np.max(np.abs(curve.k - k_oracle)) <= 1e-6


def test_spectral_convergence_under_doubling():
    for spec in (tf.CurveSpec("circle", {"radius": 1.0}),
                 tf.CurveSpec("ellipse", {"a": 2.0, "b": 1.0})):
        coarse = tf.build_target(spec, 256)
        fine = tf.build_target(spec, 512)
        assert np.max(np.abs(fine.k[::2] - coarse.k)) <= 1e-8


def test_frame_orthonormality(bean512, ellipse512):
    for curve in (bean512, ellipse512):
        norms = np.hypot(curve.tangent[:, 0], curve.tangent[:, 1])
        assert np.max(np.abs(norms - 1.0)) <= 1e-10
        dots = np.einsum("ij,ij->i", curve.tangent, curve.normal)
        assert np.max(np.abs(dots)) <= 1e-10


def test_tangent_derivative_is_curvature_times_normal(bean512):
    tu = tf.periodic_derivative(bean512.tangent.T, 1, bean512.length).T
    resid = tu - bean512.k[:, None] * bean512.normal
    assert np.max(np.abs(resid)) <= 1e-6


def test_counterclockwise_signed_area(bean512, ellipse512, circle256):
    for curve in (bean512, ellipse512, circle256):
        x, y = curve.position[:, 0], curve.position[:, 1]
        area = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
        assert area > 0


def test_clockwise_fourier_input_is_normalized():
    # circle traversed clockwise: y = -sin s; construction flips orientation
    spec = tf.CurveSpec("fourier", {"x_cos": [0.0, 1.0], "x_sin": [0.0, 0.0],
                                    "y_cos": [0.0, 0.0], "y_sin": [0.0, -1.0]})
    curve = tf.build_target(spec, 128)
    x, y = curve.position[:, 0], curve.position[:, 1]
    assert 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y) > 0
    assert np.allclose(curve.k, 1.0, atol=1e-10)


def test_unit_circle_frame_convention(circle256):
    # tau_u = k nu with k = +1; normal points inward (toward the center)
    assert np.allclose(circle256.k, 1.0, atol=1e-11)
    inward = -circle256.position  # unit inward radial
    assert np.max(np.abs(circle256.normal - inward)) <= 1e-10


def test_periodic_derivative_single_mode():
    n, L = 128, 2 * np.pi
    u = np.arange(n) * (L / n)
    d = tf.periodic_derivative(np.sin(2 * np.pi * u / L), 1, L)
    assert np.max(np.abs(d - (2 * np.pi / L) * np.cos(2 * np.pi * u / L))) <= 1e-10


def test_periodic_derivative_constant():
    for order in (1, 2, 3):
        d = tf.periodic_derivative(np.full(64, 3.7), order, 5.0)
        assert np.max(np.abs(d)) <= 1e-12


def test_periodic_derivative_exp_sin_sympy_oracle():
    n, L = 256, 2 * np.pi
    u = np.arange(n) * (L / n)
    x = sympy.symbols("x")
    expr = sympy.exp(sympy.sin(2 * sympy.pi * x / L))
    second = sympy.lambdify(x, sympy.diff(expr, x, 2), "numpy")
    d = tf.periodic_derivative(np.exp(np.sin(2 * np.pi * u / L)), 2, L)
    assert np.max(np.abs(d - second(u))) <= 1e-8


def test_periodic_derivative_batched():
    n, L = 128, 3.0
    u = np.arange(n) * (L / n)
    batch = np.stack([np.sin(2 * np.pi * u / L), np.cos(4 * np.pi * u / L)])
    d = tf.periodic_derivative(batch, 1, L)
    assert d.shape == batch.shape
    assert np.allclose(d[0], (2 * np.pi / L) * np.cos(2 * np.pi * u / L), atol=1e-10)


def test_grid_is_uniform_arclength(bean512):
    assert np.allclose(np.diff(bean512.u), bean512.length / bean512.n, rtol=0, atol=1e-12)
    # parametrization speed of the trigonometric interpolant is 1
    zu = tf.periodic_derivative(bean512.position.T, 1, bean512.length).T
    speed = np.hypot(zu[:, 0], zu[:, 1])
    assert np.max(np.abs(speed - 1.0)) <= 1e-8


def test_rejects_bad_grid_sizes():
    spec = tf.CurveSpec("circle", {"radius": 1.0})
    with pytest.raises(ValueError):
        tf.build_target(spec, 100)
    with pytest.raises(ValueError):
        tf.build_target(spec, 32)


def test_bean_too_coarse_raises():
    with pytest.raises(ResolutionTooLow):
        tf.build_target(tf.CurveSpec("bean"), 64)


def test_self_intersecting_fourier_raises():
    # figure-eight: x = sin 2s, y = sin s
    spec = tf.CurveSpec("fourier", {"x_cos": [0.0, 0.0, 0.0],
                                    "x_sin": [0.0, 0.0, 1.0],
                                    "y_cos": [0.0, 0.0, 0.0],
                                    "y_sin": [0.0, 1.0, 0.0]})
    with pytest.raises(SelfIntersecting):
        tf.build_target(spec, 128)


def test_spec_validation():
    with pytest.raises(ValueError):
        tf.CurveSpec("circle", {"radius": -1.0})
    with pytest.raises(ValueError):
        tf.CurveSpec("ellipse", {"a": 1.0, "b": 2.0})
    with pytest.raises(ValueError):
        tf.CurveSpec("fourier", {"x_cos": [1.0], "x_sin": [1.0, 2.0],
                                 "y_cos": [0.0], "y_sin": [0.0]})
    with pytest.raises(ValueError):
        tf.CurveSpec("hexagon")
