import numpy as np
import pytest

import targetflow as tf
from targetflow.errors import OutsideChart, TubularDegenerate

from conftest import bean_raw, raw_curvature, raw_param_at_arclength


def test_interval_circle(circle_chart):
    assert circle_chart.r_lo == -np.inf
    assert circle_chart.r_hi == pytest.approx(1.0, abs=1e-9)


def test_interval_ellipse(ellipse512):
    chart = tf.admissible_interval(ellipse512)
    assert chart.r_lo == -np.inf
    assert chart.r_hi == pytest.approx(0.5, abs=1e-7)   # 1/kmax with kmax = 2


def test_interval_bean(bean_chart, bean512):
    # reciprocals of the curvature-extrema oracle
    assert bean_chart.r_lo == pytest.approx(1.0 / -0.8888888888888888, abs=2e-6)
    assert bean_chart.r_hi == pytest.approx(1.0 / 0.6686674144447661, abs=2e-6)
    assert bean_chart.r_lo < 0 < bean_chart.r_hi


def test_tube_degenerates_on_pinched_curve():
    # peanut with a deep waist: the curvature-limited band reaches across
    # the waist, so inward offsets self-intersect
    spec = tf.CurveSpec("fourier", {
        "x_cos": [0.0, 1.45, 0.0, 0.45], "x_sin": [0.0, 0.0, 0.0, 0.0],
        "y_cos": [0.0, 0.0, 0.0, 0.0], "y_sin": [0.0, 0.55, 0.0, 0.45]})
    curve = tf.build_target(spec, 512)
    with pytest.raises(TubularDegenerate):
        tf.admissible_interval(curve)


def test_to_ambient_circle(circle_chart):
    p = tf.to_ambient(circle_chart, 0.0, 0.5)
    assert np.allclose(p, [0.5, 0.0], atol=1e-12)


def test_to_ambient_identity_on_target(bean_chart, bean512):
    pts = tf.to_ambient(bean_chart, bean512.u, np.zeros(bean512.n))
    assert np.max(np.abs(pts - bean512.position)) <= 1e-10


def test_to_ambient_bean_quarter_length():
    # direct evaluation of the closed-form parametrization plus its normal
    raw = bean_raw()
    bean = tf.build_target(tf.CurveSpec("bean"), 512)
    chart = tf.admissible_interval(bean)
    u_star = bean.length / 4.0
    s_star = raw_param_at_arclength(raw, u_star)
    pos = raw["pos"](np.array(s_star))
    d1 = raw["d1"](np.array(s_star))
    tau = d1 / np.hypot(d1[0], d1[1])
    nu = np.array([-tau[1], tau[0]])
    oracle = pos + 0.1 * nu
    got = tf.to_ambient(chart, u_star, 0.1)
    assert np.max(np.abs(got - oracle)) <= 1e-9


def test_to_ambient_rejects_outside(bean_chart):
    with pytest.raises(OutsideChart):
        tf.to_ambient(bean_chart, 1.0, bean_chart.r_hi * 1.5)
    with pytest.raises(OutsideChart):
        tf.to_ambient(bean_chart, 1.0, bean_chart.r_lo - 0.1)


def test_project_circle_point(circle_chart):
    u, r = tf.project(circle_chart, (0.5, 0.0))
    assert abs(u) <= 1e-10 or abs(u - circle_chart.curve.length) <= 1e-10
    assert r == pytest.approx(0.5, abs=1e-12)


def test_project_on_target_nodes(bean_chart, bean512):
    for i in (0, 100, 317):
        u, r = tf.project(bean_chart, bean512.position[i])
        du = abs(u - bean512.u[i])
        du = min(du, bean512.length - du)
        assert du <= 1e-10
        assert abs(r) <= 1e-10


def test_project_round_trip_bean(bean_chart, bean512):
    rng = np.random.default_rng(42)
    u = rng.uniform(0, bean512.length, 100)
    r = rng.uniform(0.95 * bean_chart.band_lo, 0.95 * bean_chart.band_hi, 100)
    pts = tf.to_ambient(bean_chart, u, r)
    uu, rr, ok = tf.project_batch(bean_chart, pts[:, 0] + 1j * pts[:, 1])
    assert ok.all()
    du = np.abs(uu - u)
    du = np.minimum(du, bean512.length - du)
    assert np.max(du) <= 1e-8
    assert np.max(np.abs(rr - r)) <= 1e-8


def test_project_outside_returns_none(bean_chart):
    assert tf.project(bean_chart, (100.0, 100.0)) is None


def test_project_inward_sign_convention(circle_chart):
    # for the circle of radius R: r = R - |p|, positive inside
    rng = np.random.default_rng(7)
    for _ in range(20):
        rho = rng.uniform(0.05, 1.4)
        phi = rng.uniform(0, 2 * np.pi)
        p = rho * np.array([np.cos(phi), np.sin(phi)])
        u, r = tf.project(circle_chart, p)
        assert r == pytest.approx(1.0 - rho, abs=1e-9)


def test_offset_distance_matches_r(bean_chart, bean512):
    rng = np.random.default_rng(3)
    u = rng.uniform(0, bean512.length, 50)
    r = rng.uniform(0.9 * bean_chart.band_lo, 0.9 * bean_chart.band_hi, 50)
    pts = tf.to_ambient(bean_chart, u, r)
    base = tf.to_ambient(bean_chart, u, np.zeros(50))
    dist = np.hypot(*(pts - base).T)
    assert np.max(np.abs(dist - np.abs(r))) <= 1e-10


def test_chart_contains_band(bean_chart):
    assert bean_chart.contains(0.0)
    assert not bean_chart.contains(bean_chart.r_hi)
    assert not bean_chart.contains(bean_chart.r_lo)
    assert bean_chart.contains(0.98 * bean_chart.r_hi)
