import numpy as np
import pytest

import targetflow as tf


@pytest.fixture(scope="session")
def circle256():
    return tf.build_target(tf.CurveSpec("circle", {"radius": 1.0}), 256)


@pytest.fixture(scope="session")
def circle512():
    return tf.build_target(tf.CurveSpec("circle", {"radius": 1.0}), 512)


@pytest.fixture(scope="session")
def ellipse512():
    return tf.build_target(tf.CurveSpec("ellipse", {"a": 2.0, "b": 1.0}), 512)


@pytest.fixture(scope="session")
def bean512():
    return tf.build_target(tf.CurveSpec("bean"), 512)


@pytest.fixture(scope="session")
def bean1024():
    return tf.build_target(tf.CurveSpec("bean"), 1024)


@pytest.fixture(scope="session")
def circle_chart(circle256):
    return tf.admissible_interval(circle256)


@pytest.fixture(scope="session")
def bean_chart(bean512):
    return tf.admissible_interval(bean512)


@pytest.fixture(scope="session")
def circle_cfg(circle256, circle_chart):
    return tf.select_C(circle256, circle_chart)


@pytest.fixture(scope="session")
def bean_cfg(bean512, bean_chart):
    return tf.select_C(bean512, bean_chart)


# ---- independent closed-form oracles (raw parametrizations) ----

def circle_raw(R):
    """Raw circle parametrization and its s-derivatives."""
    return {
        "pos": lambda s: np.stack([R * np.cos(s), R * np.sin(s)], axis=-1),
        "d1": lambda s: np.stack([-R * np.sin(s), R * np.cos(s)], axis=-1),
        "d2": lambda s: np.stack([-R * np.cos(s), -R * np.sin(s)], axis=-1),
    }


def ellipse_raw(a, b):
    return {
        "pos": lambda s: np.stack([a * np.cos(s), b * np.sin(s)], axis=-1),
        "d1": lambda s: np.stack([-a * np.sin(s), b * np.cos(s)], axis=-1),
        "d2": lambda s: np.stack([-a * np.cos(s), -b * np.sin(s)], axis=-1),
    }


def bean_raw():
    """The bean of the vector-field figure: x = 7 sin u + 2 sin 2u,
    y = 4 - 2 cos u - 4 cos^2 u + sin^2 u."""
    def pos(s):
        return np.stack([7 * np.sin(s) + 2 * np.sin(2 * s),
                         4 - 2 * np.cos(s) - 4 * np.cos(s) ** 2 + np.sin(s) ** 2],
                        axis=-1)

    def d1(s):
        return np.stack([7 * np.cos(s) + 4 * np.cos(2 * s),
                         2 * np.sin(s) + 5 * np.sin(2 * s)], axis=-1)

    def d2(s):
        return np.stack([-7 * np.sin(s) - 8 * np.sin(2 * s),
                         2 * np.cos(s) + 10 * np.cos(2 * s)], axis=-1)

    return {"pos": pos, "d1": d1, "d2": d2}


def raw_speed(raw, s):
    d = raw["d1"](s)
    return np.hypot(d[..., 0], d[..., 1])


def raw_curvature(raw, s):
    d1 = raw["d1"](s)
    d2 = raw["d2"](s)
    sp = np.hypot(d1[..., 0], d1[..., 1])
    return (d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]) / sp ** 3


def raw_length_quad(raw):
    """Adaptive quadrature of |eta'(s)| over one period."""
    from scipy.integrate import quad
    val, _ = quad(lambda s: float(raw_speed(raw, np.array(s))), 0.0,
                  2.0 * np.pi, limit=400, epsabs=1e-13, epsrel=1e-13)
    return val


def raw_arclength_of(raw, s_target):
    """Arclength from 0 to s_target by adaptive quadrature."""
    from scipy.integrate import quad
    val, _ = quad(lambda s: float(raw_speed(raw, np.array(s))), 0.0,
                  float(s_target), limit=400, epsabs=1e-13, epsrel=1e-13)
    return val


def raw_param_at_arclength(raw, target):
    """Invert the cumulative arclength with brentq (independent of the
    package's PCHIP inversion)."""
    from scipy.optimize import brentq
    return brentq(lambda s: raw_arclength_of(raw, s) - target, 0.0,
                  2.0 * np.pi, xtol=1e-14)


def curvature_extrema_oracle(raw, samples=10 ** 6):
    """Dense closed-form sampling with local quadratic refinement."""
    s = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    k = raw_curvature(raw, s)

    def refine(i):
        y0, y1, y2 = k[(i - 1) % samples], k[i], k[(i + 1) % samples]
        denom = y0 - 2 * y1 + y2
        if denom == 0:
            return y1
        d = 0.5 * (y0 - y2) / denom
        return y1 - 0.25 * (y0 - y2) * d

    return refine(int(np.argmin(k))), refine(int(np.argmax(k)))
