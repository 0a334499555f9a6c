"""Ambient forcing field and selection of the forcing constant.

The field acts along normal rays of the target: V(eta + r*nu) = f(r, k)*nu
with f(r, k) = -C*r - k/(1 - k*r), and V = 0 outside the tube. On the target
(r = 0) this gives V = -k*nu, so the target is a fixed point of the flow;
for spatially constant graph data the full velocity collapses to the ODE
rhat' = -C*rhat, whose solutions decay like exp(-C*t).

The constant C is chosen from conservative closed-form bounds on the
curvature profiles so that C >= max(1, C0) with C0 = c3*eps0 + c4 + 1;
over-estimation only speeds decay. A user override >= 1 is allowed for
experiments with slower convergence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import project
from .errors import ChartBoundary, InvalidOverride


@dataclass(frozen=True)
class ForcingConfig:
    C: float
    eps0_eff: float
    delta: float
    c3: float
    c4: float
    C0: float
    overridden: bool = False


def f_scalar(r, k, C):
    """Normal forcing speed f(r, k) = -C*r - k/(1 - k*r)."""
    denom = 1.0 - k * r
    if np.min(np.abs(denom)) < 1e-12:
        raise ChartBoundary("1 - k*r vanishes")
    return -C * r - k / denom


def eval_V(chart, cfg, point):
    """Forcing vector at an ambient point (zero outside the tube)."""
    found = project(chart, point)
    if found is None:
        return np.zeros(2)
    u, r = found
    k = float(chart.curve.interp_curvature(u))
    nu = chart.curve.interp_normal(u)
    return f_scalar(r, k, cfg.C) * nu


def select_C(curve, chart, override=None):
    """Forcing constant with certified ingredients computed from the target.

    eps0_eff halves the min of the curvature-based radius and the admissible
    band half-widths, keeping every denominator 1 - k*r certified away from
    zero on the working band (delta bound); c3, c4 are conservative sup-norm
    bounds involving k, k_u, k_uu.
    """
    K0 = float(np.max(np.abs(curve.k)))
    K1 = float(np.max(np.abs(curve.k1)))
    K2 = float(np.max(np.abs(curve.k2)))
    kmin, kmax = curve.kmin, curve.kmax
    if kmin >= 0.0:
        eps_paper = 1.0 / kmax
        candidates = [eps_paper, chart.r_hi]
    else:
        eps_paper = max(1.0 / abs(kmin), 1.0 / kmax)
        candidates = [eps_paper, chart.r_hi, abs(chart.r_lo)]
    eps0 = 0.5 * min(candidates)
    delta = 1.0 - max(K0 * eps0, abs(kmin) * eps0)
    c4 = 2.0 * K1 + 2.0 * K0 ** 2 + K0 ** 2 / delta ** 2
    c3 = K2 / delta + 2.0 * K1 ** 2 * eps0 + K1 ** 2 * eps0 / delta ** 2
    C0 = c3 * eps0 + c4 + 1.0
    if override is not None:
        if override < 1.0:
            raise InvalidOverride(f"C override {override} < 1")
        return ForcingConfig(float(override), eps0, delta, c3, c4, C0, overridden=True)
    return ForcingConfig(max(1.0, C0), eps0, delta, c3, c4, C0)
