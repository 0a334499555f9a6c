"""Method-of-lines integrator for the graphical flow PDE.

The graph function r on the target's periodic arclength grid evolves by

    r_t = r_uu / v + r_u (k r)_u / (v (1 - k r)) - C r,
    v   = (1 - k r)^2 + (r_u)^2,

with spatial derivatives taken spectrally and time stepping by the classical
4-stage Runge-Kutta scheme. The target (r = 0) is an exact fixed point of the
discretization, and spatially constant data reduces exactly to r' = -C r.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .analysis import FlowTrace
from .curves import periodic_derivative
from .errors import DenominatorBreach, GraphicalityLost


@dataclass(frozen=True)
class GraphState:
    """Graph function sampled at the curve's nodes at one time."""

    t: float
    r: np.ndarray
    curve: object

    def __post_init__(self):
        object.__setattr__(self, "r", np.asarray(self.r, float))
        if self.r.shape != (self.curve.n,):
            raise ValueError("r must match the curve grid")


@dataclass(frozen=True)
class SolverConfig:
    n: int | None = None
    dt: float | str = "auto"
    t_end: float = 3.0
    snapshot_every: int = 10
    tol_stop: float | None = 1e-12

    def __post_init__(self):
        if self.dt != "auto" and not self.dt > 0:
            raise ValueError("dt must be positive or 'auto'")
        if self.snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")


def auto_dt(curve, cfg):
    """Diffusive stability rule dt = 0.2 (L/n)^2 delta^2, additionally
    capped by the reaction term's explicit-stability bound."""
    dt = 0.2 * (curve.length / curve.n) ** 2 * cfg.delta ** 2
    return min(dt, 2.5 / cfg.C)


def rhs_values(r, curve, cfg):
    """Right side of the PDE for r of shape (..., n). Raises
    DenominatorBreach when 1 - k r drops below delta/2 at any node."""
    k = curve.k
    L = curve.length
    one = 1.0 - k * r
    if np.min(one) < 0.5 * cfg.delta:
        raise DenominatorBreach(
            f"1 - k*r = {np.min(one):.4g} < delta/2 = {0.5 * cfg.delta:.4g}")
    ru = periodic_derivative(r, 1, L)
    ruu = periodic_derivative(r, 2, L)
    kru = periodic_derivative(k * r, 1, L)
    v = one ** 2 + ru ** 2
    return ruu / v + ru * kru / (v * one) - cfg.C * r


def rhs(state, cfg):
    """Nodewise right side of the flow PDE at the state's time."""
    return rhs_values(state.r, state.curve, cfg)


def _check_graphical(r, curve, t):
    r_lo, r_hi = curve.graph_interval()
    bad = np.nonzero((r <= r_lo) | (r >= r_hi))[0]
    if len(bad):
        i = int(bad[0])
        raise GraphicalityLost(
            f"r[{i}] = {r[i]:.6g} left ({r_lo:.6g}, {r_hi:.6g}) at t = {t:.6g}")


def _rk4(r, curve, cfg, dt):
    k1 = rhs_values(r, curve, cfg)
    k2 = rhs_values(r + 0.5 * dt * k1, curve, cfg)
    k3 = rhs_values(r + 0.5 * dt * k2, curve, cfg)
    k4 = rhs_values(r + dt * k3, curve, cfg)
    return r + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step(state, cfg, dt):
    """One RK4 step. Warns when dt exceeds the auto stability rule; raises
    GraphicalityLost if the new graph function leaves the chart interval."""
    if dt > auto_dt(state.curve, cfg):
        warnings.warn(
            f"dt = {dt:.3g} exceeds the stability rule {auto_dt(state.curve, cfg):.3g}",
            RuntimeWarning, stacklevel=2)
    r_new = _rk4(state.r, state.curve, cfg, dt)
    t_new = state.t + dt
    _check_graphical(r_new, state.curve, t_new)
    return GraphState(t_new, r_new, state.curve)


def _derivative_norms(r, length):
    coef = np.fft.rfft(r)
    m = np.arange(len(coef))
    w = 2j * np.pi * m / length
    sups = [float(np.max(np.abs(r)))]
    n = len(r)
    for order in range(1, 5):
        c = coef * w ** order
        if n % 2 == 0 and order % 2 == 1:
            c[-1] = 0.0
        sups.append(float(np.max(np.abs(np.fft.irfft(c, n)))))
    return sups


def run(r0, curve, cfg, solver):
    """Integrate to t_end (or until sup|r| < tol_stop), recording sup-norms of
    r, r_u, ..., r_uuuu and full snapshots every snapshot_every steps."""
    r = np.asarray(r0, float)
    if r.shape != (curve.n,):
        raise ValueError("r0 must match the curve grid")
    r_lo, r_hi = curve.graph_interval()
    if np.min(r) <= r_lo or np.max(r) >= r_hi:
        raise ValueError(
            f"initial data not strictly inside ({r_lo:.6g}, {r_hi:.6g})")
    if np.min(1.0 - curve.k * r) < 0.5 * cfg.delta:
        raise ValueError("initial data violates the certified denominator bound")

    if solver.dt == "auto":
        dt = auto_dt(curve, cfg)
    else:
        dt = float(solver.dt)
        if dt > auto_dt(curve, cfg):
            warnings.warn(
                f"dt = {dt:.3g} exceeds the stability rule {auto_dt(curve, cfg):.3g}",
                RuntimeWarning, stacklevel=2)

    times = [0.0]
    norm_rows = [_derivative_norms(r, curve.length)]
    snapshots = [(0.0, r.copy())]

    t = 0.0
    istep = 0
    n_full = math.floor(solver.t_end / dt + 1e-9)
    stopped = False
    while not stopped:
        if istep < n_full:
            h = dt
        else:
            h = solver.t_end - t
            if h <= 1e-12 * max(solver.t_end, 1.0):
                break
        r = _rk4(r, curve, cfg, h)
        istep += 1
        t = istep * dt if istep <= n_full else solver.t_end
        _check_graphical(r, curve, t)
        if solver.tol_stop is not None and np.max(np.abs(r)) < solver.tol_stop:
            stopped = True
        if istep % solver.snapshot_every == 0 or t >= solver.t_end - 1e-15 or stopped:
            if t > times[-1]:
                times.append(t)
                norm_rows.append(_derivative_norms(r, curve.length))
                snapshots.append((t, r.copy()))

    norms = {m: np.array([row[m] for row in norm_rows]) for m in range(5)}
    meta = {
        "curve": curve.spec.label(),
        "kind": curve.spec.kind,
        "n": curve.n,
        "L": curve.length,
        "C": cfg.C,
        "dt": dt,
        "t_end": solver.t_end,
    }
    return FlowTrace(np.array(times), norms, snapshots, meta)
