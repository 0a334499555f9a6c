"""Verdicts on the flow's quantitative claims from recorded traces.

A trace holds sup-norm time series of the graph function and its first four
arclength derivatives plus full snapshots. The checks verify, with explicit
numerical slack, the exponential envelopes the theory provides: space-constant
barriers decaying like exp(-C*t), the gradient envelope exp(-(t - T*)/2)
active once sup|r| is small, the squared-second-derivative envelope with rate
C/2, and strictly positive fitted decay rates for derivative orders up to 4.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BracketInvalid, NonpositiveValues, WindowEmpty

CONVERGED_FLOOR = 1e-13   # norms at/below this are treated as fully decayed
ABS_SLACK = 1e-12         # absolute floor added to envelopes (zero data)


@dataclass
class FlowTrace:
    """Time series of sup-norms (orders 0..4) plus sparse full snapshots."""

    times: np.ndarray
    norms: dict
    snapshots: list
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, float)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        for m, series in self.norms.items():
            series = np.asarray(series, float)
            if series.shape != self.times.shape:
                raise ValueError(f"norms[{m}] length mismatch")
            if not np.all(np.isfinite(series)) or np.any(series < 0):
                raise ValueError(f"norms[{m}] must be finite and >= 0")
            self.norms[m] = series

    @property
    def r0(self):
        if not self.snapshots or self.snapshots[0][0] != self.times[0]:
            raise ValueError("trace has no initial snapshot")
        return self.snapshots[0][1]


@dataclass
class CheckResult:
    name: str
    passed: bool
    margin: float
    detail: str

    def __bool__(self):
        return self.passed


def barrier_check(trace, r1, r2, C, tol=1e-8):
    """Verify r1*exp(-C*t) - tol <= r(u,t) <= r2*exp(-C*t) + tol on every
    snapshot. r1 <= 0 <= r2 must strictly bracket the initial data."""
    r0 = trace.r0
    if not (r1 <= 0.0 <= r2) or not (r1 < np.min(r0)) or not (np.max(r0) < r2):
        raise BracketInvalid(
            f"need r1 <= 0 <= r2 strictly bracketing r0, got r1={r1}, r2={r2}")
    worst = np.inf
    where = (trace.times[0], 0)
    for t, snap in trace.snapshots:
        decay = np.exp(-C * t)
        lower_margin = np.min(snap) - (r1 * decay - tol)
        upper_margin = (r2 * decay + tol) - np.max(snap)
        m = min(lower_margin, upper_margin)
        if m < worst:
            worst = m
            where = (t, int(np.argmin(snap) if lower_margin < upper_margin
                            else np.argmax(snap)))
    detail = f"worst margin {worst:.3e} at t={where[0]:.6g}, node {where[1]}"
    return CheckResult("barrier", bool(worst >= 0.0), float(worst), detail)


def t_epsilon(r1, r2, C, eps):
    """Upper bound (1/C) * log(max(|r1|, r2)/eps) on the first time after
    which sup|r| < eps, clamped to zero."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    peak = max(abs(r1), r2)
    if peak <= eps:
        return 0.0
    return np.log(peak / eps) / C


def first_time_below(trace, eps):
    """First recorded time with sup|r| < eps, or None."""
    below = np.nonzero(trace.norms[0] < eps)[0]
    if len(below) == 0:
        return None
    return float(trace.times[below[0]])


def gradient_envelope_check(trace, C, eps0_eff, slack=1.05):
    """After the first recorded time T* with sup|r| < eps0_eff, the gradient
    sup-norm must obey |r_u|(t) <= slack * exp((T* - t)/2) * |r_u|(T*)."""
    t_star = first_time_below(trace, eps0_eff)
    if t_star is None:
        raise WindowEmpty(f"sup|r| never drops below {eps0_eff:.3e}")
    mask = trace.times > t_star
    if not np.any(mask):
        raise WindowEmpty("no recorded times after T*")
    i_star = int(np.searchsorted(trace.times, t_star))
    base = trace.norms[1][i_star]
    bound = slack * np.exp(0.5 * (t_star - trace.times[mask])) * base + ABS_SLACK
    margins = bound - trace.norms[1][mask]
    worst = float(np.min(margins))
    t_worst = trace.times[mask][int(np.argmin(margins))]
    detail = (f"T*={t_star:.6g}, base={base:.3e}, worst margin {worst:.3e} "
              f"at t={t_worst:.6g}")
    return CheckResult("gradient_envelope", bool(worst >= 0.0), worst, detail)


def second_derivative_envelope_check(trace, C, eps0_eff=None, t0=None, slack=1.10):
    """Tail envelope for the squared second derivative:

        |r_uu|^2(t) <= slack * (|r_uu|^2(t0) + A0*exp(-t0)) * exp((t0 - t)C/2)

    with A0 calibrated as 2*|r_uu|^2(t0). t0 defaults to one time unit past
    the first recorded time with sup|r| < eps0_eff.
    """
    if t0 is None:
        if eps0_eff is None:
            raise ValueError("provide either t0 or eps0_eff")
        t_star = first_time_below(trace, eps0_eff)
        if t_star is None:
            raise WindowEmpty(f"sup|r| never drops below {eps0_eff:.3e}")
        t0 = t_star + 1.0
    i0 = int(np.searchsorted(trace.times, t0))
    if i0 >= len(trace.times):
        raise WindowEmpty(f"no recorded times at or after t0={t0:.6g}")
    t0 = float(trace.times[i0])
    mask = trace.times > t0
    if not np.any(mask):
        raise WindowEmpty("no recorded times after t0")
    base_sq = trace.norms[2][i0] ** 2
    amp = base_sq + 2.0 * base_sq * np.exp(-t0)
    bound = slack * amp * np.exp(0.5 * C * (t0 - trace.times[mask])) + ABS_SLACK
    margins = bound - trace.norms[2][mask] ** 2
    worst = float(np.min(margins))
    t_worst = trace.times[mask][int(np.argmin(margins))]
    detail = (f"t0={t0:.6g}, base^2={base_sq:.3e}, worst margin {worst:.3e} "
              f"at t={t_worst:.6g}")
    return CheckResult("second_derivative_envelope", bool(worst >= 0.0), worst, detail)


def fit_decay_rate(times, values, window=None):
    """Least-squares fit of log(values) = log(A) - rate*t on the window.

    Returns (rate, amplitude, rms_residual). Requires positive values and at
    least 5 samples in the window.
    """
    times = np.asarray(times, float)
    values = np.asarray(values, float)
    if window is not None:
        a, b = window
        mask = (times >= a) & (times <= b)
        times, values = times[mask], values[mask]
    if len(times) < 5:
        raise WindowEmpty(f"need at least 5 samples, got {len(times)}")
    if np.any(values <= 0.0):
        raise NonpositiveValues("fit requires strictly positive values")
    logs = np.log(values)
    slope, intercept = np.polyfit(times, logs, 1)
    resid = logs - (slope * times + intercept)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return float(-slope), float(np.exp(intercept)), rms


def tail_window(trace, fraction=0.5):
    """Default fitting window: the trailing fraction of the recorded times."""
    t0, t1 = trace.times[0], trace.times[-1]
    return (t0 + (1.0 - fraction) * (t1 - t0), t1)


def higher_derivative_decay(trace, orders=(0, 1, 2, 3, 4), window=None):
    """Fitted exponential decay rate per derivative order on a tail window.

    Orders whose norms sit at the converged floor report rate = inf. The
    verdict passes iff every rate is strictly positive.
    """
    if window is None:
        window = tail_window(trace)
    rates = {}
    failed = []
    for m in orders:
        series = trace.norms[m]
        a, b = window
        mask = (trace.times >= a) & (trace.times <= b)
        if np.all(series[mask] <= CONVERGED_FLOOR):
            rates[m] = np.inf
            continue
        rate, _, _ = fit_decay_rate(trace.times, series, window)
        rates[m] = rate
        if not rate > 0.0:
            failed.append(m)
    passed = not failed
    detail = ("all fitted rates positive" if passed
              else f"nonpositive rate at orders {failed}")
    verdict = CheckResult("higher_derivative_decay", passed,
                          float(min(rates.values())) if rates else 0.0, detail)
    return rates, verdict
