"""Target curves on a uniform periodic arclength grid.

A curve is specified declaratively (circle, ellipse, bean, or raw Fourier
coefficients), reparametrized by arclength, and sampled on a uniform grid.
Tangent, normal, curvature and its arclength derivatives are obtained by
Fourier-collocation (trigonometric) differentiation of the periodic samples.

Conventions: curves are closed, smooth, counterclockwise; the unit normal is
the tangent rotated by +pi/2, which points inward, so convex curves have
positive curvature and 1/k_max is the inner offset limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import NotClosed, ResolutionTooLow, SelfIntersecting

OVERSAMPLE = 64          # raw-parameter samples per grid node during construction
DENSE_FACTOR = 16        # upsampling factor of the fast-interpolation tables

_SPACING_TOL = 1e-8      # relative arclength-spacing certificate
_DOUBLING_TOL = 1e-2     # max relative curvature change under internal n-doubling


def periodic_derivative(values, order, length):
    """Differentiate periodic samples spectrally.

    Returns the order-th derivative of the trigonometric interpolant of
    ``values`` (last axis, period ``length``). Exact for band-limited data.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    if order < 1:
        raise ValueError("order must be >= 1")
    coef = np.fft.rfft(values, axis=-1)
    m = np.arange(coef.shape[-1])
    coef = coef * (2j * np.pi * m / length) ** order
    if n % 2 == 0 and order % 2 == 1:
        coef[..., -1] = 0.0  # odd derivative has no real Nyquist mode
    return np.fft.irfft(coef, n, axis=-1)


@dataclass(frozen=True)
class CurveSpec:
    """Declarative description of a target curve.

    kind: one of ``circle`` (params: radius), ``ellipse`` (params: a, b),
    ``bean`` (no params), ``fourier`` (params: x_cos, x_sin, y_cos, y_sin —
    equal-length cosine/sine coefficient sequences per coordinate).
    Orientation is fixed counterclockwise.
    """

    kind: str
    params: dict = field(default_factory=dict)
    orientation: str = "counterclockwise"

    def __post_init__(self):
        if self.orientation != "counterclockwise":
            raise ValueError("orientation is fixed to counterclockwise")
        p = self.params
        if self.kind == "circle":
            if not p.get("radius", 0) > 0:
                raise ValueError("circle requires radius > 0")
        elif self.kind == "ellipse":
            a, b = p.get("a", 0), p.get("b", 0)
            if not (a >= b > 0):
                raise ValueError("ellipse requires a >= b > 0")
        elif self.kind == "bean":
            pass
        elif self.kind == "fourier":
            for key in ("x_cos", "x_sin", "y_cos", "y_sin"):
                if key not in p:
                    raise ValueError(f"fourier requires {key}")
                if not np.all(np.isfinite(p[key])):
                    raise ValueError(f"{key} must be finite")
            if len(p["x_cos"]) != len(p["x_sin"]) or len(p["y_cos"]) != len(p["y_sin"]):
                raise ValueError("coefficient sequences must have equal length per coordinate")
        else:
            raise ValueError(f"unknown curve kind {self.kind!r}")

    def label(self):
        if self.kind == "circle":
            return f"circle(radius={self.params['radius']:g})"
        if self.kind == "ellipse":
            return f"ellipse(a={self.params['a']:g},b={self.params['b']:g})"
        if self.kind == "bean":
            return "bean"
        return f"fourier({len(self.params['x_cos'])} modes)"


def _fourier_coefficients(spec):
    """Cosine/sine coefficients of the raw closed parametrization.

    Every built-in curve is a trigonometric polynomial in the raw parameter
    s in [0, 2*pi); the bean's y uses 4 - 2cos s - 4cos^2 s + sin^2 s
    = 2.5 - 2cos s - 2.5cos 2s.
    """
    p = spec.params
    if spec.kind == "circle":
        R = float(p["radius"])
        return (np.array([0.0, R]), np.array([0.0, 0.0]),
                np.array([0.0, 0.0]), np.array([0.0, R]))
    if spec.kind == "ellipse":
        a, b = float(p["a"]), float(p["b"])
        return (np.array([0.0, a]), np.array([0.0, 0.0]),
                np.array([0.0, 0.0]), np.array([0.0, b]))
    if spec.kind == "bean":
        return (np.array([0.0, 0.0, 0.0]), np.array([0.0, 7.0, 2.0]),
                np.array([2.5, -2.0, -2.5]), np.array([0.0, 0.0, 0.0]))
    return (np.asarray(p["x_cos"], float), np.asarray(p["x_sin"], float),
            np.asarray(p["y_cos"], float), np.asarray(p["y_sin"], float))


def _eval_series(coeffs, s, order=0):
    """Evaluate the raw parametrization (or a parameter derivative) at s."""
    ax, bx, ay, by = coeffs
    j = np.arange(len(ax))
    th = np.multiply.outer(np.asarray(s, float), j)
    c, sn = np.cos(th), np.sin(th)
    if order % 4 == 0:
        cb, sb = c, sn
    elif order % 4 == 1:
        cb, sb = -sn, c
    elif order % 4 == 2:
        cb, sb = -c, -sn
    else:
        cb, sb = sn, -c
    jp = j.astype(float) ** order
    x = cb @ (jp * ax) + sb @ (jp * bx)
    y = cb @ (jp * ay) + sb @ (jp * by)
    return np.stack([x, y], axis=-1)


def _segments_properly_intersect(p1, q1, p2, q2):
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(p2, q2, p1)
    d2 = orient(p2, q2, q1)
    d3 = orient(p1, q1, p2)
    d4 = orient(p1, q1, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return True
    # collinear overlap counts as an intersection
    def on(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    for d, (a, b, c) in ((d1, (p2, q2, p1)), (d2, (p2, q2, q1)),
                         (d3, (p1, q1, p2)), (d4, (p1, q1, q2))):
        if d == 0 and on(a, b, c):
            return True
    return False


def polygon_is_simple(points):
    """Segment-intersection sweep over a closed polygon (x-sorted active list).

    Adjacent segments share an endpoint and are excluded from the test.
    """
    pts = np.asarray(points, float)
    n = len(pts)
    a = pts
    b = np.roll(pts, -1, axis=0)
    xmin = np.minimum(a[:, 0], b[:, 0])
    xmax = np.maximum(a[:, 0], b[:, 0])
    ymin = np.minimum(a[:, 1], b[:, 1])
    ymax = np.maximum(a[:, 1], b[:, 1])
    order = np.argsort(xmin, kind="stable")
    sorted_xmin = xmin[order]
    for pos, i in enumerate(order):
        hi = np.searchsorted(sorted_xmin, xmax[i], side="right")
        for j in order[pos + 1:hi]:
            if j == i or (j - i) % n == 1 or (i - j) % n == 1:
                continue
            if ymin[i] > ymax[j] or ymin[j] > ymax[i]:
                continue
            if _segments_properly_intersect(a[i], b[i], a[j], b[j]):
                return False
    return True


def _quadratic_refine(vals, i):
    """Extremum value from a parabola through node i and its neighbours."""
    n = len(vals)
    y0, y1, y2 = vals[(i - 1) % n], vals[i], vals[(i + 1) % n]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0.0:
        return y1
    d = 0.5 * (y0 - y2) / denom
    return y1 - 0.25 * (y0 - y2) * d


class TargetCurve:
    """Arclength-sampled closed curve with position/tangent/normal/curvature
    profiles and spectral interpolation machinery.

    All arrays are frozen after construction; instances are safe to share.
    """

    def __init__(self, spec, n, length, u, position, tangent, normal,
                 k, k1, k2, k3, kmin, kmax):
        self.spec = spec
        self.n = n
        self.length = length
        self.u = u
        self.position = position
        self.tangent = tangent
        self.normal = normal
        self.k = k
        self.k1 = k1
        self.k2 = k2
        self.k3 = k3
        self.kmin = kmin
        self.kmax = kmax

        z = position[:, 0] + 1j * position[:, 1]
        t = tangent[:, 0] + 1j * tangent[:, 1]
        self._freq = np.fft.fftfreq(n, d=1.0 / n)  # integer mode numbers
        self._zc = np.fft.fft(z) / n
        self._tc = np.fft.fft(t) / n
        self._kc = np.fft.fft(k.astype(complex)) / n

        # dense tables for the O(1)-per-query cubic interpolation hot path;
        # stacked as rows (position, unit tangent, curvature) for fused gathers
        m = DENSE_FACTOR * n
        self._dense_m = m
        self._dense_h = length / m
        dense_z = _fft_upsample(z, m)
        dense_t = _fft_upsample(t, m)
        dense_t = dense_t / np.abs(dense_t)
        dense_k = _fft_upsample(k.astype(complex), m).real
        self._dense_stack = np.vstack([dense_z, dense_t, dense_k.astype(complex)])
        self._dense_z = np.ascontiguousarray(self._dense_stack[0])
        self._dense_t = np.ascontiguousarray(self._dense_stack[1])
        self._dense_k = np.ascontiguousarray(dense_k)

        for arr in (self.u, self.position, self.tangent, self.normal,
                    self.k, self.k1, self.k2, self.k3):
            arr.setflags(write=False)

    # -- trigonometric interpolation (exact evaluation between nodes) --

    def _trig(self, coef, u):
        u = np.asarray(u, float)
        phase = np.exp((2j * np.pi / self.length) * np.multiply.outer(u, self._freq))
        return phase @ coef

    def interp_position(self, u):
        """Position eta(u) at arbitrary arclength values (trig interpolant)."""
        z = self._trig(self._zc, u)
        return np.stack([z.real, z.imag], axis=-1)

    def interp_tangent(self, u):
        t = self._trig(self._tc, u)
        t = t / np.abs(t)
        return np.stack([t.real, t.imag], axis=-1)

    def interp_normal(self, u):
        t = self._trig(self._tc, u)
        t = 1j * t / np.abs(t)
        return np.stack([t.real, t.imag], axis=-1)

    def interp_curvature(self, u):
        return self._trig(self._kc, u).real

    def graph_interval(self):
        """Admissible graph interval (r_lo, r_hi) set by the curvature extrema."""
        r_hi = 1.0 / self.kmax
        r_lo = -np.inf if self.kmin >= 0.0 else 1.0 / self.kmin
        return r_lo, r_hi

    def __repr__(self):
        return (f"TargetCurve({self.spec.label()}, n={self.n}, "
                f"L={self.length:.6g}, k in [{self.kmin:.4g}, {self.kmax:.4g}])")


def _fft_upsample(values, m):
    """Zero-padded FFT resampling of complex periodic samples onto m points."""
    n = len(values)
    c = np.fft.fft(values)
    out = np.zeros(m, dtype=complex)
    h = n // 2
    out[:h] = c[:h]
    out[m - h:] = c[h:]
    # split the Nyquist coefficient symmetrically
    out[h] = 0.5 * c[h]
    out[m - h] += 0.5 * c[h]
    return np.fft.ifft(out) * (m / n)


def _arclength_tables(coeffs, n):
    """Cumulative arclength of the raw parametrization, spectrally integrated
    on an OVERSAMPLE*n grid, plus its monotone inverse."""
    m = OVERSAMPLE * n
    s = np.arange(m) * (2.0 * np.pi / m)
    d1 = _eval_series(coeffs, s, order=1)
    speed = np.hypot(d1[:, 0], d1[:, 1])
    if np.min(speed) < 1e-12:
        raise ValueError("raw parametrization is not immersed (|eta'| ~ 0)")
    c = np.fft.rfft(speed)
    ci = np.zeros_like(c)
    ci[1:] = c[1:] / (1j * np.arange(1, len(c)))
    if m % 2 == 0:
        ci[-1] = 0.0
    periodic = np.fft.irfft(ci, m)
    mean = c[0].real / m
    arc = mean * s + periodic - periodic[0]
    length = mean * 2.0 * np.pi
    s_ext = np.append(s, 2.0 * np.pi)
    arc_ext = np.append(arc, length)
    inverse = PchipInterpolator(arc_ext, s_ext)
    forward = PchipInterpolator(s_ext, arc_ext)
    return length, inverse, forward


def _resample_by_arclength(coeffs, n):
    length, inverse, forward = _arclength_tables(coeffs, n)
    targets = np.arange(n) * (length / n)
    s_nodes = inverse(targets)
    s_nodes[0] = 0.0
    # certificate: consecutive node spacing equals L/n in arclength
    arcs = forward(s_nodes)
    gaps = np.diff(np.append(arcs, length))
    spacing_dev = np.max(np.abs(gaps - length / n)) / (length / n)
    position = _eval_series(coeffs, s_nodes)
    return length, targets, position, spacing_dev


def _profiles_from_positions(position, length):
    """Tangent, normal, curvature and k-derivatives by spectral differentiation."""
    n = len(position)
    z = position[:, 0] + 1j * position[:, 1]
    freq = np.fft.fftfreq(n, d=1.0 / n)
    w = 2j * np.pi * freq / length
    zu = np.fft.ifft(np.fft.fft(z) * w)
    speed = np.abs(zu)
    tau = zu / speed
    tau_u = np.fft.ifft(np.fft.fft(tau) * w)
    k = np.imag(np.conj(tau) * tau_u)
    k1 = periodic_derivative(k, 1, length)
    k2 = periodic_derivative(k, 2, length)
    k3 = periodic_derivative(k, 3, length)
    tangent = np.stack([tau.real, tau.imag], axis=-1)
    normal = np.stack([-tau.imag, tau.real], axis=-1)  # +90 degree rotation
    return tangent, normal, k, k1, k2, k3, speed


def build_target(spec, n):
    """Construct a TargetCurve on an n-node uniform arclength grid.

    n must be a power of two, n >= 64. Raises SelfIntersecting, NotClosed or
    ResolutionTooLow when the requested curve/grid pairing is unusable.
    """
    if n < 64 or (n & (n - 1)) != 0:
        raise ValueError("n must be a power of two with n >= 64")
    coeffs = _fourier_coefficients(spec)

    gap = _eval_series(coeffs, 0.0) - _eval_series(coeffs, 2.0 * np.pi)
    if np.max(np.abs(gap)) > 1e-10:
        raise NotClosed("raw parametrization is not periodic")

    # normalize orientation to counterclockwise (flip sine coefficients = s -> -s)
    probe = _eval_series(coeffs, np.arange(1024) * (2 * np.pi / 1024))
    area2 = np.sum(probe[:, 0] * np.roll(probe[:, 1], -1)
                   - np.roll(probe[:, 0], -1) * probe[:, 1])
    if area2 < 0:
        ax, bx, ay, by = coeffs
        coeffs = (ax, -bx, ay, -by)

    length, u, position, spacing_dev = _resample_by_arclength(coeffs, n)
    if spacing_dev > _SPACING_TOL:
        raise ResolutionTooLow(
            f"arclength spacing certificate {spacing_dev:.2e} exceeds {_SPACING_TOL:.0e}")

    tangent, normal, k, k1, k2, k3, _ = _profiles_from_positions(position, length)

    # internal doubling check: curvature at shared nodes must be converged
    _, _, pos2, _ = _resample_by_arclength(coeffs, 2 * n)
    _, _, k_fine, _, _, _, _ = _profiles_from_positions(pos2, length)
    change = np.max(np.abs(k_fine[::2] - k)) / max(np.max(np.abs(k)), 1e-30)
    if change > _DOUBLING_TOL:
        raise ResolutionTooLow(
            f"curvature changes by {change:.2%} under n-doubling (limit 1%)")

    if not polygon_is_simple(position):
        raise SelfIntersecting("curve polygon is not simple")

    imin = int(np.argmin(k))
    imax = int(np.argmax(k))
    kmin = float(_quadratic_refine(k, imin))
    kmax = float(_quadratic_refine(k, imax))

    return TargetCurve(spec, n, float(length), u, position, tangent, normal,
                       k, k1, k2, k3, kmin, kmax)


def curvature_profile(curve):
    """Curvature samples along the curve with refined extrema."""
    return curve.k, curve.kmin, curve.kmax
