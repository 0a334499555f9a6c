"""Front-tracking oracle: evolve a closed polygon directly by kappa + V.

This module exists to cross-validate the graph solver with a structurally
different discretization: vertices move by the discrete curvature vector
(second difference of position with respect to arclength) plus the ambient
forcing field, with forward-Euler time stepping and periodic tangential
redistribution back to uniform spacing. Deliberately first-order; tolerances
downstream account for that.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .chart import project_batch
from .errors import DegenerateSegment, LeftChart

try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional accelerator
    numba = None

_MIN_SEGMENT = 1e-12


@dataclass(frozen=True)
class AmbientPolygon:
    """Closed counterclockwise polygon of tracked curve points."""

    t: float
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 8:
            raise ValueError("points must be an (m, 2) array with m >= 8")
        object.__setattr__(self, "points", pts)


def _as_complex(points):
    pts = np.asarray(points, float)
    return pts[:, 0] + 1j * pts[:, 1]


def _as_points(z):
    return np.column_stack([z.real, z.imag])


def _curvature_vec(z):
    dp = np.roll(z, -1) - z
    dm = z - np.roll(z, 1)
    hp = np.abs(dp)
    hm = np.abs(dm)
    if min(hp.min(), hm.min()) < _MIN_SEGMENT:
        raise DegenerateSegment("polygon has a (near-)zero-length segment")
    return 2.0 * (dp / hp - dm / hm) / (hp + hm)


def polygon_curvature(points):
    """Discrete curvature vector at each vertex (second difference of
    position with respect to arclength)."""
    if len(points) < 8:
        raise ValueError("need at least 8 vertices")
    return _as_points(_curvature_vec(_as_complex(points)))


def _resample_closed(z, m_out=None):
    """Arclength resampling of a closed polygon onto uniform chordal spacing
    via a periodic cubic spline (tangential reparametrization only)."""
    m_out = m_out or len(z)
    zc = np.append(z, z[0])
    seg = np.abs(np.diff(zc))
    if seg.min() < _MIN_SEGMENT:
        raise DegenerateSegment("polygon has a (near-)zero-length segment")
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    spline = CubicSpline(cum, zc, bc_type="periodic")
    targets = np.arange(m_out) * (cum[-1] / m_out)
    return spline(targets), cum[:-1], cum[-1]


def _remap_u(u, cum, total, targets, period):
    """Carry projection parameters through a resampling: u is monotone along
    the polygon, so unwrap, interpolate in chord length, wrap back."""
    du = np.diff(u)
    du = (du + 0.5 * period) % period - 0.5 * period
    u_unw = u[0] + np.concatenate([[0.0], np.cumsum(du)])
    cum_ext = np.append(cum, total)
    u_ext = np.append(u_unw, u_unw[0] + period)
    return np.interp(targets, cum_ext, u_ext) % period


def _advance_chunk_py(z, u, tz, tt, tk, inv_h, mask, L, C, band_lo, band_hi,
                      dt, nsteps, clamp):
    """Advance nsteps Euler steps without redistribution (vectorized).

    Returns (status, r_min, r_max) with status -1 on success, -2 on a
    degenerate segment, or the index of the first vertex that left the tube.
    The projection parameters u ride along with one clamped Newton update per
    step (vertices move normally, so foot points are stationary to first
    order). z and u are updated in place.
    """
    m = len(z)
    stencil = np.array([-1, 0, 1, 2], dtype=np.int64).reshape(4, 1)
    r_min = np.inf
    r_max = -np.inf
    for s in range(nsteps):
        dp = np.roll(z, -1) - z
        dm = z - np.roll(z, 1)
        hp = np.abs(dp)
        hm = np.abs(dm)
        if min(hp.min(), hm.min()) < _MIN_SEGMENT:
            return -2, r_min, r_max
        kappa = 2.0 * (dp / hp - dm / hm) / (hp + hm)
        x = u * inv_h
        j = x.astype(np.int64)
        f = x - j
        w = np.stack((-f * (f - 1.0) * (f - 2.0) / 6.0,
                      (f * f - 1.0) * (f - 2.0) / 2.0,
                      -f * (f + 1.0) * (f - 2.0) / 2.0,
                      f * (f * f - 1.0) / 6.0))
        idx = (j[None, :] + stencil) & mask
        zc = (w * tz[idx]).sum(axis=0)
        tc = (w * tt[idx]).sum(axis=0)
        tc = tc / np.abs(tc)
        kc = (w * tk[idx]).sum(axis=0)
        wc = np.conj(tc) * (z - zc)
        r = wc.imag
        if not (r.min() > band_lo and r.max() < band_hi):
            return int(np.argmax((r <= band_lo) | (r >= band_hi))), r_min, r_max
        fsp = -C * r - kc / (1.0 - kc * r)
        z += dt * (kappa + fsp * (1j * tc))
        u += np.clip(wc.real / (1.0 - kc * r), -clamp, clamp)
        u %= L
        if s == nsteps - 1:
            r_min = float(r.min())
            r_max = float(r.max())
    return -1, r_min, r_max


if numba is not None:

    @numba.njit(cache=True)
    def _advance_chunk_jit(z, u, tz, tt, tk, inv_h, mask, L, C, band_lo,
                           band_hi, dt, nsteps, clamp):  # pragma: no cover
        m = z.shape[0]
        znew = np.empty_like(z)
        r_min = np.inf
        r_max = -np.inf
        for s in range(nsteps):
            last = s == nsteps - 1
            for i in range(m):
                ip = i + 1 if i + 1 < m else 0
                im = i - 1 if i > 0 else m - 1
                dp = z[ip] - z[i]
                dm = z[i] - z[im]
                hp = abs(dp)
                hm = abs(dm)
                if hp < _MIN_SEGMENT or hm < _MIN_SEGMENT:
                    return -2, r_min, r_max
                kappa = 2.0 * (dp / hp - dm / hm) / (hp + hm)
                x = u[i] * inv_h
                j = np.int64(x)
                f = x - j
                w0 = -f * (f - 1.0) * (f - 2.0) / 6.0
                w1 = (f * f - 1.0) * (f - 2.0) / 2.0
                w2 = -f * (f + 1.0) * (f - 2.0) / 2.0
                w3 = f * (f * f - 1.0) / 6.0
                j0 = (j - 1) & mask
                j1 = j & mask
                j2 = (j + 1) & mask
                j3 = (j + 2) & mask
                zc = w0 * tz[j0] + w1 * tz[j1] + w2 * tz[j2] + w3 * tz[j3]
                tc = w0 * tt[j0] + w1 * tt[j1] + w2 * tt[j2] + w3 * tt[j3]
                tc = tc / abs(tc)
                kc = w0 * tk[j0] + w1 * tk[j1] + w2 * tk[j2] + w3 * tk[j3]
                wc = tc.conjugate() * (z[i] - zc)
                g = wc.real
                r = wc.imag
                if not (band_lo < r < band_hi):
                    return i, r_min, r_max
                fsp = -C * r - kc / (1.0 - kc * r)
                znew[i] = z[i] + dt * (kappa + fsp * (1j * tc))
                du = g / (1.0 - kc * r)
                if du > clamp:
                    du = clamp
                elif du < -clamp:
                    du = -clamp
                u[i] = (u[i] + du) % L
                if last:
                    if r < r_min:
                        r_min = r
                    if r > r_max:
                        r_max = r
            z[:] = znew
        return -1, r_min, r_max

    _advance_chunk = _advance_chunk_jit
else:
    _advance_chunk = _advance_chunk_py


class _AmbientStepper:
    """Persistent state (warm-started projections) for fast ambient runs."""

    def __init__(self, points, chart, cfg, dt=None):
        self.chart = chart
        self.cfg = cfg
        self.curve = chart.curve
        self.z = _as_complex(points).copy()
        self.m = len(self.z)
        if dt is not None:
            # forward Euler on the curvature term is diffusion-limited
            h = np.min(np.abs(np.roll(self.z, -1) - self.z))
            if dt > 0.5 * h * h:
                warnings.warn(
                    f"ambient dt = {dt:.3g} exceeds the diffusive stability "
                    f"bound {0.5 * h * h:.3g}", RuntimeWarning, stacklevel=3)
        u, r, ok = project_batch(chart, self.z)
        self._require_inside(r, ok)
        self.u = u
        self.steps = 0

    def _require_inside(self, r, ok=None):
        inside = self.chart.contains(r)
        if ok is not None:
            inside &= ok
        if not inside.all():
            i = int(np.nonzero(~inside)[0][0])
            raise LeftChart(
                f"vertex {i} left the tubular neighbourhood (r={r[i]:.6g})")

    def advance(self, dt, nsteps):
        """nsteps Euler updates x <- x + dt*(kappa + V(x)) without
        redistribution; returns vertex offsets seen on the last step."""
        curve, chart = self.curve, self.chart
        status, r_min, r_max = _advance_chunk(
            self.z, self.u, curve._dense_z, curve._dense_t, curve._dense_k,
            1.0 / curve._dense_h, curve._dense_m - 1, curve.length,
            self.cfg.C, chart.band_lo, chart.band_hi, dt, nsteps,
            0.5 * curve.length / curve.n)
        if status == -2:
            raise DegenerateSegment("polygon has a (near-)zero-length segment")
        if status >= 0:
            raise LeftChart(f"vertex {status} left the tubular neighbourhood")
        self.steps += nsteps
        return r_min, r_max

    def resample(self):
        z_new, cum, total = _resample_closed(self.z)
        targets = np.arange(self.m) * (total / self.m)
        u_guess = _remap_u(self.u, cum, total, targets, self.curve.length)
        self.z = z_new
        u, r, ok = project_batch(self.chart, self.z, u0=u_guess, maxit=6)
        self._require_inside(r, ok)
        self.u = u


def ambient_step(poly, chart, cfg, dt):
    """One forward-Euler step x <- x + dt*(kappa + V(x)) followed by
    arclength redistribution. Raises LeftChart when a vertex projects
    outside the tube."""
    stepper = _AmbientStepper(poly.points, chart, cfg, dt=dt)
    stepper.advance(dt, 1)
    stepper.resample()
    return AmbientPolygon(poly.t + dt, _as_points(stepper.z))


def run_ambient(points, chart, cfg, dt, t_end, resample_every=40):
    """Evolve a polygon to t_end; returns (polygon, diagnostics).

    Redistribution runs every resample_every steps (spacing drifts only at
    the rate of k times the normal speed, so near-uniformity is preserved
    between redistributions). Diagnostics hold per-chunk times and
    normal-coordinate extremes of the vertices, for envelope checks against
    the graph solver's barriers.
    """
    stepper = _AmbientStepper(points, chart, cfg, dt=dt)
    nsteps = int(round(t_end / dt))
    times, r_min, r_max = [], [], []
    done = 0
    while done < nsteps:
        chunk = min(resample_every, nsteps - done)
        lo, hi = stepper.advance(dt, chunk)
        done += chunk
        stepper.resample()
        times.append(done * dt)
        r_min.append(lo)
        r_max.append(hi)
    poly = AmbientPolygon(nsteps * dt, _as_points(stepper.z))
    diag = {"times": np.array(times), "r_min": np.array(r_min),
            "r_max": np.array(r_max)}
    return poly, diag


def _directed_hausdorff(P, Q):
    """max over points of P of the distance to the closed polygon Q
    (point-to-segment, vectorized)."""
    A = Q
    D = np.roll(Q, -1, axis=0) - Q
    denom = np.einsum("md,md->m", D, D)
    denom = np.where(denom < _MIN_SEGMENT ** 2, 1.0, denom)
    diff = P[:, None, :] - A[None, :, :]
    tpar = np.clip(np.einsum("qmd,md->qm", diff, D) / denom, 0.0, 1.0)
    closest = diff - tpar[:, :, None] * D[None, :, :]
    d2 = np.einsum("qmd,qmd->qm", closest, closest)
    return float(np.sqrt(np.max(np.min(d2, axis=1))))


def hausdorff(a, b):
    """Symmetric Hausdorff distance between two closed polygons."""
    P = np.asarray(a, float)
    Q = np.asarray(b, float)
    if len(P) == 0 or len(Q) == 0:
        raise ValueError("polygons must be nonempty")
    return max(_directed_hausdorff(P, Q), _directed_hausdorff(Q, P))
