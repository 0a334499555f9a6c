"""Normal-coordinate chart of the tubular neighbourhood around a target curve.

The admissible offset interval is curvature-limited: (-inf, 1/k_max) for a
convex curve, (1/k_min, 1/k_max) otherwise. Because the true uniform tubular
neighbourhood can be limited by distant arcs approaching each other rather
than by curvature, offset curves are verified to be simple at construction
and the working band is shrunk by a small embedding margin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import polygon_is_simple
from .errors import OutsideChart, TubularDegenerate

_OFFSET_SAMPLES = 8   # offsets verified per finite end at construction


@dataclass(frozen=True)
class AdmissibleChart:
    """Admissible interval and normal-coordinate map of the tube."""

    curve: object
    r_lo: float
    r_hi: float
    embedding_margin: float = 0.99

    @property
    def band_lo(self):
        """Margin-shrunk lower offset bound used for membership tests."""
        return self.r_lo if np.isinf(self.r_lo) else self.embedding_margin * self.r_lo

    @property
    def band_hi(self):
        return self.embedding_margin * self.r_hi

    def contains(self, r):
        return (self.band_lo < r) & (r < self.band_hi)


def admissible_interval(curve, embedding_margin=0.99):
    """Build the chart, verifying offset-curve simplicity at sampled radii."""
    r_lo, r_hi = curve.graph_interval()
    ends = [r_hi] if np.isinf(r_lo) else [r_lo, r_hi]
    for end in ends:
        for j in range(1, _OFFSET_SAMPLES + 1):
            r = embedding_margin * end * j / _OFFSET_SAMPLES
            offset = curve.position + r * curve.normal
            if not polygon_is_simple(offset):
                raise TubularDegenerate(
                    f"offset curve at r={r:.6g} self-intersects; the uniform "
                    "tube is limited by global geometry, not curvature")
    return AdmissibleChart(curve, r_lo, r_hi, embedding_margin)


def to_ambient(chart, u, r):
    """Map normal coordinates (u, r) to the plane: eta(u) + r*nu(u).

    Vectorized over equal-shaped u, r. Raises OutsideChart unless r lies
    strictly inside the open admissible interval.
    """
    r_arr = np.asarray(r, float)
    if np.any(r_arr <= chart.r_lo) or np.any(r_arr >= chart.r_hi):
        raise OutsideChart(f"r={r!r} outside ({chart.r_lo:.6g}, {chart.r_hi:.6g})")
    curve = chart.curve
    pos = curve.interp_position(u)
    nor = curve.interp_normal(u)
    return pos + r_arr[..., None] * nor


def _cubic_weights(f):
    # Lagrange basis on the 4-point stencil {-1, 0, 1, 2}
    w_m1 = -f * (f - 1.0) * (f - 2.0) / 6.0
    w_0 = (f * f - 1.0) * (f - 2.0) / 2.0
    w_1 = -f * (f + 1.0) * (f - 2.0) / 2.0
    w_2 = f * (f * f - 1.0) / 6.0
    return w_m1, w_0, w_1, w_2


_STENCIL = np.array([-1, 0, 1, 2], dtype=np.int64)


def dense_sample(curve, u):
    """Cubic interpolation of position (complex), unit tangent (complex) and
    curvature from the curve's dense tables. Fast path for projection."""
    m = curve._dense_m
    x = np.asarray(u, float) / curve._dense_h
    j = np.floor(x).astype(np.int64)
    f = x - j
    w = np.stack(_cubic_weights(f))            # (4, ...)
    idx = (j[None, ...] + _STENCIL.reshape((4,) + (1,) * j.ndim)) & (m - 1)
    gathered = curve._dense_stack[:, idx]      # (3, 4, ...)
    z, t, k = np.einsum("k...,ik...->i...", w, gathered)
    t = t / np.abs(t)  # cubic interpolation slightly shrinks unit vectors
    return z, t, k.real


def project_batch(chart, points, u0=None, maxit=20, tol=1e-13):
    """Newton projection of points onto normal coordinates.

    points: complex array (x + iy). u0: optional warm-start arclength values
    (nearest-node scan when omitted). Newton solves (p - eta(u)) . tau(u) = 0
    with steps clamped to half a node spacing. Returns (u, r, converged).
    """
    curve = chart.curve
    L = curve.length
    p = np.asarray(points, complex)
    if u0 is None:
        zn = curve.position[:, 0] + 1j * curve.position[:, 1]
        d2 = np.abs(p[..., None] - zn[None, :])
        u = curve.u[np.argmin(d2, axis=-1)].astype(float)
    else:
        u = np.array(u0, float, copy=True)
    clamp = 0.5 * L / curve.n
    converged = np.zeros(p.shape, dtype=bool)
    r = np.zeros(p.shape)
    for _ in range(maxit):
        z, t, k = dense_sample(curve, u)
        w = np.conj(t) * (p - z)
        g = w.real
        r = w.imag
        du = g / (1.0 - k * r)
        du = np.clip(du, -clamp, clamp)
        u = (u + du) % L
        newly = np.abs(du) <= tol * L
        converged |= newly
        if converged.all():
            break
    return u, r, converged


def project(chart, point):
    """Normal coordinates of an ambient point, or None when outside the tube.

    Returns (u, r) with point = eta(u) + r*nu(u) when the point lies in the
    margin-restricted tubular neighbourhood.
    """
    p = complex(point[0], point[1])
    u, r, ok = project_batch(chart, np.array([p]))
    u_val, r_val = float(u[0]), float(r[0])
    if not bool(ok[0]) or not chart.contains(r_val):
        return None
    return u_val, r_val
