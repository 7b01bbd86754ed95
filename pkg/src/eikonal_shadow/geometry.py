"""Plane curves, refractive indices, travel time and curvature."""

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

_ROT90 = np.array([[0.0, -1.0], [1.0, 0.0]])


class DegenerateCurveError(ValueError):
    """A sample has zero velocity."""


class CausticAssumptionError(ValueError):
    """Geodesic curvature vanishes or changes sign along the initial curve."""

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


# --------------------------------------------------------------------------
# refractive index


class RefractiveField:
    """Strictly positive index ``n(x, y)`` with its gradient.

    Subclasses implement ``value`` and ``gradient``; both accept arrays
    of matching shape and broadcast.
    """

    def value(self, x, y):
        raise NotImplementedError

    def gradient(self, x, y):
        raise NotImplementedError

    def grad_log(self, x, y):
        gx, gy = self.gradient(x, y)
        n = self.value(x, y)
        return gx / n, gy / n

    @property
    def is_constant(self):
        return False


@dataclass(frozen=True)
class ConstantIndex(RefractiveField):
    n0: float = 1.0

    def __post_init__(self):
        if not self.n0 > 0:
            raise ValueError("refractive index must be positive")

    def value(self, x, y):
        return np.full(np.broadcast(np.asarray(x), np.asarray(y)).shape, self.n0)[()]

    def gradient(self, x, y):
        z = np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)[()]
        return z, z

    @property
    def is_constant(self):
        return True


@dataclass(frozen=True)
class ExponentialIndex(RefractiveField):
    """``n(x, y) = n0 * exp(rate * y)``."""

    rate: float = 1.0
    n0: float = 1.0

    def value(self, x, y):
        return self.n0 * np.exp(self.rate * np.asarray(y, dtype=float)) + 0 * np.asarray(x)

    def gradient(self, x, y):
        n = self.value(x, y)
        return np.zeros_like(n), self.rate * n


class TabulatedIndex(RefractiveField):
    """Bilinear interpolation of ``n`` on a rectilinear grid.

    The gradient is the exact derivative of the bilinear patch, so it is
    piecewise constant along each axis. Points outside the grid are clamped
    to the boundary patch.
    """

    def __init__(self, xs, ys, values):
        self.xs = np.asarray(xs, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != (self.xs.size, self.ys.size):
            raise ValueError("values must have shape (len(xs), len(ys))")
        if self.xs.size < 2 or self.ys.size < 2:
            raise ValueError("tabulated index needs at least 2 points per axis")
        if np.any(np.diff(self.xs) <= 0) or np.any(np.diff(self.ys) <= 0):
            raise ValueError("grid axes must be strictly increasing")
        if np.any(self.values <= 0) or not np.all(np.isfinite(self.values)):
            raise ValueError("tabulated refractive index must be finite and positive")

    def _locate(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        i = np.clip(np.searchsorted(self.xs, x) - 1, 0, self.xs.size - 2)
        j = np.clip(np.searchsorted(self.ys, y) - 1, 0, self.ys.size - 2)
        hx = self.xs[i + 1] - self.xs[i]
        hy = self.ys[j + 1] - self.ys[j]
        tx = (x - self.xs[i]) / hx
        ty = (y - self.ys[j]) / hy
        v = self.values
        return tx, ty, hx, hy, v[i, j], v[i + 1, j], v[i, j + 1], v[i + 1, j + 1]

    def value(self, x, y):
        tx, ty, _, _, v00, v10, v01, v11 = self._locate(x, y)
        return (
            v00 * (1 - tx) * (1 - ty) + v10 * tx * (1 - ty) + v01 * (1 - tx) * ty + v11 * tx * ty
        )

    def gradient(self, x, y):
        tx, ty, hx, hy, v00, v10, v01, v11 = self._locate(x, y)
        gx = ((v10 - v00) * (1 - ty) + (v11 - v01) * ty) / hx
        gy = ((v01 - v00) * (1 - tx) + (v11 - v10) * tx) / hy
        return gx, gy


# --------------------------------------------------------------------------
# curves


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Samples ``(x, y)`` of a plane curve at strictly increasing parameters.

    ``derivs`` and ``second_derivs`` are taken with respect to ``params``.
    ``evaluator`` (optional) maps parameters to ``(points, first, second)``
    and is what reparametrisation uses between samples.
    """

    params: np.ndarray
    points: np.ndarray
    derivs: Optional[np.ndarray] = None
    second_derivs: Optional[np.ndarray] = None
    evaluator: Optional[Callable] = None

    def __post_init__(self):
        params = np.asarray(self.params, dtype=float)
        points = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "points", points)
        if params.ndim != 1 or points.shape != (params.size, 2):
            raise ValueError("points must have shape (M, 2) matching params")
        if params.size >= 2 and np.any(np.diff(params) <= 0):
            raise ValueError("curve parameters must be strictly increasing")
        if not np.all(np.isfinite(points)):
            raise ValueError("curve coordinates must be finite")
        for name in ("derivs", "second_derivs"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=float)
                if arr.shape != points.shape:
                    raise ValueError(f"{name} must match points in shape")
                object.__setattr__(self, name, arr)
        if self.derivs is not None:
            speed = np.hypot(self.derivs[:, 0], self.derivs[:, 1])
            bad = np.flatnonzero(~(speed > 0))
            if bad.size:
                raise DegenerateCurveError(f"zero velocity at sample {bad[0]}")

    @classmethod
    def from_evaluator(cls, evaluator, params):
        pts, d1, d2 = evaluator(np.asarray(params, dtype=float))
        return cls(params, pts, d1, d2, evaluator)

    @property
    def size(self):
        return self.params.size

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def y(self):
        return self.points[:, 1]

    def velocity(self):
        d = self._require_derivs()
        return np.hypot(d[:, 0], d[:, 1])

    def reversed(self):
        """Same curve traversed backwards, parameter ``t -> -t``."""
        ev = None
        if self.evaluator is not None:
            base = self.evaluator

            def ev(t):
                p, d1, d2 = base(-np.asarray(t, dtype=float))
                return p, -d1, d2

        flip = lambda a: None if a is None else a[::-1].copy()
        d1 = None if self.derivs is None else -self.derivs[::-1]
        return SampledCurve(-self.params[::-1], flip(self.points), d1, flip(self.second_derivs), ev)

    def _require_derivs(self):
        if self.derivs is None:
            raise ValueError("curve carries no derivatives; call with_derivatives() first")
        return self.derivs


def with_derivatives(curve, lam=1e-8, mu=None):
    """Fill in derivatives of a bare sampled curve from the variational smoother.

    The parameters must be equally spaced. With a tiny ``lam`` the smoother
    nearly interpolates, so this only regularises the differentiation.
    """
    from .smoothing import NodeSet, build_operators, select_mu, smooth_samples, smoothed_pair_evaluator

    if curve.derivs is not None and curve.second_derivs is not None:
        return curve
    t = curve.params
    if not np.allclose(np.diff(t), t[1] - t[0], rtol=1e-9, atol=0):
        raise ValueError("with_derivatives needs equally spaced parameters")
    nodes = NodeSet(float(t[0]), float(t[-1]), t.size)
    if mu is None:
        mu = select_mu(t.size, t[0], t[-1])
    ops = build_operators(nodes, lam, mu)
    ev = smoothed_pair_evaluator(smooth_samples(ops, curve.x), smooth_samples(ops, curve.y))
    _, d1, d2 = ev(t)
    return SampledCurve(t, curve.points, d1, d2, curve.evaluator or ev)


def circle(radius=1.0, center=(0.0, 0.0), count=101, start=0.0, stop=2 * math.pi):
    """Circle parameterised by angle, counter-clockwise."""
    cx, cy = center

    def ev(t):
        t = np.asarray(t, dtype=float)
        c, s = np.cos(t), np.sin(t)
        pts = np.stack([cx + radius * c, cy + radius * s], axis=-1)
        d1 = np.stack([-radius * s, radius * c], axis=-1)
        d2 = np.stack([-radius * c, -radius * s], axis=-1)
        return pts, d1, d2

    return SampledCurve.from_evaluator(ev, np.linspace(start, stop, count))


# --------------------------------------------------------------------------
# travel time


def _speed(evaluator, n, t):
    pts, d1, _ = evaluator(t)
    return n.value(pts[..., 0], pts[..., 1]) * np.hypot(d1[..., 0], d1[..., 1])


def reparametrize_travel_time(curve, n, count=None, substeps=64, tol=1e-12):
    """Resample ``curve`` at equal increments of travel time ``int n |dr|``.

    Travel time is accumulated with fixed-step fourth order Runge-Kutta on a
    grid ``substeps`` times finer than the input samples, then inverted by
    bisection. The returned curve is parameterised by travel time starting
    at 0, with derivatives with respect to it; its evaluator accepts travel
    time as well.
    """
    if curve.evaluator is None:
        curve = with_derivatives(curve)
    ev = curve.evaluator
    count = curve.size if count is None else count
    t0, t1 = float(curve.params[0]), float(curve.params[-1])
    grid = np.linspace(t0, t1, (curve.size - 1) * substeps + 1)
    h = grid[1] - grid[0]

    s_left = _speed(ev, n, grid[:-1])
    s_mid = _speed(ev, n, grid[:-1] + h / 2)
    s_right = _speed(ev, n, grid[1:])
    if np.any(~(s_left > 0)) or np.any(~(s_mid > 0)) or not s_right[-1] > 0:
        raise DegenerateCurveError("zero velocity along the curve")
    # RK4 for dtau/dt = speed(t) (no tau dependence) reduces to Simpson
    increments = h / 6 * (s_left + 4 * s_mid + s_right)
    tau = np.concatenate([[0.0], np.cumsum(increments)])
    total = tau[-1]

    def travel(t):
        k = np.clip(np.searchsorted(grid, t, side="right") - 1, 0, grid.size - 2)
        dt = t - grid[k]
        sa = _speed(ev, n, grid[k])
        sm = _speed(ev, n, grid[k] + dt / 2)
        sb = _speed(ev, n, t)
        return tau[k] + dt / 6 * (sa + 4 * sm + sb)

    def invert(target):
        target = np.asarray(target, dtype=float)
        k = np.clip(np.searchsorted(tau, target, side="right") - 1, 0, grid.size - 2)
        lo = grid[k].copy()
        hi = grid[k + 1].copy()
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            below = travel(mid) < target
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.max(hi - lo) < tol * max(1.0, abs(t1 - t0)):
                break
        return 0.5 * (lo + hi)

    def new_evaluator(u):
        u = np.asarray(u, dtype=float)
        t = invert(u)
        pts, d1, d2 = ev(t)
        nval = n.value(pts[..., 0], pts[..., 1])
        gx, gy = n.gradient(pts[..., 0], pts[..., 1])
        speed = np.hypot(d1[..., 0], d1[..., 1])
        s = nval * speed
        ds = (gx * d1[..., 0] + gy * d1[..., 1]) * speed + nval * np.sum(d1 * d2, axis=-1) / speed
        dt_du = 1.0 / s
        d2t_du2 = -ds / s**3
        first = d1 * dt_du[..., None]
        second = d2 * (dt_du**2)[..., None] + d1 * d2t_du2[..., None]
        return pts, first, second

    u_nodes = np.linspace(0.0, total, count)
    u_nodes[-1] = total
    return SampledCurve.from_evaluator(new_evaluator, u_nodes)


# --------------------------------------------------------------------------
# curvature


def euclidean_curvature(curve, index):
    """Signed curvature ``(x'y'' - x''y') / |r'|^3`` at one sample."""
    if curve.derivs is None or curve.second_derivs is None:
        curve = with_derivatives(curve)
    d1 = curve.derivs[index]
    d2 = curve.second_derivs[index]
    speed = math.hypot(d1[0], d1[1])
    if not speed > 0:
        raise DegenerateCurveError(f"zero velocity at sample {index}")
    return float((d1[0] * d2[1] - d2[0] * d1[1]) / speed**3)


def euclidean_curvature_fd(p_minus, p0, p_plus, h, velocity):
    """Three-point curvature: ``det[[p-, 1], [p0, 1], [p+, 1]] / (velocity h)^3``.

    Second order accurate in ``h`` for samples at parameters ``t-h, t, t+h``.
    """
    if not h > 0 or not velocity > 0:
        raise ValueError("h and velocity must be positive")
    m = np.array([[p_minus[0], p_minus[1], 1.0], [p0[0], p0[1], 1.0], [p_plus[0], p_plus[1], 1.0]])
    return float(np.linalg.det(m) / (velocity**3 * h**3))


def unit_normals(curve):
    d = curve._require_derivs()
    speed = np.hypot(d[:, 0], d[:, 1])
    if np.any(~(speed > 0)):
        raise DegenerateCurveError(f"zero velocity at sample {np.flatnonzero(~(speed > 0))[0]}")
    return (d / speed[:, None]) @ _ROT90.T


def geodesic_curvature(curve, n, index=None):
    """Geodesic curvature factor ``kappa``.

    ``kappa |r'|^2 = curvature - <unit normal, grad log n>``, the unit normal
    being the tangent turned by +90 degrees. With ``index=None`` the whole
    profile is returned as an array.
    """
    if curve.derivs is None or curve.second_derivs is None:
        curve = with_derivatives(curve)
    d1, d2 = curve.derivs, curve.second_derivs
    speed = np.hypot(d1[:, 0], d1[:, 1])
    if np.any(~(speed > 0)):
        raise DegenerateCurveError(f"zero velocity at sample {np.flatnonzero(~(speed > 0))[0]}")
    curvature = (d1[:, 0] * d2[:, 1] - d2[:, 0] * d1[:, 1]) / speed**3
    normal = unit_normals(curve)
    lx, ly = n.grad_log(curve.x, curve.y)
    kappa = (curvature - (normal[:, 0] * lx + normal[:, 1] * ly)) / speed**2
    if index is None:
        return kappa
    return float(kappa[index])


@dataclass(frozen=True, eq=False)
class CurvatureProfile:
    kappa: np.ndarray
    sign: int

    @property
    def signs(self):
        return np.full(self.kappa.shape, float(self.sign))


def curvature_profile(curve, n, kappa_min=None):
    """Geodesic curvature at every sample, checked to keep one sign.

    ``kappa_min`` defaults to ``1e-3 * max |kappa|``.
    """
    kappa = geodesic_curvature(curve, n)
    scale = float(np.max(np.abs(kappa)))
    if kappa_min is None:
        kappa_min = 1e-3 * scale
    if not scale > 0:
        raise CausticAssumptionError("geodesic curvature vanishes identically", 0)
    small = np.flatnonzero(np.abs(kappa) < kappa_min)
    if small.size:
        i = int(small[0])
        raise CausticAssumptionError(
            f"geodesic curvature {kappa[i]:.3e} below threshold {kappa_min:.3e} at sample {i}", i
        )
    ref = np.sign(kappa[0])
    flips = np.flatnonzero(np.sign(kappa) != ref)
    if flips.size:
        i = int(flips[0])
        raise CausticAssumptionError(f"geodesic curvature changes sign at sample {i}", i)
    return CurvatureProfile(kappa=kappa, sign=int(ref))


def normal_offset(curve, index, r):
    """Point at signed distance ``r`` along the (+90 degree) unit normal."""
    normal = unit_normals(curve)[index]
    return curve.points[index] + r * normal


def rigid_motion(curve, angle=0.0, shift=(0.0, 0.0)):
    """Rotate by ``angle`` about the origin, then translate by ``shift``."""
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    shift = np.asarray(shift, dtype=float)
    tf = lambda a: None if a is None else a @ rot.T
    ev = None
    if curve.evaluator is not None:
        base = curve.evaluator

        def ev(t):
            p, d1, d2 = base(t)
            return p @ rot.T + shift, d1 @ rot.T, d2 @ rot.T

    return replace(
        curve,
        points=curve.points @ rot.T + shift,
        derivs=tf(curve.derivs),
        second_derivs=tf(curve.second_derivs),
        evaluator=ev,
    )
