"""Closed-form eikonals and their continuations into the shadow, for ``n = 1``.

Two worked examples are available in closed form: Tschirnhausen's cubic
``x = (1 - 3t^2)/2, y = t(3 - t^2)/2`` and the catenary ``y = cosh x``.
``generic_continuation`` implements the general recipe for any analytic
curve, continued to a complex parameter ``lambda + i mu``.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

SQRT8_OVER_3 = 2.0 * math.sqrt(2.0) / 3.0


class ContinuationSingularError(ArithmeticError):
    """The continuation formulas have a vanishing denominator."""


@dataclass(frozen=True)
class OracleRecord:
    x: float
    y: float
    w_re: float
    w_im: float
    lam: float
    mu: float
    burgers: Optional[complex] = None

    @property
    def w(self):
        return complex(self.w_re, self.w_im)


# --------------------------------------------------------------------------
# Tschirnhausen's cubic


def tschirnhausen_caustic(t):
    t = np.asarray(t, dtype=float)
    x = 0.5 * (1 - 3 * t**2)
    y = 0.5 * t * (3 - t**2)
    return (float(x), float(y)) if t.ndim == 0 else (x, y)


def tschirnhausen_arclength(t):
    return 0.5 * t * (t**2 + 3)


def tschirnhausen_parameter(arclength):
    """Inverse of the arc length, ``t = 2 sinh(asinh(s)/3)``."""
    return 2 * np.sinh(np.arcsinh(arclength) / 3)


def tschirnhausen_curvature(t):
    return 4.0 / 3.0 / (1 + t**2) ** 2


def tschirnhausen_derivatives(t):
    """First and second derivatives ``((x', y'), (x'', y''))`` in ``t``."""
    return (-3 * t, 1.5 * (1 - t**2)), (-3.0 + 0 * t, -3 * t)


def noisy_tschirnhausen_samples(count=31, t_min=-1.5, t_max=2.2, noise=0.05, seed=0):
    """Gross data: cubic samples at equally spaced ``t``, each coordinate
    multiplied by ``1 + noise * U(-1, 1)`` from ``numpy.random.default_rng(seed)``."""
    t = np.linspace(t_min, t_max, count)
    x, y = tschirnhausen_caustic(t)
    rng = np.random.default_rng(seed)
    x = x * (1 + noise * rng.uniform(-1.0, 1.0, count))
    y = y * (1 + noise * rng.uniform(-1.0, 1.0, count))
    return t, x, y


def tschirnhausen_light(s, t):
    """Point and real eikonal on the illuminated side, tangent-line coordinate ``s``."""
    x = 0.5 * (1 - 3 * t**2) - 2 * s * t / (1 + t**2)
    y = 0.5 * t * (3 - t**2) + s * (1 - t**2) / (1 + t**2)
    w = s + 0.5 * t * (3 + t**2)
    return (x, y), w


def tschirnhausen_shadow_xyw(s, t):
    """Vectorised shadow continuation: returns ``x, y, w`` (``w`` complex)."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    q = s**2 + t**2
    den = 2 * (1 + q)
    x = (1 - 2 * q + s**4 - 2 * s**2 * t**2 - 3 * t**4) / den
    y = t * (3 - 2 * (s**2 - t**2) - q**2) / den
    z = 1j * s + t
    w = z - 2 * z / (1 + z**2) * x + (1 - z**2) / (1 + z**2) * y
    return x, y, w


def tschirnhausen_shadow(s, t):
    """Shadow-side record at complex parameter ``t + i s``."""
    x, y, w = tschirnhausen_shadow_xyw(s, t)
    return OracleRecord(float(x), float(y), float(w.real), float(w.imag), lam=float(t), mu=float(s))


def tschirnhausen_field(s_values, t_values):
    """Shadow records on the tensor grid ``s_values x t_values`` as an ``(K, 6)`` array.

    Columns are ``x, y, u, v, t, s``.
    """
    ss, tt = np.meshgrid(s_values, t_values, indexing="ij")
    x, y, w = tschirnhausen_shadow_xyw(ss, tt)
    return np.column_stack([a.ravel() for a in (x, y, w.real, w.imag, tt, ss)])


def signed_distance_to_cubic(x, y, t_guess, window=0.5):
    """Signed distance from ``(x, y)`` to the cubic and the foot parameter.

    Positive on the side the +90 degree normal points to (the shadow side,
    since the cubic's curvature is positive).
    """
    res = minimize_scalar(
        lambda t: (0.5 * (1 - 3 * t**2) - x) ** 2 + (0.5 * t * (3 - t**2) - y) ** 2,
        bounds=(t_guess - window, t_guess + window),
        method="bounded",
        options={"xatol": 1e-13},
    )
    t = float(res.x)
    cx, cy = tschirnhausen_caustic(t)
    (dx, dy), _ = tschirnhausen_derivatives(t)
    speed = math.hypot(dx, dy)
    nx, ny = -dy / speed, dx / speed
    return (x - cx) * nx + (y - cy) * ny, t


# --------------------------------------------------------------------------
# catenary


def _mu_cot_mu(mu):
    return 1.0 if mu == 0 else mu / math.tan(mu)


def _mu_over_sin(mu):
    return 1.0 if mu == 0 else mu / math.sin(mu)


def catenary_continuation(lam, mu):
    """Shadow continuation above ``y = cosh x`` for ``0 <= mu <= pi/2``.

    ``burgers`` carries the complex slope ``sinh(lam + i mu)``.
    """
    if not 0 <= mu <= math.pi / 2:
        raise ValueError(f"mu must lie in [0, pi/2], got {mu}")
    ch, sh, th = math.cosh(lam), math.sinh(lam), math.tanh(lam)
    x = lam + th * (_mu_cot_mu(mu) - 1)
    y = (sh**2 * _mu_over_sin(mu) + mu * math.sin(mu) + math.cos(mu)) / ch
    w_re = sh * _mu_over_sin(mu)
    w_im = (math.sin(mu) - mu * math.cos(mu)) / ch
    return OracleRecord(x, y, w_re, w_im, lam=lam, mu=mu, burgers=cmath.sinh(complex(lam, mu)))


def catenary_field(lam_values, mu_values):
    """Records on a tensor grid as an ``(K, 6)`` array ``x, y, u, v, lam, mu``."""
    rows = []
    for lam in lam_values:
        for mu in mu_values:
            r = catenary_continuation(float(lam), float(mu))
            rows.append((r.x, r.y, r.w_re, r.w_im, r.lam, r.mu))
    return np.array(rows)


CATENARY_SINGULAR_POINT = (0.0, math.pi / 2)


def catenary_is_singular(lam, mu, tol=1e-9):
    """The continuation map degenerates at ``lam = 0, mu = pi/2``."""
    return abs(lam) < tol and abs(mu - math.pi / 2) < tol


# --------------------------------------------------------------------------
# generic analytic curves


@dataclass(frozen=True)
class AnalyticCurve:
    """A curve ``(alpha, beta)`` with arc length ``gamma``, all holomorphic.

    Each callable maps a complex parameter to a complex value and reduces
    to the real curve on the real axis.
    """

    alpha: Callable
    beta: Callable
    dalpha: Callable
    dbeta: Callable
    gamma: Optional[Callable] = None
    d2alpha: Optional[Callable] = None
    d2beta: Optional[Callable] = None


def catenary_slope_curve():
    """Catenary parameterised by slope (= arc length): ``x = asinh t, y = sqrt(1 + t^2)``."""
    return AnalyticCurve(
        alpha=lambda s: cmath.log(s + cmath.sqrt(1 + s * s)),
        beta=lambda s: cmath.sqrt(1 + s * s),
        dalpha=lambda s: 1 / cmath.sqrt(1 + s * s),
        dbeta=lambda s: s / cmath.sqrt(1 + s * s),
        gamma=lambda s: s,
        d2alpha=lambda s: -s / (1 + s * s) ** 1.5,
        d2beta=lambda s: 1 / (1 + s * s) ** 1.5,
    )


def catenary_graph_curve():
    """Catenary parameterised by abscissa: ``x = t, y = cosh t``, arc length ``sinh t``."""
    return AnalyticCurve(
        alpha=lambda s: complex(s),
        beta=cmath.cosh,
        dalpha=lambda s: 1 + 0j,
        dbeta=cmath.sinh,
        gamma=cmath.sinh,
        d2alpha=lambda s: 0j,
        d2beta=cmath.cosh,
    )


def tschirnhausen_curve():
    return AnalyticCurve(
        alpha=lambda s: 0.5 * (1 - 3 * s * s),
        beta=lambda s: 0.5 * s * (3 - s * s),
        dalpha=lambda s: -3 * s,
        dbeta=lambda s: 1.5 * (1 - s * s),
        gamma=lambda s: 0.5 * s * (s * s + 3),
        d2alpha=lambda s: -3.0 + 0j,
        d2beta=lambda s: -3 * s,
    )


def generic_continuation(curve, lam, mu):
    """Real point and complex eikonal reached by the complex tangent at ``lam + i mu``."""
    s = complex(lam, mu)
    a, b = curve.alpha(s), curve.beta(s)
    da, db = curve.dalpha(s), curve.dbeta(s)
    den_x = (da.conjugate() * db).imag
    den_y = (db.conjugate() * da).imag
    if den_x == 0 or den_y == 0:
        raise ContinuationSingularError(f"Im[conj(alpha') beta'] vanishes at s={s}")
    x = (da.conjugate() * (a * db - da * b)).imag / den_x
    y = (db.conjugate() * (b * da - db * a)).imag / den_y
    w = complex(float("nan"), float("nan"))
    if curve.gamma is not None:
        # tangent-line relation (w - gamma) |r'| = <r', (x, y) - r> with complex r
        w = curve.gamma(s) + (da * (x - a) + db * (y - b)) / cmath.sqrt(da * da + db * db)
    return OracleRecord(float(x), float(y), float(w.real), float(w.imag), lam=lam, mu=mu)


# --------------------------------------------------------------------------
# near-caustic behaviour


def shadow_expansion(kappa, r, s):
    """Leading terms ``u = s``, ``v = (2 sqrt 2 / 3) |kappa|^(1/2) |r|^(3/2)``."""
    if kappa == 0:
        raise ValueError("kappa must be non-zero")
    return s, SQRT8_OVER_3 * math.sqrt(abs(kappa)) * abs(r) ** 1.5


# --------------------------------------------------------------------------
# sampling on the hodograph mesh


def tschirnhausen_on_mesh(u_nodes, v_nodes, tol=1e-13, max_iter=60):
    """Invert the shadow map: ``(x, y)`` where ``Re w = u``, ``Im w = v``.

    ``u`` is arc length measured from ``t = 0``. Solved point by point with
    Newton's method; ``v`` must be positive. Returns ``x, y`` of shape
    ``(len(u_nodes), len(v_nodes))``.
    """
    u_nodes = np.asarray(u_nodes, dtype=float)
    v_nodes = np.asarray(v_nodes, dtype=float)
    if np.any(v_nodes <= 0):
        raise ValueError("the inversion needs v > 0")
    uu, vv = np.meshgrid(u_nodes, v_nodes, indexing="ij")
    t = tschirnhausen_parameter(uu)
    # v ~ 2 s^3 (1 + t^2)^(-1) near the caustic at leading order
    s = np.cbrt(vv * (1 + t**2) / 2)
    h = 1e-7
    for _ in range(max_iter):
        _, _, w = tschirnhausen_shadow_xyw(s, t)
        ru, rv = w.real - uu, w.imag - vv
        _, _, ws = tschirnhausen_shadow_xyw(s + h, t)
        _, _, wt = tschirnhausen_shadow_xyw(s, t + h)
        # w is not holomorphic in t + i s, so use a real 2x2 Jacobian
        a11, a21 = (ws.real - w.real) / h, (ws.imag - w.imag) / h
        a12, a22 = (wt.real - w.real) / h, (wt.imag - w.imag) / h
        det = a11 * a22 - a12 * a21
        ds = (a22 * ru - a12 * rv) / det
        dt = (-a21 * ru + a11 * rv) / det
        s, t = s - ds, t - dt
        if max(np.max(np.abs(ru)), np.max(np.abs(rv))) < tol:
            break
    _, _, w = tschirnhausen_shadow_xyw(s, t)
    err = max(np.max(np.abs(w.real - uu)), np.max(np.abs(w.imag - vv)))
    if not err < 1e-10:
        raise ArithmeticError(f"mesh inversion did not converge (residual {err:.2e})")
    x, y, _ = tschirnhausen_shadow_xyw(s, t)
    return x, y
