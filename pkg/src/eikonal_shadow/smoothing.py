"""Variational smoothing and approximate differentiation of equally spaced samples.

Given samples ``g_1..g_N`` at nodes ``x_k``, the smoother returns the minimiser
``u`` of::

    sum_k (u(x_k) - g_k)^2 + lam * int (mu^7 u''''^2 + u^2 / mu) dx

which is the kernel expansion ``u(x) = sum_k c_k K((x - x_k)/mu)`` with
``c = (lam I + A)^-1 g``. The node values are ``C g`` and the node derivatives
``D g``; ``D`` is what the marching scheme uses to differentiate along a row.
"""

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
import scipy.linalg
from scipy.optimize import minimize_scalar

from .kernel import autocorrelation_value, kernel_derivative, kernel_value

# coefficients of the fitted optimal-scale formula for mu / (b - a)
_MU_FIT = (0.0415, 0.5416, -0.6426, 1.3706)

SRQ_MAX_NODES = 60


class OperatorConstructionError(ArithmeticError):
    """``lam I + A`` could not be factorised."""

    def __init__(self, message, rcond):
        super().__init__(f"{message} (reciprocal condition estimate {rcond:.3e})")
        self.rcond = rcond


class ConditioningError(ArithmeticError):
    """Gram matrix too ill-conditioned for the requested computation."""


@dataclass(frozen=True)
class NodeSet:
    a: float
    b: float
    count: int

    def __post_init__(self):
        if self.count < 3:
            raise ValueError(f"a node set needs at least 3 nodes, got {self.count}")
        if not self.b > self.a:
            raise ValueError(f"need b > a, got a={self.a}, b={self.b}")

    @property
    def spacing(self):
        return (self.b - self.a) / (self.count - 1)

    @property
    def nodes(self):
        return self.a + np.arange(self.count) * self.spacing


@dataclass(frozen=True, eq=False)
class SmoothingOperators:
    nodeset: NodeSet
    lam: float
    mu: float
    gram: np.ndarray
    resolvent: np.ndarray
    filter: np.ndarray
    differentiator: np.ndarray
    _cho: tuple = field(repr=False)

    def solve(self, rhs):
        """Apply ``(lam I + A)^-1`` through the stored Cholesky factor."""
        return scipy.linalg.cho_solve(self._cho, rhs)


@dataclass(frozen=True, eq=False)
class SmoothedFunction:
    operators: SmoothingOperators
    coefficients: np.ndarray
    raw_samples: np.ndarray

    def node_values(self):
        return self.operators.filter @ self.raw_samples

    def node_derivatives(self):
        return self.operators.differentiator @ self.raw_samples

    def __call__(self, x, derivative_order=0):
        return evaluate(self, x, derivative_order)


def _toeplitz_kernel(nodeset, mu, func):
    first = func(nodeset.spacing * np.arange(nodeset.count) / mu)
    return scipy.linalg.toeplitz(first)


def build_operators(nodeset, lam, mu):
    """Assemble ``A``, ``(lam I + A)^-1``, ``C`` and ``D`` on ``nodeset``."""
    if not lam > 0:
        raise ValueError(f"lam must be positive, got {lam}")
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    gram = _toeplitz_kernel(nodeset, mu, kernel_value)
    shifted = gram + lam * np.eye(nodeset.count)
    try:
        cho = scipy.linalg.cho_factor(shifted, lower=True)
    except np.linalg.LinAlgError:
        rcond = 1.0 / np.linalg.cond(shifted)
        raise OperatorConstructionError("lam*Id + A is not numerically positive definite", rcond)
    resolvent = scipy.linalg.cho_solve(cho, np.eye(nodeset.count))
    resolvent = 0.5 * (resolvent + resolvent.T)
    x = nodeset.nodes
    # K'(0) = 0 gives the zero diagonal
    slope = kernel_derivative((x[:, None] - x[None, :]) / mu, 1) / mu
    return SmoothingOperators(
        nodeset=nodeset,
        lam=float(lam),
        mu=float(mu),
        gram=gram,
        resolvent=resolvent,
        filter=gram @ resolvent,
        differentiator=slope @ resolvent,
        _cho=cho,
    )


def smooth_samples(operators, samples):
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (operators.nodeset.count,):
        raise ValueError(
            f"expected {operators.nodeset.count} samples, got shape {samples.shape}"
        )
    if not np.all(np.isfinite(samples)):
        raise ValueError("samples must be finite")
    coefficients = operators.solve(samples)
    return SmoothedFunction(operators, coefficients, samples)


def evaluate(smoothed, x, derivative_order=0):
    """Evaluate the smoother (or its first/second derivative) at ``x``."""
    if derivative_order not in (0, 1, 2):
        raise ValueError(f"derivative_order must be 0, 1 or 2, got {derivative_order}")
    ops = smoothed.operators
    x_arr = np.asarray(x, dtype=float)
    scaled = (x_arr[..., None] - ops.nodeset.nodes) / ops.mu
    if derivative_order == 0:
        basis = kernel_value(scaled)
    else:
        basis = kernel_derivative(scaled, derivative_order) / ops.mu**derivative_order
    value = basis @ smoothed.coefficients
    return float(value) if x_arr.ndim == 0 else value


def select_mu(count, a, b):
    """Near-optimal smoothing scale from the fitted formula in ``1/sqrt(N)``."""
    if count < 3:
        raise ValueError(f"count must be at least 3, got {count}")
    c0, c1, c2, c3 = _MU_FIT
    return (b - a) * (c0 + c1 * count**-0.5 + c2 / count + c3 * count**-1.5)


def _mp_kernel(x, n):
    nu = mpmath.pi / 8
    ax = abs(x)
    if x == 0:
        sign = 1 if n % 2 == 0 else 0
    else:
        sign = (-mpmath.sign(x)) ** n
    return sign * (
        mpmath.exp(-ax * mpmath.cos(nu)) * mpmath.cos(ax * mpmath.sin(nu) - (n + 1) * nu)
        + mpmath.exp(-ax * mpmath.sin(nu))
        * mpmath.sin(ax * mpmath.cos(nu) + (n + 1) * nu - n * mpmath.pi / 2)
    ) / 4


def srq_value(nodeset, mu):
    """Smallest dimensionless Rayleigh quotient ``mu^14 |v^(7)|^2 / |v|^2`` over the kernel span.

    This is the least eigenvalue of ``H = [-L^(14)]`` relative to ``G = [L]``.
    ``G`` is extremely ill-conditioned for wide kernels, so the pencil is
    solved in extended precision; the double precision reciprocal condition
    of ``G`` is kept as a diagnostic. Limited to ``SRQ_MAX_NODES`` nodes.
    """
    n = nodeset.count
    if n > SRQ_MAX_NODES:
        raise ValueError(f"srq_value is limited to {SRQ_MAX_NODES} nodes, got {n}")
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    value, _ = _srq_with_rcond(n, nodeset.spacing / mu)
    return value


def srq_rcond(nodeset, mu):
    """Double precision reciprocal condition number of the ``L`` Gram matrix."""
    gram = _toeplitz_kernel(nodeset, mu, autocorrelation_value)
    return 1.0 / np.linalg.cond(gram)


def _srq_with_rcond(n, ratio):
    dps = 40 + n // 2
    with mpmath.workdps(dps):
        ratio = mpmath.mpf(ratio)
        seven_eighths = mpmath.mpf(7) / 8
        g_row, h_row = [], []
        for k in range(n):
            d = k * ratio
            g_row.append(seven_eighths * _mp_kernel(d, 0) - d / 8 * _mp_kernel(d, 1))
            h_row.append(-(seven_eighths * _mp_kernel(d, 6) + d / 8 * _mp_kernel(d, 7)))
        G = mpmath.matrix(n, n)
        H = mpmath.matrix(n, n)
        for i in range(n):
            for j in range(n):
                G[i, j] = g_row[abs(i - j)]
                H[i, j] = h_row[abs(i - j)]
        try:
            chol = mpmath.cholesky(G)
        except ValueError as exc:
            raise ConditioningError(
                f"Gram matrix of L is singular at {dps} digits for N={n}, spacing/mu={ratio}"
            ) from exc
        inv = mpmath.inverse(chol)
        pencil = inv * H * inv.T
        pencil = (pencil + pencil.T) / 2
        eigenvalues = mpmath.eigsy(pencil, eigvals_only=True)
        value = float(min(eigenvalues))
    rcond = 1.0 / np.linalg.cond(scipy.linalg.toeplitz([float(g) for g in g_row]))
    return value, rcond


def minimize_srq(count, bracket=(0.05, 2.0)):
    """Minimise the S.R.Q. over ``(b - a)/((N - 1) mu)``.

    Returns ``(minimum value, optimal ratio, mu / (b - a))``.
    """
    if count > SRQ_MAX_NODES:
        raise ValueError(f"minimize_srq is limited to {SRQ_MAX_NODES} nodes, got {count}")
    lo, hi = (math.log(v) for v in bracket)
    res = minimize_scalar(
        lambda t: _srq_with_rcond(count, math.exp(t))[0],
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-7},
    )
    ratio = math.exp(res.x)
    return float(res.fun), ratio, 1.0 / ((count - 1) * ratio)


def denoise_curve(samples_x, samples_y, lam, mu, output_count=101):
    """Smooth a noisy polyline coordinate-wise over ``t`` in ``[0, 1]``.

    Each coordinate is smoothed independently at nodes ``(j-1)/(count-1)``
    and the smoothed pair is resampled at ``output_count`` equally spaced
    parameters. The returned curve carries exact first and second
    derivatives of the smoother and an evaluator for reparametrisation.
    """
    from .geometry import SampledCurve

    samples_x = np.asarray(samples_x, dtype=float)
    samples_y = np.asarray(samples_y, dtype=float)
    if samples_x.shape != samples_y.shape or samples_x.ndim != 1:
        raise ValueError("samples_x and samples_y must be 1-d and of equal length")
    if samples_x.size < 3:
        raise ValueError("need at least 3 samples")
    ops = build_operators(NodeSet(0.0, 1.0, samples_x.size), lam, mu)
    fx = smooth_samples(ops, samples_x)
    fy = smooth_samples(ops, samples_y)
    ev = smoothed_pair_evaluator(fx, fy)
    params = np.linspace(0.0, 1.0, output_count)
    pts, d1, d2 = ev(params)
    if not np.all(np.hypot(d1[:, 0], d1[:, 1]) > 0):
        # degenerate (e.g. all-zero) data: keep the points, drop the derivatives
        return SampledCurve(params, pts, evaluator=ev)
    return SampledCurve(params, pts, d1, d2, ev)


def smoothed_pair_evaluator(fx, fy):
    """Curve evaluator ``t -> (points, first, second)`` from two smoothed coordinates."""

    def evaluator(t):
        t = np.asarray(t, dtype=float)
        pts = np.stack([evaluate(fx, t, 0), evaluate(fy, t, 0)], axis=-1)
        d1 = np.stack([evaluate(fx, t, 1), evaluate(fy, t, 1)], axis=-1)
        d2 = np.stack([evaluate(fx, t, 2), evaluate(fy, t, 2)], axis=-1)
        return pts, d1, d2

    return evaluator
