"""Marching scheme for the hodograph system ``x_v = -y_u / f``, ``y_v = x_u / f``.

Rows of the ``(u, v)`` mesh are produced one after the other: the caustic
itself, a second row from the near-caustic expansion, then repeated
differentiate / soften / mollify steps.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .geometry import curvature_profile, unit_normals
from .kernel import viscosity_factor
from .smoothing import NodeSet, build_operators, select_mu

DIVERGENCE_GROWTH = 1e3


class DivergenceError(ArithmeticError):
    def __init__(self, message, row):
        super().__init__(message)
        self.row = row


@dataclass(frozen=True)
class SolverConfig:
    M: int = 101
    N: int = 91
    vstep: float = 0.005
    lam: float = 0.005
    mu: Optional[float] = None
    nu_visc: float = 0.5
    xi: float = 0.9
    # differentiate X - mean(X) instead of X; D does not annihilate constants
    center_rows: bool = True

    def __post_init__(self):
        if self.M < 5:
            raise ValueError(f"M must be at least 5, got {self.M}")
        if self.N < 2:
            raise ValueError(f"N must be at least 2, got {self.N}")
        if not self.vstep > 0:
            raise ValueError("vstep must be positive")
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.mu is not None and not self.mu > 0:
            raise ValueError("mu must be positive")
        if not 0 < self.nu_visc <= math.pi / 2:
            raise ValueError("nu_visc must lie in (0, pi/2]")
        if not self.xi >= 0:
            raise ValueError("xi must be non-negative")

    def resolve_mu(self, a, b):
        mu = select_mu(self.M, a, b) if self.mu is None else self.mu
        if not mu < b - a:
            raise ValueError(f"mu={mu} must be smaller than the u-range {b - a}")
        return mu


@dataclass(eq=False)
class HodographGrid:
    """``x[j, k]``, ``y[j, k]`` at ``(u_nodes[j], v_nodes[k])``.

    Rows past ``rows_completed`` hold NaN. ``divergence`` describes why a
    march stopped early, if it did.
    """

    u_nodes: np.ndarray
    v_nodes: np.ndarray
    x: np.ndarray
    y: np.ndarray
    rows_completed: int = 0
    divergence: Optional[str] = None

    @property
    def ustep(self):
        return float(self.u_nodes[1] - self.u_nodes[0])

    @property
    def vstep(self):
        return float(self.v_nodes[1] - self.v_nodes[0]) if self.v_nodes.size > 1 else 0.0

    @property
    def completed(self):
        return self.divergence is None and self.rows_completed == self.v_nodes.size

    def row(self, k):
        return self.x[:, k], self.y[:, k]


@dataclass(frozen=True, eq=False)
class QuasiReversibilityOperator:
    R2: np.ndarray
    xi: float
    vstep: float
    _cho: Optional[tuple] = field(default=None, repr=False)

    def apply(self, rhs):
        """``(Id + xi vstep R2^T R2)^-1 rhs``."""
        if self._cho is None:
            return np.array(rhs, dtype=float, copy=True)
        return scipy.linalg.cho_solve(self._cho, rhs)


def second_difference_matrix(M, ustep):
    """Second-difference matrix with one-sided four-point end rows."""
    if M < 4:
        raise ValueError("need at least 4 points")
    R = np.zeros((M, M))
    R[0, :4] = (2.0, -5.0, 4.0, -1.0)
    R[-1, -4:] = (-1.0, 4.0, -5.0, 2.0)
    for j in range(1, M - 1):
        R[j, j - 1 : j + 2] = (1.0, -2.0, 1.0)
    return R / ustep**2


def build_quasi_reversibility(M, ustep, xi, vstep):
    R2 = second_difference_matrix(M, ustep)
    if xi == 0:
        return QuasiReversibilityOperator(R2, xi, vstep)
    mat = np.eye(M) + xi * vstep * (R2.T @ R2)
    return QuasiReversibilityOperator(R2, xi, vstep, scipy.linalg.cho_factor(mat, lower=True))


def init_first_row(curve, M):
    if curve.size != M:
        raise ValueError(f"initial curve has {curve.size} samples, solver expects M={M}")
    return curve.x.copy(), curve.y.copy()


def init_second_row(curve, profile, vstep):
    """Offset the caustic by ``sgn(kappa) (3 v)^(2/3) / (2 |kappa|^(1/3))`` along the normal."""
    kappa = profile.kappa
    if np.any(kappa == 0):
        raise ValueError("geodesic curvature must not vanish")
    scale = np.sign(kappa) * (3.0 * vstep) ** (2.0 / 3.0) / (2.0 * np.abs(kappa) ** (1.0 / 3.0))
    offset = unit_normals(curve) * scale[:, None]
    return curve.x + offset[:, 0], curve.y + offset[:, 1]


def viscous_speeds(X, Y, A, B, n, nu_visc, signs):
    """``f(j) = P(nu, n |(A, B)|) sgn kappa``, never zero."""
    rho = n.value(X, Y) * np.hypot(A, B)
    if not np.all(np.isfinite(rho)):
        raise DivergenceError("non-finite slope in the previous row", row=-1)
    return viscosity_factor(nu_visc, rho) * signs


def march_step(X, Y, config, ops, qr, n, signs):
    """One differentiate / soften / mollify step from row ``(X, Y)``.

    With ``config.center_rows`` the row mean is removed before applying
    ``D``, which makes the step commute with translations.
    """
    if config.center_rows:
        A = ops.differentiator @ (X - X.mean())
        B = ops.differentiator @ (Y - Y.mean())
    else:
        A = ops.differentiator @ X
        B = ops.differentiator @ Y
    f = viscous_speeds(X, Y, A, B, n, config.nu_visc, signs)
    U = -B / f
    V = A / f
    rhs = np.stack([X + config.vstep * U, Y + config.vstep * V], axis=1)
    new = qr.apply(rhs)
    return new[:, 0], new[:, 1]


def _diameter(x, y):
    return math.hypot(np.ptp(x), np.ptp(y))


def solve(curve, n, config, profile=None, ops=None):
    """March the hodograph system from a travel-time parameterised caustic.

    Returns a grid with ``config.N`` rows, or fewer if the march diverged
    (non-finite values or a row wider than ``1e3`` times the caustic); in
    that case ``grid.divergence`` holds the reason.
    """
    M, N = config.M, config.N
    X1, Y1 = init_first_row(curve, M)
    u_nodes = curve.params.copy()
    a, b = float(u_nodes[0]), float(u_nodes[-1])
    ustep = (b - a) / (M - 1)
    if not np.allclose(np.diff(u_nodes), ustep, rtol=1e-6, atol=1e-12):
        raise ValueError("the initial curve must be sampled at equal travel-time steps")
    if profile is None:
        profile = curvature_profile(curve, n)
    v_nodes = np.arange(N) * config.vstep
    x = np.full((M, N), np.nan)
    y = np.full((M, N), np.nan)
    x[:, 0], y[:, 0] = X1, Y1
    grid = HodographGrid(u_nodes, v_nodes, x, y, rows_completed=1)
    if N == 1:
        return grid
    x[:, 1], y[:, 1] = init_second_row(curve, profile, config.vstep)
    grid.rows_completed = 2
    if N == 2:
        return grid

    if ops is None:
        ops = build_operators(NodeSet(a, b, M), config.lam, config.resolve_mu(a, b))
    qr = build_quasi_reversibility(M, ustep, config.xi, config.vstep)
    signs = profile.signs
    limit = DIVERGENCE_GROWTH * _diameter(X1, Y1)
    for k in range(2, N):
        try:
            X, Y = march_step(x[:, k - 1], y[:, k - 1], config, ops, qr, n, signs)
        except DivergenceError as exc:
            grid.divergence = f"row {k + 1}: {exc}"
            break
        except FloatingPointError as exc:
            grid.divergence = f"row {k + 1}: floating point error ({exc})"
            break
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            grid.divergence = f"row {k + 1}: non-finite values"
            break
        if _diameter(X, Y) > limit:
            grid.divergence = f"row {k + 1}: row diameter exceeds {DIVERGENCE_GROWTH:g} x caustic"
            break
        x[:, k], y[:, k] = X, Y
        grid.rows_completed = k + 1
    return grid


@dataclass(frozen=True, eq=False)
class ContinuationField:
    """Flat records ``(x, y, u, v)``; ``v = Im w`` is 0 on the caustic."""

    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def __len__(self):
        return self.x.size

    def as_array(self):
        return np.column_stack([self.x, self.y, self.u, self.v])


def to_continuation_field(grid):
    k = grid.rows_completed
    uu, vv = np.meshgrid(grid.u_nodes, grid.v_nodes[:k], indexing="ij")
    # row-major in v: all of row 1, then row 2, ...
    order = lambda a: a[:, :k].T.ravel()
    return ContinuationField(order(grid.x), order(grid.y), order(uu), order(vv))


@dataclass(frozen=True, eq=False)
class ResidualReport:
    """First-form residuals on interior mesh points, one entry per interior row."""

    v: np.ndarray
    first_form: np.ndarray  # max |1/E - 1/G - 1|
    orthogonality: np.ndarray  # max |F|
    jacobian_sign: np.ndarray  # sgn(x_u y_v - x_v y_u), shape (M-2, rows-2)
    first_form_field: np.ndarray
    orthogonality_field: np.ndarray

    @property
    def max_first_form(self):
        return float(np.max(self.first_form)) if self.first_form.size else 0.0

    @property
    def max_orthogonality(self):
        return float(np.max(self.orthogonality)) if self.orthogonality.size else 0.0


def residual_diagnostics(grid, n):
    """Check ``1/E - 1/G = 1`` and ``F = 0`` with central differences."""
    k = grid.rows_completed
    if k < 3:
        raise ValueError("residual diagnostics need at least 3 completed rows")
    x, y = grid.x[:, :k], grid.y[:, :k]
    du = np.diff(grid.u_nodes).mean()
    dv = np.diff(grid.v_nodes).mean()
    xu = (x[2:, 1:-1] - x[:-2, 1:-1]) / (2 * du)
    yu = (y[2:, 1:-1] - y[:-2, 1:-1]) / (2 * du)
    xv = (x[1:-1, 2:] - x[1:-1, :-2]) / (2 * dv)
    yv = (y[1:-1, 2:] - y[1:-1, :-2]) / (2 * dv)
    n2 = n.value(x[1:-1, 1:-1], y[1:-1, 1:-1]) ** 2
    E = n2 * (xu**2 + yu**2)
    F = n2 * (xu * xv + yu * yv)
    G = n2 * (xv**2 + yv**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        first = np.abs(1.0 / E - 1.0 / G - 1.0)
    orth = np.abs(F)
    return ResidualReport(
        v=grid.v_nodes[1 : k - 1],
        first_form=np.max(first, axis=0),
        orthogonality=np.max(orth, axis=0),
        jacobian_sign=np.sign(xu * yv - xv * yu),
        first_form_field=first,
        orthogonality_field=orth,
    )
