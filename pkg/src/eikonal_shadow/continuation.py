"""Regularised analytic continuation of equally spaced samples into a strip.

Samples ``h_j`` at ``x_j = a + j dx`` (``j = 0..N-1``, ``N = 2n + 1``) are
fitted by a ``T``-periodic trigonometric polynomial ``H`` with ``T = N dx``.
The penalty is the mean of ``|H|^2`` over the strip ``|y| <= L``; mode ``k``
is damped by ``(1 + lam C_k)^-1`` with ``C_k = sinh(4 pi k L/T)/(4 pi k L/T)``.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np


class ContinuationConfigError(ValueError):
    pass


class OutOfStripWarning(UserWarning):
    """Evaluation at ``|y| > L``, where the penalty gives no control."""


@dataclass(frozen=True)
class ContinuationConfig:
    a: float
    b: float
    N: int
    lam: float
    L: float

    def __post_init__(self):
        if self.N < 3 or self.N % 2 == 0:
            raise ContinuationConfigError(
                f"N must be odd and at least 3, got {self.N}; drop one sample"
            )
        if not self.b > self.a:
            raise ContinuationConfigError(f"need b > a, got a={self.a}, b={self.b}")
        if not self.lam > 0:
            raise ContinuationConfigError("lam must be positive")
        if not self.L > 0:
            raise ContinuationConfigError("L must be positive")

    @property
    def n(self):
        return (self.N - 1) // 2

    @property
    def spacing(self):
        return (self.b - self.a) / (self.N - 1)

    @property
    def period(self):
        return self.N * self.spacing

    @property
    def nodes(self):
        return self.a + np.arange(self.N) * self.spacing

    @property
    def wavenumbers(self):
        return np.arange(-self.n, self.n + 1)


def strip_weights(config):
    """``C_k`` for ``k = -n..n``."""
    k = np.abs(config.wavenumbers).astype(float)
    arg = 4 * math.pi * k * config.L / config.period
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.sinh(arg) / arg
    return np.where(k == 0, 1.0, c)


@dataclass(frozen=True, eq=False)
class TrigContinuation:
    config: ContinuationConfig
    dft: np.ndarray
    coeffs: np.ndarray  # (1 + lam C_k)^-1 DFT_k / N, k = -n..n

    @property
    def period(self):
        return self.config.period

    def __call__(self, x, y=0.0):
        return evaluate_continuation(self, x, y)


def _phases(config, x):
    return np.exp(2j * math.pi * np.multiply.outer(x, config.wavenumbers) / config.period)


def discrete_fourier(h, config):
    """``DFT_k(h) = sum_j h_j exp(-2 pi i k x_j / T)`` for ``k = -n..n``.

    Direct summation with the node positions themselves (offset ``a``
    included), so the inverse is ``h_j = (1/N) sum_k DFT_k exp(2 pi i k x_j/T)``.
    """
    h = np.asarray(h)
    if h.shape != (config.N,):
        raise ContinuationConfigError(f"expected {config.N} samples, got shape {h.shape}")
    return np.conj(_phases(config, config.nodes)).T @ h


def inverse_fourier(dft, config):
    return _phases(config, config.nodes) @ np.asarray(dft) / config.N


def continue_samples(h, config):
    h = np.asarray(h, dtype=complex if np.iscomplexobj(h) else float)
    if not np.all(np.isfinite(h)):
        raise ValueError("samples must be finite")
    dft = discrete_fourier(h, config)
    coeffs = dft / (1.0 + config.lam * strip_weights(config)) / config.N
    return TrigContinuation(config, dft, coeffs)


def in_strip(c, y):
    return np.abs(np.asarray(y, dtype=float)) <= c.config.L


def evaluate_continuation(c, x, y=0.0):
    """``H(x + i y)``; warns with ``OutOfStripWarning`` when ``|y| > L``."""
    x_arr = np.asarray(x, dtype=float)
    y_arr = np.asarray(y, dtype=float)
    if not np.all(in_strip(c, y_arr)):
        warnings.warn(
            f"evaluating outside the strip |y| <= {c.config.L}", OutOfStripWarning, stacklevel=2
        )
    z = x_arr + 1j * y_arr
    value = _phases(c.config, z) @ c.coeffs
    return complex(value) if value.ndim == 0 else value


def dirichlet_kernel(N, z):
    """``sin(N z/2) / (N sin(z/2))`` with the value 1 at multiples of ``2 pi`` (odd N)."""
    if N < 1 or N % 2 == 0:
        raise ContinuationConfigError(f"N must be odd, got {N}")
    z_arr = np.asarray(z, dtype=complex)
    den = N * np.sin(z_arr / 2)
    near = np.abs(den) < 1e-12
    with np.errstate(invalid="ignore", divide="ignore"):
        value = np.where(near, 1.0 + 0j, np.sin(N * z_arr / 2) / np.where(near, 1.0, den))
    return complex(value) if value.ndim == 0 else value


def dirichlet_representation(c, x, y=0.0):
    """``sum_j H(x_j, 0) D_N(2 pi (x - x_j + i y) / T)``."""
    cfg = c.config
    node_vals = evaluate_continuation(c, cfg.nodes, 0.0)
    z = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
    arg = 2 * math.pi * np.subtract.outer(z, cfg.nodes) / cfg.period
    value = dirichlet_kernel(cfg.N, arg) @ node_vals
    return complex(value) if value.ndim == 0 else value


@dataclass(frozen=True)
class InequalityReport:
    discrepancy: float
    discrepancy_bound: float
    strip_energy: float
    strip_energy_bound: float

    @property
    def discrepancy_ok(self):
        return self.discrepancy <= self.discrepancy_bound * (1 + 1e-12)

    @property
    def strip_energy_ok(self):
        return self.strip_energy <= self.strip_energy_bound * (1 + 1e-12)


def strip_energy(c):
    """``(1/2L) int int |H|^2`` over one period and ``|y| <= L``, in closed form."""
    return float(c.period * np.sum(np.abs(c.coeffs) ** 2 * strip_weights(c.config)))


def inequality_report(c, h):
    """Node discrepancy and strip energy against their a-priori bounds.

    The energy bound is ``dx/(4 lam) * sum |h_j|^2``; ``H`` is linear in
    ``h``, so the bound must carry the data norm.
    """
    cfg = c.config
    h = np.asarray(h)
    norm2 = float(np.sum(np.abs(h) ** 2))
    resid = evaluate_continuation(c, cfg.nodes, 0.0) - h
    c_n = strip_weights(cfg)[-1]
    return InequalityReport(
        discrepancy=float(np.sum(np.abs(resid) ** 2)),
        discrepancy_bound=(cfg.lam / (cfg.lam + 1.0 / c_n)) ** 2 * norm2,
        strip_energy=strip_energy(c),
        strip_energy_bound=cfg.spacing / (4.0 * cfg.lam) * norm2,
    )
