"""Closed-form special functions used by the smoother and the marching scheme.

``K`` is the decaying fundamental solution of ``d^8/dx^8 + 1``::

    pi K(x) = int_0^inf cos(x xi) / (1 + xi^8) d xi

and ``L`` is its autocorrelation. Everything here is evaluated from the
exponential-trigonometric closed form; the integral representation is only
used by the test-suite as an oracle.
"""

import math

import numpy as np

NU = math.pi / 8
_SIN_NU = math.sin(NU)
_COS_NU = math.cos(NU)

MAX_ORDER = 8


class KernelDomainError(ValueError):
    """Raised on non-finite arguments or unsupported derivative orders."""


def _check_finite(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise KernelDomainError("kernel arguments must be finite")
    return x


def _scalar_or_array(value, like):
    if np.ndim(like) == 0:
        return float(value)
    return value


def _closed_form(ax, n):
    """Bracketed term of the n-th derivative at |x| = ax (without the sign)."""
    return 0.25 * (
        np.exp(-ax * _COS_NU) * np.cos(ax * _SIN_NU - (n + 1) * NU)
        + np.exp(-ax * _SIN_NU) * np.sin(ax * _COS_NU + (n + 1) * NU - n * math.pi / 2)
    )


def kernel_value(x):
    """Evaluate ``K(x)``. Accepts scalars or arrays."""
    x = _check_finite(x)
    return _scalar_or_array(_closed_form(np.abs(x), 0), x)


def kernel_derivative(x, n):
    """Evaluate the ``n``-th derivative of ``K`` for ``n`` in 1..8.

    Away from the origin the closed form is exact. At ``x = 0`` the value is
    the two-sided limit for ``n <= 6``; the odd derivatives vanish there, and
    ``K^(7)(0)`` is set to 0, the mean of its one-sided limits ``+1/2`` (at
    ``0+``) and ``-1/2`` (at ``0-``).
    Order 8 is exposed only so that ``K^(8) + K = 0`` can be checked off
    the origin; its value at 0 is left as the (meaningless) closed form.
    """
    if not isinstance(n, (int, np.integer)) or n < 1 or n > MAX_ORDER:
        raise KernelDomainError(f"derivative order must be in 1..{MAX_ORDER}, got {n!r}")
    x = _check_finite(x)
    ax = np.abs(x)
    sign = (-np.sign(x)) ** n
    value = sign * _closed_form(ax, n)
    if n % 2 == 1:
        # sign(0) = 0 already zeroes the odd orders at the origin
        value = np.where(x == 0, 0.0, value)
    else:
        value = np.where(x == 0, _closed_form(0.0, n), value)
    return _scalar_or_array(value, x)


def autocorrelation_value(x):
    """``L(x) = 7/8 K(x) - x/8 K'(x)``, the autocorrelation of ``K``."""
    x = _check_finite(x)
    return _scalar_or_array(0.875 * kernel_value(x) - x / 8 * kernel_derivative(x, 1), x)


def autocorrelation_d14(x):
    """Fourteenth derivative of ``L``: ``7/8 K^(6)(x) + x/8 K^(7)(x)``.

    Continuous everywhere; at the origin the second term drops out.
    """
    x = _check_finite(x)
    return _scalar_or_array(
        0.875 * kernel_derivative(x, 6) + x / 8 * kernel_derivative(x, 7), x
    )


def viscosity_branch_point(nu_visc):
    """Value of ``rho`` where the two branches of ``P`` meet."""
    return 1.0 / math.sqrt(1.0 + math.sin(nu_visc) ** 2)


def viscosity_factor(nu_visc, rho):
    """Softened replacement ``P(nu, rho)`` for ``sqrt(1 - rho^2)``.

    Follows ``sqrt(1 - rho^2)`` up to ``rho* = (1 + sin^2 nu)^(-1/2)`` and
    ``sin nu / (rho + sqrt(rho^2 - cos^2 nu))`` beyond it, so the result is
    strictly positive and C^1 in ``rho``. ``rho`` may be an array.
    """
    if not (0 < nu_visc <= math.pi / 2) or not math.isfinite(nu_visc):
        raise KernelDomainError(f"artificial viscosity must lie in (0, pi/2], got {nu_visc!r}")
    rho_arr = np.asarray(rho, dtype=float)
    if not np.all(np.isfinite(rho_arr)) or np.any(rho_arr < 0):
        raise KernelDomainError("rho must be finite and non-negative")
    rho_star = viscosity_branch_point(nu_visc)
    s, c = math.sin(nu_visc), math.cos(nu_visc)
    inner = np.sqrt(np.clip(1.0 - rho_arr**2, 0.0, None))
    # the unused branch may divide by zero near rho = 0
    with np.errstate(divide="ignore", over="ignore"):
        outer = s / (rho_arr + np.sqrt(np.maximum(rho_arr**2 - c**2, 0.0)))
    value = np.where(rho_arr <= rho_star, inner, outer)
    return _scalar_or_array(value, rho_arr)
