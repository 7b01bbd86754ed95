import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eikonal_shadow.continuation import (
    ContinuationConfig,
    ContinuationConfigError,
    OutOfStripWarning,
    continue_samples,
    dirichlet_kernel,
    dirichlet_representation,
    discrete_fourier,
    evaluate_continuation,
    in_strip,
    inequality_report,
    inverse_fourier,
    strip_energy,
    strip_weights,
)


def config(N=31, lam=1e-3, L=0.5, a=0.0, b=1.0):
    return ContinuationConfig(a, b, N, lam, L)


# --- configuration


@pytest.mark.parametrize("kw", [dict(N=30), dict(N=1), dict(lam=0.0), dict(L=-1.0), dict(b=0.0)])
def test_config_errors(kw):
    with pytest.raises(ContinuationConfigError):
        config(**kw)


def test_even_count_message():
    with pytest.raises(ContinuationConfigError, match="drop one sample"):
        config(N=32)


def test_geometry_of_nodes():
    cfg = config(N=11, a=2.0, b=3.0)
    assert cfg.spacing == pytest.approx(0.1)
    assert cfg.period == pytest.approx(1.1)
    assert np.allclose(cfg.nodes, np.linspace(2, 3, 11))
    assert list(cfg.wavenumbers) == list(range(-5, 6))


def test_strip_weights():
    cfg = config(N=7, L=0.3)
    c = strip_weights(cfg)
    assert c[3] == 1.0
    assert np.array_equal(c, c[::-1])
    arg = 4 * math.pi * 2 * 0.3 / cfg.period
    assert c[5] == pytest.approx(math.sinh(arg) / arg, rel=1e-14)
    assert np.all(np.diff(c[3:]) > 0)


# --- discrete Fourier transform


def test_constant_transform():
    cfg = config(N=9, a=0.37, b=1.9)
    d = discrete_fourier(np.full(9, 2.5), cfg)
    assert d[4] == pytest.approx(9 * 2.5, abs=1e-12)
    assert np.max(np.abs(np.delete(d, 4))) < 1e-12


def test_parseval_and_inversion():
    rng = np.random.default_rng(0)
    cfg = config(N=31, a=-0.4, b=2.1)
    for _ in range(20):
        h = rng.normal(size=31) + 1j * rng.normal(size=31)
        d = discrete_fourier(h, cfg)
        assert np.sum(np.abs(d) ** 2) / 31 == pytest.approx(np.sum(np.abs(h) ** 2), rel=1e-12)
        assert np.max(np.abs(inverse_fourier(d, cfg) - h)) < 1e-12


def test_wrong_length():
    with pytest.raises(ContinuationConfigError):
        discrete_fourier(np.zeros(5), config(N=7))


# --- continuation


def test_constant_samples():
    cfg = config(lam=0.3)
    c = continue_samples(np.full(31, 2.0), cfg)
    for x, y in [(0.1, 0.0), (0.5, 0.4), (0.9, -0.3)]:
        assert evaluate_continuation(c, x, y) == pytest.approx(2.0 / 1.3, abs=1e-12)


def test_single_harmonic():
    cfg = config(N=15, lam=0.05, L=0.2, a=0.2, b=1.5)
    T = cfg.period
    c = continue_samples(np.cos(2 * math.pi * cfg.nodes / T), cfg)
    damp = 1 / (1 + cfg.lam * strip_weights(cfg)[cfg.n + 1])
    for x, y in [(0.3, 0.0), (0.77, 0.15), (1.2, -0.1)]:
        expected = damp * np.cos(2 * math.pi * (x + 1j * y) / T)
        assert evaluate_continuation(c, x, y) == pytest.approx(expected, abs=1e-12)


def test_interpolation_limit():
    # a narrow strip keeps lam C_n small, so tiny lam recovers the samples
    cfg = config(lam=1e-12, L=0.05)
    h = np.random.default_rng(1).normal(size=31)
    c = continue_samples(h, cfg)
    assert np.max(np.abs(c(cfg.nodes) - h)) < 1e-8


def test_realness_on_axis():
    cfg = config()
    c = continue_samples(np.random.default_rng(2).normal(size=31), cfg)
    x = np.linspace(-1, 2, 301)
    assert np.max(np.abs(c(x).imag)) < 1e-10


def test_periodicity():
    cfg = config()
    c = continue_samples(np.random.default_rng(3).normal(size=31), cfg)
    assert c(0.23, 0.1) == pytest.approx(c(0.23 + cfg.period, 0.1), abs=1e-12)


@given(st.floats(-5, 5), st.floats(-5, 5), st.integers(0, 2**31))
@settings(max_examples=30, deadline=None)
def test_linearity(alpha, beta, seed):
    rng = np.random.default_rng(seed)
    cfg = config(N=15)
    f, g = rng.normal(size=15), rng.normal(size=15)
    lhs = continue_samples(alpha * f + beta * g, cfg).coeffs
    rhs = alpha * continue_samples(f, cfg).coeffs + beta * continue_samples(g, cfg).coeffs
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_growth_bound():
    cfg = config(L=0.5)
    c = continue_samples(np.random.default_rng(4).normal(size=31), cfg)
    bound = np.max(np.abs(c.coeffs)) * np.sum(np.exp(2 * math.pi * np.abs(cfg.wavenumbers) * cfg.L / cfg.period))
    x = np.linspace(0, 1, 101)
    assert np.max(np.abs(c(x, cfg.L))) <= bound


def test_larger_lam_shrinks_coefficients():
    h = np.random.default_rng(5).normal(size=31)
    norms = [np.sum(np.abs(continue_samples(h, config(lam=lam)).coeffs) ** 2) for lam in (1e-6, 1e-3, 0.1, 1, 10)]
    assert np.all(np.diff(norms) <= 0)


def test_out_of_strip_warning():
    cfg = config(L=0.2)
    c = continue_samples(np.ones(31), cfg)
    with pytest.warns(OutOfStripWarning):
        c(0.5, 0.3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        c(0.5, 0.2)
    assert list(in_strip(c, [0.1, -0.25])) == [True, False]


def test_nonfinite_samples():
    h = np.ones(31)
    h[3] = np.nan
    with pytest.raises(ValueError):
        continue_samples(h, config())


# --- inequalities


@pytest.mark.parametrize("lam", [1e-1, 1e-3])
@pytest.mark.parametrize("L", [0.5, 2.0])
def test_inequalities_on_random_samples(lam, L):
    rng = np.random.default_rng(int(1000 * L + 1 / lam))
    cfg = config(N=31, lam=lam, L=L)
    for _ in range(50):
        h = rng.normal(size=31)
        rep = inequality_report(continue_samples(h, cfg), h)
        assert rep.discrepancy_ok and rep.strip_energy_ok


def test_strip_energy_matches_quadrature():
    cfg = config(N=15, lam=0.01, L=0.3)
    c = continue_samples(np.random.default_rng(6).normal(size=15), cfg)
    # trapezoid is spectrally exact over a full period; Gauss-Legendre in y
    xs = cfg.a + np.arange(64) * cfg.period / 64
    gy, gw = np.polynomial.legendre.leggauss(40)
    ys = gy * cfg.L
    vals = np.abs(c(xs[:, None], ys[None, :])) ** 2
    quad = np.sum(vals * gw[None, :] * cfg.L) * cfg.period / 64 / (2 * cfg.L)
    assert strip_energy(c) == pytest.approx(quad, rel=1e-10)


# --- Dirichlet kernel


def test_dirichlet_kernel_values():
    assert dirichlet_kernel(7, 0.0) == 1.0
    for j in (1, 2, 5):
        assert abs(dirichlet_kernel(7, 2 * math.pi * j / 7)) < 1e-14
    z = 0.3 + 0.1j
    assert dirichlet_kernel(7, z) == pytest.approx(np.sin(7 * z / 2) / (7 * np.sin(z / 2)), abs=1e-15)
    assert dirichlet_kernel(7, 4 * math.pi) == 1.0
    with pytest.raises(ContinuationConfigError):
        dirichlet_kernel(6, 0.1)


@pytest.mark.parametrize("y", [0.0, 0.05, 0.1])
def test_dirichlet_representation(y):
    cfg = config(N=31, lam=1e-2, L=0.5)
    c = continue_samples(np.random.default_rng(8).normal(size=31), cfg)
    x = np.linspace(0.03, 0.97, 13)
    direct = c(x, y)
    assert np.max(np.abs(dirichlet_representation(c, x, y) - direct)) < 1e-9
