import pytest

from eikonal_shadow.geometry import ConstantIndex, curvature_profile, reparametrize_travel_time
from eikonal_shadow.marching import SolverConfig, solve
from eikonal_shadow.oracle import noisy_tschirnhausen_samples
from eikonal_shadow.smoothing import denoise_curve


@pytest.fixture(scope="session")
def reference_curve():
    """Seeded noisy cubic samples, denoised and reparameterised by travel time."""
    _, xs, ys = noisy_tschirnhausen_samples(31, -1.5, 2.2, 0.05, seed=0)
    n = ConstantIndex()
    return reparametrize_travel_time(denoise_curve(xs, ys, 0.005, 0.1260, output_count=101), n, 101)


@pytest.fixture(scope="session")
def reference_grid(reference_curve):
    n = ConstantIndex()
    return solve(reference_curve, n, SolverConfig(), profile=curvature_profile(reference_curve, n))
