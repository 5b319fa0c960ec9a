import numpy as np
import pytest

from gevrey_nse import GridSpec, field_from_modes, random_solenoidal_field


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def make_random_field(grid, seed, reality=True, decay_rate=0.3):
    rng = np.random.default_rng(seed)
    return random_solenoidal_field(
        grid, rng, decay=lambda r: np.exp(-decay_rate * r), reality=reality)


def make_sparse_force(grid, seed, n_modes=5, kmax=None):
    """Real solenoidal force supported on n_modes random +/-k pairs."""
    rng = np.random.default_rng(seed)
    kmax = kmax if kmax is not None else grid.K
    modes = {}
    while len(modes) < n_modes:
        k = (int(rng.integers(-kmax, kmax + 1)),
             int(rng.integers(-kmax, kmax + 1)))
        if k == (0, 0) or k in modes or (-k[0], -k[1]) in modes:
            continue
        perp = np.array([-k[1], k[0]], float)
        perp /= np.linalg.norm(perp)
        modes[k] = tuple(perp * rng.uniform(0.2, 1.0))
    return field_from_modes(grid, modes)
