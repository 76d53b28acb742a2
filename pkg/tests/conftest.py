import numpy as np
import pytest
from scipy.stats import special_ortho_group

from mcf import models

BASE_SIGMA = np.diag([1.2, 0.5143])
SN_ALPHA = np.array([4.365, -1.455])
GAMMA_ALPHA0 = 2.0
GAMMA_ALPHAS = np.array([0.5, 4.0])

_ACCEPTANCE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = {}


class Recorder:
    def __init__(self, store):
        self._store = store

    def __call__(self, name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        self._store[name] = line
        print(line)
        return ok


@pytest.fixture
def acceptance(request):
    return Recorder(request.config.stash[_ACCEPTANCE_KEY])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(lines):
        terminalreporter.write_line(lines[name])


@pytest.fixture(scope="session")
def gaussian_params():
    return models.GaussianParams(BASE_SIGMA)


@pytest.fixture(scope="session")
def sn_params():
    return models.SkewNormalParams(BASE_SIGMA, SN_ALPHA)


@pytest.fixture(scope="session")
def gamma_params():
    return models.GammaParams(GAMMA_ALPHA0, GAMMA_ALPHAS)


@pytest.fixture(scope="session")
def gaussian_sample(gaussian_params):
    return models.sample_gaussian(gaussian_params, 50_000, seed=0)


@pytest.fixture(scope="session")
def sn_sample(sn_params):
    return models.sample_skew_normal(sn_params, 100_000, seed=0)


@pytest.fixture(scope="session")
def gamma_sample(gamma_params):
    return models.sample_gamma(gamma_params, 100_000, seed=0)


def random_rotation(d, seed):
    if d == 1:
        return np.array([[1.0]])
    return special_ortho_group.rvs(d, random_state=seed)


def circle(step_deg=1.0):
    ang = np.radians(np.arange(0.0, 360.0, step_deg))
    return ang, np.column_stack([np.cos(ang), np.sin(ang)])


def grid_local_maxima(values):
    """Indices of strict local maxima of a periodic sequence."""
    v = np.asarray(values)
    return np.flatnonzero((v > np.roll(v, 1)) & (v > np.roll(v, -1)))
