import numpy as np
import pytest

from flapex.flaps import FlapSpec, build_flapped_pair
from flapex.motion import alexander_motion, sample_motion
from flapex.simplex import regular_simplex


def random_isometry(rng, dim_in, dim_out):
    """Random orthogonal map E^dim_in -> E^dim_out plus a translation."""
    Q, R = np.linalg.qr(rng.normal(size=(dim_out, dim_out)))
    Q = Q * np.sign(np.diag(R))
    shift = rng.normal(size=dim_out)

    def apply(points):
        pts = np.atleast_2d(points)
        padded = np.zeros((pts.shape[0], dim_out))
        padded[:, :dim_in] = pts
        return padded @ Q.T + shift

    return apply


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


@pytest.fixture(scope="session")
def pair_d2():
    return build_flapped_pair(FlapSpec(regular_simplex(2), 0.5))


@pytest.fixture(scope="session")
def alex_sample_d2(pair_d2):
    return sample_motion(alexander_motion(pair_d2.p, pair_d2.q), 200)


# one status line per acceptance criterion, shown after the test run
CRITERIA: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[n])
