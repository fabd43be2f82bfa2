import numpy as np
import pytest

from cnoidal.potentials import fpu_alpha
from cnoidal.solver import newton_solve

EPS_SWEEP = (0.4, 0.2, 0.1, 0.05)


@pytest.fixture(scope="session")
def fpu():
    return fpu_alpha(1.0, 1.0)


@pytest.fixture(scope="session")
def sweep_solutions(fpu):
    return {eps: newton_solve(eps, 0.6, fpu) for eps in EPS_SWEEP}


def loglog_slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])
