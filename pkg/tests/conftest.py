import time
import warnings

import numpy as np
import pytest

from lqshrink import fredholm
from lqshrink.cli import compare_run
from lqshrink.frames import Frame

COMPARE_ALPHAS = np.logspace(-6, -2, 13)
COMPARE_BETAS = np.logspace(-6, -1, 13)


def mercedes_benz() -> Frame:
    """Three unit vectors at 120 degrees in the plane; frame operator 1.5*I."""
    return Frame(
        np.array(
            [[0.0, -np.sqrt(3) / 2, np.sqrt(3) / 2], [1.0, -0.5, -0.5]]
        )
    )


@pytest.fixture(scope="session")
def benchmark_problem():
    return fredholm.default_benchmark()


@pytest.fixture(scope="session")
def benchmark_data(benchmark_problem):
    return fredholm.observe(benchmark_problem)


@pytest.fixture(scope="session")
def compare_results(benchmark_problem, tmp_path_factory):
    """The headline experiment, run once and shared (criteria 9-10)."""
    outdir = tmp_path_factory.mktemp("compare")
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        summary = compare_run(
            benchmark_problem,
            q=0.3,
            alphas=COMPARE_ALPHAS,
            betas=COMPARE_BETAS,
            outdir=outdir,
        )
    return summary, outdir, time.perf_counter() - t0
