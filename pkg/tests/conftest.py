from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"
MNIST_IDX = DATA / "mnist5k-images-idx3-ubyte.gz"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def mnist_file():
    from mhn_phase.mnist import load_idx_images

    return load_idx_images(MNIST_IDX)


def random_simplex(rng, n):
    return rng.dirichlet(np.ones(n))


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    results = getattr(test_acceptance, "RESULTS", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(results):
        ok, detail = results[cid]
        terminalreporter.write_line(f"criterion {cid:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
