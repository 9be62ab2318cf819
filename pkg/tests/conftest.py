import time

import numpy as np
import pytest

from homotomo.grids import Grid1D, Grid2D, ThetaGrid
from homotomo.library import LIBRARY, library_state
from homotomo.povm import sinogram
from homotomo.radon import radon_transform, reconstruct_wigner
from homotomo.wigner import wigner

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def rgrid():
    return Grid1D.symmetric()


@pytest.fixture(scope="session")
def tgrid():
    return ThetaGrid()


@pytest.fixture(scope="session")
def pgrid():
    return Grid2D.square()


class _Cache:
    """Per-session memo of the expensive per-state products."""

    def __init__(self):
        self._d = {}
        self.seconds = {}

    def get(self, key, make):
        if key not in self._d:
            t0 = time.perf_counter()
            self._d[key] = make()
            self.seconds[key] = time.perf_counter() - t0
        return self._d[key]

    def sinogram(self, name):
        return self.get(("sino", name), lambda: sinogram(library_state(name), ThetaGrid(), Grid1D.symmetric()))

    def wigner(self, name):
        return self.get(("wig", name), lambda: wigner(library_state(name), Grid2D.square()))

    def reconstruction(self, name):
        # the sinogram is built first so its time is not counted twice
        sino = self.sinogram(name)
        return self.get(("rec", name), lambda: reconstruct_wigner(sino, Grid2D.square()))

    def radon(self, name):
        sino, W = self.sinogram(name), self.wigner(name)
        return self.get(("radon", name), lambda: radon_transform(W, sino.theta_grid, sino.r_grid))

    def elapsed(self, name, *kinds):
        return sum(self.seconds.get((k, name), 0.0) for k in kinds)


@pytest.fixture(scope="session")
def cache():
    return _Cache()


@pytest.fixture(scope="session")
def library_names():
    return list(LIBRARY)


def random_state(rng, N, rank=None):
    """Random density matrix of the given rank (full rank by default)."""
    rank = rank or N + 1
    G = rng.normal(size=(N + 1, rank)) + 1j * rng.normal(size=(N + 1, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real
