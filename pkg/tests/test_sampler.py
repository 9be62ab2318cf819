import numpy as np
import pytest
from scipy.special import erf, erfc

from homotomo.errors import EstimationError, InvalidArgumentError, WindowTooSmallError
from homotomo.fock import StateDescriptor, make_state
from homotomo.grids import Grid1D
from homotomo.library import library_state
from homotomo.povm import box_probability
from homotomo.sampler import CHUNK, THREADS_ENV, draw_samples, empirical_box_frequency, empirical_mean

N_SAMPLES = 100_000


@pytest.fixture(scope="module")
def vac():
    return make_state(StateDescriptor("fock", 8, n=0))


@pytest.fixture(scope="module")
def vac_samples(vac):
    return draw_samples(vac, N_SAMPLES, seed=42)


def test_vacuum_mean(vac_samples):
    assert abs(vac_samples.x.mean()) <= 4 * (1 / np.sqrt(2)) / np.sqrt(N_SAMPLES)


def test_second_moment(vac_samples):
    mean, se = empirical_mean(lambda t, x: x**2, vac_samples)
    assert abs(mean - 0.5) <= 4 * se


def test_theta_range(vac_samples):
    assert vac_samples.theta.min() >= 0 and vac_samples.theta.max() < 2 * np.pi
    assert len(vac_samples) == N_SAMPLES


def test_determinism(vac, vac_samples):
    again = draw_samples(vac, N_SAMPLES, seed=42)
    assert again == vac_samples
    assert draw_samples(vac, 1000, seed=43) != draw_samples(vac, 1000, seed=42)


def test_prefix_stable(vac):
    long = draw_samples(vac, CHUNK + 500, seed=7)
    short = draw_samples(vac, 500, seed=7)
    assert np.array_equal(long.x[:500], short.x)


@pytest.mark.parametrize("threads", ["2", "5"])
def test_thread_count_independent(vac, monkeypatch, threads):
    n = 3 * CHUNK + 17
    monkeypatch.setenv(THREADS_ENV, "1")
    serial = draw_samples(vac, n, seed=9)
    monkeypatch.setenv(THREADS_ENV, threads)
    assert draw_samples(vac, n, seed=9) == serial


@pytest.mark.parametrize("n", [1000, 10_000, 100_000])
def test_vacuum_tail_frequency(vac, n):
    s = draw_samples(vac, n, seed=n)
    p = erfc(1)
    frac = float((np.abs(s.x) > 1).mean())
    assert abs(frac - p) <= 4 * np.sqrt(p * (1 - p) / n)


def test_theta_marginal_uniform(vac_samples):
    counts = np.bincount((vac_samples.theta / (2 * np.pi / 8)).astype(int), minlength=8)
    p = 1 / 8
    sigma = np.sqrt(N_SAMPLES * p * (1 - p))
    assert np.abs(counts - N_SAMPLES * p).max() <= 4 * sigma


class TestEmpiricalMean:
    def test_constant(self, vac_samples):
        assert empirical_mean(lambda t, x: 1.0, vac_samples) == (1.0, 0.0)

    def test_non_finite(self, vac_samples):
        with pytest.raises(EstimationError):
            empirical_mean(lambda t, x: np.where(x > 0, np.inf, 0.0), vac_samples)

    def test_indicator_matches_box_probability(self):
        rho = library_state("cat2")
        s = draw_samples(rho, N_SAMPLES, seed=3)
        Z, A = (0.5, 2.0), (-0.5, 1.5)
        ind = lambda t, x: ((t >= Z[0]) & (t <= Z[1]) & (x >= A[0]) & (x <= A[1])).astype(float)  # noqa: E731
        mean, se = empirical_mean(ind, s)
        assert abs(mean - box_probability(rho, Z, A)) <= 4 * se


class TestBoxFrequency:
    def test_whole_space(self, vac_samples):
        assert empirical_box_frequency(vac_samples, (0, 2 * np.pi), (-np.inf, np.inf)) == 1.0

    def test_half_phase(self, vac_samples):
        f = empirical_box_frequency(vac_samples, (0, np.pi), (-np.inf, np.inf))
        assert abs(f - 0.5) <= 4 * np.sqrt(0.25 / N_SAMPLES)

    def test_vacuum_erf(self, vac_samples):
        p = erf(1)
        f = empirical_box_frequency(vac_samples, (0, 2 * np.pi), (-1, 1))
        assert abs(f - p) <= 4 * np.sqrt(p * (1 - p) / N_SAMPLES)

    @pytest.mark.parametrize("n", [1000, 10_000, 100_000])
    def test_consistency(self, n):
        rho = library_state("coherent1+1j")
        Z, A = (1.0, 3.0), (0.0, 2.0)
        p = box_probability(rho, Z, A)
        f = empirical_box_frequency(draw_samples(rho, n, seed=11), Z, A)
        assert abs(f - p) <= 4 * np.sqrt(p * (1 - p) / n)

    def test_bad_interval(self, vac_samples):
        with pytest.raises(InvalidArgumentError):
            empirical_box_frequency(vac_samples, (1, 0), (0, 1))


class TestErrors:
    def test_window_too_small(self, vac):
        with pytest.raises(WindowTooSmallError):
            draw_samples(vac, 10, seed=1, r_grid=Grid1D.symmetric(3.0, 128))

    @pytest.mark.parametrize("n", [0, -3, 2.5])
    def test_bad_count(self, vac, n):
        with pytest.raises(InvalidArgumentError):
            draw_samples(vac, n, seed=1)

    def test_bad_seed(self, vac):
        with pytest.raises(InvalidArgumentError):
            draw_samples(vac, 10, seed=-1)
