import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import erf, erfc

from homotomo.errors import InvalidArgumentError, WindowTooSmallError
from homotomo.fock import StateDescriptor, make_state
from homotomo.grids import Grid1D, ThetaGrid
from homotomo.library import LIBRARY, library_state
from homotomo.povm import (
    Sinogram,
    box_probability,
    completeness_singular_values,
    moment_profile,
    position_overlap_matrix,
    povm_element,
    povm_union,
    quadrature_density,
    sinogram,
    sinogram_map,
    tail_mass,
)

from conftest import random_state

TWO_PI = 2 * np.pi
X = Grid1D.symmetric()
GAUSS = np.exp(-X.points**2) / np.sqrt(np.pi)


def fock(n, N=None):
    return make_state(StateDescriptor("fock", n if N is None else N, n=n))


class TestQuadratureDensity:
    @pytest.mark.parametrize("theta", [0.0, 0.7, np.pi, 5.9])
    def test_vacuum(self, theta):
        assert np.abs(quadrature_density(fock(0, 8), theta, X) - GAUSS).max() <= 1e-12

    @pytest.mark.parametrize("theta", [0.0, 2.1])
    def test_fock1(self, theta):
        expected = 2 * X.points**2 * GAUSS
        assert np.abs(quadrature_density(fock(1, 8), theta, X) - expected).max() <= 1e-12

    def test_coherent_displaced_gaussian(self):
        rho = make_state(StateDescriptor.coherent(1.0, 24))
        expected = np.exp(-(X.points - np.sqrt(2)) ** 2) / np.sqrt(np.pi)
        assert np.abs(quadrature_density(rho, 0.0, X) - expected).max() <= 1e-9

    @pytest.mark.parametrize("theta", [0.3, 1.9, 4.0])
    def test_coherent_mean_follows_phase(self, theta):
        a = 0.8 + 0.5j
        rho = make_state(StateDescriptor.coherent(a, 24))
        mean = np.sqrt(2) * (np.cos(theta) * a.real + np.sin(theta) * a.imag)
        expected = np.exp(-(X.points - mean) ** 2) / np.sqrt(np.pi)
        assert np.abs(quadrature_density(rho, theta, X) - expected).max() <= 1e-9


class TestSinogram:
    def test_vacuum_rows_identical(self):
        s = sinogram(fock(0, 16), ThetaGrid(), X)
        assert np.abs(s.values - GAUSS).max() <= 1e-12

    def test_fock0_vs_fock1_differ(self):
        th = ThetaGrid(8)
        d = np.abs(sinogram(fock(0, 1), th, X).values - sinogram(fock(1, 1), th, X).values).max()
        # max |exp(-x^2)(1 - 2x^2)| / sqrt(pi) = 1/sqrt(pi), approached at x -> 0
        assert d >= 0.2
        assert d == pytest.approx(1 / np.sqrt(np.pi), abs=1e-3)

    @pytest.mark.parametrize("name", list(LIBRARY))
    def test_pi_shift_parity(self, name):
        s = sinogram(library_state(name), ThetaGrid(), X).values
        T = s.shape[0]
        assert np.abs(s[T // 2:] - s[: T // 2, ::-1]).max() <= 1e-12

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), N=st.integers(0, 8))
    def test_random_states_nonnegative_and_normalized(self, seed, N):
        rho = random_state(np.random.default_rng(seed), N)
        s = sinogram(rho, ThetaGrid(36), X)
        assert s.values.min() >= -1e-12
        assert np.abs(s.row_integrals() - 1).max() <= 1e-8
        T = s.values.shape[0]
        assert np.abs(s.values[T // 2:] - s.values[: T // 2, ::-1]).max() <= 1e-12

    @settings(max_examples=20, deadline=None)
    @given(pops=st.lists(st.floats(0, 1), min_size=1, max_size=8).filter(lambda p: sum(p) > 0.1))
    def test_diagonal_states_phase_independent(self, pops):
        p = np.array(pops) / sum(pops)
        s = sinogram(np.diag(p), ThetaGrid(24), X).values
        assert np.abs(s - s[0]).max() <= 1e-12

    def test_shape_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            Sinogram(ThetaGrid(4), X, np.zeros((3, X.count)))


class TestOverlap:
    def test_full_line_identity(self):
        M = position_overlap_matrix(16, (-np.inf, np.inf))
        assert np.abs(M - np.eye(17)).max() <= 1e-10

    def test_half_line(self):
        M = position_overlap_matrix(1, (0, np.inf))
        assert M[0, 0].real == pytest.approx(0.5, abs=1e-14)
        # int_0^inf sqrt(2) x e^{-x^2} / sqrt(pi) dx
        assert M[0, 1].real == pytest.approx(1 / np.sqrt(2 * np.pi), abs=1e-14)
        assert M[0, 1].real == pytest.approx(0.39894, abs=1e-5)

    def test_against_mpmath(self):
        def psi(n, x):
            return mpmath.hermite(n, x) * mpmath.exp(-x * x / 2) / mpmath.sqrt(
                2**n * mpmath.factorial(n) * mpmath.sqrt(mpmath.pi)
            )

        M = position_overlap_matrix(5, (-0.3, 1.7))
        ref = float(mpmath.quad(lambda x: psi(2, x) * psi(5, x), [-0.3, 1.7]))
        assert M[2, 5].real == pytest.approx(ref, abs=1e-13)

    def test_bad_interval(self):
        with pytest.raises(InvalidArgumentError):
            position_overlap_matrix(3, (1, 0))


class TestPovmElement:
    def test_identity(self):
        E = povm_element((0, TWO_PI), (-np.inf, np.inf), 12).entries
        assert np.abs(E - np.eye(13)).max() <= 1e-12

    def test_half_phase_range(self):
        E = povm_element((0, np.pi), (-np.inf, np.inf), 8).entries
        assert np.abs(E - np.eye(9) / 2).max() <= 1e-12

    def test_half_line_is_diagonal(self):
        E = povm_element((0, TWO_PI), (0, np.inf), 8).entries
        assert np.abs(E - np.diag(np.diag(E))).max() <= 1e-14
        # psi_n^2 is even, so every diagonal entry is 1/2
        np.testing.assert_allclose(np.diag(E).real, 0.5, atol=1e-12)

    def test_empty_sets_give_zero(self):
        assert not povm_element((1.0, 1.0), (-1, 1), 4).entries.any()
        assert not povm_element((0, 1.0), (2, 2), 4).entries.any()

    def test_phase_interval_outside_range(self):
        with pytest.raises(InvalidArgumentError):
            povm_element((-1, 1), (0, 1), 3)

    @settings(max_examples=30, deadline=None)
    @given(
        z=st.tuples(st.floats(0, TWO_PI), st.floats(0, TWO_PI)).map(sorted),
        a=st.tuples(st.floats(-6, 6), st.floats(-6, 6)).map(sorted),
    )
    def test_between_zero_and_identity(self, z, a):
        E = povm_element(z, a, 10)
        ev = E.eigenvalues()
        assert np.abs(E.entries - E.entries.conj().T).max() <= 1e-12
        assert ev.min() >= -1e-10 and ev.max() <= 1 + 1e-10

    def test_union_additivity(self):
        left = povm_element((0, 2.0), (-1, 0.5), 6).entries
        right = povm_element((0, 2.0), (0.5, 3), 6).entries
        both = povm_union([((0, 2.0), (-1, 0.5)), ((0, 2.0), (0.5, 3))], 6).entries
        whole = povm_element((0, 2.0), (-1, 3), 6).entries
        assert np.abs(both - left - right).max() <= 1e-15
        assert np.abs(both - whole).max() <= 1e-12


class TestBoxProbability:
    def test_full_space(self):
        assert box_probability(library_state("cat2"), (0, TWO_PI), (-np.inf, np.inf)) == pytest.approx(1, abs=1e-12)

    def test_vacuum_erf(self):
        assert abs(box_probability(fock(0, 6), (0, TWO_PI), (-1, 1)) - erf(1)) <= 1e-8
        assert erf(1) == pytest.approx(0.842701, abs=1e-6)

    @pytest.mark.parametrize("name", ["cat2", "coherent1+1j", "thermal1"])
    def test_complement_additivity(self, name):
        rho = library_state(name)
        Z = (0.4, 2.9)
        total = sum(box_probability(rho, Z, A) for A in [(-np.inf, -0.3), (-0.3, 1.1), (1.1, np.inf)])
        assert abs(total - (Z[1] - Z[0]) / TWO_PI) <= 1e-10


class TestTailMass:
    def test_vacuum(self):
        assert abs(tail_mass(fock(0, 4), 1.0) - erfc(1)) <= 1e-8
        assert erfc(1) == pytest.approx(0.157299, abs=1e-6)
        assert tail_mass(fock(0, 4), 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_vacuum_far_tail_positive_and_accurate(self):
        assert tail_mass(fock(0, 4), 6.0) == pytest.approx(erfc(6.0), rel=1e-8)

    def test_only_diagonal_matters(self):
        rho = library_state("coherent1+1j").entries
        assert tail_mass(rho, 1.5) == pytest.approx(tail_mass(np.diag(np.diag(rho)), 1.5), abs=1e-15)

    def test_fock3_against_mpmath(self):
        def integrand(x):
            return mpmath.hermite(3, x) ** 2 * mpmath.exp(-x * x) / (8 * 6 * mpmath.sqrt(mpmath.pi))

        ref = 2 * float(mpmath.quad(integrand, [2, mpmath.inf]))
        assert tail_mass(fock(3), 2.0) == pytest.approx(ref, rel=1e-10)

    @pytest.mark.parametrize("R", range(1, 7))
    def test_cat_positive(self, R):
        assert tail_mass(library_state("cat2"), R) > 0

    def test_negative_radius(self):
        with pytest.raises(InvalidArgumentError):
            tail_mass(fock(0), -1)


class TestMoments:
    th = ThetaGrid(90)

    def test_coherent_first_moment(self):
        fit = moment_profile(sinogram(library_state("coherent1"), self.th, X), 1)
        np.testing.assert_allclose(fit.coefficients, [np.sqrt(2), 0], atol=1e-9)
        assert fit.residual <= 1e-6

    def test_vacuum_first_moment(self):
        fit = moment_profile(sinogram(fock(0), self.th, X), 1)
        assert fit.residual <= 1e-10
        assert np.abs(fit.coefficients).max() <= 1e-10

    def test_fock1_second_moment(self):
        fit = moment_profile(sinogram(fock(1), self.th, X), 2)
        np.testing.assert_allclose(fit.coefficients, [1.5, 0, 1.5], atol=1e-8)
        assert fit.residual <= 1e-8

    def test_window_too_small(self):
        s = sinogram(fock(0), self.th, Grid1D.symmetric(3.0, 101))
        with pytest.raises(WindowTooSmallError):
            moment_profile(s, 1)

    def test_order_restricted(self):
        with pytest.raises(InvalidArgumentError):
            moment_profile(sinogram(fock(0), self.th, X), 3)


class TestCompleteness:
    def test_single_mode(self):
        sv = completeness_singular_values(0, ThetaGrid(8), Grid1D.symmetric(8.0, 256))
        assert sv.shape == (1,)
        # || psi_0^2 ||_{L2} = (int e^{-2x^2} / pi dx)^(1/2) = (2 pi)^(-1/4)
        assert sv[0] == pytest.approx((2 * np.pi) ** -0.25, abs=1e-12)

    def test_trunc2_injective(self):
        sv = completeness_singular_values(2, ThetaGrid(64), Grid1D.symmetric(8.0, 256))
        assert sv.size == 9
        assert sv.min() > 1e-6

    def test_duplicated_rows_keep_rank(self):
        r = Grid1D.symmetric(8.0, 128)
        th = ThetaGrid(16).points
        A = sinogram_map(2, th, r)
        B = sinogram_map(2, np.concatenate([th, th[:5]]), r)
        assert np.linalg.matrix_rank(A) == np.linalg.matrix_rank(B) == 9

    def test_map_reproduces_sinogram(self):
        rng = np.random.default_rng(0)
        rho = random_state(rng, 2)
        basis_coords = []
        d = 3
        for n in range(d):
            basis_coords.append(rho[n, n].real)
        for m in range(d):
            for n in range(m + 1, d):
                basis_coords += [np.sqrt(2) * rho[m, n].real, -np.sqrt(2) * rho[m, n].imag]
        r = Grid1D.symmetric(8.0, 64)
        th = ThetaGrid(6)
        A = sinogram_map(2, th.points, r, np.ones(6))
        direct = sinogram(rho, th, r).values * np.sqrt(r.weights)
        np.testing.assert_allclose(A @ np.array(basis_coords), direct.ravel(), atol=1e-13)

    def test_underdetermined(self):
        with pytest.raises(InvalidArgumentError):
            completeness_singular_values(3, ThetaGrid(2), Grid1D(-1, 1, 4))
