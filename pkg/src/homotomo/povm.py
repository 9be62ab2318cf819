"""Quadrature outcome densities and the homodyne POVM on product sets.

A quadrature measurement at phase ``theta`` on ``rho`` has density
``p_theta(x) = sum_mn rho_mn exp(i theta (n - m)) psi_m(x) psi_n(x)``; the
joint measure on ``[0, 2pi) x R`` is ``p(theta, x) dtheta/2pi dx``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, WindowTooSmallError
from .fock import DensityMatrix, hermite_functions
from .grids import Grid1D, ThetaGrid

__all__ = [
    "Sinogram",
    "PovmElement",
    "MomentFit",
    "quadrature_density",
    "sinogram",
    "position_overlap_matrix",
    "povm_element",
    "povm_union",
    "box_probability",
    "tail_mass",
    "moment_profile",
    "completeness_singular_values",
    "sinogram_map",
    "support_half_width",
    "gauss_panels",
]

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class Sinogram:
    """Values on the ``(theta, r)`` product grid, shape ``(T, count_r)``."""

    theta_grid: ThetaGrid
    r_grid: Grid1D
    values: np.ndarray = field(repr=False)
    filtered: bool = False
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.theta_grid.count, self.r_grid.count):
            raise InvalidArgumentError(
                f"sinogram values {v.shape} do not match grids "
                f"({self.theta_grid.count}, {self.r_grid.count})"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("sinogram values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def row_integrals(self) -> np.ndarray:
        return self.r_grid.integrate(self.values)

    def total_integral(self) -> float:
        """Integral against ``dtheta/2pi dr``."""
        return float(self.theta_grid.weights @ self.row_integrals())

    def replace(self, values, **kw) -> Sinogram:
        return Sinogram(
            self.theta_grid, self.r_grid, values,
            filtered=kw.get("filtered", self.filtered), meta=kw.get("meta", dict(self.meta)),
        )


@dataclass(frozen=True)
class PovmElement:
    entries: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        e = self.entries
        return np.linalg.eigvalsh(0.5 * (e + e.conj().T))


@dataclass(frozen=True)
class MomentFit:
    """Least-squares fit of ``m_k(theta)`` by a homogeneous trig polynomial.

    ``coefficients`` multiply ``cos^(k-j) sin^j`` for ``j = 0..k``.
    """

    k: int
    coefficients: np.ndarray
    moments: np.ndarray = field(repr=False)
    residual: float


def _entries(rho) -> np.ndarray:
    return rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def _harmonics(m: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``c[k + N, i] = sum_{n - m = k} rho_mn psi_m(x_i) psi_n(x_i)``."""
    N = m.shape[0] - 1
    psi = hermite_functions(N, x)
    c = np.zeros((2 * N + 1, x.size), dtype=complex)
    for k in range(-N, N + 1):
        rows = np.arange(max(0, -k), min(N, N - k) + 1)
        cols = rows + k
        c[k + N] = np.einsum("j,ji->i", m[rows, cols], psi[rows] * psi[cols])
    return c


def _densities(m: np.ndarray, thetas: np.ndarray, x: np.ndarray) -> np.ndarray:
    N = m.shape[0] - 1
    c = _harmonics(m, x)
    phases = np.exp(1j * np.outer(thetas, np.arange(-N, N + 1)))
    return (phases @ c).real


def quadrature_density(rho, theta: float, x_grid: Grid1D) -> np.ndarray:
    """Density of the ``theta`` quadrature outcome on ``x_grid``."""
    m = _entries(rho)
    N = m.shape[0] - 1
    psi = hermite_functions(N, x_grid.points)
    n = np.arange(N + 1)
    rot = m * np.exp(1j * theta * (n[None, :] - n[:, None]))
    return np.einsum("mi,mn,ni->i", psi, rot, psi).real


def sinogram(rho, theta_grid: ThetaGrid, r_grid: Grid1D) -> Sinogram:
    """Tabulate ``p(theta_i, r_j)`` for every grid angle."""
    m = _entries(rho)
    values = _densities(m, theta_grid.points, r_grid.points)
    meta = {}
    if isinstance(rho, DensityMatrix):
        meta["state_hash"] = rho.digest()
    return Sinogram(theta_grid, r_grid, values, meta=meta)


def support_half_width(N: int, margin: float = 8.0) -> float:
    """Half-width beyond which every ``psi_n``, ``n <= N``, is negligible."""
    return float(np.sqrt(2 * N + 1) + margin)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def gauss_panels(a: float, b: float, panel: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on ``[a, b]``."""
    if not b > a:
        return np.empty(0), np.empty(0)
    k = max(1, int(np.ceil((b - a) / panel)))
    edges = np.linspace(a, b, k + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


def _clip_interval(A, N: int) -> tuple[float, float]:
    a, b = float(A[0]), float(A[1])
    if a > b:
        raise InvalidArgumentError(f"interval [{a}, {b}] has a > b")
    w = support_half_width(N)
    return max(a, -w), min(b, w)


def position_overlap_matrix(N: int, A) -> np.ndarray:
    """``M[m, n] = integral over A of psi_m psi_n``; ``A = (a, b)``, infinities allowed."""
    if int(N) != N or N < 0:
        raise InvalidArgumentError(f"N must be a nonnegative integer, got {N}")
    a, b = _clip_interval(A, N)
    x, w = gauss_panels(a, b)
    if x.size == 0:
        return np.zeros((N + 1, N + 1), dtype=complex)
    psi = hermite_functions(N, x)
    return ((psi * w) @ psi.T).astype(complex)


def _check_phase_interval(Z) -> tuple[float, float]:
    z0, z1 = float(Z[0]), float(Z[1])
    tol = 1e-12
    if z0 < -tol or z1 > TWO_PI + tol or z0 > z1:
        raise InvalidArgumentError(f"phase interval [{z0}, {z1}] is not inside [0, 2pi)")
    return max(z0, 0.0), min(z1, TWO_PI)


def _phase_average(Z, N: int) -> np.ndarray:
    """``P[m, n] = integral over Z of exp(i theta (m - n)) dtheta / 2pi``."""
    z0, z1 = _check_phase_interval(Z)
    n = np.arange(N + 1)
    k = (n[:, None] - n[None, :]).astype(float)
    out = np.full(k.shape, (z1 - z0) / TWO_PI, dtype=complex)
    nz = k != 0
    kk = k[nz]
    out[nz] = (np.exp(1j * kk * z1) - np.exp(1j * kk * z0)) / (2j * np.pi * kk)
    return out


def povm_element(Z, A, N: int) -> PovmElement:
    """Truncated matrix of the homodyne POVM on the product set ``Z x A``."""
    z0, z1 = _check_phase_interval(Z)
    if z1 <= z0 or float(A[1]) <= float(A[0]):
        if float(A[0]) > float(A[1]):
            raise InvalidArgumentError("interval with a > b")
        return PovmElement(np.zeros((N + 1, N + 1), dtype=complex))
    E = _phase_average((z0, z1), N) * position_overlap_matrix(N, A)
    return PovmElement(0.5 * (E + E.conj().T))


def povm_union(boxes, N: int) -> PovmElement:
    """POVM element of a finite union of pairwise disjoint product boxes."""
    E = np.zeros((N + 1, N + 1), dtype=complex)
    for Z, A in boxes:
        E += povm_element(Z, A, N).entries
    return PovmElement(E)


def box_probability(rho, Z, A) -> float:
    """``mu_rho(Z x A) = tr(rho E(Z x A))``."""
    m = _entries(rho)
    E = povm_element(Z, A, m.shape[0] - 1).entries
    return float(np.trace(m @ E).real)


def tail_mass(rho, R: float) -> float:
    """Probability that a random-phase quadrature outcome has ``|x| > R``.

    Only the phase-averaged (diagonal) part of ``rho`` contributes. The tail
    integral is taken directly over ``[R, inf)`` so tiny tails stay positive
    rather than cancelling against ``1 - P(|x| <= R)``.
    """
    if not R >= 0:
        raise InvalidArgumentError(f"R must be >= 0, got {R}")
    m = _entries(rho)
    N = m.shape[0] - 1
    pops = np.diag(m).real
    hi = max(R, 0.0) + support_half_width(N, 12.0)
    x, w = gauss_panels(float(R), hi)
    psi2 = hermite_functions(N, x) ** 2
    return float(2.0 * pops @ (psi2 @ w))


def moment_profile(sino: Sinogram, k: int) -> MomentFit:
    """Fit ``integral p(theta, r) r^k dr`` by a degree-``k`` homogeneous trig polynomial."""
    if k not in (1, 2):
        raise InvalidArgumentError(f"moment order must be 1 or 2, got {k}")
    v = sino.values
    edge = max(np.abs(v[:, 0]).max(), np.abs(v[:, -1]).max())
    if edge > 1e-12:
        raise WindowTooSmallError(f"sinogram rows do not decay at the r edges ({edge:.3g})")
    r = sino.r_grid.points
    moments = sino.r_grid.integrate(v * r**k)
    th = sino.theta_grid.points
    basis = np.stack([np.cos(th) ** (k - j) * np.sin(th) ** j for j in range(k + 1)], axis=1)
    coef, *_ = np.linalg.lstsq(basis, moments, rcond=None)
    residual = float(np.max(np.abs(basis @ coef - moments)))
    return MomentFit(k, coef, moments, residual)


def _hermitian_basis(N: int) -> list[np.ndarray]:
    """Hilbert-Schmidt orthonormal real basis of Hermitian ``(N+1)^2`` matrices."""
    d = N + 1
    out = []
    for n in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[n, n] = 1.0
        out.append(e)
    s = 1 / np.sqrt(2)
    for m in range(d):
        for n in range(m + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[m, n] = e[n, m] = s
            out.append(e)
            f = np.zeros((d, d), dtype=complex)
            f[m, n] = -1j * s
            f[n, m] = 1j * s
            out.append(f)
    return out


def sinogram_map(N: int, thetas, r_grid: Grid1D, theta_weights=None) -> np.ndarray:
    """Real matrix taking Hermitian-basis coordinates to weighted sinogram values.

    Columns follow ``_hermitian_basis(N)``; rows are ``(theta, r)`` pairs
    scaled by ``sqrt(theta_weight * r_weight)``.
    """
    thetas = np.asarray(thetas, dtype=float)
    if theta_weights is None:
        theta_weights = np.full(thetas.size, 1.0 / thetas.size)
    sw = np.sqrt(np.outer(theta_weights, r_grid.weights)).ravel()
    cols = [_densities(b, thetas, r_grid.points).ravel() * sw for b in _hermitian_basis(N)]
    return np.stack(cols, axis=1)


def completeness_singular_values(N: int, theta_grid: ThetaGrid, r_grid: Grid1D) -> np.ndarray:
    """Singular values (descending) of the state -> sinogram map at truncation ``N``.

    Rows are weighted by the square roots of the ``dtheta/2pi dr`` quadrature
    weights so the values approximate those of the continuous map.
    """
    if int(N) != N or N < 0:
        raise InvalidArgumentError(f"N must be a nonnegative integer, got {N}")
    dim = (N + 1) ** 2
    if theta_grid.count * r_grid.count < dim:
        raise InvalidArgumentError(
            f"grid has {theta_grid.count * r_grid.count} points, need >= {dim}"
        )
    A = sinogram_map(int(N), theta_grid.points, r_grid, theta_grid.weights)
    return np.linalg.svd(A, compute_uv=False)
