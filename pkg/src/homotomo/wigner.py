"""Characteristic function and Wigner function from the position kernel.

Fourier transforms use the unitary convention
``F f(y) = (2 pi)^(-1/2) integral exp(-i x y) f(x) dx``. Continuous transforms
are approximated by trapezoid quadrature on a uniform ``t`` grid evaluated
directly at the requested output frequencies, so grid values approximate
the continuous transform rather than a bare DFT.
"""

from __future__ import annotations

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .errors import InvalidArgumentError, WindowTooSmallError
from .fock import DensityMatrix, hermite_functions
from .grids import Grid1D, Grid2D, GridFunction2D, trapezoid_weights
from .povm import _densities, support_half_width

__all__ = [
    "char_function",
    "wigner",
    "wigner_via_char",
    "wigner_fock_oracle",
    "fock_projection",
    "char_slice_check",
    "fourier_quadrature",
    "EDGE_TOL",
]

EDGE_TOL = 1e-10
SQRT_2PI = np.sqrt(2 * np.pi)
_CHUNK = 64


def _entries(rho) -> np.ndarray:
    return rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def fourier_quadrature(values: np.ndarray, t: np.ndarray, freqs: np.ndarray, sign: int) -> np.ndarray:
    """``(2 pi)^(-1/2) integral exp(sign * i * f * t) g(t) dt`` along the last axis.

    ``t`` must be uniform; the trapezoid rule is used, which is spectrally
    accurate for the smooth, decaying integrands handled here.
    """
    w = trapezoid_weights(t.size, t[1] - t[0]) / SQRT_2PI
    E = np.exp(sign * 1j * np.outer(t, freqs)) * w[:, None]
    return values @ E


def _t_grid(N: int, max_freq: float) -> np.ndarray:
    """Integration grid for the shifted-kernel Fourier integrals."""
    reach = support_half_width(N, 7.0)
    bandwidth = max_freq + reach
    dt = np.pi / (2 * bandwidth)
    half = 2 * reach
    n = int(np.ceil(half / dt))
    return np.linspace(-half, half, 2 * n + 1)


def _check_kernel_window(m: np.ndarray) -> None:
    N = m.shape[0] - 1
    edge = support_half_width(N, 7.0)
    psi = hermite_functions(N, np.array([-edge, edge]))
    diag = np.abs(np.einsum("mi,mn,ni->i", psi, m, psi))
    if diag.max() > 1e-12:
        raise WindowTooSmallError(f"kernel does not decay on |x| <= {edge:.3g}")


def _shifted_kernel(m, outer, t, centered_on_outer):
    """Kernel along anti-diagonals on the ``outer x t`` mesh.

    ``K(u + t/2, u - t/2)`` when ``centered_on_outer``, else ``K(t + u/2, t - u/2)``.
    """
    N = m.shape[0] - 1
    out = np.empty((outer.size, t.size), dtype=complex)
    for s in range(0, outer.size, _CHUNK):
        u = outer[s:s + _CHUNK, None]
        if centered_on_outer:
            left, right = u + 0.5 * t[None, :], u - 0.5 * t[None, :]
        else:
            left, right = t[None, :] + 0.5 * u, t[None, :] - 0.5 * u
        left = hermite_functions(N, left)
        right = hermite_functions(N, right)
        tmp = np.tensordot(m.T, left, axes=([1], [0]))
        out[s:s + _CHUNK] = np.einsum("nct,nct->ct", tmp, right)
    return out


def char_function(rho, grid: Grid2D) -> GridFunction2D:
    """``V(x, y) = (2 pi)^(-1/2) tr(rho exp(i(xX + yP)))`` on ``grid``.

    Evaluated as the inverse transform in ``t`` of ``K(t + y/2, t - y/2)``.
    """
    m = _entries(rho)
    _check_kernel_window(m)
    N = m.shape[0] - 1
    xs, ys = grid.x.points, grid.y.points
    t = _t_grid(N, np.abs(xs).max())
    K = _shifted_kernel(m, ys, t, False)
    # K[y, t] -> V[x, y]
    V = fourier_quadrature(K, t, xs, +1).T
    return GridFunction2D(grid, V)


def _check_wigner_window(m: np.ndarray, grid: Grid2D) -> None:
    gx, gy = grid.x, grid.y
    p0 = _densities(m, np.array([0.0]), np.array([gx.lo, gx.hi]))
    p1 = _densities(m, np.array([np.pi / 2]), np.array([gy.lo, gy.hi]))
    edge = max(np.abs(p0).max(), np.abs(p1).max())
    if edge > EDGE_TOL:
        raise WindowTooSmallError(
            f"state marginals reach {edge:.3g} at the phase-space grid edges"
        )


def wigner(rho, grid: Grid2D, check_window: bool = True) -> GridFunction2D:
    """Wigner function ``(2 pi)^(-1/2) F_t[K(x + t/2, x - t/2)](y)``.

    Real for Hermitian ``rho``; complex values are returned otherwise. Pass
    ``check_window=False`` to evaluate on a patch that does not contain the
    whole state (e.g. a few points around the origin).
    """
    m = _entries(rho)
    if check_window:
        _check_wigner_window(m, grid)
    N = m.shape[0] - 1
    xs, ys = grid.x.points, grid.y.points
    t = _t_grid(N, np.abs(ys).max())
    K = _shifted_kernel(m, xs, t, True)
    W = fourier_quadrature(K, t, ys, -1) / SQRT_2PI
    if np.allclose(m, m.conj().T, atol=1e-12, rtol=0):
        imag = np.abs(W.imag).max()
        if imag > 1e-10:
            raise AssertionError(f"Wigner function of a Hermitian operator has Im {imag:.3g}")
        W = W.real
    return GridFunction2D(grid, W)


def wigner_via_char(rho, grid: Grid2D) -> GridFunction2D:
    """Independent route: ``W = (2 pi)^(-1/2) F_2 V`` with ``V`` on a wide grid."""
    m = _entries(rho)
    N = m.shape[0] - 1
    reach = support_half_width(N, 7.0)
    fmax = max(np.abs(grid.x.points).max(), np.abs(grid.y.points).max())
    half = 2 * reach
    du = np.pi / (2 * (fmax + reach))
    n = int(np.ceil(half / du))
    u = Grid1D(-half, half, 2 * n + 1)
    V = char_function(m, Grid2D(u, u)).values
    up = u.points
    W = fourier_quadrature(fourier_quadrature(V.T, up, grid.x.points, -1).T, up, grid.y.points, -1)
    W = W / SQRT_2PI
    if np.allclose(m, m.conj().T, atol=1e-12, rtol=0):
        W = W.real
    return GridFunction2D(grid, W)


def wigner_fock_oracle(m: int, n: int, grid: Grid2D) -> GridFunction2D:
    """Closed-form Wigner function of the dyad ``|e_m><e_n|``.

    For ``m >= n``:
    ``(-1)^n / pi * sqrt(n!/m!) * (sqrt(2)(x - iy))^(m-n) * L_n^(m-n)(2 r^2) * exp(-r^2)``;
    the ``m < n`` case is the complex conjugate of ``(n, m)``.
    """
    if int(m) != m or int(n) != n or m < 0 or n < 0:
        raise InvalidArgumentError(f"Fock indices must be >= 0, got ({m}, {n})")
    m, n = int(m), int(n)
    X, Y = grid.mesh()
    hi, lo = max(m, n), min(m, n)
    r2 = X * X + Y * Y
    z = np.sqrt(2.0) * (X - 1j * Y)
    pref = (-1) ** lo / np.pi * np.exp(0.5 * (gammaln(lo + 1) - gammaln(hi + 1)))
    W = pref * z ** (hi - lo) * eval_genlaguerre(lo, hi - lo, 2 * r2) * np.exp(-r2)
    if m < n:
        W = W.conj()
    if m == n:
        W = W.real
    return GridFunction2D(grid, W)


def fock_projection(W: GridFunction2D, N: int, check_decay: bool = True) -> DensityMatrix:
    """Recover ``rho_mn = 2 pi integral conj(W_mn) W`` for ``m, n <= N``."""
    if int(N) != N or N < 0:
        raise InvalidArgumentError(f"N must be a nonnegative integer, got {N}")
    v = W.values
    if check_decay:
        edge = max(
            np.abs(v[0]).max(), np.abs(v[-1]).max(), np.abs(v[:, 0]).max(), np.abs(v[:, -1]).max()
        )
        if edge > EDGE_TOL:
            raise WindowTooSmallError(f"Wigner function reaches {edge:.3g} at the grid edges")
    wts = W.grid.weights * v
    rho = np.empty((N + 1, N + 1), dtype=complex)
    for a in range(N + 1):
        for b in range(a, N + 1):
            dyad = wigner_fock_oracle(a, b, W.grid).values
            val = 2 * np.pi * np.sum(np.conj(dyad) * wts)
            rho[a, b] = val
            rho[b, a] = np.conj(val)
    return DensityMatrix(rho, label="projected")


def char_slice_check(rho, theta: float, r_grid: Grid1D) -> float:
    """Sup discrepancy between ``V(r cos th, r sin th)`` and ``F^-1 p_theta (r)``.

    The characteristic function along the ray is computed from the kernel
    (``char_function`` pointwise); the right-hand side is the inverse Fourier
    quadrature of the quadrature density over a window covering its support.
    """
    m = _entries(rho)
    N = m.shape[0] - 1
    rs = r_grid.points
    # left side: V on the ray, one kernel integral per point
    xs, ys = rs * np.cos(theta), rs * np.sin(theta)
    t = _t_grid(N, np.abs(rs).max())
    K = _shifted_kernel(m, ys, t, False)
    w = trapezoid_weights(t.size, t[1] - t[0]) / SQRT_2PI
    lhs = np.sum(K * np.exp(1j * np.outer(xs, t)) * w, axis=1)
    # right side: inverse transform of the quadrature density
    reach = support_half_width(N, 7.0)
    dx = np.pi / (2 * (np.abs(rs).max() + reach))
    n = int(np.ceil(reach / dx))
    xq = np.linspace(-reach, reach, 2 * n + 1)
    p = _densities(m, np.array([theta]), xq)
    rhs = fourier_quadrature(p, xq, rs, +1)[0]
    return float(np.max(np.abs(lhs - rhs)))
