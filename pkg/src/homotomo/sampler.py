"""Seeded homodyne samples ``(theta_i, x_i)`` and empirical estimates.

Random numbers come from NumPy's Philox-4x64 counter-based generator keyed
by the seed. Samples are produced in fixed chunks of ``CHUNK`` draws; chunk
``c`` uses the stream ``Philox(key=seed).jumped(c)``, so the output does not
depend on how many worker threads process the chunks.

Phases are uniform on ``[0, 2pi)``. The outcome ``x`` is drawn by inverse
CDF from the quadrature density of the phase bin (``THETA_BINS`` equal bins,
density evaluated at the bin centre) using linear interpolation of the
normalized cumulative trapezoid on ``r_grid``. Each draw consumes two
consecutive uniforms ``(u_theta, u_x)``, so a shorter run is a prefix of a
longer one with the same seed.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import EstimationError, InvalidArgumentError, WindowTooSmallError
from .fock import DensityMatrix
from .grids import Grid1D
from .povm import _harmonics

__all__ = [
    "SampleSet",
    "draw_samples",
    "empirical_mean",
    "empirical_box_frequency",
    "THETA_BINS",
    "CHUNK",
]

THETA_BINS = 4096
CHUNK = 1 << 14
MAX_OUTSIDE_MASS = 1e-9
THREADS_ENV = "HOMOTOMO_THREADS"


@dataclass(frozen=True)
class SampleSet:
    theta: np.ndarray = field(repr=False)
    x: np.ndarray = field(repr=False)
    seed: int
    state_hash: str = ""

    def __len__(self) -> int:
        return self.theta.size

    @property
    def pairs(self) -> np.ndarray:
        return np.stack([self.theta, self.x], axis=1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SampleSet):
            return NotImplemented
        return (
            self.seed == other.seed
            and self.state_hash == other.state_hash
            and np.array_equal(self.theta, other.theta)
            and np.array_equal(self.x, other.x)
        )

    __hash__ = None


def _bin_cdfs(m: np.ndarray, r_grid: Grid1D) -> np.ndarray:
    """Normalized cumulative trapezoid of every bin's density, ``(THETA_BINS, count)``."""
    centres = (np.arange(THETA_BINS) + 0.5) * (2 * np.pi / THETA_BINS)
    N = m.shape[0] - 1
    c = _harmonics(m, r_grid.points)
    phases = np.exp(1j * np.outer(centres, np.arange(-N, N + 1)))
    dens = np.clip((phases @ c).real, 0.0, None)
    h = r_grid.step
    cum = np.zeros_like(dens)
    cum[:, 1:] = np.cumsum(0.5 * h * (dens[:, 1:] + dens[:, :-1]), axis=1)
    outside = 1.0 - cum[:, -1]
    worst = float(np.abs(outside).max())
    if worst > MAX_OUTSIDE_MASS:
        raise WindowTooSmallError(
            f"{worst:.3g} of the quadrature mass lies outside [{r_grid.lo}, {r_grid.hi}]"
        )
    return cum / cum[:, -1:]


def _draw_chunk(seed: int, chunk: int, size: int, cdfs: np.ndarray, r: np.ndarray):
    rng = np.random.Generator(np.random.Philox(key=seed).jumped(chunk))
    u = rng.random((size, 2)).T
    theta = 2 * np.pi * u[0]
    bins = np.minimum((u[0] * THETA_BINS).astype(np.int64), THETA_BINS - 1)
    # inverse CDF, vectorized over bins by offsetting each row into its own band
    M = r.size
    flat = (cdfs + 2.0 * np.arange(THETA_BINS)[:, None]).ravel()
    target = u[1] + 2.0 * bins
    pos = np.searchsorted(flat, target, side="right") - 1
    j = np.clip(pos - bins * M, 0, M - 2)
    row = cdfs[bins]
    lo = row[np.arange(size), j]
    hi = row[np.arange(size), j + 1]
    span = hi - lo
    frac = np.where(span > 0, (u[1] - lo) / np.where(span > 0, span, 1.0), 0.5)
    x = r[j] + np.clip(frac, 0.0, 1.0) * (r[j + 1] - r[j])
    return theta, x


def draw_samples(rho, n: int, seed: int, r_grid: Grid1D | None = None) -> SampleSet:
    """Draw ``n`` i.i.d. pairs from the homodyne distribution of ``rho``."""
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"sample count must be >= 1, got {n}")
    if int(seed) != seed or not 0 <= seed < 2**64:
        raise InvalidArgumentError(f"seed must be a 64-bit unsigned integer, got {seed}")
    n, seed = int(n), int(seed)
    r_grid = r_grid or Grid1D.symmetric()
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    cdfs = _bin_cdfs(m, r_grid)
    r = r_grid.points
    sizes = [min(CHUNK, n - s) for s in range(0, n, CHUNK)]
    threads = max(1, int(os.environ.get(THREADS_ENV, "1") or 1))
    job = lambda c: _draw_chunk(seed, c, sizes[c], cdfs, r)  # noqa: E731
    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(c) for c in range(len(sizes))]
    theta = np.concatenate([p[0] for p in parts])
    x = np.concatenate([p[1] for p in parts])
    digest = rho.digest() if isinstance(rho, DensityMatrix) else ""
    return SampleSet(theta, x, seed, digest)


def empirical_mean(f: Callable, samples: SampleSet) -> tuple[float, float]:
    """Sample mean of ``f(theta, x)`` and its standard error.

    ``f`` is called once with the full arrays and must broadcast.
    """
    vals = np.broadcast_to(np.asarray(f(samples.theta, samples.x), dtype=float), samples.theta.shape)
    if not np.all(np.isfinite(vals)):
        raise EstimationError("f is not finite on every sample")
    n = vals.size
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return mean, stderr


def empirical_box_frequency(samples: SampleSet, Z, A) -> float:
    """Fraction of samples with ``theta`` in ``Z`` and ``x`` in ``A`` (closed intervals)."""
    z0, z1 = float(Z[0]), float(Z[1])
    a, b = float(A[0]), float(A[1])
    if z0 > z1 or a > b:
        raise InvalidArgumentError("intervals must have lo <= hi")
    t, x = samples.theta, samples.x
    hit = (t >= z0) & (t <= z1) & (x >= a) & (x <= b)
    return float(hit.mean())
