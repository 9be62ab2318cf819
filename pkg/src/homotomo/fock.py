"""Fock-basis state algebra.

States live in the span of the first ``N + 1`` Hermite functions
``psi_n(x) = (2^n n! sqrt(pi))^(-1/2) H_n(x) exp(-x^2/2)``, with the ladder
convention ``a = (X + iP)/sqrt(2)`` so that a coherent state ``|alpha>`` has
``<X> = sqrt(2) Re(alpha)`` and ``<P> = sqrt(2) Im(alpha)``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .errors import InvalidArgumentError, TruncationTooSmallError
from .grids import Grid1D, Grid2D, GridFunction2D

__all__ = [
    "StateDescriptor",
    "DensityMatrix",
    "StateDiagnostics",
    "hermite_functions",
    "hermite_basis",
    "make_state",
    "validate_state",
    "kernel_from_state",
    "kernel_trace",
    "kernel_gram_psd_check",
    "MAX_TRACE_DEFICIT",
]

MAX_TRACE_DEFICIT = 1e-6
KINDS = ("fock", "coherent", "cat", "thermal", "mixture")


def hermite_functions(N: int, x) -> np.ndarray:
    """Orthonormal Hermite functions ``psi_0 .. psi_N`` at arbitrary points.

    Returns an array of shape ``(N + 1,) + x.shape``. Uses the normalized
    three-term recurrence, which never forms ``H_n`` or ``n!`` explicitly and
    therefore stays finite for large ``n``.
    """
    if int(N) != N or N < 0:
        raise InvalidArgumentError(f"N must be a nonnegative integer, got {N}")
    N = int(N)
    x = np.asarray(x, dtype=float)
    out = np.empty((N + 1,) + x.shape)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if N >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(1, N):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * x * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


def hermite_basis(N: int, grid: Grid1D) -> np.ndarray:
    """Matrix ``psi_n(x_i)`` of shape ``(N + 1, grid.count)``."""
    return hermite_functions(N, grid.points)


@dataclass(frozen=True)
class StateDescriptor:
    """Declarative recipe for a library state.

    ``components`` is only used by mixtures and holds ``(weight, descriptor)``
    pairs; sub-descriptors are rebuilt at the mixture's truncation.
    """

    kind: str
    truncation: int
    n: int = 0
    alpha: complex = 0j
    nbar: float = 0.0
    components: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown state kind {self.kind!r}")
        if int(self.truncation) != self.truncation or self.truncation < 0:
            raise InvalidArgumentError(f"truncation must be >= 0, got {self.truncation}")
        object.__setattr__(self, "truncation", int(self.truncation))
        object.__setattr__(self, "alpha", complex(self.alpha))
        if self.kind == "fock":
            if int(self.n) != self.n or self.n < 0:
                raise InvalidArgumentError(f"fock index must be >= 0, got {self.n}")
            if self.n > self.truncation:
                raise InvalidArgumentError(
                    f"fock index {self.n} exceeds truncation {self.truncation}"
                )
        if self.kind == "thermal" and not (np.isfinite(self.nbar) and self.nbar >= 0):
            raise InvalidArgumentError(f"mean photon number must be >= 0, got {self.nbar}")
        if self.kind == "mixture":
            if not self.components:
                raise InvalidArgumentError("mixture needs at least one component")
            comps = tuple((float(w), s) for w, s in self.components)
            weights = np.array([w for w, _ in comps])
            if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
                raise InvalidArgumentError("mixture weights must be >= 0 and sum to 1")
            object.__setattr__(self, "components", comps)

    # -- convenience constructors -------------------------------------------------
    @classmethod
    def fock(cls, n: int, truncation: int | None = None) -> StateDescriptor:
        return cls("fock", n if truncation is None else truncation, n=n)

    @classmethod
    def coherent(cls, alpha: complex, truncation: int = 16) -> StateDescriptor:
        return cls("coherent", truncation, alpha=alpha)

    @classmethod
    def cat(cls, alpha: complex, truncation: int = 16) -> StateDescriptor:
        return cls("cat", truncation, alpha=alpha)

    @classmethod
    def thermal(cls, nbar: float, truncation: int = 16) -> StateDescriptor:
        return cls("thermal", truncation, nbar=nbar)

    @classmethod
    def mixture(cls, components: Sequence, truncation: int) -> StateDescriptor:
        return cls("mixture", truncation, components=tuple(components))

    # -- JSON ------------------------------------------------------------------------
    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind, "truncation": self.truncation}
        if self.kind == "fock":
            d["n"] = self.n
        elif self.kind in ("coherent", "cat"):
            d["alpha"] = [self.alpha.real, self.alpha.imag]
        elif self.kind == "thermal":
            d["nbar"] = self.nbar
        else:
            d["components"] = [{"weight": w, "state": s.to_dict()} for w, s in self.components]
        return d

    @classmethod
    def from_dict(cls, d: dict, truncation: int | None = None) -> StateDescriptor:
        """Parse the JSON schema; ``truncation`` overrides the stored value."""
        try:
            kind = d["kind"]
            trunc = truncation if truncation is not None else d.get("truncation")
            if kind == "fock":
                n = int(d["n"])
                return cls("fock", n if trunc is None else trunc, n=n)
            if trunc is None:
                raise InvalidArgumentError(f"{kind} state needs a truncation")
            if kind in ("coherent", "cat"):
                a = d["alpha"]
                alpha = complex(a[0], a[1]) if isinstance(a, (list, tuple)) else complex(a)
                return cls(kind, trunc, alpha=alpha)
            if kind == "thermal":
                return cls(kind, trunc, nbar=float(d["nbar"]))
            if kind == "mixture":
                comps = tuple(
                    (float(c["weight"]), cls.from_dict(c["state"], truncation=trunc))
                    for c in d["components"]
                )
                return cls(kind, trunc, components=comps)
        except (KeyError, TypeError, IndexError) as exc:
            raise InvalidArgumentError(f"malformed state descriptor: {exc!r}") from exc
        raise InvalidArgumentError(f"unknown state kind {kind!r}")

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class DensityMatrix:
    """Truncated Fock-basis density matrix ``rho[m, n] = <e_m|rho|e_n>``."""

    entries: np.ndarray = field(repr=False)
    trace_deficit: float = 0.0
    label: str = ""

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidArgumentError(f"density matrix must be square, got {rho.shape}")
        rho.flags.writeable = False
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def N(self) -> int:
        return self.dim - 1

    def embed(self, N: int) -> np.ndarray:
        """Entries zero-padded (or cropped) to truncation ``N``."""
        out = np.zeros((N + 1, N + 1), dtype=complex)
        k = min(N + 1, self.dim)
        out[:k, :k] = self.entries[:k, :k]
        return out

    def digest(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.entries).tobytes()).hexdigest()[:16]

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "re": self.entries.real.tolist(),
            "im": self.entries.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> DensityMatrix:
        try:
            re = np.asarray(d["re"], dtype=float)
            im = np.asarray(d["im"], dtype=float)
            dim = int(d["dim"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"malformed density matrix: {exc!r}") from exc
        if re.shape != (dim, dim) or im.shape != (dim, dim):
            raise InvalidArgumentError("density matrix arrays do not match dim")
        return cls(re + 1j * im)


def _coherent_amplitudes(alpha: complex, N: int) -> np.ndarray:
    n = np.arange(N + 1)
    if alpha == 0:
        c = np.zeros(N + 1, dtype=complex)
        c[0] = 1.0
        return c
    # log-space magnitude avoids overflow of alpha^n / sqrt(n!)
    logmag = -0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(logmag) * (alpha / abs(alpha)) ** n


def _unnormalized(desc: StateDescriptor, N: int) -> np.ndarray:
    if desc.kind == "fock":
        if desc.n > N:
            raise InvalidArgumentError(f"fock index {desc.n} exceeds truncation {N}")
        rho = np.zeros((N + 1, N + 1), dtype=complex)
        rho[desc.n, desc.n] = 1.0
        return rho
    if desc.kind == "coherent":
        c = _coherent_amplitudes(desc.alpha, N)
        return np.outer(c, c.conj())
    if desc.kind == "cat":
        a = desc.alpha
        c = _coherent_amplitudes(a, N) + _coherent_amplitudes(-a, N)
        c = c / np.sqrt(2.0 * (1.0 + np.exp(-2.0 * abs(a) ** 2)))
        return np.outer(c, c.conj())
    if desc.kind == "thermal":
        nbar = desc.nbar
        n = np.arange(N + 1)
        if nbar == 0:
            p = (n == 0).astype(float)
        else:
            p = np.exp(n * np.log(nbar) - (n + 1) * np.log1p(nbar))
        return np.diag(p).astype(complex)
    rho = np.zeros((N + 1, N + 1), dtype=complex)
    for w, sub in desc.components:
        rho += w * _unnormalized(sub, N)
    return rho


def make_state(desc: StateDescriptor) -> DensityMatrix:
    """Build the density matrix of ``desc`` at its truncation.

    The truncated matrix is renormalized to unit trace; the mass lost to the
    truncation is kept in ``trace_deficit`` and must not exceed
    ``MAX_TRACE_DEFICIT``.
    """
    rho = _unnormalized(desc, desc.truncation)
    tr = float(np.trace(rho).real)
    deficit = max(0.0, 1.0 - tr)
    if deficit > MAX_TRACE_DEFICIT:
        raise TruncationTooSmallError(
            f"{desc.kind} state loses {deficit:.3g} of its mass at truncation "
            f"N={desc.truncation} (limit {MAX_TRACE_DEFICIT:g})"
        )
    rho = rho / tr
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho, trace_deficit=deficit, label=desc.kind)


@dataclass(frozen=True)
class StateDiagnostics:
    hermiticity_defect: float
    trace: complex
    min_eigenvalue: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "hermiticity_defect": self.hermiticity_defect,
            "trace_re": self.trace.real,
            "trace_im": self.trace.imag,
            "min_eigenvalue": self.min_eigenvalue,
            "passed": self.passed,
        }


def validate_state(rho) -> StateDiagnostics:
    """Check the density-matrix invariants; never raises on bad states."""
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    herm = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    tr = complex(np.trace(m))
    min_eig = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min())
    passed = herm <= 1e-12 and abs(tr - 1.0) <= 1e-12 and min_eig >= -1e-10
    return StateDiagnostics(herm, tr, min_eig, passed)


def _entries(rho) -> np.ndarray:
    return rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def kernel_from_state(rho, grid: Grid2D) -> GridFunction2D:
    """Position-space kernel ``K(x, y) = sum rho_mn psi_m(x) psi_n(y)``."""
    m = _entries(rho)
    N = m.shape[0] - 1
    px = hermite_basis(N, grid.x)
    py = px if grid.y == grid.x else hermite_basis(N, grid.y)
    return GridFunction2D(grid, px.T @ m @ py)


def kernel_trace(K: GridFunction2D) -> complex:
    """Trapezoid integral of the kernel diagonal ``K(x, x)``."""
    if not K.grid.is_square:
        raise InvalidArgumentError("kernel trace needs the same grid on both axes")
    return complex(K.grid.x.integrate(np.diag(K.values)))


def kernel_gram_psd_check(K: GridFunction2D, points) -> float:
    """Smallest eigenvalue of the Gram matrix ``G[i, j] = K(x_j, x_i)``.

    For a Hermitian kernel this is the plain minimum eigenvalue. A
    non-Hermitian Gram matrix cannot be positive semidefinite; it is scored
    as ``lambda_min(hermitian part) - ||skew part||_2`` so the defect shows up
    as a negative value.
    """
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    xi, xj = np.meshgrid(pts, pts, indexing="ij")
    G = K.interpolate(xj, xi)
    H = 0.5 * (G + G.conj().T)
    S = 0.5 * (G - G.conj().T)
    skew = float(np.linalg.norm(S, 2)) if S.size else 0.0
    return float(np.linalg.eigvalsh(H).min()) - skew
