"""Self-check suites run by ``homotomo verify``.

Each check compares a measured quantity against a fixed tolerance; a suite
passes iff every check does. Stochastic checks use fixed seeds, so reports
are reproducible.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import erf, erfc

from .fock import StateDescriptor, hermite_basis, hermite_functions, make_state
from .grids import Grid1D, Grid2D, ThetaGrid
from .povm import (
    Sinogram,
    _densities,
    gauss_panels,
    box_probability,
    completeness_singular_values,
    povm_element,
    sinogram,
    tail_mass,
)
from .radon import lambda_filter_fft, lambda_filter_pv_oracle, radon_transform, reconstruct_state, reconstruct_wigner
from .sampler import draw_samples, empirical_box_frequency
from .wigner import char_function, wigner, wigner_fock_oracle, wigner_via_char

SUITES = ("oracles", "povm", "roundtrip", "sampling")


@dataclass
class Check:
    name: str
    measured: float
    tolerance: float
    passed: bool
    detail: str = ""


def _le(name, measured, tol, detail="") -> Check:
    measured = float(measured)
    return Check(name, measured, tol, bool(measured <= tol), detail)


def _fock(n, N=None):
    return make_state(StateDescriptor("fock", n if N is None else N, n=n))


def origin_grid(step: float = 0.05) -> Grid2D:
    g = Grid1D(-step, step, 3)
    return Grid2D(g, g)


def random_boxes(rng, count: int) -> list:
    boxes = []
    for _ in range(count):
        Z = tuple(np.sort(rng.uniform(0, 2 * np.pi, 2)))
        A = tuple(np.sort(rng.uniform(-5, 5, 2)))
        boxes.append((Z, A))
    return boxes


def box_quadrature(rho, Z, A) -> float:
    """Direct 2-D Gauss quadrature of the quadrature density over ``Z x A``."""
    tz, wz = gauss_panels(Z[0], Z[1], 0.25)
    xa, wa = gauss_panels(max(A[0], -12.0), min(A[1], 12.0), 0.25)
    if tz.size == 0 or xa.size == 0:
        return 0.0
    p = _densities(rho.entries, tz, xa)
    return float(wz @ p @ wa / (2 * np.pi))


def oracle_checks() -> list[Check]:
    out = []
    psi = hermite_functions(2, np.array([0.0]))[:, 0]
    out.append(_le("psi_0(0) = pi^-1/4", abs(psi[0] - np.pi**-0.25), 1e-15))
    out.append(_le("psi_2(0) = -1/(sqrt2 pi^1/4)", abs(psi[2] + 1 / (np.sqrt(2) * np.pi**0.25)), 1e-15))
    g = Grid1D.symmetric(8.0, 1024)
    B = hermite_basis(15, g)
    # psi_16 carries 4.6e-10 of its mass outside [-8, 8]
    out.append(_le("hermite orthonormality n<=15 on [-8,8]", np.abs((B * g.weights) @ B.T - np.eye(16)).max(), 1e-10))

    rg, th = Grid1D.symmetric(), ThetaGrid()
    p = sinogram(_fock(0, 16), th, rg).values
    out.append(_le("vacuum quadrature density", np.abs(p - np.exp(-rg.points**2) / np.sqrt(np.pi)).max(), 1e-10))

    grid = Grid2D.square()
    X, Y = grid.mesh()
    R2 = X**2 + Y**2
    V = char_function(_fock(0), grid).values
    out.append(_le("vacuum characteristic function", np.abs(V - np.exp(-R2 / 4) / np.sqrt(2 * np.pi)).max(), 1e-10))
    worst = 0.0
    for n in range(6):
        W = wigner(_fock(n), grid).values
        worst = max(worst, np.abs(W - wigner_fock_oracle(n, n, grid).values).max())
    out.append(_le("wigner vs Laguerre oracle, n<=5", worst, 1e-8))
    rho = make_state(StateDescriptor.cat(2.0, 16))
    out.append(_le(
        "kernel route vs F2 route (cat 2)",
        np.abs(wigner(rho, grid).values - wigner_via_char(rho, grid).values).max(), 1e-8,
    ))

    r = Grid1D(-8, 8, 513)
    row = np.exp(-r.points**2) / np.sqrt(np.pi)
    s = Sinogram(ThetaGrid(2), r, np.vstack([row, row]))
    out.append(_le("Lambda gaussian at 0 (FFT)", abs(lambda_filter_fft(s).values[0, 256] - 2), 1e-6))
    out.append(_le("Lambda gaussian at 0 (PV)", abs(lambda_filter_pv_oracle(s).values[0, 256] - 2), 1e-3))
    return out


def povm_checks(seed: int = 7) -> list[Check]:
    out = []
    N = 16
    E = povm_element((0, 2 * np.pi), (-np.inf, np.inf), N).entries
    out.append(_le("E(full space) = I", np.abs(E - np.eye(N + 1)).max(), 1e-12))
    rng = np.random.default_rng(seed)
    rho = make_state(StateDescriptor.cat(2.0, 16))
    worst_eig, worst_tr = np.inf, 0.0
    for Z, A in random_boxes(rng, 20):
        worst_eig = min(worst_eig, povm_element(Z, A, N).eigenvalues().min())
        worst_tr = max(worst_tr, abs(box_probability(rho, Z, A) - box_quadrature(rho, Z, A)))
    out.append(Check("min eigenvalue of 20 random box elements", float(worst_eig), -1e-10, bool(worst_eig >= -1e-10)))
    out.append(_le("tr(rho E(B)) vs 2-D quadrature of p", worst_tr, 1e-6))
    sv = completeness_singular_values(2, ThetaGrid(64), Grid1D.symmetric(8.0, 256))
    out.append(Check("completeness sigma_min (N=2)", float(sv.min()), 1e-6, bool(sv.min() > 1e-6)))
    out.append(_le("vacuum tail at R=1 vs erfc(1)", abs(tail_mass(_fock(0), 1.0) - erfc(1.0)), 1e-8))
    tails = [tail_mass(rho, R) for R in range(1, 7)]
    out.append(Check("cat tail mass positive R=1..6", float(min(tails)), 0.0, bool(min(tails) > 0)))
    return out


def roundtrip_checks() -> list[Check]:
    out = []
    grid = Grid2D.square()
    th, rg = ThetaGrid(), Grid1D.symmetric()
    X, Y = grid.mesh()
    disk = X**2 + Y**2 <= 16
    for n in (0, 1, 2):
        rho = _fock(n, 16)
        sino = sinogram(rho, th, rg)
        w0 = reconstruct_wigner(sino, origin_grid()).values[1, 1]
        target = (-1) ** n / np.pi
        out.append(_le(
            f"FBP W(0,0) fock{n}", abs(w0 - target), 1e-3,
            detail=f"reconstructed/expected = {w0 / target:.6g}",
        ))
    rho = _fock(1, 16)
    sino = sinogram(rho, th, rg)
    W = wigner(rho, grid).values
    out.append(_le("slice identity fock1", np.abs(radon_transform(wigner(rho, grid), th, rg).values - sino.values).max(), 1e-5))
    Wr = reconstruct_wigner(sino, grid).values
    out.append(_le("FBP relative sup error fock1 (r<=4)", np.abs(Wr - W)[disk].max() / np.abs(W).max(), 1e-3))
    rec = reconstruct_state(sino, 3)
    out.append(_le("state round trip fock1 N=3", np.abs(rec.entries - rho.embed(3)).max(), 1e-3))
    return out


def sampling_checks(seed: int = 20240601, n: int = 100_000) -> list[Check]:
    out = []
    vac = _fock(0, 16)
    s = draw_samples(vac, n, seed)
    counts = np.bincount(np.minimum((s.theta / (2 * np.pi) * 8).astype(int), 7), minlength=8)
    sd = np.sqrt(n * (1 / 8) * (7 / 8))
    z = np.abs(counts - n / 8).max() / sd
    out.append(_le("theta marginal uniform on 8 bins (z)", z, 4.0))
    q = erf(1.0)
    f = empirical_box_frequency(s, (0, 2 * np.pi), (-1, 1))
    out.append(_le("vacuum frequency of |x|<=1 (z)", abs(f - q) / np.sqrt(q * (1 - q) / n), 4.0))
    again = draw_samples(vac, n, seed)
    out.append(_le("bit-identical rerun", 0.0 if again == s else 1.0, 0.0))
    return out


_RUNNERS = {
    "oracles": oracle_checks,
    "povm": povm_checks,
    "roundtrip": roundtrip_checks,
    "sampling": sampling_checks,
}


def run_suite(name: str) -> dict:
    names = SUITES if name == "all" else (name,)
    checks = []
    for s in names:
        for c in _RUNNERS[s]():
            d = asdict(c)
            d["suite"] = s
            checks.append(d)
    return {"suite": name, "passed": all(c["passed"] for c in checks), "checks": checks}
