"""End-to-end run: state -> sinogram, samples, Wigner, FBP reconstruction, report."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import io
from .errors import InvalidArgumentError
from .fock import DensityMatrix
from .grids import Grid1D, Grid2D, ThetaGrid
from .povm import box_probability, sinogram
from .radon import radon_transform, reconstruct_state, reconstruct_wigner
from .sampler import draw_samples, empirical_box_frequency
from .verify import origin_grid
from .wigner import wigner

REPORT_SCHEMA_VERSION = 1

DEFAULT_TOLERANCES = {
    "slice_identity": 1e-5,
    "wigner_roundtrip_rel": 1e-3,
    "w00_roundtrip": 1e-3,
    "rho_roundtrip": 1e-3,
    "row_normalization": 1e-8,
    "wigner_mass": 1e-6,
    "reconstructed_mass": 1e-4,
    "sampling_sigmas": 4.0,
}


@dataclass
class PipelineConfig:
    theta_count: int = 360
    r_window: float = 8.0
    r_count: int = 512
    x_window: float = 8.0
    x_count: int = 512
    seed: int = 1
    samples: int = 100_000
    rec_trunc: int | None = None
    out_dir: str = "."
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        for k, v in self.tolerances.items():
            if not v > 0:
                raise InvalidArgumentError(f"tolerance {k} must be positive")

    @classmethod
    def from_file(cls, path, **overrides) -> PipelineConfig:
        d = io.read_json(path) if path else {}
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InvalidArgumentError(f"unknown config keys: {sorted(unknown)}")
        tol = dict(DEFAULT_TOLERANCES)
        tol.update(d.pop("tolerances", {}))
        d.update({k: v for k, v in overrides.items() if v is not None})
        return cls(tolerances=tol, **d)

    @property
    def theta_grid(self) -> ThetaGrid:
        return ThetaGrid(self.theta_count)

    @property
    def r_grid(self) -> Grid1D:
        return Grid1D.symmetric(self.r_window, self.r_count)

    @property
    def phase_grid(self) -> Grid2D:
        return Grid2D.square(self.x_window, self.x_count)


def _check(measured, tol) -> dict:
    measured = float(measured)
    return {"measured": measured, "tolerance": tol, "passed": bool(measured <= tol)}


def run_pipeline(rho: DensityMatrix, cfg: PipelineConfig) -> dict:
    """Run every stage, write the output files into ``cfg.out_dir`` and return the report."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tol = cfg.tolerances
    state_hash = rho.digest()
    stage = "sinogram"
    try:
        sino = sinogram(rho, cfg.theta_grid, cfg.r_grid)
        io.write_sinogram(out / "sinogram.csv", sino)

        stage = "sample"
        samples = draw_samples(rho, cfg.samples, cfg.seed, cfg.r_grid)
        io.write_samples(out / "samples.csv", samples)

        stage = "wigner"
        grid = cfg.phase_grid
        W = wigner(rho, grid)
        io.write_grid_function(out / "wigner.csv", W, "wigner", state_hash=state_hash)

        stage = "radon"
        RW = radon_transform(W, cfg.theta_grid, cfg.r_grid)

        stage = "reconstruct"
        Wr = reconstruct_wigner(sino, grid)
        io.write_grid_function(out / "wigner_rec.csv", Wr, "wigner", state_hash=state_hash, reconstructed=True)
        N = rho.N if cfg.rec_trunc is None else cfg.rec_trunc
        rho_rec = reconstruct_state(sino, N, grid)
        io.write_density_matrix(out / "rho_rec.json", rho_rec)
        w00 = reconstruct_wigner(sino, origin_grid()).values[1, 1]
        w00_true = wigner(rho, origin_grid(), check_window=False).values[1, 1]
    except Exception as exc:
        exc.stage = stage
        raise

    X, Y = grid.mesh()
    disk = X**2 + Y**2 <= 16
    scale = np.abs(W.values).max()
    q = box_probability(rho, (0, 2 * np.pi), (-1, 1))
    freq = empirical_box_frequency(samples, (0, 2 * np.pi), (-1, 1))
    sigma = np.sqrt(max(q * (1 - q), 1e-300) / len(samples))
    checks = {
        "slice_identity": _check(np.abs(RW.values - sino.values).max(), tol["slice_identity"]),
        "wigner_roundtrip_rel": _check(
            np.abs(Wr.values - W.values)[disk].max() / scale, tol["wigner_roundtrip_rel"]
        ),
        "w00_roundtrip": _check(abs(w00 - w00_true), tol["w00_roundtrip"]),
        "rho_roundtrip": _check(np.abs(rho_rec.entries - rho.embed(N)).max(), tol["rho_roundtrip"]),
        "row_normalization": _check(np.abs(sino.row_integrals() - 1).max(), tol["row_normalization"]),
        "wigner_mass": _check(abs(W.integrate() - 1), tol["wigner_mass"]),
        "reconstructed_mass": _check(abs(Wr.integrate() - 1), tol["reconstructed_mass"]),
        "sampling_box_sigmas": _check(abs(freq - q) / sigma, tol["sampling_sigmas"]),
    }
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "state_hash": state_hash,
        "config": {k: v for k, v in asdict(cfg).items() if k not in ("out_dir", "tolerances")},
        "tolerances": dict(tol),
        "checks": checks,
        "rho_rec_trace": float(np.trace(rho_rec.entries).real),
        "passed": all(c["passed"] for c in checks.values()),
    }
    io.write_report(out / "report.json", report)
    return report
