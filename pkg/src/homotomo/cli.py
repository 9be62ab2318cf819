"""Command-line front end.

Exit codes: 0 ok, 2 input error, 3 numeric-domain error (truncation or
window too small), 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import io
from .errors import InvalidArgumentError, TruncationTooSmallError, WindowTooSmallError
from .fock import make_state
from .grids import Grid1D, Grid2D, ThetaGrid
from .pipeline import PipelineConfig, run_pipeline
from .povm import sinogram
from .radon import radon_transform, reconstruct_state, reconstruct_wigner
from .sampler import draw_samples
from .verify import SUITES, run_suite
from .wigner import char_function, wigner

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4

log = logging.getLogger("homotomo")


def _add_r_grid(p):
    p.add_argument("--theta-count", type=int, default=360)
    p.add_argument("--r-window", type=float, default=8.0)
    p.add_argument("--r-count", type=int, default=512)


def _add_x_grid(p):
    p.add_argument("--x-window", type=float, default=8.0)
    p.add_argument("--x-count", type=int, default=512)


def cmd_state(a) -> int:
    desc = io.read_descriptor(a.spec, truncation=a.trunc)
    rho = make_state(desc)
    io.write_density_matrix(a.out, rho)
    log.info("wrote %s (dim %d, trace deficit %.3g)", a.out, rho.dim, rho.trace_deficit)
    return EXIT_OK


def cmd_sinogram(a) -> int:
    rho = io.read_density_matrix(a.rho)
    s = sinogram(rho, ThetaGrid(a.theta_count), Grid1D.symmetric(a.r_window, a.r_count))
    io.write_sinogram(a.out, s)
    return EXIT_OK


def cmd_sample(a) -> int:
    rho = io.read_density_matrix(a.rho)
    s = draw_samples(rho, a.n, a.seed, Grid1D.symmetric(a.r_window, a.r_count))
    io.write_samples(a.out, s)
    return EXIT_OK


def cmd_wigner(a) -> int:
    rho = io.read_density_matrix(a.rho)
    grid = Grid2D.square(a.x_window, a.x_count)
    io.write_grid_function(a.out, wigner(rho, grid), "wigner", state_hash=rho.digest())
    if a.char:
        io.write_grid_function(a.char, char_function(rho, grid), "char_function", state_hash=rho.digest())
    return EXIT_OK


def cmd_radon(a) -> int:
    f = io.read_grid_function(a.input)
    s = radon_transform(f, ThetaGrid(a.theta_count), Grid1D.symmetric(a.r_window, a.r_count))
    io.write_sinogram(a.out, s)
    return EXIT_OK


def cmd_reconstruct(a) -> int:
    s = io.read_sinogram(a.sinogram)
    grid = Grid2D.square(a.x_window, a.x_count)
    if a.out_wigner:
        io.write_grid_function(a.out_wigner, reconstruct_wigner(s, grid), "wigner", reconstructed=True)
    if a.out_rho:
        io.write_density_matrix(a.out_rho, reconstruct_state(s, a.trunc, grid))
    return EXIT_OK


def cmd_pipeline(a) -> int:
    rho = io.read_density_matrix(a.rho)
    cfg = PipelineConfig.from_file(
        a.config,
        theta_count=a.theta_count, r_window=a.r_window, r_count=a.r_count,
        x_window=a.x_window, x_count=a.x_count, seed=a.seed, samples=a.n,
        rec_trunc=a.rec_trunc, out_dir=a.out_dir,
    )
    report = run_pipeline(rho, cfg)
    print(json.dumps({"passed": report["passed"], "checks": report["checks"]}, indent=2, sort_keys=True))
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_verify(a) -> int:
    result = run_suite(a.suite)
    print(json.dumps(result, indent=2, sort_keys=True))
    if not result["passed"]:
        for c in result["checks"]:
            if not c["passed"]:
                print(
                    f"FAIL [{c['suite']}] {c['name']}: measured {c['measured']:.6g}, "
                    f"tolerance {c['tolerance']:.6g} {c['detail']}",
                    file=sys.stderr,
                )
        return EXIT_VERIFY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="homotomo", description="Homodyne tomography simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("state", help="build a density matrix from a state descriptor")
    s.add_argument("--spec", required=True)
    s.add_argument("--trunc", type=int)
    s.add_argument("--out", default="rho.json")
    s.set_defaults(func=cmd_state)

    s = sub.add_parser("sinogram", help="tabulate quadrature densities")
    s.add_argument("--rho", required=True)
    s.add_argument("--out", default="sinogram.csv")
    _add_r_grid(s)
    s.set_defaults(func=cmd_sinogram)

    s = sub.add_parser("sample", help="draw seeded homodyne samples")
    s.add_argument("--rho", required=True)
    s.add_argument("--n", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--out", default="samples.csv")
    _add_r_grid(s)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("wigner", help="Wigner (and optionally characteristic) function")
    s.add_argument("--rho", required=True)
    s.add_argument("--out", default="wigner.csv")
    s.add_argument("--char", help="also write the characteristic function (_re/_im CSVs)")
    _add_x_grid(s)
    s.set_defaults(func=cmd_wigner)

    s = sub.add_parser("radon", help="Radon transform of a gridded function")
    s.add_argument("--input", required=True)
    s.add_argument("--out", default="radon.csv")
    _add_r_grid(s)
    s.set_defaults(func=cmd_radon)

    s = sub.add_parser("reconstruct", help="filtered back-projection of a sinogram")
    s.add_argument("--sinogram", required=True)
    s.add_argument("--trunc", type=int, default=16)
    s.add_argument("--out-wigner", default="wigner_rec.csv")
    s.add_argument("--out-rho", default="rho_rec.json")
    _add_x_grid(s)
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("pipeline", help="run every stage and write a report")
    s.add_argument("--rho", required=True)
    s.add_argument("--config")
    s.add_argument("--out-dir", default=".")
    s.add_argument("--seed", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--rec-trunc", type=int)
    for flag, typ in (("--theta-count", int), ("--r-window", float), ("--r-count", int),
                      ("--x-window", float), ("--x-count", int)):
        s.add_argument(flag, type=typ)
    s.set_defaults(func=cmd_pipeline)

    s = sub.add_parser("verify", help="run a built-in verification suite")
    s.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return a.func(a)
    except (TruncationTooSmallError, WindowTooSmallError) as exc:
        stage = getattr(exc, "stage", a.command)
        print(f"homotomo {a.command}: {stage}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InvalidArgumentError, OSError, ValueError) as exc:
        stage = getattr(exc, "stage", a.command)
        print(f"homotomo {a.command}: {stage}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
