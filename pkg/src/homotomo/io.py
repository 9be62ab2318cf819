"""Plain-text file formats.

All floats are written with 17 significant digits so files round-trip
bit-exactly. Sidecar metadata lives next to the data file as
``<stem>.meta.json``.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError
from .fock import DensityMatrix, StateDescriptor
from .grids import Grid1D, Grid2D, GridFunction2D, ThetaGrid
from .povm import Sinogram
from .sampler import SampleSet

FMT = "%.17g"

_SINO_HEADER = re.compile(
    r"#\s*theta_count=(\d+)\s+r_lo=(\S+)\s+r_hi=(\S+)\s+r_count=(\d+)"
)


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".meta.json")


def _dump_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise InvalidArgumentError(f"{path}: {exc.strerror}") from exc


def read_descriptor(path, truncation: int | None = None) -> StateDescriptor:
    return StateDescriptor.from_dict(read_json(path), truncation=truncation)


def write_density_matrix(path, rho: DensityMatrix) -> None:
    _dump_json(path, rho.to_dict())


def read_density_matrix(path) -> DensityMatrix:
    return DensityMatrix.from_dict(read_json(path))


def _write_rows(fh, values: np.ndarray) -> None:
    for row in np.atleast_2d(values):
        fh.write(",".join(FMT % v for v in row) + "\n")


def write_sinogram(path, sino: Sinogram, **meta) -> None:
    g = sino.r_grid
    with open(path, "w") as fh:
        fh.write(
            f"# theta_count={sino.theta_grid.count} r_lo={g.lo!r} r_hi={g.hi!r} r_count={g.count}\n"
        )
        _write_rows(fh, sino.values)
    side = {
        "kind": "sinogram",
        "theta_grid": sino.theta_grid.to_dict(),
        "r_grid": g.to_dict(),
        "filtered": bool(sino.filtered),
        **sino.meta,
        **meta,
    }
    _dump_json(sidecar_path(path), side)


def read_sinogram(path) -> Sinogram:
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise InvalidArgumentError(f"{path}: {exc.strerror}") from exc
    if not lines:
        raise InvalidArgumentError(f"{path}: empty sinogram file")
    m = _SINO_HEADER.match(lines[0])
    if not m:
        raise InvalidArgumentError(f"{path}: missing sinogram header line")
    T, lo, hi, count = int(m[1]), float(m[2]), float(m[3]), int(m[4])
    try:
        values = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:] if ln.strip()])
    except ValueError as exc:
        raise InvalidArgumentError(f"{path}: bad number ({exc})") from exc
    if values.shape != (T, count):
        raise InvalidArgumentError(f"{path}: expected {T}x{count} values, got {values.shape}")
    meta = {}
    filtered = False
    side = sidecar_path(path)
    if side.exists():
        meta = read_json(side)
        filtered = bool(meta.get("filtered", False))
    keep = {k: v for k, v in meta.items() if k in ("state_hash", "descriptor_hash")}
    return Sinogram(ThetaGrid(T), Grid1D(lo, hi, count), values, filtered=filtered, meta=keep)


def write_samples(path, samples: SampleSet) -> None:
    with open(path, "w") as fh:
        fh.write(f"# seed={samples.seed} n={len(samples)} state_hash={samples.state_hash}\n")
        fh.write("theta,x\n")
        _write_rows(fh, samples.pairs)


def read_samples(path) -> SampleSet:
    lines = Path(path).read_text().splitlines()
    head = dict(kv.split("=", 1) for kv in lines[0].lstrip("# ").split())
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[2:] if ln.strip()])
    data = data.reshape(-1, 2)
    return SampleSet(data[:, 0], data[:, 1], int(head["seed"]), head.get("state_hash", ""))


def write_grid_function(path, f: GridFunction2D, kind: str, **meta) -> list[Path]:
    """Row-major CSV (rows follow ``x``); complex data is split into ``_re``/``_im`` files."""
    path = Path(path)
    written = []
    if np.iscomplexobj(f.values):
        for suffix, part in (("_re", f.values.real), ("_im", f.values.imag)):
            p = path.with_name(path.stem + suffix + path.suffix)
            with open(p, "w") as fh:
                _write_rows(fh, part)
            written.append(p)
    else:
        with open(path, "w") as fh:
            _write_rows(fh, f.values)
        written.append(path)
    _dump_json(sidecar_path(path), {"kind": kind, "grid": f.grid.to_dict(), **meta})
    return written


def read_grid_function(path) -> GridFunction2D:
    path = Path(path)
    side = sidecar_path(path)
    if not side.exists():
        raise InvalidArgumentError(f"{path}: missing metadata sidecar {side.name}")
    meta = read_json(side)
    grid = Grid2D.from_dict(meta["grid"])

    def load(p):
        try:
            return np.loadtxt(p, delimiter=",", ndmin=2)
        except (OSError, ValueError) as exc:
            raise InvalidArgumentError(f"{p}: {exc}") from exc

    if path.exists():
        values = load(path)
    else:
        re_p = path.with_name(path.stem + "_re" + path.suffix)
        im_p = path.with_name(path.stem + "_im" + path.suffix)
        values = load(re_p) + 1j * load(im_p)
    return GridFunction2D(grid, values)


def write_report(path, report: dict) -> None:
    _dump_json(path, report)
