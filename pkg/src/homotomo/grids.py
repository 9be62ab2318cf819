"""Uniform grids, quadrature weights and gridded function containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "Grid1D",
    "Grid2D",
    "ThetaGrid",
    "GridFunction2D",
    "trapezoid_weights",
    "DEFAULT_WINDOW",
    "DEFAULT_COUNT",
    "DEFAULT_THETA_COUNT",
]

DEFAULT_WINDOW = 8.0
DEFAULT_COUNT = 512
DEFAULT_THETA_COUNT = 360


@dataclass(frozen=True)
class Grid1D:
    """Closed uniform grid ``lo, lo + h, ..., hi`` with ``count`` points."""

    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)) or not self.lo < self.hi:
            raise InvalidArgumentError(f"need finite lo < hi, got [{self.lo}, {self.hi}]")
        if int(self.count) != self.count or self.count < 2:
            raise InvalidArgumentError(f"need count >= 2, got {self.count}")
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        object.__setattr__(self, "count", int(self.count))

    @classmethod
    def symmetric(cls, half_width: float = DEFAULT_WINDOW, count: int = DEFAULT_COUNT) -> Grid1D:
        return cls(-half_width, half_width, count)

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.count - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)

    @property
    def weights(self) -> np.ndarray:
        return trapezoid_weights(self.count, self.step)

    def integrate(self, values: np.ndarray, axis: int = -1) -> np.ndarray:
        """Trapezoid rule along ``axis``."""
        values = np.asarray(values)
        return np.tensordot(np.moveaxis(values, axis, -1), self.weights, axes=([-1], [0]))

    def is_symmetric(self) -> bool:
        return self.lo == -self.hi

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "count": self.count}

    @classmethod
    def from_dict(cls, d: dict) -> Grid1D:
        return cls(d["lo"], d["hi"], d["count"])


@dataclass(frozen=True)
class ThetaGrid:
    """Half-open uniform partition of [0, 2*pi): ``theta_k = 2*pi*k/count``.

    Periodic trapezoid weights are all equal; ``weights`` sums to one so that
    integrating against it gives the normalized ``dtheta / 2pi`` average.
    """

    count: int = DEFAULT_THETA_COUNT

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 2:
            raise InvalidArgumentError(f"need theta count >= 2, got {self.count}")
        object.__setattr__(self, "count", int(self.count))

    @property
    def step(self) -> float:
        return 2 * np.pi / self.count

    @property
    def points(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.count) / self.count

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.count, 1.0 / self.count)

    def to_dict(self) -> dict:
        return {"count": self.count}

    @classmethod
    def from_dict(cls, d: dict) -> ThetaGrid:
        return cls(d["count"])


@dataclass(frozen=True)
class Grid2D:
    """Product of two ``Grid1D``; arrays on it have shape ``(x.count, y.count)``."""

    x: Grid1D
    y: Grid1D

    @classmethod
    def square(cls, half_width: float = DEFAULT_WINDOW, count: int = DEFAULT_COUNT) -> Grid2D:
        g = Grid1D.symmetric(half_width, count)
        return cls(g, g)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.x.count, self.y.count)

    @property
    def is_square(self) -> bool:
        return self.x == self.y

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x.points, self.y.points, indexing="ij")

    @property
    def weights(self) -> np.ndarray:
        return np.outer(self.x.weights, self.y.weights)

    def integrate(self, values: np.ndarray) -> complex | float:
        return np.sum(values * self.weights)

    def to_dict(self) -> dict:
        return {"x": self.x.to_dict(), "y": self.y.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> Grid2D:
        return cls(Grid1D.from_dict(d["x"]), Grid1D.from_dict(d["y"]))


@dataclass(frozen=True)
class GridFunction2D:
    grid: Grid2D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.shape != self.grid.shape:
            raise InvalidArgumentError(
                f"values shape {values.shape} does not match grid {self.grid.shape}"
            )
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def integrate(self):
        return self.grid.integrate(self.values)

    def interpolate(self, x, y) -> np.ndarray:
        """Bilinear interpolation at points ``(x, y)``; points must lie in the grid."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        gx, gy = self.grid.x, self.grid.y
        tol = 1e-12
        if (
            np.any(x < gx.lo - tol) or np.any(x > gx.hi + tol)
            or np.any(y < gy.lo - tol) or np.any(y > gy.hi + tol)
        ):
            raise InvalidArgumentError("interpolation points outside the grid")
        fx = np.clip((x - gx.lo) / gx.step, 0, gx.count - 1)
        fy = np.clip((y - gy.lo) / gy.step, 0, gy.count - 1)
        ix = np.minimum(np.floor(fx).astype(int), gx.count - 2)
        iy = np.minimum(np.floor(fy).astype(int), gy.count - 2)
        sx = fx - ix
        sy = fy - iy
        v = self.values
        return (
            (1 - sx) * (1 - sy) * v[ix, iy]
            + sx * (1 - sy) * v[ix + 1, iy]
            + (1 - sx) * sy * v[ix, iy + 1]
            + sx * sy * v[ix + 1, iy + 1]
        )


def trapezoid_weights(count: int, step: float) -> np.ndarray:
    w = np.full(count, step)
    w[0] = w[-1] = step / 2
    return w
