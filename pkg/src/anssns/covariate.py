"""Spatial covariates: coordinate/constant built-ins and gridded rasters.

Rasters use nearest-cell (piecewise constant) lookup. The text format is
one header line ``nx ny x0 y0 dx dy`` followed by nx*ny whitespace-separated
values, row-major with rows ordered from y0 upward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .geometry import Window

__all__ = [
    "Covariate",
    "CoordinateX",
    "CoordinateY",
    "Constant",
    "Raster",
    "load_raster",
    "save_raster",
    "parse_covariate",
]


class Covariate:
    """A real-valued field Z(u) evaluable anywhere the model needs it."""

    name = "covariate"

    def values(self, x, y) -> np.ndarray:
        raise NotImplementedError

    def covers(self, window: Window) -> bool:
        """True when the covariate is defined on all of ``window``."""
        raise NotImplementedError

    def spec_string(self) -> str:
        """Round-trippable CLI/config syntax for this covariate."""
        raise NotImplementedError


@dataclass(frozen=True)
class CoordinateX(Covariate):
    name: str = "x"

    def values(self, x, y):
        return np.asarray(x, dtype=float) + np.zeros_like(np.asarray(y, dtype=float))

    def covers(self, window):
        return True

    def spec_string(self):
        return "x"


@dataclass(frozen=True)
class CoordinateY(Covariate):
    name: str = "y"

    def values(self, x, y):
        return np.asarray(y, dtype=float) + np.zeros_like(np.asarray(x, dtype=float))

    def covers(self, window):
        return True

    def spec_string(self):
        return "y"


@dataclass(frozen=True)
class Constant(Covariate):
    value: float
    name: str = "const"

    def values(self, x, y):
        return np.full(np.broadcast(np.asarray(x), np.asarray(y)).shape, float(self.value))

    def covers(self, window):
        return True

    def spec_string(self):
        return f"const:{self.value!r}"


@dataclass(frozen=True)
class Raster(Covariate):
    """Gridded covariate with nearest-cell lookup.

    ``grid`` has shape (ny, nx); row iy holds the cells with
    y in [y0 + iy*dy, y0 + (iy+1)*dy).
    """

    x0: float
    y0: float
    dx: float
    dy: float
    grid: np.ndarray = field(repr=False)
    name: str = "raster"
    path: str | None = None

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        object.__setattr__(self, "grid", g)
        if g.ndim != 2 or g.size == 0:
            raise ConfigurationError(f"raster '{self.name}': grid must be 2-d and nonempty")
        if not (self.dx > 0 and self.dy > 0):
            raise ConfigurationError(f"raster '{self.name}': cell sizes must be positive")
        if not np.all(np.isfinite(g)):
            raise ConfigurationError(f"raster '{self.name}': non-finite values")

    @property
    def ny(self) -> int:
        return self.grid.shape[0]

    @property
    def nx(self) -> int:
        return self.grid.shape[1]

    @property
    def extent(self) -> Window:
        return Window(
            self.x0, self.x0 + self.nx * self.dx, self.y0, self.y0 + self.ny * self.dy
        )

    def values(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        ext = self.extent
        inside = ext.contains(x, y)
        if not np.all(inside):
            bad = np.argwhere(~np.atleast_1d(inside))
            xb = np.atleast_1d(x)[tuple(bad[0])] if np.ndim(x) else x
            yb = np.atleast_1d(y)[tuple(bad[0])] if np.ndim(y) else y
            raise ValueError(
                f"covariate '{self.name}': point ({xb}, {yb}) outside raster extent "
                f"[{ext.x_min}, {ext.x_max}] x [{ext.y_min}, {ext.y_max}]"
            )
        ix = np.clip(np.floor((x - self.x0) / self.dx).astype(int), 0, self.nx - 1)
        iy = np.clip(np.floor((y - self.y0) / self.dy).astype(int), 0, self.ny - 1)
        return self.grid[iy, ix]

    def covers(self, window):
        return self.extent.contains_window(window)

    def spec_string(self):
        if self.path is None:
            raise ConfigurationError(f"raster '{self.name}' has no backing file to reference")
        return f"raster:{self.path}"


def load_raster(path: str, name: str | None = None) -> Raster:
    """Read a raster covariate from the plain-text format."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ConfigurationError(f"{path}:1: empty raster file")
    header = lines[0].split()
    if len(header) != 6:
        raise ConfigurationError(
            f"{path}:1: header must be 'nx ny x0 y0 dx dy', got {len(header)} fields"
        )
    try:
        nx, ny = int(header[0]), int(header[1])
        x0, y0, dx, dy = (float(v) for v in header[2:])
    except ValueError as exc:
        raise ConfigurationError(f"{path}:1: malformed header: {exc}") from exc
    if nx < 1 or ny < 1:
        raise ConfigurationError(f"{path}:1: grid dimensions must be >= 1")
    values: list[float] = []
    for lineno, line in enumerate(lines[1:], start=2):
        for tok in line.split():
            try:
                v = float(tok)
            except ValueError as exc:
                raise ConfigurationError(f"{path}:{lineno}: bad value {tok!r}") from exc
            if not math.isfinite(v):
                raise ConfigurationError(f"{path}:{lineno}: non-finite value {tok!r}")
            values.append(v)
    if len(values) != nx * ny:
        raise ConfigurationError(
            f"{path}:{len(lines)}: expected {nx * ny} values for a {nx}x{ny} grid, "
            f"got {len(values)}"
        )
    grid = np.array(values, dtype=float).reshape(ny, nx)
    return Raster(x0=x0, y0=y0, dx=dx, dy=dy, grid=grid, name=name or path, path=path)


def save_raster(cov: Raster, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(
            f"{cov.nx} {cov.ny} {float(cov.x0)!r} {float(cov.y0)!r} "
            f"{float(cov.dx)!r} {float(cov.dy)!r}\n"
        )
        for row in cov.grid:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def parse_covariate(text: str, name: str | None = None) -> Covariate:
    """Parse the CLI/config covariate syntax: x | y | const:<v> | raster:<path>."""
    text = text.strip()
    if text == "x":
        return CoordinateX()
    if text == "y":
        return CoordinateY()
    if text.startswith("const:"):
        try:
            return Constant(float(text[len("const:"):]), name=name or text)
        except ValueError as exc:
            raise ConfigurationError(f"bad constant covariate {text!r}") from exc
    if text.startswith("raster:"):
        return load_raster(text[len("raster:"):], name=name)
    raise ConfigurationError(
        f"unknown covariate spec {text!r} (expected x, y, const:<v> or raster:<path>)"
    )
