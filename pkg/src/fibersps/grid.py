"""Uniform Yee grid description.

Field staggering convention (cell index i,j,k; spacing h):

    Ex at (i+1/2, j,     k    )      Hx at (i,     j+1/2, k+1/2)
    Ey at (i,     j+1/2, k    )      Hy at (i+1/2, j,     k+1/2)
    Ez at (i,     j,     k+1/2)      Hz at (i+1/2, j+1/2, k    )

All six arrays share the shape ``extent``; staggered positions are
implicit.  Physical position of cell (0,0,0) corner is ``origin``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# fractional offsets of each component within a cell, in units of h
E_OFFSETS = {"x": (0.5, 0.0, 0.0), "y": (0.0, 0.5, 0.0), "z": (0.0, 0.0, 0.5)}
H_OFFSETS = {"x": (0.0, 0.5, 0.5), "y": (0.5, 0.0, 0.5), "z": (0.5, 0.5, 0.0)}


@dataclass(frozen=True)
class YeeGrid:
    """Uniform cubic-cell grid: ``extent`` cells per axis, ``resolution``
    nm per cell, ``origin`` = physical nm coordinates of cell (0,0,0)."""

    extent: tuple[int, int, int]
    resolution: float
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if any(n < 20 for n in self.extent):
            raise ValueError(f"grid extent must be >= 20 cells per axis, got {self.extent}")
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")

    @property
    def shape(self) -> tuple[int, int, int]:
        return tuple(self.extent)

    @property
    def size_nm(self) -> tuple[float, float, float]:
        return tuple(n * self.resolution for n in self.extent)

    @property
    def upper(self) -> tuple[float, float, float]:
        return tuple(o + s for o, s in zip(self.origin, self.size_nm))

    def axis_coords(self, axis: int, offset: float = 0.0) -> np.ndarray:
        """Physical coordinates along one axis at fractional cell offset."""
        n = self.extent[axis]
        return self.origin[axis] + (np.arange(n) + offset) * self.resolution

    def component_coords(self, field: str, comp: str):
        """Coordinate arrays (x, y, z) of every sample of one component.

        field is 'E' or 'H', comp one of 'x','y','z'.  Returned arrays are
        1D per axis; broadcasting against the field array gives positions.
        """
        off = (E_OFFSETS if field == "E" else H_OFFSETS)[comp]
        return tuple(self.axis_coords(a, off[a]) for a in range(3))

    def index_of(self, point) -> tuple[int, int, int]:
        """Cell index containing a physical point (floor convention)."""
        return tuple(
            int(math.floor((point[a] - self.origin[a]) / self.resolution)) for a in range(3)
        )

    def contains(self, point, margin_cells: int = 0) -> bool:
        m = margin_cells * self.resolution
        return all(
            self.origin[a] + m <= point[a] <= self.upper[a] - m for a in range(3)
        )


def courant_dt(grid: YeeGrid, safety: float = 1.0) -> float:
    """Largest stable time step (internal nm units) scaled by ``safety``.

    3D bound for a cubic Yee cell: dt <= h / (c sqrt(3)); c = 1 here.
    Divide by C_NM_PER_FS for fs.
    """
    if not 0.0 < safety <= 1.0:
        raise ValueError("safety must be in (0, 1]")
    return safety * grid.resolution / math.sqrt(3.0)
