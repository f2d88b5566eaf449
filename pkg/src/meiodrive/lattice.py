"""Finite lattice geometry with torus or frozen-exterior boundaries."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from meiodrive.model import Genotype

TORUS = "torus"
FROZEN = "frozen"


@dataclass(frozen=True)
class Lattice:
    """d-dimensional box of sites with von Neumann (2d) neighborhoods.

    boundary "torus" wraps every axis; boundary "frozen" exposes a fixed
    exterior genotype at every out-of-range neighbor (the exterior never
    changes).  The exterior is one genotype for the whole boundary, or a
    tuple of 2d genotypes, one per face in (axis 0 low, axis 0 high,
    axis 1 low, ...) order, so a window can emulate e.g. a half-line
    embedded in two different homogeneous backgrounds.
    """

    sides: tuple[int, ...]
    boundary: str = TORUS
    exterior: Optional[object] = None

    def __post_init__(self):
        if len(self.sides) < 1:
            raise ValueError("lattice needs at least one axis")
        if self.boundary == TORUS:
            if any(s < 3 for s in self.sides):
                raise ValueError("torus sides must be >= 3 to keep the 2d "
                                 "neighbors distinct")
            if self.exterior is not None:
                raise ValueError("torus boundary has no exterior genotype")
        elif self.boundary == FROZEN:
            if any(s < 1 for s in self.sides):
                raise ValueError("sides must be >= 1")
            if self.exterior is None:
                raise ValueError("frozen boundary requires an exterior genotype")
            if isinstance(self.exterior, (tuple, list)):
                if len(self.exterior) != 2 * len(self.sides):
                    raise ValueError("per-face exterior needs 2d entries")
                object.__setattr__(self, "exterior",
                                   tuple(Genotype(g) for g in self.exterior))
            else:
                object.__setattr__(self, "exterior", Genotype(self.exterior))
        else:
            raise ValueError(f"unknown boundary mode {self.boundary!r}")
        object.__setattr__(self, "sides", tuple(int(s) for s in self.sides))

    @property
    def d(self) -> int:
        return len(self.sides)

    @property
    def n_sites(self) -> int:
        return int(np.prod(self.sides))

    def index(self, coords) -> int:
        idx = 0
        for c, s in zip(coords, self.sides):
            if not 0 <= c < s:
                raise IndexError(f"coordinate {coords} out of range {self.sides}")
            idx = idx * s + int(c)
        return idx

    def coords(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.n_sites:
            raise IndexError(f"site index {index} out of range")
        out = []
        for s in reversed(self.sides):
            out.append(index % s)
            index //= s
        return tuple(reversed(out))

    def neighbor_table(self) -> np.ndarray:
        """(n_sites, 2d) int64 array of neighbor indices.

        Negative entries mark exterior neighbors: column ``col`` (face
        ``col``) stores ``-(col + 1)``, so ``-(v + 1)`` recovers the face
        of a negative value ``v``.
        """
        d = self.d
        n = self.n_sites
        shape = self.sides
        tbl = np.empty((n, 2 * d), dtype=np.int64)
        grid = np.arange(n).reshape(shape)
        col = 0
        for axis in range(d):
            for step in (-1, +1):
                if self.boundary == TORUS:
                    tbl[:, col] = np.roll(grid, -step, axis=axis).reshape(-1)
                else:
                    shifted = np.full(shape, -(col + 1), dtype=np.int64)
                    src = [slice(None)] * d
                    dst = [slice(None)] * d
                    if step == +1:
                        dst[axis] = slice(0, shape[axis] - 1)
                        src[axis] = slice(1, shape[axis])
                    else:
                        dst[axis] = slice(1, shape[axis])
                        src[axis] = slice(0, shape[axis] - 1)
                    shifted[tuple(dst)] = grid[tuple(src)]
                    tbl[:, col] = shifted.reshape(-1)
                col += 1
        return tbl

    def exterior_codes(self) -> np.ndarray:
        """Per-face exterior genotype codes for the kernels (length 2d;
        all zeros on a torus, where they are never consulted)."""
        if self.exterior is None:
            return np.zeros(2 * self.d, dtype=np.int8)
        if isinstance(self.exterior, tuple):
            return np.array([int(g) for g in self.exterior], dtype=np.int8)
        return np.full(2 * self.d, int(self.exterior), dtype=np.int8)
