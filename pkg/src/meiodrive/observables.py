"""Measured quantities: densities, edges, gaps, block occupancy, clusters.

Finite windows can violate the infinite-lattice edge/gap definitions;
such values are reported as None together with an explicit clamp flag,
never as a silent zero.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from meiodrive.engine import LatticeState
from meiodrive.genes import BinaryLatticeState
from meiodrive.lattice import Lattice
from meiodrive.meanfield import MeanFieldState
from meiodrive.model import Genotype

ABP_VIEW = "abp_view"
GENOTYPE_VIEW = "genotype_view"


def densities(state: LatticeState) -> MeanFieldState:
    """Empirical genotype fractions (exact integer counts over total)."""
    n = state.lattice.n_sites
    counts = np.bincount(state.geno, minlength=3)
    return MeanFieldState(counts[0] / n, counts[1] / n, counts[2] / n)


@dataclass
class EdgeRecord:
    time: float
    r_t: Optional[int] = None           # rightmost x with all sites <= x AA
    r_clamped: bool = False
    z_minus: Optional[int] = None       # maximal AA run through the origin
    z_plus: Optional[int] = None
    x_minus: Optional[int] = None       # leftmost / rightmost heterozygote
    x_plus: Optional[int] = None


@dataclass
class GapRecord:
    time: float
    g_t: Optional[int] = None           # gap behind the right edge (ABP view)
    k_t: Optional[int] = None           # s_t - r_t - 1 (genotype view)
    g_is_zero: Optional[bool] = None
    k_class: Optional[str] = None       # "0" | "1" | ">=2"


def _origin(lattice: Lattice) -> int:
    # window coordinate origin: the center site of the first axis
    return lattice.sides[0] // 2


def edges_and_gaps(state, mode: str) -> tuple[EdgeRecord, GapRecord]:
    """Scan a one-dimensional configuration for edge and gap statistics.

    Site i carries window coordinate i - origin with the origin at the
    center, matching the half-line and single-seed initial conditions.
    """
    if mode == ABP_VIEW:
        if isinstance(state, BinaryLatticeState):
            bits = state.bits
            lattice, t = state.lattice, state.t
        else:
            bits = (state.geno == int(Genotype.AB)).astype(np.int8)
            lattice, t = state.lattice, state.t
    elif mode == GENOTYPE_VIEW:
        if isinstance(state, BinaryLatticeState):
            raise ValueError("genotype view requires a genotype state")
        bits = None
        lattice, t = state.lattice, state.t
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if lattice.d != 1:
        raise ValueError("edge/gap records are defined for d = 1 only")
    n = lattice.n_sites
    o = _origin(lattice)
    edge = EdgeRecord(time=t)
    gap = GapRecord(time=t)

    if mode == ABP_VIEW:
        ones = np.flatnonzero(bits)
        if len(ones) > 0:
            edge.x_minus = int(ones[0]) - o
            edge.x_plus = int(ones[-1]) - o
        if len(ones) >= 2:
            gap.g_t = int(ones[-1] - ones[-2] - 1)
            gap.g_is_zero = gap.g_t == 0
        return edge, gap

    geno = state.geno
    # r_t: largest x such that everything at or left of x is AA
    not_aa = np.flatnonzero(geno != int(Genotype.AA))
    if len(not_aa) == 0:
        edge.r_t = (n - 1) - o
        edge.r_clamped = True
    else:
        edge.r_t = int(not_aa[0]) - 1 - o  # may be -o - 1 (nothing AA at left)
    # maximal AA run through the origin
    if geno[o] == int(Genotype.AA):
        i = o
        while i - 1 >= 0 and geno[i - 1] == int(Genotype.AA):
            i -= 1
        j = o
        while j + 1 < n and geno[j + 1] == int(Genotype.AA):
            j += 1
        edge.z_minus = i - o
        edge.z_plus = j - o
    # K_t: distance from the aa edge to the next bb site
    r_idx = edge.r_t + o
    bb = np.flatnonzero(geno[r_idx + 1:] == int(Genotype.BB))
    if len(bb) > 0:
        s_idx = r_idx + 1 + int(bb[0])
        gap.k_t = s_idx - r_idx - 1
        gap.k_class = "0" if gap.k_t == 0 else ("1" if gap.k_t == 1 else ">=2")
    return edge, gap


@dataclass
class BlockGrid:
    """Occupancy of space-time blocks on the even sublattice {(z, n)}."""

    half_width: int        # N
    time_step: float       # T
    z_values: np.ndarray
    n_values: np.ndarray
    occupied: np.ndarray   # (len(n_values), len(z_values)) bool

    def at(self, z: int, n: int) -> bool:
        zi = int(np.where(self.z_values == z)[0][0])
        ni = int(np.where(self.n_values == n)[0][0])
        return bool(self.occupied[ni, zi])


def block_occupancy(snapshots: Sequence[np.ndarray], lattice: Lattice,
                    half_width: int, time_step: float) -> BlockGrid:
    """Block (z, n) is occupied iff some site of the cube centered at
    z * N on the first axis (cube side N/2) holds a 1 at time n * T.

    ``snapshots`` are heterozygote-indicator arrays at times 0, T, 2T, ...
    """
    N = int(half_width)
    if any(s < 3 * N for s in lattice.sides):
        raise ValueError("lattice must be at least 3N on every axis")
    o = np.array([s // 2 for s in lattice.sides])
    z_max = 0
    while True:
        lo = o[0] + (z_max + 1) * N - N // 4
        hi = o[0] + (z_max + 1) * N + (N + 3) // 4
        if lo < 0 or hi > lattice.sides[0]:
            break
        z_max += 1
    z_values = np.arange(-z_max, z_max + 1)
    n_values = np.arange(len(snapshots))
    occ = np.zeros((len(n_values), len(z_values)), dtype=bool)
    for ni in n_values:
        grid = np.asarray(snapshots[ni]).reshape(lattice.sides)
        for zi, z in enumerate(z_values):
            if (z + ni) % 2 != 0:
                continue
            sel = [slice(o[ax] - N // 4, o[ax] + (N + 3) // 4)
                   for ax in range(lattice.d)]
            sel[0] = slice(o[0] + z * N - N // 4, o[0] + z * N + (N + 3) // 4)
            occ[ni, zi] = bool(grid[tuple(sel)].any())
    return BlockGrid(N, time_step, z_values, n_values, occ)


def propagation_frequency(grids: Sequence[BlockGrid]) -> float:
    """Fraction of replicates where occupancy at (0,0) propagates to both
    (-1,1) and (+1,1)."""
    hits = 0
    tried = 0
    for g in grids:
        if g.at(0, 0):
            tried += 1
            if g.at(-1, 1) and g.at(1, 1):
                hits += 1
    return hits / tried if tried else float("nan")


def mean_cluster_size(geno: np.ndarray, lattice: Lattice) -> float:
    """Mean size of maximal same-genotype connected components
    (von Neumann adjacency, honoring the boundary mode)."""
    flat = np.asarray(geno, dtype=np.int8).reshape(-1)
    nbr = lattice.neighbor_table()
    n = lattice.n_sites
    seen = np.zeros(n, dtype=bool)
    sizes = []
    for start in range(n):
        if seen[start]:
            continue
        g = flat[start]
        size = 0
        stack = [start]
        seen[start] = True
        while stack:
            i = stack.pop()
            size += 1
            for j in nbr[i]:
                if j >= 0 and not seen[j] and flat[j] == g:
                    seen[j] = True
                    stack.append(j)
        sizes.append(size)
    return float(np.mean(sizes))


def cluster_size_series(snapshots: Sequence[np.ndarray],
                        lattice: Lattice) -> list[float]:
    return [mean_cluster_size(s, lattice) for s in snapshots]
