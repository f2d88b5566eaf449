"""Exact continuous-time simulation of the genotype process on a lattice."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from meiodrive import _kernels
from meiodrive.lattice import FROZEN, Lattice
from meiodrive.model import Genotype, RateSet, pair_alleles
from meiodrive.rng import RandomStream, stream_seed


class FrozenState(Exception):
    """Raised by gillespie_step when the total rate is zero."""


@dataclass
class EventRecord:
    t: float
    site: int
    old: Genotype
    new: Genotype


class LatticeState:
    """Genotype-per-site configuration plus clock and RNG stream position.

    Confined to one thread; same (seed, lattice, rates, initial condition)
    always reproduces the same event sequence under the same call pattern.
    """

    def __init__(self, lattice: Lattice, rates: RateSet,
                 genotypes: np.ndarray, seed: int, t: float = 0.0,
                 rng_pos: int = 0):
        genotypes = np.ascontiguousarray(genotypes, dtype=np.int8).reshape(-1)
        if genotypes.shape[0] != lattice.n_sites:
            raise ValueError("genotype array does not match the lattice")
        if genotypes.min() < 0 or genotypes.max() > 2:
            raise ValueError("genotype codes must be 0 (AA), 1 (AB) or 2 (BB)")
        self.lattice = lattice
        self.rates = rates
        self.geno = genotypes
        self.seed = int(seed)
        self.rng_pos = int(rng_pos)
        self.t = float(t)
        self.frozen = False
        self._nbr = lattice.neighbor_table()
        self._ext = lattice.exterior_codes()

    def genotype(self, site: int) -> Genotype:
        return Genotype(int(self.geno[site]))

    def neighbor_counts(self, site: int) -> tuple[int, int, int]:
        if not 0 <= site < self.lattice.n_sites:
            raise IndexError(f"site {site} out of range")
        row = self._nbr[site]
        counts = [0, 0, 0]
        for j in row:
            g = int(self._ext[-j - 1]) if j < 0 else int(self.geno[j])
            counts[g] += 1
        return tuple(counts)

    def grid(self) -> np.ndarray:
        return self.geno.reshape(self.lattice.sides)

    def copy(self) -> "LatticeState":
        return LatticeState(self.lattice, self.rates, self.geno.copy(),
                            self.seed, self.t, self.rng_pos)


def site_transition_rates(state: LatticeState, site: int):
    """Per-target transition rates of one site (zero-rate targets omitted)."""
    from meiodrive.model import transition_rates
    n_aa, n_ab, n_bb = state.neighbor_counts(site)
    return transition_rates(state.genotype(site), n_aa, n_ab, n_bb,
                            state.rates)


def gillespie_step(state: LatticeState) -> EventRecord:
    """Advance the state by exactly one event; raises FrozenState if none."""
    ev = np.zeros(4)
    paa, pab, pba, pbb = state.rates.as_tuple()
    t, pos, status, n_ev = _kernels.advance_genotype(
        state.geno, state._nbr, state._ext, paa, pab, pba, pbb,
        state.t, np.inf, np.uint64(state.seed), state.rng_pos, 1, ev)
    state.rng_pos = pos
    if status == _kernels.FROZEN or n_ev == 0:
        state.frozen = True
        raise FrozenState("total transition rate is zero")
    state.t = t
    return EventRecord(t=ev[0], site=int(ev[1]),
                       old=Genotype(int(ev[2])), new=Genotype(int(ev[3])))


def _advance_to(state: LatticeState, t_target: float) -> None:
    if state.frozen:
        state.t = t_target
        return
    ev = np.zeros(4)
    paa, pab, pba, pbb = state.rates.as_tuple()
    t, pos, status, _ = _kernels.advance_genotype(
        state.geno, state._nbr, state._ext, paa, pab, pba, pbb,
        state.t, t_target, np.uint64(state.seed), state.rng_pos, 0, ev)
    state.rng_pos = pos
    if status == _kernels.FROZEN:
        state.frozen = True
        state.t = t_target
    else:
        state.t = t


class ObservableSeries:
    """Timestamped measurement records with named columns."""

    def __init__(self, columns: Sequence[str]):
        self.columns = list(columns)
        self._rows: list[list[float]] = []

    def append(self, time: float, values: Sequence[float]) -> None:
        if len(values) != len(self.columns):
            raise ValueError("row width does not match columns")
        self._rows.append([float(time)] + [float(v) for v in values])

    @property
    def times(self) -> np.ndarray:
        return np.array([r[0] for r in self._rows])

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name) + 1
        return np.array([r[i] for r in self._rows])

    def rows(self) -> list[list[float]]:
        return [list(r) for r in self._rows]

    def __len__(self) -> int:
        return len(self._rows)


def default_observers(state: LatticeState) -> dict[str, float]:
    n = state.lattice.n_sites
    counts = np.bincount(state.geno, minlength=3)
    return {"u_aa": counts[0] / n, "u_ab": counts[1] / n,
            "u_bb": counts[2] / n}


def run_until(state: LatticeState, t_end: float,
              sample_interval: float = 1.0,
              sample_times: Optional[Iterable[float]] = None,
              observers: Optional[Callable[[LatticeState], dict]] = None,
              on_sample: Optional[Callable[[LatticeState], None]] = None,
              ) -> ObservableSeries:
    """Run to t_end, sampling observables on a schedule.

    Once the configuration freezes, remaining samples read the frozen state.
    """
    if t_end < state.t:
        raise ValueError("t_end is before the current time")
    if sample_times is None:
        n = int(np.floor((t_end - state.t) / sample_interval + 1e-9))
        times = [state.t + k * sample_interval for k in range(n + 1)]
        if times[-1] < t_end - 1e-12:
            times.append(t_end)
    else:
        times = sorted(float(s) for s in sample_times)
        if any(s < state.t or s > t_end for s in times):
            raise ValueError("sample times outside [t, t_end]")
    obs = observers if observers is not None else default_observers

    first = obs(state)
    series = ObservableSeries(list(first.keys()))
    for s in times:
        if s > state.t:
            _advance_to(state, s)
        vals = obs(state)
        series.append(s, [vals[c] for c in series.columns])
        if on_sample is not None:
            on_sample(state)
    if t_end > state.t:
        _advance_to(state, t_end)
    return series


def initial_condition(kind: str, lattice: Lattice, seed: int,
                      rates: RateSet, *,
                      genotype: Genotype = Genotype.AA,
                      p: float = 0.5,
                      cube_halfwidth: int = 0,
                      site: Optional[int] = None,
                      fill: Genotype = Genotype.BB,
                      rng_index: int = 0) -> LatticeState:
    """Build a LatticeState from a named initial condition.

    kinds: "all" (everything `genotype`), "bernoulli_genes" (each of the two
    gene slots independently A with probability p), "half_line_aa" (first
    axis <= midpoint is AA, rest `fill`), "cube_aa" (central cube of
    half-width N is AA, rest `fill`), "single" (`genotype` at `site`, rest
    `fill`).
    """
    n = lattice.n_sites
    stream = RandomStream(stream_seed(seed, rng_index))
    if kind == "all":
        geno = np.full(n, int(genotype), dtype=np.int8)
    elif kind == "bernoulli_genes":
        u = stream.u01_array(2 * n).reshape(n, 2)
        alleles = (u >= p).astype(np.int8)  # 0 = A with prob p
        geno = (alleles[:, 0] + alleles[:, 1]).astype(np.int8)
    elif kind == "half_line_aa":
        geno = np.full(n, int(fill), dtype=np.int8)
        grid = geno.reshape(lattice.sides)
        half = lattice.sides[0] // 2
        grid[:half] = int(Genotype.AA)
    elif kind == "cube_aa":
        if any(2 * cube_halfwidth + 1 > s for s in lattice.sides):
            raise ValueError("cube does not fit in the lattice")
        geno = np.full(n, int(fill), dtype=np.int8)
        grid = geno.reshape(lattice.sides)
        sel = tuple(slice(s // 2 - cube_halfwidth, s // 2 + cube_halfwidth + 1)
                    for s in lattice.sides)
        grid[sel] = int(Genotype.AA)
    elif kind == "single":
        if site is None:
            site = n // 2
        geno = np.full(n, int(fill), dtype=np.int8)
        geno[site] = int(genotype)
    else:
        raise ValueError(f"unknown initial condition {kind!r}")
    # kernel draws continue after any draws spent building the configuration
    return LatticeState(lattice, rates, geno, stream.seed, t=0.0,
                        rng_pos=stream.pos)
