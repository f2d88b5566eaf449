"""Self-verification suite: one callable per release criterion.

Every criterion uses a fixed master seed so results are reproducible; the
CLI ``verify`` command and the test suite both run these functions.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from meiodrive import bounds, meanfield, observables
from meiodrive.engine import initial_condition, run_until
from meiodrive.genes import (GeneLatticeState, genotype_gene_equivalence_check,
                             run_coupled)
from meiodrive.lattice import FROZEN, TORUS, Lattice
from meiodrive.meanfield import MeanFieldState, integrate
from meiodrive.model import Genotype, RateSet
from meiodrive.rng import RandomStream, stream_seed

MASTER_SEED = 2468013579


@dataclass
class CriterionResult:
    index: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] criterion {self.index:2d} {self.name}: "
                f"{self.detail} ({self.seconds:.1f} s)")


def _random_interior(stream: RandomStream) -> MeanFieldState:
    w = np.array([stream.u01() + 0.05 for _ in range(3)])
    w /= w.sum()
    return MeanFieldState.from_array(w)


def criterion_1() -> CriterionResult:
    """Coexistence dynamics: global convergence to the interior point."""
    t0 = time.perf_counter()
    rates = RateSet(1.0, 4.0, 3.0, 2.0)
    target = np.array([0.25, 0.5, 0.25])
    stream = RandomStream(stream_seed(MASTER_SEED, 1))
    worst = 0.0
    for _ in range(10):
        traj = integrate(_random_interior(stream), rates, 200.0)
        worst = max(worst, np.abs(traj.final().as_array() - target).max())
    phi1, phi2 = meanfield.interior_eigenvalues(rates)
    ok = worst <= 1e-6 and abs(phi1 - (-16.0)) < 1e-12 and phi2 < 0
    detail = (f"max final deviation {worst:.2e}, eigenvalues "
              f"({phi1:g}, {phi2:g})")
    return CriterionResult(1, "mean-field coexistence", ok, detail,
                           time.perf_counter() - t0)


def criterion_2() -> CriterionResult:
    """Founder control: unstable interior point, bistable corners."""
    t0 = time.perf_counter()
    rates = RateSet(4.0, 1.0, 2.0, 3.0)
    fp = meanfield.interior_fixed_point(rates)
    phi1, _ = meanfield.interior_eigenvalues(rates)
    d_aa = np.abs(
        integrate(MeanFieldState(0.9, 0.05, 0.05), rates, 200.0)
        .final().as_array() - np.array([1.0, 0.0, 0.0])).max()
    d_bb = np.abs(
        integrate(MeanFieldState(0.05, 0.05, 0.9), rates, 200.0)
        .final().as_array() - np.array([0.0, 0.0, 1.0])).max()
    ok = (fp is not None
          and np.abs(fp.as_array() - np.array([0.25, 0.5, 0.25])).max() < 1e-12
          and abs(phi1 - 16.0) < 1e-12
          and d_aa <= 1e-6 and d_bb <= 1e-6)
    detail = (f"interior {fp.as_array() if fp else None}, phi1={phi1:g}, "
              f"corner deviations ({d_aa:.2e}, {d_bb:.2e})")
    return CriterionResult(2, "mean-field founder control", ok, detail,
                           time.perf_counter() - t0)


def criterion_3() -> CriterionResult:
    """Simplex conservation and invariance of the squared-het curve."""
    t0 = time.perf_counter()
    stream = RandomStream(stream_seed(MASTER_SEED, 3))
    worst_sum = 0.0
    worst_hw = 0.0
    for _ in range(20):
        rates = RateSet(*(0.1 + 4.9 * stream.u01() for _ in range(4)))
        p = 0.05 + 0.9 * stream.u01()
        traj = integrate(MeanFieldState.hardy_weinberg(p), rates, 100.0,
                         sample_every=10)
        worst_sum = max(worst_sum, traj.max_defect)
        hw = max(abs(meanfield.hw_defect(MeanFieldState.from_array(u)))
                 for u in traj.states)
        worst_hw = max(worst_hw, hw)
    ok = worst_sum <= 1e-9 and worst_hw <= 1e-6
    detail = f"max simplex defect {worst_sum:.2e}, max curve defect {worst_hw:.2e}"
    return CriterionResult(3, "conservation and invariant curve", ok, detail,
                           time.perf_counter() - t0)


def criterion_4() -> CriterionResult:
    """Regime map matches the sign conditions and the gene-swap symmetry."""
    t0 = time.perf_counter()
    vals = np.linspace(0.05, 3.0, 50)
    grid = meanfield.phase_sweep(vals, vals, 1.0, 1.0)
    swap = {meanfield.GENE_A: meanfield.GENE_B,
            meanfield.GENE_B: meanfield.GENE_A,
            meanfield.COEXISTENCE: meanfield.COEXISTENCE,
            meanfield.FOUNDER_CONTROL: meanfield.FOUNDER_CONTROL,
            meanfield.DEGENERATE: meanfield.DEGENERATE}
    ok = True
    for i, paa in enumerate(vals):
        for j, pbb in enumerate(vals):
            a, b = paa - 1.0, pbb - 1.0
            if a == 0 or b == 0:
                want = meanfield.DEGENERATE
            elif a > 0 and b < 0:
                want = meanfield.GENE_A
            elif a < 0 and b > 0:
                want = meanfield.GENE_B
            elif a < 0 and b < 0:
                want = meanfield.COEXISTENCE
            else:
                want = meanfield.FOUNDER_CONTROL
            if grid[i][j] != want or grid[j][i] != swap[grid[i][j]]:
                ok = False
    return CriterionResult(4, "regime map self-consistency", ok,
                           "2500 cells checked against sign conditions "
                           "and the swap symmetry",
                           time.perf_counter() - t0)


@lru_cache(maxsize=1)
def _het_ring_runs():
    """Shared runs for the equilibrium-density and gap criteria: 20 seeded
    rings of 1000 sites with only heterozygote-homozygote flips active."""
    rates = RateSet(0.0, 1.0, 1.0, 0.0)
    lattice = Lattice((1000,), TORUS)
    densities = []
    gap_zero = []
    gap_total = []
    for rep in range(20):
        state = initial_condition("bernoulli_genes", lattice,
                                  stream_seed(MASTER_SEED, 100 + rep), rates)
        g0 = 0
        gn = 0

        def watch(st):
            nonlocal g0, gn
            if st.t >= 500.0:
                _, gap = observables.edges_and_gaps(st, observables.ABP_VIEW)
                if gap.g_t is not None:
                    gn += 1
                    if gap.g_t == 0:
                        g0 += 1

        series = run_until(state, 2000.0, sample_interval=1.0,
                           on_sample=watch)
        sel = series.times >= 500.0
        densities.append(series.column("u_ab")[sel].mean())
        gap_zero.append(g0)
        gap_total.append(gn)
    return densities, gap_zero, gap_total


def criterion_5() -> CriterionResult:
    """Half-half equilibrium of the pure heterozygote flip dynamics."""
    t0 = time.perf_counter()
    densities, _, _ = _het_ring_runs()
    hits = sum(1 for m in densities if 0.47 <= m <= 0.53)
    ok = hits >= 18
    detail = (f"{hits}/20 seeds with time-averaged density in [0.47, 0.53]; "
              f"range [{min(densities):.4f}, {max(densities):.4f}]")
    return CriterionResult(5, "flip-process equilibrium density", ok, detail,
                           time.perf_counter() - t0)


def criterion_6() -> CriterionResult:
    """Edge gap is closed at most 2/3 of the time in the long run."""
    t0 = time.perf_counter()
    _, gap_zero, gap_total = _het_ring_runs()
    frac = sum(gap_zero) / sum(gap_total)
    ok = frac <= 2.0 / 3.0 + 0.03
    detail = f"pooled fraction of closed-gap samples {frac:.4f} <= {2/3 + 0.03:.4f}"
    return CriterionResult(6, "gap occupancy bound", ok, detail,
                           time.perf_counter() - t0)


def criterion_7() -> CriterionResult:
    """Right edge of the heterozygote region spreads at speed >= 0.4."""
    t0 = time.perf_counter()
    rates = RateSet(0.0, 1.0, 1.0, 0.0)
    lattice = Lattice((6000,), FROZEN, Genotype.AA)
    speeds = []
    for rep in range(20):
        state = initial_condition("single", lattice,
                                  stream_seed(MASTER_SEED, 200 + rep), rates,
                                  genotype=Genotype.AB, fill=Genotype.AA)
        run_until(state, 2000.0, sample_times=[2000.0])
        edge, _ = observables.edges_and_gaps(state, observables.ABP_VIEW)
        speeds.append(edge.x_plus / 2000.0)
    mean = float(np.mean(speeds))
    se = float(np.std(speeds, ddof=1) / math.sqrt(len(speeds)))
    bound = bounds.edge_speed_bound_lemma36(1.0, 1.0)
    ok = mean >= bound - 3.0 * se
    detail = f"mean speed {mean:.4f} (se {se:.4f}) vs bound {bound:.4f}"
    return CriterionResult(7, "edge speed bound", ok, detail,
                           time.perf_counter() - t0)


def criterion_8() -> CriterionResult:
    """Gene/genotype equivalence and voter domination couplings."""
    t0 = time.perf_counter()
    lattice = Lattice((20,), TORUS)
    rates = RateSet(1.0, 4.0, 3.0, 2.0)
    geno0 = initial_condition("bernoulli_genes", lattice,
                              stream_seed(MASTER_SEED, 300), rates).geno
    rep_c = genotype_gene_equivalence_check(
        rates, lattice, geno0, 10.0, stream_seed(MASTER_SEED, 301))
    rep_s = genotype_gene_equivalence_check(
        rates, lattice, geno0, 2.0, stream_seed(MASTER_SEED, 302),
        n_replicates=2000)

    # domination for every sign pattern of (phi_aa - phi_ab, phi_bb - phi_ba)
    cases = [RateSet(1.0, 2.0, 1.0, 2.0), RateSet(2.0, 1.0, 2.0, 1.0),
             RateSet(1.0, 2.0, 2.0, 1.0), RateSet(2.0, 1.0, 1.0, 2.0)]
    dom_ok = True
    for ci, crates in enumerate(cases):
        for rep in range(10):
            stream = RandomStream(stream_seed(MASTER_SEED, 310 + 10 * ci + rep))
            xi0 = GeneLatticeState(
                lattice, (stream.u01_array(40) < 0.5).astype(np.int8)
                .reshape(20, 2))
            zeta0 = xi0.copy()
            run = run_coupled(lattice, crates, xi0, zeta0, 10.0,
                              stream.next_u64())
            if np.any((run.zeta[-1].alleles == 0)
                      & (run.xi[-1].alleles == 1)):
                dom_ok = False
    ok = rep_c.consistent and rep_s.consistent and dom_ok
    detail = (f"coupled exact={rep_c.exact_equal}, statistical z="
              f"{tuple(round(float(z), 2) for z in rep_s.z_scores)}, "
              f"domination={'held' if dom_ok else 'BROKEN'} over 40 runs")
    return CriterionResult(8, "exact couplings", ok, detail,
                           time.perf_counter() - t0)


def criterion_9() -> CriterionResult:
    """Hitting probability: closed form vs linear solve vs Monte Carlo."""
    t0 = time.perf_counter()
    stream = RandomStream(stream_seed(MASTER_SEED, 400))
    worst = 0.0
    for _ in range(50):
        r = 0.05 + 0.9 * stream.u01()
        k = 1 + int(stream.u01() * 20)
        params = bounds.InvasionWalkParams(r=r, l=1.0 - r, d=1)
        a = bounds.hitting_probability_closed_form(params, k)
        b = bounds.hitting_probability_linear_solve(params, k)
        worst = max(worst, abs(a - b) / max(a, 1e-300))
    params = bounds.InvasionWalkParams.from_rates(20.0, 1.0, 1)
    emp, closed = bounds.invasion_walk(params, 5, 10 ** 6,
                                       stream_seed(MASTER_SEED, 403))
    sigma = math.sqrt(closed * (1.0 - closed) / 10 ** 6)
    mc_ok = abs(emp - closed) <= 3.0 * sigma
    m, se = bounds.martingale_increment_stats(
        params, 10 ** 5, stream_seed(MASTER_SEED, 402))
    mart_ok = abs(m) <= 3.0 * se
    ok = worst <= 1e-12 and mc_ok and mart_ok
    detail = (f"max oracle mismatch {worst:.2e}; MC {emp:.5g} vs closed "
              f"{closed:.5g} (3 sigma {3 * sigma:.1e}); martingale mean "
              f"{m:.2e} (se {se:.1e})")
    return CriterionResult(9, "invasion walk", ok, detail,
                           time.perf_counter() - t0)


def criterion_10() -> CriterionResult:
    """Homozygote front from a half line advances at speed >= 7/9."""
    t0 = time.perf_counter()
    rates = RateSet(4.0, 1.0, 1.0, 1.0)
    cond = bounds.condition5_check(rates)
    bound = bounds.fixation_speed_bound(rates)
    # half line embedded in its own backgrounds: AA beyond the left wall,
    # BB beyond the right wall, so both walls are inert
    lattice = Lattice((4000,), FROZEN, (Genotype.AA, Genotype.BB))
    speeds = []
    for rep in range(20):
        state = initial_condition("half_line_aa", lattice,
                                  stream_seed(MASTER_SEED, 500 + rep), rates,
                                  fill=Genotype.BB)
        run_until(state, 1000.0, sample_times=[1000.0])
        edge, _ = observables.edges_and_gaps(state,
                                            observables.GENOTYPE_VIEW)
        speeds.append(edge.r_t / 1000.0)
    mean = float(np.mean(speeds))
    se = float(np.std(speeds, ddof=1) / math.sqrt(len(speeds)))
    ok = cond and mean >= bound - 3.0 * se
    detail = (f"condition holds={cond}; mean speed {mean:.4f} (se {se:.4f}) "
              f"vs bound {bound:.4f}")
    return CriterionResult(10, "fixation drift speed", ok, detail,
                           time.perf_counter() - t0)


def criterion_11() -> CriterionResult:
    """Dominant-allele regime absorbs into the all-AA state."""
    t0 = time.perf_counter()
    rates = RateSet(3.0, 3.0, 1.0, 1.0)
    lattice = Lattice((200,), TORUS)
    absorbed = 0
    for rep in range(10):
        state = initial_condition("half_line_aa", lattice,
                                  stream_seed(MASTER_SEED, 600 + rep), rates,
                                  fill=Genotype.BB)
        run_until(state, 2000.0, sample_times=[2000.0])
        if np.all(state.geno == int(Genotype.AA)):
            absorbed += 1
    ok = absorbed >= 9
    detail = f"{absorbed}/10 seeds fully absorbed by t=2000"
    return CriterionResult(11, "dominant-allele absorption", ok, detail,
                           time.perf_counter() - t0)


def criterion_12() -> CriterionResult:
    """Qualitative d=2 behavior: persistent heterozygotes vs coarsening."""
    t0 = time.perf_counter()
    lattice = Lattice((200, 200), TORUS)

    rates_l = RateSet(4.0, 5.0, 5.0, 4.0)
    het_hits = 0
    for rep in range(10):
        state = initial_condition("bernoulli_genes", lattice,
                                  stream_seed(MASTER_SEED, 700 + rep),
                                  rates_l)
        run_until(state, 50.0, sample_times=[50.0])
        u_ab = float(np.mean(state.geno == int(Genotype.AB)))
        if u_ab >= 0.2:
            het_hits += 1

    rates_r = RateSet(5.0, 1.0, 1.0, 5.0)
    grow_hits = 0
    checkpoints = [10.0, 20.0, 30.0, 40.0, 50.0]
    for rep in range(10):
        state = initial_condition("bernoulli_genes", lattice,
                                  stream_seed(MASTER_SEED, 720 + rep),
                                  rates_r)
        sizes = []

        def watch(st):
            if any(abs(st.t - c) < 1e-9 for c in checkpoints):
                sizes.append(observables.mean_cluster_size(st.geno, lattice))

        run_until(state, 50.0, sample_times=checkpoints, on_sample=watch)
        if all(b > a for a, b in zip(sizes, sizes[1:])):
            grow_hits += 1
    ok = het_hits >= 8 and grow_hits >= 8
    detail = (f"mixing rates: {het_hits}/10 seeds above density 0.2; "
              f"segregating rates: {grow_hits}/10 seeds with strictly "
              f"growing clusters")
    return CriterionResult(12, "two-regime snapshots", ok, detail,
                           time.perf_counter() - t0)


def criterion_13() -> CriterionResult:
    """Closed-form threshold value and tail-bound monotonicity."""
    t0 = time.perf_counter()
    ok = abs(bounds.condition4_threshold(1)
             - 6.0 * (1.0 + math.sqrt(3.0))) <= 1e-12
    for d in (1, 2, 3):
        for c in (2 * d + 0.5, 2 * d + 2.0, 10.0 * d):
            prev = None
            for n in (2, 5, 10, 20):
                val = bounds.path_tail_bound(n, d, c)
                if not np.isfinite(val) or (prev is not None and val >= prev):
                    ok = False
                prev = val
        for c in (0.5 * d, 2.0 * d):
            try:
                bounds.path_tail_bound(3, d, c)
                ok = False
            except bounds.DivergentBound:
                pass
    return CriterionResult(13, "condition evaluators", ok,
                           "threshold exact; tail bound decreasing and "
                           "finite exactly above the branching threshold",
                           time.perf_counter() - t0)


ALL: list[Callable[[], CriterionResult]] = [
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
    criterion_11, criterion_12, criterion_13,
]


def run_all(indices: Optional[list[int]] = None) -> list[CriterionResult]:
    results = []
    for i, fn in enumerate(ALL, start=1):
        if indices is not None and i not in indices:
            continue
        results.append(fn())
    return results
