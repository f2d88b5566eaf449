"""Poisson arrow realizations: rates, labels, ordering, coupling table."""

import numpy as np
import pytest

from meiodrive._kernels import (LBL_A, LBL_AA, LBL_AB, LBL_B, LBL_BA, LBL_BB)
from meiodrive.arrows import (COUPLED_TABLE2, GENE_BASED, directed_pairs,
                              gene_based_rows, generate_arrows, table2_rows)
from meiodrive.lattice import FROZEN, Lattice
from meiodrive.model import Genotype, RateSet
from meiodrive.rng import stream_seed

RATES = RateSet(1.0, 4.0, 3.0, 2.0)


def test_directed_pairs_ring():
    lat = Lattice((5,))
    pairs = directed_pairs(lat)
    assert pairs.shape == (10, 2)
    as_set = {tuple(p) for p in pairs}
    assert (0, 1) in as_set and (1, 0) in as_set and (0, 4) in as_set
    with pytest.raises(ValueError):
        directed_pairs(Lattice((5,), FROZEN, Genotype.AA))


def test_times_sorted_and_window_respected():
    lat = Lattice((6,))
    arrows = generate_arrows(lat, RATES, GENE_BASED, 2.0, 42)
    assert np.all(np.diff(arrows.times) > 0)
    assert arrows.times[0] > 0 and arrows.times[-1] <= 2.0


def test_empty_window_and_negative_window():
    lat = Lattice((6,))
    assert len(generate_arrows(lat, RATES, GENE_BASED, 0.0, 1)) == 0
    with pytest.raises(ValueError):
        generate_arrows(lat, RATES, GENE_BASED, -1.0, 1)
    with pytest.raises(ValueError):
        generate_arrows(lat, RATES, "bogus", 1.0, 1)


def test_total_arrow_count_is_poisson():
    # total rate = n_pairs * 4 slot pairs * (sum of row rates) / 2
    lat = Lattice((10,))
    T = 1.0
    lam = 20 * 4 * (sum(RATES.as_tuple()) / 2.0) * T
    counts = [len(generate_arrows(lat, RATES, GENE_BASED, T,
                                  stream_seed(7, k)))
              for k in range(100)]
    mean = np.mean(counts)
    # mean of 100 Poisson(lam) draws: sd = sqrt(lam/100)
    assert abs(mean - lam) <= 4 * np.sqrt(lam / 100)
    var = np.var(counts, ddof=1)
    assert 0.5 * lam < var < 1.5 * lam  # coarse dispersion check


def test_arrow_fields_cover_all_slots_and_labels():
    lat = Lattice((6,))
    arrows = generate_arrows(lat, RATES, GENE_BASED, 20.0, 3)
    assert set(np.unique(arrows.src_slot)) == {0, 1}
    assert set(np.unique(arrows.dst_slot)) == {0, 1}
    assert set(np.unique(arrows.label)) == {LBL_AA, LBL_AB, LBL_BA, LBL_BB}
    # sources and targets are always lattice neighbors
    nbr = lat.neighbor_table()
    for e in range(len(arrows)):
        assert arrows.dst_site[e] in nbr[arrows.src_site[e]]


def test_label_frequencies_match_rates():
    lat = Lattice((6,))
    arrows = generate_arrows(lat, RATES, GENE_BASED, 200.0, 11)
    total = sum(RATES.as_tuple())
    n = len(arrows)
    for lbl, rate in [(LBL_AA, 1.0), (LBL_AB, 4.0), (LBL_BA, 3.0),
                      (LBL_BB, 2.0)]:
        p = rate / total
        frac = np.mean(arrows.label == lbl)
        assert abs(frac - p) <= 4 * np.sqrt(p * (1 - p) / n)


def test_gene_based_rows_drop_zero_rates():
    rows = gene_based_rows(RateSet(0.0, 1.0, 1.0, 0.0))
    assert rows == [(1.0, LBL_AB), (1.0, LBL_BA)]


@pytest.mark.parametrize("rates,labels", [
    # sign cases of (phi_aa - phi_ab, phi_bb - phi_ba)
    (RateSet(1.0, 2.0, 1.0, 2.0), {LBL_A, LBL_AB, LBL_B, LBL_BB}),
    (RateSet(2.0, 1.0, 2.0, 1.0), {LBL_A, LBL_AA, LBL_B, LBL_BA}),
    (RateSet(1.0, 2.0, 2.0, 1.0), {LBL_A, LBL_AB, LBL_B, LBL_BA}),
    (RateSet(2.0, 1.0, 1.0, 2.0), {LBL_A, LBL_AA, LBL_B, LBL_BB}),
])
def test_coupling_rows_by_sign_case(rates, labels):
    rows = table2_rows(rates)
    assert {lbl for _, lbl in rows} == labels
    # each half sums to the dominating single-type rate
    tot_a = sum(r for r, lbl in rows if lbl in (LBL_A, LBL_AA, LBL_AB))
    tot_b = sum(r for r, lbl in rows if lbl in (LBL_B, LBL_BA, LBL_BB))
    assert tot_a == max(rates.phi_aa, rates.phi_ab)
    assert tot_b == max(rates.phi_ba, rates.phi_bb)


def test_coupling_rows_equal_rates_collapse():
    # ties produce pure voter rows only
    rows = table2_rows(RateSet(2.0, 2.0, 3.0, 3.0))
    assert rows == [(2.0, LBL_A), (3.0, LBL_B)]


def test_arrow_sequence_indexing():
    lat = Lattice((6,))
    arrows = generate_arrows(lat, RATES, COUPLED_TABLE2, 1.0, 5)
    ev = arrows[0]
    assert ev.time == arrows.times[0]
    assert ev.label_name in {"a", "b", "aa", "ab", "ba", "bb"}
