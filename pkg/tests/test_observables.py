"""Edges, gaps, blocks and clusters read off lattice configurations."""

import numpy as np
import pytest

from meiodrive.engine import LatticeState
from meiodrive.genes import BinaryLatticeState
from meiodrive.lattice import Lattice
from meiodrive.model import Genotype, RateSet
from meiodrive.observables import (ABP_VIEW, GENOTYPE_VIEW, BlockGrid,
                                   block_occupancy, densities,
                                   edges_and_gaps, mean_cluster_size,
                                   propagation_frequency)

RATES = RateSet(1.0, 1.0, 1.0, 1.0)


def geno_state(codes):
    codes = np.asarray(codes, dtype=np.int8)
    lat = Lattice((len(codes),))
    return LatticeState(lat, RATES, codes, 1)


def test_densities_are_exact_fractions():
    st = geno_state([0, 0, 1, 2])
    d = densities(st)
    assert (d.u_aa, d.u_ab, d.u_bb) == (0.5, 0.25, 0.25)


def test_abp_view_edges_and_gap():
    # origin of a 9-ring is site 4; window coordinate = index - 4
    lat = Lattice((9,))
    bits = np.array([0, 1, 0, 0, 1, 0, 1, 0, 0], dtype=np.int8)
    edge, gap = edges_and_gaps(BinaryLatticeState(lat, bits, 3.0), ABP_VIEW)
    assert edge.time == 3.0
    assert edge.x_minus == 1 - 4 and edge.x_plus == 6 - 4
    assert gap.g_t == 1  # one empty site between the two rightmost 1s
    assert gap.g_is_zero is False


def test_abp_view_gap_needs_two_particles():
    lat = Lattice((5,))
    _, gap = edges_and_gaps(
        BinaryLatticeState(lat, np.array([0, 0, 1, 0, 0], dtype=np.int8)),
        ABP_VIEW)
    assert gap.g_t is None and gap.g_is_zero is None


def test_abp_view_adjacent_particles_close_the_gap():
    lat = Lattice((6,))
    _, gap = edges_and_gaps(
        BinaryLatticeState(lat, np.array([0, 1, 1, 0, 0, 0], dtype=np.int8)),
        ABP_VIEW)
    assert gap.g_t == 0 and gap.g_is_zero is True


def test_genotype_view_half_line():
    # window coordinates: index - 4; AA through coordinate 0, then AB at
    # coordinate 1 and BB from coordinate 2 on
    st = geno_state([0, 0, 0, 0, 0, 1, 2, 2, 2])
    edge, gap = edges_and_gaps(st, GENOTYPE_VIEW)
    assert edge.r_t == 0
    assert not edge.r_clamped
    assert gap.k_t == 1 and gap.k_class == "1"


def test_genotype_view_gap_classes():
    st = geno_state([0, 0, 0, 2, 2, 2, 1, 1, 1])  # bb immediately after
    _, gap = edges_and_gaps(st, GENOTYPE_VIEW)
    assert gap.k_t == 0 and gap.k_class == "0"
    st = geno_state([0, 0, 0, 1, 1, 1, 2, 1, 1])
    _, gap = edges_and_gaps(st, GENOTYPE_VIEW)
    assert gap.k_t == 3 and gap.k_class == ">=2"


def test_genotype_view_all_homogeneous_clamps():
    st = geno_state([0] * 9)
    edge, gap = edges_and_gaps(st, GENOTYPE_VIEW)
    assert edge.r_clamped and edge.r_t == 8 - 4
    assert gap.k_t is None and gap.k_class is None
    assert edge.z_minus == 0 - 4 and edge.z_plus == 8 - 4


def test_edges_require_one_dimension():
    lat = Lattice((4, 4))
    st = LatticeState(lat, RATES, np.zeros(16, dtype=np.int8), 1)
    with pytest.raises(ValueError):
        edges_and_gaps(st, GENOTYPE_VIEW)
    with pytest.raises(ValueError):
        edges_and_gaps(st, "bogus")


def test_block_occupancy_parity_and_lookup():
    N = 8
    lat = Lattice((3 * N,))
    empty = np.zeros(3 * N, dtype=np.int8)
    center = empty.copy()
    center[lat.sides[0] // 2] = 1
    grid = block_occupancy([center, empty], lat, N, 1.0)
    assert grid.at(0, 0)
    assert not grid.at(0, 1)  # (0, 1) has odd parity and is never marked
    assert -1 in grid.z_values and 1 in grid.z_values


def test_block_occupancy_requires_room():
    lat = Lattice((10,))
    with pytest.raises(ValueError):
        block_occupancy([np.zeros(10, dtype=np.int8)], lat, 8, 1.0)


def test_propagation_frequency():
    z = np.array([-1, 0, 1])
    n = np.array([0, 1])
    def mk(occ):
        return BlockGrid(4, 1.0, z, n, np.array(occ, dtype=bool))
    good = mk([[False, True, False], [True, False, True]])
    dead = mk([[False, True, False], [False, False, True]])
    empty = mk([[False, False, False], [False, False, False]])
    assert propagation_frequency([good, dead]) == 0.5
    assert np.isnan(propagation_frequency([empty]))


def test_mean_cluster_size_extremes():
    lat = Lattice((6, 6))
    uniform = np.zeros(36, dtype=np.int8)
    assert mean_cluster_size(uniform, lat) == 36.0
    # checkerboard: every cluster is a single site
    g = np.indices((6, 6)).sum(axis=0) % 2
    assert mean_cluster_size((g * 2).astype(np.int8).reshape(-1), lat) == 1.0


def test_mean_cluster_size_simple_split():
    lat = Lattice((4,))
    # ring [0,0,2,2]: two clusters of size 2
    assert mean_cluster_size(np.array([0, 0, 2, 2], dtype=np.int8),
                             lat) == 2.0
