"""Lattice geometry: neighbor tables, boundaries, indexing."""

import numpy as np
import pytest

from meiodrive.lattice import FROZEN, TORUS, Lattice
from meiodrive.model import Genotype


def test_ring_neighbors_wrap():
    lat = Lattice((5,))
    nbr = lat.neighbor_table()
    assert nbr.shape == (5, 2)
    assert set(nbr[0]) == {4, 1}
    assert set(nbr[4]) == {3, 0}


def test_torus_2d_neighbor_count_and_symmetry():
    lat = Lattice((4, 6))
    nbr = lat.neighbor_table()
    assert nbr.shape == (24, 4)
    # neighbor relation is symmetric
    for i in range(24):
        for j in nbr[i]:
            assert i in nbr[j]
    # every site has 2d distinct neighbors
    for i in range(24):
        assert len(set(nbr[i])) == 4


def test_frozen_boundary_marks_faces():
    lat = Lattice((4,), FROZEN, Genotype.AA)
    nbr = lat.neighbor_table()
    # face 0 is the low end of axis 0, face 1 the high end
    assert nbr[0, 0] == -1 and nbr[0, 1] == 1
    assert nbr[3, 1] == -2 and nbr[3, 0] == 2
    assert list(lat.exterior_codes()) == [0, 0]


def test_per_face_exterior():
    lat = Lattice((4,), FROZEN, (Genotype.AA, Genotype.BB))
    assert list(lat.exterior_codes()) == [0, 2]
    with pytest.raises(ValueError):
        Lattice((4,), FROZEN, (Genotype.AA,))


def test_torus_rejects_tiny_sides_and_exterior():
    with pytest.raises(ValueError):
        Lattice((2,))
    with pytest.raises(ValueError):
        Lattice((5,), TORUS, Genotype.AA)
    with pytest.raises(ValueError):
        Lattice((5,), FROZEN)  # frozen needs an exterior


def test_index_coords_roundtrip():
    lat = Lattice((3, 4, 5))
    for i in range(lat.n_sites):
        assert lat.index(lat.coords(i)) == i
    assert lat.index((0, 0, 0)) == 0
    assert lat.index((2, 3, 4)) == lat.n_sites - 1
    with pytest.raises(IndexError):
        lat.index((3, 0, 0))


def test_neighbor_table_matches_coordinates():
    lat = Lattice((5, 7))
    nbr = lat.neighbor_table()
    for i in range(lat.n_sites):
        x, y = lat.coords(i)
        expected = {lat.index((((x - 1) % 5), y)),
                    lat.index((((x + 1) % 5), y)),
                    lat.index((x, (y - 1) % 7)),
                    lat.index((x, (y + 1) % 7))}
        assert set(nbr[i]) == expected
