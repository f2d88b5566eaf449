"""Gene-level processes: projection, flip dynamics, couplings, equivalence."""

import numpy as np
import pytest

from meiodrive.engine import LatticeState, run_until
from meiodrive.genes import (BinaryLatticeState, DominationViolation,
                             GeneLatticeState, abp_flip_rate,
                             genotype_gene_equivalence_check, project_to_abp,
                             run_coupled, run_gene_based, simulate_abp)
from meiodrive.lattice import Lattice
from meiodrive.model import Genotype, RateSet
from meiodrive.rng import RandomStream, stream_seed

RATES = RateSet(1.0, 4.0, 3.0, 2.0)


def random_alleles(n, seed, p=0.5):
    stream = RandomStream(seed)
    return (stream.u01_array(2 * n) < p).astype(np.int8).reshape(n, 2)


def test_genotype_projection_roundtrip():
    lat = Lattice((9,))
    geno = np.array([0, 1, 2, 0, 1, 2, 1, 0, 2], dtype=np.int8)
    xi = GeneLatticeState.from_genotypes(lat, geno)
    assert np.array_equal(xi.genotypes(), geno)


def test_heterozygote_indicator_projection():
    lat = Lattice((5,))
    st = LatticeState(lat, RATES, np.array([0, 1, 2, 1, 0], dtype=np.int8), 1)
    abp = project_to_abp(st)
    assert list(abp.bits) == [0, 1, 0, 1, 0]


def test_flip_rate_reduction():
    # with phi_aa = phi_bb = 0 and phi_ab = phi_ba = phi, every site flips
    # its heterozygote indicator at rate phi times its 1-neighbors,
    # regardless of which homozygote it is
    phi = 1.7
    reduced = RateSet(0.0, phi, phi, 0.0)
    lat = Lattice((3,))
    from meiodrive.engine import site_transition_rates
    for left in range(3):
        for mid in range(3):
            for right in range(3):
                st = LatticeState(lat, reduced,
                                  np.array([left, mid, right], dtype=np.int8),
                                  1)
                total = sum(site_transition_rates(st, 1).values())
                ones = (left == 1) + (right == 1)
                assert total == pytest.approx(phi * ones)


def test_direct_flip_process_matches_reduced_genotype_engine():
    # distribution check: density trajectory of the two routes agrees
    lat = Lattice((200,))
    phi = 1.0
    reduced = RateSet(0.0, phi, phi, 0.0)
    n_rep = 200
    t_end = 3.0
    mean_g = np.zeros(n_rep)
    mean_f = np.zeros(n_rep)
    for rep in range(n_rep):
        stream = RandomStream(stream_seed(17, rep))
        bits0 = (stream.u01_array(200) < 0.5).astype(np.int8)
        geno0 = bits0.copy()  # 1 -> heterozygote, 0 -> aa homozygote
        st = LatticeState(lat, reduced, geno0, stream_seed(18, rep))
        run_until(st, t_end, sample_times=[t_end])
        mean_g[rep] = np.mean(st.geno == 1)
        out, _ = simulate_abp(BinaryLatticeState(lat, bits0), phi, t_end,
                              stream_seed(19, rep))
        mean_f[rep] = out.bits.mean()
    se = np.sqrt(mean_g.var(ddof=1) / n_rep + mean_f.var(ddof=1) / n_rep)
    assert abs(mean_g.mean() - mean_f.mean()) <= 3 * se


def test_gene_based_run_reaches_voter_absorbing_states():
    # pure voter rates: all-a and all-b are absorbing for the gene process
    lat = Lattice((6,))
    rates = RateSet(2.0, 2.0, 3.0, 3.0)
    all_a = GeneLatticeState(lat, np.zeros((6, 2), dtype=np.int8))
    out = run_gene_based(lat, rates, all_a, 5.0, 3)[-1]
    assert np.all(out.alleles == 0)
    all_b = GeneLatticeState(lat, np.ones((6, 2), dtype=np.int8))
    out = run_gene_based(lat, rates, all_b, 5.0, 4)[-1]
    assert np.all(out.alleles == 1)


def test_gene_based_sampling_times():
    lat = Lattice((8,))
    xi0 = GeneLatticeState(lat, random_alleles(8, 5))
    outs = run_gene_based(lat, RATES, xi0, 2.0, 9,
                          sample_times=[0.0, 1.0, 2.0])
    assert [o.t for o in outs] == [0.0, 1.0, 2.0]
    assert np.array_equal(outs[0].alleles, xi0.alleles)


@pytest.mark.parametrize("rates", [
    RateSet(1.0, 2.0, 1.0, 2.0), RateSet(2.0, 1.0, 2.0, 1.0),
    RateSet(1.0, 2.0, 2.0, 1.0), RateSet(2.0, 1.0, 1.0, 2.0),
])
def test_domination_holds_in_every_sign_case(rates):
    lat = Lattice((20,))
    for rep in range(5):
        xi0 = GeneLatticeState(lat, random_alleles(20, 100 + rep))
        run = run_coupled(lat, rates, xi0, xi0.copy(), 5.0,
                          stream_seed(23, rep), sample_times=[2.5, 5.0])
        for xi, zeta in zip(run.xi, run.zeta):
            assert not np.any((zeta.alleles == 0) & (xi.alleles == 1))


def test_coupled_rejects_bad_initial_order():
    lat = Lattice((4,))
    xi0 = GeneLatticeState(lat, np.ones((4, 2), dtype=np.int8))
    zeta0 = GeneLatticeState(lat, np.zeros((4, 2), dtype=np.int8))
    with pytest.raises(ValueError):
        run_coupled(lat, RATES, xi0, zeta0, 1.0, 1)


def test_equivalence_coupled_mode():
    lat = Lattice((12,))
    stream = RandomStream(9)
    geno0 = np.array([int(stream.u01() * 3) for i in range(12)],
                     dtype=np.int8)
    rep = genotype_gene_equivalence_check(RATES, lat, geno0, 5.0, 77)
    assert rep.mode == "coupled" and rep.consistent


def test_equivalence_statistical_mode():
    lat = Lattice((20,))
    geno0 = np.array([0, 1, 2, 1, 0, 0, 1, 2, 2, 1,
                      0, 1, 2, 1, 0, 0, 1, 2, 2, 1], dtype=np.int8)
    rep = genotype_gene_equivalence_check(RATES, lat, geno0, 1.5, 88,
                                          n_replicates=400)
    assert rep.mode == "statistical"
    assert rep.n_replicates == 400
    assert all(abs(z) <= 3.5 for z in rep.z_scores)


def test_allele_validation():
    lat = Lattice((4,))
    with pytest.raises(ValueError):
        GeneLatticeState(lat, np.full((4, 2), 2, dtype=np.int8))
    with pytest.raises(ValueError):
        GeneLatticeState(lat, np.zeros((3, 2), dtype=np.int8))
    with pytest.raises(ValueError):
        BinaryLatticeState(lat, np.array([0, 1, 2, 0], dtype=np.int8))


def test_abp_flip_rate_helper():
    lat = Lattice((5,))
    b = BinaryLatticeState(lat, np.array([1, 0, 1, 1, 0], dtype=np.int8))
    assert abp_flip_rate(b, 1, 2.0) == pytest.approx(2.0 * 2)
    assert abp_flip_rate(b, 4, 2.0) == pytest.approx(2.0 * 2)
    assert abp_flip_rate(b, 3, 2.0) == pytest.approx(2.0 * 1)
