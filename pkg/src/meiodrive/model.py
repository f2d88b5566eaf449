"""Core model vocabulary: genotypes, alleles, birth rates, transition rates."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum


class Genotype(IntEnum):
    AA = 0
    AB = 1
    BB = 2


class Allele(IntEnum):
    A = 0
    B = 1


def pair_alleles(g0: Allele, g1: Allele) -> Genotype:
    """Unordered pairing of two alleles into a genotype (ab == ba)."""
    s = int(g0) + int(g1)
    return Genotype(s)


def split_genotype(g: Genotype) -> tuple[Allele, Allele]:
    if g == Genotype.AA:
        return (Allele.A, Allele.A)
    if g == Genotype.BB:
        return (Allele.B, Allele.B)
    return (Allele.A, Allele.B)


@dataclass(frozen=True)
class RateSet:
    """The four birth rates defining one model instance.

    ``phi_ij`` is the birth rate of type-i genes sitting in an individual of
    genotype ij.  All rates must be non-negative and at least one positive
    (otherwise the process is frozen everywhere and there is nothing to run).
    """

    phi_aa: float
    phi_ab: float
    phi_ba: float
    phi_bb: float

    def __post_init__(self):
        vals = (self.phi_aa, self.phi_ab, self.phi_ba, self.phi_bb)
        if any(v < 0 for v in vals):
            raise ValueError(f"rates must be non-negative, got {vals}")
        if all(v == 0 for v in vals):
            raise ValueError("all four rates are zero: the process is frozen")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.phi_aa, self.phi_ab, self.phi_ba, self.phi_bb)

    def allele_swapped(self) -> "RateSet":
        """Rates after exchanging the roles of the two alleles."""
        return RateSet(self.phi_bb, self.phi_ba, self.phi_ab, self.phi_aa)

    def scaled(self, lam: float) -> "RateSet":
        return RateSet(lam * self.phi_aa, lam * self.phi_ab,
                       lam * self.phi_ba, lam * self.phi_bb)

    def voter_rates(self) -> tuple[float, float]:
        """(phi_a, phi_b) of the comparison biased voter model."""
        return (min(self.phi_aa, self.phi_ab), max(self.phi_ba, self.phi_bb))


def transition_rates(genotype: Genotype, n_aa: int, n_ab: int, n_bb: int,
                     rates: RateSet) -> dict[Genotype, float]:
    """Transition rates of one site given its neighbor genotype counts.

    Returns a map from target genotype to rate; targets with rate 0 are
    omitted.  A homozygote can only gain a foreign gene (one step towards
    the heterozygote); a heterozygote can lose either gene.
    """
    out: dict[Genotype, float] = {}
    if genotype == Genotype.AA:
        r = 2.0 * rates.phi_bb * n_bb + rates.phi_ba * n_ab
        if r > 0:
            out[Genotype.AB] = r
    elif genotype == Genotype.BB:
        r = 2.0 * rates.phi_aa * n_aa + rates.phi_ab * n_ab
        if r > 0:
            out[Genotype.AB] = r
    else:
        r_to_aa = rates.phi_aa * n_aa + 0.5 * rates.phi_ab * n_ab
        r_to_bb = rates.phi_bb * n_bb + 0.5 * rates.phi_ba * n_ab
        if r_to_aa > 0:
            out[Genotype.AA] = r_to_aa
        if r_to_bb > 0:
            out[Genotype.BB] = r_to_bb
    return out
