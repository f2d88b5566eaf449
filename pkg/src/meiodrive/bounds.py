"""Closed-form thresholds, speed bounds, and the invasion random walk."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from meiodrive import _kernels
from meiodrive.model import RateSet
from meiodrive.rng import stream_seed


class DegenerateWalk(Exception):
    pass


class DivergentBound(Exception):
    pass


def gap_occupancy_bound(d: int) -> float:
    """Long-run upper bound on the probability that the edge gap is zero."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return 2.0 * d / (2.0 * d + 1.0)


def drift_bound_eq8(phi_ab: float, d: int) -> float:
    """Lower bound on the linear speed of the tracked-particle projection."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return phi_ab / (2.0 * d + 1.0)


def edge_speed_bound_lemma36(phi_ab: float, phi_ba: float) -> float:
    """Lower bound on the d=1 right-edge speed of the heterozygote front.

    Stated under the ordering phi_ab >= phi_ba; callers with the opposite
    ordering swap arguments.  Positive iff phi_ab < 2 * phi_ba.
    """
    if phi_ab < phi_ba:
        raise ValueError("requires phi_ab >= phi_ba (swap arguments)")
    num = 2.0 * phi_ba ** 2 + 5.0 * phi_ab * phi_ba - 3.0 * phi_ab ** 2
    return num / (2.0 * (4.0 * phi_ab + phi_ba))


def condition4_threshold(d: int) -> float:
    """Coefficient on phi_bb in the fixation condition for dimension d."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return 6.0 * d * d * (1.0 + math.sqrt(1.0 + 2.0 / d))


def check4(rates: RateSet, d: int) -> bool:
    return rates.phi_aa > condition4_threshold(d) * rates.phi_bb


def condition5_check(rates: RateSet) -> bool:
    return rates.phi_aa > (rates.phi_bb + rates.phi_ba
                           + math.sqrt(rates.phi_bb * rates.phi_ba))


def fixation_speed_bound(rates: RateSet) -> float:
    """Lower bound on the d=1 all-aa edge speed from the half line."""
    paa, pba, pbb = rates.phi_aa, rates.phi_ba, rates.phi_bb
    return (paa * paa - (pbb + pba) * paa - pbb * pba) / (2.0 * paa + pbb)


SATISFIED_MODULO_SMALL_PHI_BB = "satisfied_modulo_small_phi_bb"
NOT_SATISFIED = "not_satisfied"


def condition6_check(rates: RateSet) -> str:
    """Second fixation condition; its phi_bb smallness is unquantified in
    closed form, so satisfaction is reported modulo that caveat."""
    ok = rates.phi_aa > max(2.0 * rates.phi_ba / 5.0,
                            rates.phi_ba - rates.phi_ab / 6.0)
    return SATISFIED_MODULO_SMALL_PHI_BB if ok else NOT_SATISFIED


def path_tail_bound(n_start: int, d: int, c: float,
                    rel_tol: float = 1e-12) -> float:
    """Union bound over invasion paths reaching the origin from outside the
    cube of half-width N: sum over L >= N of the shell count times
    c/(c-2d) * (2d/c)**L.  Finite iff c > 2d."""
    if c <= 2 * d:
        raise DivergentBound(f"bound diverges: c={c} <= 2d={2 * d}")
    q = 2.0 * d / c
    pref = c / (c - 2.0 * d)
    total = 0.0
    L = n_start
    qL = q ** n_start
    while True:
        shell = (2 * L + 3) ** d - (2 * L + 1) ** d
        term = shell * pref * qL
        total += term
        # remaining tail <= term * q * shell-growth slack; stop on relative size
        if term <= rel_tol * total * (1.0 - q) and L > n_start:
            break
        L += 1
        qL *= q
        if L > n_start + 100000:
            break
    return total


@dataclass(frozen=True)
class InvasionWalkParams:
    """Half-step-down / jump-up walk bounding the invasion of b-genes."""

    r: float  # probability of the upward jump to floor(y) + 1
    l: float  # probability of the half step down
    d: int
    phi_aa: float = float("nan")
    phi_bb: float = float("nan")

    def __post_init__(self):
        if not math.isclose(self.r + self.l, 1.0, rel_tol=0, abs_tol=1e-12):
            raise ValueError("r + l must equal 1")
        if not (0.0 < self.r < 1.0):
            raise DegenerateWalk(f"degenerate walk: r={self.r}")

    @property
    def c(self) -> float:
        return self.l * self.l / self.r

    @staticmethod
    def from_rates(phi_aa: float, phi_bb: float, d: int) -> "InvasionWalkParams":
        denom = phi_aa + 6.0 * d * phi_bb
        if denom <= 0:
            raise DegenerateWalk("both source rates are zero")
        r = 6.0 * d * phi_bb / denom
        return InvasionWalkParams(r=r, l=1.0 - r, d=d,
                                  phi_aa=phi_aa, phi_bb=phi_bb)


def hitting_probability_closed_form(params: InvasionWalkParams,
                                    k_target: int) -> float:
    """Probability of hitting K before -1 from 0: (c-1) / (c**(K+1) - 1)."""
    if k_target < 0:
        raise ValueError("K must be >= 0")
    if k_target == 0:
        return 1.0
    c = params.c
    if math.isclose(c, 1.0, rel_tol=0, abs_tol=1e-14):
        return 1.0 / (k_target + 1)
    return (c - 1.0) / (c ** (k_target + 1) - 1.0)


def hitting_probability_linear_solve(params: InvasionWalkParams,
                                     k_target: int) -> float:
    """Independent oracle: solve the first-return system
    p_i = l^2/(1-lr) p_{i-1} + r/(1-lr) p_{i+1} with p_{-1}=0, p_K=1."""
    if k_target < 0:
        raise ValueError("K must be >= 0")
    if k_target == 0:
        return 1.0
    r, l = params.r, params.l
    down = l * l / (1.0 - l * r)
    up = r / (1.0 - l * r)
    m = k_target  # unknowns p_0 .. p_{K-1}
    A = np.zeros((m, m))
    b = np.zeros(m)
    for i in range(m):
        A[i, i] = 1.0
        if i - 1 >= 0:
            A[i, i - 1] = -down
        if i + 1 < m:
            A[i, i + 1] = -up
        else:
            b[i] += up  # p_K = 1
    p = np.linalg.solve(A, b)
    return float(p[0])


def invasion_walk(params: InvasionWalkParams, k_target: int, n_walks: int,
                  seed: int) -> tuple[float, float]:
    """(empirical hitting probability, closed form)."""
    closed = hitting_probability_closed_form(params, k_target)
    if k_target == 0:
        return 1.0, closed
    hits, _ = _kernels.walk_hits(params.r, float(k_target), n_walks,
                                 np.uint64(stream_seed(seed, 0)), 0)
    return hits / n_walks, closed


def martingale_increment_stats(params: InvasionWalkParams, n_reps: int,
                               seed: int) -> tuple[float, float]:
    """(mean, standard error) of the skeleton increments of c**Y from 0."""
    s, s2, _ = _kernels.martingale_increments(
        params.r, params.c, n_reps, np.uint64(stream_seed(seed, 0)), 0)
    mean = s / n_reps
    var = s2 / n_reps - mean * mean
    return mean, math.sqrt(max(var, 0.0) / n_reps)
