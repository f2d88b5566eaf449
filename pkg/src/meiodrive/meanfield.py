"""Deterministic nonspatial model: ODE system, fixed points, stability."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from meiodrive import _kernels
from meiodrive.model import RateSet

SIMPLEX_TOL = 1e-9

GENE_A = "gene_a"
GENE_B = "gene_b"
COEXISTENCE = "coexistence"
FOUNDER_CONTROL = "founder_control"
DEGENERATE = "degenerate"


class NumericalFailure(Exception):
    def __init__(self, t: float, msg: str):
        super().__init__(f"{msg} at t={t}")
        self.t = t


@dataclass(frozen=True)
class MeanFieldState:
    """Genotype density triple on the probability simplex."""

    u_aa: float
    u_ab: float
    u_bb: float

    def __post_init__(self):
        vals = (self.u_aa, self.u_ab, self.u_bb)
        if any(v < -SIMPLEX_TOL or v > 1 + SIMPLEX_TOL for v in vals):
            raise ValueError(f"densities out of [0,1]: {vals}")
        if abs(sum(vals) - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"densities do not sum to 1: {vals}")

    def as_array(self) -> np.ndarray:
        return np.array([self.u_aa, self.u_ab, self.u_bb])

    @staticmethod
    def from_array(u) -> "MeanFieldState":
        return MeanFieldState(float(u[0]), float(u[1]), float(u[2]))

    @staticmethod
    def hardy_weinberg(p: float) -> "MeanFieldState":
        return MeanFieldState(p * p, 2 * p * (1 - p), (1 - p) * (1 - p))


def rhs(state: MeanFieldState, rates: RateSet) -> tuple[float, float, float]:
    """Time derivatives of the three densities."""
    u0, u1, u2 = state.u_aa, state.u_ab, state.u_bb
    birth_a = 2.0 * rates.phi_aa * u0 + rates.phi_ab * u1
    birth_b = 2.0 * rates.phi_bb * u2 + rates.phi_ba * u1
    d_aa = birth_a * u1 / 2.0 - birth_b * u0
    d_ab = birth_a * (u2 - u1 / 2.0) + birth_b * (u0 - u1 / 2.0)
    d_bb = birth_b * u1 / 2.0 - birth_a * u2
    return (d_aa, d_ab, d_bb)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n_samples, 3)
    max_defect: float

    def final(self) -> MeanFieldState:
        return MeanFieldState.from_array(self.states[-1])


def integrate(state0: MeanFieldState, rates: RateSet, t_end: float,
              step: float = 1e-3, sample_every: int = 100) -> Trajectory:
    """Classical fixed-step RK4 with post-step simplex renormalization."""
    if t_end < 0:
        raise ValueError("t_end must be >= 0")
    n_steps = int(round(t_end / step))
    if n_steps == 0:
        return Trajectory(np.array([0.0]), state0.as_array()[None, :], 0.0)
    sample_every = max(1, min(sample_every, n_steps))
    n_samples = n_steps // sample_every + 1
    out = np.empty((n_samples, 3))
    bad, max_defect = _kernels.rk4_meanfield(
        state0.as_array(), rates.phi_aa, rates.phi_ab, rates.phi_ba,
        rates.phi_bb, step, n_steps, sample_every, out)
    if bad >= 0:
        raise NumericalFailure(bad * step, "non-finite state in RK4")
    times = np.arange(n_samples) * (sample_every * step)
    return Trajectory(times, out, max_defect)


def interior_fixed_point(rates: RateSet) -> Optional[MeanFieldState]:
    """Closed-form interior equilibrium; None unless psi > 0."""
    a = rates.phi_aa - rates.phi_ba
    b = rates.phi_bb - rates.phi_ab
    if a * b <= 0:
        return None
    phi = a + b
    assert phi != 0.0  # psi > 0 forces both differences to share a sign
    return MeanFieldState(b * b / (phi * phi),
                          2 * a * b / (phi * phi),
                          a * a / (phi * phi))


def interior_eigenvalues(rates: RateSet) -> tuple[float, float]:
    """Stability indicators (phi1 along the invariant curve, phi2
    transverse to it) at the interior point; only meaningful when psi > 0.

    These are the tangent-space eigenvalues of the Jacobian multiplied by
    the positive factor phi**2 (phi = phi_aa - phi_ba + phi_bb - phi_ab),
    so their signs classify stability and phi1 = psi * phi.
    """
    a = rates.phi_aa - rates.phi_ba
    b = rates.phi_bb - rates.phi_ab
    phi1 = a * b * (a + b)
    phi2 = -2.0 * (a * b * (rates.phi_aa + rates.phi_bb)
                   + b * b * rates.phi_ba + a * a * rates.phi_ab)
    return phi1, phi2


def jacobian_corner_aa(rates: RateSet) -> np.ndarray:
    paa, pab, pba, pbb = rates.as_tuple()
    return np.array([
        [0.0, paa - pba, -2.0 * pbb],
        [0.0, -paa + pba, 2.0 * paa + 2.0 * pbb],
        [0.0, 0.0, -2.0 * paa],
    ])


def jacobian_interior(rates: RateSet) -> np.ndarray:
    paa, pab, pba, pbb = rates.as_tuple()
    a = paa - pba
    b = pbb - pab
    psi_aa = a * a
    psi_bb = b * b
    psi_ab = a * b
    phi = a + b
    m = np.array([
        [-2.0 * psi_aa * pab, psi_ab * (pbb + pab), -2.0 * psi_bb * pbb],
        [2.0 * psi_aa * (paa + pab),
         -psi_ab * (paa + pbb + pab + pba),
         2.0 * psi_bb * (pbb + pba)],
        [-2.0 * psi_aa * paa, psi_ab * (paa + pba), -2.0 * psi_bb * pba],
    ])
    return m / (phi * phi)


def hw_defect(state: MeanFieldState) -> float:
    """Squared-heterozygote defect; zero exactly on the Hardy-Weinberg curve."""
    return state.u_ab * state.u_ab - 4.0 * state.u_aa * state.u_bb


@dataclass
class FixedPoint:
    state: MeanFieldState
    kind: str  # corner_aa | corner_bb | interior
    eigenvalues: list[float]  # restricted to the simplex tangent space
    stable: bool


@dataclass
class FixedPointReport:
    rates: RateSet
    fixed_points: list[FixedPoint]
    regime: str

    def interior(self) -> Optional[FixedPoint]:
        for fp in self.fixed_points:
            if fp.kind == "interior":
                return fp
        return None


def classify_regime(rates: RateSet) -> str:
    a = rates.phi_aa - rates.phi_ba
    b = rates.phi_bb - rates.phi_ab
    if a == 0 or b == 0:
        return DEGENERATE
    if a > 0 and b < 0:
        return GENE_A
    if a < 0 and b > 0:
        return GENE_B
    if a < 0 and b < 0:
        return COEXISTENCE
    return FOUNDER_CONTROL


def stability_report(rates: RateSet) -> FixedPointReport:
    paa, pab, pba, pbb = rates.as_tuple()
    pts = [
        FixedPoint(MeanFieldState(1.0, 0.0, 0.0), "corner_aa",
                   [-paa + pba, -2.0 * paa], paa > pba),
        FixedPoint(MeanFieldState(0.0, 0.0, 1.0), "corner_bb",
                   [-pbb + pab, -2.0 * pbb], pbb > pab),
    ]
    interior = interior_fixed_point(rates)
    if interior is not None:
        phi1, phi2 = interior_eigenvalues(rates)
        stable = paa < pba and pbb < pab
        pts.append(FixedPoint(interior, "interior", [phi1, phi2], stable))
    return FixedPointReport(rates, pts, classify_regime(rates))


def phase_sweep(phi_aa_values, phi_bb_values, phi_ab: float,
                phi_ba: float) -> list[list[str]]:
    """Regime label per (phi_aa, phi_bb) grid cell; rows index phi_aa."""
    phi_aa_values = list(phi_aa_values)
    phi_bb_values = list(phi_bb_values)
    if not phi_aa_values or not phi_bb_values:
        raise ValueError("grid must be non-empty")
    grid = []
    for paa in phi_aa_values:
        row = []
        for pbb in phi_bb_values:
            row.append(classify_regime(RateSet(paa, phi_ab, phi_ba, pbb)))
        grid.append(row)
    return grid
