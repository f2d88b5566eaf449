"""Spatial diploid competition model with non-Mendelian segregation.

Simulation engines (exact event-driven and Poisson-arrow based), the
mean-field ODE system with its closed-form fixed points, the gene-based
and biased-voter comparison processes, and evaluators for the model's
closed-form thresholds and speed bounds.
"""

from meiodrive.model import Allele, Genotype, RateSet, transition_rates
from meiodrive.lattice import Lattice
from meiodrive.engine import (
    FrozenState,
    LatticeState,
    ObservableSeries,
    gillespie_step,
    initial_condition,
    run_until,
)

__all__ = [
    "Allele",
    "Genotype",
    "RateSet",
    "transition_rates",
    "Lattice",
    "FrozenState",
    "LatticeState",
    "ObservableSeries",
    "gillespie_step",
    "initial_condition",
    "run_until",
]

__version__ = "0.1.0"
