"""Boltzmann-weighted allocation of a capped divisible resource.

The core model divides a cap among weighted agents in proportion to
weight * exp(-beta * potential energy per capita); the solver layer analyzes
how allocations move with the sharpness parameter beta.  A bundled 8-country
emissions dataset drives the reporting CLI.
"""

from .dataset import (
    Dataset,
    DatasetRecord,
    FIXTURE_NAME,
    fixture_path,
    load_fixture,
    parse_dataset,
    serialize_dataset,
    to_problem,
)
from .errors import (
    BoltzallocError,
    ConfigurationError,
    DatasetFormatError,
    DomainError,
    NumericalError,
    ValidationError,
)
from .model import (
    Agent,
    AllocationProblem,
    AllocationResult,
    ExplicitPotential,
    NegativePerCapitaDemand,
    PotentialSpec,
    allocate,
    boltzmann_probabilities,
    cap_from_reduction,
    classify_traders,
    fair_divide,
    potential_energies,
    round_half_up,
)
from .solver import (
    CrossingReport,
    CrossingRoot,
    CrossoverResult,
    PairwiseCrossover,
    ReferenceBetaResult,
    SweepResult,
    find_demand_crossings,
    find_pairwise_crossover,
    find_reference_beta,
    objective_y,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "AllocationProblem",
    "AllocationResult",
    "BoltzallocError",
    "ConfigurationError",
    "CrossingReport",
    "CrossingRoot",
    "CrossoverResult",
    "Dataset",
    "DatasetFormatError",
    "DatasetRecord",
    "DomainError",
    "ExplicitPotential",
    "FIXTURE_NAME",
    "NegativePerCapitaDemand",
    "NumericalError",
    "PairwiseCrossover",
    "PotentialSpec",
    "ReferenceBetaResult",
    "SweepResult",
    "ValidationError",
    "allocate",
    "boltzmann_probabilities",
    "cap_from_reduction",
    "classify_traders",
    "fair_divide",
    "find_demand_crossings",
    "find_pairwise_crossover",
    "find_reference_beta",
    "fixture_path",
    "load_fixture",
    "objective_y",
    "parse_dataset",
    "potential_energies",
    "round_half_up",
    "serialize_dataset",
    "sweep",
    "to_problem",
]
