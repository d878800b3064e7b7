"""Core allocation math.

A capped divisible resource (emissions permits, a cake) is split among agents
by softmax weighting: agent i receives a share proportional to

    weight_i * exp(-beta * energy_i)

where ``weight_i`` is the agent's population (or body weight in fair-division
mode), ``energy_i`` is its allocation potential energy per capita, and
``beta >= 0`` controls sharpness.  beta = 0 gives weight-proportional shares;
large beta concentrates the whole cap on the agent with the lowest energy.

Quantities are carried in the units of the bundled country data: demand and
caps in thousands of metric tons, populations in persons.  The default
potential is the negative of per-capita demand in metric tons, so high
per-capita emitters sit at low energy and attract permits as beta grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

import numpy as np

from .errors import ConfigurationError, DomainError, ValidationError

# demand is stored in 1000 t while populations are persons; per-capita
# energies are expressed in plain metric tons per person
DEMAND_UNIT_TONS = 1000.0

SELLER = "seller"
BUYER = "buyer"
BALANCED = "balanced"


def round_half_up(x: float) -> int:
    """Round a nonnegative quantity to the nearest integer, halves up."""
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class Agent:
    """One participant: a country, or a player in fair-division mode.

    ``population`` is the softmax weight (persons for countries, kilograms
    for players).  ``demand`` is what the agent actually needs in the target
    period; ``baseline`` is the prior-period quantity used for cap setting
    and may be omitted for fair-division players.
    """

    name: str
    population: float
    demand: float = 0.0
    baseline: float | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValidationError("agent name must be nonempty")
        if not math.isfinite(self.population) or self.population <= 0:
            raise ValidationError(f"agent {self.name!r}: population must be positive")
        if not math.isfinite(self.demand) or self.demand < 0:
            raise ValidationError(f"agent {self.name!r}: demand must be nonnegative")
        if self.baseline is not None and (
            not math.isfinite(self.baseline) or self.baseline < 0
        ):
            raise ValidationError(f"agent {self.name!r}: baseline must be nonnegative")


@dataclass(frozen=True)
class NegativePerCapitaDemand:
    """Potential energy from the data itself: energy_i = -demand_i / population_i.

    Demand is converted from 1000 t to metric tons, so energies come out in
    metric tons per capita (e.g. -17.94 for a heavy per-capita emitter).
    """


@dataclass(frozen=True)
class ExplicitPotential:
    """Caller-supplied per-agent potential energies, any per-capita unit.

    ``values`` must name every agent of the problem exactly once.
    """

    values: Mapping[str, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", dict(self.values))


PotentialSpec = Union[NegativePerCapitaDemand, ExplicitPotential]


@dataclass(frozen=True)
class AllocationProblem:
    """An agent set, the total cap to divide, and the potential specification."""

    agents: tuple[Agent, ...]
    total_permits: float
    potential: PotentialSpec = field(default_factory=NegativePerCapitaDemand)

    def __post_init__(self) -> None:
        object.__setattr__(self, "agents", tuple(self.agents))
        if len(self.agents) < 1:
            raise ValidationError("an allocation problem needs at least one agent")
        if not math.isfinite(self.total_permits) or self.total_permits <= 0:
            raise ValidationError("total_permits must be positive and finite")
        seen: set[str] = set()
        for agent in self.agents:
            if agent.name in seen:
                raise ValidationError(f"duplicate agent name {agent.name!r}")
            seen.add(agent.name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.agents)


@dataclass(frozen=True)
class AllocationResult:
    """Outcome of one allocation: per-agent probabilities, amounts, surpluses.

    ``differences`` holds allocation minus demand (positive -> surplus).
    ``total_energy`` is the permit-weighted potential sum
    ``sum_i allocation_i * energy_i``, a diagnostic of how much total
    potential the chosen beta hands out (units: 1000 t times energy
    per capita).
    """

    beta: float
    total_permits: float
    probabilities: dict[str, float]
    allocations: dict[str, float]
    differences: dict[str, float]
    total_energy: float

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.probabilities)


def potential_energies(problem: AllocationProblem) -> np.ndarray:
    """Per-agent potential energies, in problem agent order.

    Raises ConfigurationError if an explicit potential does not cover the
    agent set exactly.
    """
    spec = problem.potential
    if isinstance(spec, NegativePerCapitaDemand):
        return np.array(
            [-(a.demand * DEMAND_UNIT_TONS) / a.population for a in problem.agents]
        )
    names = set(problem.names)
    for agent in problem.agents:
        if agent.name not in spec.values:
            raise ConfigurationError(
                f"explicit potential is missing a value for agent {agent.name!r}"
            )
    for name in spec.values:
        if name not in names:
            raise ConfigurationError(
                f"explicit potential names unknown agent {name!r}"
            )
    return np.array([float(spec.values[a.name]) for a in problem.agents])


def boltzmann_probabilities(problem: AllocationProblem, beta: float) -> np.ndarray:
    """Probability that a unit of the resource goes to each agent.

    Computes weight_i * exp(-beta * energy_i), normalized.  Exponents are
    shifted by their maximum before exponentiation, so the result stays
    finite for any beta where the underlying ratio is well defined (tested
    to beta = 1e4 and far beyond); the sum is explicitly renormalized to 1.
    """
    beta = float(beta)
    if not math.isfinite(beta) or beta < 0:
        raise DomainError(f"beta must be finite and >= 0, got {beta}")
    energies = potential_energies(problem)
    weights = np.array([a.population for a in problem.agents])
    exponents = -beta * energies
    scaled = weights * np.exp(exponents - exponents.max())
    return scaled / scaled.sum()


def allocate(problem: AllocationProblem, beta: float) -> AllocationResult:
    """Divide the whole cap in Boltzmann proportions at the given beta."""
    probs = boltzmann_probabilities(problem, beta)
    allocations = problem.total_permits * probs
    demands = np.array([a.demand for a in problem.agents])
    differences = allocations - demands
    energies = potential_energies(problem)
    names = problem.names
    return AllocationResult(
        beta=float(beta),
        total_permits=float(problem.total_permits),
        probabilities=dict(zip(names, probs.tolist())),
        allocations=dict(zip(names, allocations.tolist())),
        differences=dict(zip(names, differences.tolist())),
        total_energy=float(np.dot(allocations, energies)),
    )


def cap_from_reduction(agents: Iterable[Agent], reduction_fraction: float) -> float:
    """Cap implied by shrinking the summed baselines by a fraction.

    The result is rounded half-up to whole units, the convention used when
    quoting published cap figures (0.97 * 17,612,510 -> 17,084,135).
    Every agent must carry a baseline.
    """
    reduction_fraction = float(reduction_fraction)
    if not math.isfinite(reduction_fraction) or not 0 <= reduction_fraction < 1:
        raise DomainError(
            f"reduction_fraction must lie in [0, 1), got {reduction_fraction}"
        )
    total = 0.0
    for agent in agents:
        if agent.baseline is None:
            raise ConfigurationError(f"agent {agent.name!r} has no baseline")
        total += agent.baseline
    return float(round_half_up((1.0 - reduction_fraction) * total))


def classify_traders(result: AllocationResult) -> dict[str, str]:
    """Label each agent seller (surplus), buyer (deficit), or balanced."""
    labels = {}
    for name, diff in result.differences.items():
        if diff > 0:
            labels[name] = SELLER
        elif diff < 0:
            labels[name] = BUYER
        else:
            labels[name] = BALANCED
    return labels


def fair_divide(
    players: Iterable[tuple[str, float, float]],
    total_good: float,
    beta: float,
) -> AllocationResult:
    """Divide a homogeneous good among weighted players.

    ``players`` is an iterable of (name, weight, potential) triples; weight
    takes the role population plays for countries (e.g. kilograms of body
    weight) and the potential is explicit (e.g. required caloric intake per
    unit weight, negated so needier players rank lower).  Identical math to
    :func:`allocate`.
    """
    triples = list(players)
    agents = tuple(Agent(name=name, population=weight) for name, weight, _ in triples)
    potential = ExplicitPotential({name: value for name, _, value in triples})
    problem = AllocationProblem(
        agents=agents, total_permits=float(total_good), potential=potential
    )
    return allocate(problem, beta)
