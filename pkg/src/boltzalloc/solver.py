"""Analysis over the sharpness parameter beta.

Four tools on top of the core allocation: grid sweeps of every agent's
allocation curve, a least-squares reference beta (grid scan plus
golden-section refinement), per-agent roots where allocation crosses demand
(sign-change scan plus bisection, multiple roots per agent), and pairwise
betas where two agents' allocations cross (closed form, cross-checked by
bisection).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalError, ValidationError
from .model import AllocationProblem, allocate, boltzmann_probabilities, potential_energies

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2

DEFAULT_BRACKET = (0.0, 1.0)
DEFAULT_SCAN_POINTS = 1000
ROOT_BETA_TOL = 1e-6
# residual gate for a demand-crossing root r: |allocation(r) - demand| must
# come down to demand * 1e-6 (or 1e-3 absolute for zero demand), which on
# steep crossings needs a tighter beta than ROOT_BETA_TOL alone
ROOT_RESIDUAL_REL = 1e-6
ROOT_RESIDUAL_ABS = 1e-3
CROSSOVER_AGREEMENT_TOL = 1e-9

RISING = "rising"
FALLING = "falling"
FLAT = "flat"


@dataclass(frozen=True)
class SweepResult:
    """Allocation curves and the least-squares objective over a beta grid."""

    betas: tuple[float, ...]
    curves: dict[str, tuple[float, ...]]
    objective: tuple[float, ...]
    total_permits: float


@dataclass(frozen=True)
class ReferenceBetaResult:
    """Minimizer of the least-squares objective over a bracket.

    ``endpoint_minimum`` flags a grid minimum at a bracket edge (widen the
    bracket); ``flat_objective`` flags an objective that is constant over
    the scan grid, where any beta is a minimizer.
    """

    beta_star: float
    y_min: float
    bracket: tuple[float, float]
    iterations: int
    converged: bool
    endpoint_minimum: bool = False
    flat_objective: bool = False


@dataclass(frozen=True)
class CrossingRoot:
    """A beta where an agent's allocation equals its demand."""

    beta: float
    direction: str  # rising | falling | flat slope of (allocation - demand)


@dataclass(frozen=True)
class PairwiseCrossover:
    """A beta where two agents receive equal allocations."""

    agent_a: str
    agent_b: str
    beta: float


@dataclass(frozen=True)
class CrossingReport:
    """Demand-crossing roots per agent plus in-bracket pairwise crossovers.

    Agents whose allocation-minus-demand is identically zero over the scan
    grid are listed in ``identically_zero`` (every beta is a root) and get
    an empty root list.
    """

    bracket: tuple[float, float]
    roots: dict[str, tuple[CrossingRoot, ...]]
    identically_zero: frozenset[str] = field(default_factory=frozenset)
    crossovers: tuple[PairwiseCrossover, ...] = ()


@dataclass(frozen=True)
class CrossoverResult:
    """Outcome of a pairwise crossover search.

    ``beta`` is the answer (closed form) when the crossover lies in the
    bracket, else None.  ``bisection`` carries the independently bisected
    root when the bracket straddles a sign change.  ``degenerate`` marks
    identical agents, whose curves coincide everywhere.
    """

    beta: float | None
    closed_form: float | None
    bisection: float | None
    degenerate: bool = False


def _validated_bracket(bracket: tuple[float, float]) -> tuple[float, float]:
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError(f"bracket must be finite, got ({lo}, {hi})")
    if lo < 0 or hi <= lo:
        raise DomainError(f"bracket must satisfy 0 <= lo < hi, got ({lo}, {hi})")
    return lo, hi


def objective_y(problem: AllocationProblem, beta: float) -> float:
    """Sum of squared gaps between allocations and demands at one beta.

    Uses the same arithmetic as :func:`boltzalloc.model.allocate` (cap times
    probabilities), so values agree bit-for-bit with a full allocation.
    """
    probs = boltzmann_probabilities(problem, beta)
    allocations = problem.total_permits * probs
    demands = np.array([a.demand for a in problem.agents])
    return float(((allocations - demands) ** 2).sum())


def find_reference_beta(
    problem: AllocationProblem,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    tol: float = 1e-6,
    scan_points: int = DEFAULT_SCAN_POINTS,
) -> ReferenceBetaResult:
    """Locate the beta minimizing the least-squares objective.

    A coarse scan over ``scan_points`` grid values picks the smallest grid
    sample; golden-section refinement then shrinks the surrounding
    sub-bracket below ``tol``.  The returned beta_star is the best point
    evaluated anywhere, so y(beta_star) never exceeds y at the bracket
    endpoints.
    """
    lo, hi = _validated_bracket(bracket)
    if not math.isfinite(tol) or tol <= 0:
        raise DomainError(f"tol must be positive, got {tol}")
    if scan_points < 2:
        raise DomainError(f"scan_points must be >= 2, got {scan_points}")

    grid = np.linspace(lo, hi, scan_points)
    ys = [objective_y(problem, b) for b in grid]
    k = int(np.argmin(ys))
    best_x, best_y = float(grid[k]), ys[k]

    y_spread = max(ys) - min(ys)
    flat = y_spread <= 1e-12 * max(1.0, abs(max(ys, key=abs)))
    endpoint = k == 0 or k == len(grid) - 1

    a = float(grid[k - 1]) if k > 0 else float(grid[0])
    b = float(grid[k + 1]) if k < len(grid) - 1 else float(grid[-1])

    iterations = 0
    h = b - a
    if h > tol and not flat:
        c = a + INV_PHI_SQ * h
        d = a + INV_PHI * h
        yc = objective_y(problem, c)
        yd = objective_y(problem, d)
        for x, y in ((c, yc), (d, yd)):
            if y < best_y:
                best_x, best_y = x, y
        while (b - a) > tol and iterations < 200:
            iterations += 1
            if yc < yd:
                b, d, yd = d, c, yc
                h = b - a
                c = a + INV_PHI_SQ * h
                yc = objective_y(problem, c)
                if yc < best_y:
                    best_x, best_y = c, yc
            else:
                a, c, yc = c, d, yd
                h = b - a
                d = a + INV_PHI * h
                yd = objective_y(problem, d)
                if yd < best_y:
                    best_x, best_y = d, yd

    return ReferenceBetaResult(
        beta_star=best_x,
        y_min=best_y,
        bracket=(lo, hi),
        iterations=iterations,
        converged=(b - a) <= tol or flat,
        endpoint_minimum=endpoint,
        flat_objective=bool(flat),
    )


def sweep(
    problem: AllocationProblem,
    beta_min: float,
    beta_max: float,
    steps: int,
) -> SweepResult:
    """Evaluate every agent's allocation on a uniform inclusive beta grid.

    Each grid point is a fresh :func:`boltzalloc.model.allocate` call, so
    sweep values match standalone allocations bit-for-bit.
    """
    beta_min, beta_max = float(beta_min), float(beta_max)
    if not (math.isfinite(beta_min) and math.isfinite(beta_max)):
        raise DomainError("beta grid bounds must be finite")
    if beta_min < 0 or beta_max <= beta_min:
        raise DomainError(
            f"need 0 <= beta_min < beta_max, got ({beta_min}, {beta_max})"
        )
    if steps < 2:
        raise DomainError(f"steps must be >= 2, got {steps}")

    betas = np.linspace(beta_min, beta_max, steps)
    results = [allocate(problem, b) for b in betas]
    curves = {
        name: tuple(r.allocations[name] for r in results) for name in problem.names
    }
    objective = tuple(objective_y(problem, b) for b in betas)
    return SweepResult(
        betas=tuple(float(b) for b in betas),
        curves=curves,
        objective=objective,
        total_permits=float(problem.total_permits),
    )


def _bisect(g, lo, hi, g_lo, g_hi, width_tol, residual_tol, max_iter=200):
    """Shrink a sign-change interval until both the width and residual gates hold."""
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # float resolution exhausted
            break
        g_mid = g(mid)
        if g_mid == 0.0:
            return mid
        if (g_lo < 0.0) != (g_mid < 0.0):
            hi, g_hi = mid, g_mid
        else:
            lo, g_lo = mid, g_mid
        if (hi - lo) <= width_tol and min(abs(g_lo), abs(g_hi)) <= residual_tol:
            break
    return lo if abs(g_lo) <= abs(g_hi) else hi


def _slope_direction(g, beta, lo, hi, scale):
    """Sign of dg/dbeta at a root, from a small central difference."""
    delta = max(1e-7, 1e-9 * max(abs(beta), 1.0))
    left = max(lo, beta - delta)
    right = min(hi, beta + delta)
    if right <= left:
        return FLAT
    slope = g(right) - g(left)
    if slope > 1e-12 * scale:
        return RISING
    if slope < -1e-12 * scale:
        return FALLING
    return FLAT


def find_demand_crossings(
    problem: AllocationProblem,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    scan_steps: int = DEFAULT_SCAN_POINTS,
) -> CrossingReport:
    """Find every beta in the bracket where an agent's allocation meets demand.

    Scans allocation-minus-demand on a uniform grid, refines each sign
    change by bisection (beta uncertainty <= 1e-6 and residual within
    demand * 1e-6, or 1e-3 absolute for zero demand), and keeps every root,
    because curves can cross demand more than once.  Also reports all
    pairwise allocation crossovers that land inside the bracket.
    """
    lo, hi = _validated_bracket(bracket)
    if scan_steps < 2:
        raise DomainError(f"scan_steps must be >= 2, got {scan_steps}")

    grid = np.linspace(lo, hi, scan_steps)
    prob_rows = np.array([boltzmann_probabilities(problem, b) for b in grid])
    cap = problem.total_permits

    roots: dict[str, tuple[CrossingRoot, ...]] = {}
    identically_zero: set[str] = set()
    for i, agent in enumerate(problem.agents):
        demand = agent.demand
        residual_tol = (
            demand * ROOT_RESIDUAL_REL if demand > 0 else ROOT_RESIDUAL_ABS
        )
        gs = cap * prob_rows[:, i] - demand

        def g(beta, i=i, demand=demand):
            return cap * boltzmann_probabilities(problem, beta)[i] - demand

        if np.all(np.abs(gs) <= max(residual_tol, 1e-9 * max(1.0, demand))):
            identically_zero.add(agent.name)
            roots[agent.name] = ()
            continue

        found: list[CrossingRoot] = []
        scale = max(demand, 1.0)
        for j in range(len(grid) - 1):
            if gs[j] == 0.0:
                found.append(
                    CrossingRoot(
                        beta=float(grid[j]),
                        direction=_slope_direction(g, float(grid[j]), lo, hi, scale),
                    )
                )
            elif gs[j] * gs[j + 1] < 0.0:
                root = _bisect(
                    g,
                    float(grid[j]),
                    float(grid[j + 1]),
                    float(gs[j]),
                    float(gs[j + 1]),
                    ROOT_BETA_TOL,
                    residual_tol,
                )
                direction = RISING if gs[j] < 0.0 else FALLING
                found.append(CrossingRoot(beta=float(root), direction=direction))
        if gs[-1] == 0.0:
            found.append(
                CrossingRoot(
                    beta=float(grid[-1]),
                    direction=_slope_direction(g, float(grid[-1]), lo, hi, scale),
                )
            )
        roots[agent.name] = tuple(found)

    crossovers = []
    energies = potential_energies(problem)
    weights = [a.population for a in problem.agents]
    names = problem.names
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            if energies[i] == energies[j]:
                continue
            beta_x = float(
                math.log(weights[i] / weights[j]) / (energies[i] - energies[j])
            )
            if lo <= beta_x <= hi:
                crossovers.append(
                    PairwiseCrossover(agent_a=names[i], agent_b=names[j], beta=beta_x)
                )

    return CrossingReport(
        bracket=(lo, hi),
        roots=roots,
        identically_zero=frozenset(identically_zero),
        crossovers=tuple(crossovers),
    )


def find_pairwise_crossover(
    problem: AllocationProblem,
    agent_a: str,
    agent_b: str,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
) -> CrossoverResult:
    """Beta at which two agents' allocations are equal, if it lies in the bracket.

    With distinct energies the crossover has the closed form
    ln(weight_a / weight_b) / (energy_a - energy_b), which is the primary
    answer; a bisection on the allocation difference cross-checks it and
    must agree within 1e-9 whenever the closed-form root sits strictly
    inside the bracket.  Equal energies with unequal weights admit no
    crossover; identical agents are degenerate (curves coincide).
    """
    lo, hi = _validated_bracket(bracket)
    names = problem.names
    try:
        ia, ib = names.index(agent_a), names.index(agent_b)
    except ValueError as exc:
        raise ValidationError(f"unknown agent in crossover query: {exc}") from None

    energies = potential_energies(problem)
    w_a, w_b = problem.agents[ia].population, problem.agents[ib].population
    e_a, e_b = float(energies[ia]), float(energies[ib])

    if e_a == e_b:
        return CrossoverResult(
            beta=None, closed_form=None, bisection=None, degenerate=(w_a == w_b)
        )

    closed_form = math.log(w_a / w_b) / (e_a - e_b)

    def h(beta):
        probs = boltzmann_probabilities(problem, beta)
        return problem.total_permits * (probs[ia] - probs[ib])

    h_lo, h_hi = h(lo), h(hi)
    if h_lo == 0.0:
        bisection = lo
    elif h_hi == 0.0:
        bisection = hi
    elif (h_lo < 0.0) != (h_hi < 0.0):
        bisection = _bisect(h, lo, hi, h_lo, h_hi, 1e-12, math.inf)
    else:
        bisection = None

    in_bracket = lo <= closed_form <= hi
    # the agreement check needs a root the bisection can actually isolate;
    # skip it when the closed form sits within float noise of an endpoint
    strictly_inside = lo + 1e-9 < closed_form < hi - 1e-9
    if strictly_inside:
        if bisection is None:
            raise NumericalError(
                f"no sign change found for crossover {agent_a}/{agent_b} despite "
                f"closed-form root {closed_form!r} inside bracket"
            )
        if abs(bisection - closed_form) > CROSSOVER_AGREEMENT_TOL:
            raise NumericalError(
                f"crossover mismatch for {agent_a}/{agent_b}: bisection "
                f"{bisection!r} vs closed form {closed_form!r}"
            )

    return CrossoverResult(
        beta=closed_form if in_bracket else None,
        closed_form=closed_form,
        bisection=bisection,
        degenerate=False,
    )
