import math

import pytest
from scipy import optimize

from boltzalloc import (
    Agent,
    AllocationProblem,
    DomainError,
    ExplicitPotential,
    NumericalError,
    ValidationError,
    allocate,
    boltzmann_probabilities,
    find_demand_crossings,
    find_pairwise_crossover,
    find_reference_beta,
    objective_y,
    potential_energies,
    sweep,
    to_problem,
)

# independently computed with scipy (bounded Brent / brentq) before the
# solver existed; see the acceptance suite for the published-value gates
ORACLE_BETA_STAR = 0.096559949785312
ORACLE_Y_MIN = 130289162236.9
ORACLE_ROOTS = {
    "US": 0.095291,
    "China": 0.097822,
    "Italy": 0.050668,
    "Canada": (0.106347, 0.742629),
}
ORACLE_CROSSOVER_CN_US = 0.11641088901893552


def single_agent_problem(cap=42.0, demand=10.0):
    return AllocationProblem((Agent("solo", 3.0, demand=demand),), total_permits=cap)


def symmetric_two_agent_problem():
    agents = (Agent("a", 5.0, demand=50.0), Agent("b", 5.0, demand=50.0))
    return AllocationProblem(agents, total_permits=100.0)


class TestObjective:
    def test_matches_squared_differences_of_allocate(self, table2_problem):
        result = allocate(table2_problem, 0.0966)
        expected = sum(d * d for d in result.differences.values())
        assert objective_y(table2_problem, 0.0966) == pytest.approx(expected, rel=1e-12)

    def test_fixture_value_against_published_differences(self, table2_problem):
        # squared 2-decimal-era differences from the published table; the
        # engine value differs only by their display rounding
        published = sum(
            d * d
            for d in (-27631, 47813, -123626, -52249, -188836, -255438, -75534, 51165)
        )
        assert objective_y(table2_problem, 0.0966) == pytest.approx(published, rel=1e-4)

    def test_single_agent_objective_is_constant(self):
        problem = single_agent_problem(cap=42.0, demand=10.0)
        values = {objective_y(problem, b) for b in (0.0, 0.3, 5.0, 100.0)}
        assert values == {(42.0 - 10.0) ** 2}

    def test_perfect_fit_is_zero(self):
        # equal energies make shares weight-proportional at every beta
        agents = (Agent("a", 3.0, demand=75.0), Agent("b", 1.0, demand=25.0))
        problem = AllocationProblem(
            agents, total_permits=100.0, potential=ExplicitPotential({"a": -1.0, "b": -1.0})
        )
        for beta in (0.0, 0.5, 7.0):
            assert objective_y(problem, beta) == 0.0


class TestFindReferenceBeta:
    def test_fixture_minimizer(self, table2_problem):
        ref = find_reference_beta(table2_problem, bracket=(0.0, 1.0), tol=1e-6)
        assert ref.beta_star == pytest.approx(ORACLE_BETA_STAR, abs=1e-4)
        assert ref.y_min == pytest.approx(ORACLE_Y_MIN, rel=1e-6)
        assert ref.converged
        assert not ref.endpoint_minimum
        assert not ref.flat_objective
        assert ref.bracket[0] <= ref.beta_star <= ref.bracket[1]

    def test_minimizer_certificate(self, table2_problem):
        ref = find_reference_beta(table2_problem, bracket=(0.0, 1.0), tol=1e-6)
        assert ref.y_min <= objective_y(table2_problem, ref.beta_star - 1e-6)
        assert ref.y_min <= objective_y(table2_problem, ref.beta_star + 1e-6)
        assert ref.y_min <= objective_y(table2_problem, 0.0)
        assert ref.y_min <= objective_y(table2_problem, 1.0)

    def test_endpoint_minimum_flagged(self, table2_problem):
        ref = find_reference_beta(table2_problem, bracket=(0.2, 1.0), tol=1e-6)
        assert ref.endpoint_minimum
        assert ref.converged
        assert ref.beta_star == 0.2

    def test_flat_objective_single_agent(self):
        ref = find_reference_beta(single_agent_problem(), bracket=(0.0, 1.0), tol=1e-6)
        assert ref.flat_objective
        assert ref.converged
        assert ref.y_min == (42.0 - 10.0) ** 2

    def test_flat_zero_objective_symmetric_pair(self):
        ref = find_reference_beta(symmetric_two_agent_problem(), bracket=(0.0, 1.0), tol=1e-6)
        assert ref.flat_objective
        assert ref.y_min == 0.0

    def test_explicit_supply_cap_has_higher_minimum(self, table2):
        # cap equal to total current demand: the fit minimum sits near the
        # same beta but is measurably worse than the reduced-cap fit
        exact_supply = to_problem(table2, cap=17708472.0)
        reduced = to_problem(table2, reduction=0.03)
        ref_exact = find_reference_beta(exact_supply, bracket=(0.0, 1.0), tol=1e-6)
        ref_reduced = find_reference_beta(reduced, bracket=(0.0, 1.0), tol=1e-6)
        assert ref_exact.beta_star == pytest.approx(0.0972398585586258, abs=1e-3)
        assert ref_exact.y_min == pytest.approx(235211511941.4, rel=1e-3)
        assert ref_exact.y_min > ref_reduced.y_min

    def test_invalid_arguments(self, table2_problem):
        with pytest.raises(DomainError):
            find_reference_beta(table2_problem, bracket=(1.0, 0.5))
        with pytest.raises(DomainError):
            find_reference_beta(table2_problem, bracket=(-0.1, 1.0))
        with pytest.raises(DomainError):
            find_reference_beta(table2_problem, bracket=(0.0, 1.0), tol=0.0)
        with pytest.raises(DomainError):
            find_reference_beta(table2_problem, bracket=(0.0, 1.0), scan_points=1)


class TestSweep:
    def test_grid_is_inclusive_and_increasing(self, table2_problem):
        result = sweep(table2_problem, 0.0, 0.8, 801)
        assert result.betas[0] == 0.0
        assert result.betas[-1] == 0.8
        assert len(result.betas) == 801
        assert all(b2 > b1 for b1, b2 in zip(result.betas, result.betas[1:]))

    def test_each_grid_point_conserves_cap(self, table2_problem):
        result = sweep(table2_problem, 0.0, 0.8, 81)
        for k in range(len(result.betas)):
            total = sum(curve[k] for curve in result.curves.values())
            assert total == pytest.approx(result.total_permits, rel=1e-9)

    def test_values_match_fresh_allocate_bit_for_bit(self, table2_problem):
        result = sweep(table2_problem, 0.0, 0.8, 41)
        for k in (0, 7, 23, 40):
            fresh = allocate(table2_problem, result.betas[k])
            for name in table2_problem.names:
                assert result.curves[name][k] == fresh.allocations[name]
            assert result.objective[k] == objective_y(table2_problem, result.betas[k])

    def test_fixture_curve_shapes(self, table2_problem):
        result = sweep(table2_problem, 0.0, 0.8, 801)
        china, us, italy = result.curves["China"], result.curves["US"], result.curves["Italy"]
        assert all(b > a for a, b in zip(us, us[1:]))
        assert all(b < a for a, b in zip(china, china[1:]))
        assert all(b < a for a, b in zip(italy, italy[1:]))
        # population-proportional start: China holds the largest share at zero
        assert china[0] == max(curve[0] for curve in result.curves.values())
        assert us[-1] > 0.9 * result.total_permits

    def test_two_steps_are_exactly_the_endpoints(self, table2_problem):
        result = sweep(table2_problem, 0.1, 0.4, 2)
        assert result.betas == (0.1, 0.4)

    def test_invalid_grids(self, table2_problem):
        with pytest.raises(DomainError):
            sweep(table2_problem, 0.3, 0.3, 10)
        with pytest.raises(DomainError):
            sweep(table2_problem, -0.1, 0.3, 10)
        with pytest.raises(DomainError):
            sweep(table2_problem, 0.0, 0.8, 1)


class TestDemandCrossings:
    def test_fixture_roots(self, table2_problem):
        report = find_demand_crossings(table2_problem, bracket=(0.0, 1.0))
        assert [r.beta for r in report.roots["US"]] == [
            pytest.approx(ORACLE_ROOTS["US"], abs=1e-5)
        ]
        assert [r.beta for r in report.roots["China"]] == [
            pytest.approx(ORACLE_ROOTS["China"], abs=1e-5)
        ]
        assert [r.beta for r in report.roots["Italy"]] == [
            pytest.approx(ORACLE_ROOTS["Italy"], abs=1e-5)
        ]
        canada = [r.beta for r in report.roots["Canada"]]
        assert canada == [
            pytest.approx(ORACLE_ROOTS["Canada"][0], abs=1e-5),
            pytest.approx(ORACLE_ROOTS["Canada"][1], abs=1e-5),
        ]
        for name in ("Germany", "Japan", "Russia", "UK"):
            assert report.roots[name] == ()

    def test_root_directions(self, table2_problem):
        report = find_demand_crossings(table2_problem)
        assert [r.direction for r in report.roots["US"]] == ["rising"]
        assert [r.direction for r in report.roots["China"]] == ["falling"]
        assert [r.direction for r in report.roots["Italy"]] == ["falling"]
        assert [r.direction for r in report.roots["Canada"]] == ["rising", "falling"]

    def test_residual_certificates(self, table2_problem):
        report = find_demand_crossings(table2_problem)
        demands = {a.name: a.demand for a in table2_problem.agents}
        for name, roots in report.roots.items():
            for root in roots:
                alloc = allocate(table2_problem, root.beta).allocations[name]
                assert abs(alloc - demands[name]) <= demands[name] * 1e-6

    def test_roots_strictly_increasing(self, table2_problem):
        report = find_demand_crossings(table2_problem)
        for roots in report.roots.values():
            betas = [r.beta for r in roots]
            assert betas == sorted(betas)
            assert len(set(betas)) == len(betas)

    def test_roots_verified_by_independent_brentq(self, table2_problem):
        report = find_demand_crossings(table2_problem)
        names = list(table2_problem.names)
        cap = table2_problem.total_permits
        for name, roots in report.roots.items():
            i = names.index(name)
            demand = table2_problem.agents[i].demand

            def g(beta):
                return cap * boltzmann_probabilities(table2_problem, beta)[i] - demand

            for root in roots:
                independent = optimize.brentq(g, root.beta - 1e-3, root.beta + 1e-3, xtol=1e-12)
                assert root.beta == pytest.approx(independent, abs=1e-6)

    def test_second_canada_root_needs_wider_bracket(self, table2_problem):
        narrow = find_demand_crossings(table2_problem, bracket=(0.0, 0.7))
        assert len(narrow.roots["Canada"]) == 1
        wide = find_demand_crossings(table2_problem, bracket=(0.0, 1.0))
        assert len(wide.roots["Canada"]) == 2

    def test_identically_zero_flagged(self):
        problem = single_agent_problem(cap=42.0, demand=42.0)
        report = find_demand_crossings(problem)
        assert report.identically_zero == frozenset({"solo"})
        assert report.roots["solo"] == ()

    def test_crossovers_listed_in_bracket(self, table2_problem):
        report = find_demand_crossings(table2_problem)
        pairs = {(c.agent_a, c.agent_b): c.beta for c in report.crossovers}
        assert pairs[("China", "US")] == pytest.approx(ORACLE_CROSSOVER_CN_US, abs=1e-12)
        assert all(0.0 <= beta <= 1.0 for beta in pairs.values())
        assert ("US", "Canada") not in pairs and ("Canada", "US") not in pairs

    def test_invalid_arguments(self, table2_problem):
        with pytest.raises(DomainError):
            find_demand_crossings(table2_problem, bracket=(0.5, 0.5))
        with pytest.raises(DomainError):
            find_demand_crossings(table2_problem, scan_steps=1)


class TestPairwiseCrossover:
    def test_china_us(self, table2_problem):
        result = find_pairwise_crossover(table2_problem, "China", "US", bracket=(0.0, 1.0))
        assert result.beta == pytest.approx(ORACLE_CROSSOVER_CN_US, abs=1e-12)
        assert abs(result.bisection - result.closed_form) <= 1e-9
        assert not result.degenerate

    def test_symmetry_of_arguments(self, table2_problem):
        ab = find_pairwise_crossover(table2_problem, "China", "US")
        ba = find_pairwise_crossover(table2_problem, "US", "China")
        assert ab.beta == pytest.approx(ba.beta, abs=1e-15)

    def test_identical_agents_degenerate(self):
        problem = symmetric_two_agent_problem()
        result = find_pairwise_crossover(problem, "a", "b")
        assert result.degenerate
        assert result.beta is None

    def test_equal_energy_unequal_weight_has_no_crossover(self):
        agents = (Agent("a", 3.0, demand=1.0), Agent("b", 1.0, demand=1.0))
        problem = AllocationProblem(
            agents, 10.0, potential=ExplicitPotential({"a": -1.0, "b": -1.0})
        )
        result = find_pairwise_crossover(problem, "a", "b")
        assert result.beta is None
        assert not result.degenerate

    def test_equal_weights_cross_at_zero(self):
        agents = (Agent("a", 2.0), Agent("b", 2.0))
        problem = AllocationProblem(
            agents, 10.0, potential=ExplicitPotential({"a": -2.0, "b": -1.0})
        )
        result = find_pairwise_crossover(problem, "a", "b", bracket=(0.0, 1.0))
        assert result.closed_form == 0.0
        assert result.beta == 0.0
        assert result.bisection == 0.0

    def test_out_of_bracket_returns_none_but_keeps_closed_form(self, table2_problem):
        result = find_pairwise_crossover(table2_problem, "China", "US", bracket=(0.2, 0.5))
        assert result.beta is None
        assert result.closed_form == pytest.approx(ORACLE_CROSSOVER_CN_US, abs=1e-12)

    def test_unknown_agent(self, table2_problem):
        with pytest.raises(ValidationError):
            find_pairwise_crossover(table2_problem, "China", "Atlantis")

    def test_closed_form_agreement_for_every_fixture_pair(self, table2_problem):
        names = table2_problem.names
        energies = potential_energies(table2_problem)
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                if energies[i] == energies[j]:
                    continue
                result = find_pairwise_crossover(table2_problem, names[i], names[j])
                if result.beta is not None and result.bisection is not None:
                    assert abs(result.bisection - result.closed_form) <= 1e-9
