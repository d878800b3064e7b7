"""Report assembly and rendering.

Every CLI run produces one envelope: the command, its fully resolved
parameters (enough to reproduce the run), the results payload, and the
dataset provenance.  Machine formats are deterministic: JSON key order is
construction order, CSV rows follow agent order then grid order, and floats
are written with full round-trip precision.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Mapping, Sequence

from .model import AllocationProblem, AllocationResult, round_half_up
from .solver import CrossingReport, CrossoverResult, ReferenceBetaResult, SweepResult

ALLOCATE_CSV_HEADER = ("country", "demand", "probability", "allocation", "difference", "class")
SWEEP_CSV_HEADER = ("beta", "country", "allocation", "objective")
SOLVE_CSV_HEADER = (
    "beta_star",
    "y_min",
    "bracket_lo",
    "bracket_hi",
    "iterations",
    "converged",
    "endpoint_minimum",
    "flat_objective",
)
CROSSINGS_CSV_HEADER = ("kind", "agent", "counterpart", "beta", "direction")
DIVIDE_CSV_HEADER = ("player", "weight", "potential", "probability", "share")


def _num(value: float) -> str:
    """Full-precision float text for machine output."""
    return repr(float(value))


def make_envelope(
    command: str,
    parameters: Mapping,
    results: Mapping,
    dataset_provenance: str,
) -> dict:
    return {
        "command": command,
        "parameters": dict(parameters),
        "results": dict(results),
        "dataset_provenance": dataset_provenance,
    }


def render_json(envelope: Mapping) -> str:
    return json.dumps(envelope, indent=2) + "\n"


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def _table_text(header: Sequence[str], rows: Sequence[Sequence[str]], footer: str = "") -> str:
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = []
    lines.append("  ".join(h.ljust(widths[i]) for i, h in enumerate(header)).rstrip())
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        cells = [
            cell.ljust(widths[i]) if i == 0 else cell.rjust(widths[i])
            for i, cell in enumerate(row)
        ]
        lines.append("  ".join(cells).rstrip())
    text = "\n".join(lines) + "\n"
    if footer:
        text += footer + "\n"
    return text


# ---------------------------------------------------------------------------
# allocate


def allocation_rows(problem: AllocationProblem, result: AllocationResult, classes: Mapping[str, str]):
    rows = []
    for agent in problem.agents:
        name = agent.name
        rows.append(
            {
                "country": name,
                "demand": agent.demand,
                "probability": result.probabilities[name],
                "allocation": result.allocations[name],
                "difference": result.differences[name],
                "class": classes[name],
            }
        )
    return rows


def allocation_payload(problem, result, classes, reference: ReferenceBetaResult | None = None) -> dict:
    payload = {
        "beta": result.beta,
        "total_permits": result.total_permits,
        "total_energy": result.total_energy,
        "agents": allocation_rows(problem, result, classes),
    }
    if reference is not None:
        payload["reference_beta"] = solve_payload(reference)
    return payload


def allocation_csv(problem, result, classes) -> str:
    rows = [
        [
            r["country"],
            _num(r["demand"]),
            _num(r["probability"]),
            _num(r["allocation"]),
            _num(r["difference"]),
            r["class"],
        ]
        for r in allocation_rows(problem, result, classes)
    ]
    return _csv_text(ALLOCATE_CSV_HEADER, rows)


def allocation_table(problem, result, classes) -> str:
    # mirrors the published presentation: probabilities at 2 decimals,
    # quantities rounded half-up to whole 1000 t units; the Total row rounds
    # the full-precision column sums
    rows = []
    for r in allocation_rows(problem, result, classes):
        demand_i = round_half_up(r["demand"])
        alloc_i = round_half_up(r["allocation"])
        rows.append(
            [
                r["country"],
                f"{demand_i:,}",
                f"{r['probability']:.2f}",
                f"{alloc_i:,}",
                f"{alloc_i - demand_i:,}",
                r["class"],
            ]
        )
    total_demand = round_half_up(sum(a.demand for a in problem.agents))
    total_alloc = round_half_up(result.total_permits)
    total_prob = sum(result.probabilities.values())
    rows.append(
        [
            "Total",
            f"{total_demand:,}",
            f"{total_prob:.2f}",
            f"{total_alloc:,}",
            f"{total_alloc - total_demand:,}",
            "",
        ]
    )
    header = ("Country", "Demand", "Probability", "Allocation", "Difference", "Class")
    footer = (
        f"beta = {result.beta:g}; probabilities are shown at 2 decimals, "
        "full-precision values sum to 1 exactly"
    )
    return _table_text(header, rows, footer)


# ---------------------------------------------------------------------------
# sweep


def sweep_payload(sweep: SweepResult) -> dict:
    return {
        "betas": list(sweep.betas),
        "curves": {name: list(values) for name, values in sweep.curves.items()},
        "objective": list(sweep.objective),
        "total_permits": sweep.total_permits,
    }


def _sweep_long_rows(sweep: SweepResult):
    for name, values in sweep.curves.items():  # agent order, then grid order
        for k, beta in enumerate(sweep.betas):
            yield beta, name, values[k], sweep.objective[k]


def sweep_csv(sweep: SweepResult) -> str:
    rows = [
        [_num(beta), name, _num(alloc), _num(obj)]
        for beta, name, alloc, obj in _sweep_long_rows(sweep)
    ]
    return _csv_text(SWEEP_CSV_HEADER, rows)


def sweep_table(sweep: SweepResult) -> str:
    rows = [
        [f"{beta:.6g}", name, f"{alloc:,.1f}", f"{obj:.6e}"]
        for beta, name, alloc, obj in _sweep_long_rows(sweep)
    ]
    return _table_text(("Beta", "Country", "Allocation", "Objective"), rows)


# ---------------------------------------------------------------------------
# solve-beta


def solve_payload(ref: ReferenceBetaResult) -> dict:
    return {
        "beta_star": ref.beta_star,
        "y_min": ref.y_min,
        "bracket": [ref.bracket[0], ref.bracket[1]],
        "iterations": ref.iterations,
        "converged": ref.converged,
        "endpoint_minimum": ref.endpoint_minimum,
        "flat_objective": ref.flat_objective,
    }


def solve_csv(ref: ReferenceBetaResult) -> str:
    row = [
        _num(ref.beta_star),
        _num(ref.y_min),
        _num(ref.bracket[0]),
        _num(ref.bracket[1]),
        str(ref.iterations),
        str(ref.converged).lower(),
        str(ref.endpoint_minimum).lower(),
        str(ref.flat_objective).lower(),
    ]
    return _csv_text(SOLVE_CSV_HEADER, [row])


def solve_table(ref: ReferenceBetaResult) -> str:
    rows = [
        ["beta_star", f"{ref.beta_star:.6f}"],
        ["y_min", f"{ref.y_min:.6e}"],
        ["bracket", f"[{ref.bracket[0]:g}, {ref.bracket[1]:g}]"],
        ["iterations", str(ref.iterations)],
        ["converged", str(ref.converged).lower()],
        ["endpoint_minimum", str(ref.endpoint_minimum).lower()],
        ["flat_objective", str(ref.flat_objective).lower()],
    ]
    return _table_text(("Field", "Value"), rows)


# ---------------------------------------------------------------------------
# crossings


def crossings_payload(report: CrossingReport) -> dict:
    return {
        "bracket": [report.bracket[0], report.bracket[1]],
        "roots": {
            name: [{"beta": r.beta, "direction": r.direction} for r in roots]
            for name, roots in report.roots.items()
        },
        "identically_zero": sorted(report.identically_zero),
        "crossovers": [
            {"agent_a": c.agent_a, "agent_b": c.agent_b, "beta": c.beta}
            for c in report.crossovers
        ],
    }


def _crossing_rows(report: CrossingReport):
    for name, roots in report.roots.items():
        if name in report.identically_zero:
            yield ("demand_crossing", name, "", "", "identically_zero")
        elif not roots:
            yield ("demand_crossing", name, "", "", "none")
        else:
            for r in roots:
                yield ("demand_crossing", name, "", r.beta, r.direction)
    for c in report.crossovers:
        yield ("pairwise_crossover", c.agent_a, c.agent_b, c.beta, "")


def crossings_csv(report: CrossingReport) -> str:
    rows = [
        [kind, agent, counterpart, _num(beta) if beta != "" else "", direction]
        for kind, agent, counterpart, beta, direction in _crossing_rows(report)
    ]
    return _csv_text(CROSSINGS_CSV_HEADER, rows)


def crossings_table(report: CrossingReport) -> str:
    rows = [
        [
            kind,
            agent,
            counterpart or "-",
            f"{beta:.6f}" if beta != "" else "-",
            direction or "-",
        ]
        for kind, agent, counterpart, beta, direction in _crossing_rows(report)
    ]
    header = ("Kind", "Agent", "Counterpart", "Beta", "Direction")
    return _table_text(header, rows)


# ---------------------------------------------------------------------------
# divide


def divide_rows(players, result: AllocationResult):
    rows = []
    for name, weight, potential in players:
        rows.append(
            {
                "player": name,
                "weight": weight,
                "potential": potential,
                "probability": result.probabilities[name],
                "share": result.allocations[name],
            }
        )
    return rows


def divide_payload(players, result: AllocationResult) -> dict:
    return {
        "beta": result.beta,
        "total_good": result.total_permits,
        "players": divide_rows(players, result),
    }


def divide_csv(players, result: AllocationResult) -> str:
    rows = [
        [
            r["player"],
            _num(r["weight"]),
            _num(r["potential"]),
            _num(r["probability"]),
            _num(r["share"]),
        ]
        for r in divide_rows(players, result)
    ]
    return _csv_text(DIVIDE_CSV_HEADER, rows)


def divide_table(players, result: AllocationResult) -> str:
    rows = [
        [
            r["player"],
            f"{r['weight']:g}",
            f"{r['potential']:g}",
            f"{r['probability']:.4f}",
            f"{r['share']:.6g}",
        ]
        for r in divide_rows(players, result)
    ]
    rows.append(
        [
            "Total",
            f"{sum(w for _, w, _ in players):g}",
            "",
            f"{sum(result.probabilities.values()):.4f}",
            f"{result.total_permits:.6g}",
        ]
    )
    header = ("Player", "Weight", "Potential", "Probability", "Share")
    footer = f"beta = {result.beta:g}"
    return _table_text(header, rows, footer)
