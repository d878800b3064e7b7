"""Command-line front end.

Subcommands: allocate, sweep, solve-beta, crossings, divide.  Machine output
(csv/json) is byte-deterministic for identical inputs.  Exit codes: 0 on
success, 2 on input or validation problems, 1 on internal numeric failure.
"""

from __future__ import annotations

import argparse
import sys

from . import dataset as ds
from . import report, solver
from .errors import BoltzallocError, DomainError, NumericalError
from .model import allocate, classify_traders, fair_divide

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_INPUT = 2


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--format", choices=("table", "csv", "json"), default="table",
        help="output rendering (default: table)",
    )
    p.add_argument("--out", default=None, help="write the report to this file instead of stdout")
    p.add_argument("--figure", default=None, help="also render a figure to this file")


def _add_dataset_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--data", required=True,
        help="dataset CSV path, or the bundled name 'table2' / 'table2_8countries'",
    )
    cap = p.add_mutually_exclusive_group(required=True)
    cap.add_argument("--reduction", type=float, default=None,
                     help="cap = (1 - reduction) * summed baselines")
    cap.add_argument("--cap", type=float, default=None, help="explicit cap (1000 t)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boltzalloc",
        description="Boltzmann-weighted allocation of a capped resource",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("allocate", help="allocate the cap at one beta (or beta=solve)")
    _add_dataset_flags(p)
    p.add_argument("--beta", required=True,
                   help="sharpness parameter >= 0, or 'solve' for the least-squares reference")
    p.add_argument("--bracket-lo", type=float, default=0.0, help="solve bracket low (beta=solve)")
    p.add_argument("--bracket-hi", type=float, default=1.0, help="solve bracket high (beta=solve)")
    p.add_argument("--tol", type=float, default=1e-6, help="solve refinement tolerance")
    _add_output_flags(p)

    p = sub.add_parser("sweep", help="evaluate allocation curves on a beta grid")
    _add_dataset_flags(p)
    p.add_argument("--beta-min", type=float, default=0.0)
    p.add_argument("--beta-max", type=float, default=0.8)
    p.add_argument("--steps", type=int, default=801)
    _add_output_flags(p)

    p = sub.add_parser("solve-beta", help="find the least-squares reference beta")
    _add_dataset_flags(p)
    p.add_argument("--bracket-lo", type=float, default=0.0)
    p.add_argument("--bracket-hi", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--scan-points", type=int, default=solver.DEFAULT_SCAN_POINTS)
    _add_output_flags(p)

    p = sub.add_parser("crossings", help="betas where allocations meet demands")
    _add_dataset_flags(p)
    p.add_argument("--bracket-lo", type=float, default=0.0)
    p.add_argument("--bracket-hi", type=float, default=1.0)
    p.add_argument("--scan-steps", type=int, default=solver.DEFAULT_SCAN_POINTS)
    _add_output_flags(p)

    p = sub.add_parser("divide", help="divide a good among weighted players")
    p.add_argument("--player", action="append", default=None, metavar="NAME:WEIGHT:POTENTIAL",
                   help="inline player triple; repeatable")
    p.add_argument("--file", default=None,
                   help="CSV of players with header name,weight,potential")
    p.add_argument("--total", type=float, required=True, help="total amount of the good")
    p.add_argument("--beta", type=float, default=0.0, help="sharpness parameter >= 0")
    _add_output_flags(p)

    return parser


def _load_dataset(name_or_path: str) -> ds.Dataset:
    if name_or_path in ds.FIXTURE_ALIASES:
        return ds.load_fixture(name_or_path)
    return ds.parse_dataset(name_or_path)


def _problem_from_args(args):
    dataset = _load_dataset(args.data)
    problem = ds.to_problem(dataset, cap=args.cap, reduction=args.reduction)
    return dataset, problem


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dataset_params(args) -> dict:
    return {"data": args.data, "reduction": args.reduction, "cap": args.cap}


def _cmd_allocate(args) -> int:
    dataset, problem = _problem_from_args(args)
    reference = None
    if args.beta == "solve":
        reference = solver.find_reference_beta(
            problem, bracket=(args.bracket_lo, args.bracket_hi), tol=args.tol
        )
        beta = reference.beta_star
    else:
        try:
            beta = float(args.beta)
        except ValueError:
            raise DomainError(f"--beta must be a number or 'solve', got {args.beta!r}") from None
    result = allocate(problem, beta)
    classes = classify_traders(result)

    parameters = {
        **_dataset_params(args),
        "beta": args.beta if args.beta == "solve" else beta,
        **({"bracket_lo": args.bracket_lo, "bracket_hi": args.bracket_hi, "tol": args.tol}
           if args.beta == "solve" else {}),
    }
    envelope = report.make_envelope(
        "allocate",
        parameters,
        report.allocation_payload(problem, result, classes, reference),
        dataset.provenance,
    )
    if args.format == "json":
        text = report.render_json(envelope)
    elif args.format == "csv":
        text = report.allocation_csv(problem, result, classes)
    else:
        text = report.allocation_table(problem, result, classes)
    _emit(text, args.out)
    if args.figure:
        from . import figures

        figures.render_allocation(problem, result, args.figure)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    dataset, problem = _problem_from_args(args)
    result = solver.sweep(problem, args.beta_min, args.beta_max, args.steps)
    parameters = {
        **_dataset_params(args),
        "beta_min": args.beta_min,
        "beta_max": args.beta_max,
        "steps": args.steps,
    }
    envelope = report.make_envelope(
        "sweep", parameters, report.sweep_payload(result), dataset.provenance
    )
    if args.format == "json":
        text = report.render_json(envelope)
    elif args.format == "csv":
        text = report.sweep_csv(result)
    else:
        text = report.sweep_table(result)
    _emit(text, args.out)
    if args.figure:
        from . import figures

        demands = {a.name: a.demand for a in problem.agents}
        figures.render_sweep(result, demands, args.figure)
    return EXIT_OK


def _cmd_solve_beta(args) -> int:
    dataset, problem = _problem_from_args(args)
    ref = solver.find_reference_beta(
        problem,
        bracket=(args.bracket_lo, args.bracket_hi),
        tol=args.tol,
        scan_points=args.scan_points,
    )
    parameters = {
        **_dataset_params(args),
        "bracket_lo": args.bracket_lo,
        "bracket_hi": args.bracket_hi,
        "tol": args.tol,
        "scan_points": args.scan_points,
    }
    envelope = report.make_envelope(
        "solve-beta", parameters, report.solve_payload(ref), dataset.provenance
    )
    if args.format == "json":
        text = report.render_json(envelope)
    elif args.format == "csv":
        text = report.solve_csv(ref)
    else:
        text = report.solve_table(ref)
    _emit(text, args.out)
    if args.figure:
        from . import figures

        curve = solver.sweep(problem, args.bracket_lo, args.bracket_hi, 401)
        figures.render_objective(curve, ref, args.figure)
    return EXIT_OK


def _cmd_crossings(args) -> int:
    dataset, problem = _problem_from_args(args)
    crossings = solver.find_demand_crossings(
        problem, bracket=(args.bracket_lo, args.bracket_hi), scan_steps=args.scan_steps
    )
    parameters = {
        **_dataset_params(args),
        "bracket_lo": args.bracket_lo,
        "bracket_hi": args.bracket_hi,
        "scan_steps": args.scan_steps,
    }
    envelope = report.make_envelope(
        "crossings", parameters, report.crossings_payload(crossings), dataset.provenance
    )
    if args.format == "json":
        text = report.render_json(envelope)
    elif args.format == "csv":
        text = report.crossings_csv(crossings)
    else:
        text = report.crossings_table(crossings)
    _emit(text, args.out)
    if args.figure:
        from . import figures

        demands = {a.name: a.demand for a in problem.agents}
        curve = solver.sweep(problem, args.bracket_lo, args.bracket_hi, 401)
        figures.render_crossings(curve, demands, crossings, args.figure)
    return EXIT_OK


def _parse_player(text: str) -> tuple[str, float, float]:
    parts = text.rsplit(":", 2)
    if len(parts) != 3 or not parts[0]:
        raise DomainError(
            f"--player expects NAME:WEIGHT:POTENTIAL, got {text!r}"
        )
    try:
        return parts[0], float(parts[1]), float(parts[2])
    except ValueError:
        raise DomainError(
            f"--player expects numeric weight and potential, got {text!r}"
        ) from None


def _players_from_file(path: str) -> list[tuple[str, float, float]]:
    import csv as _csv

    with open(path, "r", encoding="utf-8-sig", newline="") as fh:
        reader = _csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DomainError(f"player file {path!r} is empty") from None
        if tuple(h.strip().lower() for h in header) != ("name", "weight", "potential"):
            raise DomainError(
                f"player file {path!r} must have header name,weight,potential"
            )
        players = []
        for row in reader:
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise DomainError(f"player file {path!r}: bad row {row!r}")
            try:
                players.append((row[0].strip(), float(row[1]), float(row[2])))
            except ValueError:
                raise DomainError(f"player file {path!r}: bad row {row!r}") from None
    return players


def _cmd_divide(args) -> int:
    if bool(args.player) == bool(args.file):
        raise DomainError("divide needs either --player triples or --file, not both")
    players = (
        [_parse_player(p) for p in args.player]
        if args.player
        else _players_from_file(args.file)
    )
    result = fair_divide(players, args.total, args.beta)
    parameters = {
        "players": [
            {"name": n, "weight": w, "potential": e} for n, w, e in players
        ],
        "file": args.file,
        "total": args.total,
        "beta": args.beta,
    }
    envelope = report.make_envelope(
        "divide", parameters, report.divide_payload(players, result), "inline players"
        if args.player else str(args.file),
    )
    if args.format == "json":
        text = report.render_json(envelope)
    elif args.format == "csv":
        text = report.divide_csv(players, result)
    else:
        text = report.divide_table(players, result)
    _emit(text, args.out)
    if args.figure:
        from . import figures

        figures.render_divide(players, result, args.figure)
    return EXIT_OK


_COMMANDS = {
    "allocate": _cmd_allocate,
    "sweep": _cmd_sweep,
    "solve-beta": _cmd_solve_beta,
    "crossings": _cmd_crossings,
    "divide": _cmd_divide,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        return _COMMANDS[args.command](args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BoltzallocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # internal failure
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
