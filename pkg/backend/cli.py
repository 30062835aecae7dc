#!/usr/bin/env python3
"""
Command line front end for the lattice pricer

Reads a JSON scenario, runs one pricing command and prints a human table,
JSON (--json) or CSV (--csv) on stdout. Logs go to stderr.

Exit codes: 0 ok, 2 input error, 3 domain error.
"""

import argparse
import csv
import io
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import structlog
from pydantic import BaseModel, ValidationError

from config import settings, validate_settings
from app.core.errors import InvalidParameters, PricingError
from app.core.logging import configure_logging
from app.models.schemas import ScenarioSchema
from app.services.engine import PricingEngine

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DOMAIN = 3

Pairs = List[Tuple[str, object]]
Table = Tuple[List[str], List[list]]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, help="Path to the scenario JSON file")
    output = common.add_mutually_exclusive_group()
    output.add_argument("--json", action="store_true", help="Print the report as JSON")
    output.add_argument("--csv", action="store_true", help="Print the report table as CSV")
    common.add_argument("--log-level", default=None, help="structlog level (default: settings)")

    parser = argparse.ArgumentParser(
        prog="lattice-pricer",
        description="Binomial lattice pricing by static hedging",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    price = commands.add_parser("price", parents=[common], help="Price the scenario payoff")
    price.add_argument("--verify", action="store_true", help="Cross-check against the other oracles")

    hedge = commands.add_parser("hedge", parents=[common], help="AD hedge ledger of a trajectory")
    hedge.add_argument("--trajectory", default=None, help='Moves such as "1,0,1" (1 = up)')

    commands.add_parser("digital", parents=[common], help="Degenerate digital priced three ways")

    invariance = commands.add_parser(
        "invariance", parents=[common], help="Per-time sums of the value grid"
    )
    invariance.add_argument("--strikes", default=None, help='Terminal strikes such as "81,108"')
    invariance.add_argument(
        "--counterexample",
        action="store_true",
        help="Add the standard-tree (bond, state count) pair",
    )

    converge = commands.add_parser("converge", parents=[common], help="CRR to BSM convergence")
    converge.add_argument("--steps", default=None, help='Step counts such as "16,64,256"')

    walk = commands.add_parser("walk", parents=[common], help="Backward random walk hit probability")
    walk.add_argument("--seed", type=int, default=None, help="Monte Carlo seed")
    walk.add_argument("--mc-paths", type=int, default=None, help="Monte Carlo sample count")

    return parser


def _split(text: str, convert, name: str) -> list:
    items = [item.strip() for item in text.split(",") if item.strip()]
    try:
        return [convert(item) for item in items]
    except ValueError:
        raise InvalidParameters(f"cannot parse {name} {text!r}", field=name)


def load_scenario(path: str) -> ScenarioSchema:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InvalidParameters(f"cannot read scenario file: {e.strerror}", field="scenario")
    return ScenarioSchema.model_validate_json(text)


def run(args: argparse.Namespace, engine: PricingEngine) -> BaseModel:
    scenario = load_scenario(args.scenario)

    if args.command == "price":
        return engine.price(scenario, verify=args.verify)
    if args.command == "hedge":
        return engine.hedge(scenario, args.trajectory)
    if args.command == "digital":
        return engine.digital(scenario)
    if args.command == "invariance":
        strikes = None if args.strikes is None else _split(args.strikes, float, "strikes")
        return engine.invariance(scenario, strikes=strikes, counterexample=args.counterexample)
    if args.command == "converge":
        counts = None if args.steps is None else _split(args.steps, int, "steps")
        return engine.converge(scenario, step_counts=counts)
    return engine.walk(scenario, mc_paths=args.mc_paths, seed=args.seed)


# Report layout
def sections(report: BaseModel) -> Tuple[Pairs, Optional[Table]]:
    """Summary pairs and the main table of a report"""
    data = report.model_dump()
    data.pop("warnings", None)
    rows = data.pop("rows", None)
    if rows is None:
        return [(k, v) for k, v in data.items() if v is not None], None

    counterexample = data.pop("counterexample", None)
    if counterexample is not None:
        data["counterexample_bond"], data["counterexample_states"] = counterexample
    sensitivity = data.pop("sensitivity", None) or {}
    data.update(sensitivity)

    headers = list(rows[0]) if rows else _row_headers(report)
    summary = [(k, v) for k, v in data.items() if v is not None and not isinstance(v, list)]
    return summary, (headers, [[row[h] for h in headers] for row in rows])


def _row_headers(report: BaseModel) -> List[str]:
    row_model = type(report).model_fields["rows"].annotation.__args__[0]
    return list(row_model.model_fields)


def format_value(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.{settings.significant_digits}g}"
    return str(value)


def render_human(report: BaseModel) -> str:
    summary, table = sections(report)
    lines = []
    if summary:
        width = max(len(key) for key, _ in summary)
        lines.extend(f"{key.ljust(width)}  {format_value(value)}" for key, value in summary)

    if table is not None:
        headers, rows = table
        cells = [[format_value(v) for v in row] for row in rows]
        widths = [
            max([len(h)] + [len(row[i]) for row in cells]) for i, h in enumerate(headers)
        ]
        if lines:
            lines.append("")
        lines.append("  ".join(h.rjust(w) for h, w in zip(headers, widths)))
        lines.extend("  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells)
    return "\n".join(lines) + "\n"


def render_csv(report: BaseModel) -> str:
    summary, table = sections(report)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if table is None:
        writer.writerow([key for key, _ in summary])
        writer.writerow([value for _, value in summary])
    else:
        headers, rows = table
        writer.writerow(headers)
        writer.writerows(rows)
    return buffer.getvalue()


def render(report: BaseModel, args: argparse.Namespace) -> str:
    if args.json:
        return report.model_dump_json(indent=2) + "\n"
    if args.csv:
        return render_csv(report)
    return render_human(report)


def _validation_field(error: ValidationError) -> str:
    first = error.errors()[0] if error.errors() else {}
    return ".".join(str(part) for part in first.get("loc", ())) or "scenario"


def fail(code: int, name: str, message: str, field: Optional[str]) -> int:
    suffix = f" (field: {field})" if field else ""
    print(f"error: {name}: {message}{suffix}", file=sys.stderr)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)

    try:
        validate_settings()
    except ValueError as e:
        return fail(EXIT_INPUT, "Settings", str(e), None)

    try:
        report = run(args, PricingEngine())
    except ValidationError as e:
        first = e.errors()[0]["msg"] if e.errors() else str(e)
        return fail(EXIT_INPUT, "ValidationError", first, _validation_field(e))
    except InvalidParameters as e:
        return fail(EXIT_INPUT, e.code, str(e), e.field)
    except PricingError as e:
        return fail(EXIT_DOMAIN, e.code, str(e), e.field)

    for warning in getattr(report, "warnings", []):
        print(f"warning: {warning}", file=sys.stderr)
    logger.debug("command_done", command=args.command)
    sys.stdout.write(render(report, args))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
