"""Command line front end: ``ocata <command> [files]``."""

from __future__ import annotations

import argparse
import logging
from collections.abc import Sequence
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from pydantic import BaseModel
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape

from .channels import build_reduction_ata, decode_encoding, validate_encoding
from .config import PRUNING_MODES, REPORT_FORMATS, consume_config_warnings, get_config, set_config
from .decision import check_contains, check_empty, check_universal
from .errors import ChannelSystemError, OcataError, SearchBudgetExceeded
from .report import (
    BudgetReport,
    DecisionReport,
    EncodingValidationReport,
    ErrorReport,
    MembershipReport,
)
from .semantics import accepts
from .syntax import parse_ata, parse_lcs, parse_word, print_ata

logger = logging.getLogger(__name__)

try:
    VERSION = version("ocata")
except PackageNotFoundError:
    VERSION = "0.1.0"

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT_ERROR = 2
EXIT_BUDGET = 3


class _Output:
    def __init__(self, console: Console, fmt: str) -> None:
        self.console = console
        self.json = fmt == "json"

    def emit(self, report: BaseModel, lines: Sequence[str]) -> None:
        if self.json:
            self.console.out(report.model_dump_json(indent=2), highlight=False)
        else:
            for line in lines:
                self.console.print(line)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _decision_lines(report: DecisionReport) -> list[str]:
    lines = [f"[bold]{report.verdict}[/bold]"]
    if report.witness is not None:
        lines.append(f"witness: {escape(report.witness) or 'ε (empty word)'}")
    lines.append(
        f"[dim]{report.nodes_expanded} expanded, {report.nodes_pruned} pruned, "
        f"{report.elapsed_ms} ms[/dim]"
    )
    return lines


def _cmd_member(args: argparse.Namespace, out: _Output) -> int:
    a = parse_ata(_read(args.automaton))
    w = parse_word(_read(args.word))
    accepted = accepts(a, w)
    report = MembershipReport(verdict="accepted" if accepted else "rejected", word=str(w))
    out.emit(report, [f"[bold]{report.verdict}[/bold]"])
    return EXIT_OK if accepted else EXIT_NEGATIVE


def _cmd_empty(args: argparse.Namespace, out: _Output) -> int:
    result = check_empty(parse_ata(_read(args.automaton)))
    report = DecisionReport.from_emptiness("empty", result)
    out.emit(report, _decision_lines(report))
    return EXIT_OK if result.is_empty else EXIT_NEGATIVE


def _cmd_universal(args: argparse.Namespace, out: _Output) -> int:
    result = check_universal(parse_ata(_read(args.automaton)))
    report = DecisionReport.from_language("universal", result)
    out.emit(report, _decision_lines(report))
    return EXIT_OK if result.holds else EXIT_NEGATIVE


def _cmd_contains(args: argparse.Namespace, out: _Output) -> int:
    a = parse_ata(_read(args.left))
    b = parse_ata(_read(args.right))
    result = check_contains(a, b)
    report = DecisionReport.from_language("contains", result)
    out.emit(report, _decision_lines(report))
    return EXIT_OK if result.holds else EXIT_NEGATIVE


def _cmd_gen_lcs(args: argparse.Namespace, out: _Output) -> int:
    problem = parse_lcs(_read(args.system))
    ata = build_reduction_ata(problem.system, problem.goal.state, problem.goal.channel)
    text = print_ata(ata)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        logger.info("wrote %d locations to %s", len(ata.locations), args.out)
    else:
        out.console.out(text, end="", highlight=False)
    return EXIT_OK


def _cmd_validate_encoding(args: argparse.Namespace, out: _Output) -> int:
    problem = parse_lcs(_read(args.system))
    w = parse_word(_read(args.word))
    result = validate_encoding(w, problem.system, problem.goal.state, problem.goal.channel)
    try:
        encoding = decode_encoding(w, problem.system)
    except ChannelSystemError:
        encoding = None
    report = EncodingValidationReport.from_result(result, encoding)
    out.emit(report, [f"[bold]{report.verdict}[/bold]", escape(str(result))])
    return EXIT_OK if result.ok else EXIT_NEGATIVE


def _cmd_print(args: argparse.Namespace, out: _Output) -> int:
    out.console.out(print_ata(parse_ata(_read(args.automaton))), end="", highlight=False)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ocata", description="One-clock alternating timed automata toolkit"
    )
    parser.add_argument("--version", action="version", version=f"ocata {VERSION}")
    parser.add_argument("--report", choices=REPORT_FORMATS, help="Output format")
    parser.add_argument(
        "--budget", type=float, metavar="SECONDS", help="Wall-clock bound for decision runs"
    )
    parser.add_argument("--pruning", choices=PRUNING_MODES, help="Search node pruning rule")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log search progress")
    commands = parser.add_subparsers(dest="command", required=True)

    member = commands.add_parser("member", help="Check whether a word is accepted")
    member.add_argument("automaton")
    member.add_argument("word")
    member.set_defaults(handler=_cmd_member)

    empty = commands.add_parser("empty", help="Decide language emptiness")
    empty.add_argument("automaton")
    empty.set_defaults(handler=_cmd_empty)

    universal = commands.add_parser("universal", help="Decide universality")
    universal.add_argument("automaton")
    universal.set_defaults(handler=_cmd_universal)

    contains = commands.add_parser("contains", help="Decide whether L(LEFT) is within L(RIGHT)")
    contains.add_argument("left")
    contains.add_argument("right")
    contains.set_defaults(handler=_cmd_contains)

    gen = commands.add_parser("gen-lcs", help="Emit the automaton encoding a channel system")
    gen.add_argument("system")
    gen.add_argument("--out", help="Write the automaton here instead of stdout")
    gen.set_defaults(handler=_cmd_gen_lcs)

    validate = commands.add_parser("validate-encoding", help="Check a computation encoding")
    validate.add_argument("system")
    validate.add_argument("word")
    validate.set_defaults(handler=_cmd_validate_encoding)

    printer = commands.add_parser("print", help="Parse and pretty-print an automaton")
    printer.add_argument("automaton")
    printer.set_defaults(handler=_cmd_print)
    return parser


def _configure_logging(verbose: bool) -> None:
    handler = RichHandler(console=Console(stderr=True), show_path=False)
    handler.setFormatter(logging.Formatter("%(message)s"))
    package = logging.getLogger("ocata")
    package.handlers = [handler]
    package.setLevel(logging.DEBUG if verbose else logging.WARNING)
    package.propagate = False


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    overrides: dict[str, dict[str, object]] = {}
    if args.report is not None:
        overrides["report"] = {"format": args.report}
    if args.budget is not None:
        overrides["budget"] = {"seconds": args.budget}
    if args.pruning is not None:
        overrides["search"] = {"pruning": args.pruning}
    config = get_config()
    if overrides:
        config = config.with_overrides(overrides)
        set_config(config)

    out = _Output(Console(highlight=False), config.report.format)
    errors = Console(stderr=True, highlight=False)
    for warning in consume_config_warnings():
        errors.print(f"[yellow]warning:[/yellow] {escape(warning)}")
    try:
        return args.handler(args, out)
    except SearchBudgetExceeded as exc:
        report = BudgetReport.from_error(args.command, exc)
        out.emit(report, [f"[yellow]{escape(str(exc))}[/yellow]"])
        return EXIT_BUDGET
    except (OcataError, OSError) as exc:
        if out.json:
            out.emit(ErrorReport(command=args.command, error=str(exc)), [])
        errors.print(f"[red]error:[/red] {escape(str(exc))}")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
