"""Exception hierarchy shared by every ocata module."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .automaton import PartitionReport


class OcataError(Exception):
    pass


class IllFormedAutomatonError(OcataError):
    pass


class PartitionError(IllFormedAutomatonError):
    def __init__(self, report: PartitionReport, message: str | None = None) -> None:
        self.report = report
        super().__init__(message or report.describe())


class AlphabetMismatchError(OcataError):
    pass


class TimedWordError(OcataError):
    pass


class InvalidPathError(OcataError):
    pass


class InvalidRunError(OcataError):
    pass


class ChannelSystemError(OcataError):
    pass


class SearchBudgetExceeded(OcataError):
    def __init__(self, message: str, nodes_expanded: int, nodes_pruned: int, elapsed_ms: int):
        self.nodes_expanded = nodes_expanded
        self.nodes_pruned = nodes_pruned
        self.elapsed_ms = elapsed_ms
        super().__init__(message)


class OcataSyntaxError(OcataError):
    kind = "syntax"

    def __init__(self, message: str, line: int, column: int) -> None:
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{self.kind} error at {line}:{column}: {message}")


class AtaSyntaxError(OcataSyntaxError):
    kind = "ata syntax"


class WordSyntaxError(OcataSyntaxError):
    kind = "word syntax"


class LcsSyntaxError(OcataSyntaxError):
    kind = "lcs syntax"
