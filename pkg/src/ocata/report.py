"""Serializable reports printed by the command line front end."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel

from .channels import ComputationEncoding, EncodingReport
from .decision import EmptinessVerdict, LanguageVerdict, RegionPath
from .errors import SearchBudgetExceeded


def _path_lines(path: RegionPath | None) -> list[str] | None:
    if path is None:
        return None
    return [str(path.root), *(f"{letter}: {word}" for letter, word in path.steps)]


class DecisionReport(BaseModel):
    command: str
    verdict: str
    witness: str | None = None
    region_path: list[str] | None = None
    nodes_expanded: int = 0
    nodes_pruned: int = 0
    elapsed_ms: int = 0

    @classmethod
    def from_emptiness(cls, command: str, result: EmptinessVerdict) -> DecisionReport:
        return cls(
            command=command,
            verdict=result.verdict.value,
            witness=None if result.witness is None else str(result.witness),
            region_path=_path_lines(result.path),
            nodes_expanded=result.stats.nodes_expanded,
            nodes_pruned=result.stats.nodes_pruned,
            elapsed_ms=result.stats.elapsed_ms,
        )

    @classmethod
    def from_language(cls, command: str, result: LanguageVerdict) -> DecisionReport:
        report = cls.from_emptiness(command, result.emptiness)
        return report.model_copy(update={"verdict": result.verdict.value})


class BudgetReport(BaseModel):
    command: str
    verdict: Literal["budget-exhausted"] = "budget-exhausted"
    nodes_expanded: int
    nodes_pruned: int
    elapsed_ms: int

    @classmethod
    def from_error(cls, command: str, error: SearchBudgetExceeded) -> BudgetReport:
        return cls(
            command=command,
            nodes_expanded=error.nodes_expanded,
            nodes_pruned=error.nodes_pruned,
            elapsed_ms=error.elapsed_ms,
        )


class MembershipReport(BaseModel):
    command: Literal["member"] = "member"
    verdict: Literal["accepted", "rejected"]
    word: str


class SegmentReport(BaseModel):
    state: str
    time: str
    rule: str | None = None
    channel: list[str] = []


class EncodingValidationReport(BaseModel):
    command: Literal["validate-encoding"] = "validate-encoding"
    verdict: Literal["valid", "invalid"]
    condition: str | None = None
    message: str = ""
    step: int | None = None
    segments: list[SegmentReport] | None = None

    @classmethod
    def from_result(
        cls, result: EncodingReport, encoding: ComputationEncoding | None
    ) -> EncodingValidationReport:
        segments = None
        if encoding is not None:
            segments = [
                SegmentReport(
                    state=s.state,
                    time=str(s.state_time),
                    rule=None if s.rule is None else str(s.rule),
                    channel=[f"{letter}@{t}" for letter, t in s.channel],
                )
                for s in encoding.segments
            ]
        return cls(
            verdict="valid" if result.ok else "invalid",
            condition=None if result.condition is None else result.condition.value,
            message=result.message,
            step=result.step,
            segments=segments,
        )


class ErrorReport(BaseModel):
    command: str
    verdict: Literal["error"] = "error"
    error: str
