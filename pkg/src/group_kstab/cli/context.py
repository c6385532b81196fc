"""Shared pipeline context and stage primitives."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any, ClassVar, Literal

from rich.console import Console

from group_kstab.config import Settings
from group_kstab.errors import KStabError
from group_kstab.problem import ANALYSES, ProblemSpec

if TYPE_CHECKING:
    from group_kstab.criteria import AnalysisReport
    from group_kstab.kenergy import MinimizeResult
    from group_kstab.polyint import ChamberPolytope
    from group_kstab.rootdata import RootSystem
    from group_kstab.soliton import SolitonField

StageId = Literal["rootdata", "chamber", "criteria", "soliton", "kenergy"]
CandidateKind = Literal["guillemin", "flat"]


@dataclass(frozen=True)
class StageResult:
    ok: bool = True
    abort: bool = False
    section: dict[str, Any] | None = None
    warnings: tuple[str, ...] = ()
    error: KStabError | None = None

    @property
    def exit_code(self) -> int:
        return 0 if self.error is None else self.error.exit_code


@dataclass
class PipelineState:
    """Objects built by earlier stages and consumed by later ones."""

    root_system: RootSystem | None = None
    chamber: ChamberPolytope | None = None
    analysis: AnalysisReport | None = None
    soliton: SolitonField | None = None
    minimize: MinimizeResult | None = None


@dataclass(frozen=True)
class KEnergyRequest:
    """What the kenergy stage evaluates and whether it minimizes."""

    candidate: CandidateKind = "guillemin"
    candidate_file: Path | None = None
    minimize: bool = False
    allow_improper: bool = False


@dataclass(frozen=True)
class CliContext:
    console: Console
    problem: ProblemSpec
    settings: Settings
    analyses: tuple[str, ...] = ANALYSES
    kenergy: KEnergyRequest = field(default_factory=KEnergyRequest)
    state: PipelineState = field(default_factory=PipelineState)

    def wants(self, *names: str) -> bool:
        return any(name in self.analyses for name in names)

    def require_chamber(self) -> tuple[RootSystem, ChamberPolytope]:
        rs, cp = self.state.root_system, self.state.chamber
        if rs is None or cp is None:
            raise RuntimeError("Chamber polytope requested before the chamber stage ran")
        return rs, cp


class Stage(ABC):
    label: str
    stage_id: ClassVar[StageId]
    section_key: ClassVar[str]
    serves: ClassVar[tuple[str, ...]] = ANALYSES

    @abstractmethod
    def run(self, ctx: CliContext) -> StageResult: ...
