"""Analysis pipeline runner."""

from __future__ import annotations

import logging
import time

from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Any

from group_kstab.cli.context import CliContext, Stage, StageResult
from group_kstab.errors import KStabError, ValidationError

logger = logging.getLogger(__name__)


@dataclass
class _RunAccumulator:
    ok: bool = True
    aborted: bool = False
    exit_code: int = 0
    sections: dict[str, dict[str, Any]] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    errors: list[KStabError] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    results: list[tuple[str, StageResult]] = field(default_factory=list)

    def fold(self, stage: Stage, result: StageResult, elapsed: float) -> None:
        self.results.append((stage.label, result))
        self.ok = self.ok and result.ok
        self.exit_code = max(self.exit_code, result.exit_code)
        self.timings[stage.stage_id] = elapsed
        if result.section is not None:
            self.sections[stage.section_key] = result.section
        for warning in result.warnings:
            if warning not in self.warnings:
                self.warnings.append(warning)
        if result.error is not None:
            self.errors.append(result.error)

    def to_result(self) -> StageRunResult:
        return StageRunResult(
            ok=self.ok,
            aborted=self.aborted,
            exit_code=self.exit_code,
            sections=self.sections,
            warnings=tuple(self.warnings),
            errors=tuple(self.errors),
            timings=self.timings,
            results=tuple(self.results),
        )


@dataclass(frozen=True)
class StageRunResult:
    ok: bool = True
    aborted: bool = False
    exit_code: int = 0
    sections: dict[str, dict[str, Any]] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()
    errors: tuple[KStabError, ...] = ()
    timings: dict[str, float] = field(default_factory=dict)
    results: tuple[tuple[str, StageResult], ...] = ()


def _should_skip(stage: Stage, ctx: CliContext) -> bool:
    return not ctx.wants(*stage.serves)


def _run_stage(stage: Stage, ctx: CliContext) -> StageResult:
    try:
        return stage.run(ctx)
    except KStabError as e:
        logger.debug("Stage %s failed with %s", stage.stage_id, e.tag)
        return StageResult(ok=False, abort=isinstance(e, ValidationError), error=e)


def run_stages(stages: Iterable[Stage], ctx: CliContext) -> StageRunResult:
    """Run stages in order; a validation failure stops the pipeline."""
    acc = _RunAccumulator()

    for stage in stages:
        if _should_skip(stage, ctx):
            continue

        started = time.perf_counter()
        result = _run_stage(stage, ctx)
        acc.fold(stage, result, time.perf_counter() - started)

        if result.abort:
            acc.aborted = True
            break

    return acc.to_result()
