"""Kähler–Ricci soliton stage."""

from __future__ import annotations

from group_kstab.cli.context import CliContext, Stage, StageResult
from group_kstab.soliton import (
    NoConvergence,
    SolitonVerdict,
    bar_x,
    modified_futaki,
    solve_soliton,
    verdict_soliton,
)


class SolitonStage(Stage):
    label = "Soliton"
    stage_id = "soliton"
    section_key = "soliton"
    serves = ("soliton",)

    def run(self, ctx: CliContext) -> StageResult:
        rs, cp = ctx.require_chamber()
        settings = ctx.settings
        try:
            field_ = solve_soliton(
                cp,
                rs,
                settings.soliton_tol,
                order=settings.quad_order,
                max_iter=settings.newton_max_iter,
            )
        except NoConvergence as e:
            best = None if e.best is None else e.best.to_dict()
            return StageResult(ok=False, section={"field": best}, error=e)
        ctx.state.soliton = field_

        barycenter = bar_x(cp, rs, field_, order=settings.quad_order)
        verdict = verdict_soliton(
            cp, rs, field_, barycenter=barycenter, order=settings.quad_order
        )
        section = {
            "field": field_.to_dict(),
            "bar_X": barycenter.to_dict(),
            "verdict": {
                "value": verdict.verdict.value,
                "margin": verdict.margin,
                "tolerance": verdict.tolerance,
                "toric_component": [float(x) for x in verdict.toric_component],
                "note": verdict.note,
            },
            "modified_futaki": [
                {"value": r.value, "quadrature_error": r.error}
                for r in modified_futaki(cp, rs, field_, order=settings.quad_order)
            ],
        }
        warnings: tuple[str, ...] = ()
        if verdict.verdict is SolitonVerdict.MARGINAL:
            warnings = (
                f"Soliton verdict is marginal: margin {verdict.margin:.3e} is within "
                f"the quadrature tolerance {verdict.tolerance:.3e}",
            )
        return StageResult(section=section, warnings=warnings)
