"""Exact invariants and verdicts stage."""

from __future__ import annotations

from typing import Any

from group_kstab import linalg
from group_kstab.cli.context import CliContext, Stage, StageResult
from group_kstab.criteria import analyze, futaki

_ALWAYS = ("V", "n", "Lambda", "Sbar", "bar", "bar_tilde", "four_rho", "flags")
_BY_ANALYSIS: dict[str, tuple[str, ...]] = {
    "ke": ("ke_certificate", "ke_margin"),
    "properness": ("properness_certificates",),
    "futaki": ("futaki_vector", "futaki_toric_vector"),
    "destabilize": ("destabilizer",),
}
_VERDICT_KEYS = {"ke": "KE_fano", "properness": "proper_general"}


def select_analysis(full: dict[str, Any], analyses: tuple[str, ...]) -> dict[str, Any]:
    """Keep the invariants plus the parts belonging to requested analyses."""
    keys = set(_ALWAYS)
    for name in analyses:
        keys.update(_BY_ANALYSIS.get(name, ()))
    section = {key: value for key, value in full.items() if key in keys}
    section["verdicts"] = {
        _VERDICT_KEYS[name]: full["verdicts"][_VERDICT_KEYS[name]]
        for name in analyses
        if name in _VERDICT_KEYS
    }
    return section


class CriteriaStage(Stage):
    label = "Criteria"
    stage_id = "criteria"
    section_key = "analysis"

    def run(self, ctx: CliContext) -> StageResult:
        rs, cp = ctx.require_chamber()
        report = analyze(cp, rs)
        ctx.state.analysis = report
        section = select_analysis(report.to_dict(), ctx.analyses)
        if ctx.wants("futaki"):
            section["futaki_invariants"] = [
                linalg.rational_record(futaki(cp, rs, v)) for v in rs.t_basis
            ]
        warnings = list(report.warnings)
        if not report.flags["fano_normalized"]:
            warnings.append(
                "Polytope is not Fano-normalized: KE and soliton verdicts are not applicable"
            )
        return StageResult(section=section, warnings=tuple(warnings))
