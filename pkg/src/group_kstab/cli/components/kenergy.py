"""Reduced K-energy stage: evaluation, diagnostics and optional minimization."""

from __future__ import annotations

from typing import Any

from group_kstab.cli.context import CliContext, Stage, StageResult
from group_kstab.cli.helpers import load_candidate, quadrature_options
from group_kstab.criteria import is_fano_normalized
from group_kstab.kenergy import (
    KEnergyConvergenceError,
    SmoothCandidate,
    j_functional_proxy,
    kappa_bounds,
    kenergy_value,
    minimize_kenergy,
    modified_kenergy_value,
)


def _candidate(ctx: CliContext) -> SmoothCandidate:
    _, cp = ctx.require_chamber()
    request = ctx.kenergy
    if request.candidate_file is not None:
        return load_candidate(request.candidate_file, cp.polytope)
    if request.candidate == "flat":
        return SmoothCandidate.flat(cp.rank)
    return SmoothCandidate.guillemin(cp.polytope)


class KEnergyStage(Stage):
    label = "K-Energy"
    stage_id = "kenergy"
    section_key = "kenergy"
    serves = ("kenergy",)

    def run(self, ctx: CliContext) -> StageResult:
        rs, cp = ctx.require_chamber()
        settings = ctx.settings
        options = quadrature_options(settings)
        candidate = _candidate(ctx)
        value = kenergy_value(cp, rs, candidate, options)
        normalized = candidate.normalized()
        section: dict[str, Any] = {
            "candidate": candidate.to_dict(),
            "value": value.to_dict(),
            "kappa_bounds": kappa_bounds(cp, rs, normalized, options).to_dict(),
            "j_proxy": j_functional_proxy(cp, rs, normalized, options),
        }
        warnings: list[str] = []
        if value.dropped_fraction > 0:
            warnings.append(
                f"K-energy quadrature dropped {value.dropped_fraction:.3e} of the "
                "π-mass next to the Weyl walls"
            )

        field_ = ctx.state.soliton
        if field_ is not None and not field_.is_trivial and is_fano_normalized(cp, rs):
            section["modified"] = modified_kenergy_value(
                cp, rs, field_, candidate, options
            ).to_dict()

        if not ctx.kenergy.minimize:
            return StageResult(section=section, warnings=tuple(warnings))
        try:
            result = minimize_kenergy(
                cp,
                rs,
                degree=settings.minimize_degree,
                tol=settings.minimize_tol,
                max_iter=settings.minimize_max_iter,
                barrier_weight=settings.barrier_weight,
                options=options,
                allow_improper=ctx.kenergy.allow_improper,
            )
        except KEnergyConvergenceError as e:
            section["minimize"] = {"converged": False, "trace": list(e.trace)}
            return StageResult(
                ok=False, section=section, warnings=tuple(warnings), error=e
            )
        ctx.state.minimize = result
        section["minimize"] = {**result.to_dict(), "trace": list(result.trace)}
        if not result.converged:
            warnings.append(
                f"K-energy minimization stopped without converging ({result.stop_reason})"
            )
        return StageResult(section=section, warnings=tuple(warnings))
