"""Root system stage."""

from __future__ import annotations

from group_kstab import linalg
from group_kstab.cli.context import CliContext, Stage, StageResult


class RootDataStage(Stage):
    label = "Root System"
    stage_id = "rootdata"
    section_key = "root_system"

    def run(self, ctx: CliContext) -> StageResult:
        rs = ctx.problem.build_root_system(ctx.settings)
        ctx.state.root_system = rs
        return StageResult(
            section={
                "rank": rs.rank,
                "cartan_type": rs.cartan_type,
                "toric_rank": rs.toric_rank,
                "n": rs.n,
                "weyl_group_order": len(rs.weyl_group),
                "positive_roots": [linalg.vector_record(a) for a in rs.positive_roots],
                "rho": linalg.vector_record(rs.rho),
            }
        )
