"""Polytope and chamber restriction stage."""

from __future__ import annotations

from typing import Any

from group_kstab import linalg
from group_kstab.cli.context import CliContext, Stage, StageResult
from group_kstab.criteria.invariants import xi_rays
from group_kstab.polyint import ChamberPolytope, restrict_to_chamber
from group_kstab.rootdata import check_lattice_pairings


def _edges(cp: ChamberPolytope) -> list[list[int]]:
    if cp.rank == 1:
        return [[0, len(cp.vertices) - 1]] if len(cp.vertices) == 2 else []
    if cp.rank != 2:
        return []
    index = {v: i for i, v in enumerate(cp.vertices)}
    return [[index[a], index[b]] for a, b in cp.edges()]


def chamber_section(cp: ChamberPolytope) -> dict[str, Any]:
    """Geometry of 2P₊ in the form the plot export reads back."""
    rs = cp.root_system
    return {
        "vertices": [linalg.vector_record(v) for v in cp.vertices],
        "edges": _edges(cp),
        "outer_facets": [
            {
                "index": f.index,
                "normal": list(f.facet.normal),
                "lambda": linalg.rational_record(f.offset),
            }
            for f in cp.outer_facets
        ],
        "walls": len(cp.walls),
        "coordinate_volume": linalg.rational_record(cp.volume),
        "xi_rays": [linalg.vector_record(a) for a in xi_rays(rs)],
        "toric_directions": [linalg.vector_record(v) for v in rs.t_basis],
    }


class ChamberStage(Stage):
    label = "Chamber Polytope"
    stage_id = "chamber"
    section_key = "chamber"

    def run(self, ctx: CliContext) -> StageResult:
        rs = ctx.state.root_system
        if rs is None:
            raise RuntimeError("Root system requested before the rootdata stage ran")
        polytope = ctx.problem.build_polytope(rs)
        cp = restrict_to_chamber(polytope, rs)
        ctx.state.chamber = cp
        warnings = check_lattice_pairings(rs, [f.covector for f in polytope.facets])
        return StageResult(section=chamber_section(cp), warnings=tuple(warnings))
