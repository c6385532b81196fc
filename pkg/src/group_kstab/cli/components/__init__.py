"""Ordered analysis pipeline stages."""

from __future__ import annotations

from group_kstab.cli.components.chamber import ChamberStage
from group_kstab.cli.components.criteria import CriteriaStage
from group_kstab.cli.components.kenergy import KEnergyStage
from group_kstab.cli.components.rootdata import RootDataStage
from group_kstab.cli.components.soliton import SolitonStage
from group_kstab.cli.context import Stage

PIPELINE_STAGES: tuple[Stage, ...] = (
    RootDataStage(),
    ChamberStage(),
    CriteriaStage(),
    SolitonStage(),
    KEnergyStage(),
)

VALIDATE_STAGES: tuple[Stage, ...] = (RootDataStage(), ChamberStage())
