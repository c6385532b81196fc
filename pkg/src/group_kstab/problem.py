"""Problem files: parsing, validation and construction of the analysis inputs."""

from __future__ import annotations

import json
import logging

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib.resources import files as resource_files
from pathlib import Path
from typing import Any

import jsonschema  # type: ignore[import-untyped]

from packaging.version import InvalidVersion, Version

from group_kstab import linalg
from group_kstab.config import (
    CONFIG_PARSE_ERRORS,
    ProblemValidationError,
    Settings,
    load_config_file,
)
from group_kstab.linalg import Matrix, Vector
from group_kstab.polyint import (
    ChamberPolytope,
    Polytope,
    build_polytope,
    restrict_to_chamber,
)
from group_kstab.rootdata import (
    InvalidRootData,
    RootSystem,
    build_root_system,
    cartan_root_system,
)
from group_kstab.utils import content_hash

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
ANALYSES = ("ke", "properness", "futaki", "soliton", "kenergy", "destabilize")
DEFAULT_ANALYSES = ("ke", "properness", "futaki", "destabilize", "soliton")


class UnknownAnalysis(ProblemValidationError):
    """Raised when an analysis name is not one of the supported stages."""

    pass


@lru_cache(maxsize=1)
def problem_schema() -> dict[str, Any]:
    text = (resource_files("group_kstab") / "schemas" / "problem.schema.json").read_text()
    schema: dict[str, Any] = json.loads(text)
    return schema


def check_schema_version(value: str) -> Version:
    """Accept any 1.x schema version not newer than this package writes.

    Raises:
        ProblemValidationError: For malformed or unsupported versions
    """
    try:
        parsed = Version(value)
    except InvalidVersion as e:
        raise ProblemValidationError(f"Invalid schema_version {value!r}") from e
    supported = Version(SCHEMA_VERSION)
    if parsed.major != supported.major or parsed > supported:
        raise ProblemValidationError(
            f"Unsupported schema_version {value}; this build reads {supported.major}.x "
            f"up to {supported}"
        )
    return parsed


def check_analyses(names: list[str] | tuple[str, ...]) -> tuple[str, ...]:
    """Validate analysis names and return them in pipeline order."""
    unknown = sorted(set(names) - set(ANALYSES))
    if unknown:
        raise UnknownAnalysis(
            f"Unknown analyses: {', '.join(unknown)} (choose from {', '.join(ANALYSES)})",
            analyses=unknown,
        )
    return tuple(a for a in ANALYSES if a in names)


@dataclass(frozen=True)
class ProblemSpec:
    """A validated problem with exact rational fields."""

    name: str
    rank: int | None
    gram: Matrix | None
    simple_roots: tuple[Vector, ...] | None
    facets: tuple[tuple[tuple[int, ...], Fraction], ...]
    cartan_type: str | None = None
    toric_rank: int = 0
    vertices: tuple[Vector, ...] | None = None
    options: dict[str, Any] = field(default_factory=dict, compare=True, hash=False)
    analyses: tuple[str, ...] = DEFAULT_ANALYSES
    description: str = ""
    schema_version: str = SCHEMA_VERSION

    @property
    def polytope_rank(self) -> int:
        return len(self.facets[0][0])

    def to_dict(self) -> dict[str, Any]:
        """Canonical JSON-ready form; rationals become ``"p/q"`` strings."""
        root: dict[str, Any] = {}
        if self.gram is not None and self.simple_roots is not None:
            root["rank"] = self.rank
            root["gram"] = [[str(x) for x in row] for row in self.gram]
            root["simple_roots"] = [[str(x) for x in row] for row in self.simple_roots]
        if self.cartan_type is not None:
            root["cartan_type"] = self.cartan_type
            if self.toric_rank:
                root["toric_rank"] = self.toric_rank
        polytope: dict[str, Any] = {
            "facets": [{"u": list(u), "lambda": str(lam)} for u, lam in self.facets]
        }
        if self.vertices is not None:
            polytope["vertices"] = [[str(x) for x in v] for v in self.vertices]
        data: dict[str, Any] = {
            "schema_version": self.schema_version,
            "name": self.name,
            "root_system": root,
            "polytope": polytope,
            "analyses": list(self.analyses),
        }
        if self.options:
            data["options"] = dict(sorted(self.options.items()))
        if self.description:
            data["description"] = self.description
        return data

    @property
    def input_hash(self) -> str:
        return content_hash(self.to_dict())

    def settings(self, base: Settings | None = None) -> Settings:
        return (base or Settings.load()).merged(self.options, source=f"problem {self.name}")

    def build_root_system(self, settings: Settings | None = None) -> RootSystem:
        """RootSystem from explicit data, a Cartan type, or both cross-checked.

        Raises:
            InvalidRootData: If explicit data disagrees with the Cartan type
        """
        cap = (settings or Settings()).weyl_group_cap
        reference = None
        if self.cartan_type is not None:
            reference = cartan_root_system(
                self.cartan_type, self.toric_rank, weyl_group_cap=cap
            )
        if self.gram is None or self.simple_roots is None or self.rank is None:
            assert reference is not None
            return reference
        rs = build_root_system(
            self.rank,
            self.gram,
            self.simple_roots,
            weyl_group_cap=cap,
            cartan_type=self.cartan_type,
        )
        if reference is not None and (
            len(rs.positive_roots) != len(reference.positive_roots)
            or len(rs.weyl_group) != len(reference.weyl_group)
            or rs.rank != reference.rank
        ):
            raise InvalidRootData(
                f"Root data does not match Cartan type {self.cartan_type}",
                positive_roots=len(rs.positive_roots),
                weyl_group=len(rs.weyl_group),
            )
        return rs

    def build_polytope(self, rs: RootSystem) -> Polytope:
        return build_polytope(
            rs.rank, list(self.facets), root_system=rs, vertices=self.vertices
        )

    def build(self, settings: Settings | None = None) -> tuple[RootSystem, ChamberPolytope]:
        rs = self.build_root_system(settings)
        return rs, restrict_to_chamber(self.build_polytope(rs), rs)


def _rational(value: Any, where: str) -> Fraction:
    try:
        return linalg.parse_rational(value)
    except ValueError as e:
        raise ProblemValidationError(f"{where}: {e}") from e


def _vectors(rows: list[Any], where: str) -> tuple[Vector, ...]:
    return tuple(
        tuple(_rational(x, f"{where}[{i}]") for x in row) for i, row in enumerate(rows)
    )


def parse_problem(data: Any) -> ProblemSpec:
    """Validate a decoded problem document against the schema and parse it.

    Raises:
        ProblemValidationError: For schema violations, bad rationals or
            unsupported schema versions
    """
    validator = jsonschema.Draft202012Validator(problem_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: [str(p) for p in e.absolute_path])
    if errors:
        first = errors[0]
        location = "/".join(str(p) for p in first.absolute_path) or "<root>"
        raise ProblemValidationError(
            f"Problem file invalid at {location}: {first.message}",
            errors=len(errors),
        )
    check_schema_version(data["schema_version"])
    root = data["root_system"]
    polytope = data["polytope"]
    gram = _vectors(root["gram"], "root_system.gram") if "gram" in root else None
    simple_roots = (
        _vectors(root["simple_roots"], "root_system.simple_roots")
        if "simple_roots" in root
        else None
    )
    facets = tuple(
        (tuple(f["u"]), _rational(f["lambda"], f"polytope.facets[{i}].lambda"))
        for i, f in enumerate(polytope["facets"])
    )
    vertices = (
        _vectors(polytope["vertices"], "polytope.vertices")
        if "vertices" in polytope
        else None
    )
    options = dict(data.get("options", {}))
    Settings().merged(options, source="options")
    return ProblemSpec(
        name=data["name"],
        rank=root.get("rank"),
        gram=gram,
        simple_roots=simple_roots,
        facets=facets,
        cartan_type=root.get("cartan_type"),
        toric_rank=root.get("toric_rank", 0),
        vertices=vertices,
        options=options,
        analyses=check_analyses(data.get("analyses", list(DEFAULT_ANALYSES))),
        description=data.get("description", ""),
        schema_version=data["schema_version"],
    )


def load_problem(path: Path) -> ProblemSpec:
    """Read and parse a JSON problem file.

    Raises:
        ProblemValidationError: If the file cannot be read or is invalid
    """
    try:
        data = load_config_file(path, "json")
    except CONFIG_PARSE_ERRORS as e:
        raise ProblemValidationError(f"Cannot read problem file {path}: {e}") from e
    spec = parse_problem(data)
    logger.debug("Loaded problem %s (%s)", spec.name, spec.input_hash[:12])
    return spec
