"""Bundled problem corpus with expected-report fixtures."""

from __future__ import annotations

import json
import logging

from collections.abc import Mapping
from importlib.resources import files as resource_files
from typing import TYPE_CHECKING, Any

from group_kstab.config import ProblemValidationError
from group_kstab.problem import ProblemSpec, parse_problem

if TYPE_CHECKING:
    from importlib.resources.abc import Traversable

logger = logging.getLogger(__name__)


class UnknownCorpusEntry(ProblemValidationError):
    """Raised when a corpus name has no bundled problem file."""

    pass


def _root() -> Traversable:
    return resource_files("group_kstab.corpus")


def corpus_names() -> list[str]:
    return sorted(
        entry.name.removesuffix(".json")
        for entry in _root().iterdir()
        if entry.is_file() and entry.name.endswith(".json")
    )


def corpus_file(name: str) -> Traversable:
    entry = _root() / f"{name}.json"
    if not entry.is_file():
        raise UnknownCorpusEntry(
            f"No corpus entry named {name!r} (available: {', '.join(corpus_names())})",
            name=name,
        )
    return entry


def load_corpus_problem(name: str) -> ProblemSpec:
    return parse_problem(json.loads(corpus_file(name).read_text()))


def expected_report(name: str) -> dict[str, Any] | None:
    entry = _root() / "expected" / f"{name}.json"
    if not entry.is_file():
        return None
    data: dict[str, Any] = json.loads(entry.read_text())
    return data


def compare_expected(actual: Any, expected: Any, path: str = "") -> list[str]:
    """Differences between a report and the fixture fields it must contain.

    Mappings compare on the fixture's keys only; lists compare element-wise
    and must have equal length; everything else compares with ==.
    """
    where = path or "<root>"
    if isinstance(expected, Mapping):
        if not isinstance(actual, Mapping):
            return [f"{where}: expected an object, got {actual!r}"]
        mismatches = []
        for key, value in expected.items():
            child = f"{path}.{key}" if path else str(key)
            if key not in actual:
                mismatches.append(f"{child}: missing")
                continue
            mismatches.extend(compare_expected(actual[key], value, child))
        return mismatches
    if isinstance(expected, list):
        if not isinstance(actual, list) or len(actual) != len(expected):
            return [f"{where}: expected {expected!r}, got {actual!r}"]
        mismatches = []
        for index, (a, e) in enumerate(zip(actual, expected, strict=True)):
            mismatches.extend(compare_expected(a, e, f"{path}[{index}]"))
        return mismatches
    if actual != expected:
        return [f"{where}: expected {expected!r}, got {actual!r}"]
    return []
