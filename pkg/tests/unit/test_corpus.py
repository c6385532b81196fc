import subprocess
import sys

from io import StringIO

import pytest

from rich.console import Console

from group_kstab.cli.helpers import run_problem
from group_kstab.config import Settings
from group_kstab.corpus import (
    UnknownCorpusEntry,
    compare_expected,
    corpus_file,
    corpus_names,
    expected_report,
    load_corpus_problem,
)

NAMES = ["a1_torus", "a2_hexagon", "quadric_sl2", "torus_blowup", "torus_p2", "torus_square"]


@pytest.mark.unit
class TestCorpus:
    def test_names_are_sorted(self):
        assert corpus_names() == NAMES

    def test_every_entry_has_a_fixture(self):
        for name in corpus_names():
            assert expected_report(name) is not None

    def test_entries_parse(self):
        for name in corpus_names():
            assert load_corpus_problem(name).name == name

    def test_unknown_entry(self):
        with pytest.raises(UnknownCorpusEntry) as exc_info:
            corpus_file("cubic")
        assert exc_info.value.details["name"] == "cubic"
        assert "torus_p2" in exc_info.value.message
        assert exc_info.value.exit_code == 2

    def test_fixture_of_unknown_entry_is_none(self):
        assert expected_report("cubic") is None

    def test_imports_without_resources_abc(self):
        """importlib.resources.abc only exists on 3.11+; the corpus must load without it."""
        code = (
            "import sys, group_kstab.problem; "
            "sys.modules['importlib.resources.abc'] = None; "
            "from group_kstab.corpus import corpus_names; print(len(corpus_names()))"
        )
        result = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, check=False
        )
        assert result.returncode == 0, result.stderr
        assert result.stdout.strip() == str(len(NAMES))


@pytest.mark.unit
class TestCompareExpected:
    def test_extra_keys_in_actual_are_ignored(self):
        assert compare_expected({"a": 1, "b": {"c": 2, "d": 3}}, {"b": {"c": 2}}) == []

    def test_reports_paths_of_mismatches(self):
        mismatches = compare_expected(
            {"analysis": {"V": {"exact": "16"}, "bar": [1, 2]}},
            {"analysis": {"V": {"exact": "18"}, "bar": [1, 3], "n": 2}},
        )
        assert mismatches == [
            "analysis.V.exact: expected '18', got '16'",
            "analysis.bar[1]: expected 3, got 2",
            "analysis.n: missing",
        ]

    def test_list_length_and_type_mismatch(self):
        assert compare_expected({"x": [1]}, {"x": [1, 2]}) == ["x: expected [1, 2], got [1]"]
        assert compare_expected({"x": 3}, {"x": {"y": 1}}) == ["x: expected an object, got 3"]

    def test_null_fixture_requires_null(self):
        assert compare_expected({"destabilizer": None}, {"destabilizer": None}) == []
        assert compare_expected({"destabilizer": {"kind": "toric"}}, {"destabilizer": None})


@pytest.mark.unit
@pytest.mark.slow
@pytest.mark.parametrize("name", NAMES)
def test_pipeline_reproduces_fixture(name):
    """The default pipeline output contains every field of the bundled fixture."""
    problem = load_corpus_problem(name)
    report = run_problem(problem, Settings(), console=Console(file=StringIO()))
    assert report.exit_code == 0
    expected = expected_report(name)
    assert compare_expected(report.to_dict(include_timings=False), expected) == []
