import csv
import json

from io import StringIO

import pytest

from rich.console import Console

from group_kstab.cli.helpers import run_problem
from group_kstab.config import ProblemValidationError, Settings
from group_kstab.corpus import load_corpus_problem
from group_kstab.report import (
    MissingReportData,
    UnknownSelector,
    check_selectors,
    export_plot_data,
    provenance,
    strip_timings,
    validate_report,
)

INVARIANT_ANALYSES = ("ke", "properness", "futaki", "destabilize")


def make_report(name, analyses=INVARIANT_ANALYSES, **overrides):
    problem = load_corpus_problem(name)
    settings = Settings().merged(overrides)
    return run_problem(
        problem, settings, analyses=analyses, console=Console(file=StringIO())
    )


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


@pytest.mark.unit
class TestRunReport:
    def test_provenance_omits_runtime_settings(self):
        data = provenance(Settings().merged({"threads": 4}))
        assert data["package"] == "group-kstability"
        assert "threads" not in data["settings"]
        assert data["settings"]["quad_order"] == 8

    def test_report_matches_schema(self):
        report = make_report("torus_square")
        data = report.to_dict()
        validate_report(data)
        assert data["exit_code"] == 0
        assert data["problem"]["analyses"] == list(INVARIANT_ANALYSES)
        assert data["soliton"] is None
        assert data["kenergy"] is None
        assert data["chamber"]["edges"] == [[0, 1], [0, 2], [1, 3], [2, 3]]
        assert set(data["timings"]["seconds"]) == {"rootdata", "chamber", "criteria"}

    def test_json_is_canonical_without_timings(self):
        first = make_report("a2_hexagon").to_json(include_timings=False)
        second = make_report("a2_hexagon", threads=3).to_json(include_timings=False)
        assert first == second
        assert first.endswith("\n")
        assert "timings" not in json.loads(first)

    def test_strip_timings(self):
        data = make_report("quadric_sl2").to_dict()
        stripped = strip_timings(data)
        assert "timings" not in stripped
        assert stripped["analysis"] == data["analysis"]

    def test_write_creates_parents(self, tmp_path):
        path = tmp_path / "out" / "quadric.json"
        make_report("quadric_sl2").write(path)
        validate_report(json.loads(path.read_text()))

    def test_validation_abort_is_recorded(self, problem_data):
        from group_kstab.problem import parse_problem

        data = problem_data("quadric_sl2")
        data["root_system"]["gram"] = [["0"]]
        report = run_problem(
            parse_problem(data), Settings(), console=Console(file=StringIO())
        )
        assert report.exit_code == 2
        assert [e.tag for e in report.errors] == ["rootdata.DegenerateGram"]
        assert report.sections == {}
        validate_report(report.to_dict())

    @pytest.mark.parametrize(
        "edit, location",
        [
            (lambda d: d.update(exit_code=5), "exit_code"),
            (lambda d: d.pop("provenance"), "<root>"),
            (lambda d: d["provenance"]["settings"].update(threads=2), "provenance"),
            (lambda d: d["analysis"]["verdicts"].update(KE_fano="maybe"), "analysis"),
        ],
    )
    def test_schema_rejects_broken_reports(self, edit, location):
        data = make_report("quadric_sl2").to_dict()
        edit(data)
        with pytest.raises(ProblemValidationError, match="Report invalid") as exc_info:
            validate_report(data)
        assert location in exc_info.value.message


@pytest.mark.unit
class TestPlotExport:
    def test_selectors_keep_canonical_order(self):
        assert check_selectors(["cone-rays", "polytope"]) == ("polytope", "cone-rays")

    def test_unknown_selector(self):
        with pytest.raises(UnknownSelector) as exc_info:
            check_selectors(["polytope", "heatmap"])
        assert exc_info.value.details["selectors"] == ["heatmap"]
        assert exc_info.value.exit_code == 2

    def test_polytope_csv(self, tmp_path):
        data = make_report("torus_square").to_dict()
        [path] = export_plot_data(data, ["polytope"], tmp_path)
        assert path.name == "polytope.csv"
        rows = read_csv(path)
        assert rows[0] == ["kind", "index", "start", "end", "y1", "y2"]
        assert rows[1] == ["vertex", "0", "", "", "-2.0", "-2.0"]
        assert [r[0] for r in rows[1:]].count("edge") == 4
        assert rows[-1] == ["edge", "3", "2", "3", "", ""]

    def test_barycenter_csv_includes_soliton_point(self, tmp_path):
        data = make_report("quadric_sl2", analyses=("ke", "soliton")).to_dict()
        [path] = export_plot_data(data, ["barycenters"], tmp_path)
        rows = read_csv(path)
        assert rows[0] == ["label", "y1"]
        assert [r[0] for r in rows[1:]] == ["bar", "bar_tilde", "4rho", "bar_X"]
        assert rows[1] == ["bar", "4.5"]
        assert rows[3] == ["4rho", "4.0"]

    def test_cone_rays_csv(self, tmp_path):
        hexagon = export_plot_data(
            make_report("a2_hexagon").to_dict(), ["cone-rays"], tmp_path / "a2"
        )
        rows = read_csv(hexagon[0])
        assert rows[0] == ["kind", "label", "y1", "y2"]
        assert rows[1:] == [["ray", "alpha1", "2.0", "-1.0"], ["ray", "alpha2", "-1.0", "2.0"]]
        torus = export_plot_data(
            make_report("torus_square").to_dict(), ["cone-rays"], tmp_path / "torus"
        )
        assert [r[0] for r in read_csv(torus[0])[1:]] == ["line", "line"]

    def test_trace_needs_a_minimization(self, tmp_path):
        data = make_report("quadric_sl2").to_dict()
        with pytest.raises(MissingReportData, match="kenergy"):
            export_plot_data(data, ["descent-trace"], tmp_path)
        data["kenergy"] = {"value": {}}
        with pytest.raises(MissingReportData, match="--minimize"):
            export_plot_data(data, ["descent-trace"], tmp_path)

    def test_trace_csv_columns(self, tmp_path):
        data = make_report("quadric_sl2").to_dict()
        data["kenergy"] = {
            "minimize": {
                "trace": [
                    {"iteration": 0, "value": 2.0, "kenergy": 1.5, "grad_norm": 0.3},
                    {"iteration": 1, "value": 1.0, "kenergy": 0.9, "grad_norm": 0.01,
                     "step": 1.0, "min_eig": 0.2},
                ]
            }
        }
        [path] = export_plot_data(data, ["descent-trace"], tmp_path)
        rows = read_csv(path)
        assert rows[0] == ["iteration", "value", "kenergy", "grad_norm", "step", "min_eig"]
        assert rows[1] == ["0", "2.0", "1.5", "0.3", "", ""]
        assert rows[2][-1] == "0.2"

    def test_missing_section(self, tmp_path):
        data = make_report("quadric_sl2").to_dict()
        data["chamber"] = None
        with pytest.raises(MissingReportData, match="chamber"):
            export_plot_data(data, ["polytope"], tmp_path)
