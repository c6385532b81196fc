import json

from pathlib import Path

import pytest

from click.testing import CliRunner

from group_kstab.corpus import corpus_file, load_corpus_problem


@pytest.fixture(autouse=True)
def clear_settings_cache():
    """Clear Settings._load_cached() before each test so ~/.group-kstab.yaml edits are seen."""
    from group_kstab.config import Settings

    if hasattr(Settings._load_cached, "cache_clear"):
        Settings._load_cached.cache_clear()
    yield
    if hasattr(Settings._load_cached, "cache_clear"):
        Settings._load_cached.cache_clear()


def pytest_configure(config):
    """Register sub-module markers so tests can be selected per analysis layer."""
    config.addinivalue_line("markers", "rootdata: Tests for the root data sub-module")
    config.addinivalue_line("markers", "polyint: Tests for polytopes and exact integration")
    config.addinivalue_line("markers", "criteria: Tests for invariants and verdicts")
    config.addinivalue_line("markers", "soliton: Tests for the soliton solver")
    config.addinivalue_line("markers", "kenergy: Tests for the reduced K-energy")
    config.addinivalue_line("markers", "config: Tests for settings and problem files")


@pytest.fixture
def mock_home(tmp_path, monkeypatch):
    """Create a mock home directory so no real ~/.group-kstab.yaml is read."""
    home_dir = tmp_path / "home"
    home_dir.mkdir()
    monkeypatch.setenv("HOME", str(home_dir))
    monkeypatch.setenv("USERPROFILE", str(home_dir))
    monkeypatch.setattr(Path, "home", staticmethod(lambda: home_dir))
    return home_dir


@pytest.fixture
def runner():
    """Create a Click CLI runner for testing CLI commands."""
    return CliRunner()


def _build(name):
    from group_kstab.config import Settings

    return load_corpus_problem(name).build(Settings())


@pytest.fixture
def built():
    """Factory returning (RootSystem, ChamberPolytope) for a corpus entry."""
    return _build


@pytest.fixture
def torus_square():
    return _build("torus_square")


@pytest.fixture
def blowup():
    return _build("torus_blowup")


@pytest.fixture
def quadric():
    return _build("quadric_sl2")


@pytest.fixture
def a1_torus():
    return _build("a1_torus")


@pytest.fixture
def a2_hexagon():
    return _build("a2_hexagon")


@pytest.fixture
def problem_data():
    """Factory returning a fresh decoded copy of a corpus problem file."""

    def _load(name):
        return json.loads(corpus_file(name).read_text())

    return _load


@pytest.fixture
def problem_file(tmp_path, problem_data):
    """Factory writing a (possibly edited) corpus problem into tmp_path."""

    def _write(corpus_name, /, **changes):
        data = problem_data(corpus_name)
        data.update(changes)
        path = tmp_path / f"{data['name']}.json"
        path.write_text(json.dumps(data))
        return path

    return _write
