import json

import pytest
import yaml

from group_kstab.config import (
    ProblemValidationError,
    Settings,
    dump_config_file,
    get_user_config_path,
    load_config_file,
    write_file_atomic,
)


@pytest.mark.unit
@pytest.mark.config
class TestSettingsMerge:
    def test_defaults(self):
        settings = Settings()
        assert settings.quad_order == 8
        assert settings.soliton_tol == 1e-12
        assert settings.threads == 1
        assert settings.minimize_degree == 2

    def test_overrides_apply_and_none_is_ignored(self):
        settings = Settings().merged({"quad_order": 12, "soliton_tol": None})
        assert settings.quad_order == 12
        assert settings.soliton_tol == 1e-12

    def test_integer_accepted_for_float_setting(self):
        settings = Settings().merged({"soliton_tol": 1})
        assert settings.soliton_tol == 1.0
        assert isinstance(settings.soliton_tol, float)

    def test_unknown_keys_are_listed(self):
        with pytest.raises(ProblemValidationError) as exc_info:
            Settings().merged({"quad_ordr": 3, "colour": 1}, source="test")
        assert exc_info.value.details["keys"] == ["colour", "quad_ordr"]
        assert "test" in exc_info.value.message
        assert exc_info.value.tag == "cli.ProblemValidationError"
        assert exc_info.value.exit_code == 2

    @pytest.mark.parametrize(
        "overrides, message",
        [
            ({"quad_order": 8.5}, "integer"),
            ({"quad_order": "8"}, "number"),
            ({"threads": True}, "number"),
            ({"wall_margin": 0.0}, "positive"),
            ({"newton_max_iter": -1}, "positive"),
        ],
    )
    def test_bad_values(self, overrides, message):
        with pytest.raises(ProblemValidationError, match=message):
            Settings().merged(overrides)

    def test_merged_leaves_original_untouched(self):
        base = Settings()
        base.merged({"quad_order": 20})
        assert base.quad_order == 8

    def test_to_dict_lists_every_setting(self):
        data = Settings().to_dict()
        assert data["barrier_weight"] == 1e-3
        assert len(data) == 12


@pytest.mark.unit
@pytest.mark.config
class TestUserSettingsFile:
    def test_missing_file_gives_defaults(self, mock_home):
        assert not get_user_config_path().exists()
        assert Settings.load() == Settings()

    def test_user_file_overrides_defaults(self, mock_home):
        (mock_home / ".group-kstab.yaml").write_text("quad_order: 10\nthreads: 2\n")
        settings = Settings.load()
        assert settings.quad_order == 10
        assert settings.threads == 2

    def test_load_is_cached(self, mock_home):
        path = mock_home / ".group-kstab.yaml"
        path.write_text("quad_order: 10\n")
        assert Settings.load().quad_order == 10
        path.write_text("quad_order: 14\n")
        assert Settings.load().quad_order == 10

    @pytest.mark.parametrize("text", ["quad_order: [1, 2\n", "- 1\n- 2\n"])
    def test_unreadable_user_file(self, mock_home, text):
        (mock_home / ".group-kstab.yaml").write_text(text)
        with pytest.raises(ProblemValidationError, match="Cannot read"):
            Settings.load()

    def test_unknown_key_in_user_file_names_the_file(self, mock_home):
        (mock_home / ".group-kstab.yaml").write_text("verbose: 1\n")
        with pytest.raises(ProblemValidationError, match=".group-kstab.yaml"):
            Settings.load()


@pytest.mark.unit
@pytest.mark.config
class TestConfigFiles:
    def test_format_follows_suffix(self, tmp_path):
        yaml_path = tmp_path / "candidate.yml"
        yaml_path.write_text("base: guillemin\n")
        json_path = tmp_path / "candidate.json"
        json_path.write_text('{"base": "none"}')
        assert load_config_file(yaml_path) == {"base": "guillemin"}
        assert load_config_file(json_path) == {"base": "none"}

    def test_empty_yaml_is_an_empty_mapping(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert load_config_file(path) == {}

    def test_non_mapping_rejected(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ValueError, match="mapping"):
            load_config_file(path)

    def test_unsupported_format(self, tmp_path):
        path = tmp_path / "x.json"
        path.write_text("{}")
        with pytest.raises(ValueError, match="Unsupported"):
            load_config_file(path, "toml")

    def test_dump_is_sorted_with_trailing_newline(self, tmp_path):
        path = tmp_path / "nested" / "out.json"
        dump_config_file(path, {"b": 1, "a": [1, 2]})
        text = path.read_text()
        assert text.endswith("}\n")
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": [1, 2], "b": 1}

    def test_dump_yaml(self, tmp_path):
        path = tmp_path / "settings.yaml"
        dump_config_file(path, {"quad_order": 10, "threads": 2})
        assert yaml.safe_load(path.read_text()) == {"quad_order": 10, "threads": 2}
        assert load_config_file(path) == {"quad_order": 10, "threads": 2}


@pytest.mark.unit
@pytest.mark.config
class TestWriteFileAtomic:
    def test_replaces_content_and_keeps_mode(self, tmp_path):
        path = tmp_path / "report.json"
        path.write_text("old")
        path.chmod(0o640)
        write_file_atomic(path, lambda f: f.write("new"))
        assert path.read_text() == "new"
        assert path.stat().st_mode & 0o777 == 0o640

    def test_failed_write_leaves_no_temp_file(self, tmp_path):
        path = tmp_path / "report.json"
        path.write_text("old")

        def explode(f):
            f.write("partial")
            raise RuntimeError("disk full")

        with pytest.raises(RuntimeError):
            write_file_atomic(path, explode)
        assert path.read_text() == "old"
        assert [p.name for p in tmp_path.iterdir()] == ["report.json"]
