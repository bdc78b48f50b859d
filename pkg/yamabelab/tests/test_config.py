import os

import pytest

from yamabelab.config import DEFAULT_CONFIG, ENV_OUTPUT_DIR, RunConfig
from yamabelab.errors import ConfigError


def write(tmp_path, text, name="run.ini"):
    path = os.path.join(tmp_path, name)
    with open(path, "w", encoding="utf-8") as writer:
        writer.write(text)
    return path


def test_packaged_defaults():
    config = RunConfig.defaults()
    assert config.n == 3
    assert config.s == 0.5
    assert config.gamma_mode == "calibrated"
    assert config.m_list == [1.0, 2.0, 4.0, 8.0, 16.0]
    assert os.path.exists(DEFAULT_CONFIG)


def test_file_overrides_defaults(tmp_path):
    path = write(tmp_path, "[problem]\nn = 4\ns = 0.75\ngamma_mode = closed_form\n\n[grid]\nm_list = [1, 3]\n")
    config = RunConfig.from_ini(path)
    assert (config.n, config.s, config.gamma_mode) == (4, 0.75, "closed_form")
    assert config.m_list == [1.0, 3.0]
    assert config.steps == RunConfig.defaults().steps


def test_round_trip(tmp_path):
    path = write(tmp_path, "[problem]\ns = 0.25\ngamma_mode = explicit\ngamma_value = 1.5\n")
    config = RunConfig.from_ini(path)
    again = RunConfig.from_ini(write(tmp_path, config.to_ini(), name="again.ini"))
    assert again == config


def test_unknown_key_reports_line(tmp_path):
    path = write(tmp_path, "[problem]\nn = 3\nsigma = 0.5\n")
    with pytest.raises(ConfigError) as excinfo:
        RunConfig.from_ini(path)
    assert excinfo.value.line == 3
    assert f"{path}:3" in str(excinfo.value)
    assert excinfo.value.exit_code == 2


def test_unknown_section(tmp_path):
    path = write(tmp_path, "[problem]\nn = 3\n\n[plots]\ndpi = 300\n")
    with pytest.raises(ConfigError) as excinfo:
        RunConfig.from_ini(path)
    assert excinfo.value.line == 4


def test_bad_values(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.from_ini(write(tmp_path, "[grid]\nm_list = 4.0\n"))
    with pytest.raises(ConfigError):
        RunConfig.from_ini(write(tmp_path, "[problem]\nn = three\n"))
    with pytest.raises(ConfigError):
        RunConfig.from_ini(write(tmp_path, "[problem]\ngamma_mode = guessed\n"))
    with pytest.raises(ConfigError):
        RunConfig.from_ini(write(tmp_path, "[problem]\ngamma_mode = explicit\ngamma_value = 0\n"))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.from_ini(os.path.join(tmp_path, "absent.ini"))


def test_environment_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(ENV_OUTPUT_DIR, str(tmp_path))
    assert RunConfig.defaults().output_dir == str(tmp_path)
    path = write(tmp_path, "[output]\ndirectory = elsewhere\n")
    assert RunConfig.from_ini(path).output_dir == "elsewhere"
