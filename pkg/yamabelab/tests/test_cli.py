import json
import os

import pandas as pd
import pytest
from click.testing import CliRunner

from yamabelab._version import __version__
from yamabelab.cli import cli

CLOSED_FORM = """[problem]
n = 3
s = 0.5
gamma_mode = closed_form

[grid]
h = 0.125
m_list = [1.0, 2.0, 4.0]
morse_m_list = [2.0, 4.0]
nodes_per_window = 128
"""


@pytest.fixture
def config_path(tmp_path):
    path = os.path.join(tmp_path, "closed_form.ini")
    with open(path, "w", encoding="utf-8") as writer:
        writer.write(CLOSED_FORM)
    return path


def run(*args):
    return CliRunner().invoke(cli, list(args), catch_exceptions=False)


def test_version():
    result = run("--version")
    assert result.exit_code == 0
    assert __version__ in result.output


def test_kernel_command(config_path, tmp_path):
    out = os.path.join(tmp_path, "out")
    result = run("kernel", "--config", config_path, "--out", out)
    assert result.exit_code == 0, result.output
    table = pd.read_csv(os.path.join(out, "tables", "kernel.csv"))
    assert list(table.columns) == ["t", "K", "K_power_scaled", "K_exp_scaled"]
    manifest = json.load(open(os.path.join(out, "kernel_manifest.json")))
    assert manifest["files"][0]["path"] == os.path.join("tables", "kernel.csv")
    assert manifest["constants"]["gamma_mode"] == "closed_form"
    assert os.path.exists(os.path.join(out, "metrics", "kernel.json"))
    assert os.path.exists(os.path.join(out, "reports", "summary.md"))


def test_kernel_pure_power_column(config_path, tmp_path):
    out = os.path.join(tmp_path, "out")
    result = run("kernel", "--config", config_path, "--out", out, "--pure-power")
    assert result.exit_code == 0, result.output
    table = pd.read_csv(os.path.join(out, "tables", "kernel.csv"))
    small = table[table["t"] <= 1e-3]
    assert (abs(small["ratio_to_pure_power"] - 1.0) < 1e-2).all()


def test_identical_config_gives_identical_csv(config_path, tmp_path):
    first, second = os.path.join(tmp_path, "a"), os.path.join(tmp_path, "b")
    assert run("kernel", "--config", config_path, "--out", first).exit_code == 0
    assert run("kernel", "--config", config_path, "--out", second).exit_code == 0
    with open(os.path.join(first, "tables", "kernel.csv"), "rb") as a, \
            open(os.path.join(second, "tables", "kernel.csv"), "rb") as b:
        assert a.read() == b.read()


def test_malformed_config_exits_with_two(tmp_path):
    path = os.path.join(tmp_path, "bad.ini")
    with open(path, "w", encoding="utf-8") as writer:
        writer.write("[problem]\nn = 3\nsigma = 0.5\n")
    result = run("kernel", "--config", path, "--out", os.path.join(tmp_path, "out"))
    assert result.exit_code == 2
    assert f"{path}:3" in result.output


def test_lambda1_command(config_path, tmp_path):
    out = os.path.join(tmp_path, "out")
    result = run("lambda1", "--config", config_path, "--out", out)
    assert result.exit_code == 0, result.output
    table = pd.read_csv(os.path.join(out, "tables", "lambda1_full.csv"))
    assert list(table["M"]) == [1.0, 2.0, 4.0]
    assert (table["lambda1"] > 0).all()
    assert table["phi1_positive"].all()
    assert "lambda1_scaled" in table.columns


def test_morse_command_on_constant(config_path, tmp_path):
    out = os.path.join(tmp_path, "out")
    result = run("morse", "--config", config_path, "--out", out)
    assert result.exit_code == 0, result.output
    table = pd.read_csv(os.path.join(out, "tables", "morse.csv"))
    assert table["nondecreasing"].all()


def test_verify_constant_solution(config_path, tmp_path):
    out = os.path.join(tmp_path, "out")
    result = run("verify", "--config", config_path, "--out", out, "--m", "3")
    assert result.exit_code == 0, result.output
    assert "ind(v) >= 3" in result.output
    report = json.load(open(os.path.join(out, "reports", "index_report.json")))
    assert report["verdict"] == "negative_definite"


def test_missing_profile_is_a_usage_error(config_path, tmp_path):
    result = CliRunner().invoke(cli, ["morse", "--config", config_path, "--profile",
                                      os.path.join(tmp_path, "absent.json")])
    assert result.exit_code == 2
