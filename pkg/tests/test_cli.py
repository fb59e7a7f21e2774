"""Command line interface: exit codes, config handling, output determinism."""

import json

import pytest

from gpseries.cli import ConfigError, main, read_config


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


CONE = "vars x:1 y:1\ny1^2 - x1^2 = 0 & x1 > 0 & y1 > 0;\n"


def test_monomialize_exit_zero(tmp_path, capsys):
    path = write(tmp_path, "in.txt", "vars x:1 y:1\ny1^2 - x1^2;\n")
    assert main(["monomialize", path]) == 0
    out = capsys.readouterr().out
    assert "leaves" in out or "leaf" in out


def test_monomialize_json_output(tmp_path, capsys):
    path = write(tmp_path, "in.txt", "vars x:1 y:1\ny1^2 - x1^3;\n")
    assert main(["monomialize", path, "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["stats"]["leaf_count"] == 9


def test_divide_exit_zero(tmp_path, capsys):
    path = write(tmp_path, "in.txt", "vars x:1 y:1\ny1^2 - x1^2;\nx1;\ny1;\n")
    assert main(["divide", path, "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["leaves"]


def test_parametrize_exit_zero(tmp_path, capsys):
    path = write(tmp_path, "in.txt", CONE)
    assert main(["parametrize", path, "--json", "--samples", "20"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["pieces"]


def test_bad_input_exits_one(tmp_path, capsys):
    path = write(tmp_path, "in.txt", "vars x:1 y:1\ny1^2 - x9;\n")
    assert main(["monomialize", path]) == 1


def test_missing_file_exits_one(capsys):
    assert main(["monomialize", "/nonexistent/input.txt"]) == 1


def test_bad_config_exits_one(tmp_path, capsys):
    inp = write(tmp_path, "in.txt", "vars x:1 y:1\nx1;\n")
    cfg = write(tmp_path, "cfg.txt", "precision = banana\n")
    assert main(["monomialize", inp, "--config", cfg]) == 1


def test_depth_cap_exits_three(tmp_path, capsys):
    path = write(tmp_path, "in.txt", "vars x:1 y:1\ny1^2 - x1^3;\n")
    assert main(["monomialize", path, "--max-depth", "0"]) == 3


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = write(tmp_path, "cfg.txt", "precision = 6\nseed = 9  # comment\n")
    parsed = read_config(cfg)
    assert parsed["precision"] == "6"
    assert parsed["seed"] == "9"
    inp = write(tmp_path, "in.txt", "vars x:1 y:1\nx1 + y1;\n")
    assert main(["monomialize", inp, "--config", cfg, "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["precision"] == "6"


def test_config_rejects_unknown_key(tmp_path):
    cfg = write(tmp_path, "cfg.txt", "warp = 9\n")
    with pytest.raises(ConfigError):
        read_config(cfg)


def test_json_is_deterministic_across_threads(tmp_path, capsys):
    path = write(tmp_path, "in.txt", CONE)
    outputs = []
    for threads in ("1", "4"):
        assert (
            main(
                [
                    "parametrize",
                    path,
                    "--json",
                    "--samples",
                    "20",
                    "--seed",
                    "5",
                    "--threads",
                    threads,
                ]
            )
            == 0
        )
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1]


def test_invalid_threads_exits_one(tmp_path):
    path = write(tmp_path, "in.txt", "vars x:1 y:1\nx1;\n")
    assert main(["monomialize", path, "--threads", "0"]) == 1
