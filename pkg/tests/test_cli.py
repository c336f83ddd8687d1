import json
import logging
import math

import pandas as pd
import pytest

from app.commands import (
    EXIT_INVALID,
    EXIT_IO,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_UNKNOWN_EXAMPLE,
    CommandConfig,
    exit_code_for,
)
from app.core.exceptions import BoundaryMismatch, NonConvergence, SceneFormatError, WindowOverlap
from app.core.logging import SafeRotatingFileHandler
from app.geometry import BoundaryLoop
from app.main import main
from app.scene import save_loop, save_scene, straight_jump_scene, triple_point_scene

TRIANGLE = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
TRIPLE_TOTAL = math.pi + 2.0 + math.sqrt(2.0) + 0.5
FAST_MESH = ["--rings", "8", "--angular", "48"]


@pytest.fixture(autouse=True)
def isolated_run(tmp_path, monkeypatch):
    """Log files land in tmp_path; console handlers do not outlive the test"""
    monkeypatch.chdir(tmp_path)
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        if isinstance(handler, SafeRotatingFileHandler) or type(handler) is logging.StreamHandler:
            handler.close()
            root.removeHandler(handler)


@pytest.fixture
def triple_file(tmp_path):
    return save_scene(triple_point_scene(TRIANGLE), tmp_path / "scenes" / "triple.json")


@pytest.fixture
def jump_file(tmp_path):
    return save_scene(straight_jump_scene(0.0, 1.0, (1.0, 0.0), (0.0, 0.0)), tmp_path / "scenes" / "jump.json")


# ----------------------------------------------------------------------------
# area
# ----------------------------------------------------------------------------

def test_area_triple_point_total(triple_file, tmp_path, capsys):
    csv = tmp_path / "out" / "triple.csv"

    code = main(["area", "--scene", str(triple_file), "--csv", str(csv), *FAST_MESH])

    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "relaxed area in [" in out
    row = pd.read_csv(csv).iloc[0]
    assert 6.86 <= row["total_lower"] <= row["total_upper"] <= 6.99
    assert row["total_upper"] == pytest.approx(TRIPLE_TOTAL, rel=1e-6)


def test_area_csv_is_byte_identical_across_runs(triple_file, tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["area", "--scene", str(triple_file), "--csv", str(first), "--seed", "7", *FAST_MESH]) == EXIT_OK
    assert main(["area", "--scene", str(triple_file), "--csv", str(second), "--seed", "7", *FAST_MESH]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_area_writes_json_and_svg(jump_file, tmp_path):
    record, figure = tmp_path / "jump.json", tmp_path / "jump.svg"

    code = main(["area", "--scene", str(jump_file), "--json", str(record), "--svg", str(figure)])

    assert code == EXIT_OK
    data = json.loads(record.read_text(encoding="utf-8"))
    assert data["junction_terms"] == {}
    assert data["total_upper"] == pytest.approx(data["total_lower"])
    assert figure.read_text(encoding="utf-8").lstrip().startswith("<?xml")


def test_stdout_carries_only_the_summary(triple_file, capsys):
    assert main(["area", "--scene", str(triple_file), "--log-level", "DEBUG", *FAST_MESH]) == EXIT_OK
    captured = capsys.readouterr()
    assert " - INFO - " not in captured.out
    assert " - INFO - " in captured.err


def test_malformed_scene_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "schema": "bv-relax/1",\n  "name": "x",\n  oops\n}\n', encoding="utf-8")

    assert main(["area", "--scene", str(bad)]) == EXIT_INVALID
    assert capsys.readouterr().out == ""


def test_non_utf8_scene_exits_2(tmp_path, capsys):
    bad = tmp_path / "latin.json"
    bad.write_bytes(b"\xff\xfe{\x00")

    assert main(["area", "--scene", str(bad)]) == EXIT_INVALID
    assert main(["plateau", "--loop", str(bad)]) == EXIT_INVALID
    assert capsys.readouterr().out == ""


def test_missing_scene_file_exits_1(tmp_path):
    assert main(["area", "--scene", str(tmp_path / "nowhere.json")]) == EXIT_IO


def test_invalid_options_exit_2(triple_file):
    assert main(["area", "--scene", str(triple_file), "--tol", "-1"]) == EXIT_INVALID
    assert main(["area", "--scene", str(triple_file), "--seed", "-5"]) == EXIT_INVALID


def test_missing_required_flag_is_a_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        main(["area"])
    assert excinfo.value.code == 2


# ----------------------------------------------------------------------------
# tvj and plateau
# ----------------------------------------------------------------------------

def test_tvj_triple_point(triple_file, tmp_path):
    csv = tmp_path / "tvj.csv"

    assert main(["tvj", "--scene", str(triple_file), "--csv", str(csv), *FAST_MESH]) == EXIT_OK

    table = pd.read_csv(csv)
    assert list(table["junction"]) == ["p0", "total"]
    assert table["upper"].iloc[-1] == pytest.approx(0.5, abs=1e-9)
    assert table["lower"].iloc[-1] <= table["upper"].iloc[-1] + 1e-9


def test_plateau_triangle_loop(tmp_path, capsys):
    loop = save_loop(BoundaryLoop.from_points(TRIANGLE), tmp_path / "triangle.json", name="triangle")
    csv = tmp_path / "triangle.csv"

    assert main(["plateau", "--loop", str(loop), "--csv", str(csv), *FAST_MESH]) == EXIT_OK

    table = pd.read_csv(csv)
    assert list(table.columns) == ["lower", "upper", "method"]
    assert table["lower"].iloc[0] == pytest.approx(0.5, abs=1e-4)
    assert table["upper"].iloc[0] == pytest.approx(0.5, abs=1e-12)
    assert "closed form" in capsys.readouterr().out


def test_plateau_empty_loop_exits_2(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text(json.dumps({"schema": "bv-relax/1", "name": "empty", "vertices": [], "repeat": 1}),
                    encoding="utf-8")
    assert main(["plateau", "--loop", str(path)]) == EXIT_INVALID


# ----------------------------------------------------------------------------
# recovery-check
# ----------------------------------------------------------------------------

def test_recovery_check_straight_jump(jump_file, tmp_path):
    csv, figure = tmp_path / "recovery.csv", tmp_path / "recovery.svg"

    code = main(["recovery-check", "--scene", str(jump_file), "--csv", str(csv), "--svg", str(figure)])

    assert code == EXIT_OK
    table = pd.read_csv(csv)
    assert list(table.columns) == ["parameter", "l1_gap", "tv_gap", "slice_gap", "area_gap", "area"]
    assert list(table["parameter"]) == pytest.approx([1e-1, 1e-2, 1e-3])
    assert table["area_gap"].iloc[-1] <= 5e-3
    assert figure.exists()


def test_recovery_check_rejects_unknown_kind(tmp_path):
    path = save_scene(triple_point_scene(TRIANGLE), tmp_path / "custom.json")
    doc = json.loads(path.read_text(encoding="utf-8"))
    doc["metadata"] = {"kind": "custom"}
    path.write_text(json.dumps(doc), encoding="utf-8")

    assert main(["recovery-check", "--scene", str(path)]) == EXIT_INVALID


# ----------------------------------------------------------------------------
# example
# ----------------------------------------------------------------------------

def test_example_triple_with_radius(tmp_path):
    csv = tmp_path / "triple.csv"

    assert main(["example", "triple", "--r", "2", "--csv", str(csv), *FAST_MESH]) == EXIT_OK

    table = pd.read_csv(csv).set_index("quantity")
    expected = math.pi * 4.0 + 2.0 * (2.0 + math.sqrt(2.0)) + 0.5
    assert table.loc["total", "closed_form"] == pytest.approx(expected, rel=1e-12)
    assert table.loc["total", "upper"] == pytest.approx(expected, rel=1e-9)
    assert table.loc["total", "gap"] < 1e-9


def test_example_butterfly_junction_term(tmp_path):
    csv = tmp_path / "butterfly.csv"

    assert main(["example", "butterfly", "--csv", str(csv), *FAST_MESH]) == EXIT_OK

    junction = pd.read_csv(csv).set_index("quantity").loc["junction"]
    assert junction["lower"] == 0.0
    assert junction["closed_form"] == pytest.approx(1.0)
    assert junction["upper"] == pytest.approx(1.0, rel=0.02)


def test_example_infinite_triple(tmp_path):
    csv = tmp_path / "infinite.csv"

    assert main(["example", "infinite-triple", "--levels", "20", "--csv", str(csv)]) == EXIT_OK

    table = pd.read_csv(csv)
    assert list(table["levels"]) == [1, 2, 5, 10, 20]
    last = table.iloc[-1]
    assert abs(last["tv_partial"] - (3.0 + math.sqrt(2.0))) < 1e-6
    assert list(table["tvj_lower"]) == [0.5 * n for n in table["levels"]]


def test_unknown_example_exits_4(capsys):
    assert main(["example", "hexagon"]) == EXIT_UNKNOWN_EXAMPLE
    assert capsys.readouterr().out == ""


# ----------------------------------------------------------------------------
# exit codes and config
# ----------------------------------------------------------------------------

def test_exit_code_mapping():
    assert exit_code_for(SceneFormatError("bad", line=3)) == EXIT_INVALID
    assert exit_code_for(WindowOverlap("windows overlap")) == EXIT_INVALID
    assert exit_code_for(NonConvergence("stalled")) == EXIT_NUMERICAL
    assert exit_code_for(BoundaryMismatch("off")) == EXIT_NUMERICAL
    assert exit_code_for(FileNotFoundError("gone")) == EXIT_IO


def test_command_config_threads_mesh_options():
    config = CommandConfig(command="plateau", rings=6, angular=32, seed=11, tol=1e-5)

    options = config.plateau_options()

    assert (options.n_rings, options.n_angular, options.seed, options.tol) == (6, 32, 11, 1e-5)
    assert config.area_options().plateau.n_rings == 6
