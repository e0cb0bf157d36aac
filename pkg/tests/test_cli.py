import json
from pathlib import Path

import pytest

from akgeo.cli import main

MODELS = Path(__file__).resolve().parents[1] / "models"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, [json.loads(line) for line in out.splitlines()]


def _without_time(lines):
    return [{k: v for k, v in d.items() if k != "ms"} for d in lines]


def test_flat_curvature_at_origin_passes(capsys):
    code, lines = run(capsys, "curvature", "--model", str(MODELS / "flat.mdl"), "--point", "0,0,0,0")
    assert code == 0
    *reports, summary = lines
    assert summary["summary"] and summary["status"] == "pass"
    assert all(r["max_residual"] == 0 for r in reports)
    assert {"name", "status", "max_residual", "samples", "seed", "tol", "ms"} <= set(reports[0])


def test_example_is_ricci_flat_but_not_flat(capsys):
    code, lines = run(capsys, "curvature", "--samples", "5")
    by_name = {d["name"]: d for d in lines[:-1]}
    assert by_name["ricci_vanishes"]["status"] == "pass"
    assert by_name["riemann_vanishes"]["status"] == "fail"
    assert code == 1


def test_linear_potential_fails_the_pde_check(capsys):
    code, lines = run(capsys, "pde", "--K", "v", "--eps", "1", "--samples", "10")
    by_name = {d["name"]: d for d in lines[:-1]}
    assert code == 1
    assert by_name["przanowski_residual"]["status"] == "fail"
    assert by_name["admissible_eps_Kvv_positive"]["status"] == "fail"


def test_default_potential_passes_the_pde_check(capsys):
    code, _ = run(capsys, "pde", "--samples", "20")
    assert code == 0


def test_bfp_default_and_quadratic(capsys):
    assert run(capsys, "bfp")[0] == 0
    code, lines = run(capsys, "bfp", "--F", "x^2")
    assert code == 1 and lines[0]["status"] == "fail"


@pytest.mark.parametrize("cmd", ["pullback-gh", "global-chart"])
def test_chart_commands_pass(capsys, cmd):
    assert run(capsys, cmd, "--samples", "10")[0] == 0


def test_classify_reports_almost_kahler(capsys):
    code, lines = run(capsys, "classify", "--samples", "10", "--phi", "0.3")
    assert lines[-1]["structure"] == "AlmostKahlerNonKahler"
    assert code == 1  # the integrability report fails for this structure


def test_scan_finds_two_integrable_plus_structures(capsys):
    _, lines = run(capsys, "scan-xi", "--samples", "5")
    passing = [d["name"] for d in lines[:-1] if d["status"] == "pass"]
    assert passing == ["integrable[xi=0+0i]", "integrable[xi=inf]"]


def test_output_is_deterministic_apart_from_timing(capsys):
    argv = ("petrov", "--samples", "8", "--seed", "7")
    assert _without_time(run(capsys, *argv)[1]) == _without_time(run(capsys, *argv)[1])


def test_json_flag_writes_a_file(capsys, tmp_path):
    out = tmp_path / "r.jsonl"
    code = main(["bfp", "--json", str(out)])
    assert code == 0 and capsys.readouterr().out == ""
    lines = [json.loads(x) for x in out.read_text().splitlines()]
    assert lines[-1]["summary"] and lines[-1]["status"] == "pass"


@pytest.mark.parametrize("argv", [
    ["verify", "nonsense"],
    ["curvature", "--point", "1,2"],
    ["scan-xi", "--xi", "1+"],
    ["frobnicate"],
])
def test_usage_errors_exit_with_two(capsys, argv):
    with pytest.raises(SystemExit) as err:
        main(argv)
    assert err.value.code == 2


def test_bad_model_exits_with_two(capsys, tmp_path):
    bad = tmp_path / "bad.mdl"
    bad.write_text("coords: x1 x2 x3 x4\ncoframe:\n  M = dz1 +* 2\n  N = dz2\n")
    assert main(["curvature", "--model", str(bad)]) == 2
    assert "line 3, column 12" in capsys.readouterr().err


def test_bad_expression_exits_with_two(capsys):
    assert main(["pde", "--K", "log(v"]) == 2
