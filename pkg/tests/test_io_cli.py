import hashlib
import io
import json
import math
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import squares
from squarehit.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from squarehit.constructions import c5_cycle, random_family
from squarehit.errors import ParseError, SchemaError
from squarehit.exact import exact_chi, exact_tau
from squarehit.geometry import Square, family
from squarehit.hitters import right_halfdisk, six_point_hitter
from squarehit.io import (
    EPS_ENV,
    ResultDocument,
    default_eps,
    instance_hash,
    read_instance,
    read_result,
    verify_result,
    write_instance,
)
from squarehit.svg import render_svg

# sha256 of the six-point figure below, frozen after visual inspection
SIX_POINT_SVG_SHA256 = "90603d369d486f1a44ebcc79a62bda75cbeffdef8be9ab68e5af6f4eb605e319"


def _doc(squares, **extra):
    return json.dumps({"version": "squarehit/1", "squares": squares, **extra}).encode()


def run(argv, stdin=b"", monkeypatch=None, capsys=None):
    monkeypatch.setattr(sys, "stdin", io.TextIOWrapper(io.BytesIO(stdin)))
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def cli(monkeypatch, capsysbinary):
    def call(argv, stdin=b""):
        return run(argv, stdin, monkeypatch, capsysbinary)
    return call


# ------------------------------------------------------------------ documents


@settings(max_examples=50, deadline=None)
@given(st.lists(squares(), max_size=8))
def test_instance_round_trip(sqs):
    fam = family(sqs)
    back = read_instance(write_instance(fam))
    assert back == fam
    assert write_instance(back) == write_instance(fam)


def test_round_trip_keeps_tolerance():
    fam = family([Square((0.1, 0.2), 1.0, 0.3)], 1e-7)
    assert read_instance(write_instance(fam)).eps == 1e-7


@pytest.mark.parametrize("sq,field", [
    ({"cx": 0, "cy": 0, "side": -1}, "side"),
    ({"cx": 0, "cy": 0, "side": 0}, "side"),
    ({"cx": 0, "cy": 0}, "side"),
    ({"cx": "a", "cy": 0, "side": 1}, "cx"),
    ({"cx": True, "cy": 0, "side": 1}, "cx"),
    ({"cx": 0, "cy": 0, "side": 1, "colour": 2}, "colour"),
])
def test_schema_errors_name_the_field(sq, field):
    with pytest.raises(SchemaError, match=field):
        read_instance(_doc([{"cx": 0, "cy": 0, "side": 1}, sq]))


def test_nan_rejected():
    text = b'{"version": "squarehit/1", "squares": [{"cx": NaN, "cy": 0, "side": 1}]}'
    with pytest.raises(SchemaError, match=r"squares\[0\]\.cx"):
        read_instance(text)


def test_document_level_errors():
    with pytest.raises(SchemaError):
        read_instance(b"[]")
    with pytest.raises(SchemaError):
        read_instance(json.dumps({"version": "other", "squares": []}).encode())
    with pytest.raises(SchemaError):
        read_instance(_doc([], tolerance=0.5))


def test_missing_rot_is_axis_parallel():
    fam = read_instance(_doc([{"cx": 1.5, "cy": -2, "side": 2}]))
    assert fam[0] == Square((1.5, -2.0), 2.0, 0.0)


def test_parse_error_reports_position():
    with pytest.raises(ParseError, match=r"line 3, column \d+"):
        read_instance(b'{\n "version": "squarehit/1",\n "squares": [,]\n}')


def test_eps_environment(monkeypatch):
    monkeypatch.delenv(EPS_ENV, raising=False)
    assert default_eps() == 1e-9
    monkeypatch.setenv(EPS_ENV, "1e-6")
    assert read_instance(_doc([])).eps == 1e-6
    # an explicit tolerance in the document wins
    assert read_instance(_doc([], tolerance=1e-8)).eps == 1e-8
    monkeypatch.setenv(EPS_ENV, "abc")
    with pytest.raises(SchemaError):
        default_eps()


def test_result_round_trip():
    doc = ResultDocument("h", "tau", {"limit": 30}, 2, [[0.0, 1.0], [2.0, 3.0]], None, None, None, {"nodes": 4})
    assert read_result(doc.to_bytes()) == doc
    with pytest.raises(SchemaError):
        read_result(b'{"version": "squarehit-result/1"}')


# ------------------------------------------------------------------ verify


def _tau_doc(fam):
    res = exact_tau(fam)
    return ResultDocument(instance_hash(fam), "tau", {}, res.value, [list(p) for p in res.witness])


def test_verify_accepts_and_rejects_tampering():
    fam = random_family(8, (0.8, 1.5), "free", window=3.0, seed=11)
    doc = _tau_doc(fam)
    assert verify_result(doc, fam).ok
    for k in range(len(doc.witness)):
        bad = ResultDocument(doc.instance_hash, "tau", {}, doc.value - 1, doc.witness[:k] + doc.witness[k + 1:])
        assert not verify_result(bad, fam).ok
    moved = ResultDocument(doc.instance_hash, "tau", {}, doc.value, [[p[0] + 50, p[1]] for p in doc.witness])
    assert not verify_result(moved, fam).ok
    other = family(list(fam)[:-1])
    assert verify_result(doc, other).reason == "instance hash mismatch"


def test_verify_colouring_and_packing():
    fam = c5_cycle(1).family
    h = instance_hash(fam)
    chi = exact_chi(fam)
    assert verify_result(ResultDocument(h, "chi", {}, 3, list(chi.witness)), fam).ok
    assert not verify_result(ResultDocument(h, "chi", {}, 1, [0] * 5), fam).ok
    assert not verify_result(ResultDocument(h, "nu", {}, 2, [0, 1]), fam).ok
    assert not verify_result(ResultDocument(h, "nu", {}, 2, [0, 9]), fam).ok
    assert not verify_result(ResultDocument(h, "hit", {}, 3, [["x", 0]]), fam).ok
    assert not verify_result(ResultDocument(h, "sum", {}, 3, []), fam).ok


def test_verify_rejects_exceeded_bound():
    fam = family([Square((0, 0), 1.0)])
    doc = ResultDocument(instance_hash(fam), "hit", {}, 1, [[0.0, 0.0]], bound=0)
    assert "exceeds bound" in verify_result(doc, fam).reason


# ------------------------------------------------------------------ svg


def test_svg_squares_only():
    fam = c5_cycle(1).family
    svg = render_svg(fam).decode()
    assert svg.count("<polygon") == 5 and "<circle" not in svg
    assert render_svg(fam) == render_svg(fam)


def test_svg_six_point_overlay_frozen():
    pivot = Square.from_vertex_angle((0.0, 0.0), 1.0, 0.3)
    svg = render_svg(family([pivot]), points=six_point_hitter(pivot), certificates=[right_halfdisk(pivot)])
    text = svg.decode()
    assert text.count("<circle") == 6
    assert [f">{k}</text>" in text for k in range(1, 7)] == [True] * 6
    assert 'stroke-dasharray="4 3"' in text
    assert hashlib.sha256(svg).hexdigest() == SIX_POINT_SVG_SHA256


def test_svg_colouring_uses_palette():
    fam = c5_cycle(1).family
    text = render_svg(fam, colouring=exact_chi(fam).witness).decode()
    assert len({line.split('fill="')[1][:7] for line in text.splitlines() if line.startswith("<polygon")}) == 3


# ------------------------------------------------------------------ cli


def test_cli_pipeline_c5_chi(cli):
    code, inst, _ = cli(["gen", "--name", "c5_cycle", "--m", "1"])
    assert code == EXIT_OK
    code, out, _ = cli(["solve", "--param", "chi"], inst)
    assert code == EXIT_OK and json.loads(out)["value"] == 3


def test_cli_pipeline_subprocess():
    gen = subprocess.run([sys.executable, "-m", "squarehit", "gen", "--name", "c5_cycle"],
                         capture_output=True, check=True)
    solve = subprocess.run([sys.executable, "-m", "squarehit", "solve", "--param", "chi"],
                           input=gen.stdout, capture_output=True, check=True)
    assert json.loads(solve.stdout)["value"] == 3


def test_cli_approx_then_verify(cli, tmp_path):
    inst = tmp_path / "inst.json"
    res = tmp_path / "res.json"
    assert cli(["gen", "--n", "12", "--angle-mode", "unit-rotated", "--seed", "4", "--out", str(inst)])[0] == 0
    code, _, _ = cli(["approx", "--op", "hit", "--mode", "six-point", "--input", str(inst), "--out", str(res)])
    assert code == EXIT_OK
    code, out, _ = cli(["verify", "--instance", str(inst), "--result", str(res)])
    assert code == EXIT_OK and json.loads(out)["accepted"]
    doc = json.loads(res.read_bytes())
    doc["witness"] = doc["witness"][1:]
    doc["value"] -= 1
    res.write_text(json.dumps(doc))
    code, out, _ = cli(["verify", "--instance", str(inst), "--result", str(res)])
    assert code == EXIT_FAIL and not json.loads(out)["accepted"]


def test_cli_six_point_svg_has_halfdisk(cli, tmp_path):
    inst, svg = tmp_path / "i.json", tmp_path / "f.svg"
    cli(["gen", "--n", "6", "--angle-mode", "unit-rotated", "--seed", "2", "--out", str(inst)])
    assert cli(["approx", "--op", "hit", "--mode", "six-point", "--input", str(inst), "--svg", str(svg)])[0] == 0
    assert 'stroke-dasharray="4 3"' in svg.read_text()


def test_cli_colour_modes(cli):
    _, inst, _ = cli(["gen", "--name", "c5_cycle", "--m", "2"])
    code, out, _ = cli(["approx", "--op", "colour", "--mode", "general"], inst)
    doc = json.loads(out)
    assert code == 0 and doc["value"] >= 5 and doc["value"] <= doc["bound"]
    assert cli(["approx", "--op", "colour", "--mode", "rainbow"], inst)[0] == EXIT_USAGE


def test_cli_exit_codes(cli):
    assert cli([])[0] == EXIT_USAGE
    assert cli(["solve"])[0] == EXIT_USAGE
    assert cli(["gen"])[0] == EXIT_USAGE
    assert cli(["certify", "--hitter", "axis-4"])[0] == EXIT_USAGE
    _, inst, _ = cli(["gen", "--n", "5", "--side-max", "2", "--seed", "1"])
    assert cli(["approx", "--op", "hit", "--mode", "six-point"], inst)[0] == EXIT_USAGE
    code, _, err = cli(["solve", "--param", "tau", "--limit", "3"], inst)
    assert code == EXIT_FAIL and b"InstanceTooLarge" in err
    code, _, err = cli(["solve", "--param", "tau"], b"{not json")
    assert code == EXIT_FAIL and b"ParseError" in err


def test_cli_certify(cli):
    for hitter in ("ten-point", "six-point", "twelve-point"):
        code, out, _ = cli(["certify", "--hitter", hitter])
        assert code == EXIT_OK and json.loads(out)["ok"]
    rep = json.loads(cli(["certify", "--hitter", "ten-point"])[1])
    assert rep["margin"] >= 1e-4 and abs(rep["largest_gap"] - 0.84) <= 0.02


def test_cli_falsify_gate(cli):
    code, out, _ = cli(["falsify", "--hitter", "ten-point", "--budget", "20000", "--angles", "4", "--seed", "3"])
    assert code == EXIT_OK and json.loads(out)["counterexamples"] == []


@pytest.mark.parametrize("argv", [
    ["gen", "--n", "15", "--side-min", "0.5", "--side-max", "2", "--seed", "9"],
    ["bench", "--n", "3", "--size", "8", "--seed", "7"],
    ["falsify", "--hitter", "six-point", "--budget", "5000", "--angles", "2", "--seed", "1"],
])
def test_cli_deterministic(cli, argv):
    a, b = cli(argv), cli(argv)
    assert a[0] == EXIT_OK and a[1] == b[1]


def test_cli_solve_output_is_deterministic(cli):
    _, inst, _ = cli(["gen", "--n", "10", "--seed", "5", "--side-max", "1.5"])
    assert cli(["solve", "--param", "tau"], inst)[1] == cli(["solve", "--param", "tau"], inst)[1]
    doc = json.loads(cli(["solve", "--param", "tau", "--timing"], inst)[1])
    assert doc["runtime"] >= 0


@pytest.mark.parametrize("mode", ["six-point", "ten-point", "axis-4"])
def test_bench_table_consistency(cli, mode):
    code, out, _ = cli(["bench", "--n", "5", "--size", "10", "--seed", "7", "--mode", mode])
    assert code == EXIT_OK
    lines = out.decode().splitlines()
    header = lines[0].split("\t")
    rows = [dict(zip(header, line.split("\t"))) for line in lines[1:-1]]
    assert len(rows) == 5 and lines[-1].startswith("# mode=")
    for r in rows:
        nu, tau, hit, bound = int(r["nu"]), int(r["tau"]), int(r["hit"]), int(r["bound"])
        assert hit >= tau >= nu
        assert float(r["tau/nu"]) <= float(r["hit/nu"]) <= bound
        assert int(r["colours"]) >= int(r["chi"])
        assert int(r["colours"]) <= float(r["colour_bound"]) or math.isinf(float(r["colour_bound"]))


def test_cli_dedup_is_opt_in(cli):
    sq = {"cx": 0.1, "cy": 0.2, "side": 1.0, "rot": 0.3}
    inst = _doc([sq, sq, sq])
    assert json.loads(cli(["solve", "--param", "omega"], inst)[1])["value"] == 3
    assert json.loads(cli(["solve", "--param", "omega", "--dedup"], inst)[1])["value"] == 1
