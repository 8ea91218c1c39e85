import io
import json
import subprocess
import sys

import pytest

from flowlat import __version__
from flowlat.cli import run
from flowlat.flows import parse_vertices, vertex_matrix
from flowlat.groups import parse_group
from flowlat.invariants import BinomialPair, format_binomial
from flowlat.trees import claw, tripod


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, err = call(*argv)
    assert code == 0, err
    return json.loads(out)


def test_vertices():
    code, out, _ = call("vertices", "--tree", "builtin:tripod", "--group", "Z2")
    assert code == 0
    assert parse_vertices(out) == list(vertex_matrix(tripod(), parse_group("Z2")).columns)
    assert len(out.strip().splitlines()) == 5


def test_count_json_fields():
    res = call_json("count", "--tree", "builtin:snowflake", "--group", "Z3", "--dilation", "2")
    assert res["count"] == "21627"
    assert res["version"] == __version__
    assert res["invocation"] == ["count", "--tree", "builtin:snowflake", "--group", "Z3", "--dilation", "2"]
    assert res["kind"] == "ehrhart" and res["method"] == "fiber"


def test_count_direct_hilbert_and_mod():
    res = call_json("count", "--tree", "((1,2),(3,4));", "--group", "Z3", "--dilation", "3", "--method", "direct")
    assert res["count"] == "2869"
    res = call_json("count", "--tree", "builtin:quartet", "--group", "Z2", "--dilation", "3", "--kind", "hilbert")
    assert res["count"] == "104"
    res = call_json("count", "--tree", "builtin:snowflake", "--group", "Z3", "--dilation", "3", "--mod", "64")
    assert res["count"] == str(903187 % 64) and res["mod"] == 64


def test_tree_file(tmp_path):
    f = tmp_path / "t.nwk"
    f.write_text("((1,2),(3,4));\n")
    assert call_json("count", "--tree", str(f), "--group", "Z2", "--dilation", "2")["count"] == "34"


def test_normality_and_very_ample():
    res = call_json("normality", "--tree", "builtin:tripod", "--group", "Z3", "--max-n", "3")
    assert res["verdict"] == "normal-up-to-3" and "witness" not in res
    res = call_json("normality", "--tree", "builtin:tripod", "--group", "Z6")
    assert res["verdict"] == "non-normal"
    assert res["witness"] == {"n": 4, "x": [0, 1, 1, 0, 1, 1] * 3}
    res = call_json("very-ample", "--tree", "builtin:tripod", "--group", "Z6")
    assert res["verdict"] == "not-very-ample" and res["witness"]["vertex"] == ["4", "1", "1"]
    res = call_json("very-ample", "--tree", "builtin:tripod", "--group", "Z2", "--max-deg", "3")
    assert res["verdict"] == "inconclusive-up-to-3"


def test_transfer():
    res = call_json("transfer", "--tree", "builtin:tripod", "--group", "Z6", "--target", "Z6xZ2", "--images", "1,0")
    assert res["verdict"] == "non-normal" and res["target"] == "Z6xZ2"
    assert len(res["witness"]["x"]) == 36


def test_intersect():
    res = call_json("intersect", "--claw", "4", "--group", "Z2")
    assert res["hip2_verified"] and res["intersection_dim"] == res["claw_rank"] == 5
    res = call_json("intersect", "--claw", "4", "--group", "Z2xZ2", "--pairs-only")
    assert res["hip2_verified"] and res["prolongations"] == ["12|34", "13|24"]


def test_binomial_commands(tmp_path):
    p = BinomialPair.from_columns(claw(4), parse_group("Z2"), [(1, 1, 0, 0), (0, 0, 1, 1)], [(1, 0, 1, 0), (0, 1, 0, 1)])
    f = tmp_path / "b.txt"
    f.write_text(format_binomial(p))
    assert call_json("verify-binomial", "--file", str(f))["valid"] is True
    res = call_json("subdivide", "--file", str(f))
    assert res["subdivision"]["S"] == [1, 4] and res["subdivision"]["split"] == "14|23"
    bad = tmp_path / "bad.txt"
    bad.write_text("degree 1 leaves 4 group Z2\n1\n0\n0\n0\n1\n0\n0\n0\n")
    assert call_json("verify-binomial", "--file", str(bad))["valid"] is False
    code, _, err = call("subdivide", "--file", str(bad))
    assert code == 2 and "does not verify" in err


def test_conjecture():
    res = call_json("conjecture", "jc-quadrics", "--claw", "5")
    assert res["binomials"] == 60 and res["all_covered"] and res["three_splits_suffice"]


@pytest.mark.parametrize("argv", [
    ["count", "--tree", "builtin:tripod", "--group", "Z0", "--dilation", "1"],
    ["count", "--tree", "builtin:tripod", "--group", "Z2", "--dilation", "-1"],
    ["count", "--tree", "(1,2);", "--group", "Z2", "--dilation", "1"],
    ["count", "--tree", "no/such/file", "--group", "Z2", "--dilation", "1"],
    ["count", "--tree", "builtin:claw:4", "--group", "Z2", "--dilation", "2"],
    ["count", "--tree", "builtin:tripod", "--group", "Z2", "--dilation", "1", "--mod", "0"],
    ["normality", "--tree", "builtin:tripod", "--group", "Z2", "--max-n", "1"],
    ["transfer", "--tree", "builtin:tripod", "--group", "Z2", "--target", "Z6", "--images", "2"],
    ["verify-binomial", "--file", "/no/such/file"],
    ["intersect", "--claw", "3", "--group", "Z2"],
    ["frobnicate"],
    [],
])
def test_bad_input_exit_2(argv):
    code, out, err = call(*argv)
    assert code == 2 and out == "" and err.startswith("flowlat: error:")


def test_guard_exit_3():
    code, out, err = call("count", "--tree", "builtin:snowflake", "--group", "Z3", "--dilation", "1", "--method", "direct")
    assert code == 3 and out == "" and "refused" in err
    code, _, _ = call("conjecture", "jc-quadrics", "--claw", "11")
    assert code == 3


def test_output_is_deterministic(tmp_path):
    argv = ["count", "--tree", "builtin:caterpillar:3", "--group", "Z2", "--dilation", "3"]
    first = call(*argv)[1]
    assert call(*argv)[1] == first
    target = tmp_path / "out.json"
    code, out, _ = call(*argv, "--out", str(target))
    assert code == 0 and out == ""
    saved, printed = json.loads(target.read_text()), json.loads(first)
    assert saved.pop("invocation")[-2:] == ["--out", str(target)]
    printed.pop("invocation")
    assert saved == printed


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "flowlat", "count", "--tree", "builtin:tripod", "--group", "Z2", "--dilation", "2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["count"] == "10"
