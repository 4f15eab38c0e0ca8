import csv
import io
import json

import pytest

from cantorlab.cli import main
from cantorlab.creals import q


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


SINE = {"b0": "0", "terms": [["1", "0"]]}


def test_eval_grid(tmp_path, capsys):
    code, out = run(capsys, "eval", "--series", write(tmp_path, "s.json", SINE), "--grid", "9")
    assert code == 0
    r = {row["x"]: row for row in rows(out.out)}
    assert q(r["1/2"]["lo"]) <= 1 <= q(r["1/2"]["hi"])


def test_smooth_widths(tmp_path, capsys):
    s = {"b0": "1/3", "terms": [[f"{k}/9", f"-{k}/11"] for k in range(1, 9)]}
    code, out = run(capsys, "smooth", "--series", write(tmp_path, "s.json", s), "--precision", "30")
    assert code == 0
    assert all(q(r["hi"]) - q(r["lo"]) < q(1, 2**30) for r in rows(out.out))


def test_probe_constant(tmp_path, capsys):
    code, out = run(capsys, "probe", "--series", write(tmp_path, "s.json", {"b0": "2"}), "--grid", "9")
    assert code == 0
    assert all(r["converged"] == "true" and q(r["lo"]) <= 1 <= q(r["hi"]) for r in rows(out.out))


def test_rank_inputs(tmp_path, capsys):
    code, out = run(capsys, "rank", "--set", write(tmp_path, "g.json", {"components": [["-1", "0"], ["0", "1"]]}))
    assert code == 0 and json.loads(out.out)["rank"] == 1
    code, out = run(capsys, "rank", "--set", write(tmp_path, "f.json", {"components": [["-1", "1"]]}))
    assert json.loads(out.out)["rank"] == 0
    tree = write(tmp_path, "t.json", {"interval": ["-1", "1"], "depth": 2})
    code, out = run(capsys, "rank", "--tree", tree, "--stage", "6")
    assert code == 0 and json.loads(out.out)["rank"] == 3


def test_cover_and_cap(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"ambient": ["0", "1"], "oracle": {"type": "uniform-radius", "r": "1/16"}})
    code, out = run(capsys, "cover", "--config", cfg)
    assert code == 0 and json.loads(out.out)["pieces"]
    tiny = write(tmp_path, "t.json", {"oracle": {"type": "uniform-radius", "r": "1/1099511627776"}})
    code, out = run(capsys, "cover", "--config", tiny, "--depth-cap", "10")
    assert code == 4


def test_cover_located(tmp_path, capsys):
    cfg = {"oracle": {"type": "cbset", "r": "1/16"}, "target": {"tree": {"interval": ["-1", "1"], "depth": 1}}}
    code, _ = run(capsys, "cover", "--config", write(tmp_path, "c.json", cfg))
    assert code == 0


def test_avoid(tmp_path, capsys):
    code, out = run(capsys, "avoid", "--enum", write(tmp_path, "e.json", ["0", "1/2", "1"]))
    obj = json.loads(out.out)
    assert code == 0 and len(obj["witnesses"]) == 3 and all(q(w["bound"]) > 0 for w in obj["witnesses"])
    code, out = run(capsys, "avoid", "--enum", write(tmp_path, "n.json", []))
    assert json.loads(out.out)["x"] == "0/1"


def test_trisect_csv(tmp_path, capsys):
    code, out = run(capsys, "trisect", "--eps", "1/4", "--steps", "6")
    r = rows(out.out)
    assert code == 0 and len(r) == 7 and list(r[0]) == ["step", "aN", "bN", "cN", "dN", "deltaN"]


def test_cb_commands(tmp_path, capsys):
    tree = write(tmp_path, "t.json", {"interval": ["-1", "1"], "depth": 1})
    code, out = run(capsys, "cb-index", "--tree", tree, "0", "2", "3")
    assert [r["value"] for r in rows(out.out)] == ["-1/1", "0/1", "-1/1"]
    code, out = run(capsys, "cb-distance", "--tree", tree, "--x", "3/4")
    iv = json.loads(out.out)
    assert q(iv["lo"]) <= q(1, 4) <= q(iv["hi"])


def test_residual(tmp_path, capsys):
    code, out = run(capsys, "residual", "--points", write(tmp_path, "p.json", ["0"]), "--c", "2")
    obj = json.loads(out.out)
    assert code == 0 and not obj["empty"] and len(obj["components"]) == 2


def test_demo_and_control(tmp_path, capsys):
    ok = {"series": {"b0": "0", "terms": [["0", "0"]]}, "exceptional": {"type": "finite", "points": ["0"]}}
    code, out = run(capsys, "demo", "--config", write(tmp_path, "ok.json", ok))
    assert code == 0 and json.loads(out.out)["ok"]
    bad = {"series": {"b0": "0", "terms": [["1", "0"]]}}
    code, out = run(capsys, "demo", "--config", write(tmp_path, "bad.json", bad))
    assert code == 3 and json.loads(out.out)["failed_stage"] == "vanishing"


def test_out_file_is_written(tmp_path, capsys):
    target = tmp_path / "r.csv"
    code, out = run(capsys, "eval", "--series", write(tmp_path, "s.json", SINE), "--x", "1/2", "--out", str(target))
    assert code == 0 and out.out == "" and target.read_text().startswith("x,lo,hi")


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--series", "/nonexistent.json"],
        ["rank"],
        ["bogus"],
        ["eval", "--series", "-", "--grid", "4"],
    ],
)
def test_input_errors(argv, capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO('{"b0": "1"}'))
    code, _ = run(capsys, *argv)
    assert code == 2
