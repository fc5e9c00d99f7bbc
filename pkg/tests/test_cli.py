from __future__ import annotations

import json

import pytest

from nlpencil.cli import EXIT_ERROR, EXIT_OK, EXIT_PARTIAL, Checkpoint, main
from nlpencil.combinat import enumerate_pencil_specs
from nlpencil.report import ReportDoc, ReportItem, dumps, from_legacy, loads, to_csv, to_legacy


def _run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


@pytest.mark.parametrize("d", [4, 5, 6])
def test_enumerate(d, capsys):
    code, out = _run(["enumerate", "--d", str(d)], capsys)
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["count"] == len(data["specs"]) == len(enumerate_pencil_specs(d))


def test_classify_single_spec(capsys):
    code, out = _run(["classify", "--d", "4", "--spec", "1,1,1,1,0,0"], capsys)
    [rep] = json.loads(out)
    assert code == EXIT_OK and rep["classification"] in {"General", "Inclusion", "Candidate"}
    assert rep["a3"] <= rep["a4"]


def test_deform_and_smooth(capsys):
    code, out = _run(["deform", "--d", "5", "--spec", "1,1,1,2,1,0"], capsys)
    assert code == EXIT_OK and json.loads(out)["istar"]
    code, out = _run(["smooth", "--d", "5", "--spec", "1,1,1,2,1,0", "--r1-max", "2", "--r2-max", "1"], capsys)
    rep = json.loads(out)
    assert code == EXIT_OK and rep["column"] == 3


def _doc():
    return ReportDoc(
        6,
        "N=2",
        [
            ReportItem((1, 2), (1, 2), (1, 1), (5, 7, 8, 9), [(1, -10), (1, 0), (3, 2)]),
            ReportItem((1, 1), (1, 1), (0, 0), (1, 1, 2, 2), None),
            ReportItem((2, 2), (1, 1), (1, 0), (4, 4, 7, 7), []),
        ],
    )


def test_report_round_trips():
    doc = _doc()
    assert loads(dumps(doc)) == doc
    legacy = to_legacy(doc)
    assert legacy.startswith(" [1]:\n   [1]:\n      1,2\n")
    # an empty pair list keeps its "[5]:" header, so even that survives
    assert from_legacy(legacy, 6, "N=2") == doc
    empty = ReportDoc(5, "NT")
    assert from_legacy(to_legacy(empty), 5, "NT") == empty
    assert loads(dumps(empty)) == empty
    lines = to_csv(doc).splitlines()
    assert lines[0].startswith("d,column,d1") and lines[1].endswith("1:-10;1:0;3:2")


def test_report_command(tmp_path, capsys):
    src = tmp_path / "doc.json"
    src.write_text(dumps(_doc()))
    code, legacy = _run(["report", "--in", str(src), "--format", "legacy"], capsys)
    assert code == EXIT_OK
    leg = tmp_path / "doc.txt"
    leg.write_text(legacy)
    code, back = _run(["report", "--in", str(leg), "--d", "6", "--column", "N=2"], capsys)
    assert code == EXIT_OK and loads(back).items[0] == _doc().items[0]
    code, _ = _run(["report", "--in", str(leg)], capsys)
    assert code == EXIT_ERROR


def test_errors(tmp_path, capsys):
    assert main(["smooth", "--d", "5"]) == EXIT_ERROR
    assert main(["classify", "--d", "3"]) == EXIT_ERROR
    assert main(["report", "--in", str(tmp_path / "missing.json")]) == EXIT_ERROR
    assert main(["classify", "--d", "5", "--spec", "3,1,1,1,0,0"]) == EXIT_ERROR
    capsys.readouterr()


def _table(cache, capsys, *extra):
    return _run(["table", "--d", "4", "--cache-dir", str(cache), *extra], capsys)


def test_table_is_deterministic(tmp_path, capsys):
    c1, a = _table(tmp_path / "a", capsys)
    c2, b = _table(tmp_path / "b", capsys)
    assert c1 == c2 == EXIT_OK and a == b
    row = json.loads(a)
    assert row["count"] == 61 and row["NT"] == 7 and row["skipped"] == []


def test_table_resumes_after_budget(tmp_path, capsys):
    code, out = _table(tmp_path / "r", capsys, "--budget", "0")
    assert code == EXIT_PARTIAL
    assert len(json.loads(out)["skipped"]) == 61
    code, resumed = _table(tmp_path / "r", capsys, "--out-dir", str(tmp_path / "docs"))
    _, clean = _table(tmp_path / "clean", capsys)
    assert code == EXIT_OK and resumed == clean
    assert (tmp_path / "docs" / "d4-NT.json").exists()


def test_checkpoint_skips_torn_line(tmp_path):
    path = tmp_path / "ck.jsonl"
    ck = Checkpoint(path)
    ck.add({"params": [1, 1, 1, 1, 0, 0], "skipped": None})
    with path.open("a") as fh:
        fh.write('{"params": [1, 1')
    assert list(Checkpoint(path).done) == [(1, 1, 1, 1, 0, 0)]
