import json

import pytest

from sitcov.cli import coverage_summary, main
from sitcov.hyperspace import load_hyperspace
from sitcov.metrics import ExperimentResult, aggregate, coverage_from_counts, export


def _run(tmp_path, name, *extra):
    out = tmp_path / name
    assert main(["run", "--batch-size", "5", "--seeds", "0,1", "--out", str(out), *extra]) == 0
    return out


class TestRun:
    def test_default_layout(self, tmp_path):
        out = tmp_path / "nf.json"
        assert main(["run", "--mode", "sitcov", "--fault", "none", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert len(doc["outcomes"]) == 100
        assert doc["seeds"] == [0, 1, 2, 3, 4]
        assert doc["meta"]["layout"] == {"batch_size": 20, "batches_per_seed": 1,
                                         "carry_coverage": False}

    def test_batch_size_zero(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--batch-size", "0", "--out", str(tmp_path / "x.json")])
        assert exc.value.code == 1
        assert not (tmp_path / "x.json").exists()

    def test_deterministic_bytes(self, tmp_path):
        a = _run(tmp_path, "a.json")
        b = _run(tmp_path, "b.json")
        assert a.read_bytes() == b.read_bytes()

    def test_jobs_do_not_change_output(self, tmp_path):
        a = _run(tmp_path, "a.json")
        b = _run(tmp_path, "b.json", "--jobs", "2")
        assert a.read_bytes() == b.read_bytes()

    def test_seed_forms(self, tmp_path):
        a = _run(tmp_path, "a.json")
        b = tmp_path / "b.json"
        assert main(["run", "--batch-size", "5", "--seeds", "0", "1", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_carry_coverage_recorded(self, tmp_path):
        doc = json.loads(_run(tmp_path, "c.json", "--carry-coverage").read_text())
        assert doc["meta"]["layout"]["carry_coverage"] is True

    def test_trace(self, tmp_path):
        doc = json.loads(_run(tmp_path, "t.json", "--trace").read_text())
        assert all(len(o["trace"]) == o["end_tick"] for o in doc["outcomes"])

    def test_bad_config(self, tmp_path, capsys):
        cfg = tmp_path / "bad.yaml"
        cfg.write_text("physics:\n  dt: -1\n")
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o.json")]) == 1
        assert "error" in capsys.readouterr().err
        assert not (tmp_path / "o.json").exists()

    def test_bad_seed(self, tmp_path):
        assert main(["run", "--seeds", "x", "--out", str(tmp_path / "o.json")]) == 1

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert main(["run", "--batch-size", "1", "--seeds", "0",
                     "--out", str(blocker / "o.json")]) == 3


class TestCompare:
    def test_table(self, tmp_path, capsys):
        nf = _run(tmp_path, "nf.json")
        f1 = _run(tmp_path, "f1.json", "--fault", "f1")
        out = tmp_path / "table.json"
        assert main(["compare", str(nf), str(f1), "--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert "F1 triggered" in text
        row = json.loads(out.read_text())["rows"][0]
        assert row["triggered_F1"] == row["f_F1"] - row["f_NF"]
        assert row["f_F2"] is None

    def test_self_is_zero(self, tmp_path):
        nf = _run(tmp_path, "nf.json")
        # a baseline cannot stand in for a faulted file, so relabel a copy as f1
        doc = json.loads(nf.read_text())
        doc["fault"] = "f1"
        for o in doc["outcomes"]:
            o["fault"] = "f1"
        fake = tmp_path / "same.json"
        fake.write_text(json.dumps(doc))
        out = tmp_path / "t.json"
        assert main(["compare", str(nf), str(fake), "--out", str(out)]) == 0
        assert json.loads(out.read_text())["rows"][0]["triggered_F1"] == 0

    def test_seed_mismatch(self, tmp_path, capsys):
        nf = _run(tmp_path, "nf.json")
        f1 = tmp_path / "f1.json"
        main(["run", "--batch-size", "5", "--seeds", "0,2", "--fault", "f1", "--out", str(f1)])
        assert main(["compare", str(nf), str(f1)]) == 2
        err = capsys.readouterr().err
        assert "[0, 1]" in err and "[0, 2]" in err

    def test_faulted_baseline_refused(self, tmp_path):
        f1 = _run(tmp_path, "f1.json", "--fault", "f1")
        assert main(["compare", str(f1), str(f1)]) == 2

    def test_missing_file(self, tmp_path):
        nf = _run(tmp_path, "nf.json")
        assert main(["compare", str(nf), str(tmp_path / "nope.json")]) == 3


class TestReport:
    def test_sitcov_full_label_coverage(self, tmp_path, capsys):
        nf = tmp_path / "nf.json"
        main(["run", "--out", str(nf)])
        before = nf.read_bytes()
        capsys.readouterr()
        assert main(["report", str(nf), "--out", str(tmp_path / "csv")]) == 0
        out = capsys.readouterr().out
        assert "label coverage: 100.0%" in out
        assert len(list((tmp_path / "csv").glob("*.csv"))) == 9
        assert nf.read_bytes() == before

    def test_random_report_prints_coverage(self, tmp_path, capsys):
        r = tmp_path / "r.json"
        main(["run", "--mode", "random", "--out", str(r)])
        capsys.readouterr()
        assert main(["report", str(r)]) == 0
        assert "label coverage:" in capsys.readouterr().out

    def test_json_export(self, tmp_path):
        nf = _run(tmp_path, "nf.json")
        out = tmp_path / "copy.json"
        assert main(["report", str(nf), "--format", "json", "--out", str(out)]) == 0
        assert out.read_bytes() == nf.read_bytes()

    def test_refuses_overwrite(self, tmp_path):
        nf = _run(tmp_path, "nf.json")
        before = nf.read_bytes()
        assert main(["report", str(nf), "--format", "json", "--out", str(nf)]) == 1
        assert nf.read_bytes() == before

    def test_corrupt_file(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        assert main(["report", str(p)]) == 2

    def test_empty_result(self, tmp_path, capsys):
        h = load_hyperspace()
        counts = {e.id: [0] * 6 for e in h.elements} | {"IntersectionSituation": [0] * 12}
        cov = coverage_from_counts(counts, 0)
        empty = ExperimentResult("0" * 64, "sitcov", "none", [0], [], cov, [cov],
                                 aggregate([], h), {})
        assert "overall coverage: 0.0%" in coverage_summary(empty)
        p = export(empty, "json", tmp_path / "empty.json")[0]
        assert main(["report", str(p)]) == 0
        assert "label coverage: 0.0%" in capsys.readouterr().out
