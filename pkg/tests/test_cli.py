"""Tests for the docqakit command-line interface."""

from __future__ import annotations

import json
import sys

import pytest

from docqakit.cli import main


@pytest.fixture()
def fixture_dir(tmp_path):
    directory = tmp_path / "collection"
    assert main(["fixture", "--out", str(directory), "--seed", "11", "--n-docs", "30"]) == 0
    return directory


def _q(directory):
    return str(directory / "questions.json")


def _gt(directory):
    return str(directory / "gt.json")


class TestFixtureVerb:
    def test_writes_all_collection_files(self, fixture_dir):
        for name in ("documents.json", "records.json", "schema.json",
                     "questions.json", "gt.json"):
            assert (fixture_dir / name).exists()

    def test_noise_flag_corrupts_records(self, tmp_path):
        clean = tmp_path / "clean"
        noisy = tmp_path / "noisy"
        assert main(["fixture", "--out", str(clean), "--seed", "11", "--n-docs", "30"]) == 0
        assert main(["fixture", "--out", str(noisy), "--seed", "11", "--n-docs", "30",
                     "--noise-rate", "0.2"]) == 0
        assert ((clean / "records.json").read_bytes()
                != (noisy / "records.json").read_bytes())
        # Noise never rewrites ground truth: gt reflects the clean records.
        assert ((clean / "gt.json").read_bytes() == (noisy / "gt.json").read_bytes())

    def test_rejects_blank_noise_fields(self, tmp_path):
        code = main(["fixture", "--out", str(tmp_path / "x"), "--noise-rate", "0.1",
                     "--noise-fields", " , "])
        assert code == 1


class TestValidateVerb:
    def test_accepts_generated_collection(self, fixture_dir, capsys):
        code = main(["validate", "--collection", str(fixture_dir),
                     "--questions", _q(fixture_dir), "--gt", _gt(fixture_dir)])
        assert code == 0
        out = capsys.readouterr().out
        assert "collection OK" in out
        assert "30 documents" in out

    def test_rejects_missing_directory(self, tmp_path, capsys):
        code = main(["validate", "--collection", str(tmp_path / "ghost")])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_rejects_corrupt_file(self, fixture_dir, capsys):
        (fixture_dir / "gt.json").write_text("[{]", encoding="utf-8")
        code = main(["validate", "--collection", str(fixture_dir),
                     "--gt", _gt(fixture_dir)])
        assert code == 1
        assert "malformed JSON" in capsys.readouterr().err


class TestRankVerb:
    def test_records_retriever_writes_rankings(self, fixture_dir, tmp_path, capsys):
        out = tmp_path / "rankings.json"
        code = main(["rank", "--collection", str(fixture_dir), "--questions",
                     _q(fixture_dir), "--retriever", "records", "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text(encoding="utf-8"))
        assert len(payload) == 14
        assert {r["confidence"] for r in payload[0]["ranking"]} <= {0.0, 1.0}

    def test_textspot_retriever_writes_rankings(self, fixture_dir, tmp_path):
        out = tmp_path / "rankings.json"
        code = main(["rank", "--collection", str(fixture_dir), "--questions",
                     _q(fixture_dir), "--retriever", "textspot", "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text(encoding="utf-8"))
        assert all(0.0 <= r["confidence"] <= 1.0
                   for entry in payload for r in entry["ranking"])

    def test_keyword_overrides_file(self, fixture_dir, tmp_path):
        overrides = tmp_path / "keywords.json"
        overrides.write_text(json.dumps({"q01": ["Candidate", "Registration"]}),
                             encoding="utf-8")
        out = tmp_path / "rankings.json"
        code = main(["rank", "--collection", str(fixture_dir), "--questions",
                     _q(fixture_dir), "--retriever", "textspot", "--out", str(out),
                     "--keywords", str(overrides)])
        assert code == 0
        payload = json.loads(out.read_text(encoding="utf-8"))
        q01 = next(e for e in payload if e["question_id"] == "q01")
        # Both words sit in every document's title row.
        assert all(r["confidence"] == 1.0 for r in q01["ranking"])

    def test_bad_keyword_file_fails_cleanly(self, fixture_dir, tmp_path, capsys):
        overrides = tmp_path / "keywords.json"
        overrides.write_text(json.dumps({"q01": []}), encoding="utf-8")
        code = main(["rank", "--collection", str(fixture_dir), "--questions",
                     _q(fixture_dir), "--retriever", "textspot",
                     "--out", str(tmp_path / "r.json"), "--keywords", str(overrides)])
        assert code == 1
        assert "non-empty list" in capsys.readouterr().err


class TestAnswerVerb:
    def test_records_answerer_from_rankings(self, fixture_dir, tmp_path):
        rankings = tmp_path / "rankings.json"
        submissions = tmp_path / "submissions.json"
        assert main(["rank", "--collection", str(fixture_dir), "--questions",
                     _q(fixture_dir), "--retriever", "records",
                     "--out", str(rankings)]) == 0
        assert main(["answer", "--collection", str(fixture_dir), "--questions",
                     _q(fixture_dir), "--rankings", str(rankings),
                     "--answerer", "records", "--out", str(submissions)]) == 0
        assert main(["evaluate", "--submission", str(submissions),
                     "--gt", _gt(fixture_dir)]) == 0

    def test_adapter_answerer_with_stub(self, fixture_dir, tmp_path):
        rankings = tmp_path / "rankings.json"
        submissions = tmp_path / "submissions.json"
        assert main(["rank", "--collection", str(fixture_dir), "--questions",
                     _q(fixture_dir), "--retriever", "records",
                     "--out", str(rankings)]) == 0
        assert main(["answer", "--collection", str(fixture_dir), "--questions",
                     _q(fixture_dir), "--rankings", str(rankings),
                     "--answerer", "adapter", "--adapter", "stub",
                     "--out", str(submissions)]) == 0

    def test_missing_ranking_entries_fail(self, fixture_dir, tmp_path, capsys):
        rankings = tmp_path / "rankings.json"
        rankings.write_text("[]", encoding="utf-8")
        code = main(["answer", "--collection", str(fixture_dir), "--questions",
                     _q(fixture_dir), "--rankings", str(rankings),
                     "--answerer", "records", "--out", str(tmp_path / "s.json")])
        assert code == 1
        assert "lacks entries" in capsys.readouterr().err


class TestRunVerb:
    def test_records_pipeline_end_to_end(self, fixture_dir, tmp_path, capsys):
        submissions = tmp_path / "submissions.json"
        report = tmp_path / "report.json"
        assert main(["run", "--collection", str(fixture_dir), "--questions",
                     _q(fixture_dir), "--pipeline", "records+records",
                     "--out", str(submissions)]) == 0
        assert main(["evaluate", "--submission", str(submissions),
                     "--gt", _gt(fixture_dir), "--out", str(report)]) == 0
        table = capsys.readouterr().out
        assert "MAP   100.00" in table
        assert "ANLSL 1.0000" in table
        payload = json.loads(report.read_text(encoding="utf-8"))
        assert payload["map_percent"] == 100.0
        assert payload["anlsl"] == 1.0
        assert len(payload["per_question"]) == 14

    def test_missing_adapter_is_config_error(self, fixture_dir, tmp_path, capsys, monkeypatch):
        monkeypatch.delenv("DOCQAKIT_ADAPTER", raising=False)
        code = main(["run", "--collection", str(fixture_dir), "--questions",
                     _q(fixture_dir), "--pipeline", "textspot+adapter",
                     "--out", str(tmp_path / "s.json")])
        assert code == 1
        assert "DOCQAKIT_ADAPTER" in capsys.readouterr().err

    def test_adapter_runtime_failure_exits_two(self, fixture_dir, tmp_path, capsys):
        script = tmp_path / "refuse.py"
        script.write_text(
            "import json, sys\n"
            "for line in sys.stdin:\n"
            "    rid = json.loads(line)['id']\n"
            "    print(json.dumps({'id': rid, 'error': 'refused'}), flush=True)\n",
            encoding="utf-8",
        )
        code = main(["run", "--collection", str(fixture_dir), "--questions",
                     _q(fixture_dir), "--pipeline", "records+adapter",
                     "--adapter", f"stdio:{sys.executable} {script}",
                     "--out", str(tmp_path / "s.json")])
        assert code == 2
        assert "runtime error" in capsys.readouterr().err

    def test_gt_ranking_requires_gt_file(self, fixture_dir, tmp_path, capsys):
        code = main(["run", "--collection", str(fixture_dir), "--questions",
                     _q(fixture_dir), "--pipeline", "records+records",
                     "--gt-ranking", "--out", str(tmp_path / "s.json")])
        assert code == 1
        assert "gt" in capsys.readouterr().err.lower()

    def test_threads_flag_keeps_output_identical(self, fixture_dir, tmp_path):
        single = tmp_path / "single.json"
        pooled = tmp_path / "pooled.json"
        base = ["run", "--collection", str(fixture_dir), "--questions",
                _q(fixture_dir), "--pipeline", "records+records"]
        assert main(base + ["--out", str(single), "--threads", "1"]) == 0
        assert main(base + ["--out", str(pooled), "--threads", "4"]) == 0
        assert single.read_bytes() == pooled.read_bytes()


class TestEvaluateVerb:
    def test_prints_per_question_table(self, fixture_dir, tmp_path, capsys):
        submissions = tmp_path / "submissions.json"
        main(["run", "--collection", str(fixture_dir), "--questions",
              _q(fixture_dir), "--pipeline", "records+records",
              "--out", str(submissions)])
        capsys.readouterr()
        assert main(["evaluate", "--submission", str(submissions),
                     "--gt", _gt(fixture_dir)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].split() == ["question", "AP", "ANLSL"]
        assert len([l for l in lines[1:] if l.startswith("q")]) == 14

    def test_tau_flag_loosens_scoring(self, fixture_dir, tmp_path, capsys):
        submissions = tmp_path / "submissions.json"
        gt_path = tmp_path / "gt_variant.json"
        gt = json.loads((fixture_dir / "gt.json").read_text(encoding="utf-8"))
        main(["run", "--collection", str(fixture_dir), "--questions",
              _q(fixture_dir), "--pipeline", "records+records",
              "--out", str(submissions)])
        # Perturb one gt answer so similarity drops below the default tau:
        # padding longer than the answer itself caps NLS under 0.5.
        target = next(e for e in gt if e["answers"])
        target["answers"][0] = target["answers"][0] + "x" * (len(target["answers"][0]) + 5)
        gt_path.write_text(json.dumps(gt), encoding="utf-8")
        capsys.readouterr()
        assert main(["evaluate", "--submission", str(submissions),
                     "--gt", str(gt_path)]) == 0
        strict = capsys.readouterr().out
        assert main(["evaluate", "--submission", str(submissions),
                     "--gt", str(gt_path), "--tau", "0"]) == 0
        loose = capsys.readouterr().out
        strict_score = float(strict.splitlines()[-1].split()[-1])
        loose_score = float(loose.splitlines()[-1].split()[-1])
        assert loose_score > strict_score

    def test_mismatched_ids_fail(self, fixture_dir, tmp_path, capsys):
        submissions = tmp_path / "submissions.json"
        submissions.write_text(json.dumps([{
            "question_id": "zz", "answers": [],
            "ranking": [{"doc_id": "00001", "confidence": 1.0}],
        }]), encoding="utf-8")
        code = main(["evaluate", "--submission", str(submissions),
                     "--gt", _gt(fixture_dir)])
        assert code == 1
        assert "missing submissions" in capsys.readouterr().err


class TestDeterminism:
    def test_fixture_generation_is_byte_stable(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        for out in (a, b):
            assert main(["fixture", "--out", str(out), "--seed", "4",
                         "--n-docs", "25"]) == 0
        for name in ("documents.json", "records.json", "schema.json",
                     "questions.json", "gt.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_run_is_byte_stable(self, fixture_dir, tmp_path):
        outs = []
        for name in ("one.json", "two.json"):
            out = tmp_path / name
            assert main(["run", "--collection", str(fixture_dir), "--questions",
                         _q(fixture_dir), "--pipeline", "textspot+adapter",
                         "--adapter", "stub", "--out", str(out)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
