import json
import shutil

import pytest
from docx_builder import CONTRIBUTION, build_docx

from contribkit.cli import main, parse_weights

OUTPUTS = {"pairs_sections.csv", "pairs_documents.csv", "scatter.json", "distributions.json", "agenda.md", "bundle.json"}


def _tree(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


class TestAnalyze:
    def test_corpus_writes_all_outputs(self, corpus_dir, tmp_path):
        assert main(["analyze", str(corpus_dir), "--out", str(tmp_path / "out"), "-q"]) == 0
        assert {p.name for p in (tmp_path / "out").iterdir()} == OUTPUTS

    def test_byte_identical_across_runs_and_jobs(self, corpus_dir, tmp_path):
        for name, jobs in [("a", "1"), ("b", "1"), ("c", "4")]:
            assert main(["analyze", str(corpus_dir), "--out", str(tmp_path / name), "--jobs", jobs, "-q"]) == 0
        a = _tree(tmp_path / "a")
        assert a == _tree(tmp_path / "b") == _tree(tmp_path / "c")

    def test_writes_only_inside_out(self, corpus_dir, tmp_path):
        corpus = tmp_path / "corpus"
        shutil.copytree(corpus_dir, corpus)
        before = sorted(p.relative_to(tmp_path) for p in tmp_path.rglob("*"))
        assert main(["analyze", str(corpus), "--out", str(tmp_path / "out"), "-q"]) == 0
        after = sorted(p.relative_to(tmp_path) for p in tmp_path.rglob("*") if "out" not in p.relative_to(tmp_path).parts)
        assert after == before

    def test_empty_directory(self, tmp_path, capsys):
        (tmp_path / "empty").mkdir()
        assert main(["analyze", str(tmp_path / "empty"), "--out", str(tmp_path / "out")]) == 1
        assert "no parsable documents" in capsys.readouterr().err
        assert not (tmp_path / "out").exists()

    def test_unreachable_endpoint(self, corpus_dir, tmp_path, dead_endpoint):
        argv = ["analyze", str(corpus_dir), "--backend-embed", "remote", "--endpoint", dead_endpoint,
                "--out", str(tmp_path / "out"), "-q"]
        assert main(argv) == 2

    def test_flag_overrides_config_file(self, corpus_dir, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"input": str(corpus_dir), "k": 4, "seed": 7}), encoding="utf-8")
        assert main(["analyze", "--config", str(cfg), "--k", "6", "--weights", "0.6,0.4", "--print-config"]) == 0
        printed = json.loads(capsys.readouterr().out)
        assert (printed["k"], printed["seed"], printed["heading_weight"]) == (6, 7, pytest.approx(0.6))

    def test_bad_thresholds_exit_1(self, corpus_dir, tmp_path):
        argv = ["analyze", str(corpus_dir), "--tau-hi", "0.2", "--tau-lo", "0.5", "--out", str(tmp_path / "o"), "-q"]
        assert main(argv) == 1

    def test_report_reemits_outputs(self, corpus_dir, tmp_path):
        assert main(["analyze", str(corpus_dir), "--out", str(tmp_path / "a"), "-q"]) == 0
        assert main(["report", str(tmp_path / "a" / "bundle.json"), "--out", str(tmp_path / "b"), "-q"]) == 0
        assert _tree(tmp_path / "a") == _tree(tmp_path / "b")

    def test_report_bad_bundle(self, tmp_path):
        (tmp_path / "bundle.json").write_text("{}", encoding="utf-8")
        assert main(["report", str(tmp_path / "bundle.json"), "--out", str(tmp_path / "o"), "-q"]) == 1


class TestEval:
    def test_section_expert_table(self, fixtures_dir, capsys):
        rc = main(["eval", str(fixtures_dir / "section_pairs_algorithm.csv"), str(fixtures_dir / "section_pairs_expert.csv")])
        assert rc == 0
        assert capsys.readouterr().out.startswith("r = 0.98")

    def test_missing_scores_reported(self, fixtures_dir, capsys):
        rc = main(["eval", str(fixtures_dir / "document_pairs_algorithm.csv"), str(fixtures_dir / "document_pairs_delegate.csv")])
        assert rc == 0
        assert "7 pairs used, 3 dropped" in capsys.readouterr().out

    def test_too_few_pairs(self, tmp_path):
        (tmp_path / "algo.csv").write_text("pair_id,combined\nA,0.5\nB,0.6\n", encoding="utf-8")
        (tmp_path / "human.csv").write_text("pair_id,score\nA,0.4\nB,NA\n", encoding="utf-8")
        assert main(["eval", str(tmp_path / "algo.csv"), str(tmp_path / "human.csv")]) == 1

    def test_missing_file(self, tmp_path):
        assert main(["eval", str(tmp_path / "nope.csv"), str(tmp_path / "nope2.csv")]) == 1


class TestSummarize:
    def test_one_section(self, tmp_path, capsys):
        (tmp_path / "one.md").write_text("# Bandwidth\nThe bandwidth is 20 MHz.\n", encoding="utf-8")
        assert main(["summarize", str(tmp_path / "one.md"), "-q"]) == 0
        out = capsys.readouterr().out
        assert out.count("## ") == 1
        assert "The bandwidth is 20 MHz." in out

    def test_docx_sections_in_order(self, tmp_path, capsys):
        (tmp_path / "Acme_R1-1.docx").write_bytes(build_docx(CONTRIBUTION))
        assert main(["summarize", str(tmp_path / "Acme_R1-1.docx"), "-q"]) == 0
        out = capsys.readouterr().out
        heads = [line for line in out.splitlines() if line.startswith("## ")]
        assert [h.split()[1] for h in heads] == ["1", "2.1", "2.2", "3"]
        tallies = [line for line in out.splitlines() if line.startswith("Proposals: ")]
        totals = [sum(int(t.split(": ")[i + 1].split(",")[0]) for t in tallies) for i in range(3)]
        assert totals == [3, 0, 1]  # proposals, scenarios, observations over all sections
        assert "- High Priority Proposal 3.1-1a: Both during" in out

    def test_non_document(self, tmp_path):
        (tmp_path / "fake.docx").write_bytes(b"definitely not a zip archive")
        assert main(["summarize", str(tmp_path / "fake.docx"), "-q"]) == 1


@pytest.mark.parametrize("text, w", [("0.5", 0.5), ("0.6,0.4", 0.6), ("3,1", 0.75)])
def test_parse_weights(text, w):
    assert parse_weights(text) == pytest.approx(w)
