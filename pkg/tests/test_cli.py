import json
from pathlib import Path

import pytest

from discrimattr.cli import main

DATA = Path(__file__).parent / "data"


def write_config(tmp_path, name="config.json", **extra):
    cfg = {
        "definitions": str(DATA / "definitions.jsonl"),
        "scene_graphs": [str(DATA / "scene_regions.jsonl"),
                         str(DATA / "scene_relationships.jsonl")],
        "assertions": str(DATA / "assertions.tsv"),
        "lemma_table": str(DATA / "lemmas.tsv"),
        "stopwords": str(DATA / "stopwords.txt"),
        "gold": str(DATA / "gold.csv"),
        "annotations": str(DATA / "annotations.csv"),
        "output_dir": str(tmp_path / "out"),
    }
    cfg.update(extra)
    path = tmp_path / name
    path.write_text(json.dumps(cfg), encoding="utf-8")
    return path


@pytest.fixture
def built(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["build", "--config", str(cfg)]) == 0
    return cfg, tmp_path / "out"


def test_build_writes_stores_and_manifest(built, capsys):
    _, out = built
    for f in ("definitions.index.json", "commonsense.index.json",
              "visual.index.json", "manifest.json"):
        assert (out / f).exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert set(manifest["document_counts"]) == {"definitions", "commonsense", "visual"}
    assert manifest["document_counts"]["definitions"] == 13
    assert all("sha256" in entry for entry in manifest["inputs"].values())


def test_build_missing_input_exits_1(tmp_path, capsys):
    cfg = write_config(tmp_path, definitions=str(tmp_path / "nope.jsonl"))
    assert main(["build", "--config", str(cfg)]) == 1


def test_build_determinism(tmp_path):
    cfg1 = write_config(tmp_path, name="c1.json", output_dir=str(tmp_path / "o1"))
    cfg2 = write_config(tmp_path, name="c2.json", output_dir=str(tmp_path / "o2"))
    assert main(["build", "--config", str(cfg1)]) == 0
    assert main(["build", "--config", str(cfg2)]) == 0
    for f in ("definitions.index.json", "commonsense.index.json", "visual.index.json"):
        assert (tmp_path / "o1" / f).read_bytes() == (tmp_path / "o2" / f).read_bytes()


def test_classify_single_triple(built, capsys):
    cfg, out = built
    assert main(["classify", "--config", str(cfg), "apple", "banana", "red"]) == 0
    stdout = capsys.readouterr().out
    assert "apple,banana,red,1" in stdout
    assert (out / "verdicts.jsonl").exists()
    assert (out / "semeval.csv").read_text().strip() == "apple,banana,red,1"


def test_classify_negative_triple(built, capsys):
    cfg, _ = built
    assert main(["classify", "--config", str(cfg), "planet", "moon", "body"]) == 0
    assert "planet,moon,body,0" in capsys.readouterr().out


def test_classify_triples_file_order_preserved(built, tmp_path, capsys):
    cfg, out = built
    tf = tmp_path / "triples.csv"
    tf.write_text("planet,moon,body\napple,banana,red\ncat,lion,whiskers\n", encoding="utf-8")
    assert main(["classify", "--config", str(cfg), "--triples-file", str(tf)]) == 0
    lines = (out / "semeval.csv").read_text().strip().splitlines()
    assert lines == ["planet,moon,body,0", "apple,banana,red,1", "cat,lion,whiskers,1"]


def test_classify_without_build_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["classify", "--config", str(cfg), "a", "b", "c"]) == 2


def test_classify_wrong_arity_exits_1(built, capsys):
    cfg, _ = built
    assert main(["classify", "--config", str(cfg), "a", "b"]) == 1


def test_manifest_mismatch_refuses(built, tmp_path, capsys):
    cfg, out = built
    # point the manifest at a modified copy of one input
    defs2 = tmp_path / "defs2.jsonl"
    defs2.write_text((DATA / "definitions.jsonl").read_text() + "\n", encoding="utf-8")
    manifest = json.loads((out / "manifest.json").read_text())
    manifest["inputs"]["definitions"]["path"] = str(defs2)
    (out / "manifest.json").write_text(json.dumps(manifest), encoding="utf-8")
    assert main(["classify", "--config", str(cfg), "a", "b", "c"]) == 2


def test_explain_round_trip(built, capsys):
    cfg, _ = built
    main(["classify", "--config", str(cfg), "brandy", "whiskey", "wine"])
    first = [l for l in capsys.readouterr().out.splitlines() if "definition of brandy" in l]
    assert main(["explain", "--config", str(cfg), "brandy", "whiskey", "wine"]) == 0
    rendered = capsys.readouterr().out.strip()
    assert "definition of brandy" in rendered
    assert rendered == first[0].strip()


def test_explain_negative_verdict(built, capsys):
    cfg, _ = built
    main(["classify", "--config", str(cfg), "planet", "moon", "body"])
    capsys.readouterr()
    assert main(["explain", "--config", str(cfg), "planet", "moon", "body"]) == 0
    assert "no explanation" in capsys.readouterr().out


def test_evaluate_fixture_gold(built, capsys):
    cfg, out = built
    assert main(["evaluate", "--config", str(cfg)]) == 0
    stdout = capsys.readouterr().out
    # hand-checked confusion matrix on the fixture gold set
    assert "TP=5 FP=1 FN=1 TN=2" in stdout
    assert "macro F1: 0.7500" in stdout
    report = json.loads((out / "report.json").read_text())
    assert report["macro_f1"] == pytest.approx(0.75)
    assert (out / "report.txt").exists()


def test_evaluate_without_annotations_skips_categories(built, tmp_path, capsys):
    cfg_path = write_config(tmp_path, name="noann.json",
                            annotations=str(tmp_path / "missing.csv"))
    main(["build", "--config", str(cfg_path)])
    assert main(["evaluate", "--config", str(cfg_path)]) == 0
    out = json.loads((tmp_path / "out" / "report.json").read_text())
    assert out["category_recall"] is None


def test_evaluate_determinism(tmp_path):
    outputs = []
    for name in ("e1", "e2"):
        cfg = write_config(tmp_path, name=f"{name}.json", output_dir=str(tmp_path / name))
        assert main(["build", "--config", str(cfg)]) == 0
        assert main(["evaluate", "--config", str(cfg)]) == 0
        outputs.append(tmp_path / name)
    for f in ("report.txt", "report.json", "verdicts.jsonl", "semeval.csv"):
        assert (outputs[0] / f).read_bytes() == (outputs[1] / f).read_bytes()


def test_report_rerenders(built, capsys):
    cfg, out = built
    main(["evaluate", "--config", str(cfg)])
    rendered = capsys.readouterr().out
    assert main(["report", "--config", str(cfg)]) == 0
    assert capsys.readouterr().out == rendered


def test_stage_order_flag_changes_decider_not_verdict(built, capsys):
    cfg, _ = built
    main(["classify", "--config", str(cfg), "--stage-order", "VFM,CKG,DBM",
          "apple", "banana", "red"])
    assert "apple,banana,red,1" in capsys.readouterr().out


def test_bad_stage_order_exits_1(built, capsys):
    cfg, _ = built
    assert main(["classify", "--config", str(cfg), "--stage-order", "DBM,DBM,VFM",
                 "a", "b", "c"]) == 1


def test_env_var_data_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("DISCRIMATTR_DATA_DIR", str(DATA))
    cfg = {
        "definitions": "definitions.jsonl",
        "scene_graphs": ["scene_regions.jsonl", "scene_relationships.jsonl"],
        "assertions": "assertions.tsv",
        "lemma_table": "lemmas.tsv",
        "stopwords": "stopwords.txt",
        "output_dir": str(tmp_path / "out"),
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg), encoding="utf-8")
    assert main(["build", "--config", str(path)]) == 0


def test_usage_error_exits_1(capsys):
    assert main(["frobnicate"]) == 1
