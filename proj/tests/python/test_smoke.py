import os
import pathlib

import pytest

import radnmt

DATA = pathlib.Path(os.environ.get("RADNMT_DATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "data"))


def test_settings_and_widths():
    assert radnmt.settings() == ["W", "W+C+R", "W+C", "W+R", "C+R"]
    assert radnmt.input_dim("W+C+R", 620) == 1860
    assert radnmt.input_dim("C+R", 32) == 64
    with pytest.raises(radnmt.RadnmtError, match="ConfigError"):
        radnmt.input_dim("C", 8)


def test_decomposition():
    table = radnmt.DecompositionTable.load(str(DATA / "decomposition.tsv"))
    assert len(table) > 0
    assert "木" in table.decompose_char("森")
    chars, radicals = table.decompose_word("森林")
    assert chars == ["森", "林"]
    assert radicals.count("木") == 5


def test_metrics():
    refs = [["a b c e"]]
    score = radnmt.bleu(["a b c d"], refs)
    assert score.details["precision_1"] == 0.75
    assert score.value == 0.0
    same = radnmt.evaluate(["the cat sat on the mat"], [["the cat sat on the mat"]])
    by_name = {m["name"]: m["value"] for m in same["metrics"]}
    assert by_name["BLEU"] == pytest.approx(1.0)
    assert by_name["CharacTER"] == 0.0
    assert radnmt.character_sentence("ab", "ac") == 0.5
    with pytest.raises(radnmt.RadnmtError, match="InputError"):
        radnmt.bleu(["a", "b"], [["a"]])


def test_train_and_translate(tmp_path):
    cfg = tmp_path / "tiny.cfg"
    cfg.write_text(
        "\n".join(
            [
                f"train.source = {DATA / 'toy/train.zh'}",
                f"train.target = {DATA / 'toy/train.en'}",
                f"table = {DATA / 'decomposition.tsv'}",
                f"output_dir = {tmp_path / 'run'}",
                "embedding = 8",
                "hidden = 12",
                "batch_size = 16",
                "max_updates = 10",
                "validate_every = 5",
                "seed = 5",
            ]
        )
        + "\n"
    )
    seen = []
    ledger = radnmt.train(cfg, progress=lambda p: seen.append(p["update"]))
    assert seen == list(range(1, 11))
    assert [r["update"] for r in ledger["records"]] == [5, 10]
    out = radnmt.translate(str(tmp_path / "run" / "model.bin"), ["我 吃 鱼", ""], beam=2)
    assert len(out) == 2 and out[1] == ""
    with pytest.raises(radnmt.RadnmtError, match="IoError"):
        radnmt.translate(str(tmp_path / "missing.bin"), ["我"])
