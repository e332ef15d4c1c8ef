import json
from pathlib import Path


from adsb_features.cli import EXIT_DATA, EXIT_IO, EXIT_OK, EXIT_USAGE, PipelineConfig, main
from adsb_features.ingest import load_tracks
from adsb_features.preprocess import load_scaler, load_sequences
from adsb_features.synthetic import write_fixture

FIXTURE = Path(__file__).resolve().parents[1] / "data" / "fixture"


def test_bundled_fixture_matches_generator(tmp_path):
    write_fixture(tmp_path)
    bundled = sorted(p.name for p in (FIXTURE / "snapshots").iterdir())
    fresh = sorted(p.name for p in (tmp_path / "snapshots").iterdir())
    assert bundled == fresh
    for name in fresh:
        assert (tmp_path / "snapshots" / name).read_bytes() == \
            (FIXTURE / "snapshots" / name).read_bytes()
    assert (tmp_path / "whitelist.txt").read_bytes() == (FIXTURE / "whitelist.txt").read_bytes()


def test_stages_standalone(tmp_path, capsys):
    snaps = FIXTURE / "snapshots"
    trk, seq = tmp_path / "d.trk", tmp_path / "s.seq"
    assert main(["ingest", "--input", str(snaps), "--whitelist", str(FIXTURE / "whitelist.txt"),
                 "--require-interesting", "--threads", "2", "--out", str(trk)]) == EXIT_OK
    assert {t.reg for t in load_tracks(trk)} == {"N101SV", "N202SV", "N303SV", "N404PD",
                                                 "N505MD"}
    assert (tmp_path / "d.manifest.json").exists()

    assert main(["preprocess", "--dataset", str(trk), "--seed", "42", "--min-present", "6",
                 "--out", str(seq), "--scaler", str(tmp_path / "all.stats")]) == EXIT_OK
    seqs = load_sequences(seq)
    assert seqs and all(s.samples_present >= 6 for s in seqs)

    tr, va, stats = tmp_path / "tr.seq", tmp_path / "va.seq", tmp_path / "tr.stats"
    assert main(["split", "--sequences", str(seq), "--train-out", str(tr), "--val-out", str(va),
                 "--scaler", str(stats)]) == EXIT_OK
    n_tr, n_va = len(load_sequences(tr)), len(load_sequences(va))
    assert n_tr + n_va == len(seqs)
    assert load_scaler(stats).fitted_on < load_scaler(tmp_path / "all.stats").fitted_on

    model, hist = tmp_path / "m.params", tmp_path / "h.csv"
    assert main(["train", "--sequences", str(tr), "--validation", str(va), "--scaler", str(stats),
                 "--variant", "dense", "--lr", "1e-3", "--epochs", "3", "--batch", "32",
                 "--seed", "42", "--out", str(model), "--history", str(hist)]) == EXIT_OK
    assert hist.read_text().splitlines()[0] == "epoch,train_mse,val_mse"
    assert len(hist.read_text().splitlines()) == 4

    out = tmp_path / "report"
    assert main(["extract", "--model", str(model), "--sequences", str(va), "--scaler", str(stats),
                 "--method", "both", "--k", "10", "--out", str(out)]) == EXIT_OK
    for name in ("scores.csv", "selected.txt", "comparison.txt", "report.txt", "manifest.json"):
        assert (out / name).exists()
    assert len((out / "selected.txt").read_text().splitlines()) == 10

    again = tmp_path / "again"
    assert main(["report", "--scores", str(out / "scores.csv"), "--k", "auto",
                 "--out", str(again)]) == EXIT_OK
    assert (again / "selected.txt").exists()


def test_train_without_validation_splits_internally(tmp_path):
    trk, seq = tmp_path / "d.trk", tmp_path / "s.seq"
    main(["ingest", "--input", str(FIXTURE / "snapshots"), "--require-interesting",
          "--out", str(trk)])
    main(["preprocess", "--dataset", str(trk), "--out", str(seq)])
    assert main(["train", "--sequences", str(seq), "--epochs", "1",
                 "--out", str(tmp_path / "m.params")]) == EXIT_OK
    manifest = json.loads((tmp_path / "m.manifest.json").read_text())
    assert manifest["seeds"] == {"split": 42, "train": 42}


def test_lstm_variant_cli(tmp_path):
    trk, seq = tmp_path / "d.trk", tmp_path / "s.seq"
    main(["ingest", "--input", str(FIXTURE / "snapshots"), "--require-interesting",
          "--out", str(trk)])
    main(["preprocess", "--dataset", str(trk), "--out", str(seq),
          "--scaler", str(tmp_path / "s.stats")])
    model = tmp_path / "m.params"
    assert main(["train", "--sequences", str(seq), "--variant", "lstm", "--hidden-dim", "4",
                 "--epochs", "1", "--out", str(model)]) == EXIT_OK
    assert main(["extract", "--model", str(model), "--sequences", str(seq), "--scaler",
                 str(tmp_path / "s.stats"), "--method", "ablation",
                 "--out", str(tmp_path / "r")]) == EXIT_OK
    assert main(["extract", "--model", str(model), "--sequences", str(seq), "--scaler",
                 str(tmp_path / "s.stats"), "--method", "weight_norm",
                 "--out", str(tmp_path / "r2")]) == EXIT_DATA


def test_unknown_flag(capsys):
    assert main(["ingest", "--bogus"]) == EXIT_USAGE
    err = capsys.readouterr().err
    assert "usage:" in err
    assert err.strip().splitlines()[-1].startswith("error [cli]:")


def test_unknown_subcommand():
    assert main(["frobnicate"]) == EXIT_USAGE


def test_missing_input_dir(tmp_path, capsys):
    missing = tmp_path / "nowhere"
    code = main(["ingest", "--input", str(missing), "--require-interesting",
                 "--out", str(tmp_path / "d.trk")])
    assert code == EXIT_IO
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and str(missing) in err[0] and err[0].startswith("error [ingest]:")


def test_filter_needs_criterion(tmp_path):
    code = main(["ingest", "--input", str(FIXTURE / "snapshots"), "--out", str(tmp_path / "x")])
    assert code == EXIT_USAGE


def test_data_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.trk"
    bad.write_text("garbage\n")
    code = main(["preprocess", "--dataset", str(bad), "--out", str(tmp_path / "s.seq")])
    assert code == EXIT_DATA
    assert capsys.readouterr().err.startswith("error [preprocess]:")


def test_pipeline_missing_input_dir(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("input = nope\nrequire_interesting = true\n")
    assert main(["pipeline", "--config", str(cfg), "--workspace", str(tmp_path / "ws")]) == EXIT_IO


def test_config_parsing_and_overrides(tmp_path):
    cfg_path = tmp_path / "run.cfg"
    cfg_path.write_text("# comment\ninput = snaps\nlr = 0.5   # inline\nrequire-interesting = yes\n")
    cfg = PipelineConfig.from_file(cfg_path)
    assert cfg.lr == 0.5 and cfg.require_interesting is True
    assert cfg.path(cfg.input) == tmp_path / "snaps"
    cfg.update({"lr": "0.25", "epochs": None})
    assert cfg.lr == 0.25 and cfg.epochs == 200


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("input = x\nlearning_rate = 3\n")
    assert main(["pipeline", "--config", str(cfg)]) == EXIT_USAGE


def test_pipeline_flag_overrides_config(tmp_path):
    ws = tmp_path / "ws"
    assert main(["pipeline", "--config", str(FIXTURE / "run.cfg"), "--workspace", str(ws),
                 "--epochs", "2", "--k", "5"]) == EXIT_OK
    manifest = json.loads((ws / "manifest.json").read_text())
    assert manifest["config"]["epochs"] == 2 and manifest["config"]["k"] == "5"
    assert len((ws / "report" / "selected.txt").read_text().splitlines()) == 5
    assert len((ws / "history.csv").read_text().splitlines()) == 3
