"""Command-line driver: one subcommand per pipeline stage plus ``pipeline``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error. Every
failure prints a single ``error [<stage>]: ...`` line to stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import extraction, ingest, preprocess
from .autoencoder import TrainConfig, load_params, save_params, train
from .core import DEFAULT_INTERESTING_FIELD
from .errors import AdsbError

logger = logging.getLogger("adsb_features")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(path, stage: str, config: dict, seeds: dict, artifacts: dict) -> None:
    """JSON manifest: config snapshot, seeds, and artifact hashes.

    ``artifacts`` maps a display name (relative path) to a file path. Keys
    are sorted and no timestamps are recorded, so identical runs produce
    identical bytes.
    """
    doc = {"stage": stage, "config": config, "seeds": seeds,
           "artifacts": {name: sha256(p) for name, p in sorted(artifacts.items())}}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _require_dir(path) -> Path:
    p = Path(path)
    if not p.is_dir():
        raise FileNotFoundError(f"input directory not found: {p}")
    return p


def _require_file(path) -> Path:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"file not found: {p}")
    return p


def _snapshot_files(input_dir) -> list[Path]:
    return sorted(p for p in _require_dir(input_dir).iterdir()
                  if p.is_file() and p.suffix == ".json")


# -- stages -----------------------------------------------------------------

def stage_ingest(input_dir, out, whitelist=None, require_interesting=False,
                 country="United States", interesting_field=DEFAULT_INTERESTING_FIELD,
                 threads=1) -> dict:
    regs = ingest.read_whitelist(_require_file(whitelist)) if whitelist else frozenset()
    try:
        fconf = ingest.FilterConfig(regs, require_interesting, country)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    files = _snapshot_files(input_dir)
    events, warnings = ingest.load_snapshots(files, interesting_field, threads)
    kept = [e for e in events if ingest.passes_filter(e, fconf)]
    tracks = ingest.build_tracks(kept)
    ingest.persist_tracks(tracks, out)
    logger.info("ingest: %d files, %d events, %d kept, %d tracks, %d warnings",
                len(files), len(events), len(kept), len(tracks), len(warnings))
    return {"files": len(files), "events": len(events), "kept": len(kept),
            "tracks": len(tracks), "warnings": len(warnings)}


def stage_preprocess(dataset, out, seed=42, min_present=6, scaler=None) -> dict:
    tracks = ingest.load_tracks(_require_file(dataset))
    seqs = preprocess.build_sequences(tracks, seed, min_present)
    preprocess.save_sequences(seqs, out)
    if scaler:
        preprocess.save_scaler(preprocess.fit_scaler(seqs), scaler)
    logger.info("preprocess: %d tracks -> %d usable sequences", len(tracks), len(seqs))
    return {"sequences": len(seqs)}


def stage_split(sequences, train_out, val_out, train_fraction=0.8, seed=42,
                group_by_aircraft=False, scaler=None) -> dict:
    seqs = preprocess.load_sequences(_require_file(sequences))
    tr, va = preprocess.split_dataset(seqs, train_fraction, seed, group_by_aircraft)
    preprocess.save_sequences(tr, train_out)
    preprocess.save_sequences(va, val_out)
    if scaler:
        preprocess.save_scaler(preprocess.fit_scaler(tr), scaler)
    return {"train": len(tr), "validation": len(va)}


def _scaled(seqs, stats):
    values, mask = preprocess.stack(seqs)
    return preprocess.scale_values(values, mask, stats), mask


def stage_train(sequences, out, history=None, validation=None, scaler=None,
                config: TrainConfig = TrainConfig(), train_fraction=0.8, split_seed=42) -> dict:
    seqs = preprocess.load_sequences(_require_file(sequences))
    if validation:
        tr, va = seqs, preprocess.load_sequences(_require_file(validation))
    else:
        tr, va = preprocess.split_dataset(seqs, train_fraction, split_seed)
    stats = (preprocess.load_scaler(_require_file(scaler)) if scaler
             else preprocess.fit_scaler(tr))
    xt, mt = _scaled(tr, stats)
    xv, mv = _scaled(va, stats)
    params, hist = train(xt, mt, xv, mv, config)
    save_params(params, out)
    if history:
        Path(history).write_text(hist.to_csv(), encoding="utf-8")
    return {"train": len(tr), "validation": len(va),
            "final_train_mse": hist.train_mse[-1], "final_val_mse": hist.val_mse[-1]}


def _parse_k(k):
    if k == "auto":
        return k
    try:
        return int(k)
    except (TypeError, ValueError):
        raise UsageError(f"--k must be an integer or 'auto', got {k!r}") from None


def stage_extract(model, sequences, scaler, out, method="both", k="10") -> dict:
    params = load_params(_require_file(model))
    stats = preprocess.load_scaler(_require_file(scaler))
    seqs = preprocess.load_sequences(_require_file(sequences))
    methods = extraction.METHODS if method == "both" else (method,)
    scores = []
    for m in methods:
        if m == "weight_norm":
            scores.append(extraction.score_by_weight_norm(params))
        else:
            scores.append(extraction.score_by_ablation(params, _scaled(seqs, stats), stats))
    report = extraction.build_report(scores, _parse_k(k))
    Path(out).mkdir(parents=True, exist_ok=True)
    extraction.emit_report(report, out)
    return {"selected": list(report.selected), "overlap": report.overlap_with_reference}


def stage_report(scores, out, k="10") -> dict:
    report = extraction.build_report(extraction.read_scores_csv(_require_file(scores)),
                                     _parse_k(k))
    Path(out).mkdir(parents=True, exist_ok=True)
    extraction.emit_report(report, out)
    return {"selected": list(report.selected), "overlap": report.overlap_with_reference}


# -- pipeline config --------------------------------------------------------

def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


@dataclass
class PipelineConfig:
    """Everything a full run needs. Relative paths resolve against ``base``."""

    input: str = ""
    workspace: str = "workspace"
    whitelist: str = ""
    require_interesting: bool = False
    country: str = "United States"
    interesting_field: str = DEFAULT_INTERESTING_FIELD
    seed: int = 42
    min_present: int = 6
    train_fraction: float = 0.8
    split_seed: int = 42
    group_by_aircraft: bool = False
    variant: str = "dense"
    lr: float = 1e-3
    epochs: int = 200
    batch: int = 32
    train_seed: int = 42
    hidden_dim: int = 17
    mask_loss: bool = True
    method: str = "both"
    k: str = "10"
    threads: int = 1
    base: str = field(default=".", repr=False)

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        """Parse ``key = value`` lines; ``#`` starts a comment."""
        known = {f.name: f for f in fields(cls) if f.name != "base"}
        values = {}
        for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in known:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
        cfg = cls(base=str(Path(path).parent))
        cfg.update(values)
        return cfg

    def update(self, values: dict) -> None:
        for f in fields(self):
            if f.name in values and values[f.name] is not None:
                v = values[f.name]
                try:
                    if f.type in ("bool", bool):
                        v = _bool(v)
                    elif f.type in ("int", int):
                        v = int(v)
                    elif f.type in ("float", float):
                        v = float(v)
                    else:
                        v = str(v)
                except ValueError:
                    raise UsageError(f"bad value for {f.name}: {v!r}") from None
                setattr(self, f.name, v)

    def path(self, value) -> Path:
        p = Path(value)
        return p if p.is_absolute() else Path(self.base) / p

    def validate(self) -> None:
        if not self.input:
            raise UsageError("config needs 'input'")
        if not 0.0 < self.train_fraction < 1.0:
            raise UsageError("train_fraction must be in (0, 1)")
        if self.method not in ("both",) + extraction.METHODS:
            raise UsageError(f"unknown method {self.method!r}")
        _require_dir(self.path(self.input))
        if self.whitelist:
            _require_file(self.path(self.whitelist))

    def snapshot(self) -> dict:
        """Config as recorded in the manifest (no workspace or base paths)."""
        d = asdict(self)
        d.pop("base")
        d.pop("workspace")
        return d


def run_pipeline(cfg: PipelineConfig, workspace: Optional[Path] = None) -> Path:
    cfg.validate()
    ws = Path(workspace) if workspace else cfg.path(cfg.workspace)
    ws.mkdir(parents=True, exist_ok=True)
    art = {name: ws / name for name in (
        "dataset.trk", "sequences.seq", "train.seq", "val.seq", "scaler.stats",
        "model.params", "history.csv")}
    report_dir = ws / "report"
    summary = {}
    global _current_stage
    _current_stage = "ingest"
    summary["ingest"] = stage_ingest(
        cfg.path(cfg.input), art["dataset.trk"],
        cfg.path(cfg.whitelist) if cfg.whitelist else None,
        cfg.require_interesting, cfg.country, cfg.interesting_field, cfg.threads)
    _current_stage = "preprocess"
    summary["preprocess"] = stage_preprocess(art["dataset.trk"], art["sequences.seq"],
                                             cfg.seed, cfg.min_present)
    _current_stage = "split"
    summary["split"] = stage_split(art["sequences.seq"], art["train.seq"], art["val.seq"],
                                   cfg.train_fraction, cfg.split_seed, cfg.group_by_aircraft,
                                   art["scaler.stats"])
    _current_stage = "train"
    tconf = TrainConfig(cfg.variant, cfg.lr, cfg.epochs, cfg.batch, cfg.train_seed,
                        cfg.mask_loss, cfg.hidden_dim)
    summary["train"] = stage_train(art["train.seq"], art["model.params"], art["history.csv"],
                                   art["val.seq"], art["scaler.stats"], tconf)
    _current_stage = "extract"
    method = cfg.method
    if cfg.variant == "lstm" and method == "both":
        method = "ablation"
    summary["extract"] = stage_extract(art["model.params"], art["val.seq"],
                                       art["scaler.stats"], report_dir, method, cfg.k)
    artifacts = dict(art)
    for p in sorted(report_dir.iterdir()):
        artifacts[f"report/{p.name}"] = p
    (ws / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n",
                                     encoding="utf-8")
    artifacts["summary.json"] = ws / "summary.json"
    seeds = {"sampling": cfg.seed, "split": cfg.split_seed, "train": cfg.train_seed}
    write_manifest(ws / "manifest.json", "pipeline", cfg.snapshot(), seeds, artifacts)
    return ws


# -- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="adsb-features", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ingest", help="load snapshots, filter aircraft, build tracks")
    s.add_argument("--input", required=True)
    s.add_argument("--whitelist")
    s.add_argument("--require-interesting", action="store_true")
    s.add_argument("--country", default="United States")
    s.add_argument("--interesting-field", default=DEFAULT_INTERESTING_FIELD)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--out", required=True)

    s = sub.add_parser("preprocess", help="sample hour sequences from tracks")
    s.add_argument("--dataset", required=True)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--min-present", type=int, default=6)
    s.add_argument("--out", required=True)
    s.add_argument("--scaler", help="also fit a scaler on all sequences")

    s = sub.add_parser("split", help="train/validation split; optional scaler fit on train")
    s.add_argument("--sequences", required=True)
    s.add_argument("--train-fraction", type=float, default=0.8)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--group-by-aircraft", action="store_true")
    s.add_argument("--train-out", required=True)
    s.add_argument("--val-out", required=True)
    s.add_argument("--scaler")

    s = sub.add_parser("train", help="train an autoencoder")
    s.add_argument("--sequences", required=True)
    s.add_argument("--validation", help="validation sequences; default: split --sequences")
    s.add_argument("--scaler", help="default: fit on the training sequences")
    s.add_argument("--variant", choices=("dense", "lstm"), default="dense")
    s.add_argument("--lr", type=float, default=1e-3)
    s.add_argument("--epochs", type=int, default=200)
    s.add_argument("--batch", type=int, default=32)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--hidden-dim", type=int, default=17)
    s.add_argument("--no-mask-loss", action="store_true")
    s.add_argument("--train-fraction", type=float, default=0.8)
    s.add_argument("--split-seed", type=int, default=42)
    s.add_argument("--out", required=True)
    s.add_argument("--history")

    s = sub.add_parser("extract", help="score and select features")
    s.add_argument("--model", required=True)
    s.add_argument("--sequences", required=True)
    s.add_argument("--scaler", required=True)
    s.add_argument("--method", choices=("both",) + extraction.METHODS, default="both")
    s.add_argument("--k", default="10")
    s.add_argument("--out", required=True)

    s = sub.add_parser("report", help="re-select features from a scores.csv")
    s.add_argument("--scores", required=True)
    s.add_argument("--k", default="10")
    s.add_argument("--out", required=True)

    s = sub.add_parser("pipeline", help="run every stage from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--workspace")
    for f in fields(PipelineConfig):
        if f.name in ("base", "workspace"):
            continue
        s.add_argument("--" + f.name.replace("_", "-"), dest=f.name, default=None)

    s = sub.add_parser("make-fixture", help="write the synthetic snapshot fixture")
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int, default=7)
    return p


_current_stage = "cli"


def _dispatch(args) -> None:
    global _current_stage
    cmd = args.command
    _current_stage = cmd
    if cmd == "ingest":
        stage_ingest(args.input, args.out, args.whitelist, args.require_interesting,
                     args.country, args.interesting_field, args.threads)
        write_manifest(Path(args.out).with_suffix(".manifest.json"), cmd,
                       {"input": args.input, "whitelist": args.whitelist,
                        "require_interesting": args.require_interesting,
                        "country": args.country, "interesting_field": args.interesting_field},
                       {}, {Path(args.out).name: args.out})
    elif cmd == "preprocess":
        stage_preprocess(args.dataset, args.out, args.seed, args.min_present, args.scaler)
        arts = {Path(args.out).name: args.out}
        if args.scaler:
            arts[Path(args.scaler).name] = args.scaler
        write_manifest(Path(args.out).with_suffix(".manifest.json"), cmd,
                       {"dataset": args.dataset, "min_present": args.min_present},
                       {"sampling": args.seed}, arts)
    elif cmd == "split":
        stage_split(args.sequences, args.train_out, args.val_out, args.train_fraction,
                    args.seed, args.group_by_aircraft, args.scaler)
        arts = {Path(args.train_out).name: args.train_out, Path(args.val_out).name: args.val_out}
        if args.scaler:
            arts[Path(args.scaler).name] = args.scaler
        write_manifest(Path(args.train_out).with_suffix(".manifest.json"), cmd,
                       {"sequences": args.sequences, "train_fraction": args.train_fraction,
                        "group_by_aircraft": args.group_by_aircraft}, {"split": args.seed}, arts)
    elif cmd == "train":
        try:
            tconf = TrainConfig(args.variant, args.lr, args.epochs, args.batch, args.seed,
                                not args.no_mask_loss, args.hidden_dim)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        stage_train(args.sequences, args.out, args.history, args.validation, args.scaler,
                    tconf, args.train_fraction, args.split_seed)
        arts = {Path(args.out).name: args.out}
        if args.history:
            arts[Path(args.history).name] = args.history
        write_manifest(Path(args.out).with_suffix(".manifest.json"), cmd,
                       {k: v for k, v in asdict(tconf).items() if k != "seed"},
                       {"train": args.seed, "split": args.split_seed}, arts)
    elif cmd in ("extract", "report"):
        if cmd == "extract":
            stage_extract(args.model, args.sequences, args.scaler, args.out, args.method, args.k)
            conf = {"method": args.method, "k": args.k}
        else:
            stage_report(args.scores, args.out, args.k)
            conf = {"k": args.k}
        out = Path(args.out)
        arts = {p.name: p for p in sorted(out.iterdir()) if p.suffix in (".csv", ".txt")}
        write_manifest(out / "manifest.json", cmd, conf, {}, arts)
    elif cmd == "pipeline":
        cfg = PipelineConfig.from_file(_require_file(args.config))
        cfg.update({f.name: getattr(args, f.name, None) for f in fields(cfg)
                    if f.name not in ("base", "workspace")})
        run_pipeline(cfg, args.workspace)
    elif cmd == "make-fixture":
        from .synthetic import write_fixture
        write_fixture(args.out, args.seed)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error [cli]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _dispatch(args)
    except UsageError as exc:
        print(f"error [{_current_stage}]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AdsbError, ValueError) as exc:
        print(f"error [{_current_stage}]: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error [{_current_stage}]: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
