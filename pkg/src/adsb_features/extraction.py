"""Rank the 17 input features by how much the trained encoder relies on them.

Two probes are provided:

* ``weight_norm`` sums the absolute encoder weights attached to a feature
  over all 12 time positions and all code units (dense variant only).
* ``ablation`` overwrites a feature's observed positions with its training
  mean and measures how much the reconstruction error against the original
  input grows.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .autoencoder.dense import DenseParams
from .autoencoder.losses import loss_weights
from .autoencoder.training import Params, reconstruct
from .core import FEATURES, N_FEATURES
from .errors import BadK, EmptyDataset, VariantMismatch
from .preprocess import HourSequence, ScalerStats, stack

METHODS = ("weight_norm", "ablation")

# Features reported as learned for known surveillance aircraft.
REFERENCE_FEATURES = ("Alt", "Lat", "Long", "PosTime", "Spd", "Trak", "Gnd", "Trt",
                      "Talt", "Ttrk")


@dataclass(frozen=True, eq=False)
class FeatureScores:
    method: str
    scores: np.ndarray  # (17,), canonical order, higher = more important

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=float)
        if scores.shape != (N_FEATURES,) or not np.all(np.isfinite(scores)):
            raise ValueError(f"scores must be {N_FEATURES} finite values")
        object.__setattr__(self, "scores", scores)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(FEATURES, self.scores.tolist()))


@dataclass(frozen=True)
class Comparison:
    overlap: int
    agreements: tuple[str, ...]
    false_inclusions: tuple[str, ...]
    misses: tuple[str, ...]


@dataclass(frozen=True)
class FeatureReport:
    scores: dict[str, FeatureScores]
    selected: tuple[str, ...]
    k: int
    comparison: Comparison
    per_method_selected: dict[str, tuple[str, ...]] = field(default_factory=dict)

    @property
    def overlap_with_reference(self) -> int:
        return self.comparison.overlap


def score_by_weight_norm(params: Params) -> FeatureScores:
    if not isinstance(params, DenseParams):
        raise VariantMismatch("weight-norm scoring needs dense parameters")
    w = np.abs(params.w_enc)
    scores = w.reshape(w.shape[0], -1, N_FEATURES).sum(axis=(0, 1))
    return FeatureScores("weight_norm", scores)


def _loss_against(inputs, targets, mask, params, mask_loss):
    w = loss_weights(mask, mask_loss)
    recon = reconstruct(inputs, mask, params)
    return float((w * (recon - targets) ** 2).sum())


def score_by_ablation(params: Params, sequences: Sequence[HourSequence] | tuple,
                      scaler: ScalerStats, mask_loss: bool = True) -> FeatureScores:
    """Mean-ablation importance on already scaled validation sequences.

    ``sequences`` is a list of scaled :class:`HourSequence` or an
    ``(values, mask)`` pair of (N, 204) arrays. Only observed positions are
    overwritten, so a feature that is never observed scores exactly 0.

    Raises:
        EmptyDataset: no validation sequences.
    """
    if isinstance(sequences, tuple):
        values, mask = sequences
    else:
        values, mask = stack(list(sequences))
    values = np.asarray(values, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if values.shape[0] == 0:
        raise EmptyDataset("no validation sequences")
    fill = scaler.scaled_mean()
    baseline = _loss_against(values, values, mask, params, mask_loss)
    scores = np.zeros(N_FEATURES)
    for i in range(N_FEATURES):
        cols = np.zeros(values.shape[1], dtype=bool)
        cols[i::N_FEATURES] = True
        ablated = np.where(mask & cols, fill[i], values)
        scores[i] = _loss_against(ablated, values, mask, params, mask_loss) - baseline
    return FeatureScores("ablation", scores)


def ranking(scores: FeatureScores) -> list[int]:
    """Feature indices by descending score; ties go to the lower index."""
    return sorted(range(N_FEATURES), key=lambda i: (-scores.scores[i], i))


def largest_gap_k(scores: FeatureScores) -> int:
    """Cut the ranking at the largest drop between consecutive scores."""
    ordered = scores.scores[ranking(scores)]
    drops = ordered[:-1] - ordered[1:]
    return int(np.argmax(drops)) + 1


def select_features(scores: FeatureScores, k: Union[int, str] = 10) -> list[str]:
    """Top-``k`` feature names. ``k="auto"`` uses :func:`largest_gap_k`."""
    if k == "auto":
        k = largest_gap_k(scores)
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 1 <= k <= N_FEATURES:
        raise BadK(f"k must be in [1, {N_FEATURES}] or 'auto', got {k!r}")
    return [FEATURES[i] for i in ranking(scores)[:k]]


def combine_scores(all_scores: Sequence[FeatureScores]) -> FeatureScores:
    """Merge probes by mean rank (Borda count); score = 17 - mean rank."""
    ranks = np.zeros(N_FEATURES)
    for s in all_scores:
        for pos, i in enumerate(ranking(s)):
            ranks[i] += pos
    return FeatureScores("mean_rank", N_FEATURES - ranks / len(all_scores))


def compare_to_reference(selected: Sequence[str],
                         reference: Sequence[str] = REFERENCE_FEATURES) -> Comparison:
    ref = set(reference)
    chosen = list(selected)
    return Comparison(
        overlap=sum(1 for name in chosen if name in ref),
        agreements=tuple(n for n in chosen if n in ref),
        false_inclusions=tuple(n for n in chosen if n not in ref),
        misses=tuple(n for n in reference if n not in set(chosen)),
    )


def build_report(all_scores: Sequence[FeatureScores], k: Union[int, str] = 10) -> FeatureReport:
    """Select features from one probe, or from the mean rank of several."""
    all_scores = list(all_scores)
    if not all_scores:
        raise ValueError("need at least one FeatureScores")
    basis = all_scores[0] if len(all_scores) == 1 else combine_scores(all_scores)
    selected = tuple(select_features(basis, k))
    per_method = {s.method: tuple(select_features(s, len(selected))) for s in all_scores}
    return FeatureReport(scores={s.method: s for s in all_scores}, selected=selected,
                         k=len(selected), comparison=compare_to_reference(selected),
                         per_method_selected=per_method)


def scores_csv(report: FeatureReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["feature", "method", "score"])
    for method, s in report.scores.items():
        for name, value in zip(FEATURES, s.scores.tolist()):
            writer.writerow([name, method, repr(value)])
    return buf.getvalue()


def read_scores_csv(path) -> list[FeatureScores]:
    """Inverse of the ``scores.csv`` writer; methods keep file order."""
    by_method: dict[str, dict[str, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            by_method.setdefault(row["method"], {})[row["feature"]] = float(row["score"])
    out = []
    for method, values in by_method.items():
        if set(values) != set(FEATURES):
            raise ValueError(f"{path}: method {method} does not score all features")
        out.append(FeatureScores(method, [values[n] for n in FEATURES]))
    return out


def _comparison_text(report: FeatureReport) -> str:
    c = report.comparison
    lines = [f"overlap {c.overlap}/{len(REFERENCE_FEATURES)}",
             "reference: " + " ".join(REFERENCE_FEATURES),
             "agreements: " + " ".join(c.agreements),
             "false_inclusions: " + " ".join(c.false_inclusions),
             "misses: " + " ".join(c.misses)]
    return "\n".join(lines) + "\n"


def _report_text(report: FeatureReport) -> str:
    lines = [f"Selected features (k={report.k}):"]
    lines += [f"  {rank:2d}. {name}" for rank, name in enumerate(report.selected, start=1)]
    for method, s in report.scores.items():
        lines.append("")
        lines.append(f"{method} scores (descending):")
        for i in ranking(s):
            lines.append(f"  {FEATURES[i]:<8s} {s.scores[i]: .6e}")
        lines.append(f"  top {report.k}: " + " ".join(report.per_method_selected[method]))
    lines.append("")
    lines.append(_comparison_text(report))
    return "\n".join(lines)


def emit_report(report: FeatureReport, path) -> None:
    """Write ``scores.csv``, ``selected.txt``, ``comparison.txt`` and
    ``report.txt`` into the existing directory ``path``.

    Raises:
        FileNotFoundError: ``path`` does not exist.
    """
    out = Path(path)
    if not out.is_dir():
        raise FileNotFoundError(f"report directory does not exist: {out}")
    (out / "scores.csv").write_text(scores_csv(report), encoding="utf-8")
    (out / "selected.txt").write_text("\n".join(report.selected) + "\n", encoding="utf-8")
    (out / "comparison.txt").write_text(_comparison_text(report), encoding="utf-8")
    (out / "report.txt").write_text(_report_text(report), encoding="utf-8")
