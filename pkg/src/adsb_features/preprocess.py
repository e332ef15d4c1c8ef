"""Hourly windows, 5-minute random sampling, scaling and average vectors.

One training example is an :class:`HourSequence`: the hour is cut into
``r`` equal buckets (12 x 5 minutes by default), one event is drawn at
random from each non-empty bucket, and the drawn events' 17-value feature
vectors are concatenated. Empty buckets are zero padded and flagged in the
mask.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import FEATURES, N_FEATURES, AircraftEvent, event_to_vector
from .errors import DegenerateRange, EmptyDataset, EmptyInput, FormatError
from .ingest import AircraftTrack

HOUR_MS = 3_600_000
SAMPLES_PER_HOUR = 12
SEQ_LEN = N_FEATURES * SAMPLES_PER_HOUR  # 204
STD_FLOOR = 1e-8

SEQUENCES_FORMAT = "adsb-sequences"
SCALER_FORMAT = "adsb-scaler"
FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class HourSequence:
    """One hour of one aircraft, flattened block by block.

    ``values[b*17:(b+1)*17]`` is the feature vector drawn from bucket ``b``;
    ``mask`` is True where that block holds real data.
    """

    reg: str
    hour_start: int
    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        mask = np.asarray(self.mask, dtype=bool).reshape(-1)
        if values.shape != mask.shape or values.size % N_FEATURES:
            raise ValueError(f"values/mask shape mismatch: {values.shape} vs {mask.shape}")
        blocks = mask.reshape(-1, N_FEATURES)
        if not np.all(blocks.all(axis=1) | ~blocks.any(axis=1)):
            raise ValueError("mask is not block-structured")
        if np.any(values[~mask] != 0.0):
            raise ValueError("masked positions must hold 0.0")
        values.flags.writeable = False
        mask.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)

    @property
    def block_mask(self) -> np.ndarray:
        return self.mask.reshape(-1, N_FEATURES)[:, 0]

    @property
    def samples_present(self) -> int:
        return int(self.block_mask.sum())

    def __eq__(self, other):
        if not isinstance(other, HourSequence):
            return NotImplemented
        return (self.reg == other.reg and self.hour_start == other.hour_start
                and np.array_equal(self.values, other.values)
                and np.array_equal(self.mask, other.mask))


@dataclass(frozen=True, eq=False)
class ScalerStats:
    """Per-feature standardization stats plus the post-standardization range.

    Arrays have one entry per feature in canonical order.
    """

    mean: np.ndarray
    std: np.ndarray
    post_min: np.ndarray
    post_max: np.ndarray
    fitted_on: int

    def scaled_mean(self) -> np.ndarray:
        """Each feature's training mean expressed in [0, 1] scaled space."""
        return _squash(np.zeros(N_FEATURES), self)


@dataclass(frozen=True, eq=False)
class AverageVector:
    reg: str
    values: np.ndarray
    n_sequences: int


def stack(seqs: Sequence[HourSequence]) -> tuple[np.ndarray, np.ndarray]:
    """Stack sequences into ``(values, mask)`` arrays of shape (N, 204)."""
    if not seqs:
        return np.zeros((0, SEQ_LEN)), np.zeros((0, SEQ_LEN), dtype=bool)
    return np.stack([s.values for s in seqs]), np.stack([s.mask for s in seqs])


def window_hours(track: AircraftTrack) -> list[tuple[int, list[AircraftEvent]]]:
    """Partition a track by UTC hour; empty hours are omitted."""
    windows: dict[int, list[AircraftEvent]] = {}
    for e in track.events:
        windows.setdefault(e.pos_time // HOUR_MS * HOUR_MS, []).append(e)
    return sorted(windows.items())


def _reg_entropy(reg: str) -> int:
    return int.from_bytes(hashlib.sha256(reg.encode("utf-8")).digest()[:8], "little")


def bucket_rng(rng_seed: int, reg: str, hour_start: int, bucket: int) -> np.random.Generator:
    """Generator owned by one (seed, aircraft, hour, bucket) cell."""
    ss = np.random.SeedSequence([rng_seed & (2**64 - 1), _reg_entropy(reg), hour_start, bucket])
    return np.random.default_rng(ss)


def sample_window(events: Sequence[AircraftEvent], hour_start: int, r: int = SAMPLES_PER_HOUR,
                  rng_seed: int = 0, reg: Optional[str] = None
                  ) -> list[Optional[AircraftEvent]]:
    """Draw one event uniformly from each of the ``r`` buckets of an hour.

    Returns a list of length ``r``; entry ``b`` is ``None`` when bucket ``b``
    has no events. ``reg`` defaults to the registration of the events.
    """
    if reg is None:
        reg = events[0].reg if events else ""
    buckets: list[list[AircraftEvent]] = [[] for _ in range(r)]
    for e in events:
        offset = e.pos_time - hour_start
        if not 0 <= offset < HOUR_MS:
            raise ValueError(f"event at {e.pos_time} outside hour {hour_start}")
        buckets[offset * r // HOUR_MS].append(e)
    out: list[Optional[AircraftEvent]] = []
    for b, members in enumerate(buckets):
        if members:
            pick = bucket_rng(rng_seed, reg, hour_start, b).integers(len(members))
            out.append(members[pick])
        else:
            out.append(None)
    return out


def assemble_sequence(samples: Sequence[Optional[AircraftEvent]], hour_start: int,
                      reg: Optional[str] = None) -> HourSequence:
    r = len(samples)
    values = np.zeros((r, N_FEATURES))
    mask = np.zeros((r, N_FEATURES), dtype=bool)
    for b, e in enumerate(samples):
        if e is not None:
            values[b] = event_to_vector(e)
            mask[b] = True
    if reg is None:
        reg = next((e.reg for e in samples if e is not None), "")
    return HourSequence(reg, hour_start, values.reshape(-1), mask.reshape(-1))


def usability_filter(seq: HourSequence, min_present: int = 6) -> bool:
    return seq.samples_present >= min_present


def build_sequences(tracks: Sequence[AircraftTrack], rng_seed: int, min_present: int = 6,
                    r: int = SAMPLES_PER_HOUR) -> list[HourSequence]:
    """Window, sample, assemble and filter every track.

    Output order is (track order, hour order), so it is reproducible.
    """
    out = []
    for track in tracks:
        for hour_start, events in window_hours(track):
            samples = sample_window(events, hour_start, r, rng_seed, track.reg)
            seq = assemble_sequence(samples, hour_start, track.reg)
            if usability_filter(seq, min_present):
                out.append(seq)
    return out


def _blocks(seqs: Sequence[HourSequence]) -> np.ndarray:
    """All unmasked 17-blocks as an (n_blocks, 17) array."""
    rows = [s.values.reshape(-1, N_FEATURES)[s.block_mask] for s in seqs]
    return np.concatenate(rows) if rows else np.zeros((0, N_FEATURES))


def fit_scaler(seqs: Sequence[HourSequence]) -> ScalerStats:
    """Fit per-feature mean/std on unmasked blocks; population std.

    Sums are exactly rounded (``math.fsum``) so the result does not depend
    on sequence order.

    Raises:
        EmptyDataset: no sequence has any unmasked block.
    """
    data = _blocks(seqs)
    n = data.shape[0]
    if n == 0:
        raise EmptyDataset("no unmasked data to fit the scaler on")
    mean = np.array([math.fsum(col) / n for col in data.T])
    var = np.array([math.fsum((col - m) ** 2) / n for col, m in zip(data.T, mean)])
    std = np.sqrt(var)
    std[std < STD_FLOOR] = 1.0
    z = (data - mean) / std
    return ScalerStats(mean=mean, std=std, post_min=z.min(axis=0), post_max=z.max(axis=0),
                       fitted_on=n)


def _squash(z: np.ndarray, s: ScalerStats) -> np.ndarray:
    span = s.post_max - s.post_min
    degenerate = span == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        u = (z - s.post_min) / np.where(degenerate, 1.0, span)
    u = np.clip(u, 0.0, 1.0)
    return np.where(degenerate, 0.5, u)


def scale_values(values: np.ndarray, mask: np.ndarray, s: ScalerStats) -> np.ndarray:
    """Vectorized :func:`apply_scaler` over arrays whose last axis is 204-ish."""
    shape = values.shape
    blocks = values.reshape(-1, N_FEATURES)
    u = _squash((blocks - s.mean) / s.std, s).reshape(shape)
    return np.where(mask, u, 0.0)


def apply_scaler(seq: HourSequence, s: ScalerStats) -> HourSequence:
    return replace(seq, values=scale_values(seq.values, seq.mask, s))


def invert_scaler(u: float, s: ScalerStats, feature: int) -> float:
    """Map a scaled value back to raw units for one feature.

    Raises:
        DegenerateRange: the feature was constant in training.
    """
    span = s.post_max[feature] - s.post_min[feature]
    if span == 0:
        raise DegenerateRange(f"feature {FEATURES[feature]} has a degenerate range")
    z = u * span + s.post_min[feature]
    return float(z * s.std[feature] + s.mean[feature])


def mean_location(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Component-wise arithmetic mean of (lat, long) in degrees.

    No antimeridian handling: (0, 179) and (0, -179) average to (0, 0).
    """
    if not points:
        raise EmptyInput("no points")
    lats, longs = zip(*points)
    return math.fsum(lats) / len(lats), math.fsum(longs) / len(longs)


def _fsum_columns(a: np.ndarray) -> np.ndarray:
    return np.array([math.fsum(col) for col in a.T])


def compute_average_vector(seqs: Sequence[HourSequence]) -> AverageVector:
    """Position-wise mean over the positions each sequence actually observed."""
    if not seqs:
        raise EmptyInput("no sequences")
    values, mask = stack(seqs)
    counts = mask.sum(axis=0)
    totals = _fsum_columns(np.where(mask, values, 0.0))
    avg = np.divide(totals, counts, out=np.zeros(values.shape[1]), where=counts > 0)
    return AverageVector(seqs[0].reg, avg, len(seqs))


def pattern_variance(seqs: Sequence[HourSequence], template: AverageVector) -> float:
    """Mean over sequences of the masked mean squared deviation from ``template``.

    Sequences without any real data are skipped.
    """
    if not seqs:
        raise EmptyInput("no sequences")
    per_seq = []
    for s in seqs:
        if s.mask.any():
            d = (s.values - template.values)[s.mask]
            per_seq.append(math.fsum(d * d) / d.size)
    return math.fsum(per_seq) / len(per_seq) if per_seq else 0.0


def split_dataset(seqs: Sequence, train_fraction: float = 0.8, seed: int = 0,
                  group_by_aircraft: bool = False) -> tuple[list, list]:
    """Shuffle and split into (train, validation).

    The training set gets ``round(train_fraction * N)`` items, rounding half
    up. With ``group_by_aircraft`` whole aircraft are assigned to one side,
    adding aircraft to the training side in shuffled order until it reaches
    the target size (so the 80/20 ratio is only approximate).
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = len(seqs)
    n_train = int(math.floor(train_fraction * n + 0.5))
    rng = np.random.default_rng(seed)
    if not group_by_aircraft:
        order = rng.permutation(n)
        return [seqs[i] for i in order[:n_train]], [seqs[i] for i in order[n_train:]]

    regs = sorted({s.reg for s in seqs})
    train_regs: set[str] = set()
    count = 0
    by_reg = {r: sum(1 for s in seqs if s.reg == r) for r in regs}
    for i in rng.permutation(len(regs)):
        if count >= n_train:
            break
        train_regs.add(regs[i])
        count += by_reg[regs[i]]
    order = rng.permutation(n)
    train = [seqs[i] for i in order if seqs[i].reg in train_regs]
    val = [seqs[i] for i in order if seqs[i].reg not in train_regs]
    return train, val


def save_sequences(seqs: Sequence[HourSequence], path) -> None:
    """One JSON object per line after a header line.

    Each row stores ``reg``, ``hour_start``, the 12-character block mask as
    a 0/1 string, and all values (zeros included) as exact float reprs.
    """
    header = {"format": SEQUENCES_FORMAT, "version": FORMAT_VERSION,
              "features": list(FEATURES), "samples_per_hour": SAMPLES_PER_HOUR}
    lines = [json.dumps(header)]
    for s in seqs:
        lines.append(json.dumps({
            "reg": s.reg, "hour_start": s.hour_start,
            "mask": "".join("1" if b else "0" for b in s.block_mask),
            "values": s.values.tolist()}))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _check_header(path, header, fmt):
    if not isinstance(header, dict) or header.get("format") != fmt:
        raise FormatError(f"{path}: not an {fmt} file")
    if header.get("version") != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported version {header.get('version')}")
    if header.get("features") != list(FEATURES):
        raise FormatError(f"{path}: unexpected feature order")


def load_sequences(path) -> list[HourSequence]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    try:
        header = json.loads(lines[0]) if lines else None
        _check_header(path, header, SEQUENCES_FORMAT)
        r = header["samples_per_hour"]
        out = []
        for line in lines[1:]:
            row = json.loads(line)
            blocks = np.array([c == "1" for c in row["mask"]])
            if len(row["values"]) != r * N_FEATURES or blocks.size != r:
                raise FormatError(f"{path}: row has wrong dimensions")
            out.append(HourSequence(row["reg"], row["hour_start"], row["values"],
                                    np.repeat(blocks, N_FEATURES)))
        return out
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{path}: {exc}") from None


def save_scaler(s: ScalerStats, path) -> None:
    """Text file: header line, then one CSV row per feature."""
    lines = [json.dumps({"format": SCALER_FORMAT, "version": FORMAT_VERSION,
                         "features": list(FEATURES), "fitted_on": s.fitted_on}),
             "feature,mean,std,post_min,post_max"]
    for i, name in enumerate(FEATURES):
        lines.append(",".join([name] + [repr(float(a[i])) for a in
                                        (s.mean, s.std, s.post_min, s.post_max)]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_scaler(path) -> ScalerStats:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    try:
        header = json.loads(lines[0]) if lines else None
        _check_header(path, header, SCALER_FORMAT)
        rows = [line.split(",") for line in lines[2:]]
        if len(rows) != N_FEATURES or any(len(r) != 5 for r in rows):
            raise FormatError(f"{path}: expected {N_FEATURES} rows of 5 columns")
        if [r[0] for r in rows] != list(FEATURES):
            raise FormatError(f"{path}: unexpected feature order")
        cols = np.array([[float(x) for x in r[1:]] for r in rows]).T
    except (json.JSONDecodeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{path}: {exc}") from None
    return ScalerStats(mean=cols[0], std=cols[1], post_min=cols[2], post_max=cols[3],
                       fitted_on=int(header["fitted_on"]))
