"""Snapshot loading, aircraft filtering, track assembly and persistence."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .core import (DEFAULT_INTERESTING_FIELD, FEATURE_ATTRS, FEATURES,
                   AircraftEvent, normalize_angles, parse_event)
from .errors import AdsbError, FormatError, ParseError

logger = logging.getLogger(__name__)

TRACKS_FORMAT = "adsb-tracks"
TRACKS_VERSION = 1
_META = ("reg", "icao", "country", "interesting")

# Keys that may hold the aircraft array at the top level of a snapshot.
AIRCRAFT_KEYS = ("acList", "aircraft")


@dataclass(frozen=True)
class FilterConfig:
    """Which aircraft to keep.

    An aircraft passes when its country matches and it is either on the
    registration whitelist or (when ``require_interesting`` is set) carries
    the interesting flag.
    """

    registration_whitelist: frozenset[str] = frozenset()
    require_interesting: bool = False
    country: str = "United States"

    def __post_init__(self):
        object.__setattr__(self, "registration_whitelist",
                           frozenset(self.registration_whitelist))
        if not self.registration_whitelist and not self.require_interesting:
            raise ValueError(
                "FilterConfig needs a non-empty whitelist or require_interesting")


@dataclass(frozen=True)
class AircraftTrack:
    reg: str
    events: tuple[AircraftEvent, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        times = [e.pos_time for e in self.events]
        if any(t is None for t in times) or any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError(f"track {self.reg!r}: pos_time not strictly increasing")
        if any(e.reg != self.reg for e in self.events):
            raise ValueError(f"track {self.reg!r}: mixed registrations")


def load_snapshot(path, interesting_field: str = DEFAULT_INTERESTING_FIELD
                  ) -> tuple[list[AircraftEvent], list[str]]:
    """Read one snapshot file.

    Returns:
        ``(events, warnings)``. Records that fail to parse or to pass the
        range check are skipped and described in ``warnings``.

    Raises:
        OSError: the file cannot be read.
        ParseError: the file is not JSON or has no aircraft array.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed snapshot: {exc}") from None
    records = None
    if isinstance(doc, dict):
        for key in AIRCRAFT_KEYS:
            if isinstance(doc.get(key), list):
                records = doc[key]
                break
    if records is None:
        raise ParseError(f"{path}: no aircraft array (expected one of {AIRCRAFT_KEYS})")

    events, warnings = [], []
    for i, record in enumerate(records):
        try:
            events.append(normalize_angles(parse_event(record, interesting_field)))
        except AdsbError as exc:
            warnings.append(f"{path.name}[{i}]: {exc}")
    for w in warnings:
        logger.warning(w)
    return events, warnings


def load_snapshots(paths: Sequence, interesting_field: str = DEFAULT_INTERESTING_FIELD,
                   threads: int = 1) -> tuple[list[AircraftEvent], list[str]]:
    """Load several snapshot files; results are concatenated in ``paths`` order."""
    def one(p):
        return load_snapshot(p, interesting_field)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, paths))
    else:
        results = [one(p) for p in paths]
    events, warnings = [], []
    for ev, w in results:
        events.extend(ev)
        warnings.extend(w)
    return events, warnings


def passes_filter(e: AircraftEvent, f: FilterConfig) -> bool:
    if e.country != f.country:
        return False
    return e.reg in f.registration_whitelist or (f.require_interesting and e.interesting)


def build_tracks(events: Iterable[AircraftEvent]) -> list[AircraftTrack]:
    """Group events by registration into time-ordered tracks.

    Events without a positive ``pos_time`` cannot be placed in time and are
    dropped. For duplicate ``(reg, pos_time)`` pairs the first one seen is
    kept. Tracks are returned sorted by registration.
    """
    grouped: dict[str, dict[int, AircraftEvent]] = {}
    for e in events:
        if e.pos_time is None or e.pos_time <= 0:
            continue
        grouped.setdefault(e.reg, {}).setdefault(e.pos_time, e)
    return [AircraftTrack(reg, tuple(by_time[t] for t in sorted(by_time)))
            for reg, by_time in sorted(grouped.items())]


def read_whitelist(path) -> frozenset[str]:
    """One registration per line; blank lines and ``#`` comments ignored."""
    regs = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            regs.add(line)
    return frozenset(regs)


def persist_tracks(tracks: Sequence[AircraftTrack], path) -> None:
    """Write tracks as line-delimited JSON.

    Line 1 is a header naming the format, version and column order. Each
    following line is one event: ``[reg, icao, country, interesting,
    <17 features>]`` with ``null`` for a missing feature.
    """
    header = {"format": TRACKS_FORMAT, "version": TRACKS_VERSION,
              "columns": list(_META) + list(FEATURES)}
    lines = [json.dumps(header)]
    for track in tracks:
        for e in track.events:
            row = [getattr(e, a) for a in _META] + [getattr(e, a) for a in FEATURE_ATTRS]
            lines.append(json.dumps(row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_tracks(path) -> list[AircraftTrack]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise FormatError(f"{path}: empty file, missing header")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError:
        raise FormatError(f"{path}: bad header line") from None
    if not isinstance(header, dict) or header.get("format") != TRACKS_FORMAT:
        raise FormatError(f"{path}: not an {TRACKS_FORMAT} file")
    if header.get("version") != TRACKS_VERSION:
        raise FormatError(f"{path}: unsupported version {header.get('version')}")
    if header.get("columns") != list(_META) + list(FEATURES):
        raise FormatError(f"{path}: unexpected column order")

    ncol = len(_META) + len(FEATURES)
    tracks: list[AircraftTrack] = []
    current: list[AircraftEvent] = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            row = json.loads(line)
        except json.JSONDecodeError:
            raise FormatError(f"{path}:{lineno}: malformed row") from None
        if not isinstance(row, list) or len(row) != ncol:
            raise FormatError(f"{path}:{lineno}: expected {ncol} columns")
        e = AircraftEvent(**dict(zip(_META + FEATURE_ATTRS, row)))
        if current and current[-1].reg != e.reg:
            tracks.append(AircraftTrack(current[0].reg, current))
            current = []
        current.append(e)
    if current:
        tracks.append(AircraftTrack(current[0].reg, current))
    return tracks
