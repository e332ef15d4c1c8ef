"""Synthetic data: test sets with known structure and a snapshot fixture.

The real ADS-B Exchange archive cannot be redistributed, so the bundled
fixture under ``data/fixture`` is produced by :func:`write_fixture` and the
full pipeline can run without external data.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .core import FEATURE_INDEX, N_FEATURES
from .preprocess import HOUR_MS, SAMPLES_PER_HOUR, SEQ_LEN, HourSequence

STRUCTURED = ("Lat", "Long", "Spd", "Trak")
FIXTURE_START_MS = 1_504_224_000_000  # 2017-09-01T00:00:00Z


def subspace_sequences(n: int = 200, dim: int = 5, noise: float = 0.01,
                       seed: int = 0) -> list[HourSequence]:
    """Fully observed sequences near a ``dim``-dimensional affine subspace.

    Points are ``c + A z`` with ``c ~ U(0.3, 0.7)``, ``z ~ U(-1, 1)`` and
    rows of ``A`` scaled so each coordinate moves by at most 0.25, plus
    Gaussian noise of standard deviation ``noise``, clipped to [0, 1].
    """
    rng = np.random.default_rng(seed)
    offset = rng.uniform(0.3, 0.7, SEQ_LEN)
    basis = rng.normal(size=(SEQ_LEN, dim))
    basis *= 0.25 / np.abs(basis).sum(axis=1, keepdims=True)
    z = rng.uniform(-1.0, 1.0, size=(n, dim))
    x = np.clip(offset + z @ basis.T + rng.normal(0.0, noise, (n, SEQ_LEN)), 0.0, 1.0)
    mask = np.ones(SEQ_LEN, dtype=bool)
    return [HourSequence("SUBSPACE", i * HOUR_MS, row, mask) for i, row in enumerate(x)]


def structured_sequences(n: int = 600, seed: int = 0, structured=STRUCTURED,
                         noise_scale: float = 1.0) -> list[HourSequence]:
    """Raw sequences where only ``structured`` features share latent factors.

    Each sequence draws two latent factors uniformly from [-1, 1]. Every
    structured feature is a fixed linear mix of them (the same at every
    time step, up to 2 % jitter), so those features are correlated with
    each other and across time. Every other feature is independent standard
    normal noise times ``noise_scale`` at each position.
    """
    rng = np.random.default_rng(seed)
    idx = [FEATURE_INDEX[name] for name in structured]
    mixing = rng.normal(size=(len(idx), 2))
    values = rng.normal(0.0, noise_scale, size=(n, SAMPLES_PER_HOUR, N_FEATURES))
    latent = rng.uniform(-1.0, 1.0, size=(n, 2))
    signal = latent @ mixing.T  # (n, len(idx))
    jitter = rng.normal(0.0, 0.02, size=(n, SAMPLES_PER_HOUR, len(idx)))
    values[:, :, idx] = signal[:, None, :] + jitter
    mask = np.ones(SEQ_LEN, dtype=bool)
    return [HourSequence("STRUCT", i * HOUR_MS, v.reshape(-1), mask)
            for i, v in enumerate(values)]


# reg, icao, country, interesting, orbit radius (deg), speed (kt), flights
_FIXTURE_AIRCRAFT = (
    ("N101SV", "A00001", "United States", False, 0.05, 110.0),
    ("N202SV", "A00002", "United States", False, 0.08, 95.0),
    ("N303SV", "A00003", "United States", True, 0.04, 130.0),
    ("N404PD", "A00004", "United States", True, 0.06, 105.0),
    ("N505MD", "A00005", "United States", True, 0.10, 140.0),
    ("N606AL", "A00006", "United States", False, 0.0, 450.0),
    ("N707AL", "A00007", "United States", False, 0.0, 420.0),
    ("C-FABC", "C00008", "Canada", True, 0.05, 115.0),
)
FIXTURE_WHITELIST = ("N101SV", "N202SV", "N303SV", "C-FABC")


def _fixture_records(rng, spec, start_ms, hours, step_s):
    reg, icao, country, interesting, radius, speed = spec
    lat0 = 40.0 + rng.uniform(-2, 2)
    lon0 = -74.0 + rng.uniform(-2, 2)
    alt = int(rng.integers(20, 90)) * 100
    heading = rng.uniform(0, 360)
    records = []
    lat, lon = lat0, lon0
    for k in range(int(hours * 3600 / step_s)):
        t = start_ms + k * step_s * 1000 + int(rng.integers(0, 1000))
        if radius > 0:
            # orbiting pattern
            phase = 2 * math.pi * k * step_s / 900.0
            lat = lat0 + radius * math.sin(phase)
            lon = lon0 + radius * math.cos(phase) / math.cos(math.radians(lat0))
            trak = (math.degrees(phase) + 90.0) % 360.0
        else:
            d = speed * step_s / 3600.0 / 60.0
            lat += d * math.cos(math.radians(heading))
            lon += d * math.sin(math.radians(heading)) / math.cos(math.radians(lat))
            trak = heading
        cur_alt = alt + int(rng.integers(-3, 4)) * 25
        rec = {
            "Reg": reg, "Icao": icao, "Cou": country, "Interested": interesting,
            "Tsec": k * step_s, "Cmsgs": k * step_s * 2 + int(rng.integers(0, 5)),
            "Alt": cur_alt, "Galt": cur_alt + 120, "InHG": round(29.92 + rng.normal(0, 0.05), 2),
            "Lat": round(lat, 5), "Long": round(lon, 5), "PosTime": t,
            "Spd": round(speed + rng.normal(0, 3), 1), "SpdTyp": 0,
            "Trak": round(trak + rng.normal(0, 1.0), 1), "TrkH": False,
            "Vsi": int(rng.integers(-4, 5)) * 64, "Gnd": False, "Trt": 5 if radius else 3,
            "Talt": float(alt), "Ttrk": round(trak, 1),
            "Mdl": "Cessna 182", "Op": "synthetic",
        }
        if rng.random() < 0.05:
            del rec["Talt"]
        if rng.random() < 0.05:
            del rec["Ttrk"]
        records.append(rec)
    return records


def write_fixture(outdir, seed: int = 7, days: int = 2, step_s: int = 60) -> list[Path]:
    """Write a small deterministic snapshot archive plus a whitelist.

    Each aircraft flies two 3-5 hour sorties per day starting at a random
    minute. Snapshots are grouped into one file per hour of wall-clock time.
    One deliberately corrupt record is included to exercise the skip path.
    Returns the written snapshot paths.
    """
    rng = np.random.default_rng(seed)
    out = Path(outdir)
    snapdir = out / "snapshots"
    snapdir.mkdir(parents=True, exist_ok=True)
    by_hour: dict[int, list[dict]] = {}
    for spec in _FIXTURE_AIRCRAFT:
        for day in range(days):
            for sortie_start_h in (2, 12):
                start = (FIXTURE_START_MS + day * 24 * HOUR_MS + sortie_start_h * HOUR_MS
                         + int(rng.integers(0, 60)) * 60_000)
                hours = float(rng.integers(3, 6))
                for rec in _fixture_records(rng, spec, start, hours, step_s):
                    by_hour.setdefault(rec["PosTime"] // HOUR_MS, []).append(rec)
    first = min(by_hour)
    by_hour[first].append({"Reg": "N999XX", "Icao": "A00999", "Cou": "United States",
                           "Interested": True, "Lat": "abc", "PosTime": first * HOUR_MS})
    paths = []
    for hour in sorted(by_hour):
        path = snapdir / f"{hour * HOUR_MS}.json"
        doc = {"src": 1, "acList": by_hour[hour]}
        path.write_text(json.dumps(doc, separators=(",", ":")) + "\n", encoding="utf-8")
        paths.append(path)
    (out / "whitelist.txt").write_text(
        "# Placeholder registrations; the real surveillance-aircraft list is not public.\n"
        + "\n".join(FIXTURE_WHITELIST) + "\n", encoding="utf-8")
    return paths
