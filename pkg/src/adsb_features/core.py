"""ADS-B event records and the canonical 17-value feature encoding.

An :class:`AircraftEvent` holds one broadcast observation as published by
ADS-B Exchange. Numeric fields that were absent from the source record are
stored as ``None`` so that downstream code can tell "not reported" apart
from a genuine zero. Zero padding happens only when an event is turned into
a feature vector.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from typing import Any, Mapping, Optional

import numpy as np

from .errors import ParseError, RangeError

# Wire name -> (attribute, kind). Order is the frozen feature order.
_FIELD_SPEC = (
    ("Tsec", "tsec", int),
    ("Cmsgs", "cmsgs", int),
    ("Alt", "alt", int),
    ("Galt", "galt", int),
    ("InHG", "inhg", float),
    ("Lat", "lat", float),
    ("Long", "long", float),
    ("PosTime", "pos_time", int),
    ("Spd", "spd", float),
    ("SpdTyp", "spd_typ", int),
    ("Trak", "trak", float),
    ("TrkH", "trk_h", bool),
    ("Vsi", "vsi", int),
    ("Gnd", "gnd", bool),
    ("Trt", "trt", int),
    ("Talt", "talt", float),
    ("Ttrk", "ttrk", float),
)

FEATURES: tuple[str, ...] = tuple(name for name, _, _ in _FIELD_SPEC)
FEATURE_ATTRS: tuple[str, ...] = tuple(attr for _, attr, _ in _FIELD_SPEC)
N_FEATURES = len(FEATURES)
FEATURE_INDEX = {name: i for i, name in enumerate(FEATURES)}

DEFAULT_INTERESTING_FIELD = "Interested"


@dataclass(frozen=True)
class AircraftEvent:
    """One ADS-B observation of one aircraft.

    The first 17 attributes are the broadcast fields, in feature order. Any
    of them may be ``None`` (not reported). ``reg``, ``icao``, ``country``
    and ``interesting`` are identity metadata and never enter the feature
    vector.
    """

    tsec: Optional[int] = None
    cmsgs: Optional[int] = None
    alt: Optional[int] = None
    galt: Optional[int] = None
    inhg: Optional[float] = None
    lat: Optional[float] = None
    long: Optional[float] = None
    pos_time: Optional[int] = None
    spd: Optional[float] = None
    spd_typ: Optional[int] = None
    trak: Optional[float] = None
    trk_h: Optional[bool] = None
    vsi: Optional[int] = None
    gnd: Optional[bool] = None
    trt: Optional[int] = None
    talt: Optional[float] = None
    ttrk: Optional[float] = None
    reg: str = ""
    icao: str = ""
    country: str = ""
    interesting: bool = False

    def missing(self) -> list[str]:
        """Wire names of the broadcast fields that were not reported."""
        return [name for name, attr in zip(FEATURES, FEATURE_ATTRS)
                if getattr(self, attr) is None]


def _coerce(name, kind, value):
    # bool is an int subclass; keep the kinds strictly apart.
    if kind is bool:
        if isinstance(value, bool):
            return value
        if isinstance(value, int) and value in (0, 1):
            return bool(value)
    elif isinstance(value, bool):
        pass
    elif kind is int:
        if isinstance(value, int):
            return value
        if isinstance(value, float) and value.is_integer():
            return int(value)
    elif kind is float:
        if isinstance(value, (int, float)) and np.isfinite(value):
            return float(value)
    raise ParseError(
        f"field {name}: expected {kind.__name__}, got {value!r}", field=name)


def _meta_str(record, key):
    value = record.get(key)
    if value is None:
        return ""
    if not isinstance(value, str):
        raise ParseError(f"field {key}: expected str, got {value!r}", field=key)
    return value


def parse_event(raw: str | Mapping[str, Any],
                interesting_field: str = DEFAULT_INTERESTING_FIELD) -> AircraftEvent:
    """Decode one aircraft record from a snapshot file.

    Args:
        raw: the record, either as JSON text or an already decoded mapping.
        interesting_field: wire name of the boolean "interesting" flag.

    Returns:
        The parsed event. Unknown keys are ignored; absent or ``null``
        broadcast fields become ``None``.

    Raises:
        ParseError: the text is not a JSON object, or a field has the wrong
            type (``err.field`` names it).
    """
    if isinstance(raw, (str, bytes)):
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed record: {exc}") from None
    else:
        record = raw
    if not isinstance(record, Mapping):
        raise ParseError(f"record is not an object: {type(record).__name__}")

    values = {}
    for name, attr, kind in _FIELD_SPEC:
        value = record.get(name)
        values[attr] = None if value is None else _coerce(name, kind, value)

    flag = record.get(interesting_field)
    values["interesting"] = False if flag is None else _coerce(interesting_field, bool, flag)
    values["reg"] = _meta_str(record, "Reg")
    values["icao"] = _meta_str(record, "Icao")
    values["country"] = _meta_str(record, "Cou")
    return AircraftEvent(**values)


def event_to_record(e: AircraftEvent,
                    interesting_field: str = DEFAULT_INTERESTING_FIELD) -> dict:
    """Inverse of :func:`parse_event`; missing fields are left out."""
    record = {"Reg": e.reg, "Icao": e.icao, "Cou": e.country,
              interesting_field: e.interesting}
    for name, attr in zip(FEATURES, FEATURE_ATTRS):
        value = getattr(e, attr)
        if value is not None:
            record[name] = value
    return record


def event_to_vector(e: AircraftEvent, missing_policy: str = "zero") -> np.ndarray:
    """Encode an event as 17 floats in canonical feature order.

    Booleans become 0.0/1.0 and missing fields become 0.0.
    """
    if missing_policy != "zero":
        raise ValueError(f"unknown missing_policy {missing_policy!r}")
    out = np.zeros(N_FEATURES)
    for i, attr in enumerate(FEATURE_ATTRS):
        value = getattr(e, attr)
        if value is not None:
            out[i] = float(value)
    return out


def normalize_angles(e: AircraftEvent) -> AircraftEvent:
    """Wrap track angles into [0, 360) and range-check the position.

    Raises:
        RangeError: latitude outside [-90, 90] or longitude outside
            [-180, 180].
    """
    if e.lat is not None and not -90.0 <= e.lat <= 90.0:
        raise RangeError(f"Lat out of range: {e.lat}")
    if e.long is not None and not -180.0 <= e.long <= 180.0:
        raise RangeError(f"Long out of range: {e.long}")
    changes = {}
    for attr in ("trak", "ttrk"):
        angle = getattr(e, attr)
        if angle is not None:
            wrapped = angle % 360.0
            # -1e-20 % 360 rounds to 360.0
            changes[attr] = 0.0 if wrapped >= 360.0 else wrapped
    return replace(e, **changes) if changes else e


def event_fields() -> tuple[str, ...]:
    """All dataclass attribute names of :class:`AircraftEvent`, in order."""
    return tuple(f.name for f in fields(AircraftEvent))
