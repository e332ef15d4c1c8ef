import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from adsb_features.core import (FEATURE_INDEX, FEATURES, AircraftEvent, event_to_record,
                                event_to_vector, normalize_angles, parse_event)
from adsb_features.errors import ParseError, RangeError

from conftest import make_event

FULL_RECORD = {
    "Tsec": 100, "Cmsgs": 250, "Alt": 3500, "Galt": 3620, "InHG": 29.92, "Lat": 40.7,
    "Long": -74.0, "PosTime": 1504224000000, "Spd": 120.5, "SpdTyp": 0, "Trak": 90.0,
    "TrkH": True, "Vsi": -64, "Gnd": False, "Trt": 5, "Talt": 4000, "Ttrk": 92.5,
    "Reg": "N101SV", "Icao": "A00001", "Cou": "United States", "Interested": True,
}


def test_feature_order_is_frozen():
    assert FEATURES == ("Tsec", "Cmsgs", "Alt", "Galt", "InHG", "Lat", "Long", "PosTime",
                        "Spd", "SpdTyp", "Trak", "TrkH", "Vsi", "Gnd", "Trt", "Talt", "Ttrk")
    assert FEATURE_INDEX["Lat"] == 5
    assert FEATURE_INDEX["Long"] == 6


def test_parse_direct_mapping():
    e = parse_event(FULL_RECORD)
    assert e.alt == 3500 and e.lat == 40.7 and e.gnd is False
    assert e.reg == "N101SV" and e.icao == "A00001"
    assert e.country == "United States" and e.interesting is True
    assert isinstance(e.talt, float) and e.talt == 4000.0
    assert e.missing() == []


def test_parse_from_text():
    assert parse_event(json.dumps(FULL_RECORD)) == parse_event(FULL_RECORD)


def test_missing_field_is_not_zero():
    rec = dict(FULL_RECORD)
    del rec["Talt"]
    e = parse_event(rec)
    assert e.talt is None
    assert e.missing() == ["Talt"]

    rec["Talt"] = None
    assert parse_event(rec).talt is None


def test_type_mismatch_names_field():
    with pytest.raises(ParseError) as info:
        parse_event(dict(FULL_RECORD, Lat="abc"))
    assert info.value.field == "Lat"
    assert "Lat" in str(info.value)


@pytest.mark.parametrize("name,value", [("Alt", 3500.5), ("Gnd", "no"), ("Spd", True),
                                        ("PosTime", [1]), ("Reg", 12)])
def test_other_type_mismatches(name, value):
    with pytest.raises(ParseError) as info:
        parse_event(dict(FULL_RECORD, **{name: value}))
    assert info.value.field == name


def test_malformed_text():
    with pytest.raises(ParseError):
        parse_event('{"Alt": 35')
    with pytest.raises(ParseError):
        parse_event("[1, 2]")


def test_unknown_fields_are_ignored():
    e = parse_event(dict(FULL_RECORD, Mdl="Cessna 182", Cos=[40.0, -74.0, 1, 3500]))
    assert e == parse_event(FULL_RECORD)


def test_interesting_field_name_is_configurable():
    rec = dict(FULL_RECORD)
    del rec["Interested"]
    rec["Interesting"] = True
    assert parse_event(rec).interesting is False
    assert parse_event(rec, interesting_field="Interesting").interesting is True


def test_integral_float_for_int_field():
    assert parse_event(dict(FULL_RECORD, Alt=3500.0)).alt == 3500


def test_record_round_trip():
    e = parse_event(FULL_RECORD)
    assert parse_event(event_to_record(e)) == e


def test_vector_booleans():
    v = event_to_vector(make_event(trk_h=True, gnd=False))
    assert v[FEATURE_INDEX["TrkH"]] == 1.0
    assert v[FEATURE_INDEX["Gnd"]] == 0.0


def test_vector_missing_is_zero():
    v = event_to_vector(make_event(talt=None))
    assert v[FEATURE_INDEX["Talt"]] == 0.0


def test_vector_values_in_order():
    e = make_event()
    v = event_to_vector(e)
    assert v.shape == (17,)
    assert v[FEATURE_INDEX["Alt"]] == 3500.0
    assert v[FEATURE_INDEX["Lat"]] == 40.7
    assert v[FEATURE_INDEX["PosTime"]] == 1_504_224_000_000.0


def test_vector_of_empty_event():
    np.testing.assert_array_equal(event_to_vector(AircraftEvent()), np.zeros(17))


@given(st.fixed_dictionaries({}, optional={
    name: st.one_of(st.integers(-10**6, 10**6), st.floats(-1e6, 1e6)) for name in
    ("Alt", "Lat", "Spd", "Talt", "InHG")}))
def test_vector_total_and_length_17(rec):
    rec = {k: (int(v) if k == "Alt" else v) for k, v in rec.items()}
    assert event_to_vector(parse_event(rec)).shape == (17,)


@pytest.mark.parametrize("trak,expected", [(370.0, 10.0), (0.0, 0.0), (360.0, 0.0),
                                           (-90.0, 270.0), (359.5, 359.5)])
def test_normalize_trak(trak, expected):
    assert normalize_angles(make_event(trak=trak)).trak == pytest.approx(expected)


@given(st.floats(-1e6, 1e6))
def test_normalized_angles_in_range(angle):
    e = normalize_angles(make_event(trak=angle, ttrk=angle))
    assert 0.0 <= e.trak < 360.0
    assert 0.0 <= e.ttrk < 360.0


@pytest.mark.parametrize("lat,long", [(95.0, 0.0), (-90.5, 0.0), (0.0, 180.5), (0.0, -181.0)])
def test_position_out_of_range(lat, long):
    with pytest.raises(RangeError):
        normalize_angles(make_event(lat=lat, long=long))


def test_normalize_keeps_missing_angles():
    e = normalize_angles(make_event(trak=None, ttrk=None))
    assert e.trak is None and e.ttrk is None
