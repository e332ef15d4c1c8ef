import json

import pytest

from adsb_features.core import event_to_record
from adsb_features.errors import FormatError, ParseError
from adsb_features.ingest import (AircraftTrack, FilterConfig, build_tracks, load_snapshot,
                                  load_snapshots, load_tracks, passes_filter, persist_tracks,
                                  read_whitelist)

from conftest import make_event

T0 = 1_504_224_000_000


def write_snapshot(path, records, key="acList"):
    path.write_text(json.dumps({key: records}))
    return path


def test_load_three_valid(tmp_path):
    recs = [event_to_record(make_event(reg=f"N{i}", pos_time=T0 + i)) for i in range(3)]
    events, warnings = load_snapshot(write_snapshot(tmp_path / "a.json", recs))
    assert len(events) == 3 and warnings == []
    assert [e.reg for e in events] == ["N0", "N1", "N2"]


def test_corrupt_record_is_skipped(tmp_path):
    recs = [event_to_record(make_event(pos_time=T0)), {"Reg": "BAD", "Lat": "abc"},
            event_to_record(make_event(pos_time=T0 + 1))]
    events, warnings = load_snapshot(write_snapshot(tmp_path / "a.json", recs))
    assert len(events) == 2
    assert len(warnings) == 1 and "Lat" in warnings[0]


def test_out_of_range_record_is_skipped(tmp_path):
    recs = [event_to_record(make_event(lat=95.0))]
    events, warnings = load_snapshot(write_snapshot(tmp_path / "a.json", recs))
    assert events == [] and len(warnings) == 1


def test_load_normalizes_angles(tmp_path):
    recs = [event_to_record(make_event(trak=370.0))]
    events, _ = load_snapshot(write_snapshot(tmp_path / "a.json", recs))
    assert events[0].trak == pytest.approx(10.0)


def test_empty_aircraft_array(tmp_path):
    assert load_snapshot(write_snapshot(tmp_path / "a.json", [])) == ([], [])


def test_aircraft_key_alternative(tmp_path):
    recs = [event_to_record(make_event())]
    events, _ = load_snapshot(write_snapshot(tmp_path / "a.json", recs, key="aircraft"))
    assert len(events) == 1


def test_malformed_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        load_snapshot(bad)
    bad.write_text('{"other": []}')
    with pytest.raises(ParseError):
        load_snapshot(bad)


def test_unreadable_file(tmp_path):
    with pytest.raises(OSError):
        load_snapshot(tmp_path / "missing.json")


def test_threaded_load_matches_serial(tmp_path):
    paths = [write_snapshot(tmp_path / f"{i}.json",
                            [event_to_record(make_event(pos_time=T0 + i * 10 + j)) for j in range(5)])
             for i in range(6)]
    assert load_snapshots(paths, threads=3) == load_snapshots(paths, threads=1)


ACCEPT_LIST = FilterConfig(frozenset({"N101SV"}), require_interesting=True)


def test_filter_whitelisted_us():
    assert passes_filter(make_event(reg="N101SV", interesting=False), ACCEPT_LIST)


def test_filter_interesting_us():
    assert passes_filter(make_event(reg="N999ZZ", interesting=True), ACCEPT_LIST)


def test_filter_rejects_foreign():
    assert not passes_filter(make_event(reg="N101SV", country="Canada"), ACCEPT_LIST)


def test_filter_interesting_needs_flag_enabled():
    f = FilterConfig(frozenset({"N101SV"}), require_interesting=False)
    assert not passes_filter(make_event(reg="N999ZZ", interesting=True), f)


def test_filter_rejects_unlisted_uninteresting():
    assert not passes_filter(make_event(reg="N999ZZ", interesting=False), ACCEPT_LIST)


def test_filter_config_needs_a_criterion():
    with pytest.raises(ValueError):
        FilterConfig()


def test_build_tracks_groups_and_sorts():
    events = [make_event(reg="B", pos_time=T0 + 5), make_event(reg="A", pos_time=T0 + 3),
              make_event(reg="B", pos_time=T0 + 1), make_event(reg="A", pos_time=T0 + 2)]
    tracks = build_tracks(events)
    assert [t.reg for t in tracks] == ["A", "B"]
    assert [e.pos_time for e in tracks[0].events] == [T0 + 2, T0 + 3]
    assert [e.pos_time for e in tracks[1].events] == [T0 + 1, T0 + 5]


def test_build_tracks_dedup_keeps_first():
    first = make_event(pos_time=T0, alt=1000)
    second = make_event(pos_time=T0, alt=2000)
    (track,) = build_tracks([first, second])
    assert track.events == (first,)


def test_build_tracks_drops_untimed():
    assert build_tracks([make_event(pos_time=None), make_event(pos_time=0)]) == []


def test_build_tracks_empty():
    assert build_tracks([]) == []


def test_track_invariants():
    with pytest.raises(ValueError):
        AircraftTrack("A", [make_event(reg="A", pos_time=T0 + 1), make_event(reg="A", pos_time=T0)])
    with pytest.raises(ValueError):
        AircraftTrack("A", [make_event(reg="B", pos_time=T0)])


def test_persist_round_trip(tmp_path):
    events = [make_event(reg="A", pos_time=T0 + i, lat=40.0 + i / 3, talt=None if i % 2 else 4e3)
              for i in range(5)] + [make_event(reg="B", pos_time=T0, interesting=True, gnd=True)]
    tracks = build_tracks(events)
    path = tmp_path / "d.trk"
    persist_tracks(tracks, path)
    back = load_tracks(path)
    assert back == tracks
    assert back[0].events[1].talt is None
    header = json.loads(path.read_text().splitlines()[0])
    assert header["version"] == 1 and "Talt" in header["columns"]


def test_persist_empty(tmp_path):
    path = tmp_path / "d.trk"
    persist_tracks([], path)
    assert load_tracks(path) == []


def test_load_tracks_rejects_garbage(tmp_path):
    path = tmp_path / "d.trk"
    path.write_text("")
    with pytest.raises(FormatError):
        load_tracks(path)
    path.write_text('{"format": "something-else"}\n')
    with pytest.raises(FormatError):
        load_tracks(path)


def test_read_whitelist(tmp_path):
    path = tmp_path / "w.txt"
    path.write_text("# header\nN101SV\n\n  N202SV  # note\n")
    assert read_whitelist(path) == {"N101SV", "N202SV"}
