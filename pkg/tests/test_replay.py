import re

import pytest

from geoagent.replay import TraceFormatError, bundled_traces, load_trace, loads_trace, replay, wildcard

SITING_CALLS = [
    "Load_Subway_Data",
    "Buffer",
    "Load_Supermarket_Data",
    "Buffer",
    "Load_Factory_Data",
    "Buffer",
    "Erase",
    "Intersect",
]


def test_bundled_traces():
    assert [p.stem for p in bundled_traces()] == [
        "facility_siting",
        "hotel_query",
        "landuse_map",
        "poi_keywords",
        "poi_polygon",
        "protection",
        "road_network",
        "rs_download",
    ]


@pytest.mark.parametrize("path", bundled_traces(), ids=lambda p: p.stem)
def test_trace_passes(path, tmp_path):
    report = replay(load_trace(path), base=tmp_path)
    assert report.passed, report.summary()
    assert report.elapsed < 5.0


def test_siting_matches_eight_calls(tmp_path):
    report = replay(load_trace(next(p for p in bundled_traces() if p.stem == "facility_siting")), base=tmp_path)
    assert report.summary().startswith("facility_siting: PASS, 8/8 calls matched")
    assert [a for a, _ in report.transcript.tool_calls()] == SITING_CALLS


def test_swapped_buffer_and_erase_fails_at_the_divergence(tmp_path):
    fx = load_trace(next(p for p in bundled_traces() if p.stem == "facility_siting"))
    # expectation order says Erase comes before the last Buffer
    fx.expect[5], fx.expect[6] = fx.expect[6], fx.expect[5]
    report = replay(fx, base=tmp_path)
    assert not report.passed and report.divergence == 5
    assert "expected action 'Erase', got 'Buffer'" in report.message


def test_wrong_observation_class_fails(tmp_path):
    fx = load_trace(next(p for p in bundled_traces() if p.stem == "protection"))
    fx.expect[3] = type(fx.expect[3])(fx.expect[3].action, fx.expect[3].input_pattern, "ok")
    report = replay(fx, base=tmp_path)
    assert not report.passed and report.divergence == 3


def test_missing_final_substring_fails(tmp_path):
    fx = load_trace(next(p for p in bundled_traces() if p.stem == "poi_polygon"))
    fx.final = ["./data_output/elsewhere.csv"]
    assert not replay(fx, base=tmp_path).passed


def test_strict_polygon_run_fails_open_ring_query(tmp_path):
    fx = load_trace(next(p for p in bundled_traces() if p.stem == "poi_polygon"))
    fx.options["auto_close_polygon"] = False
    report = replay(fx, base=tmp_path)
    assert not report.passed and "T1" in report.message


def test_loads_trace_format():
    fx = loads_trace(
        "# comment\n### query\nhello\n### options\nmax_steps = 4\nloader Hotel = case2/factory.shp\n"
        "### utterance\nAction: Load_Hotel_Data\nAction Input: None\n### utterance\nFinal Answer: x\n"
        "### expect\nGet_POI_By_Polygon|1,2|3,4|1,2|T1\n"
    )
    assert fx.query == "hello" and len(fx.utterances) == 2
    assert fx.options == {"loader_paths": {"Hotel": "case2/factory.shp"}, "max_steps": 4}
    assert fx.expect[0].input_pattern == "1,2|3,4|1,2" and fx.expect[0].observation_class == "T1"


@pytest.mark.parametrize(
    "text",
    ["### bogus\nx", "stray\n### query\nq", "### query\nq\n", "### query\nq\n### utterance\nx\n### expect\nonly|two", "### query\nq\n### options\nfoo = 1\n### utterance\nx"],
)
def test_loads_trace_errors(text):
    with pytest.raises(TraceFormatError):
        loads_trace(text)


def test_wildcard():
    assert wildcard("a*c").match("abbbc")
    assert not wildcard("a*c").match("abd")
    assert wildcard("x.shp").match("x.shp") and not wildcard("x.shp").match("xashp")
