import io
import json

import pytest

from geoagent import cli
from geoagent.fixtures import prepare_workspace
from geoagent.replay import bundled_traces
from geoagent.tools import templates as T


@pytest.fixture
def base(tmp_path):
    prepare_workspace(tmp_path)
    return tmp_path


def args(base, *rest):
    return list(rest) + ["--base", str(base)]


def trace(name):
    return str(next(p for p in bundled_traces() if p.stem == name))


def test_run_hotel_query_prints_steps_and_final(base, capsys):
    code = cli.main(args(base, "run", "Find hotels near supermarkets and subway stations", "--script", trace("hotel_query")))
    out = capsys.readouterr().out
    assert code == 0
    assert out.count("Action: ") == 7
    assert "Final Answer:" in out and "./data_output/clip.shp" in out
    logs = list((base / "data_output" / "transcripts").glob("*.jsonl"))
    assert len(logs) == 1
    last = json.loads(logs[0].read_text().splitlines()[-1])
    assert last["termination"] == "FinalAnswer"


def test_run_remote_without_token_is_config_error(base, monkeypatch, capsys):
    monkeypatch.delenv("GEOAGENT_API_TOKEN", raising=False)
    assert cli.main(args(base, "run", "q", "--backend", "remote", "--endpoint", "http://127.0.0.1:9")) == 1
    assert "GEOAGENT_API_TOKEN" in capsys.readouterr().err


def test_run_scripted_without_script_is_config_error(base):
    assert cli.main(args(base, "run", "q")) == 1


def test_run_script_exhausted_is_exit_3_with_partial_log(base, tmp_path):
    script = tmp_path / "short.trace"
    script.write_text("### utterance\nAction: Load_Hotel_Data\nAction Input: None\n")
    assert cli.main(args(base, "run", "q", "--script", str(script))) == 3
    log = next((base / "data_output" / "transcripts").glob("*.jsonl"))
    lines = log.read_text().splitlines()
    assert len(lines) == 2 and json.loads(lines[0])["action"] == "Load_Hotel_Data"


def test_run_max_steps_is_exit_2(base, tmp_path):
    script = tmp_path / "loop.trace"
    script.write_text("### utterance\nAction: Load_Hotel_Data\nAction Input: None\n" * 5)
    assert cli.main(args(base, "run", "q", "--script", str(script), "--max-steps", "3")) == 2


def test_bad_max_steps_is_config_error(base):
    assert cli.main(args(base, "run", "q", "--script", trace("poi_keywords"), "--max-steps", "0")) == 1


def test_replay_all_pass(base, capsys):
    assert cli.main(args(base, "replay")) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 8 and all(": PASS," in ln for ln in lines)


def test_replay_failure_exit_1(base, tmp_path):
    bad = tmp_path / "bad.trace"
    bad.write_text("### query\nq\n### utterance\nFinal Answer: x\n### expect\nBuffer|*|ok\n")
    assert cli.main(args(base, "replay", str(bad))) == 1


def test_tool_clip_polygons_by_lines_prints_t1(base, capsys):
    from geoagent.geometry import Feature, FeatureCollection, Geometry
    from geoagent.vector_io import write_vector

    write_vector(FeatureCollection((Feature(Geometry.linestring([(0, 0), (5000, 5000)]), {}),)), base / "line.shp")
    code = cli.main(args(base, "tool", "Clip", "./data_use/case4/WuhanMainCountry.shp, ./line.shp"))
    assert code == 1
    assert capsys.readouterr().out == T.VERBATIM["T1"] + "\n"


def test_tool_mapping_raster_prints_t2(base, capsys):
    assert cli.main(args(base, "tool", "Mapping", "./data_use/case4/data.tif")) == 1
    assert capsys.readouterr().out == T.VERBATIM["T2"] + "\n"


def test_tool_buffer_success(base, capsys):
    assert cli.main(args(base, "tool", "Buffer", "./data_use/case2/subway_station.shp, 500")) == 0
    assert capsys.readouterr().out.startswith("I obtain the neighboring area with a distance of 500.0")
    assert (base / "data_output" / "subway_station_neighborhood_500.0.shp").is_file()


def test_tool_corrected_wording(base, capsys):
    cli.main(args(base, "tool", "Mapping", "./data_use/case4/data.tif", "--no-verbatim-templates"))
    assert capsys.readouterr().out == T.CORRECTED["T2"] + "\n"


def test_chat_session(base, tmp_path):
    script = tmp_path / "chat.trace"
    script.write_text("### utterance\nFinal Answer: one\n### utterance\nAction: Load_Hotel_Data\nAction Input: None\n### utterance\nFinal Answer: two\n")
    parser = cli.build_parser()
    cfg = cli.AppConfig.from_args(parser.parse_args(args(base, "chat", "--script", str(script))))
    out = io.StringIO()
    code = cli.cmd_chat(cfg, io.StringIO("/tools\n\nfirst query\nsecond query\n/quit\nnever\n"), out)
    text = out.getvalue()
    assert code == 0
    assert sum(1 for ln in text.splitlines() if ": Use this tool" in ln or ": Load the dataset" in ln or ": Input" in ln) == 19
    assert "Final Answer: one" in text and "Final Answer: two" in text
    assert len(list((base / "data_output" / "transcripts").glob("*.jsonl"))) == 2


def test_chat_backend_error_does_not_end_session(base, tmp_path):
    script = tmp_path / "one.trace"
    script.write_text("### utterance\nFinal Answer: one\n")
    cfg = cli.AppConfig.from_args(cli.build_parser().parse_args(args(base, "chat", "--script", str(script))))
    out = io.StringIO()
    assert cli.cmd_chat(cfg, io.StringIO("a\nb\n/tools\n"), out) == 0
    assert "Backend error" in out.getvalue() and "Mapping: " in out.getvalue()


def test_missing_fixture_is_config_error(base, capsys):
    (base / "data_use" / "case3" / "hotel.shp").unlink()
    assert cli.main(args(base, "tool", "Load_Hotel_Data")) == 1
    assert "case3/hotel.shp" in capsys.readouterr().err


def test_init_copies_fixtures(tmp_path, capsys):
    assert cli.main(["init", "--base", str(tmp_path)]) == 0
    assert (tmp_path / "data_use" / "case2" / "subway_station.shp").is_file()
    assert cli.main(["init", "--base", str(tmp_path)]) == 0
    assert "already holds" in capsys.readouterr().out
    cli.main(["tool", "Load_Subway_Data", "--base", str(tmp_path)])
    assert capsys.readouterr().out.endswith("stored in ./data_use/case2/subway_station.shp\n")
