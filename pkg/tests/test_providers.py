import json
from datetime import date

import httpx
import numpy as np
import pytest

from geoagent.fixtures import GAZETTEER, bundled_fixtures, poi_rows
from geoagent.raster import RasterGrid, dumps_ascii_grid, read_raster
from geoagent.tools import (
    Gazetteer,
    LiveGeocoder,
    LivePoiProvider,
    LiveRoadProvider,
    LiveRsProvider,
    ProviderError,
    dispatch,
    live_providers,
    mock_providers,
    register_default_pool,
)
from geoagent.tools.providers import category_matches


def client(handler):
    return httpx.Client(base_url="http://geo.test", transport=httpx.MockTransport(handler))


def test_category_matches():
    assert category_matches("restaurant", "restaurants")
    assert category_matches("Hotel", "hotel")
    assert category_matches("bus", "buses")
    assert category_matches("pharmacy", "pharmacies")
    assert not category_matches("hotel", "restaurant")
    assert not category_matches("hotel", "")


def test_gazetteer_first_occurrence_and_casefold(tmp_path):
    p = tmp_path / "g.tsv"
    p.write_text("# comment\nA\t1\t2\nA\t3\t4\nb\t5\t6\n")
    g = Gazetteer(p)
    assert g.locate("A") == (1.0, 2.0)
    assert g.locate("a") == (1.0, 2.0)
    assert g.locate("B") == (5.0, 6.0)
    assert g.locate("zzz") is None
    p.write_text("broken line\n")
    with pytest.raises(ValueError):
        Gazetteer(p)


def test_bundled_gazetteer_matches_source_table():
    g = Gazetteer(bundled_fixtures() / "gazetteer.tsv")
    for name, x, y in GAZETTEER:
        assert g.locate(name) == (x, y)


def test_mock_providers_are_deterministic():
    a, b = mock_providers(bundled_fixtures()), mock_providers(bundled_fixtures())
    assert a.poi_provider.search("Wuhan", ["school"]) == b.poi_provider.search("Wuhan", ["school"])
    assert a.poi_provider.search("wuhan", []) == [r for r in poi_rows() if r.city == "Wuhan"]
    assert a.road_provider.roads(-8.7, -8.6, 41.1, 41.2) == b.road_provider.roads(-8.7, -8.6, 41.1, 41.2)


def test_mock_rs_date_window(tmp_path):
    rs = mock_providers(bundled_fixtures()).rs_provider
    got = rs.download("Hubei", "Wuhan", date(2015, 2, 18), date(2015, 3, 5), tmp_path)
    assert [p.name for p in got] == ["LC8_wuhan_20150218.tif", "LC8_wuhan_20150305.tif"]
    assert rs.download("Hubei", "Shanghai", date(2015, 1, 1), date(2016, 1, 1), tmp_path / "x") == []


# --- live providers over a mock transport ---

def test_live_poi_search_sends_city_and_keywords():
    seen = []

    def handler(request):
        seen.append(request.url)
        return httpx.Response(200, json=[{"name": "x", "category": "hotel", "lon": 116.3, "lat": 39.9, "city": "Beijing"}])

    rows = LivePoiProvider("http://geo.test", client(handler)).search("Beijing", ["hotels", "restaurants"])
    assert rows[0].name == "x" and rows[0].lon == 116.3
    assert seen[0].path == "/poi"
    assert dict(seen[0].params) == {"city": "Beijing", "keywords": "hotels,restaurants"}


def test_live_poi_within_filters_returned_rows():
    def handler(request):
        assert request.url.params["polygon"].startswith("39.8,116.2|")
        return httpx.Response(200, json=[
            {"name": "in", "category": "c", "lon": 116.3, "lat": 39.9},
            {"name": "out", "category": "c", "lon": 117.0, "lat": 39.9},
        ])

    ring = [(116.2, 39.8), (116.4, 39.8), (116.4, 40.0), (116.2, 40.0), (116.2, 39.8)]
    rows = LivePoiProvider("http://geo.test", client(handler)).within(ring)
    assert [r.name for r in rows] == ["in"]


def test_live_roads_are_clipped_to_the_box():
    def handler(request):
        assert request.url.params["bbox"] == "0.0,0.0,1.0,1.0"
        return httpx.Response(200, json=[{"name": "r", "coordinates": [[-1, 0.5], [2, 0.5]]}])

    fc = LiveRoadProvider("http://geo.test", client(handler)).roads(0.0, 1.0, 0.0, 1.0)
    assert fc.features[0].geometry.lines() == [((0.0, 0.5), (1.0, 0.5))]


def test_live_rs_download_writes_grids(tmp_path):
    grid = RasterGrid((10.0, 40.0), 10.0, (np.arange(12).reshape(3, 4),), -1)
    asc = dumps_ascii_grid(grid, grid.bands[0])

    def handler(request):
        if request.url.path == "/rs":
            assert request.url.params["start"] == "2015-02-10"
            return httpx.Response(200, json=[{"name": "scene.tif", "url": "http://geo.test/files/scene.asc"}])
        return httpx.Response(200, text=asc)

    files = LiveRsProvider("http://geo.test", client(handler)).download("Hubei", "Wuhan", date(2015, 2, 10), date(2015, 2, 20), tmp_path)
    assert [f.name for f in files] == ["scene.tif"]
    back = read_raster(files[0])
    assert back.same_grid(grid) and np.array_equal(back.bands[0], grid.bands[0])


def test_live_geocoder():
    def handler(request):
        if request.url.params["name"] == "nowhere":
            return httpx.Response(200, json=[])
        return httpx.Response(200, json=[{"lon": 1.5, "lat": 2.5}])

    g = LiveGeocoder("http://geo.test", client(handler))
    assert g.locate("Wuhan") == (1.5, 2.5)
    assert g.locate("nowhere") is None


@pytest.mark.parametrize(
    "response",
    [httpx.Response(500), httpx.Response(200, text="not json"), httpx.Response(200, json={"a": 1}), httpx.Response(200, json=[{"lon": "x"}])],
)
def test_live_provider_errors(response):
    g = LiveGeocoder("http://geo.test", client(lambda request: response))
    with pytest.raises(ProviderError):
        g.locate("Wuhan")


def test_provider_failure_becomes_t1(workspace):
    base, data_use = workspace
    providers = live_providers("http://geo.test", client(lambda request: httpx.Response(503)))
    reg = register_default_pool(providers, data_use, base=base)
    assert dispatch(reg, "Get_POI_By_Keywords", "Beijing, hotels").template == "T1"
    assert dispatch(reg, "Obtain location", "Wuhan").template == "T1"
