import math

import numpy as np
import pytest

from geoagent.fixtures import prepare_workspace
from geoagent.geometry import Feature, FeatureCollection, Geometry
from geoagent.tools import mock_providers, register_default_pool


def rect(x0, y0, x1, y1, **attrs):
    ring = [(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)]
    return FeatureCollection((Feature(Geometry.polygon(ring), attrs),))


def star_polygon(rng, cx=0.0, cy=0.0, n=None, rmin=0.3, rmax=1.0):
    """Random star-shaped (hence simple) polygon around (cx, cy)."""
    n = n or int(rng.integers(4, 11))
    # one vertex per angular sector keeps every gap below pi
    ang = (np.arange(n) + rng.uniform(0.05, 0.95, n)) * 2 * math.pi / n
    r = rng.uniform(rmin, rmax, n)
    ring = [(cx + a * math.cos(t), cy + a * math.sin(t)) for a, t in zip(r, ang)]
    return FeatureCollection((Feature(Geometry.polygon(ring + ring[:1]), {}),))


def points(*xy, **attrs):
    return FeatureCollection(tuple(Feature(Geometry.point(x, y), dict(attrs)) for x, y in xy))


@pytest.fixture
def workspace(tmp_path):
    data_use = prepare_workspace(tmp_path)
    return tmp_path, data_use


@pytest.fixture
def registry(workspace):
    base, data_use = workspace
    return register_default_pool(mock_providers(data_use), data_use, base=base)
