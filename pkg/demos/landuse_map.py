"""Crop the sample image to the urban mask, classify land use with k-means,
vectorize and map it, calling the tools directly without the agent.

    python demos/landuse_map.py --k 5 --seed 42
"""

import argparse
import tempfile
from pathlib import Path

import numpy as np

from geoagent.fixtures import prepare_workspace
from geoagent.raster import ClassificationParams, read_raster
from geoagent.tools import dispatch, mock_providers, register_default_pool
from geoagent.vector_io import read_vector

STEPS = [
    ("Crop_Remote_Sensing_Image", "./data_use/case4/data.tif, ./data_use/case4/WuhanMainCountry.shp"),
    ("LandUse_Classification", "./data_output/RS_crop.tif"),
    ("Raster_to_Vector", "./data_output/lucc.tif"),
    ("Mapping", "./data_output/polyone.shp"),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--base", help="workspace directory (default: a temporary one)")
    ap.add_argument("--k", type=int, default=5)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    base = Path(args.base or tempfile.mkdtemp(prefix="landuse-"))
    data_use = prepare_workspace(base)
    registry = register_default_pool(
        mock_providers(data_use), data_use, base=base, classification=ClassificationParams(k=args.k, seed=args.seed)
    )
    for name, text in STEPS:
        obs = dispatch(registry, name, text)
        print(f"{name}: {obs.text}")
        if not obs.ok:
            return 1

    out = base / "data_output"
    lucc = read_raster(out / "lucc.tif")
    polys = read_vector(out / "polyone.shp")
    labels = lucc.bands[0]
    print(f"\n{'class':>5} {'cells':>6} {'polygons':>8} {'area m2':>10}")
    for c in range(args.k):
        feats = [f for f in polys.features if f.attributes["class"] == c]
        print(f"{c:>5} {int((labels == c).sum()):>6} {len(feats):>8} {sum(f.geometry.area() for f in feats):>10.0f}")
    print(f"nodata cells: {int((labels == lucc.nodata).sum())} of {labels.size}")
    print(f"map: {out / 'visual_map.svg'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
