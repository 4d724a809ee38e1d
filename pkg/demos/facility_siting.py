"""Site-selection walkthrough: the agent buffers subway stations, supermarkets
and factories, erases the factory zone and intersects the rest.

The model is replaced by the recorded utterances, so the run is reproducible.

    python demos/facility_siting.py --base /tmp/siting
"""

import argparse
import tempfile
from pathlib import Path

from geoagent.agent import ScriptedBackend, format_step, run_agent
from geoagent.cartography import MapStyle, render_map
from geoagent.fixtures import prepare_workspace
from geoagent.replay import bundled_traces, load_trace
from geoagent.tools import mock_providers, register_default_pool
from geoagent.vector_io import read_vector


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--base", help="workspace directory (default: a temporary one)")
    args = ap.parse_args()

    base = Path(args.base or tempfile.mkdtemp(prefix="siting-"))
    data_use = prepare_workspace(base)
    registry = register_default_pool(mock_providers(data_use), data_use, base=base)
    fixture = load_trace(next(p for p in bundled_traces() if p.stem == "facility_siting"))

    print(f"Question: {fixture.query}\n")
    tr = run_agent(fixture.query, registry, ScriptedBackend(fixture.utterances), on_step=lambda s: print(format_step(s), end="\n\n"))
    print(f"Final Answer: {tr.final_answer}\n")

    out = base / "data_output"
    sites = read_vector(out / "intersect.shp")
    print(f"candidate area: {sites.area() / 1e6:.3f} km2 in {len(sites)} feature(s)")
    for name in ("subway_station_neighborhood_500.0.shp", "supermarket_neighborhood_800.0.shp", "factory_neighborhood_1500.0.shp"):
        print(f"  {name}: {read_vector(out / name).area() / 1e6:.3f} km2")
    render_map(sites, MapStyle(title="Candidate sites", grid=True), out / "sites.svg", png=True)
    print(f"map written to {out / 'sites.svg'} and {out / 'sites.png'}")


if __name__ == "__main__":
    main()
