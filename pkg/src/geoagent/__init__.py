"""geoagent: a ReAct-style agent that plans and runs GIS tools from
natural-language requests, with the geometry, raster and mapping engines the
tools rely on."""

__version__ = "0.1.0"
