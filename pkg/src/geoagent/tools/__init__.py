"""The GIS tool pool: registry, dispatch, providers and tool adapters."""

from . import templates
from .descriptions import DESCRIPTIONS, EXTRA_DESCRIPTIONS
from .pool import (
    DEFAULT_LOADER_PATHS,
    MissingFixture,
    ToolInputError,
    Workspace,
    parse_polygon_input,
    register_default_pool,
    split_args,
    unquote,
    validate_clip_input,
)
from .providers import (
    Gazetteer,
    LiveGeocoder,
    LivePoiProvider,
    LiveRoadProvider,
    LiveRsProvider,
    MockPoiProvider,
    MockRoadProvider,
    MockRsProvider,
    ProviderBinding,
    ProviderError,
    live_providers,
    mock_providers,
)
from .registry import Observation, ToolRegistry, ToolResult, ToolSpec, classify_observation, dispatch

__all__ = [
    "DEFAULT_LOADER_PATHS",
    "DESCRIPTIONS",
    "EXTRA_DESCRIPTIONS",
    "Gazetteer",
    "LiveGeocoder",
    "LivePoiProvider",
    "LiveRoadProvider",
    "LiveRsProvider",
    "MissingFixture",
    "MockPoiProvider",
    "MockRoadProvider",
    "MockRsProvider",
    "Observation",
    "ProviderBinding",
    "ProviderError",
    "ToolInputError",
    "ToolRegistry",
    "ToolResult",
    "ToolSpec",
    "Workspace",
    "classify_observation",
    "dispatch",
    "live_providers",
    "mock_providers",
    "parse_polygon_input",
    "register_default_pool",
    "split_args",
    "templates",
    "unquote",
    "validate_clip_input",
]
