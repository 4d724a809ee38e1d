"""Tool registry and the dispatch entry point used by the agent.

``dispatch`` is total: whatever strings the agent produces, it answers with an
Observation. Validator and handler failures are mapped onto the tool's failure
template, unknown names onto the invalid-tool template.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Iterator, Mapping, Sequence

from ..vector_io import DatasetPath
from . import templates as T

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Observation:
    text: str
    artifacts: tuple[DatasetPath, ...] = ()
    ok: bool = True
    template: str = T.SUCCESS  # "ok", "T1", "T2" or "T3"


@dataclass(frozen=True)
class ToolResult:
    """What a handler returns on success."""

    text: str
    artifacts: tuple[DatasetPath, ...] = ()


Handler = Callable[[str], ToolResult]
Validator = Callable[[str], None]


@dataclass(frozen=True)
class ToolSpec:
    name: str
    description: str
    handler: Handler
    input_grammar: str = ""
    validators: tuple[Validator, ...] = ()
    failure_template: str = T.GENERIC_FAILURE
    category: str = ""


class ToolRegistry(Mapping[str, ToolSpec]):
    """Ordered, read-only mapping from tool name to spec."""

    def __init__(self, specs: Sequence[ToolSpec], wording: str = "verbatim", workspace=None):
        if wording not in T.WORDINGS:
            raise ValueError(f"unknown template wording {wording!r}")
        table: dict[str, ToolSpec] = {}
        for s in specs:
            if s.name in table:
                raise ValueError(f"duplicate tool name {s.name!r}")
            table[s.name] = s
        self._tools = MappingProxyType(table)
        self.wording = wording
        self.workspace = workspace

    def __getitem__(self, name: str) -> ToolSpec:
        return self._tools[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._tools)

    def __len__(self) -> int:
        return len(self._tools)

    @property
    def names(self) -> list[str]:
        return list(self._tools)

    def template(self, key: str, **kw) -> str:
        return T.WORDINGS[self.wording][key].format(**kw)


def dispatch(registry: ToolRegistry, action_name: str, action_input: str) -> Observation:
    name = (action_name or "").strip()
    spec = registry.get(name)
    if spec is None:
        return Observation(registry.template(T.INVALID_TOOL, name=name), ok=False, template=T.INVALID_TOOL)
    text = action_input if isinstance(action_input, str) else ""
    try:
        for check in spec.validators:
            check(text)
        result = spec.handler(text)
    except Exception as exc:  # the agent must always get an observation back
        log.info("tool %s failed on %r: %s: %s", name, text, type(exc).__name__, exc)
        return Observation(registry.template(spec.failure_template), ok=False, template=spec.failure_template)
    return Observation(result.text, tuple(result.artifacts), ok=True, template=T.SUCCESS)


def classify_observation(text: str, registry: ToolRegistry | None = None) -> str:
    """Template class of an observation string ("ok", "T1", "T2" or "T3")."""
    for wording in T.WORDINGS.values():
        if text == wording[T.GENERIC_FAILURE]:
            return T.GENERIC_FAILURE
        if text == wording[T.MAPPING_FAILURE]:
            return T.MAPPING_FAILURE
    if text.endswith(" is not a valid tool, try another one."):
        return T.INVALID_TOOL
    return T.SUCCESS
