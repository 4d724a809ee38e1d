"""Prompt assembly: tool list, format block, question and scratchpad."""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources
from typing import Sequence

from ..tools.registry import ToolRegistry

DEFAULT_TEMPLATE = "react_v1"
_PLACEHOLDER = re.compile(r"\{(tools|tool_names|input|agent_scratchpad)\}")


@lru_cache(maxsize=None)
def load_template(template_id: str = DEFAULT_TEMPLATE) -> str:
    path = resources.files("geoagent.agent") / "templates" / f"{template_id}.txt"
    if not path.is_file():
        raise ValueError(f"unknown prompt template {template_id!r}")
    return path.read_text(encoding="utf-8")


def render_step(thought: str, action: str, action_input: str, observation: str) -> str:
    """One scratchpad entry; the template already ends with ``Thought:``."""
    lead = f" {thought}" if thought else ""
    return f"{lead}\nAction: {action}\nAction Input: {action_input}\nObservation: {observation}\nThought:"


def scratchpad(steps: Sequence) -> str:
    """Serialize prior steps (objects with thought/action/action_input/observation text)."""
    return "".join(render_step(s.thought, s.action, s.action_input, s.observation_text) for s in steps)


def build_prompt(tools: ToolRegistry, query: str, steps: Sequence = (), template_id: str = DEFAULT_TEMPLATE) -> str:
    if not len(tools):
        raise ValueError("the tool registry is empty")
    tool_lines = "\n".join(f"{name}: {spec.description}" for name, spec in tools.items())
    values = {
        "tools": tool_lines,
        "tool_names": ", ".join(tools),
        "input": query,
        "agent_scratchpad": scratchpad(steps),
    }
    # one pass over the template, so braces inside descriptions or queries stay inert
    return _PLACEHOLDER.sub(lambda m: values[m.group(1)], load_template(template_id))


def parse_scratchpad(prompt: str, query: str) -> list[tuple[str, str, str, str]]:
    """Recover (thought, action, action_input, observation) tuples from a prompt.

    Inverse of ``scratchpad`` for entries whose fields hold no line breaks.
    """
    head = f"Question: {query}\nThought:"
    start = prompt.rfind(head)
    if start < 0:
        raise ValueError("question line not found in prompt")
    body = prompt[start + len(head) :]
    out = []
    while body:
        lines = body.split("\n", 4)
        if len(lines) < 5 or not lines[4].startswith("Thought:"):
            raise ValueError("malformed scratchpad entry")
        thought, action, action_input, observation = lines[0], lines[1], lines[2], lines[3]
        out.append((
            thought[1:] if thought.startswith(" ") else thought,
            action.removeprefix("Action: "),
            action_input.removeprefix("Action Input: "),
            observation.removeprefix("Observation: "),
        ))
        body = lines[4][len("Thought:") :]
    return out
