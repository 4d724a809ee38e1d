"""Parsing of agent utterances into Step / Final / NoneAction / ParseError."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

FINAL_LABEL = "Final Answer:"
_ACTION = re.compile(r"Action\s*:")
_ACTION_INPUT = re.compile(r"Action\s*Input\s*:")
_THOUGHT = re.compile(r"^\s*Thought\s*:")


@dataclass(frozen=True)
class Step:
    thought: str
    action: str
    action_input: str


@dataclass(frozen=True)
class Final:
    answer: str
    thought: str = ""


@dataclass(frozen=True)
class NoneAction:
    thought: str


@dataclass(frozen=True)
class ParseError:
    reason: str


ParsedUtterance = Union[Step, Final, NoneAction, ParseError]


def _clean_thought(text: str) -> str:
    return _THOUGHT.sub("", text, count=1).strip()


def _clean_input(text: str) -> str:
    s = text.strip()
    if len(s) >= 2 and s[0] == s[-1] == '"':
        s = s[1:-1].strip()
    return s


def parse_utterance(text: str) -> ParsedUtterance:
    """Classify one model utterance; never raises.

    Anything after an ``Observation:`` label is dropped first, since the model
    has no business writing observations. A ``Final Answer:`` that comes before
    any ``Action:`` wins.
    """
    if not isinstance(text, str):
        return ParseError("utterance is not text")
    cut = text.find("Observation:")
    if cut >= 0:
        text = text[:cut]
    action = _ACTION.search(text)
    final = text.find(FINAL_LABEL)
    if final >= 0 and (action is None or final < action.start()):
        return Final(text[final + len(FINAL_LABEL) :].strip(), _clean_thought(text[:final]))
    if action is None:
        return ParseError("no 'Action:' or 'Final Answer:' label found")
    thought = _clean_thought(text[: action.start()])
    rest = text[action.end() :]
    ai = _ACTION_INPUT.search(rest)
    name_part = rest[: ai.start()] if ai else rest
    lines = [ln.strip() for ln in name_part.strip().splitlines() if ln.strip()]
    if not lines:
        return ParseError("empty action name")
    name = lines[0]
    if name == "None":
        return NoneAction(thought)
    return Step(thought, name, _clean_input(rest[ai.end() :]) if ai else "")
