"""The think/act/observe loop and its transcript."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from ..tools.registry import Observation, ToolRegistry, dispatch
from .backends import BackendError, ChatBackend
from .parser import Final, NoneAction, ParsedUtterance, ParseError, Step, parse_utterance
from .prompt import DEFAULT_TEMPLATE, build_prompt, load_template

FINAL_ANSWER = "FinalAnswer"
MAX_STEPS = "MaxSteps"
BACKEND_ERROR = "BackendError"

INVALID_FORMAT = "Invalid format, use Action/Action Input or Final Answer"
NONE_NUDGE = "No tool was called. If the task is finished, reply with Final Answer."


@dataclass(frozen=True)
class AgentConfig:
    max_steps: int = 15
    model: str = "gpt-3.5-turbo"
    temperature: float = 0.0
    stop: tuple[str, ...] = ("Observation:",)
    template_id: str = DEFAULT_TEMPLATE

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")
        load_template(self.template_id)


@dataclass(frozen=True)
class TranscriptStep:
    utterance: ParsedUtterance
    observation: Observation
    ts: str
    raw: str = ""

    @property
    def thought(self) -> str:
        return getattr(self.utterance, "thought", "")

    @property
    def action(self) -> str:
        u = self.utterance
        if isinstance(u, Step):
            return u.action
        return "None" if isinstance(u, NoneAction) else ""

    @property
    def action_input(self) -> str:
        return self.utterance.action_input if isinstance(self.utterance, Step) else ""

    @property
    def observation_text(self) -> str:
        return self.observation.text

    def record(self) -> dict:
        return {
            "ts": self.ts,
            "thought": self.thought,
            "action": self.action,
            "action_input": self.action_input,
            "observation": self.observation.text,
            "ok": self.observation.ok,
        }


@dataclass
class AgentTranscript:
    query: str
    steps: list[TranscriptStep] = field(default_factory=list)
    final_answer: str | None = None
    termination: str | None = None
    error: str | None = None
    final_ts: str | None = None

    def tool_calls(self) -> list[tuple[str, str]]:
        return [(s.action, s.action_input) for s in self.steps if isinstance(s.utterance, Step)]

    def jsonl(self) -> str:
        lines = [json.dumps(s.record(), ensure_ascii=False) for s in self.steps]
        end = {"ts": self.final_ts, "termination": self.termination, "final_answer": self.final_answer}
        if self.error:
            end["error"] = self.error
        lines.append(json.dumps(end, ensure_ascii=False))
        return "\n".join(lines) + "\n"

    def write(self, path: str | os.PathLike) -> Path:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(self.jsonl(), encoding="utf-8", newline="\n")
        return p


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


def run_agent(
    query: str,
    registry: ToolRegistry,
    backend: ChatBackend,
    config: AgentConfig = AgentConfig(),
    *,
    log_path: str | os.PathLike | None = None,
    clock: Callable[[], datetime] = _utc_now,
    on_step: Callable[[TranscriptStep], None] | None = None,
) -> AgentTranscript:
    """Drive the agent until a Final Answer, the step budget, or a backend error.

    Every appended step, including format corrections and the nudge after
    ``Action: None``, counts against ``config.max_steps``.
    """
    tr = AgentTranscript(query)
    awaiting_final = False

    def append(u, obs, raw):
        step = TranscriptStep(u, obs, clock().isoformat(), raw)
        tr.steps.append(step)
        if on_step is not None:
            on_step(step)

    while True:
        if len(tr.steps) >= config.max_steps:
            tr.termination = MAX_STEPS
            break
        prompt = build_prompt(registry, query, tr.steps, config.template_id)
        try:
            raw = backend.complete(prompt, config.stop)
        except BackendError as exc:
            tr.termination, tr.error = BACKEND_ERROR, str(exc)
            break
        u = parse_utterance(raw)
        if isinstance(u, Final):
            tr.final_answer, tr.termination = u.answer, FINAL_ANSWER
            break
        if awaiting_final or isinstance(u, ParseError):
            # a second non-final reply after "Action: None" is a format error
            awaiting_final = False
            bad = u if isinstance(u, ParseError) else ParseError("expected a Final Answer after 'Action: None'")
            append(bad, Observation(INVALID_FORMAT, ok=False, template="parse"), raw)
        elif isinstance(u, NoneAction):
            awaiting_final = True
            append(u, Observation(NONE_NUDGE, ok=False, template="none"), raw)
        else:
            append(u, dispatch(registry, u.action, u.action_input), raw)
    tr.final_ts = clock().isoformat()
    if log_path is not None:
        tr.write(log_path)
    return tr


def default_log_name(clock: Callable[[], datetime] = _utc_now) -> str:
    return f"transcript-{clock().strftime('%Y%m%dT%H%M%S%f')}.jsonl"


def format_step(step: TranscriptStep) -> str:
    """Human-readable rendering used by the CLI step stream."""
    lines = [f"Thought: {step.thought}"]
    if isinstance(step.utterance, ParseError):
        lines.append(f"(unparseable reply: {step.utterance.reason})")
    else:
        lines += [f"Action: {step.action}", f"Action Input: {step.action_input}"]
    lines.append(f"Observation: {step.observation.text}")
    return "\n".join(lines)


