"""ReAct agent: prompt builder, utterance parser, backends and the run loop."""

from .backends import BackendError, ChatBackend, RemoteChat, ScriptedBackend, apply_stop
from .loop import (
    BACKEND_ERROR,
    FINAL_ANSWER,
    INVALID_FORMAT,
    MAX_STEPS,
    NONE_NUDGE,
    AgentConfig,
    AgentTranscript,
    TranscriptStep,
    default_log_name,
    format_step,
    run_agent,
)
from .parser import Final, NoneAction, ParsedUtterance, ParseError, Step, parse_utterance
from .prompt import build_prompt, load_template, parse_scratchpad, scratchpad

__all__ = [
    "BACKEND_ERROR",
    "FINAL_ANSWER",
    "INVALID_FORMAT",
    "MAX_STEPS",
    "NONE_NUDGE",
    "AgentConfig",
    "AgentTranscript",
    "BackendError",
    "ChatBackend",
    "Final",
    "NoneAction",
    "ParseError",
    "ParsedUtterance",
    "RemoteChat",
    "ScriptedBackend",
    "Step",
    "TranscriptStep",
    "apply_stop",
    "build_prompt",
    "default_log_name",
    "format_step",
    "load_template",
    "parse_scratchpad",
    "parse_utterance",
    "run_agent",
    "scratchpad",
]
