"""Trace fixtures: scripted agent runs checked against an expected step list.

A trace file is plain text split by ``### section`` headers::

    ### query
    Download POI of the restaurants and hotels in the city of Beijing.
    ### options
    auto_close_polygon = true
    loader Subway = case3/subway_station.shp
    ### utterance
    Thought:
    Action: Get_POI_By_Keywords
    Action Input: Beijing, restaurants, hotels
    ### utterance
    Final Answer: ...
    ### expect
    Get_POI_By_Keywords|Beijing, restaurants, hotels|ok
    ### observations
    In this step I obtain POIs that meet the requirements, it is stored at ./data_output/POI/POI.csv
    ### final
    ./data_output/POI/POI.csv

``utterance`` repeats, one block per model reply. ``expect`` lines are
``action|input-pattern|observation-class`` where the class is ok, T1, T2, T3,
none or parse. In input patterns and ``observations`` lines ``*`` matches any
text. ``./data_use/`` and ``./data_output/`` in patterns are mapped onto the
replay's fixture and output roots. ``final`` lists substrings the final
answer must contain. Lines starting with ``#`` outside utterances are comments.
"""

from __future__ import annotations

import re
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from .agent import FINAL_ANSWER, AgentConfig, AgentTranscript, ScriptedBackend, run_agent
from .fixtures import bundled_fixtures, prepare_workspace
from .tools import mock_providers, register_default_pool

SECTIONS = ("query", "options", "utterance", "expect", "observations", "final")


class TraceFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Expectation:
    action: str
    input_pattern: str
    observation_class: str


@dataclass
class TraceFixture:
    name: str
    query: str
    utterances: list[str]
    expect: list[Expectation]
    observations: list[str] = field(default_factory=list)
    final: list[str] = field(default_factory=list)
    options: dict = field(default_factory=dict)


def _parse_options(lines: list[str]) -> dict:
    opts: dict = {"loader_paths": {}}
    for ln in lines:
        if "=" not in ln:
            raise TraceFormatError(f"bad option line {ln!r}")
        key, value = (p.strip() for p in ln.split("=", 1))
        if key.startswith("loader "):
            opts["loader_paths"][key.split(None, 1)[1]] = value
        elif key in ("auto_close_polygon", "extras"):
            opts[key] = value.lower() in ("1", "true", "yes", "on")
        elif key == "max_steps":
            opts[key] = int(value)
        elif key == "wording":
            opts[key] = value
        else:
            raise TraceFormatError(f"unknown option {key!r}")
    return opts


def loads_trace(text: str, name: str = "trace", require_query: bool = True) -> TraceFixture:
    blocks: list[tuple[str, list[str]]] = []
    for raw in text.splitlines():
        m = re.match(r"^###\s+(\w+)\s*$", raw)
        if m:
            if m.group(1) not in SECTIONS:
                raise TraceFormatError(f"{name}: unknown section {m.group(1)!r}")
            blocks.append((m.group(1), []))
        elif blocks:
            blocks[-1][1].append(raw)
        elif raw.strip() and not raw.startswith("#"):
            raise TraceFormatError(f"{name}: text before the first section")

    def content(lines):
        return [ln.strip() for ln in lines if ln.strip() and not ln.startswith("#")]

    query, utterances, expect, observations, final, options = None, [], [], [], [], {"loader_paths": {}}
    for kind, lines in blocks:
        if kind == "utterance":
            utterances.append("\n".join(lines).strip("\n"))
        elif kind == "query":
            query = " ".join(content(lines))
        elif kind == "options":
            options = _parse_options(content(lines))
        elif kind == "expect":
            for ln in content(lines):
                parts = ln.split("|")
                if len(parts) < 3:
                    raise TraceFormatError(f"{name}: expect line needs action|input|class: {ln!r}")
                # the input pattern may itself contain '|' (polygon queries)
                expect.append(Expectation(parts[0].strip(), "|".join(parts[1:-1]).strip(), parts[-1].strip()))
        elif kind == "observations":
            observations += [ln.strip() for ln in lines if ln.strip()]
        elif kind == "final":
            final += content(lines)
    if not query and require_query:
        raise TraceFormatError(f"{name}: missing query section")
    if not utterances:
        raise TraceFormatError(f"{name}: no utterances")
    return TraceFixture(name, query or "", utterances, expect, observations, final, options)


def load_trace(path: str | Path) -> TraceFixture:
    p = Path(path)
    return loads_trace(p.read_text(encoding="utf-8"), p.stem)


def bundled_traces() -> list[Path]:
    return sorted((Path(__file__).resolve().parent / "data" / "traces").glob("*.trace"))


def wildcard(pattern: str) -> re.Pattern:
    return re.compile("^" + ".*".join(re.escape(p) for p in pattern.split("*")) + "$", re.S)


@dataclass
class ReplayReport:
    name: str
    passed: bool
    matched: int
    expected: int
    divergence: int | None
    message: str
    elapsed: float
    transcript: AgentTranscript | None = None
    output_root: Path | None = None

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{self.name}: {status}, {self.matched}/{self.expected} calls matched ({self.elapsed:.2f} s)"
        if not self.passed:
            text += f"; step {self.divergence}: {self.message}"
        return text


def replay(
    fixture: TraceFixture,
    base: str | Path | None = None,
    fixtures: str | Path | None = None,
    config: AgentConfig | None = None,
) -> ReplayReport:
    """Run ``fixture`` with a scripted backend and mock providers.

    ``base`` is the workspace root (a fresh temporary directory by default);
    the fixture tree is copied to ``{base}/data_use`` and outputs land in
    ``{base}/data_output``.
    """
    t0 = time.perf_counter()
    if base is None:
        base = tempfile.mkdtemp(prefix=f"replay-{fixture.name}-")
    base = Path(base).resolve()
    data_use = prepare_workspace(base, fixtures if fixtures is not None else bundled_fixtures())
    opts = dict(fixture.options)
    max_steps = opts.pop("max_steps", None)
    registry = register_default_pool(mock_providers(data_use), data_use, base=base, **opts)
    ws = registry.workspace
    if config is None:
        config = AgentConfig(max_steps=max_steps or 15)
    backend = ScriptedBackend(fixture.utterances)
    tr = run_agent(fixture.query, registry, backend, config)

    roots = {"./data_use/": ws.display(data_use) + "/", "./data_output/": ws.display(ws.output) + "/"}

    def norm(text: str) -> str:
        for k, v in roots.items():
            text = text.replace(k, v)
        return text

    def report(ok, matched, idx, msg):
        return ReplayReport(fixture.name, ok, matched, len(fixture.expect), idx, msg, time.perf_counter() - t0, tr, ws.output)

    steps = tr.steps
    for i, exp in enumerate(fixture.expect):
        if i >= len(steps):
            return report(False, i, i, f"expected {exp.action} but the run stopped ({tr.termination})")
        s = steps[i]
        if s.action != exp.action:
            return report(False, i, i, f"expected action {exp.action!r}, got {s.action!r}")
        if not wildcard(norm(exp.input_pattern)).match(s.action_input):
            return report(False, i, i, f"input {s.action_input!r} does not match {exp.input_pattern!r}")
        if s.observation.template != exp.observation_class:
            return report(False, i, i, f"observation class {s.observation.template} != {exp.observation_class}: {s.observation.text!r}")
        if i < len(fixture.observations) and not wildcard(norm(fixture.observations[i])).match(s.observation.text):
            return report(False, i, i, f"observation text differs: {s.observation.text!r}")
    if len(steps) != len(fixture.expect):
        n = len(fixture.expect)
        return report(False, n, n, f"run made {len(steps)} steps, expected {n}")
    if tr.termination != FINAL_ANSWER:
        return report(False, len(steps), len(steps), f"run ended with {tr.termination}: {tr.error}")
    for want in fixture.final:
        if norm(want) not in tr.final_answer:
            return report(False, len(steps), len(steps), f"final answer lacks {want!r}")
    return report(True, len(steps), None, "")
