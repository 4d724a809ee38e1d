"""Command-line entry point: run, replay, tool, chat and init subcommands."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .agent import (
    FINAL_ANSWER,
    MAX_STEPS,
    AgentConfig,
    RemoteChat,
    ScriptedBackend,
    default_log_name,
    format_step,
    run_agent,
)
from .fixtures import bundled_fixtures, prepare_workspace
from .replay import TraceFormatError, bundled_traces, load_trace, loads_trace, replay
from .tools import MissingFixture, dispatch, live_providers, mock_providers, register_default_pool

DEFAULT_TOKEN_ENV = "GEOAGENT_API_TOKEN"
EXIT_OK, EXIT_CONFIG, EXIT_MAX_STEPS, EXIT_BACKEND = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AppConfig:
    backend: str
    endpoint: str | None
    token_env: str
    model: str
    temperature: float
    max_steps: int
    fixtures: Path
    base: Path
    out: Path
    providers: str
    provider_url: str | None
    script: Path | None
    wording: str
    auto_close_polygon: bool
    extras: bool
    log_dir: Path

    @classmethod
    def from_args(cls, args) -> AppConfig:
        base = Path(args.base).resolve()
        if args.fixtures:
            fixtures = Path(args.fixtures)
        elif (base / "data_use").is_dir():
            fixtures = base / "data_use"
        else:
            fixtures = bundled_fixtures()
        out = Path(args.out) if args.out else base / "data_output"
        cfg = cls(
            backend=args.backend,
            endpoint=args.endpoint,
            token_env=args.token_env,
            model=args.model,
            temperature=args.temperature,
            max_steps=args.max_steps,
            fixtures=fixtures.resolve(),
            base=base,
            out=out.resolve(),
            providers=args.providers,
            provider_url=args.provider_url,
            script=Path(args.script) if args.script else None,
            wording="verbatim" if args.verbatim_templates else "corrected",
            auto_close_polygon=args.auto_close_polygon,
            extras=args.extras,
            log_dir=Path(args.log_dir).resolve() if args.log_dir else out.resolve() / "transcripts",
        )
        cfg.check()
        return cfg

    def check(self) -> None:
        if self.max_steps < 1:
            raise ConfigError("--max-steps must be at least 1")
        if self.temperature < 0:
            raise ConfigError("--temperature must be non-negative")
        if self.providers == "live" and not self.provider_url:
            raise ConfigError("--providers live needs --provider-url")

    def registry(self):
        if self.providers == "live":
            binding = live_providers(self.provider_url)
        else:
            binding = mock_providers(self.fixtures)
        return register_default_pool(
            binding,
            self.fixtures,
            base=self.base,
            output=self.out,
            extras=self.extras,
            wording=self.wording,
            auto_close_polygon=self.auto_close_polygon,
        )

    def chat_backend(self):
        if self.backend == "remote":
            if not self.endpoint:
                raise ConfigError("the remote backend needs --endpoint")
            token = os.environ.get(self.token_env)
            if not token:
                raise ConfigError(f"environment variable {self.token_env} is not set")
            return RemoteChat(self.endpoint, token, self.model, self.temperature)
        if self.script is None:
            raise ConfigError("the scripted backend needs --script")
        try:
            fixture = loads_trace(self.script.read_text(encoding="utf-8"), self.script.stem, require_query=False)
        except OSError as exc:
            raise ConfigError(f"cannot read script: {exc}") from exc
        except TraceFormatError as exc:
            raise ConfigError(str(exc)) from exc
        return ScriptedBackend(fixture.utterances)

    def agent_config(self) -> AgentConfig:
        return AgentConfig(max_steps=self.max_steps, model=self.model, temperature=self.temperature)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("configuration")
    g.add_argument("--backend", choices=("remote", "scripted"), default="scripted")
    g.add_argument("--endpoint", help="chat-completion base URL for the remote backend")
    g.add_argument("--token-env", default=DEFAULT_TOKEN_ENV, help="environment variable holding the bearer token (default %(default)s)")
    g.add_argument("--model", default="gpt-3.5-turbo")
    g.add_argument("--temperature", type=float, default=0.0)
    g.add_argument("--max-steps", type=int, default=15)
    g.add_argument("--fixtures", help="fixture directory (default ./data_use, else the bundled set)")
    g.add_argument("--base", default=".", help="workspace root used to resolve and display paths")
    g.add_argument("--out", help="output directory (default {base}/data_output)")
    g.add_argument("--providers", choices=("mock", "live"), default="mock")
    g.add_argument("--provider-url", help="base URL of the live data providers")
    g.add_argument("--script", help="utterance script for the scripted backend")
    g.add_argument("--verbatim-templates", action=argparse.BooleanOptionalAction, default=True, help="keep failure messages word for word (default on)")
    g.add_argument("--auto-close-polygon", action="store_true", help="close open rings given to Get_POI_By_Polygon")
    g.add_argument("--extras", action="store_true", help="also register Union and Composite_Bands")
    g.add_argument("--log-dir", help="transcript directory (default {out}/transcripts)")
    g.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="geoagent", description="Natural-language GIS agent with a scripted or remote language model.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="answer one query")
    r.add_argument("query")
    rp = sub.add_parser("replay", parents=[common], help="check trace fixtures")
    rp.add_argument("traces", nargs="*", help="trace files (default: the bundled set)")
    t = sub.add_parser("tool", parents=[common], help="call one tool directly")
    t.add_argument("name")
    t.add_argument("input", nargs="?", default="None")
    sub.add_parser("chat", parents=[common], help="interactive session")
    sub.add_parser("init", parents=[common], help="copy the sample datasets to {base}/data_use")
    return p


def _run_once(cfg: AppConfig, registry, backend, query: str, out) -> int:
    log = cfg.log_dir / default_log_name()

    def echo(step):
        print(format_step(step), file=out, flush=True)
        print(file=out)

    tr = run_agent(query, registry, backend, cfg.agent_config(), log_path=log, on_step=echo)
    if tr.termination == FINAL_ANSWER:
        print(f"Final Answer: {tr.final_answer}", file=out)
        code = EXIT_OK
    elif tr.termination == MAX_STEPS:
        print(f"Stopped after {cfg.max_steps} steps without a final answer.", file=out)
        code = EXIT_MAX_STEPS
    else:
        print(f"Backend error: {tr.error}", file=out)
        code = EXIT_BACKEND
    print(f"Transcript: {log}", file=out)
    return code


def cmd_run(cfg: AppConfig, query: str, out=None) -> int:
    out = out or sys.stdout
    return _run_once(cfg, cfg.registry(), cfg.chat_backend(), query, out)


def cmd_replay(cfg: AppConfig, traces: list[str], out=None) -> int:
    out = out or sys.stdout
    paths = [Path(t) for t in traces] or bundled_traces()
    for path in paths:
        fixture = load_trace(path)
        # each trace gets a fresh temporary workspace
        report = replay(fixture, fixtures=cfg.fixtures)
        print(report.summary(), file=out)
        if not report.passed:
            return 1
    return 0


def cmd_tool(cfg: AppConfig, name: str, text: str, out=None) -> int:
    out = out or sys.stdout
    obs = dispatch(cfg.registry(), name, text)
    print(obs.text, file=out)
    return 0 if obs.ok else 1


def cmd_chat(cfg: AppConfig, inp=None, out=None) -> int:
    inp, out = inp or sys.stdin, out or sys.stdout
    registry = cfg.registry()
    backend = cfg.chat_backend()
    while True:
        print("geoagent> ", end="", file=out, flush=True)
        line = inp.readline()
        if not line:
            break
        query = line.strip()
        if not query:
            continue
        if query == "/quit":
            break
        if query == "/tools":
            for name, spec in registry.items():
                print(f"{name}: {spec.description}", file=out)
            continue
        _run_once(cfg, registry, backend, query, out)
    return 0


def cmd_init(cfg: AppConfig, out=None) -> int:
    out = out or sys.stdout
    target = cfg.base / "data_use"
    if target.resolve() == cfg.fixtures:
        print(f"{target} already holds the fixtures", file=out)
        return 0
    prepare_workspace(cfg.base, cfg.fixtures)
    print(f"sample datasets copied to {target}", file=out)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = AppConfig.from_args(args)
        if args.command == "run":
            return cmd_run(cfg, args.query)
        if args.command == "replay":
            return cmd_replay(cfg, args.traces)
        if args.command == "tool":
            return cmd_tool(cfg, args.name, args.input)
        if args.command == "init":
            return cmd_init(cfg)
        return cmd_chat(cfg)
    except (ConfigError, MissingFixture, TraceFormatError) as exc:
        print(f"geoagent: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
