"""Replays a run in which the agent passes place names instead of files and
invents a tool, then recovers once the failure messages steer it back."""

import argparse
import tempfile

from geoagent.replay import bundled_traces, load_trace, replay


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--base", help="workspace directory (default: a temporary one)")
    args = ap.parse_args()

    fixture = load_trace(next(p for p in bundled_traces() if p.stem == "protection"))
    report = replay(fixture, base=args.base or tempfile.mkdtemp(prefix="protect-"))
    for i, step in enumerate(report.transcript.steps):
        obs = step.observation
        print(f"{i:2d} [{obs.template:>2}] {step.action}: {step.action_input}")
        if not obs.ok:
            print(f"      -> {obs.text}")
    print(f"\nFinal Answer: {report.transcript.final_answer}")
    print(report.summary())


if __name__ == "__main__":
    main()
