"""Command-line entry points: batch analysis, landmark inspection, the HTTP
service, and scenario replay.

Exit codes: 0 success; 1 when ``analyze`` finds alerts (so scripts can gate
on it); 2 on usage or parse errors.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .advisor import ALERT, AnalysisContext, analyze
from .errors import EngineError
from .grounding import ground, instantiate_action
from .landmarks import extract_landmarks, landmark_status
from .model import State
from .parser import parse_domain, parse_problem
from .session import SessionConfig, create_session, load_scenario, replay

_FORMATS = click.Choice(["text", "json"])


def _load_model(domain_path: str, problem_path: str):
    dom = parse_domain(Path(domain_path).read_text(encoding="utf-8"))
    prob = parse_problem(Path(problem_path).read_text(encoding="utf-8"), dom)
    return dom, prob


def _fail(exc: EngineError):
    click.echo(f"error[{exc.code}]: {exc.message}", err=True)
    sys.exit(2)


def _emit_json(doc: dict) -> None:
    click.echo(json.dumps(doc, indent=2))


@click.group()
def main() -> None:
    """Decision support for human-in-the-loop planning."""


@main.command("analyze")
@click.option("--domain", "domain_path", required=True, type=click.Path(exists=True))
@click.option("--problem", "problem_path", required=True, type=click.Path(exists=True))
@click.option("--plan", "plan_path", type=click.Path(exists=True),
              help="Plan file, one ground action id per line.")
@click.option("--format", "fmt", type=_FORMATS, default="text", show_default=True)
def analyze_cmd(domain_path: str, problem_path: str, plan_path: str | None,
                fmt: str) -> None:
    """Print alerts, suggestions, and info items for a planning context."""
    try:
        dom, prob = _load_model(domain_path, problem_path)
        actions = ground(dom, prob)
        init = State.make(prob.init_atoms, prob.fluent_index)
        steps = []
        if plan_path:
            from .advisor import PlanStep

            index = {a.id: a for a in actions}
            for raw in Path(plan_path).read_text(encoding="utf-8").splitlines():
                raw = raw.strip()
                if not raw or raw.startswith(";") or raw.startswith("#"):
                    continue
                action = index.get(raw)
                if action is None:
                    action = instantiate_action(dom, prob, raw)
                steps.append(PlanStep(raw, action, executed=False))
        ctx = AnalysisContext(actions=tuple(actions), current=init, goals=prob.goal,
                              trace=(init,), steps=tuple(steps))
        advisories = analyze(ctx)
    except EngineError as exc:
        _fail(exc)

    doc = {"advisories": [adv.to_doc() for adv in advisories]}
    if fmt == "json":
        _emit_json(doc)
    else:
        for adv in advisories:
            click.echo(f"{adv.severity.upper():10s} {adv.kind:20s} {adv.message}")
        if not advisories:
            click.echo("no advisories")
    if any(adv.severity == ALERT for adv in advisories):
        sys.exit(1)


@main.command("landmarks")
@click.option("--domain", "domain_path", required=True, type=click.Path(exists=True))
@click.option("--problem", "problem_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=_FORMATS, default="text", show_default=True)
def landmarks_cmd(domain_path: str, problem_path: str, fmt: str) -> None:
    """Dump the landmark graph (nodes, statuses, ordering edges)."""
    try:
        dom, prob = _load_model(domain_path, problem_path)
        actions = ground(dom, prob)
        init = State.make(prob.init_atoms, prob.fluent_index)
        graph = extract_landmarks(init, prob.goal, actions)
        statuses = {st.landmark.key: st
                    for st in landmark_status(graph, [init], init, actions)}
    except EngineError as exc:
        _fail(exc)

    nodes = []
    for lm in graph.nodes:
        st = statuses[lm.key]
        node = {**lm.to_doc(), "level": graph.levels.get(lm.key), "status": st.status}
        if st.resource_alternatives:
            node["resource_alternatives"] = st.to_doc()["resource_alternatives"]
        nodes.append(node)
    doc = {
        "nodes": nodes,
        "edges": [{"from": a, "to": b, "kind": k} for a, b, k in graph.orders],
    }
    if fmt == "json":
        _emit_json(doc)
    else:
        for node in nodes:
            level = "inf" if node["level"] is None else node["level"]
            click.echo(f"[{node['status']}] (level {level}, {node['origin']}) "
                       + " | ".join(node["disjuncts"]))
        for edge in doc["edges"]:
            click.echo(f"  {edge['from']} -> {edge['to']} ({edge['kind']})")


@main.command("serve")
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--data-dir", envvar="RADAR_DATA_DIR", default="./session-data",
              show_default=True,
              help="Snapshot directory (defaults to $RADAR_DATA_DIR when set).")
@click.option("--dispatch-policy", type=click.Choice(["block", "warn"]),
              default="block", show_default=True)
def serve_cmd(port: int, data_dir: str, dispatch_policy: str) -> None:
    """Host the session service until interrupted."""
    import uvicorn

    from .service import SessionStore, create_app

    try:
        store = SessionStore(data_dir,
                             SessionConfig(dispatch_policy=dispatch_policy))
        app = create_app(store)
        config = uvicorn.Config(app, host="127.0.0.1", port=port, log_level="warning")
        server = uvicorn.Server(config)
        server.run()
    except EngineError as exc:
        _fail(exc)
    except OSError as exc:  # occupied port, unwritable data dir, ...
        click.echo(f"error[Startup]: {exc}", err=True)
        sys.exit(2)
    except SystemExit as exc:  # uvicorn signals startup failure with its own code
        if exc.code not in (0, None):
            click.echo("error[Startup]: service failed to start", err=True)
            sys.exit(2)


@main.command("replay")
@click.argument("scenario", type=click.Path(exists=True))
@click.option("--domain", "domain_path", required=True, type=click.Path(exists=True))
@click.option("--problem", "problem_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=_FORMATS, default="text", show_default=True)
@click.option("--realtime", is_flag=True, default=False,
              help="Honor event time offsets instead of compressing them.")
def replay_cmd(scenario: str, domain_path: str, problem_path: str, fmt: str,
               realtime: bool) -> None:
    """Replay a scenario event file against a fresh session and print the
    per-event transcript."""
    try:
        session = create_session(
            Path(domain_path).read_text(encoding="utf-8"),
            Path(problem_path).read_text(encoding="utf-8"),
            session_id="replay")
        events = load_scenario(Path(scenario).read_text(encoding="utf-8"))
        transcript = replay(events, session, realtime=realtime)
    except EngineError as exc:
        _fail(exc)

    if fmt == "json":
        _emit_json(transcript)
        return
    click.echo(f"revision 0:")
    for adv in transcript["initial"]["advisories"]:
        click.echo(f"  {adv['severity'].upper():10s} {adv['message']}")
    for entry in transcript["events"]:
        note = f"  # {entry['note']}" if entry.get("note") else ""
        click.echo(f"[{entry['at_ms']:>6d} ms] {json.dumps(entry['command'])}{note}")
        if entry["outcome"] == "rejected":
            err = entry["error"]
            click.echo(f"  REJECTED [{err['code']}] {err['message']}")
            continue
        click.echo(f"  accepted -> revision {entry['revision']}")
        if "result" in entry:
            click.echo(f"  result: {json.dumps(entry['result'])}")
        for adv in entry.get("advisories", []):
            click.echo(f"  {adv['severity'].upper():10s} {adv['message']}")
    final = transcript["final"]
    click.echo(f"final: revision {final['revision']}, "
               f"goal_satisfied={str(final['goal_satisfied']).lower()}")


if __name__ == "__main__":
    main()
