"""CLI tests: flags, exit codes, output formats, determinism, serving."""

import json
import socket
import subprocess
import sys
import time
import urllib.request
from pathlib import Path

import pytest
from click.testing import CliRunner

from plansight import bundled
from plansight.cli import main

from conftest import CHAIN_DOMAIN, CHAIN_PROBLEM


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    paths = {}
    for name, text in [
        ("domain.pddl", bundled.read_data("firefighting/domain.pddl")),
        ("scenario1.pddl", bundled.read_data("firefighting/scenario1.pddl")),
        ("scenario2.pddl", bundled.read_data("firefighting/scenario2.pddl")),
        ("scenario1.events", bundled.read_data("firefighting/scenario1.events")),
        ("scenario2.events", bundled.read_data("firefighting/scenario2.events")),
        ("chain-domain.pddl", CHAIN_DOMAIN),
        ("chain-problem.pddl", CHAIN_PROBLEM),
        ("empty.events", ""),
        ("blocked.plan", "dispatch-big-engines(station1)\n"),
        ("broken.pddl", "(define (domain broken)"),
    ]:
        path = root / name
        path.write_text(text, encoding="utf-8")
        paths[name] = str(path)
    return paths


def run_cli(args):
    return CliRunner().invoke(main, args)


def test_analyze_scenario1_json(files):
    result = run_cli(["analyze", "--domain", files["domain.pddl"],
                      "--problem", files["scenario1.pddl"], "--format", "json"])
    assert result.exit_code == 0, result.output
    doc = json.loads(result.output)
    kinds = [a["kind"] for a in doc["advisories"]]
    assert kinds == ["resource-shortfall", "plan-incomplete"]
    assert len(doc["advisories"][0]["payload"]["alternatives"]) == 2


def test_analyze_satisfied_goal_exit_zero(files, tmp_path):
    satisfied = tmp_path / "done.pddl"
    satisfied.write_text(
        "(define (problem done) (:domain firefighting)"
        " (:objects station1 - station)"
        " (:init (fire-out) (= (available-big) 1) (= (available-small) 1)"
        " (= (available-rescuers) 2))"
        " (:goal (and (fire-out))))", encoding="utf-8")
    result = run_cli(["analyze", "--domain", files["domain.pddl"],
                      "--problem", str(satisfied), "--format", "json"])
    assert result.exit_code == 0
    kinds = [a["kind"] for a in json.loads(result.output)["advisories"]]
    assert kinds == ["goal-achieved"]


def test_analyze_unreachable_goal_exit_one(files, tmp_path):
    unreachable = tmp_path / "unreachable.pddl"
    unreachable.write_text(
        "(define (problem stuck) (:domain firefighting)"
        " (:objects station1 - station)"
        " (:init (= (available-big) 9) (= (available-small) 9)"
        " (= (available-rescuers) 9))"
        " (:goal (and (fire-out))))", encoding="utf-8")  # no fire to put out
    result = run_cli(["analyze", "--domain", files["domain.pddl"],
                      "--problem", str(unreachable), "--format", "json"])
    assert result.exit_code == 1
    kinds = [a["kind"] for a in json.loads(result.output)["advisories"]]
    assert "goal-unreachable" in kinds


def test_analyze_with_blocked_plan(files):
    result = run_cli(["analyze", "--domain", files["domain.pddl"],
                      "--problem", files["scenario1.pddl"],
                      "--plan", files["blocked.plan"], "--format", "json"])
    assert result.exit_code == 1
    doc = json.loads(result.output)
    invalid = [a for a in doc["advisories"] if a["kind"] == "plan-step-invalid"]
    assert invalid[0]["payload"]["step_index"] == 0


def test_analyze_parse_error_exit_two(files):
    result = run_cli(["analyze", "--domain", files["broken.pddl"],
                      "--problem", files["scenario1.pddl"]])
    assert result.exit_code == 2
    assert "error[SyntaxError]" in result.stderr
    assert "1:1" in result.stderr  # position-bearing message


def test_usage_error_exit_two():
    assert run_cli(["analyze", "--nope"]).exit_code == 2


def test_landmarks_chain_toy(files):
    result = run_cli(["landmarks", "--domain", files["chain-domain.pddl"],
                      "--problem", files["chain-problem.pddl"],
                      "--format", "json"])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert len(doc["nodes"]) == 2
    assert len(doc["edges"]) == 1
    assert doc["edges"][0]["kind"] == "greedy-necessary"


def test_landmarks_bundled(files):
    result = run_cli(["landmarks", "--domain", files["domain.pddl"],
                      "--problem", files["scenario1.pddl"], "--format", "json"])
    doc = json.loads(result.output)
    keys = ["|".join(n["disjuncts"]) for n in doc["nodes"]]
    assert "engines-on-scene(big)|engines-on-scene(small)" in keys

    result = run_cli(["landmarks", "--domain", files["domain.pddl"],
                      "--problem", files["scenario2.pddl"], "--format", "json"])
    doc = json.loads(result.output)
    keys = ["|".join(n["disjuncts"]) for n in doc["nodes"]]
    assert "rescuers-on-scene" in keys


def test_replay_scenario1(files):
    result = run_cli(["replay", files["scenario1.events"],
                      "--domain", files["domain.pddl"],
                      "--problem", files["scenario1.pddl"], "--format", "json"])
    assert result.exit_code == 0, result.output
    doc = json.loads(result.output)
    final = doc["final"]
    assert final["goal_satisfied"] is True
    assert [a["severity"] for a in final["advisories"]] == ["info"]


def test_replay_empty_events(files):
    result = run_cli(["replay", files["empty.events"],
                      "--domain", files["domain.pddl"],
                      "--problem", files["scenario1.pddl"], "--format", "json"])
    doc = json.loads(result.output)
    assert doc["events"] == []
    assert [a["kind"] for a in doc["initial"]["advisories"]] == [
        "resource-shortfall", "plan-incomplete"]


def test_replay_text_format(files):
    result = run_cli(["replay", files["scenario2.events"],
                      "--domain", files["domain.pddl"],
                      "--problem", files["scenario2.pddl"]])
    assert result.exit_code == 0
    assert "goal_satisfied=true" in result.output
    assert "REJECTED" not in result.output


def _run_cli_subprocess(args):
    return subprocess.run(
        [sys.executable, "-m", "plansight.cli", *args],
        capture_output=True, cwd="/root/pkg")


def test_byte_identical_runs(files):
    invocations = [
        ["analyze", "--domain", files["domain.pddl"],
         "--problem", files["scenario1.pddl"], "--format", "json"],
        ["landmarks", "--domain", files["domain.pddl"],
         "--problem", files["scenario2.pddl"], "--format", "json"],
        ["replay", files["scenario1.events"], "--domain", files["domain.pddl"],
         "--problem", files["scenario1.pddl"], "--format", "json"],
    ]
    for args in invocations:
        first = _run_cli_subprocess(args)
        second = _run_cli_subprocess(args)
        assert first.stdout == second.stdout and first.stdout, args
        assert first.returncode == second.returncode


def _free_port():
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def _wait_health(port, timeout=15.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        try:
            with urllib.request.urlopen(f"http://127.0.0.1:{port}/health",
                                        timeout=1) as response:
                return json.loads(response.read())
        except OSError:
            time.sleep(0.1)
    raise TimeoutError("service did not come up")


def test_serve_health_and_dispatch_policy(tmp_path):
    port = _free_port()
    proc = subprocess.Popen(
        [sys.executable, "-m", "plansight.cli", "serve", "--port", str(port),
         "--data-dir", str(tmp_path / "data"), "--dispatch-policy", "warn"],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL, cwd="/root/pkg")
    try:
        health = _wait_health(port)
        assert health["status"] == "ok"

        def post(path, body):
            req = urllib.request.Request(
                f"http://127.0.0.1:{port}{path}",
                data=json.dumps(body).encode(),
                headers={"Content-Type": "application/json"})
            with urllib.request.urlopen(req, timeout=5) as response:
                return json.loads(response.read())

        created = post("/sessions", {"example": "firefighting/scenario1"})
        post(f"/sessions/{created['id']}/commands",
             {"type": "append-step", "action": "dispatch-big-engines(station1)"})
        # Invalid plan, warn policy: dispatch proceeds with a warning.
        doc = post(f"/sessions/{created['id']}/commands", {"type": "dispatch"})
        assert doc["result"]["decision"] == "allow-with-warning"
    finally:
        proc.terminate()
        proc.wait(timeout=10)


def test_serve_occupied_port_exits_two(tmp_path):
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        sock.listen(1)
        port = sock.getsockname()[1]
        proc = subprocess.run(
            [sys.executable, "-m", "plansight.cli", "serve", "--port", str(port),
             "--data-dir", str(tmp_path / "data")],
            capture_output=True, timeout=30, cwd="/root/pkg")
    assert proc.returncode == 2


def test_data_dir_env_default(tmp_path, files):
    # RADAR_DATA_DIR supplies --data-dir when the flag is absent.
    port = _free_port()
    env_dir = tmp_path / "env-data"
    proc = subprocess.Popen(
        [sys.executable, "-m", "plansight.cli", "serve", "--port", str(port)],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL, cwd="/root/pkg",
        env={"PATH": "/usr/bin:/bin", "RADAR_DATA_DIR": str(env_dir)})
    try:
        _wait_health(port)
        body = json.dumps({"example": "firefighting/scenario1"}).encode()
        req = urllib.request.Request(
            f"http://127.0.0.1:{port}/sessions", data=body,
            headers={"Content-Type": "application/json"})
        with urllib.request.urlopen(req, timeout=5) as response:
            sid = json.loads(response.read())["id"]
        assert (env_dir / f"{sid}.json").exists()
    finally:
        proc.terminate()
        proc.wait(timeout=10)
