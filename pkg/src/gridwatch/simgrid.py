"""Simulated grid: mock HTTP information services with distinct XML schemas
and injectable faults, for exercising the monitor and gatherers at desk scale.

Each service answers GET /info according to its mode:
  healthy             200 + schema-conformant XML
  slow(delay_ms)      healthy, after a delay
  flaky(p)            seeded per-request Bernoulli 500s
  down                port never bound (connection refused)
  malformed           200 + truncated XML
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .model import GridwatchError

SCHEMAS = ("cluster", "storage", "instrument")
MODES = ("healthy", "slow", "flaky", "down", "malformed")


class ScenarioError(GridwatchError):
    """scenario.json violates the scenario schema."""


@dataclass(frozen=True)
class MockService:
    name: str
    port: int
    schema: str
    mode: str = "healthy"
    delay_ms: int = 0
    fail_probability: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class Scenario:
    services: tuple[MockService, ...] = ()


def load_scenario(path: str | Path) -> Scenario:
    try:
        data = json.loads(Path(path).read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    return scenario_from_dict(data)


def scenario_from_dict(data: object) -> Scenario:
    if isinstance(data, dict):
        entries = data.get("services", [])
    elif isinstance(data, list):
        entries = data
    else:
        raise ScenarioError("scenario must be a JSON object or array")
    services: list[MockService] = []
    ports: set[int] = set()
    for entry in entries:
        if not isinstance(entry, dict):
            raise ScenarioError(f"bad service entry: {entry!r}")
        try:
            service = MockService(
                name=str(entry["name"]),
                port=int(entry["port"]),
                schema=str(entry["schema"]),
                mode=str(entry.get("mode", "healthy")),
                delay_ms=int(entry.get("delay_ms", 0)),
                fail_probability=float(entry.get("fail_probability", 0.0)),
                seed=int(entry.get("seed", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"bad service entry {entry!r}: {exc}") from exc
        if service.schema not in SCHEMAS:
            raise ScenarioError(f"unknown schema {service.schema!r} (one of {SCHEMAS})")
        if service.mode not in MODES:
            raise ScenarioError(f"unknown mode {service.mode!r} (one of {MODES})")
        if not (0.0 <= service.fail_probability <= 1.0):
            raise ScenarioError(f"fail_probability out of [0,1]: {service.fail_probability}")
        if service.port in ports:
            raise ScenarioError(f"duplicate port {service.port}")
        ports.add(service.port)
        services.append(service)
    return Scenario(services=tuple(services))


def build_payload(service: MockService) -> str:
    """Deterministic schema-conformant payload for one service."""
    rng = random.Random(service.seed)
    if service.schema == "cluster":
        total = rng.randint(8, 512)
        free = rng.randint(0, total)
        queues = "".join(
            f'<queue name="{name}" length="{rng.randint(0, 40)}"/>'
            for name in ("short", "long", "gpu")[: rng.randint(1, 3)]
        )
        return (
            f"<cluster><queues>{queues}</queues>"
            f'<cpus total="{total}" free="{free}"/></cluster>'
        )
    if service.schema == "storage":
        capacity = rng.randint(100, 9000)
        used = rng.randint(0, capacity)
        return (
            f"<store><capacity-gb>{capacity}</capacity-gb>"
            f"<used-gb>{used}</used-gb></store>"
        )
    state = rng.choice(("idle", "measuring", "calibrating"))
    reading = round(rng.uniform(0.0, 100.0), 3)
    return (
        f"<instrument><state>{state}</state>"
        f"<last-reading>{reading}</last-reading></instrument>"
    )


def truncate_payload(service: MockService) -> str:
    payload = build_payload(service)
    return payload[: len(payload) // 2]


class _ServiceState:
    """Per-service request counter + seeded fault stream."""

    def __init__(self, service: MockService) -> None:
        self.service = service
        self.payload = build_payload(service)
        self.rng = random.Random(service.seed)
        self.lock = threading.Lock()

    def next_fails(self) -> bool:
        with self.lock:
            return self.rng.random() < self.service.fail_probability


def _make_handler(state: _ServiceState):
    class Handler(BaseHTTPRequestHandler):
        def do_GET(self):  # noqa: N802
            service = state.service
            if self.path.rstrip("/") not in ("", "/info"):
                self._send(404, "text/plain", b"not found")
                return
            if service.mode == "slow":
                time.sleep(service.delay_ms / 1000.0)
            if service.mode == "flaky" and state.next_fails():
                self._send(500, "text/plain", b"injected fault")
                return
            if service.mode == "malformed":
                body = truncate_payload(service).encode("utf-8")
            else:
                body = state.payload.encode("utf-8")
            self._send(200, "application/xml", body)

        def _send(self, status: int, ctype: str, body: bytes) -> None:
            self.send_response(status)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def log_message(self, fmt, *args):  # quiet
            pass

    return Handler


@dataclass
class RunningScenario:
    scenario: Scenario
    servers: list[ThreadingHTTPServer] = field(default_factory=list)
    threads: list[threading.Thread] = field(default_factory=list)

    def stop(self) -> None:
        for server in self.servers:
            server.shutdown()
            server.server_close()
        for thread in self.threads:
            thread.join(timeout=5)

    def __enter__(self) -> "RunningScenario":
        return self

    def __exit__(self, *exc) -> None:
        self.stop()


def serve(scenario: Scenario, host: str = "127.0.0.1") -> RunningScenario:
    """Bind and serve every non-down service; 'down' ports stay unbound."""
    running = RunningScenario(scenario=scenario)
    try:
        for service in scenario.services:
            if service.mode == "down":
                continue
            state = _ServiceState(service)
            server = ThreadingHTTPServer((host, service.port), _make_handler(state))
            server.daemon_threads = True
            thread = threading.Thread(
                target=server.serve_forever, name=f"simgrid-{service.name}", daemon=True
            )
            thread.start()
            running.servers.append(server)
            running.threads.append(thread)
    except OSError:
        running.stop()
        raise
    return running


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="simgrid", description="Serve a simulated grid")
    sub = parser.add_subparsers(dest="command", required=True)
    serve_cmd = sub.add_parser("serve", help="serve the scenario's mock services")
    serve_cmd.add_argument("scenario", help="path to scenario.json")
    serve_cmd.add_argument("--host", default="127.0.0.1")
    args = parser.parse_args(argv)

    try:
        scenario = load_scenario(args.scenario)
        running = serve(scenario, host=args.host)
    except (ScenarioError, OSError) as exc:
        print(f"simgrid: {exc}", file=sys.stderr)
        return 1
    served = [s for s in scenario.services if s.mode != "down"]
    print(
        f"simgrid: serving {len(served)} of {len(scenario.services)} services "
        f"on {args.host} (ctrl-c to stop)",
        flush=True,
    )
    try:
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        running.stop()
    return 0


if __name__ == "__main__":
    sys.exit(main())
