"""Standalone poll scheduler: queries every enabled resource each cycle and
publishes the results to the store. Runs with no web server present.
"""

from __future__ import annotations

import argparse
import json
import os
import signal
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .gatherers import GathererRegistry, default_registry, load_registry, utc_now_iso
from .model import (
    Resource,
    ResourceInfo,
    ResourceStatus,
    UNCONFIGURED,
)
from .store import PortalStore, StoreError

DEFAULT_INTERVAL_S = 30.0
DEFAULT_TIMEOUT_MS = 10_000
DEFAULT_MAX_CONCURRENCY = 16


@dataclass
class MonitorConfig:
    interval_s: float = DEFAULT_INTERVAL_S
    per_resource_timeout_ms: int = DEFAULT_TIMEOUT_MS
    max_concurrency: int = DEFAULT_MAX_CONCURRENCY
    once: bool = False

    def __post_init__(self) -> None:
        if self.interval_s < 1:
            raise ValueError("interval_s must be >= 1")
        if self.max_concurrency < 1:
            raise ValueError("max_concurrency must be >= 1")


@dataclass
class Outcome:
    resource_id: str
    status: ResourceStatus
    duration_ms: int
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.resource_id,
            "status": self.status.value,
            "duration_ms": self.duration_ms,
            "error": self.error,
        }


@dataclass
class CycleReport:
    started_at: str
    finished_at: str = ""
    outcomes: list[Outcome] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "outcomes": [o.to_dict() for o in self.outcomes],
        }


def _skip_reason(resource: Resource, registry: GathererRegistry) -> str | None:
    if resource.type == UNCONFIGURED:
        return "resource type is not configured"
    if registry.lookup(resource.type) is None:
        return f"no gatherer registered for type {resource.type!r}"
    return None


def _gather_one(
    resource: Resource, registry: GathererRegistry, timeout_ms: int
) -> tuple[ResourceInfo, int]:
    started = time.monotonic()
    info = _gather_inner(resource, registry, timeout_ms)
    return info, int((time.monotonic() - started) * 1000)


def _gather_inner(
    resource: Resource, registry: GathererRegistry, timeout_ms: int
) -> ResourceInfo:
    reason = _skip_reason(resource, registry)
    if reason is not None:
        return ResourceInfo(
            resource_id=resource.id,
            status=ResourceStatus.UNKNOWN,
            payload_xml="",
            gathered_at=utc_now_iso(),
            latency_ms=0,
            error=reason,
        )
    gatherer = registry.lookup(resource.type)
    assert gatherer is not None
    try:
        info = gatherer.gather(resource, timeout_ms)
    except Exception as exc:  # contract says gatherers don't raise; contain anyway
        return ResourceInfo(
            resource_id=resource.id,
            status=ResourceStatus.DOWN,
            payload_xml="",
            gathered_at=utc_now_iso(),
            latency_ms=0,
            error=f"gatherer crashed: {exc!r}",
        )
    return _sanitize(resource, info)


def _sanitize(resource: Resource, info: ResourceInfo) -> ResourceInfo:
    """Force a misbehaving gatherer's result back into the ResourceInfo contract."""
    if info.resource_id != resource.id:
        info.resource_id = resource.id
    if info.status is ResourceStatus.DOWN and not info.error:
        info.error = "gatherer reported DOWN without a cause"
    if info.status is ResourceStatus.UP and not info.payload_xml.strip():
        info = ResourceInfo(
            resource_id=resource.id,
            status=ResourceStatus.DOWN,
            payload_xml="",
            gathered_at=info.gathered_at or utc_now_iso(),
            latency_ms=info.latency_ms,
            error="gatherer reported UP without a payload",
        )
    if not info.gathered_at:
        info.gathered_at = utc_now_iso()
    return info


def derive_status(outcome: ResourceInfo) -> ResourceStatus:
    return outcome.status


def run_cycle(
    store: PortalStore, registry: GathererRegistry, config: MonitorConfig
) -> CycleReport:
    """One poll pass: exactly one info write per enabled resource.

    Gathers run concurrently, bounded by max_concurrency; one failing
    gatherer never affects the others.
    """
    report = CycleReport(started_at=utc_now_iso())
    state = store.load_state()  # StoreError propagates: cycle aborts
    enabled = [r for r in state.resources if r.enabled]
    if enabled:
        with ThreadPoolExecutor(max_workers=config.max_concurrency) as pool:
            futures = {
                r.id: pool.submit(_gather_one, r, registry, config.per_resource_timeout_ms)
                for r in enabled
            }
            for resource in enabled:
                info, duration_ms = futures[resource.id].result()
                store.record_info(resource.id, info)
                report.outcomes.append(
                    Outcome(
                        resource_id=resource.id,
                        status=info.status,
                        duration_ms=duration_ms,
                        error=info.error,
                    )
                )
    report.finished_at = utc_now_iso()
    return report


def run_loop(
    store: PortalStore,
    registry: GathererRegistry,
    config: MonitorConfig,
    stop: threading.Event,
    on_report=None,
) -> None:
    """Poll until stop is set. Cycles start every interval_s, start-to-start;
    an overrunning cycle is followed immediately by the next. Cycles never
    overlap. Store errors are reported and retried next cycle.
    """
    while not stop.is_set():
        cycle_start = time.monotonic()
        try:
            report = run_cycle(store, registry, config)
            if on_report is not None:
                on_report(report)
        except StoreError as exc:
            print(f"monitor: cycle aborted: {exc}", file=sys.stderr)
        if config.once:
            return
        elapsed = time.monotonic() - cycle_start
        remaining = config.interval_s - elapsed
        if remaining > 0:
            stop.wait(remaining)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="monitor", description="Poll resources and record their state"
    )
    parser.add_argument("--state-dir", required=True, help="portal state directory")
    parser.add_argument("--once", action="store_true", help="run a single cycle and exit")
    parser.add_argument("--interval", type=float, default=DEFAULT_INTERVAL_S, metavar="S")
    parser.add_argument("--timeout", type=int, default=DEFAULT_TIMEOUT_MS, metavar="MS")
    parser.add_argument(
        "--max-concurrency", type=int, default=DEFAULT_MAX_CONCURRENCY, metavar="N"
    )
    parser.add_argument(
        "--gatherers",
        default=None,
        help="registry config (default: <state-dir>/gatherers.json if present)",
    )
    args = parser.parse_args(argv)

    store = PortalStore(args.state_dir)
    gatherers_path = args.gatherers or (store.state_dir / "gatherers.json")
    try:
        if os.path.exists(gatherers_path):
            registry = load_registry(gatherers_path)
        else:
            registry = default_registry()
        config = MonitorConfig(
            interval_s=args.interval,
            per_resource_timeout_ms=args.timeout,
            max_concurrency=args.max_concurrency,
            once=args.once,
        )
    except Exception as exc:
        print(f"monitor: {exc}", file=sys.stderr)
        return 1

    stop = threading.Event()

    def handle_signal(signum, frame):  # noqa: ARG001
        stop.set()

    signal.signal(signal.SIGINT, handle_signal)
    signal.signal(signal.SIGTERM, handle_signal)

    def emit(report: CycleReport) -> None:
        print(json.dumps(report.to_dict()), flush=True)

    run_loop(store, registry, config, stop, on_report=emit)
    return 0


if __name__ == "__main__":
    sys.exit(main())
