"""gridwatch command line: serve the API, run the monitor, and edit the
portal configuration without any server running.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import monitor as monitor_mod
from . import simgrid as simgrid_mod
from .model import (
    GridwatchError,
    Location,
    PortalState,
    add_resource,
    delete_resource,
    update_resource,
)
from .store import PortalStore


def _store(args) -> PortalStore:
    return PortalStore(args.state_dir)


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    host, _, port = args.listen.rpartition(":")
    app = create_app(
        args.state_dir,
        static_dir=args.static_dir,
        monitor_interval_s=args.interval,
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="warning")
    return 0


def cmd_ls(args) -> int:
    store = _store(args)
    state = store.load_or_init()
    infos = store.all_infos()
    for r in state.resources:
        info = infos.get(r.id)
        status = info.status.value if info else "UNKNOWN"
        flag = "" if r.enabled else " (disabled)"
        print(f"{r.id}  {status:<7} {r.type:<14} {r.hostname}{flag}")
    return 0


def cmd_add(args) -> int:
    store = _store(args)
    state, resource = add_resource(store.load_or_init(), args.hostname)
    store.save_state(state)
    print(resource.id)
    return 0


def cmd_rm(args) -> int:
    store = _store(args)
    state = delete_resource(store.load_state(), args.id)
    store.save_state(state)
    store.delete_info(args.id)
    return 0


def _parse_patch(pairs: list[str]) -> dict:
    patch: dict = {}
    loc: dict = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise GridwatchError(f"expected key=value, got {pair!r}")
        if key in ("lat", "lon"):
            loc[key] = float(value)
        elif key == "port":
            patch[key] = int(value) if value else None
        elif key == "enabled":
            patch[key] = value.lower() in ("1", "true", "yes", "on")
        elif key in ("hostname", "type", "label", "endpoint"):
            patch[key] = value
        else:
            raise GridwatchError(f"unknown field {key!r}")
    if loc:
        patch["location"] = loc
    return patch


def cmd_set(args) -> int:
    store = _store(args)
    state = store.load_state()
    patch = _parse_patch(args.assignments)
    if "location" in patch:
        current = state.get(args.id).location
        merged = {"lat": current.lat, "lon": current.lon, **patch["location"]}
        Location.from_dict(merged)  # validate early for a clean message
        patch["location"] = merged
    state = update_resource(state, args.id, patch)
    store.save_state(state)
    return 0


def cmd_export(args) -> int:
    state = _store(args).load_state()
    json.dump(state.to_dict(), sys.stdout, indent=2)
    print()
    return 0


def cmd_import(args) -> int:
    text = sys.stdin.read() if args.file == "-" else Path(args.file).read_text("utf-8")
    state = PortalState.from_dict(json.loads(text))
    _store(args).save_state(state)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gridwatch")
    parser.add_argument(
        "--state-dir", default=".", help="portal state directory (default: cwd)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the HTTP API and UI host")
    p.add_argument("--listen", default="127.0.0.1:8642", metavar="HOST:PORT")
    p.add_argument("--static-dir", default=None, help="directory of UI assets to serve at /")
    p.add_argument(
        "--interval",
        type=float,
        default=monitor_mod.DEFAULT_INTERVAL_S,
        help="monitor interval used for staleness marking",
    )
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("monitor", help="run the poll monitor")
    p.add_argument("rest", nargs=argparse.REMAINDER)
    p.set_defaults(func=None)

    p = sub.add_parser("simgrid", help="run simulated grid services")
    p.add_argument("rest", nargs=argparse.REMAINDER)
    p.set_defaults(func=None)

    p = sub.add_parser("ls", help="list resources with last known status")
    p.set_defaults(func=cmd_ls)

    p = sub.add_parser("add", help="add a resource by hostname")
    p.add_argument("hostname")
    p.set_defaults(func=cmd_add)

    p = sub.add_parser("rm", help="delete a resource")
    p.add_argument("id")
    p.set_defaults(func=cmd_rm)

    p = sub.add_parser("set", help="update resource fields: set ID key=value ...")
    p.add_argument("id")
    p.add_argument("assignments", nargs="+", metavar="key=value")
    p.set_defaults(func=cmd_set)

    p = sub.add_parser("export", help="print portal.json to stdout")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("import", help="replace portal.json from FILE (or - for stdin)")
    p.add_argument("file")
    p.set_defaults(func=cmd_import)

    # Everything after "monitor" or "simgrid" belongs to the delegated tool;
    # argparse REMAINDER does not capture leading options, so split manually.
    argv = list(sys.argv[1:] if argv is None else argv)
    for delegated in ("monitor", "simgrid"):
        if delegated in argv:
            cut = argv.index(delegated)
            head, rest = argv[:cut + 1], argv[cut + 1:]
            args = parser.parse_args(head)
            args.rest = rest
            break
    else:
        args = parser.parse_args(argv)

    try:
        if args.command == "monitor":
            rest = args.rest
            if "--state-dir" not in rest:
                rest = ["--state-dir", args.state_dir, *rest]
            return monitor_mod.main(rest)
        if args.command == "simgrid":
            return simgrid_mod.main(args.rest)
        return args.func(args)
    except (GridwatchError, OSError, json.JSONDecodeError, ValueError,
            KeyError, TypeError) as exc:
        print(f"gridwatch: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
