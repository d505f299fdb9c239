"""Command-line entry points: validate, lint, simulate, export, serve.

Exit code 0 means no errors; lint warnings only fail under --strict. Failures
print one machine-parsable JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import TopoflowError, TruncationError
from .kernel import SimConfig, init_sim, run
from .lint import lint
from .topology import project
from .export import to_dot, to_view_json
from .xmlio import load_xml, validate_xml

DEFAULT_PORT = 8346


def _fail(kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return 1


def _load(path: str):
    with open(path, "rb") as handle:
        return load_xml(handle.read())


def _cmd_validate(args) -> int:
    with open(args.file, "rb") as handle:
        data = handle.read()
    problems = validate_xml(data)
    if problems:
        return _fail("invalid-document", "; ".join(problems))
    print(f"{args.file}: ok")
    return 0


def _cmd_lint(args) -> int:
    model = _load(args.file)
    findings = lint(model)
    if args.format == "jsonl":
        for finding in findings:
            print(finding.to_json())
    else:
        if findings:
            width = max(len(f.rule) for f in findings)
            for finding in findings:
                print(f"{finding.rule:<{width}}  {finding.severity:<7}  "
                      f"#{finding.subject}  {finding.message}")
        else:
            print("no findings")
    failing = [f for f in findings if f.severity == "error" or args.strict]
    return 1 if failing else 0


def _cmd_simulate(args) -> int:
    model = _load(args.file)
    config = SimConfig(seed=args.seed, max_events=args.max_events)
    sim = init_sim(model, config)
    try:
        trace = run(sim, until_time=args.until)
    except TruncationError as exc:
        if args.trace:
            with open(args.trace, "w") as handle:
                handle.write(exc.trace.to_jsonl())
        return _fail("truncated", str(exc))
    payload = trace.to_jsonl()
    if args.trace:
        with open(args.trace, "w") as handle:
            handle.write(payload)
        print(f"{len(trace)} events -> {args.trace}")
    else:
        sys.stdout.write(payload)
    return 0


def _cmd_export(args) -> int:
    model = _load(args.file)
    view = project(
        model, args.view, filters=args.filter or None, show_stars=args.show_stars
    )
    if args.format == "dot":
        sys.stdout.write(to_dot(model, view))
    else:
        sys.stdout.write(to_view_json(model, view) + "\n")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(_load(args.file))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topoflow",
        description="Model, lint, simulate and render merged object/process graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model document against the schema")
    p.add_argument("file")
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("lint", help="run the review rules")
    p.add_argument("file")
    p.add_argument("--strict", action="store_true", help="warnings also fail")
    p.add_argument("--format", choices=("table", "jsonl"), default="table")
    p.set_defaults(handler=_cmd_lint)

    p = sub.add_parser("simulate", help="run the token simulation")
    p.add_argument("file")
    p.add_argument("--until", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-events", type=int, default=100_000)
    p.add_argument("--trace", help="write the JSONL trace here instead of stdout")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("export", help="render a projected view")
    p.add_argument("file")
    p.add_argument("--view", choices=("object", "process", "merged"), required=True)
    p.add_argument("--format", choices=("dot", "json"), required=True)
    p.add_argument("--show-stars", action="store_true")
    p.add_argument("--filter", action="append", help="hide elements matching this glob")
    p.set_defaults(handler=_cmd_export)

    p = sub.add_parser("serve", help="serve the HTTP API and event stream")
    p.add_argument("file")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument(
        "--port", type=int,
        default=int(os.environ.get("TOPOFLOW_PORT", DEFAULT_PORT)),
    )
    p.set_defaults(handler=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except FileNotFoundError as exc:
        return _fail("missing-file", str(exc))
    except TopoflowError as exc:
        return _fail(type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
