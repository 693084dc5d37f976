"""Command-line entry point.

Modes: ``serve`` (HTTP), ``pipe`` (newline-delimited JSON on stdio),
``extract`` (workspace -> features payload), ``validate`` (batch check a
configuration file), ``commit`` (full gate plus product generation).
Verbosity comes from the ``SPLKIT_LOG`` environment variable (error, info
or debug).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .backend import generate_product, scan_workspace
from .errors import SplError
from .mdl import parse_module
from .protocol import Session, dumps
from .server import make_http_server, run_pipe

log = logging.getLogger("splkit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="splkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="mode", required=True)

    serve = sub.add_parser("serve", help="serve the configuration session over HTTP")
    _source_flags(serve)
    serve.add_argument("--addr", default="127.0.0.1:8388", help="host:port to listen on")
    serve.add_argument("--out", help="directory for product files generated on commit")
    serve.add_argument("--name", default="Product", help="name of the generated language")

    pipe = sub.add_parser("pipe", help="speak newline-delimited JSON on stdin/stdout")
    _source_flags(pipe, required=False)
    pipe.add_argument("--out", help="directory for product files generated on commit")
    pipe.add_argument("--name", default="Product", help="name of the generated language")

    extract = sub.add_parser("extract", help="scan a workspace and write the features payload")
    extract.add_argument("--corpus", required=True, help="directory of .mdl modules")
    extract.add_argument("--out", help="output file (defaults to stdout)")

    validate = sub.add_parser("validate", help="check a configuration file against a features payload")
    validate.add_argument("--features", required=True, help="features payload file")
    validate.add_argument("--config", required=True, help="configuration file (commit payload shape)")

    commit = sub.add_parser("commit", help="validate a configuration and generate the product")
    commit.add_argument("--features", required=True, help="features payload file")
    commit.add_argument("--config", required=True, help="configuration file (commit payload shape)")
    commit.add_argument("--out", required=True, help="directory for the generated source files")
    commit.add_argument("--corpus", required=True, help="directory of .mdl modules")
    commit.add_argument("--name", default="Product", help="name of the generated language")
    return parser


def _source_flags(parser: argparse.ArgumentParser, required: bool = True) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--corpus", help="directory of .mdl modules to scan")
    group.add_argument("--features", help="pre-extracted features payload file")


def _configure_logging() -> None:
    level = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("SPLKIT_LOG", "error").lower(), logging.ERROR
    )
    logging.basicConfig(level=level, stream=sys.stderr, format="%(name)s: %(message)s")


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _load_modules(corpus: str) -> list:
    root = Path(corpus)
    if not root.is_dir():
        raise FileNotFoundError(f"not a readable directory: {root}")
    return [
        parse_module(p.read_text(encoding="utf-8"), source=str(p))
        for p in sorted(root.rglob("*.mdl"), key=lambda p: str(p))
    ]


def _load_session(args: argparse.Namespace, on_commit=None) -> Session:
    session = Session(on_commit=on_commit)
    payload = None
    if getattr(args, "corpus", None):
        payload = scan_workspace(args.corpus)
    elif getattr(args, "features", None):
        payload = _load_json(args.features)
    if payload is not None:
        response = session.dispatch(payload)
        if not response.get("ok"):
            raise SplError(f"load failed: {response.get('error')}: {response.get('message')}")
    return session


def _commit_hook(args: argparse.Namespace):
    if not getattr(args, "out", None) or not getattr(args, "corpus", None):
        return None
    modules = _load_modules(args.corpus)

    def hook(payload: dict) -> None:
        written = generate_product(payload, modules, args.out, args.name)
        log.info("wrote %d product files to %s", len(written), args.out)

    return hook


def _parse_addr(addr: str) -> tuple[str, int]:
    host, _, port = addr.rpartition(":")
    if not host or not port.isdigit():
        raise SplError(f"bad --addr {addr!r}, expected host:port")
    return host, int(port)


def _run_serve(args: argparse.Namespace) -> int:
    session = _load_session(args, on_commit=_commit_hook(args))
    host, port = _parse_addr(args.addr)
    server = make_http_server(session, host, port)
    bound = f"http://{server.server_address[0]}:{server.server_address[1]}"
    print(f"listening on {bound}", flush=True)
    log.info("serving on %s", bound)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def _run_pipe(args: argparse.Namespace) -> int:
    session = _load_session(args, on_commit=_commit_hook(args))
    run_pipe(session, sys.stdin, sys.stdout)
    return 0


def _run_extract(args: argparse.Namespace) -> int:
    payload = scan_workspace(args.corpus)
    text = dumps(payload) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _batch_session(args: argparse.Namespace) -> tuple[Session, dict]:
    session = Session()
    response = session.dispatch(_load_json(args.features))
    if not response.get("ok"):
        raise SplError(f"load failed: {response.get('error')}: {response.get('message')}")
    session.load_configuration(_load_json(args.config))
    verdict = session.dispatch({"method": "validate"})
    return session, verdict


def _run_validate(args: argparse.Namespace) -> int:
    _, verdict = _batch_session(args)
    sys.stdout.write(dumps(verdict) + "\n")
    return 0 if verdict.get("valid") else 1


def _run_commit(args: argparse.Namespace) -> int:
    session, verdict = _batch_session(args)
    if not verdict.get("valid"):
        sys.stdout.write(dumps(verdict) + "\n")
        log.error("configuration is invalid; nothing generated")
        return 1
    response = session.dispatch({"method": "commit"})
    if not response.get("ok"):
        raise SplError(f"commit failed: {response.get('error')}: {response.get('message')}")
    payload = {k: response[k] for k in ("active", "locals", "globals")}
    written = generate_product(payload, _load_modules(args.corpus), args.out, args.name)
    sys.stdout.write(dumps(response) + "\n")
    for path in written:
        log.info("wrote %s", path)
    return 0


def main(argv: "list[str] | None" = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    runner = {
        "serve": _run_serve,
        "pipe": _run_pipe,
        "extract": _run_extract,
        "validate": _run_validate,
        "commit": _run_commit,
    }[args.mode]
    try:
        return runner(args)
    except (SplError, OSError, json.JSONDecodeError) as err:
        print(f"splkit: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
