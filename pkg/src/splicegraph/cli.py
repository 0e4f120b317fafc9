"""Command-line front end.

Every command takes DSL expressions (see ``splicegraph.dsl``); an argument of
the form ``@path.json`` loads a diagram in the JSON exchange format instead.
Exit status: 0 success, 1 invalid input, 2 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Sequence

from splicegraph import __version__, diagram, dsl, engine, invariants
from splicegraph.atomdb import AtomDatabase, load, seed_path
from splicegraph.diagram import SpliceDiagram
from splicegraph.errors import AtomValidationError, ParseError, SpliceError

ENV_DB = "SPLICEGRAPH_DB"
ENV_SEED = "SPLICEGRAPH_SEED_DB"
ENV_FORMAT = "SPLICEGRAPH_FORMAT"


def _load_db(args: argparse.Namespace) -> AtomDatabase:
    db = load(args.seed_db)
    for path in args.db:
        db = db.merged(load(path))
    return db


def _diagram(arg: str, db: AtomDatabase) -> SpliceDiagram:
    if arg.startswith("@"):
        return diagram.from_json(Path(arg[1:]).read_text(encoding="utf-8"), db)
    return dsl.evaluate_text(arg, db)


# ---------------------------------------------------------------------------
# commands: each returns (text, json-able payload)


def cmd_validate(exprs: list[str], db: AtomDatabase) -> tuple[str, Any]:
    d = _diagram(exprs[0], db)
    local = diagram.validate_local_brunnian(d, db)
    lines = [f"valid: {str(local.valid).lower()}"]
    payload: dict[str, Any] = {"valid": local.valid, "violations": [list(v) for v in local.violations]}
    lines += [f"  {v}" for v in local.violations]
    if len(d.externals) == 1:
        report = engine.validate_knot_tree(d, db)
        lines.append(f"knot-tree: {report}")
        lines += [f"  item {i}: {msg}" for i, msg in report.violations]
        payload["knot_tree"] = {"ok": report.ok, "violations": [list(v) for v in report.violations]}
    return "\n".join(lines), payload


def cmd_canon(exprs: list[str], db: AtomDatabase) -> tuple[str, Any]:
    text = diagram.canonical_text(_diagram(exprs[0], db), db)
    return text, {"canonical": text}


def cmd_eq(exprs: list[str], db: AtomDatabase) -> tuple[str, Any]:
    same = diagram.equivalent(_diagram(exprs[0], db), _diagram(exprs[1], db), db)
    return f"equivalent: {str(same).lower()}", {"equivalent": same}


def cmd_alexander(exprs: list[str], db: AtomDatabase) -> tuple[str, Any]:
    poly = invariants.alexander(_diagram(exprs[0], db), db)
    return str(poly), {"alexander": str(poly), "coefficients": poly.to_json()}


def cmd_gromov(exprs: list[str], db: AtomDatabase) -> tuple[str, Any]:
    norm = invariants.gromov_norm(_diagram(exprs[0], db), db)
    return str(norm), {"gromov_norm": str(norm)}


def cmd_brunnian(exprs: list[str], db: AtomDatabase) -> tuple[str, Any]:
    ub = diagram.global_brunnian(_diagram(exprs[0], db), db)
    members = [sorted(s) for s in ub.sorted_members() if s]
    text = "\n".join("{" + ", ".join(m) + "}" for m in members) or "(none)"
    return text, {"strong_brunnian": members}


def cmd_export_dot(exprs: list[str], db: AtomDatabase) -> tuple[str, Any]:
    dot = diagram.to_dot(_diagram(exprs[0], db))
    return dot.rstrip("\n"), {"dot": dot}


def cmd_export_json(exprs: list[str], db: AtomDatabase) -> tuple[str, Any]:
    data = diagram.to_json(_diagram(exprs[0], db))
    return json.dumps(data, indent=2, ensure_ascii=False), data


COMMANDS: dict[str, tuple[int, Callable[[list[str], AtomDatabase], tuple[str, Any]]]] = {
    "validate": (1, cmd_validate),
    "canon": (1, cmd_canon),
    "eq": (2, cmd_eq),
    "alexander": (1, cmd_alexander),
    "gromov": (1, cmd_gromov),
    "brunnian": (1, cmd_brunnian),
    "export-dot": (1, cmd_export_dot),
    "export-json": (1, cmd_export_json),
}


def _run_one(name: str, exprs: list[str], db: AtomDatabase, fmt: str) -> tuple[int, str]:
    """Run one command; returns (exit code, output text without trailing newline)."""
    _, fn = COMMANDS[name]
    try:
        text, payload = fn(exprs, db)
    except ParseError as exc:
        return 1, _error(fmt, exc.code, exc.message, line=exc.line, col=exc.col)
    except SpliceError as exc:
        code = 2 if exc.code == "INTERNAL" else 1
        return code, _error(fmt, exc.code, exc.message)
    except AtomValidationError as exc:
        return 1, _error(fmt, "ATOM_VALIDATION", str(exc))
    except (OSError, ValueError) as exc:
        return 1, _error(fmt, "BAD_INPUT", str(exc))
    except Exception as exc:  # invariant failure inside the library
        return 2, _error(fmt, "INTERNAL", f"{type(exc).__name__}: {exc}")
    if fmt == "json":
        return 0, json.dumps(payload, ensure_ascii=False, sort_keys=True)
    return 0, text


def _error(fmt: str, code: str, message: str, **extra: Any) -> str:
    if fmt == "json":
        return json.dumps({"error": code, "message": message, **extra}, ensure_ascii=False)
    return f"error: {code}: {message}"


def _batch_lines(path: str, arity: int) -> list[list[str]]:
    jobs = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        jobs.append(line.split("\t") if arity > 1 else [line])
    return jobs


def _enumerate(args: argparse.Namespace, db: AtomDatabase) -> int:
    atoms = None if args.atoms is None else [a for a in args.atoms.split(",") if a]
    trees = engine.enumerate_knot_trees(
        args.max_vertices, args.bound, atoms=atoms, keychains=not args.no_keychains, db=db
    )
    for t in trees:
        text = diagram.canonical_text(t, db)
        if args.format == "json":
            text = json.dumps({"canonical": text, "diagram": diagram.to_json(t)}, sort_keys=True)
        sys.stdout.write(text + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    env_db = [p for p in os.environ.get(ENV_DB, "").split(os.pathsep) if p]

    def add_common(p: argparse.ArgumentParser, top: bool) -> None:
        # options may appear before or after the command; the top level holds the defaults
        def dflt(value: Any) -> Any:
            return value if top else argparse.SUPPRESS

        p.add_argument(
            "--db", action="append", default=dflt(None),
            help=f"extra atom database (repeatable, later files override; default from ${ENV_DB})",
        )
        p.add_argument(
            "--seed-db", default=dflt(os.environ.get(ENV_SEED) or str(seed_path())),
            help="base atom database (default: the bundled seed)",
        )
        p.add_argument(
            "--format", choices=["text", "json"], default=dflt(os.environ.get(ENV_FORMAT, "text")),
        )

    common = argparse.ArgumentParser(add_help=False)
    add_common(common, top=False)
    parser = argparse.ArgumentParser(prog="splicegraph", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"splicegraph {__version__}")
    add_common(parser, top=True)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (arity, fn) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=(fn.__doc__ or name))
        p.add_argument("exprs", nargs="*", metavar="EXPR")
        p.add_argument("--batch", help="file with one input per line (tab-separated pairs for eq)")
        p.add_argument("--jobs", type=int, default=4, help="worker threads for --batch")
    p = sub.add_parser("enumerate", parents=[common], help="list knot trees")
    p.add_argument("--max-vertices", type=int, default=2)
    p.add_argument("--bound", type=int, default=3, help="bound on |p|, |q|")
    p.add_argument("--atoms", default=None, help="comma-separated atom names (default: all)")
    p.add_argument("--no-keychains", action="store_true")
    parser.set_defaults(env_db=env_db)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.db is None:
        args.db = args.env_db
    try:
        db = _load_db(args)
    except (AtomValidationError, OSError) as exc:
        sys.stdout.write(_error(args.format, "ATOM_DB", str(exc)) + "\n")
        return 1
    if args.command == "enumerate":
        try:
            return _enumerate(args, db)
        except SpliceError as exc:
            sys.stdout.write(_error(args.format, exc.code, exc.message) + "\n")
            return 1
    arity, _ = COMMANDS[args.command]
    if args.batch:
        try:
            jobs = _batch_lines(args.batch, arity)
        except OSError as exc:
            sys.stdout.write(_error(args.format, "BAD_INPUT", str(exc)) + "\n")
            return 1
    else:
        if len(args.exprs) != arity:
            parser.error(f"{args.command} takes {arity} expression(s)")
        jobs = [args.exprs]
    bad = [j for j in jobs if len(j) != arity]
    if bad:
        sys.stdout.write(_error(args.format, "BAD_INPUT", f"expected {arity} field(s): {bad[0]}") + "\n")
        return 1
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(lambda j: _run_one(args.command, j, db, args.format), jobs))
    status = 0
    for code, text in results:
        sys.stdout.write(text + "\n")
        status = max(status, code)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
