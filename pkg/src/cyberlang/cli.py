"""``cyl`` command-line front end.

Exit codes are stable across commands: 0 success, 1 semantic or validation
failure, 2 environment or IO failure, 3 unresolved ambiguity.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import __version__
from .canonical import pretty_json
from .compiler import Dialect, TargetProfile, compile_statement, validate_against_dialect
from .core.signs import SignRegistry
from .core.values import Identifier
from .errors import AmbiguityError, CyberlangError, IoFailure, ScriptError
from .fdsg import analyze_document, print_canonical
from .ids import IdGenerator
from .resources import data_path
from .semantics import ContextSnapshot, MappingRegistry, Verdict, check_fusion, evaluate_meaning

EXIT_OK, EXIT_FAIL, EXIT_IO, EXIT_AMBIGUOUS = 0, 1, 2, 3

BUNDLED = {
    "registry": "signs.json",
    "mappings": "mappings.json",
    "dialect": "emergency-response.dialect.json",
}
ENV = {"registry": "CYL_REGISTRY", "mappings": "CYL_MAPPINGS", "dialect": "CYL_DIALECT", "context": "CYL_CONTEXT"}
ALL_TARGETS = [t.value for t in TargetProfile]

log = logging.getLogger("cyberlang.cli")


class _Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        self.code = code
        super().__init__(message)


@dataclass
class CliConfig:
    registry: Path
    mappings: Path
    dialect: Path
    context: Optional[Path]
    seed: int = 0
    output_format: str = "text"

    def signs(self) -> SignRegistry:
        return _load(SignRegistry.load, self.registry, "sign registry")

    def mapping_registry(self) -> MappingRegistry:
        return _load(MappingRegistry.load, self.mappings, "mapping registry")

    def load_dialect(self) -> Dialect:
        return _load(Dialect.load, self.dialect, "dialect")

    def load_context(self, override: Optional[str] = None) -> ContextSnapshot:
        path = Path(override) if override else self.context
        if path is None:
            return ContextSnapshot()
        return _load(ContextSnapshot.load, path, "context")


def _load(loader, path: Path, what: str):
    try:
        return loader(path)
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot read {what} {path}: {exc.strerror or exc}") from None
    except (CyberlangError, ValueError) as exc:
        raise _Exit(EXIT_FAIL, f"invalid {what} {path}: {exc}") from None


def build_config(args: argparse.Namespace, environ=None) -> CliConfig:
    """Flags win over CYL_* variables, which win over bundled defaults."""
    environ = os.environ if environ is None else environ
    chosen = {}
    for name, var in ENV.items():
        value = getattr(args, name, None) or environ.get(var) or None
        if value is None and name in BUNDLED:
            value = str(data_path(BUNDLED[name]))
        if value is not None and not Path(value).is_file():
            raise _Exit(EXIT_IO, f"{name} file not found: {value}")
        chosen[name] = Path(value) if value is not None else None
    seed = getattr(args, "seed", None)
    if seed is None:
        seed = 0
    if seed < 0:
        raise _Exit(EXIT_FAIL, "--seed must be a non-negative integer")
    return CliConfig(seed=seed, output_format=getattr(args, "format", None) or "text", **chosen)


# -- shared helpers ------------------------------------------------------------

def _read_source(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise _Exit(EXIT_IO, f"file not found: {path}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise _Exit(EXIT_IO, f"cannot read {path}: {exc}") from None


def _statements(path: str, cfg: CliConfig):
    """Parsed statements of a document; diagnostics go to stderr, errors exit 1."""
    results = analyze_document(_read_source(path), ids=IdGenerator(cfg.seed))
    failed = False
    for r in results:
        for d in r.diagnostics:
            print(f"{path}:{d}", file=sys.stderr)
        failed = failed or not r.ok
    if not results:
        print(f"{path}: no statements found", file=sys.stderr)
        failed = True
    return [r.statement for r in results if r.ok], failed


def _emit_json(obj) -> None:
    sys.stdout.write(pretty_json(obj))


# -- commands ------------------------------------------------------------------

def cmd_parse(args, cfg: CliConfig) -> int:
    stmts, failed = _statements(args.file, cfg)
    if cfg.output_format == "json":
        _emit_json([print_canonical(s) for s in stmts])
    else:
        for s in stmts:
            print(print_canonical(s))
    return EXIT_FAIL if failed else EXIT_OK


def _check_one(stmt, signs: SignRegistry, mappings: MappingRegistry, dialect: Dialect) -> dict:
    violations = [str(v) for v in validate_against_dialect(stmt, dialect)]
    fusion = []
    seen = set()
    for _, _, value in stmt.iter_slots():
        if not isinstance(value, Identifier) or value.text in seen:
            continue
        seen.add(value.text)
        for sign in signs.lookup(value.text):
            rep = check_fusion(mappings, sign)
            fusion.append({"digest": sign.digest, **rep.to_dict()})
    verdicts = {v for f in fusion for v in f["verdicts"].values()}
    if violations:
        status = "violations"
    elif Verdict.INCOHERENT.value in verdicts:
        status = "incoherent"
    elif Verdict.UNVERIFIABLE.value in verdicts:
        status = "unverifiable"
    else:
        status = "coherent"
    return {"statement": print_canonical(stmt), "status": status,
            "dialect_violations": violations, "fusion": fusion}


def cmd_check(args, cfg: CliConfig) -> int:
    signs, mappings, dialect = cfg.signs(), cfg.mapping_registry(), cfg.load_dialect()
    stmts, failed = _statements(args.file, cfg)
    reports = [_check_one(s, signs, mappings, dialect) for s in stmts]
    if cfg.output_format == "json":
        _emit_json(reports)
    else:
        for rep in reports:
            print(rep["statement"])
            print(f"  status: {rep['status']}")
            for v in rep["dialect_violations"]:
                print(f"  dialect: {v}")
            for f in rep["fusion"]:
                for dim, verdict in f["verdicts"].items():
                    print(f"  fusion {f['lambda']} {dim}: {verdict}")
    ok = not failed and all(r["status"] == "coherent" for r in reports)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_compile(args, cfg: CliConfig) -> int:
    dialect = cfg.load_dialect()
    stmts, failed = _statements(args.file, cfg)
    targets = ALL_TARGETS if args.target == "all" else [args.target]
    out = []
    for stmt in stmts:
        forms = {}
        for t in targets:
            try:
                forms[t] = compile_statement(stmt, t, dialect)
            except CyberlangError as exc:
                print(f"{args.file}: {t}: {exc.code}: {exc}", file=sys.stderr)
                failed = True
        out.append(forms)
    if cfg.output_format == "json":
        payload = [{t: f.payload for t, f in forms.items()} for forms in out]
        _emit_json(payload[0][targets[0]] if len(payload) == 1 and len(targets) == 1 and payload[0] else payload)
    else:
        chunks = []
        for forms in out:
            for t, f in forms.items():
                text = f.render()
                if len(targets) > 1:
                    text = f"== {t} ==\n{text}"
                chunks.append(text.rstrip("\n") + "\n")
        sys.stdout.write("\n".join(chunks))
    return EXIT_FAIL if failed else EXIT_OK


def _render_meaning(m) -> str:
    lines = [f"statement {m.statement_id}"]
    for dim, slots in m.to_dict()["resolved"].items():
        for key, value, origin in slots:
            lines.append(f"  {dim}.{key} = {value} ({origin})")
    lines.append("  weights: " + ", ".join(f"{d}={w:.4f}" for d, w in m.weights.to_dict().items()))
    for c in m.conflicts:
        lines.append(f"  conflict {c.dimension.value}.{c.key}: expression={c.to_dict()['expression']} "
                     f"context={c.to_dict()['context']} winner={c.winner}")
    for lam, sign in sorted(m.sign_bindings.items()):
        lines.append(f"  sign {lam} -> {sign.digest[:16]}")
    return "\n".join(lines) + "\n"


def cmd_resolve(args, cfg: CliConfig) -> int:
    signs, mappings = cfg.signs(), cfg.mapping_registry()
    ctx = cfg.load_context(args.context)
    stmts, failed = _statements(args.file, cfg)
    results, ambiguous = [], False
    for stmt in stmts:
        try:
            results.append(evaluate_meaning(stmt, ctx, signs, mappings))
        except AmbiguityError as amb:
            ambiguous = True
            results.append(amb)
    if cfg.output_format == "json":
        _emit_json([_ambiguity_dict(r) if isinstance(r, AmbiguityError) else r.to_dict() for r in results])
    else:
        for r in results:
            sys.stdout.write(_render_ambiguity(r) if isinstance(r, AmbiguityError) else _render_meaning(r))
    if failed:
        return EXIT_FAIL
    return EXIT_AMBIGUOUS if ambiguous else EXIT_OK


def _ambiguity_dict(amb: AmbiguityError) -> dict:
    return {"ambiguity": {
        "statement_id": amb.statement_id, "dimension": amb.dimension.value, "key": amb.key,
        "lambda": amb.lam, "candidates": [c.to_record() for c in amb.candidates]}}


def _render_ambiguity(amb: AmbiguityError) -> str:
    lines = [f"ambiguous: {amb}"]
    for c in amb.candidates:
        lines.append(f"  candidate {c.digest[:16]}: " + ", ".join(
            f"{d.value}={c.signified(d)}" for d in sorted(c.dyads, key=lambda d: "PSTC".index(d.value))))
    return "\n".join(lines) + "\n"


def cmd_simulate(args, cfg: CliConfig) -> int:
    from .bus import corpus_text, export_corpus, load_scenario, run_scenario

    if not Path(args.scenario).is_file():
        raise _Exit(EXIT_IO, f"file not found: {args.scenario}")
    try:
        script = load_scenario(args.scenario)
    except ScriptError as exc:
        raise _Exit(EXIT_FAIL, f"{args.scenario}: {exc}") from None
    seed = args.seed if getattr(args, "seed", None) is not None else None
    try:
        result = run_scenario(script, seed=seed)
    except ScriptError as exc:
        raise _Exit(EXIT_FAIL, f"{args.scenario}: {exc}") from None
    if args.out:
        export_corpus(result.corpus, args.out)
    else:
        sys.stdout.write(corpus_text(result.corpus))
    for x in result.expectations:
        print(str(x), file=sys.stderr)
    failed = [x for x in result.expectations if not x.passed]
    if failed:
        print(f"{len(failed)} expectation(s) failed", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _agent_profiles(path: Optional[str]):
    from .bus import AgentKind, AgentProfile

    if path:
        data = _load(lambda p: json.loads(Path(p).read_text(encoding="utf-8")), Path(path), "agent list")
    else:
        data = json.loads(data_path("emergency-response.scenario.json").read_text(encoding="utf-8"))["agents"]
    try:
        return [AgentProfile(a["id"], AgentKind(a["kind"]), a.get("dialect"), a.get("intents", {})) for a in data]
    except (KeyError, TypeError, ValueError, CyberlangError) as exc:
        raise _Exit(EXIT_FAIL, f"invalid agent list: {exc}") from None


def cmd_serve(args, cfg: CliConfig) -> int:
    from .bus import Broker, BrokerServer, parse_addr

    try:
        host, port = parse_addr(args.addr)
    except ValueError as exc:
        raise _Exit(EXIT_FAIL, str(exc)) from None
    broker = Broker(cfg.signs(), cfg.mapping_registry(), cfg.load_dialect(),
                    context=cfg.load_context(), ids=IdGenerator(cfg.seed))
    for profile in _agent_profiles(args.agents):
        try:
            broker.register(profile)
        except ValueError as exc:
            raise _Exit(EXIT_FAIL, str(exc)) from None
    server = BrokerServer(broker, args.corpus)

    def ready(srv):
        sock = srv._server.sockets[0].getsockname()
        print(f"listening on {sock[0]}:{sock[1]}", file=sys.stderr, flush=True)

    asyncio.run(server.serve_until_stopped(host, port, ready=ready))
    return EXIT_OK


def cmd_corpus_validate(args, cfg: CliConfig) -> int:
    from .bus import validate_corpus

    if not Path(args.corpus_file).is_file():
        raise _Exit(EXIT_IO, f"file not found: {args.corpus_file}")
    problems = validate_corpus(args.corpus_file)
    if cfg.output_format == "json":
        _emit_json({"valid": not problems, "problems": [{"line": n, "problem": p} for n, p in problems]})
    else:
        for n, p in problems:
            print(f"{args.corpus_file}:{n}: {p}", file=sys.stderr)
        if not problems:
            print(f"{args.corpus_file}: valid")
    return EXIT_FAIL if problems else EXIT_OK


# -- argument parsing ----------------------------------------------------------

def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--registry", default=default, help="sign registry JSON (env CYL_REGISTRY)")
    parser.add_argument("--mappings", default=default, help="mapping tables JSON (env CYL_MAPPINGS)")
    parser.add_argument("--dialect", default=default, help="dialect JSON (env CYL_DIALECT)")
    parser.add_argument("--context", default=default, help="context snapshot JSON (env CYL_CONTEXT)")
    parser.add_argument("--seed", type=int, default=default, help="id generator seed (default 0)")
    parser.add_argument("--format", choices=("text", "json"), default=default, help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cyl", description="Cyberlanguage toolkit")
    parser.add_argument("--version", action="version", version=f"cyl {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="print canonical forms")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("check", parents=[common], help="dialect and four-aspect coherence report")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("compile", parents=[common], help="compile to one or all targets")
    p.add_argument("file")
    p.add_argument("--target", choices=ALL_TARGETS + ["all"], default="machine-json")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("resolve", parents=[common], help="evaluate meaning against a context")
    p.add_argument("file")
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("simulate", parents=[common], help="run a scenario and export its corpus")
    p.add_argument("scenario")
    p.add_argument("--out", help="corpus output path (default: standard output)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", parents=[common], help="run a broker over TCP")
    p.add_argument("--addr", default="127.0.0.1:7451")
    p.add_argument("--corpus", help="append corpus records to this file")
    p.add_argument("--agents", help="JSON list of agent declarations")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("corpus", help="corpus utilities")
    csub = p.add_subparsers(dest="corpus_command", required=True)
    v = csub.add_parser("validate", parents=[common], help="validate a corpus export")
    v.add_argument("corpus_file")
    v.set_defaults(func=cmd_corpus_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = build_config(args)
        return args.func(args, cfg)
    except _Exit as exc:
        if str(exc):
            print(f"cyl: {exc}", file=sys.stderr)
        return exc.code
    except AmbiguityError as exc:
        print(f"cyl: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except (IoFailure, OSError) as exc:
        print(f"cyl: {exc}", file=sys.stderr)
        return EXIT_IO
    except CyberlangError as exc:
        print(f"cyl: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
