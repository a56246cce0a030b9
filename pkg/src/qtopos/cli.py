"""Command-line front end.

Exit codes: 0 ok, 2 parse error, 3 invariant violation, 4 unknown name,
10 no global section.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import linops
from .contexts import ContextError, ContextPoset, build_poset
from .dasein import inner_proj, interval_table, outer_proj
from .io import ParseError, matrix_to_json, scalar_to_json
from .kscheck import WitnessError, find_global_section, verify_coloring_witness, witness_from_json
from .logic import CO, CONTRA, LogicError, embed_inner, embed_outer, heyting_implies, heyting_not
from .session import SessionSpec, UnknownNameError, load_session
from .states import StateError, truth

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVARIANT = 3
EXIT_NAME = 4
EXIT_NO_SECTION = 10

HEYTING_OPS = ("and", "or", "implies", "not", "em")


class UsageError(Exception):
    pass


def _has_dict(obj) -> bool:
    if isinstance(obj, dict):
        return True
    return isinstance(obj, list) and any(_has_dict(x) for x in obj)


def _render(obj, depth: int) -> str:
    if not _has_dict(obj):
        return json.dumps(obj, separators=(", ", ": "), sort_keys=True)
    pad, inner = "  " * depth, "  " * (depth + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_render(obj[k], depth + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    items = [inner + _render(x, depth + 1) for x in obj]
    return "[\n" + ",\n".join(items) + "\n" + pad + "]"


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, arrays without objects kept on one line."""
    return _render(obj, 0) + "\n"


def _global_flags() -> argparse.ArgumentParser:
    # SUPPRESS keeps a flag given before the subcommand from being reset after it
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--in", dest="infile", metavar="FILE", default=argparse.SUPPRESS)
    g.add_argument("--backend", choices=("rational", "float"), default=argparse.SUPPRESS)
    g.add_argument("--epsilon", type=float, default=argparse.SUPPRESS)
    g.add_argument("--json", dest="json_out", metavar="PATH", default=argparse.SUPPRESS)
    g.add_argument("--dot", dest="dot_out", metavar="PATH", default=argparse.SUPPRESS)
    g.add_argument("--parallel", type=int, metavar="N", default=argparse.SUPPRESS)
    return p


GLOBAL_DEFAULTS = {
    "infile": None,
    "backend": None,
    "epsilon": None,
    "json_out": None,
    "dot_out": None,
    "parallel": 1,
}


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="qtopos", parents=[common], description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("contexts", parents=[common], help="build the context poset")

    d = sub.add_parser("dasein", parents=[common], help="daseinise a projection or observable")
    what = d.add_mutually_exclusive_group(required=True)
    what.add_argument("--proj")
    what.add_argument("--obs")
    d.add_argument("--context")

    t = sub.add_parser("truth", parents=[common], help="truth value of a proposition in a state")
    t.add_argument("--state", required=True)
    t.add_argument("--prop", required=True)
    t.add_argument("--variance", choices=(CONTRA, CO), required=True)

    h = sub.add_parser("heyting", parents=[common], help="Heyting operations on embedded propositions")
    h.add_argument("--op", choices=HEYTING_OPS, required=True)
    h.add_argument("--prop", required=True)
    h.add_argument("--prop2")
    h.add_argument("--variance", choices=(CONTRA, CO), required=True)

    k = sub.add_parser("ks", parents=[common], help="search for a global section")
    k.add_argument("--witness", metavar="FILE")
    return parser


def _emit(args, payload: dict, out) -> None:
    text = dumps(payload)
    out.write(text)
    if args.json_out:
        Path(args.json_out).write_text(text)


def _write_dot(args, poset: ContextPoset, labels=None) -> None:
    if args.dot_out:
        Path(args.dot_out).write_text(poset.to_dot(labels))


def _session(args) -> SessionSpec:
    if not args.infile:
        raise UsageError("--in FILE is required for this command")
    return load_session(args.infile, args.backend)


def _poset(spec: SessionSpec) -> ContextPoset:
    return build_poset(spec.contexts, dim=spec.dimension, exact=spec.exact)


def _poset_context(poset: ContextPoset, name: str) -> int:
    if name not in poset.names:
        raise UnknownNameError(f"unknown context {name!r}")
    return poset.index(name)


def cmd_contexts(args, out) -> int:
    poset = _poset(_session(args))
    _write_dot(args, poset)
    _emit(args, poset.to_json(), out)
    return EXIT_OK


def cmd_dasein(args, out) -> int:
    spec = _session(args)
    poset = _poset(spec)
    if args.proj is not None:
        if args.context is None:
            raise UsageError("--proj needs --context")
        p = spec.proposition(args.proj)
        ctx = poset.contexts[_poset_context(poset, args.context)]
        payload = {
            "projection": args.proj,
            "context": ctx.name,
            "outer": matrix_to_json(outer_proj(p, ctx)),
            "inner": matrix_to_json(inner_proj(p, ctx)),
        }
    else:
        a = spec.observable(args.obs)
        which = [_poset_context(poset, args.context)] if args.context else range(len(poset))
        rows = []
        for i in which:
            ctx = poset.contexts[i]
            for lam, iv in enumerate(interval_table(a, ctx)):
                rows.append(
                    {
                        "observable": args.obs,
                        "context": ctx.name,
                        "character": lam,
                        "interval": [scalar_to_json(iv.lo), scalar_to_json(iv.hi)],
                    }
                )
        payload = {"intervals": rows}
    _emit(args, payload, out)
    return EXIT_OK


def cmd_truth(args, out) -> int:
    spec = _session(args)
    poset = _poset(spec)
    state = spec.state(args.state)
    p = spec.proposition(args.prop)
    report, tv = truth(state, p, poset, args.variance)
    measure = {n: scalar_to_json(v) for n, v in report.as_dict().items()}
    labels = {n: ("true" if n in tv.names() else "false") for n in poset.names}
    _write_dot(args, poset, labels)
    _emit(
        args,
        {
            "state": args.state,
            "projection": args.prop,
            "variance": args.variance,
            "members": sorted(tv.names()),
            "measure": measure,
        },
        out,
    )
    return EXIT_OK


def cmd_heyting(args, out) -> int:
    spec = _session(args)
    poset = _poset(spec)
    embed = embed_outer if args.variance == CONTRA else embed_inner
    s = embed(spec.proposition(args.prop), poset)
    binary = args.op in ("and", "or", "implies")
    if binary:
        if args.prop2 is None:
            raise UsageError(f"--op {args.op} needs --prop2")
        t = embed(spec.proposition(args.prop2), poset)
    if args.op == "and":
        result = s & t
    elif args.op == "or":
        result = s | t
    elif args.op == "implies":
        result = heyting_implies(s, t)
    elif args.op == "not":
        result = heyting_not(s)
    else:
        result = s | heyting_not(s)
    operands = [args.prop, args.prop2] if binary else [args.prop]
    _write_dot(args, poset, result.dot_labels())
    payload = result.to_json()
    payload.update(op=args.op, operands=operands, is_top=result == type(result).top(poset))
    _emit(args, payload, out)
    return EXIT_OK


def cmd_ks(args, out) -> int:
    if args.witness:
        try:
            data = json.loads(Path(args.witness).read_text())
        except json.JSONDecodeError as err:
            raise ParseError(f"invalid JSON: {err.msg}", f"{args.witness}:{err.lineno}:{err.colno}") from None
        except OSError as err:
            raise ParseError(str(err), args.witness) from None
        witness = witness_from_json(data)
        coloring = verify_coloring_witness(witness.basis_projections())
        poset = witness.poset()
        result = find_global_section(poset, parallel=args.parallel)
        if coloring.no_coloring == result.found:
            raise AssertionError("coloring search and section search disagree")
    else:
        poset = _poset(_session(args))
        result = find_global_section(poset, parallel=args.parallel)
    _write_dot(args, poset)
    _emit(args, result.to_json(), out)
    return EXIT_OK if result.found else EXIT_NO_SECTION


COMMANDS = {
    "contexts": cmd_contexts,
    "dasein": cmd_dasein,
    "truth": cmd_truth,
    "heyting": cmd_heyting,
    "ks": cmd_ks,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for key, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    previous = linops.get_epsilon()
    try:
        if args.epsilon is not None:
            linops.set_epsilon(args.epsilon)
        return COMMANDS[args.command](args, out)
    except (ParseError, UsageError) as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except UnknownNameError as exc:
        err.write(f"unknown name: {exc}\n")
        return EXIT_NAME
    except (linops.LinopsError, ContextError, StateError, LogicError, WitnessError) as exc:
        err.write(f"invariant violation: {exc}\n")
        return EXIT_INVARIANT
    finally:
        linops.set_epsilon(previous)


if __name__ == "__main__":
    sys.exit(main())
