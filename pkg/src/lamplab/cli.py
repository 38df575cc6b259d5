"""Command-line interface.

Exit codes: 0 ok / holds / representable, 1 fails / counterexample / not
representable, 2 usage or input error, 3 inconclusive.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .decide import DEFAULT_LENGTH_BUDGET, DEFAULT_NODE_BUDGET, bounds, decide, estimate_x, mantissa_exponent
from .diagram import BuildScript, Diagram, diagram_from_doc, enumerate_lattices, replay, structural_problems
from .gadgets import property_report
from .lamps import lamps_report
from .lattice import Lattice, con_lattice, jir_con_poset
from .order import MalformedInput, Poset
from .render import diagram_dot, diagram_svg

EXIT_OK, EXIT_FAIL, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class InputError(Exception):
    pass


def _threads() -> int:
    raw = os.environ.get("LAMPLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"LAMPLAB_THREADS must be an integer, got {raw!r}")


def _load(path: str) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        doc = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}")
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected a JSON object")
    return doc


def _diagram(path: str) -> Diagram:
    """A script document is replayed; a diagram export (with coords) is taken as is."""
    doc = _load(path)
    try:
        if "coords" in doc:
            return diagram_from_doc(doc)
        return replay(BuildScript.from_doc(doc))
    except MalformedInput as exc:
        raise InputError(str(exc))
    except ValueError as exc:  # precondition errors from replay
        raise InputError(f"cannot replay {path}: {exc}")


def _poset(path: str):
    doc = _load(path)
    try:
        p = Poset.from_doc(doc)
        return Lattice(p) if doc.get("kind") == "lattice" else p
    except MalformedInput as exc:
        raise InputError(str(exc))


def _emit(args, doc: dict, text: str) -> None:
    if args.format == "json":
        sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_build(args) -> int:
    d = _diagram(args.script)
    doc = d.to_doc()
    text = f"{len(d)} elements, length {d.length}, {len(d.covers)} covers"
    _emit(args, doc, text)
    return EXIT_OK


def cmd_render(args) -> int:
    d = _diagram(args.script)
    out = diagram_dot(d) if args.dot else diagram_svg(d, scale=args.scale)
    sys.stdout.write(out)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import verify_corpus, verify_many, verify_random

    if args.corpus is not None:
        rep = verify_corpus(args.corpus)
    elif args.random is not None:
        n, maxlen = args.random
        rep = verify_random(n, maxlen, args.seed)
    elif args.script:
        d = _diagram(args.script)
        probs = structural_problems(d)
        if probs:
            rep = {"ok": False, "diagrams": 1, "violations": {"structure": len(probs)},
                   "failures": [{"suite": "structure", "failures": probs}]}
        else:
            rep = verify_many([d])
    else:
        raise InputError("verify needs a script file, --corpus or --random")
    lines = [f"{rep['diagrams']} diagrams: {'pass' if rep['ok'] else 'FAIL'}"]
    for name, count in sorted(rep["violations"].items()):
        lines.append(f"  {name}: {count} violations")
    for f in rep["failures"][:20]:
        lines.append(f"  [{f['suite']}] {json.dumps(f.get('script'))}: {'; '.join(f['failures'])}")
    _emit(args, rep, "\n".join(lines))
    return EXIT_OK if rep["ok"] else EXIT_FAIL


def cmd_props(args) -> int:
    p = _poset(args.poset)
    if isinstance(p, Lattice):
        from .lattice import jir_poset

        p = jir_poset(p)
    rows = property_report(p, args.nmax, node_limit=args.nodes)
    text = "\n".join(
        f"{r['property']}_{r['n']}: {r['verdict']}" + (f" ({r['note']})" if "note" in r else "") for r in rows
    )
    _emit(args, {"report": rows}, text)
    if any(r["verdict"] == "fails" for r in rows):
        return EXIT_FAIL
    if any(r["verdict"] == "inconclusive" for r in rows):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_decide(args) -> int:
    t = _poset(args.poset)
    v = decide(t, length_budget=args.budget, node_budget=args.nodes, use_systems=args.systems)
    doc = v.to_doc()
    text = f"{v.outcome}" + (f": {v.reason}" if v.reason else "")
    if v.script is not None:
        text += "\nwitness " + json.dumps(v.script.to_doc(), sort_keys=True)
    _emit(args, doc, text)
    return {"representable": EXIT_OK, "not_representable": EXIT_FAIL}.get(v.outcome, EXIT_INCONCLUSIVE)


def cmd_estimate(args) -> int:
    if args.n < 1:
        raise InputError("n must be positive")
    x = estimate_x(args.n)
    mant, exp = mantissa_exponent(x)
    sci = f"{x:.2e}".replace("e+", "e").replace("E+", "e")
    _emit(args, {"n": args.n, "x": f"{x:.6e}", "mantissa": mant, "exponent": exp},
          f"x({args.n}) = {sci} = {mant}*10^{exp}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    if args.n < 1:
        raise InputError("n must be positive")
    b = bounds(args.n)
    _emit(args, {"n": args.n, **b}, "\n".join(f"{k}: {v}" for k, v in b.items()))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    census = enumerate_lattices(args.maxlen, workers=_threads())
    _emit(args, {"census": {str(k): v for k, v in census.items()}},
          "\n".join(f"length {k}: {v}" for k, v in census.items()))
    return EXIT_OK


def cmd_con(args) -> int:
    d = _diagram(args.script)
    p, _ = jir_con_poset(d.lattice)
    con = con_lattice(d.lattice)
    doc = {"jir_con": p.to_doc(), "con_size": con.n}
    text = f"Jir Con L: {len(p)} elements, covers {p.covers}\n|Con L| = {con.n}"
    _emit(args, doc, text)
    return EXIT_OK


def cmd_lamps(args) -> int:
    d = _diagram(args.script)
    rep = lamps_report(d)
    lines = []
    for lp in rep["lamps"]:
        lines.append(f"{lp['name']} {lp['kind']} peak {lp['peak']} tubes {len(lp['tubes'])} quadruple {lp['quadruple']}")
    lines.append(f"poset covers: {rep['poset']['covers']}")
    _emit(args, rep, "\n".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0, help="seed for random corpora")

    ap = argparse.ArgumentParser(prog="lamplab", description="Lamps and neon tubes of slim rectangular lattices.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("build", parents=[common], help="replay a build script")
    s.add_argument("script")
    s.set_defaults(fn=cmd_build)

    s = sub.add_parser("render", parents=[common], help="draw a diagram as SVG or DOT")
    s.add_argument("script")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--svg", action="store_true", default=True)
    g.add_argument("--dot", action="store_true")
    s.add_argument("--scale", type=int, default=60)
    s.set_defaults(fn=cmd_render)

    s = sub.add_parser("verify", parents=[common], help="run the invariant suites")
    s.add_argument("script", nargs="?")
    s.add_argument("--corpus", type=int, metavar="MAXLEN")
    s.add_argument("--random", type=int, nargs=2, metavar=("N", "MAXLEN"))
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("props", parents=[common], help="CTF_n and CDE_n verdicts for a poset")
    s.add_argument("poset")
    s.add_argument("--nmax", type=int, default=5)
    s.add_argument("--nodes", type=int, default=2_000_000)
    s.set_defaults(fn=cmd_props)

    s = sub.add_parser("decide", parents=[common], help="decide representability of a poset or distributive lattice")
    s.add_argument("poset")
    s.add_argument("--budget", type=int, default=DEFAULT_LENGTH_BUDGET, help="length budget")
    s.add_argument("--nodes", type=int, default=DEFAULT_NODE_BUDGET, help="node expansion budget")
    s.add_argument("--systems", action="store_true", help="enable the abstract-system filter")
    s.set_defaults(fn=cmd_decide)

    for name, fn, hlp in (("estimate", cmd_estimate, "the x(n) estimate"), ("bounds", cmd_bounds, "size bounds")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("n", type=int)
        s.set_defaults(fn=fn)

    s = sub.add_parser("enumerate", parents=[common], help="census of slim rectangular lattices")
    s.add_argument("maxlen", type=int)
    s.set_defaults(fn=cmd_enumerate)

    for name, fn, hlp in (("con", cmd_con, "join-irreducible congruences"), ("lamps", cmd_lamps, "lamp report")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("script")
        s.set_defaults(fn=fn)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.fn(args)
    except (InputError, MalformedInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
