"""Command-line entry point.

Exit codes: 0 on success, 1 on a domain error (message on stderr), 2 on a
usage error.  Every subcommand prints deterministic output; ``--json``
switches to machine-readable JSON.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .backforth import bf_equiv, bf_table, rho, scott_rank
from .eftypes import EFError, ef_type, game_solver
from .formulas import Evaluator, FormulaError, from_json, from_sexpr, qr, to_json, to_sexpr
from .kb import classify_pipeline, kb_as_structure, kb_compare, kb_order, load_tree
from .normal import harrison, normalize, term_equal
from .scott import css, mod_check, phi_formula
from .structures import (BINARY, atomic_type, brute_force_iso, load_structure,
                         random_structure, serialize_structure)
from .terms import Fin, parse_term

__all__ = ["main", "build_parser"]


class DomainError(Exception):
    pass


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(", ", ": "))


def _ints(text: str) -> tuple:
    """``"0,2"`` -> ``(0, 2)``; the empty string is the empty tuple."""
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _seq(text: str) -> tuple:
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        raise argparse.ArgumentTypeError(f"expected a JSON array such as [0,1], got {text!r}") from None
    if not isinstance(value, list) or not all(isinstance(x, int) and x >= 0 for x in value):
        raise argparse.ArgumentTypeError(f"expected a JSON array of naturals, got {text!r}")
    return tuple(value)


def _assignment(text: str) -> tuple:
    try:
        var, elem = text.split("=")
        return int(var), int(elem)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected VAR=ELEMENT, got {text!r}") from None


def _read_formula(arg: str):
    text = Path(arg).read_text(encoding="utf-8") if os.path.isfile(arg) else arg
    if text.lstrip().startswith("{"):
        return from_json(text)
    return from_sexpr(text)


def _seq_text(s) -> str:
    return json.dumps(list(s), separators=(",", ":"))


# --- subcommands ------------------------------------------------------------

def cmd_scott(args, out):
    M = load_structure(args.file)
    if args.compare:
        N = load_structure(args.compare)
        iso = brute_force_iso(M, N)
        doc = {"isomorphism": None if iso is None else list(iso)}
        if args.tuples is not None:
            a, b = args.tuples
            if len(a) != len(b):
                raise DomainError("the two tuples must have the same length")
            table = bf_table(M, N)
            alpha = table.stable_at if args.alpha is None else args.alpha
            doc.update({"alpha": alpha, "equivalent": bf_equiv(M, a, N, b, alpha),
                        "stable_at": table.stable_at})
        if args.json:
            out.write(_dumps(doc) + "\n")
        else:
            out.write("isomorphism: " + ("none" if iso is None else " ".join(map(str, iso))) + "\n")
            if "equivalent" in doc:
                out.write(f"~_{doc['alpha']}: {'true' if doc['equivalent'] else 'false'}\n")
        return
    if args.tuple is not None:
        k, lits = atomic_type(M, args.tuple)
        doc = {"tuple": list(args.tuple), "rho": rho(M, args.tuple),
               "atomic_type": [_atom_text(a) for a in lits]}
        out.write(_dumps(doc) + "\n")
        return
    out.write(scott_rank(M).to_json() + "\n")


def _atom_text(atom) -> str:
    def term(t):
        return f"v{t[1]}" if t[0] == "v" else str(t[1])

    if atom[0] == "=":
        return f"{term(atom[1])}={term(atom[2])}"
    return f"{atom[0]}({','.join(term(t) for t in atom[1:])})"


def cmd_css(args, out):
    M = load_structure(args.file)
    if args.phi is not None:
        alpha = args.alpha if args.alpha is not None else scott_rank(M).r_rank
        f = phi_formula(M, args.phi, alpha)
    else:
        f = css(M)
    if args.json:
        doc = json.loads(to_json(f))
        doc["qr"] = qr(f)
        out.write(json.dumps(doc, separators=(",", ":")) + "\n")
    else:
        out.write(to_sexpr(f))


def cmd_sat(args, out):
    f = _read_formula(args.formula)
    structures = [load_structure(p) for p in args.files]
    asg = dict(args.assign or ())
    if asg or f.free:
        results = [Evaluator(N).holds(f, asg) for N in structures]
    else:
        results = mod_check(f, structures)
    if args.json:
        if len(results) == 1:
            out.write(_dumps({"holds": results[0]}) + "\n")
        else:
            out.write(_dumps({"results": [{"file": p, "holds": r} for p, r in zip(args.files, results)]}) + "\n")
        return
    for p, r in zip(args.files, results):
        word = "true" if r else "false"
        out.write(word + "\n" if len(results) == 1 else f"{p}\t{word}\n")


def cmd_ef(args, out):
    t1, t2 = parse_term(args.t1), parse_term(args.t2)
    n = args.rounds
    x, y = ef_type(t1, n), ef_type(t2, n)
    doc = {"rounds": n, "equivalent": x == y}
    if args.solver:
        if not (isinstance(t1, Fin) and isinstance(t2, Fin)):
            raise DomainError("--solver needs two finite orders (natural-number terms)")
        doc["solver"] = game_solver(t1.n, t2.n, n)
    if args.json:
        out.write(_dumps(doc) + "\n")
    else:
        out.write(("equivalent" if doc["equivalent"] else "not equivalent") + "\n")
        if args.solver:
            out.write("solver: " + ("equivalent" if doc["solver"] else "not equivalent") + "\n")
    if args.dump:
        out.write(x.dump())
        out.write(y.dump())


def cmd_norm(args, out):
    t = parse_term(args.term)
    if args.harrison:
        t = harrison(t)
    nf = normalize(t)
    doc = {"normal_form": nf.text}
    if args.compare is not None:
        doc["verdict"] = str(term_equal(t, parse_term(args.compare)))
    if args.json:
        out.write(_dumps(doc) + "\n")
    else:
        out.write(nf.text + "\n")
        if "verdict" in doc:
            out.write(doc["verdict"] + "\n")


def cmd_kb(args, out):
    if args.compare:
        s, t = args.compare
        r = kb_compare(s, t)
        out.write((_dumps({"compare": r}) if args.json else r) + "\n")
        return
    if not args.tree:
        raise _Usage("kb needs --tree FILE or --compare S T")
    T = load_tree(args.tree, close=args.close)
    order = kb_order(T)
    if args.as_structure:
        Path(args.as_structure).write_text(serialize_structure(kb_as_structure(T)) + "\n", encoding="utf-8")
    if args.json:
        out.write(json.dumps({"order": [list(s) for s in order]}, separators=(",", ":")) + "\n")
    else:
        out.writelines(_seq_text(s) + "\n" for s in order)


def cmd_classify(args, out):
    T = load_tree(args.tree, close=args.close)
    nf = classify_pipeline(T)
    out.write((_dumps({"size": len(T), "normal_form": nf.text}) if args.json else nf.text) + "\n")


def _corpus_files(directory) -> list:
    d = Path(directory)
    if not d.is_dir():
        raise DomainError(f"{directory}: not a directory")
    return sorted(d.glob("*.json"))


def cmd_corpus_generate(args, out):
    seed = args.seed
    if args.count < 0 or args.size < 1 or not 0.0 <= args.density <= 1.0:
        raise DomainError("need count >= 0, size >= 1 and density in [0, 1]")
    d = Path(args.dir)
    d.mkdir(parents=True, exist_ok=True)
    names = []
    for i in range(args.count):
        M = random_structure(seed + i, args.size, BINARY, args.density)
        name = f"s{i:04d}.json"
        (d / name).write_text(serialize_structure(M) + "\n", encoding="utf-8")
        names.append(name)
    if args.json:
        out.write(_dumps({"written": names}) + "\n")
    else:
        out.write(f"wrote {len(names)} structures to {args.dir}\n")


def cmd_corpus_css_iso(args, out):
    files = _corpus_files(args.dir)
    structures = [load_structure(p) for p in files]
    sigs = {M.signature for M in structures}
    if len(sigs) > 1:
        raise DomainError("corpus structures must share one signature")
    sentences = [css(M) for M in structures]
    evaluators = [Evaluator(N) for N in structures]
    agree, bad = 0, []
    for i, M in enumerate(structures):
        for j, N in enumerate(structures):
            sat = evaluators[j].holds(sentences[i])
            iso = brute_force_iso(M, N) is not None
            if sat == iso:
                agree += 1
            else:
                bad.append({"M": files[i].name, "N": files[j].name, "css": sat, "iso": iso})
    doc = {"structures": len(structures), "pairs": len(structures) ** 2, "agree": agree,
           "disagreements": bad}
    if args.json:
        out.write(_dumps(doc) + "\n")
        return
    out.write(f"structures: {doc['structures']}\npairs: {doc['pairs']}\nagree: {agree}\n"
              f"disagree: {len(bad)}\n")
    for b in bad:
        out.write(f"  {b['M']} -> {b['N']}: css={b['css']} iso={b['iso']}\n")


# --- parser -----------------------------------------------------------------

class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable JSON output")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for randomized generation (default 0)")

    p = argparse.ArgumentParser(prog="scottkit", parents=[common],
                                description="Scott analysis, order terms and Kleene-Brouwer trees.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("scott", parents=[common], help="rank report of a structure")
    s.add_argument("file")
    s.add_argument("--tuple", type=_ints, help="report rho and atomic type of one tuple, e.g. 0,2")
    s.add_argument("--compare", metavar="FILE", help="compare with a second structure")
    s.add_argument("--tuples", nargs=2, type=_ints, metavar=("A", "B"),
                   help="with --compare: test A ~_alpha B")
    s.add_argument("--alpha", type=int, help="level for --tuples (default: stabilization level)")
    s.set_defaults(func=cmd_scott)

    s = sub.add_parser("css", parents=[common], help="canonical Scott sentence of a structure")
    s.add_argument("file")
    s.add_argument("--phi", type=_ints, metavar="TUPLE", help="print Phi for this tuple instead")
    s.add_argument("--alpha", type=int, help="level for --phi (default R(M))")
    s.set_defaults(func=cmd_css)

    s = sub.add_parser("sat", parents=[common], help="evaluate a formula in structures")
    s.add_argument("formula", help="formula file, s-expression text or JSON DAG text")
    s.add_argument("files", nargs="+")
    s.add_argument("--assign", type=_assignment, action="append", metavar="VAR=ELEM")
    s.set_defaults(func=cmd_sat)

    s = sub.add_parser("ef", parents=[common], help="Ehrenfeucht-Fraisse equivalence of two terms")
    s.add_argument("t1")
    s.add_argument("t2")
    s.add_argument("--rounds", type=int, required=True)
    s.add_argument("--dump", action="store_true", help="print both types as split trees")
    s.add_argument("--solver", action="store_true", help="cross-check finite orders by exhaustive game")
    s.set_defaults(func=cmd_ef)

    s = sub.add_parser("norm", parents=[common], help="normal form of an order term")
    s.add_argument("term")
    s.add_argument("--compare", metavar="TERM", help="also decide equality with TERM")
    s.add_argument("--harrison", action="store_true", help="normalize TERM*(1+eta)")
    s.set_defaults(func=cmd_norm)

    s = sub.add_parser("kb", parents=[common], help="Kleene-Brouwer order of a tree")
    s.add_argument("--tree", metavar="FILE")
    s.add_argument("--as-structure", metavar="OUT", help="write the order as a structure document")
    s.add_argument("--close", action="store_true", help="complete the node set to its prefix closure")
    s.add_argument("--compare", nargs=2, type=_seq, metavar=("S", "T"), help="compare two sequences")
    s.set_defaults(func=cmd_kb)

    s = sub.add_parser("classify", parents=[common], help="tree -> KB order -> times w")
    s.add_argument("--tree", metavar="FILE", required=True)
    s.add_argument("--close", action="store_true")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("corpus", parents=[common], help="corpus tools")
    csub = s.add_subparsers(dest="corpus_command", required=True, metavar="ACTION")
    c = csub.add_parser("css-iso", parents=[common], help="check css <-> isomorphism on every pair")
    c.add_argument("dir")
    c.set_defaults(func=cmd_corpus_css_iso)
    c = csub.add_parser("generate", parents=[common], help="write seeded random digraphs")
    c.add_argument("dir")
    c.add_argument("--count", type=int, default=10)
    c.add_argument("--size", type=int, default=3)
    c.add_argument("--density", type=float, default=0.5)
    c.set_defaults(func=cmd_corpus_generate)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.json = getattr(args, "json", False)
    args.seed = getattr(args, "seed", 0)
    try:
        args.func(args, out)
    except _Usage as exc:
        parser.print_usage(err)
        err.write(f"scottkit: error: {exc}\n")
        return 2
    except (DomainError, ValueError, OSError, RecursionError, EFError, FormulaError) as exc:
        err.write(f"scottkit: error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
