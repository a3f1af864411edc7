"""``dgcat`` command line.

Exit codes: 0 certified pass, 2 certified failure (the report carries a
witness), 3 inconclusive within the bounds, 1 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import cells as cl
from . import complexes as cx
from . import model as md
from . import realization as rz
from .field import Fp, field_from_spec
from .presentation import (
    DgFunctor,
    DgPresentation,
    FormalSum,
    PresentationError,
    Word,
    add_point,
    generating_map,
    validate,
    validate_functor,
)
from .textio import (
    ParseError,
    builtin_presentation,
    format_sum,
    load_functor,
    load_presentation,
    parse_cell,
    parse_lift_problem,
    parse_sum,
    print_presentation,
)

PASS, FAIL, UNSURE = "pass", "fail", "inconclusive"
EXIT = {PASS: 0, FAIL: 2, UNSURE: 3}
DEFAULT_WINDOW = (-6, 6)
DEFAULT_MAXLEN = 8

_BY_VERDICT = {rz.CERT_YES: PASS, rz.CERT_NO: FAIL, rz.INCONCLUSIVE: UNSURE}


class UsageError(Exception):
    pass


@dataclass
class Outcome:
    status: str
    witnesses: dict = field(default_factory=dict)
    text: str | None = None  # raw output for gen-like verbs


# ------------------------------------------------------------ rendering

def plain(x):
    """JSON-ready copy of a report value."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, (Fraction, Fp)):
        return str(x)
    if isinstance(x, float):
        return round(x, 4)
    if isinstance(x, FormalSum):
        return format_sum(x, None)
    if isinstance(x, Word):
        return str(x)
    if hasattr(x, "as_dict"):
        return plain(x.as_dict())
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (set, frozenset)):
        return sorted(plain(v) for v in x)
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    if isinstance(x, (DgPresentation,)):
        return print_presentation(x)
    return str(x)


def _human(x, indent=0) -> list[str]:
    pad = "  " * indent
    out = []
    if isinstance(x, dict):
        for k, v in x.items():
            if isinstance(v, list) and all(not isinstance(e, (dict, list)) for e in v):
                out.append(f"{pad}{k}: [{', '.join(str(e) for e in v)}]")
            elif isinstance(v, (dict, list)) and v:
                out.append(f"{pad}{k}:")
                out.extend(_human(v, indent + 1))
            elif isinstance(v, str) and "\n" in v:
                out.append(f"{pad}{k}:")
                out.extend(pad + "  " + ln for ln in v.rstrip("\n").split("\n"))
            else:
                out.append(f"{pad}{k}: {json.dumps(v) if not isinstance(v, str) else v}")
    elif isinstance(x, list):
        for v in x:
            if isinstance(v, (dict, list)):
                sub = _human(v, indent + 1)
                if sub:
                    out.append(f"{pad}- " + sub[0].lstrip())
                    out.extend(sub[1:])
                else:
                    out.append(f"{pad}- {json.dumps(v)}")
            else:
                out.append(f"{pad}- {v}")
    else:
        out.append(f"{pad}{x}")
    return out


# ------------------------------------------------------------- arguments

class Bounds:
    def __init__(self, args):
        self.window = cx.GradedWindow(*args.window)
        self.maxlen = args.maxlen
        self.field = args.ring

    def as_dict(self):
        return {"window": [self.window.lo, self.window.hi], "maxlen": self.maxlen,
                "ring": self.field.name}


def _window(text: str):
    try:
        lo, hi = text.split("..")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like lo..hi, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty window {text}")
    return lo, hi


def _ring(text: str):
    try:
        return field_from_spec(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _pres(args, ref: str) -> DgPresentation:
    return load_presentation(ref, ".", args.ring)


def _fun(args, ref: str) -> DgFunctor:
    return load_functor(ref, ".", args.ring)


def _need_object(P: DgPresentation, X: str):
    if X not in P.objects:
        raise UsageError(f"unknown object {X!r}; objects are {', '.join(P.objects)}")


def _write_out(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)


# --------------------------------------------------------------- verbs

def cmd_validate(args, B: Bounds) -> Outcome:
    if args.functor:
        F = _fun(args, args.ref)
        rep = validate_functor(F)
        wit = {"objects": F.objects, "defects": rep.defects}
    else:
        P = _pres(args, args.ref)
        rep = validate(P)
        wit = {"objects": len(P.objects), "arrows": len(P.arrows),
               "nonzero_differentials": sum(1 for s in P.d.values() if s),
               "defects": rep.defects}
    return Outcome(PASS if rep.ok else FAIL, wit)


def cmd_hom(args, B: Bounds) -> Outcome:
    P = _pres(args, args.ref)
    _need_object(P, args.X)
    _need_object(P, args.Y)
    h = rz.realize_hom(P, args.X, args.Y, B.window, B.maxlen)
    wit = {
        "dims": {k: v for k, v in h.dims().items() if B.window.lo <= k <= B.window.hi},
        "basis": {k: [str(w) for w in ws] for k, ws in sorted(h.basis.items())
                  if ws and B.window.lo <= k <= B.window.hi},
        "finiteness": h.finiteness.as_dict(),
        "exact": h.exact,
    }
    return Outcome(PASS if h.exact else UNSURE, wit)


def cmd_homology(args, B: Bounds) -> Outcome:
    if args.complex:
        with open(args.complex) as fh:
            C = cx.from_text(fh.read())
        H = cx.homology(C, B.window)
        return Outcome(PASS, {"dims": H.nonzero(), "exact": True})
    if not (args.ref and args.X and args.Y):
        raise UsageError("homology needs <presentation> X Y or --complex <file>")
    P = _pres(args, args.ref)
    _need_object(P, args.X)
    _need_object(P, args.Y)
    h = rz.realize_hom(P, args.X, args.Y, B.window, B.maxlen)
    H = h.homology()
    wit = {"dims": H.nonzero(),
           "representatives": {k: [format_sum(r, P.field) for r in rs]
                               for k, rs in sorted(H.reps.items()) if rs},
           "finiteness": h.finiteness.status, "exact": h.exact}
    return Outcome(PASS if h.exact else UNSURE, wit)


def cmd_h0(args, B: Bounds) -> Outcome:
    P = _pres(args, args.ref)
    objs = args.objects or [x for x in P.objects if not P.is_zero(x)]
    for x in objs:
        _need_object(P, x)
    H = rz.h0_category(P, B.maxlen, objs)
    dims = {f"{x}->{y}": H.dim(x, y) for x in objs for y in objs}
    isos = {}
    for i, x in enumerate(objs):
        for y in objs[i + 1:]:
            st, q = H.find_iso(x, y)
            isos[f"{x}~{y}"] = {"status": st, "map": format_sum(q, P.field) if q is not None else None}
    return Outcome(PASS if H.exact else UNSURE, {"dims": dims, "isomorphisms": isos, "exact": H.exact})


def cmd_qe(args, B: Bounds) -> Outcome:
    F = _fun(args, args.ref)
    v = rz.check_quasi_equivalence(F, B.window, B.maxlen)
    return Outcome(_BY_VERDICT[v.status], v.as_dict())


def cmd_surj(args, B: Bounds) -> Outcome:
    F = _fun(args, args.ref)
    v = md.check_surj(F, B.window, B.maxlen)
    return Outcome(_BY_VERDICT[v.status], v.as_dict())


def cmd_fibration(args, B: Bounds) -> Outcome:
    F = md.pointed_version(_fun(args, args.ref))
    v = md.check_fibration(F, B.window, B.maxlen)
    return Outcome(_BY_VERDICT[v.status], v.as_dict())


def cmd_fibrancy(args, B: Bounds) -> Outcome:
    P = _pres(args, args.ref)
    v = md.check_fibrancy(P, B.window, B.maxlen)
    return Outcome(_BY_VERDICT[v.status], v.as_dict())


def _pushout_report(res: cl.PushoutResult, cells) -> dict:
    return {"cells": [c.describe() for c in cells], "record": res.record,
            "presentation": print_presentation(res.presentation)}


def cmd_pushout(args, B: Bounds) -> Outcome:
    P = _pres(args, args.ref)
    gen = generating_map(args.generator, args.n, P.field)
    if not P.pointed:
        P = add_point(P)
    objs, arrows = {gen.source.zero: P.zero}, {}
    for item in args.map or []:
        if "=" not in item:
            raise UsageError(f"--map expects name=value, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        if k in gen.source.objects:
            _need_object(P, v)
            objs[k] = v
        elif k in gen.source.arrows:
            toks = [(i + 1, t) for i, t in enumerate(v.split())]
            arrows[k] = parse_sum(toks, P, 0, "--map")
        else:
            raise UsageError(f"{k!r} is not an object or arrow of the generator's source")
    missing = [x for x in gen.source.objects if x not in objs]
    if missing:
        raise UsageError(f"--map needs an image for object {missing[0]}")
    top = DgFunctor(gen.source, P, objs, arrows, name="attaching")
    rep = validate_functor(top)
    if not rep.ok:
        return Outcome(FAIL, {"attaching_map_defects": rep.defects})
    cell = cl.cell_from_attaching_map(args.generator, args.n, top)
    res = cl.attach(P, cell)
    wit = _pushout_report(res, [cell])
    _write_out(args, wit["presentation"])
    return Outcome(PASS, wit)


def cmd_attach(args, B: Bounds) -> Outcome:
    P = _pres(args, args.ref)
    specs = list(args.cell or [])
    if args.cells_file:
        with open(args.cells_file) as fh:
            for ln in fh:
                ln = ln.split(" #", 1)[0].strip()
                if ln and not ln.startswith("#"):
                    specs.append(ln)
    if not specs:
        raise UsageError("attach needs at least one --cell or --cells-file")
    done = []
    res = None
    for i, spec in enumerate(specs, 1):
        cell = parse_cell(spec, P, i, "--cell")
        res = cl.attach(P, cell)
        P = res.presentation
        done.append(cell)
    wit = _pushout_report(res, done)
    _write_out(args, wit["presentation"])
    return Outcome(PASS, wit)


def cmd_contract(args, B: Bounds) -> Outcome:
    P = _pres(args, args.ref)
    _need_object(P, args.X)
    res = cl.adjoin_contraction(P, args.X)
    wit = _pushout_report(res, [])
    wit["cells"] = [f"contraction at {args.X}"]
    _write_out(args, wit["presentation"])
    if not args.verify:
        return Outcome(PASS, wit)
    rep = cl.verify_filtration(res, B.window, _maxlens(args))
    wit["filtration"] = rep.as_dict()
    if rep.checks.get("filtration") is False:
        return Outcome(FAIL, wit)
    return Outcome(_BY_VERDICT[rep.status], wit)


def cmd_lift(args, B: Bounds) -> Outcome:
    with open(args.problem) as fh:
        pb = parse_lift_problem(fh.read(), os.path.dirname(args.problem) or ".", args.problem, args.ring)
    if not pb.commutes():
        raise UsageError("the square does not commute")
    res = md.lift(pb, B.maxlen)
    wit = res.as_dict()
    if isinstance(res, md.LiftSolution):
        return Outcome(PASS, wit)
    if isinstance(res, md.NonLiftWitness):
        wit["rechecked"] = md.recheck_witness(res, B.maxlen)
        return Outcome(FAIL, wit)
    return Outcome(UNSURE, wit)


def cmd_factorize(args, B: Bounds) -> Outcome:
    F = md.pointed_version(_fun(args, args.ref))
    res = md.factorize(F, B.window, B.maxlen, stages=args.stages, max_cells=args.max_cells)
    wit = res.as_dict()
    wit["presentation"] = print_presentation(res.presentation)
    _write_out(args, wit["presentation"])
    v = res.verdict.status
    if not res.composite_ok:
        return Outcome(FAIL, wit)
    if v == rz.CERT_YES and res.converged:
        return Outcome(PASS, wit)
    if v == rz.CERT_NO and res.converged:
        return Outcome(FAIL, wit)
    return Outcome(UNSURE, wit)


def cmd_gen(args, B: Bounds) -> Outcome:
    name = args.name.upper()
    if name in ("C", "P") and args.n is None:
        raise UsageError(f"gen {name} needs --n")
    spec = ("I" if args.pointed else "") + name + (f":{args.n}" if args.n is not None else "")
    P = builtin_presentation(spec, args.ring)
    text = print_presentation(P)
    _write_out(args, text)
    return Outcome(PASS, {"presentation": text}, text=None if args.out else text)


def _maxlens(args):
    try:
        return tuple(int(x) for x in args.maxlens.split(","))
    except ValueError:
        raise UsageError(f"--maxlens expects a comma list, got {args.maxlens!r}") from None


def cmd_lemma1(args, B: Bounds) -> Outcome:
    P = _pres(args, args.base)
    objs = [x for x in P.objects if not P.is_zero(x)]
    if args.at:
        A, Bo = args.at
        _need_object(P, A)
        _need_object(P, Bo)
    elif objs:
        A, Bo = objs[0], objs[1] if len(objs) > 1 else objs[0]
    else:
        raise UsageError("the base has no nonzero object")
    if args.case == "R":
        if args.n is None:
            raise UsageError("--case R needs --n")
        res = cl.attach(P, cl.AttachDisk(args.n, A, Bo))
        reports = {}
        statuses = []
        for X in objs:
            for Y in objs:
                rep = cl.verify_direct_sum(res, X, Y, B.window, B.maxlen)
                reports[f"{X}->{Y}"] = rep.as_dict()
                statuses.append(rep.status)
        wit = {"cell": res.cell.describe(), "pairs": reports}
    else:
        res = cl.attach(P, cl.AttachHtpyEq(A))
        rep = cl.verify_filtration(res, B.window, _maxlens(args))
        wit = {"cell": res.cell.describe(), "filtration": rep.as_dict()}
        statuses = [rep.status]
        if rep.checks.get("filtration") is False or rep.checks.get("agree") is False:
            statuses.append(rz.CERT_NO)
    if rz.CERT_NO in statuses:
        return Outcome(FAIL, wit)
    if all(s == rz.CERT_YES for s in statuses):
        return Outcome(PASS, wit)
    return Outcome(UNSURE, wit)


def _functor_family(args, kind: str):
    from .corpus import non_surj_functors, surj_functors

    if args.ref:
        return [md.pointed_version(_fun(args, args.ref))]
    half = args.corpus // 2
    return (surj_functors(args.corpus - half, args.seed, args.ring)
            + non_surj_functors(half, args.seed + 1, args.ring))


def _lemma2_one(G, B: Bounds) -> dict:
    v = md.check_surj(G, B.window, B.maxlen)
    rec = {"surj": v.status}
    if v.status == rz.CERT_YES:
        squares = md.i_squares(G, B.window, B.maxlen)
        bad = []
        for pb in squares:
            r = md.lift(pb, B.maxlen)
            if not isinstance(r, md.LiftSolution):
                bad.append(r.as_dict())
        rec.update(squares=len(squares), failures=bad)
        rec["verdict"] = rz.CERT_YES if not bad else (
            rz.CERT_NO if any(b["status"] == "obstructed" for b in bad) else rz.INCONCLUSIVE)
    elif v.status == rz.CERT_NO:
        pb = md.find_nonlift_square(G, B.window, B.maxlen)
        if pb is None:
            rec["verdict"] = rz.INCONCLUSIVE
            rec["reason"] = "no unliftable square found in the window"
            return rec
        r = md.lift(pb, B.maxlen)
        rec["square"] = r.as_dict()
        if isinstance(r, md.NonLiftWitness):
            ok = md.recheck_witness(r, B.maxlen)
            rec["rechecked"] = ok
            rec["verdict"] = rz.CERT_YES if ok else rz.INCONCLUSIVE
        elif isinstance(r, md.LiftSolution):
            rec["verdict"] = rz.CERT_NO
        else:
            rec["verdict"] = rz.INCONCLUSIVE
    else:
        rec["verdict"] = rz.INCONCLUSIVE
    return rec


def _lemma3_one(G, B: Bounds) -> dict:
    v = md.check_surj(G, B.window, B.maxlen)
    rec = {"surj": v.status}
    if v.status != rz.CERT_YES:
        qe = rz.check_quasi_equivalence(G, B.window, B.maxlen)
        fib = md.check_fibration(G, B.window, B.maxlen)
        rec.update(qe=qe.status, fibration=fib.status)
        if qe.status == rz.CERT_NO or fib.status == rz.CERT_NO:
            rec["verdict"] = rz.CERT_YES  # outside W or outside J-inj, as the statement requires
        elif v.status == rz.CERT_NO and qe.status == rz.CERT_YES and fib.status == rz.CERT_YES:
            rec["verdict"] = rz.CERT_NO
        else:
            rec["verdict"] = rz.INCONCLUSIVE
        return rec
    squares = md.j_squares(G, B.window, B.maxlen)
    bad = []
    for pb in squares:
        r = md.lift(pb, B.maxlen)
        if not isinstance(r, md.LiftSolution):
            bad.append(r.as_dict())
    qe = rz.check_quasi_equivalence(G, B.window, B.maxlen)
    rec.update(squares=len(squares), failures=bad, qe=qe.status)
    if not bad and qe.status == rz.CERT_YES:
        rec["verdict"] = rz.CERT_YES
    elif any(b["status"] == "obstructed" for b in bad) or qe.status == rz.CERT_NO:
        rec["verdict"] = rz.CERT_NO
    else:
        rec["verdict"] = rz.INCONCLUSIVE
    return rec


def _lemma(args, B: Bounds, one) -> Outcome:
    family = _functor_family(args, "")
    recs = [one(G, B) for G in family]
    wit = {"functors": len(recs), "instances": recs}
    verdicts = [r["verdict"] for r in recs]
    if rz.CERT_NO in verdicts:
        return Outcome(FAIL, wit)
    if all(v == rz.CERT_YES for v in verdicts):
        return Outcome(PASS, wit)
    return Outcome(UNSURE, wit)


def cmd_lemma2(args, B: Bounds) -> Outcome:
    return _lemma(args, B, _lemma2_one)


def cmd_lemma3(args, B: Bounds) -> Outcome:
    return _lemma(args, B, _lemma3_one)


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--window", type=_window, default=DEFAULT_WINDOW, metavar="LO..HI")
    common.add_argument("--maxlen", type=int, default=DEFAULT_MAXLEN)
    common.add_argument("--ring", type=_ring, default=field_from_spec("Q"),
                        help="Q or F<p>, used for built-ins and generated corpora")
    common.add_argument("--json", action="store_true")
    common.add_argument("--timings", action="store_true")

    p = argparse.ArgumentParser(prog="dgcat", description="Exact computations with semi-free dg categories.")
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(fn=fn)
        return sp

    sp = verb("validate", cmd_validate, "check a presentation (or --functor) for well-formedness")
    sp.add_argument("ref")
    sp.add_argument("--functor", action="store_true")
    sp = verb("hom", cmd_hom, "windowed word basis of a hom complex")
    sp.add_argument("ref"); sp.add_argument("X"); sp.add_argument("Y")
    sp = verb("homology", cmd_homology, "homology of a hom complex or of a complex file")
    sp.add_argument("ref", nargs="?"); sp.add_argument("X", nargs="?"); sp.add_argument("Y", nargs="?")
    sp.add_argument("--complex")
    sp = verb("h0", cmd_h0, "degree-zero homology category")
    sp.add_argument("ref"); sp.add_argument("--objects", nargs="+")
    for name, fn, hl in (("qe", cmd_qe, "quasi-equivalence check"),
                         ("surj", cmd_surj, "surjectivity on objects and surjective quasi-isos on homs"),
                         ("fibration", cmd_fibration, "fibration check")):
        verb(name, fn, hl).add_argument("ref")
    verb("fibrancy", cmd_fibrancy, "is the map to the terminal category a fibration").add_argument("ref")
    sp = verb("pushout", cmd_pushout, "pushout along a generating map")
    sp.add_argument("ref"); sp.add_argument("generator", choices=["Q", "IS", "IR", "IF"])
    sp.add_argument("--n", type=int); sp.add_argument("--map", action="append", metavar="NAME=VALUE")
    sp.add_argument("--out")
    sp = verb("attach", cmd_attach, "attach cells given as descriptors")
    sp.add_argument("ref"); sp.add_argument("--cell", action="append"); sp.add_argument("--cells-file")
    sp.add_argument("--out")
    sp = verb("contract", cmd_contract, "adjoin a contraction of an object")
    sp.add_argument("ref"); sp.add_argument("X"); sp.add_argument("--verify", action="store_true")
    sp.add_argument("--maxlens", default="4,6,8"); sp.add_argument("--out")
    sp = verb("lift", cmd_lift, "solve a lifting problem file")
    sp.add_argument("problem")
    sp = verb("factorize", cmd_factorize, "bounded cell-complex factorization")
    sp.add_argument("ref"); sp.add_argument("--stages", type=int, default=3)
    sp.add_argument("--max-cells", type=int, default=64); sp.add_argument("--out")
    sp = verb("gen", cmd_gen, "print a built-in presentation")
    sp.add_argument("name", choices=["K", "A", "B", "C", "P", "O", "k", "a", "b", "c", "p", "o"])
    sp.add_argument("--n", type=int); sp.add_argument("--pointed", action="store_true")
    sp.add_argument("--out", "-o")
    sp = verb("verify-lemma1", cmd_lemma1, "cell attachments are quasi-equivalences on an instance")
    sp.add_argument("--case", choices=["R", "F"], required=True)
    sp.add_argument("--base", required=True); sp.add_argument("--n", type=int)
    sp.add_argument("--at", nargs=2, metavar=("A", "B")); sp.add_argument("--maxlens", default="4,6,8")
    for name, fn, hl in (("verify-lemma2", cmd_lemma2, "I-squares against surjectivity"),
                         ("verify-lemma3", cmd_lemma3, "J-squares and quasi-equivalence against surjectivity")):
        sp = verb(name, fn, hl)
        sp.add_argument("ref", nargs="?")
        sp.add_argument("--corpus", type=int, default=8)
        sp.add_argument("--seed", type=int, default=0)
    return p


def _fix_negative_windows(argv):
    """Let ``--window -3..3`` through argparse, which reads a leading dash as a flag."""
    out = list(argv)
    for i, a in enumerate(out[:-1]):
        if a == "--window":
            out[i] = f"--window={out[i + 1]}"
            out[i + 1] = None
    return [a for a in out if a is not None]


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    argv = _fix_negative_windows(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    B = Bounds(args)
    t0 = time.perf_counter()
    try:
        out = args.fn(args, B)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 1
    except (UsageError, PresentationError, OSError, cx.WindowError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    elapsed = time.perf_counter() - t0
    report = {
        "command": args.verb,
        "bounds": B.as_dict(),
        "status": out.status,
        "witnesses": plain(out.witnesses),
        "timings": {"total_s": round(elapsed, 4)} if args.timings else {},
    }
    if args.json:
        stdout.write(json.dumps(report, indent=2, sort_keys=False) + "\n")
    elif out.text is not None:
        stdout.write(out.text)
    else:
        lines = [f"{args.verb}: {out.status}"]
        lines += _human({"bounds": report["bounds"]})
        lines += _human(report["witnesses"])
        if args.timings:
            lines.append(f"time: {report['timings']['total_s']}s")
        stdout.write("\n".join(lines) + "\n")
    return EXIT[out.status]


def main(argv=None) -> int:
    sys.exit(run(argv))
