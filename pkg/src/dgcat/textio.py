"""Line-oriented text formats for presentations, functors and lift problems.

Presentation files::

    ring Q                      # or: ring F 7
    object 1
    object p zero
    arrow f : 1 -> 2 deg 0
    d r1 = 1 * g.f - 1 * id_1

Functor files name their ends with ``source``/``target`` lines holding a
path (relative to the functor file) or a built-in reference such as
``builtin:K``, ``builtin:IC:1`` (the pointed C(1)) and then list
``obj x -> y`` and ``arrow a -> <sum>`` lines.  ``#`` starts a comment
when it begins a line or follows whitespace, so generated names like
``t#1`` survive.
"""

from __future__ import annotations

import os
import re
from fractions import Fraction

from .cells import AddObject, AttachDisk, AttachHtpyEq, CellAttachment, KillCycle
from .field import QQ, Field, field_from_spec
from .presentation import (
    Arrow,
    DgFunctor,
    DgPresentation,
    FormalSum,
    PresentationError,
    Word,
    add_point,
    builtin,
    fun_F,
    fun_Q,
    fun_R,
    fun_S,
    generating_map,
    identity_functor,
)


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0, source: str = "<text>"):
        self.msg, self.line, self.col, self.source = msg, line, col, source
        super().__init__(f"{source}:{line}:{col}: {msg}")


_COMMENT = re.compile(r"(^|\s)#.*$")
_TOKEN = re.compile(r"\S+")


def _lines(text: str):
    """Yield (lineno, [(col, token), ...]) for non-blank lines."""
    for i, raw in enumerate(text.splitlines(), 1):
        line = _COMMENT.sub("", raw)
        toks = [(m.start() + 1, m.group()) for m in _TOKEN.finditer(line)]
        if toks:
            yield i, toks


def _int(tok, line, col, src):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", line, col, src) from None


def _expect(toks, i, want, line, src):
    if i >= len(toks):
        end = toks[-1][0] + len(toks[-1][1]) if toks else 1
        raise ParseError(f"expected {want!r} but the line ended", line, end, src)
    col, tok = toks[i]
    if tok != want:
        raise ParseError(f"expected {want!r}, got {tok!r}", line, col, src)


def _need(toks, i, what, line, src):
    if i >= len(toks):
        end = toks[-1][0] + len(toks[-1][1]) if toks else 1
        raise ParseError(f"missing {what}", line, end, src)
    return toks[i]


# ------------------------------------------------------------ formal sums

def parse_word(tok: str, P: DgPresentation, line=0, col=0, src="<text>") -> Word:
    if tok.startswith("id_"):
        X = tok[3:]
        if X not in P.objects:
            raise ParseError(f"unknown object {X!r} in {tok}", line, col, src)
        return Word(X, X)
    names = tok.split(".")
    for nm in names:
        if nm not in P.arrows:
            raise ParseError(f"unknown arrow {nm!r}", line, col, src)
    try:
        return P.word(*names)
    except PresentationError as e:
        raise ParseError(f"non-composable word {tok}: {e}", line, col, src) from None


_NUM = re.compile(r"[+-]?\d+(/\d+)?")


def parse_sum(toks, P: DgPresentation, line=0, src="<text>") -> FormalSum:
    """``<rat> * word (+|- <rat> * word)*``; coefficients and a leading sign are optional."""
    F = P.field
    out = FormalSum()
    i, n = 0, len(toks)
    first = True
    while i < n:
        col, tok = toks[i]
        sign = 1
        if tok in ("+", "-"):
            sign = -1 if tok == "-" else 1
            i += 1
            col, tok = _need(toks, i, "term after sign", line, src)
        elif not first:
            raise ParseError(f"expected + or -, got {tok!r}", line, col, src)
        first = False
        coeff = Fraction(1)
        if _NUM.fullmatch(tok):
            coeff = Fraction(tok)
            if i + 1 < n and toks[i + 1][1] == "*":
                col, tok = _need(toks, i + 2, "word after '*'", line, src)
                i += 2
            elif coeff == 0:
                i += 1
                continue
            else:
                raise ParseError(f"expected '*' after coefficient {tok}", line, col, src)
        elif tok.startswith("-"):
            sign, tok = -sign, tok[1:]
        w = parse_word(tok, P, line, col, src)
        i += 1
        try:
            c = F(coeff * sign)
        except ZeroDivisionError as e:
            raise ParseError(str(e), line, col, src) from None
        out = out + FormalSum.of(w, c)
    return out


def format_sum(s: FormalSum, F: Field | None) -> str:
    if not s:
        return "0"
    parts = []
    for w, c in s.items():
        txt = F.format(c) if F is not None else str(c)
        neg = txt.startswith("-")
        mag = txt.lstrip("-")
        if parts:
            parts.append(("- " if neg else "+ ") + f"{mag} * {w}")
        else:
            parts.append(("-" if neg else "") + f"{mag} * {w}")
    return " ".join(parts)


# ------------------------------------------------------------ presentations

def parse_presentation(text: str, source: str = "<text>", field: Field | None = None) -> DgPresentation:
    F = field
    objects: list[str] = []
    zero = None
    arrows: list[Arrow] = []
    dlines = []
    name = ""
    seen_ring = False
    for line, toks in _lines(text):
        col, kw = toks[0]
        if kw == "ring":
            _, spec = _need(toks, 1, "ring name", line, source)
            rest = "".join(t for _, t in toks[1:])
            try:
                F = field_from_spec(rest)
            except ValueError as e:
                raise ParseError(str(e), line, toks[1][0], source) from None
            seen_ring = True
        elif kw == "name":
            name = " ".join(t for _, t in toks[1:])
        elif kw == "object":
            c, nm = _need(toks, 1, "object name", line, source)
            if nm in objects:
                raise ParseError(f"duplicate object {nm!r}", line, c, source)
            objects.append(nm)
            if len(toks) > 2:
                c2, flag = toks[2]
                if flag != "zero" or len(toks) > 3:
                    raise ParseError(f"unexpected {flag!r} after object name", line, c2, source)
                if zero is not None:
                    raise ParseError("a second zero object", line, c2, source)
                zero = nm
        elif kw == "arrow":
            c, nm = _need(toks, 1, "arrow name", line, source)
            _expect(toks, 2, ":", line, source)
            cs, s = _need(toks, 3, "source object", line, source)
            _expect(toks, 4, "->", line, source)
            ct, t = _need(toks, 5, "target object", line, source)
            _expect(toks, 6, "deg", line, source)
            cd, dg = _need(toks, 7, "degree", line, source)
            if len(toks) > 8:
                raise ParseError(f"unexpected {toks[8][1]!r}", line, toks[8][0], source)
            for cc, o in ((cs, s), (ct, t)):
                if o not in objects:
                    raise ParseError(f"unknown object {o!r}", line, cc, source)
            if any(a.name == nm for a in arrows):
                raise ParseError(f"duplicate arrow {nm!r}", line, c, source)
            if "." in nm or nm.startswith("id_"):
                raise ParseError(f"reserved arrow name {nm!r}", line, c, source)
            arrows.append(Arrow(nm, s, t, _int(dg, line, cd, source)))
        elif kw == "d":
            c, nm = _need(toks, 1, "arrow name", line, source)
            _expect(toks, 2, "=", line, source)
            dlines.append((line, c, nm, toks[3:]))
        else:
            raise ParseError(f"unknown keyword {kw!r}", line, col, source)
    if F is None:
        F = QQ
    try:
        P0 = DgPresentation(objects, arrows, {}, zero=zero, field=F, name=name)
    except PresentationError as e:
        raise ParseError(str(e), 0, 0, source) from None
    d = {}
    for line, c, nm, rhs in dlines:
        if nm not in P0.arrows:
            raise ParseError(f"unknown arrow {nm!r}", line, c, source)
        if nm in d:
            raise ParseError(f"second differential for {nm!r}", line, c, source)
        if not rhs:
            raise ParseError("empty right-hand side", line, c + len(nm), source)
        s = parse_sum(rhs, P0, line, source)
        a = P0.arrows[nm]
        for w in s.terms:
            if (w.src, w.dst) != (a.src, a.dst):
                raise ParseError(f"d {nm}: term {w} is {w.src}->{w.dst}, expected {a.src}->{a.dst}",
                                 line, rhs[0][0], source)
            if P0.degree(w) != a.degree + 1:
                raise ParseError(f"d {nm}: degree mismatch, term {w} has degree {P0.degree(w)}, "
                                 f"expected {a.degree + 1}", line, rhs[0][0], source)
        d[nm] = s
    return DgPresentation(objects, arrows, d, zero=zero, field=F, name=name)


def print_presentation(P: DgPresentation) -> str:
    F = P.field
    out = []
    if P.name:
        out.append(f"name {P.name}")
    out.append("ring Q" if F == QQ else f"ring F {F.p}")
    for x in sorted(P.objects):
        out.append(f"object {x}" + (" zero" if P.is_zero(x) else ""))
    for nm in sorted(P.arrows):
        a = P.arrows[nm]
        out.append(f"arrow {nm} : {a.src} -> {a.dst} deg {a.degree}")
    for nm in sorted(P.d):
        if P.d[nm]:
            out.append(f"d {nm} = {format_sum(P.d[nm], F)}")
    return "\n".join(out) + "\n"


# ------------------------------------------------------------- references

PRESENTATION_NAMES = ("A", "B", "C", "P", "K", "O")


def builtin_presentation(spec: str, field: Field = QQ) -> DgPresentation:
    """``K``, ``C:1``, ``IC:1`` (pointed), ``O`` ..."""
    parts = spec.split(":")
    nm = parts[0]
    n = int(parts[1]) if len(parts) > 1 and parts[1] else None
    pointed = nm.startswith("I") and nm[1:] in PRESENTATION_NAMES
    base = nm[1:] if pointed else nm
    if base not in PRESENTATION_NAMES:
        raise PresentationError(f"unknown built-in presentation {spec!r}")
    P = builtin(base, n, field)
    return add_point(P) if pointed and not P.pointed else P


def builtin_functor(spec: str, field: Field = QQ) -> DgFunctor:
    """``F``, ``R:n``, ``S:n``, ``Q``, ``IF``, ``IR:n``, ``IS:n``."""
    parts = spec.split(":")
    nm = parts[0]
    n = int(parts[1]) if len(parts) > 1 and parts[1] else None
    if nm in ("IF", "IR", "IS", "Q"):
        return generating_map(nm, n, field)
    table = {"F": lambda: fun_F(field), "R": lambda: fun_R(n, field), "S": lambda: fun_S(n, field)}
    if nm not in table or (nm in "RS" and n is None):
        raise PresentationError(f"unknown built-in functor {spec!r}")
    return table[nm]()


def load_presentation(ref: str, base_dir: str = ".", field: Field = QQ) -> DgPresentation:
    if ref.startswith("builtin:"):
        return builtin_presentation(ref[len("builtin:"):], field)
    path = ref if os.path.isabs(ref) else os.path.join(base_dir, ref)
    with open(path) as fh:
        return parse_presentation(fh.read(), source=ref)


def load_functor(ref: str, base_dir: str = ".", field: Field = QQ) -> DgFunctor:
    from .model import initial_functor, terminal_functor

    if ref.startswith("builtin:"):
        return builtin_functor(ref[len("builtin:"):], field)
    for prefix, make in (("identity:", identity_functor), ("terminal:", terminal_functor),
                         ("initial:", initial_functor)):
        if ref.startswith(prefix):
            return make(load_presentation(ref[len(prefix):], base_dir, field))
    path = ref if os.path.isabs(ref) else os.path.join(base_dir, ref)
    with open(path) as fh:
        return parse_functor(fh.read(), os.path.dirname(path) or ".", source=ref, field=field)


def parse_functor(text: str, base_dir: str = ".", source: str = "<text>", field: Field = QQ,
                  src: DgPresentation | None = None, tgt: DgPresentation | None = None) -> DgFunctor:
    objs = {}
    arrow_lines = []
    for line, toks in _lines(text):
        col, kw = toks[0]
        if kw in ("source", "target"):
            c, ref = _need(toks, 1, f"{kw} reference", line, source)
            try:
                P = load_presentation(ref, base_dir, field)
            except (OSError, PresentationError) as e:
                raise ParseError(f"cannot load {ref}: {e}", line, c, source) from None
            if kw == "source":
                src = P
            else:
                tgt = P
        elif kw == "obj":
            c, x = _need(toks, 1, "object", line, source)
            _expect(toks, 2, "->", line, source)
            c2, y = _need(toks, 3, "image object", line, source)
            objs[x] = (y, line, c, c2)
        elif kw == "arrow":
            c, a = _need(toks, 1, "arrow", line, source)
            _expect(toks, 2, "->", line, source)
            arrow_lines.append((line, c, a, toks[3:]))
        else:
            raise ParseError(f"unknown keyword {kw!r}", line, col, source)
    if src is None or tgt is None:
        raise ParseError("functor file needs source and target lines", 1, 1, source)
    omap = {}
    for x, (y, line, c, c2) in objs.items():
        if x not in src.objects:
            raise ParseError(f"unknown source object {x!r}", line, c, source)
        if y not in tgt.objects:
            raise ParseError(f"unknown target object {y!r}", line, c2, source)
        omap[x] = y
    if src.pointed and tgt.pointed:
        omap.setdefault(src.zero, tgt.zero)
    amap = {}
    for line, c, a, rhs in arrow_lines:
        if a not in src.arrows:
            raise ParseError(f"unknown arrow {a!r}", line, c, source)
        if not rhs:
            raise ParseError("empty image", line, c + len(a), source)
        amap[a] = parse_sum(rhs, tgt, line, source)
    return DgFunctor(src, tgt, omap, amap)


def print_functor(F: DgFunctor, source_ref: str, target_ref: str) -> str:
    out = [f"source {source_ref}", f"target {target_ref}"]
    for x in sorted(F.objects):
        out.append(f"obj {x} -> {F.objects[x]}")
    for a in sorted(F.arrows):
        out.append(f"arrow {a} -> {format_sum(F.arrows[a], F.target.field)}")
    return "\n".join(out) + "\n"


# ----------------------------------------------------------- cells, lifts

def parse_cell(text: str, P: DgPresentation, line: int = 1, source: str = "<cell>") -> CellAttachment:
    """``object`` | ``disk n X Y`` | ``kill n X Y <sum>`` | ``htpy X`` (``attach`` prefix allowed)."""
    toks = [(m.start() + 1, m.group()) for m in _TOKEN.finditer(text)]
    if toks and toks[0][1] == "attach":
        toks = toks[1:]
    if not toks:
        raise ParseError("empty cell descriptor", line, 1, source)
    col, shape = toks[0]
    if shape == "object":
        return AddObject()
    if shape == "htpy":
        _, X = _need(toks, 1, "object", line, source)
        return AttachHtpyEq(X)
    if shape in ("disk", "kill"):
        cn, n = _need(toks, 1, "n", line, source)
        _, X = _need(toks, 2, "source object", line, source)
        _, Y = _need(toks, 3, "target object", line, source)
        n = _int(n, line, cn, source)
        if shape == "disk":
            return AttachDisk(n, X, Y)
        z = parse_sum(toks[4:], P, line, source) if len(toks) > 4 else FormalSum()
        return KillCycle(n, X, Y, z)
    raise ParseError(f"unknown cell shape {shape!r}", line, col, source)


def parse_lift_problem(text: str, base_dir: str = ".", source: str = "<text>", field: Field = QQ):
    """``functor <ref>``, ``generator Q|IS n|IR n|IF``, then ``top``/``bottom`` obj and arrow lines."""
    from .model import LiftProblem

    G = None
    kind, n = None, None
    lines = []
    for line, toks in _lines(text):
        col, kw = toks[0]
        if kw == "functor":
            c, ref = _need(toks, 1, "functor reference", line, source)
            try:
                G = load_functor(ref, base_dir, field)
            except (OSError, PresentationError) as e:
                raise ParseError(f"cannot load {ref}: {e}", line, c, source) from None
        elif kw == "generator":
            c, kind = _need(toks, 1, "generator", line, source)
            if kind not in ("Q", "IS", "IR", "IF"):
                raise ParseError(f"unknown generator {kind!r}", line, c, source)
            if kind in ("IS", "IR"):
                cn, nn = _need(toks, 2, "n", line, source)
                n = _int(nn, line, cn, source)
        elif kw in ("top", "bottom"):
            lines.append((line, toks))
        else:
            raise ParseError(f"unknown keyword {kw!r}", line, col, source)
    if G is None or kind is None:
        raise ParseError("lift problem needs functor and generator lines", 1, 1, source)
    gen = generating_map(kind, n, G.source.field)
    maps = {"top": ({}, {}), "bottom": ({}, {})}
    for line, toks in lines:
        side = toks[0][1]
        ends = (gen.source, G.source) if side == "top" else (gen.target, G.target)
        c, what = _need(toks, 1, "obj or arrow", line, source)
        ca, a = _need(toks, 2, "name", line, source)
        _expect(toks, 3, "->", line, source)
        if what == "obj":
            cb, b = _need(toks, 4, "image", line, source)
            if a not in ends[0].objects:
                raise ParseError(f"unknown object {a!r}", line, ca, source)
            if b not in ends[1].objects:
                raise ParseError(f"unknown object {b!r}", line, cb, source)
            maps[side][0][a] = b
        elif what == "arrow":
            if a not in ends[0].arrows:
                raise ParseError(f"unknown arrow {a!r}", line, ca, source)
            maps[side][1][a] = parse_sum(toks[4:], ends[1], line, source)
        else:
            raise ParseError(f"expected obj or arrow, got {what!r}", line, c, source)
    tobj, tarr = maps["top"]
    bobj, barr = maps["bottom"]
    if gen.source.pointed:
        tobj.setdefault(gen.source.zero, G.source.zero)
    for x in gen.source.objects:
        if x in tobj:
            bobj.setdefault(gen.obj(x), G.obj(tobj[x]))
    top = DgFunctor(gen.source, G.source, tobj, tarr)
    for a, img in gen.arrows.items():
        if len(img.terms) == 1:
            (w, c), = img.terms.items()
            if len(w) == 1 and w.arrows[0] not in barr:
                barr[w.arrows[0]] = (1 / c) * G.apply(top.apply(gen.source.gen(a)))
    if kind == "IR" and "l" in barr and "j" not in barr:
        barr["j"] = G.target.differential(barr["l"])
    bobj.setdefault(gen.target.zero, G.target.zero)
    missing = [x for x in gen.target.objects if x not in bobj]
    if missing:
        raise ParseError(f"bottom object image missing for {missing[0]}", 1, 1, source)
    bottom = DgFunctor(gen.target, G.target, bobj, {a: s for a, s in barr.items() if s})
    return LiftProblem(kind, n, top, bottom, G)
