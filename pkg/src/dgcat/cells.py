"""Cell attachments: pushouts of presentations along the generating maps.

Attaching a cell adds fresh generators (and possibly a fresh object) to a
semi-free presentation.  Generators that would touch the zero object are
dropped, since every hom into or out of it vanishes in the pushout.

The two verifications here check, on explicit word bases, that the
inclusion of the old presentation is a quasi-equivalence:

* ``verify_direct_sum`` for disk attachments, by splitting each hom into
  pieces indexed by the number of new generators and contracting every
  piece that contains one;
* ``verify_filtration`` for attached homotopy-equivalence data and adjoined
  contractions, by checking the occurrence-count filtration and comparing
  truncated homology across length bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import GradedWindow, contraction_of_cone_id
from .presentation import (
    ZERO,
    Arrow,
    DgFunctor,
    DgPresentation,
    FormalSum,
    PresentationError,
    Word,
)
from .realization import (
    CERT_NO,
    CERT_YES,
    INCONCLUSIVE,
    enumerate_words,
    homology_map_iso,
    realize_hom,
)


class CellError(PresentationError):
    pass


@dataclass(frozen=True)
class CellAttachment:
    shape: str
    n: int | None = None
    X: str | None = None
    Y: str | None = None
    z: FormalSum | None = None
    prefix: str = ""

    def describe(self) -> str:
        if self.shape == "object":
            return "AddObject"
        if self.shape == "disk":
            return f"AttachDisk({self.n}; {self.X}, {self.Y})"
        if self.shape == "kill":
            return f"KillCycle({self.n}; {self.X}, {self.Y}, {self.z})"
        return f"AttachHtpyEq({self.X})"


def AddObject(prefix: str = "") -> CellAttachment:
    return CellAttachment("object", prefix=prefix)


def AttachDisk(n: int, X: str, Y: str, prefix: str = "") -> CellAttachment:
    return CellAttachment("disk", n, X, Y, prefix=prefix)


def KillCycle(n: int, X: str, Y: str, z: FormalSum, prefix: str = "") -> CellAttachment:
    return CellAttachment("kill", n, X, Y, z, prefix=prefix)


def AttachHtpyEq(X: str, prefix: str = "") -> CellAttachment:
    return CellAttachment("htpy", X=X, prefix=prefix)


@dataclass
class PushoutResult:
    presentation: DgPresentation
    inc: DgFunctor
    record: dict = field(default_factory=dict)
    cell: CellAttachment | None = None

    @property
    def base(self) -> DgPresentation:
        return self.inc.source


def _fresh_suffix(P: DgPresentation, prefix: str, roles) -> str:
    taken = set(P.objects) | set(P.arrows)
    k = 1
    while any(f"{prefix}{r}#{k}" in taken for r in roles):
        k += 1
    return f"#{k}"


def _extend(P: DgPresentation, new_objects, new_arrows, new_d, cell, record) -> PushoutResult:
    """Add objects/arrows, dropping arrows at the zero object and zeroing their occurrences."""
    kept, dropped = [], []
    for a in new_arrows:
        (dropped if P.zero in (a.src, a.dst) else kept).append(a)
    gone = {a.name for a in dropped}
    d = dict(P.d)
    for a in kept:
        img = new_d.get(a.name, ZERO)
        d[a.name] = FormalSum({
            w: c for w, c in img.terms.items()
            if not gone.intersection(w.arrows) and not P.is_zero(w.src)
        })
    Q = DgPresentation(
        P.objects + tuple(new_objects),
        list(P.arrows.values()) + kept,
        d,
        zero=P.zero,
        field=P.field,
        name=P.name,
    )
    inc = DgFunctor(P, Q, {x: x for x in P.objects}, {a: Q.gen(a) for a in P.arrows}, name="inc")
    record = dict(record)
    record["dropped"] = sorted(gone)
    return PushoutResult(Q, inc, record, cell)


def attach(P: DgPresentation, cell: CellAttachment) -> PushoutResult:
    pre = cell.prefix
    if cell.shape == "object":
        sfx = _fresh_suffix(P, pre, ["obj"])
        name = f"{pre}obj{sfx}"
        return _extend(P, [name], [], {}, cell, {"object": name})
    if cell.shape in ("disk", "kill"):
        X, Y, n = cell.X, cell.Y, cell.n
        for o in (X, Y):
            if o not in P.objects:
                raise CellError(f"unknown object {o}")
        if cell.shape == "disk":
            sfx = _fresh_suffix(P, pre, ["l", "j"])
            l, j = f"{pre}l{sfx}", f"{pre}j{sfx}"
            arrows = [Arrow(l, X, Y, n - 2), Arrow(j, X, Y, n - 1)]
            d = {l: FormalSum.of(Word(X, Y, (j,)), 1)}
            return _extend(P, [], arrows, d, cell, {"l": l, "j": j})
        z = cell.z if cell.z is not None else ZERO
        for w in z.terms:
            if (w.src, w.dst) != (X, Y):
                raise CellError(f"cycle term {w} is not a word {X} -> {Y}")
            if P.degree(w) != n - 1:
                raise CellError(f"cycle term {w} has degree {P.degree(w)}, expected {n - 1}")
            for a in w.arrows:
                if a not in P.arrows:
                    raise CellError(f"cycle term {w} uses unknown arrow {a}")
        dz = P.differential(z)
        if dz:
            raise CellError(f"not a cycle: d(z) = {dz}")
        sfx = _fresh_suffix(P, pre, ["t"])
        t = f"{pre}t{sfx}"
        return _extend(P, [], [Arrow(t, X, Y, n - 2)], {t: z}, cell, {"t": t})
    if cell.shape == "htpy":
        X = cell.X
        if X not in P.objects:
            raise CellError(f"unknown object {X}")
        roles = ["obj", "f", "g", "r1", "r2", "r12"]
        sfx = _fresh_suffix(P, pre, roles)
        nm = {r: f"{pre}{r}{sfx}" for r in roles}
        two = nm["obj"]
        f, g, r1, r2, r12 = (nm[r] for r in roles[1:])
        arrows = [
            Arrow(f, X, two, 0),
            Arrow(g, two, X, 0),
            Arrow(r1, X, X, -1),
            Arrow(r2, two, two, -1),
            Arrow(r12, X, two, -2),
        ]
        W = Word
        d = {
            r1: FormalSum({W(X, X, (g, f)): 1, W(X, X): -1}),
            r2: FormalSum({W(two, two, (f, g)): 1, W(two, two): -1}),
            r12: FormalSum({W(X, two, (f, r1)): 1, W(X, two, (r2, f)): -1}),
        }
        return _extend(P, [two], arrows, d, cell, nm)
    raise CellError(f"unknown cell shape {cell.shape}")


def adjoin_contraction(P: DgPresentation, X: str, prefix: str = "") -> PushoutResult:
    """Add an endomorphism ``h`` of X of degree -1 with ``dh = id``."""
    if X not in P.objects:
        raise CellError(f"unknown object {X}")
    if P.is_zero(X):
        raise CellError("cannot adjoin a contraction at the zero object")
    sfx = _fresh_suffix(P, prefix, ["h"])
    h = f"{prefix}h{sfx}"
    d = {h: FormalSum.of(Word(X, X), 1)}
    return _extend(P, [], [Arrow(h, X, X, -1)], d, CellAttachment("contract", X=X, prefix=prefix),
                   {"h": h})


def attach_many(P: DgPresentation, cells) -> tuple[DgPresentation, DgFunctor, list]:
    """Attach cells in order; returns the final presentation, composite inclusion, records."""
    from .presentation import compose_functors, identity_functor

    inc = identity_functor(P)
    records = []
    cur = P
    for c in cells:
        r = attach(cur, c)
        inc = compose_functors(r.inc, inc)
        cur = r.presentation
        records.append(r.record)
    return cur, inc, records


# ------------------------------------------------------------- verifications

def _count(w: Word, names) -> int:
    return sum(1 for a in w.arrows if a in names)


def _split(w: Word, names, P: DgPresentation):
    """Factor ``w`` at occurrences of ``names``: [u_m, e_m, u_{m-1}, ..., e_1, u_0].

    Slots ``u_i`` are old words (possibly identities) recorded as Words.
    """
    pieces = []
    cur: list = []
    # objects: track the source of each segment while walking from the left
    # (last applied) to the right (first applied)
    for a in w.arrows:
        if a in names:
            pieces.append(tuple(cur))
            pieces.append(a)
            cur = []
        else:
            cur.append(a)
    pieces.append(tuple(cur))
    # rebuild with endpoints: walk right to left (application order)
    src = w.src
    rebuilt = []
    for p in reversed(pieces):
        if isinstance(p, str):
            rebuilt.append(p)
            src = P.arrows[p].dst
        else:
            dst = P.arrows[p[0]].dst if p else src
            rebuilt.append(Word(src, dst, p))
            src = dst
    return list(reversed(rebuilt))


def _join(parts, X: str, Y: str) -> Word:
    arrows: tuple = ()
    for p in parts:
        arrows += (p,) if isinstance(p, str) else p.arrows
    return Word(X, Y, arrows)


def _tensor_d(parts, old: DgPresentation, U: DgPresentation, X: str, Y: str) -> FormalSum:
    """Koszul differential of a split word, assembled factor by factor."""
    out = FormalSum()
    left = 0
    for i, p in enumerate(parts):
        if isinstance(p, str):
            dp = U.d.get(p, ZERO)
            deg = U.arrows[p].degree
        else:
            dp = old.d_word(p) if p.arrows else ZERO
            deg = old.degree(p)
        sign = -1 if left % 2 else 1
        for v, c in dp.terms.items():
            new = list(parts)
            if isinstance(p, str):
                new[i] = v if v.arrows else Word(v.src, v.dst)
            else:
                new[i] = v
            out = out + FormalSum.of(_join(new, X, Y), sign * c)
        left += deg
    return out


def _contract(w: Word, names, h: dict, U: DgPresentation) -> FormalSum:
    """``(1 x h x 1)`` on the leftmost new generator, with the Koszul sign."""
    for i, a in enumerate(w.arrows):
        if a in names:
            img = h.get(a)
            if img is None:
                return FormalSum()
            left = w.arrows[:i]
            sign = -1 if sum(U.arrows[b].degree for b in left) % 2 else 1
            return FormalSum.of(Word(w.src, w.dst, left + (img,) + w.arrows[i + 1:]), sign)
    return FormalSum()


@dataclass
class VerificationReport:
    status: str
    checks: dict = field(default_factory=dict)
    defects: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.status == CERT_YES

    def as_dict(self) -> dict:
        return {"status": self.status, "checks": self.checks, "defects": self.defects,
                "details": self.details}


def verify_direct_sum(
    U: PushoutResult, X: str, Y: str, window: GradedWindow, maxlen: int
) -> VerificationReport:
    """Direct-sum decomposition of ``Hom_U(X, Y)`` after a disk attachment."""
    if "l" not in U.record or U.record.get("dropped"):
        if U.record.get("dropped"):
            return VerificationReport(CERT_YES, {"degenerate": True},
                                      details={"reason": "cell touched the zero object; nothing added"})
        raise CellError("verify_direct_sum needs a disk attachment")
    P, J = U.presentation, U.base
    l, j = U.record["l"], U.record["j"]
    names = {l, j}
    n = U.cell.n
    defects = []
    # the per-piece contraction is the one of the cone on the identity, on the new letters
    hc = contraction_of_cone_id(n - 1, P.field)
    assert hc.comp(n - 1) and hc.comp(n - 1)[0][0] == 1
    h = {j: l}

    homU = realize_hom(P, X, Y, window, maxlen)
    pieces: dict = {}
    subcomplex = True
    tensor_ok = True
    contraction_ok = True
    fw = window.flanked()
    for w in homU.words:
        m = _count(w, names)
        pieces.setdefault(m, []).append(w)
        dw = P.d_word(w)
        for v in dw.terms:
            if _count(v, names) != m:
                subcomplex = False
                defects.append(f"d({w}) has term {v} with {_count(v, names)} new letters, expected {m}")
        parts = _split(w, names, P)
        if _join(parts, X, Y) != w:
            tensor_ok = False
            defects.append(f"factorization of {w} does not recompose")
        if m and _tensor_d(parts, J, P, X, Y) != dw:
            tensor_ok = False
            defects.append(f"tensor differential differs from Leibniz on {w}")
        if m:
            lhs = P.differential(_contract(w, names, h, P)) + _contract_sum(dw, names, h, P)
            if lhs != FormalSum.of(w, 1):
                contraction_ok = False
                defects.append(f"dH + Hd != id on {w}: got {lhs}")

    # tensor shape: m-piece words are exactly the tuples of old words and letters
    A, B = U.cell.X, U.cell.Y
    maxm = max(pieces, default=0)
    for m in range(1, maxm + 2):
        expected = set()
        for w in _tensor_words(J, X, Y, A, B, m, [l, j], P, maxlen):
            if P.degree(w) in fw:
                expected.add(w)
        got = set(pieces.get(m, []))
        if expected != got:
            tensor_ok = False
            defects.append(f"piece m={m}: {len(got)} words, tensor expression gives {len(expected)}")
    homJ = realize_hom(J, X, Y, window, maxlen)
    hU, hJ = homU.homology(), homJ.homology()
    qiso, bad = homology_map_iso(homJ, homU, U.inc)
    checks = {
        "subcomplex": subcomplex,
        "tensor_iso": tensor_ok,
        "contraction": contraction_ok,
        "inclusion_qiso": qiso,
    }
    exact = homU.exact and homJ.exact
    if all(checks.values()):
        status = CERT_YES if exact else INCONCLUSIVE
    else:
        status = CERT_NO if exact else INCONCLUSIVE
        if not qiso:
            defects.append(f"homology differs in degree {bad}")
    details = {
        "pieces": {m: len(v) for m, v in sorted(pieces.items())},
        "homology_U": hU.nonzero(),
        "homology_J": hJ.nonzero(),
        "finiteness_U": homU.finiteness.status,
        "finiteness_J": homJ.finiteness.status,
    }
    return VerificationReport(status, checks, defects, details)


def _contract_sum(s: FormalSum, names, h, U) -> FormalSum:
    out = FormalSum()
    for w, c in s.terms.items():
        out = out + c * _contract(w, names, h, U)
    return out


def _tensor_words(J, X, Y, A, B, m, letters, U, maxlen):
    """Words ``u_m e_m ... e_1 u_0`` with old-word slots, built slot by slot."""
    slots = [(X, A)] + [(B, A)] * (m - 1) + [(B, Y)]
    budget = maxlen - m
    if budget < 0:
        return
    # per slot: all old words of length <= budget regardless of degree
    from .realization import all_words

    slot_words = [all_words(J, s, t, budget) for s, t in slots]

    def rec(i, used, acc):
        if i == len(slots):
            yield Word(X, Y, acc)
            return
        for u in slot_words[i]:
            if used + len(u) > budget:
                continue
            if i == 0:
                yield from rec(i + 1, used + len(u), u.arrows)
            else:
                for e in letters:
                    yield from rec(i + 1, used + len(u), u.arrows + (e,) + acc)

    yield from rec(0, 0, ())


def _old_image(w: Word, inc: DgFunctor) -> bool:
    return all(a in inc.source.arrows for a in w.arrows)


def verify_filtration(
    M: PushoutResult, window: GradedWindow, maxlens=(4, 6, 8), pairs=None
) -> VerificationReport:
    """Occurrence-count filtration and truncated-homology comparison with the base."""
    P, L = M.presentation, M.base
    rec = M.record
    if "h" in rec:
        counted = {rec["h"]}
        anchor = {}
    elif "r1" in rec:
        counted = {rec[k] for k in ("r1", "r2", "r12") if k not in rec.get("dropped", [])}
        anchor = {rec["obj"]: M.cell.X}
    else:
        raise CellError("verify_filtration needs an adjoined contraction or homotopy equivalence")
    if pairs is None:
        pairs = [(x, y) for x in P.objects for y in P.objects]
    defects = []
    filtration_ok = True
    zero_piece_old = True
    runs: dict = {}
    for L_ in maxlens:
        per = {}
        for X, Y in pairs:
            hm = realize_hom(P, X, Y, window, L_)
            for w in hm.words:
                m = _count(w, counted)
                for v in P.d_word(w).terms:
                    if _count(v, counted) not in (m, m - 1):
                        filtration_ok = False
                        defects.append(f"d({w}) has term {v} outside the filtration")
                if m == 0 and not _old_image(w, M.inc):
                    zero_piece_old = False
            bx, by = anchor.get(X, X), anchor.get(Y, Y)
            hl = realize_hom(L, bx, by, window, L_)
            per[(X, Y)] = {
                "M": hm.homology().nonzero(),
                "L": hl.homology().nonzero(),
                "base_pair": (bx, by),
                "exact": hm.exact and hl.exact,
            }
        runs[L_] = per
    agree = all(r["M"] == r["L"] for per in runs.values() for r in per.values())
    snaps = [{k: r["M"] for k, r in per.items()} for per in runs.values()]
    stable = all(s == snaps[0] for s in snaps)
    exact = all(r["exact"] for per in runs.values() for r in per.values())
    checks = {"filtration": filtration_ok, "agree": agree, "stable": stable}
    if not filtration_ok:
        status = CERT_NO
    elif agree and stable and exact:
        status = CERT_YES
    else:
        status = INCONCLUSIVE
    if not agree:
        for L_, per in runs.items():
            for k, r in per.items():
                if r["M"] != r["L"]:
                    defects.append(f"maxlen {L_}, Hom{k}: M gives {r['M']}, base gives {r['L']}")
    details = {
        "counted": sorted(counted),
        "zero_piece_is_old": zero_piece_old,
        "runs": {L_: {f"{k[0]}->{k[1]}": {"M": r["M"], "L": r["L"]} for k, r in per.items()}
                 for L_, per in runs.items()},
    }
    return VerificationReport(status, checks, defects, details)


def cell_from_attaching_map(kind: str, n: int | None, top: DgFunctor) -> CellAttachment:
    """Read the cell off a functor from a generating map's source into the base."""
    kind = kind.upper()
    if kind == "Q":
        return AddObject()
    if kind == "IS":
        return KillCycle(n, top.obj("8"), top.obj("9"), top.arrows.get("s", ZERO))
    if kind == "IR":
        return AttachDisk(n, top.obj("4"), top.obj("5"))
    if kind == "IF":
        return AttachHtpyEq(top.obj("3"))
    raise CellError(f"unknown generating map {kind}")
