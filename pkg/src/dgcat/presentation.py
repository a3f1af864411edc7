"""Semi-free dg categories given by graded quivers with differentials on arrows.

Words are written in composition order: ``Word(x, y, ("g", "f"))`` is
``g.f``, so ``f`` is applied first.  The differential extends to words by
the Leibniz rule ``d(w.v) = d(w).v + (-1)^|w| w.d(v)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Mapping

from .field import QQ, Field


class PresentationError(ValueError):
    pass


class Word:
    """A composable string of arrows from ``src`` to ``dst`` (or an identity)."""

    __slots__ = ("src", "dst", "arrows", "_key", "_hash")

    def __init__(self, src: str, dst: str, arrows: tuple = ()):
        if not arrows and src != dst:
            raise PresentationError(f"empty word needs src == dst, got {src} -> {dst}")
        self.src = src
        self.dst = dst
        self.arrows = tuple(arrows)
        self._key = (len(self.arrows), self.arrows[::-1], src, dst)
        self._hash = hash(self._key)

    @property
    def is_identity(self) -> bool:
        return not self.arrows

    def __len__(self):
        return len(self.arrows)

    def __eq__(self, other):
        return isinstance(other, Word) and self._key == other._key

    def __lt__(self, other):
        return self._key < other._key

    def __le__(self, other):
        return self._key <= other._key

    def __gt__(self, other):
        return self._key > other._key

    def __hash__(self):
        return self._hash

    def __matmul__(self, other: "Word") -> "Word":
        """``self . other`` (other first)."""
        if other.dst != self.src:
            raise PresentationError(f"cannot compose {self} after {other}")
        return Word(other.src, self.dst, self.arrows + other.arrows)

    def __str__(self):
        return ".".join(self.arrows) if self.arrows else f"id_{self.src}"

    def __repr__(self):
        return f"Word({self})"


class FormalSum:
    """Finite linear combination of words; zero coefficients are never stored."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        self.terms = {w: c for w, c in (terms or {}).items() if c}

    @classmethod
    def of(cls, word: Word, coeff=1) -> "FormalSum":
        return cls({word: coeff})

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms))

    def items(self):
        return sorted(self.terms.items(), key=lambda t: t[0])

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, FormalSum):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "FormalSum") -> "FormalSum":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return FormalSum(out)

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        return self + (-other)

    def __neg__(self) -> "FormalSum":
        return FormalSum({w: -c for w, c in self.terms.items()})

    def __rmul__(self, c) -> "FormalSum":
        return FormalSum({w: c * x for w, x in self.terms.items()})

    def __matmul__(self, other: "FormalSum") -> "FormalSum":
        """Bilinear composition ``self . other``."""
        out: dict = {}
        for w, a in self.terms.items():
            for v, b in other.terms.items():
                u = w @ v
                out[u] = out.get(u, 0) + a * b
        return FormalSum(out)

    def endpoints(self) -> set:
        return {(w.src, w.dst) for w in self.terms}

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{w}" for w, c in self.items())

    __repr__ = __str__


ZERO = FormalSum()


@dataclass(frozen=True)
class Arrow:
    name: str
    src: str
    dst: str
    degree: int


class DgPresentation:
    """Graded quiver with a differential on generators, optionally pointed."""

    def __init__(
        self,
        objects: Iterable[str],
        arrows: Iterable[Arrow],
        d: Mapping[str, FormalSum] | None = None,
        zero: str | None = None,
        field: Field = QQ,
        name: str = "",
    ):
        self.objects = tuple(objects)
        if len(set(self.objects)) != len(self.objects):
            raise PresentationError("duplicate object names")
        self.arrows: dict[str, Arrow] = {}
        for a in arrows:
            if a.name in self.arrows:
                raise PresentationError(f"duplicate arrow {a.name}")
            if a.src not in self.objects or a.dst not in self.objects:
                raise PresentationError(f"arrow {a.name}: unknown endpoint")
            if zero is not None and zero in (a.src, a.dst):
                raise PresentationError(f"arrow {a.name} is incident to the zero object {zero}")
            self.arrows[a.name] = a
        if zero is not None and zero not in self.objects:
            raise PresentationError(f"zero object {zero} is not an object")
        self.zero = zero
        self.field = field
        self.name = name
        self.d: dict[str, FormalSum] = {}
        for k, v in (d or {}).items():
            if k not in self.arrows:
                raise PresentationError(f"differential given for unknown arrow {k}")
            if v:
                self.d[k] = FormalSum({w: field(c) for w, c in v.terms.items()})
        self._dcache: dict = {}
        self._out: dict = {x: [] for x in self.objects}
        for a in self.arrows.values():
            self._out[a.src].append(a)

    # -- basic queries
    def is_zero(self, x: str) -> bool:
        return x == self.zero

    @property
    def pointed(self) -> bool:
        return self.zero is not None

    def arrow_degree(self, name: str) -> int:
        return self.arrows[name].degree

    def degree(self, w: Word) -> int:
        return sum(self.arrows[a].degree for a in w.arrows)

    def out_arrows(self, x: str) -> list[Arrow]:
        return self._out[x]

    def identity(self, x: str) -> FormalSum:
        if self.is_zero(x):
            return ZERO
        return FormalSum.of(Word(x, x), self.field.one)

    def gen(self, name: str) -> FormalSum:
        a = self.arrows[name]
        return FormalSum.of(Word(a.src, a.dst, (name,)), self.field.one)

    def word(self, *names: str) -> Word:
        """Word from arrow names in composition order, e.g. ``word('g', 'f')``."""
        if not names:
            raise PresentationError("use identity() for empty words")
        arrows = [self.arrows[n] for n in names]
        for left, right in zip(arrows, arrows[1:]):
            if right.dst != left.src:
                raise PresentationError(f"{left.name} cannot follow {right.name}")
        return Word(arrows[-1].src, arrows[0].dst, names)

    def hom_degree_of(self, s: FormalSum) -> int | None:
        degs = {self.degree(w) for w in s.terms}
        return degs.pop() if len(degs) == 1 else None

    # -- differential
    def d_word(self, w: Word) -> FormalSum:
        got = self._dcache.get(w)
        if got is not None:
            return got
        out: dict = {}
        left_deg = 0
        arrows = w.arrows
        for j, a in enumerate(arrows):
            da = self.d.get(a)
            if da:
                sign = -1 if left_deg % 2 else 1
                left, right = arrows[:j], arrows[j + 1:]
                for u, c in da.terms.items():
                    new = left + u.arrows + right
                    v = Word(w.src, w.dst, new)
                    out[v] = out.get(v, 0) + sign * c
            left_deg += self.arrows[a].degree
        res = FormalSum(out)
        self._dcache[w] = res
        return res

    def differential(self, s: FormalSum) -> FormalSum:
        out: dict = {}
        for w, c in s.terms.items():
            for v, e in self.d_word(w).terms.items():
                out[v] = out.get(v, 0) + c * e
        return FormalSum(out)

    def same_as(self, other: "DgPresentation") -> bool:
        return (
            set(self.objects) == set(other.objects)
            and self.arrows == other.arrows
            and self.d == other.d
            and self.zero == other.zero
            and self.field == other.field
        )

    def __repr__(self):
        return f"DgPresentation({self.name or '?'}: {len(self.objects)} objects, {len(self.arrows)} arrows)"


@dataclass
class Report:
    ok: bool
    defects: list = dc_field(default_factory=list)

    def __bool__(self):
        return self.ok


def _word_defects(P: DgPresentation, w: Word) -> str | None:
    if w.is_identity:
        if w.src not in P.objects:
            return f"identity on unknown object {w.src}"
        return None
    for a in w.arrows:
        if a not in P.arrows:
            return f"unknown arrow {a}"
    cur = w.src
    for a in reversed(w.arrows):
        arr = P.arrows[a]
        if arr.src != cur:
            return f"word {w} is not composable at {a}"
        cur = arr.dst
    if cur != w.dst:
        return f"word {w} ends at {cur}, not {w.dst}"
    return None


def validate(P: DgPresentation) -> Report:
    """Degree bookkeeping for every generator and ``d^2 = 0`` via Leibniz."""
    defects = []
    for name, a in P.arrows.items():
        da = P.d.get(name, ZERO)
        bad = False
        for w in da.terms:
            msg = _word_defects(P, w)
            if msg:
                defects.append(f"d({name}): {msg}")
                bad = True
                continue
            if (w.src, w.dst) != (a.src, a.dst):
                defects.append(f"d({name}): endpoint mismatch, term {w} is {w.src}->{w.dst} "
                               f"but {name} is {a.src}->{a.dst}")
                bad = True
            elif P.degree(w) != a.degree + 1:
                defects.append(f"d({name}): degree error, term {w} has degree {P.degree(w)}, "
                               f"expected {a.degree + 1}")
                bad = True
        if bad:
            continue
        dd = P.differential(da)
        if dd:
            defects.append(f"d^2({name}) = {dd} != 0")
    return Report(not defects, defects)


# ---------------------------------------------------------------- functors

class DgFunctor:
    """A dg functor between presentations, stored on generators."""

    def __init__(
        self,
        source: DgPresentation,
        target: DgPresentation,
        objects: Mapping[str, str],
        arrows: Mapping[str, FormalSum],
        name: str = "",
    ):
        self.source = source
        self.target = target
        self.objects = dict(objects)
        F = target.field
        self.arrows = {k: FormalSum({w: F(c) for w, c in v.terms.items()}) for k, v in arrows.items()}
        self.name = name
        self._cache: dict = {}

    def obj(self, x: str) -> str:
        return self.objects[x]

    def apply_word(self, w: Word) -> FormalSum:
        got = self._cache.get(w)
        if got is not None:
            return got
        if w.is_identity:
            res = self.target.identity(self.objects[w.src])
        else:
            res = None
            for a in reversed(w.arrows):
                img = self.arrows.get(a, ZERO)
                res = img if res is None else img @ res
                if not res:
                    break
        self._cache[w] = res
        return res

    def apply(self, s: FormalSum) -> FormalSum:
        out: dict = {}
        for w, c in s.terms.items():
            for v, e in self.apply_word(w).terms.items():
                out[v] = out.get(v, 0) + c * e
        return FormalSum(out)

    def __repr__(self):
        return f"DgFunctor({self.name or '?'}: {self.source.name} -> {self.target.name})"


def validate_functor(F: DgFunctor) -> Report:
    S, T = F.source, F.target
    defects = []
    for x in S.objects:
        if x not in F.objects:
            defects.append(f"object {x} has no image")
        elif F.objects[x] not in T.objects:
            defects.append(f"object {x} maps to unknown {F.objects[x]}")
    for x in F.objects:
        if x not in S.objects:
            defects.append(f"object map mentions unknown source object {x}")
    if S.pointed and T.pointed and F.objects.get(S.zero) != T.zero:
        defects.append(f"zero object {S.zero} must map to {T.zero}")
    if defects:
        return Report(False, defects)
    for name in F.arrows:
        if name not in S.arrows:
            defects.append(f"image given for unknown arrow {name}")
    for name, a in S.arrows.items():
        img = F.arrows.get(name, ZERO)
        want = (F.objects[a.src], F.objects[a.dst])
        ok = True
        for w in img.terms:
            msg = _word_defects(T, w)
            if msg:
                defects.append(f"F({name}): {msg}")
                ok = False
            elif (w.src, w.dst) != want:
                defects.append(f"F({name}): term {w} is {w.src}->{w.dst}, expected {want[0]}->{want[1]}")
                ok = False
            elif T.degree(w) != a.degree:
                defects.append(f"F({name}): term {w} has degree {T.degree(w)}, expected {a.degree}")
                ok = False
        if not ok:
            continue
        lhs = F.apply(S.d.get(name, ZERO))
        rhs = T.differential(img)
        if lhs != rhs:
            defects.append(f"chain condition fails on {name}: F(d {name}) = {lhs} but d F({name}) = {rhs}")
    return Report(not defects, defects)


def identity_functor(P: DgPresentation) -> DgFunctor:
    return DgFunctor(P, P, {x: x for x in P.objects}, {a: P.gen(a) for a in P.arrows}, name="id")


def compose_functors(G: DgFunctor, F: DgFunctor) -> DgFunctor:
    """``G o F``."""
    objs = {x: G.objects[y] for x, y in F.objects.items()}
    arrows = {a: G.apply(img) for a, img in F.arrows.items()}
    return DgFunctor(F.source, G.target, objs, arrows, name=f"{G.name}.{F.name}")


def functors_equal(F: DgFunctor, G: DgFunctor) -> bool:
    """Same object map and the same image on every source generator."""
    if F.objects != G.objects:
        return False
    for a in set(F.source.arrows) | set(G.source.arrows):
        if F.arrows.get(a, ZERO) != G.arrows.get(a, ZERO):
            return False
    return True


# ---------------------------------------------------- pointed structure (I)

def _fresh(name: str, taken) -> str:
    if name not in taken:
        return name
    i = 1
    while f"{name}_{i}" in taken:
        i += 1
    return f"{name}_{i}"


def add_point(C: DgPresentation, name: str = "p") -> DgPresentation:
    """Adjoin a zero object (the functor I)."""
    if C.pointed:
        raise PresentationError("presentation is already pointed")
    p = _fresh(name, set(C.objects) | set(C.arrows))
    return DgPresentation(
        C.objects + (p,), C.arrows.values(), C.d, zero=p, field=C.field,
        name=f"I{C.name}" if C.name else "",
    )


def forget_point(P: DgPresentation) -> DgPresentation:
    if not P.pointed:
        return P
    objs = tuple(x for x in P.objects if x != P.zero)
    name = P.name[1:] if P.name.startswith("I") else P.name
    return DgPresentation(objs, P.arrows.values(), P.d, field=P.field, name=name)


def point_functor(F: DgFunctor, source: DgPresentation | None = None,
                  target: DgPresentation | None = None) -> DgFunctor:
    """``I(F)``: the same functor between the pointed presentations."""
    S = source or add_point(F.source)
    T = target or add_point(F.target)
    objs = dict(F.objects)
    objs[S.zero] = T.zero
    return DgFunctor(S, T, objs, F.arrows, name=f"I{F.name}" if F.name else "")


# ------------------------------------------------------------------ builders

def cat_A(field: Field = QQ) -> DgPresentation:
    return DgPresentation(["3"], [], field=field, name="A")


def cat_B(field: Field = QQ) -> DgPresentation:
    return DgPresentation(["4", "5"], [], field=field, name="B")


def cat_C(n: int, field: Field = QQ) -> DgPresentation:
    """Objects 8, 9 with ``Hom(8, 9)`` the sphere on one closed arrow ``s`` of degree n-1."""
    return DgPresentation(["8", "9"], [Arrow("s", "8", "9", n - 1)], field=field, name=f"C({n})")


def cat_P(n: int, field: Field = QQ) -> DgPresentation:
    """Objects 6, 7 with ``Hom(6, 7)`` the disk: ``l`` in degree n-2, ``j = dl``."""
    arrows = [Arrow("l", "6", "7", n - 2), Arrow("j", "6", "7", n - 1)]
    d = {"l": FormalSum.of(Word("6", "7", ("j",)), 1)}
    return DgPresentation(["6", "7"], arrows, d, field=field, name=f"P({n})")


def cat_K(field: Field = QQ) -> DgPresentation:
    one, two = "1", "2"
    arrows = [
        Arrow("f", one, two, 0),
        Arrow("g", two, one, 0),
        Arrow("r1", one, one, -1),
        Arrow("r2", two, two, -1),
        Arrow("r12", one, two, -2),
    ]
    w = lambda *a: Word(_src(arrows, a), _dst(arrows, a), a)  # noqa: E731
    d = {
        "r1": FormalSum({w("g", "f"): 1, Word(one, one): -1}),
        "r2": FormalSum({w("f", "g"): 1, Word(two, two): -1}),
        "r12": FormalSum({w("f", "r1"): 1, w("r2", "f"): -1}),
    }
    return DgPresentation([one, two], arrows, d, field=field, name="K")


def _src(arrows, names):
    by = {a.name: a for a in arrows}
    return by[names[-1]].src


def _dst(arrows, names):
    by = {a.name: a for a in arrows}
    return by[names[0]].dst


def cat_O(field: Field = QQ) -> DgPresentation:
    """The initial pointed presentation: one zero object."""
    return DgPresentation(["p"], [], zero="p", field=field, name="O")


def fun_F(field: Field = QQ) -> DgFunctor:
    return DgFunctor(cat_A(field), cat_K(field), {"3": "1"}, {}, name="F")


def fun_R(n: int, field: Field = QQ) -> DgFunctor:
    return DgFunctor(cat_B(field), cat_P(n, field), {"4": "6", "5": "7"}, {}, name=f"R({n})")


def fun_S(n: int, field: Field = QQ) -> DgFunctor:
    P = cat_P(n, field)
    return DgFunctor(cat_C(n, field), P, {"8": "6", "9": "7"}, {"s": P.gen("j")}, name=f"S({n})")


def fun_Q(field: Field = QQ) -> DgFunctor:
    return DgFunctor(cat_O(field), add_point(cat_A(field)), {"p": "p"}, {}, name="Q")


def pointed(name: str, n: int | None = None, field: Field = QQ) -> DgPresentation:
    """Pointed builder by letter: ``pointed('C', 1)`` is ``I C(1)``."""
    base = builtin(name, n, field)
    return base if base.pointed else add_point(base)


def builtin(name: str, n: int | None = None, field: Field = QQ) -> DgPresentation:
    name = name.upper()
    if name in ("C", "P"):
        if n is None:
            raise PresentationError(f"{name} needs an integer parameter n")
        return (cat_C if name == "C" else cat_P)(n, field)
    table = {"A": cat_A, "B": cat_B, "K": cat_K, "O": cat_O}
    if name not in table:
        raise PresentationError(f"unknown built-in {name}")
    return table[name](field)


def generating_map(kind: str, n: int | None = None, field: Field = QQ) -> DgFunctor:
    """The pointed generating (acyclic) cofibrations ``Q, IS(n), IR(n), IF``."""
    kind = kind.upper()
    if kind == "Q":
        return fun_Q(field)
    if kind in ("IS", "S"):
        return point_functor(fun_S(n, field))
    if kind in ("IR", "R"):
        return point_functor(fun_R(n, field))
    if kind in ("IF", "F"):
        return point_functor(fun_F(field))
    raise PresentationError(f"unknown generating map {kind}")
