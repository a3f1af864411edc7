"""Finite cochain complexes over an exact field.

Differentials raise degree by one.  ``d(k)`` is the matrix from degree ``k``
to degree ``k + 1`` with shape ``dim(k+1) x dim(k)``.  Shifts follow
``X[1]^i = X^{i+1}`` with differential ``-d``, and the cone of ``f: X -> Y``
lives in ``Y^k + X^{k+1}`` with ``d(y, x) = (dy + f(x), -dx)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from . import linalg as la
from .field import QQ, Field, field_from_spec


class ComplexError(ValueError):
    pass


class WindowError(ComplexError):
    """Raised when a computation needs degrees a complex does not cover."""


class LiftError(ComplexError):
    pass


@dataclass(frozen=True)
class GradedWindow:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty window {self.lo}..{self.hi}")

    def flanked(self) -> "GradedWindow":
        return GradedWindow(self.lo - 1, self.hi + 1)

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def __contains__(self, k: int) -> bool:
        return self.lo <= k <= self.hi

    def covers(self, other: "GradedWindow") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __str__(self):
        return f"{self.lo}..{self.hi}"


@dataclass(frozen=True)
class Verdict:
    """Three-valued answer: ``yes``, ``no`` (with witness) or ``inconclusive``."""

    status: str
    witness: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.status == "yes"


def _zeros(rows: int, cols: int, zero) -> list[list]:
    return [[zero] * cols for _ in range(rows)]


@dataclass(frozen=True, eq=False)
class Complex:
    field: Field
    dims: dict
    diff: dict
    known: GradedWindow | None = None

    def __post_init__(self):
        dims = {k: v for k, v in self.dims.items() if v}
        object.__setattr__(self, "dims", dims)
        diff = {}
        for k, m in self.diff.items():
            if len(m) != self.dim(k + 1) or any(len(r) != self.dim(k) for r in m):
                raise ComplexError(f"differential in degree {k} has the wrong shape")
            if self.dim(k) and self.dim(k + 1) and not la.is_zero_matrix(m):
                diff[k] = [[self.field(x) for x in row] for row in m]
        object.__setattr__(self, "diff", diff)
        for k in diff:
            if k + 1 in diff:
                sq = la.matmul(diff[k + 1], diff[k], self.field.zero)
                if not la.is_zero_matrix(sq):
                    raise ComplexError(f"d^2 != 0 starting in degree {k}")

    def dim(self, k: int) -> int:
        return self.dims.get(k, 0)

    def d(self, k: int) -> list[list]:
        if k in self.diff:
            return self.diff[k]
        return _zeros(self.dim(k + 1), self.dim(k), self.field.zero)

    @property
    def support(self) -> list[int]:
        return sorted(self.dims)

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def apply_d(self, k: int, v: list) -> list:
        return la.matvec(self.d(k), v, self.field.zero)

    def zero_vector(self, k: int) -> list:
        return [self.field.zero] * self.dim(k)

    def basis_vector(self, k: int, i: int) -> list:
        v = self.zero_vector(k)
        v[i] = self.field.one
        return v

    def same_as(self, other: "Complex") -> bool:
        if self.dims != other.dims:
            return False
        return all(self.d(k) == other.d(k) for k in set(self.diff) | set(other.diff))

    def __repr__(self):
        return f"Complex({self.field}, dims={dict(sorted(self.dims.items()))})"


def zero_complex(F: Field = QQ) -> Complex:
    return Complex(F, {}, {})


def sphere(m: int, F: Field = QQ) -> Complex:
    """The field concentrated in degree ``m``."""
    return Complex(F, {m: 1}, {})


def disk(n: int, F: Field = QQ) -> Complex:
    """Cone of the identity of ``sphere(n - 1)``: degrees ``n-2 -> n-1`` by 1."""
    return Complex(F, {n - 2: 1, n - 1: 1}, {n - 2: [[F.one]]})


@dataclass(frozen=True, eq=False)
class GradedMap:
    """Degree-``degree`` linear map; ``components[k]`` sends degree k to k+degree."""

    source: Complex
    target: Complex
    degree: int
    components: dict

    def comp(self, k: int) -> list[list]:
        if k in self.components:
            return self.components[k]
        F = self.source.field
        return _zeros(self.target.dim(k + self.degree), self.source.dim(k), F.zero)

    def apply(self, k: int, v: list) -> list:
        return la.matvec(self.comp(k), v, self.source.field.zero)

    def degrees(self) -> list[int]:
        return self.source.support


class ChainMap(GradedMap):
    """Degree-0 map commuting with the differentials (checked on construction)."""

    def __init__(self, source: Complex, target: Complex, components: dict):
        super().__init__(source, target, 0, components)
        F = source.field
        for k, m in components.items():
            if len(m) != target.dim(k) or any(len(r) != source.dim(k) for r in m):
                raise ComplexError(f"chain map component {k} has the wrong shape")
        for k in source.support:
            lhs = la.matmul(target.d(k), self.comp(k), F.zero, source.dim(k))
            rhs = la.matmul(self.comp(k + 1), source.d(k), F.zero, source.dim(k))
            if lhs != rhs:
                raise ComplexError(f"chain map does not commute with d in degree {k}")


def identity_map(C: Complex) -> ChainMap:
    F = C.field
    return ChainMap(C, C, components={k: la.identity(n, F.one, F.zero) for k, n in C.dims.items()})


def zero_map(A: Complex, B: Complex) -> ChainMap:
    return ChainMap(A, B, components={})


def compose(g: GradedMap, f: GradedMap) -> GradedMap:
    """``g o f`` as a graded map."""
    F = f.source.field
    comps = {}
    for k in f.source.support:
        comps[k] = la.matmul(g.comp(k + f.degree), f.comp(k), F.zero, f.source.dim(k))
    return GradedMap(f.source, g.target, f.degree + g.degree, comps)


def compose_chain(g: ChainMap, f: ChainMap) -> ChainMap:
    return ChainMap(f.source, g.target, compose(g, f).components)


def direct_sum(A: Complex, B: Complex) -> Complex:
    F = A.field
    dims = {k: A.dim(k) + B.dim(k) for k in set(A.dims) | set(B.dims)}
    diff = {}
    for k in dims:
        a, b = A.d(k), B.d(k)
        rows = []
        for r in a:
            rows.append(list(r) + [F.zero] * B.dim(k))
        for r in b:
            rows.append([F.zero] * A.dim(k) + list(r))
        diff[k] = rows
    return Complex(F, dims, {k: m for k, m in diff.items() if len(m) == dims.get(k + 1, 0)})


def shift(X: Complex, s: int = 1) -> Complex:
    """``X[s]`` with ``X[s]^i = X^{i+s}`` and differential ``(-1)^s d``."""
    sign = -1 if s % 2 else 1
    return Complex(
        X.field,
        {k - s: n for k, n in X.dims.items()},
        {k - s: [[sign * x for x in row] for row in m] for k, m in X.diff.items()},
    )


@dataclass(frozen=True, eq=False)
class Cone:
    complex: Complex
    inclusion: ChainMap
    projection: ChainMap


def cone(f: ChainMap) -> Cone:
    X, Y, F = f.source, f.target, f.source.field
    z = F.zero
    degrees = set(Y.dims) | {k - 1 for k in X.dims}
    dims = {k: Y.dim(k) + X.dim(k + 1) for k in degrees}
    diff = {}
    for k in degrees:
        ty, tx = Y.dim(k + 1), X.dim(k + 2)
        sy, sx = Y.dim(k), X.dim(k + 1)
        dy, fx, dx = Y.d(k), f.comp(k + 1), X.d(k + 1)
        rows = []
        for i in range(ty):
            rows.append([dy[i][j] for j in range(sy)] + [fx[i][j] for j in range(sx)])
        for i in range(tx):
            rows.append([z] * sy + [-dx[i][j] for j in range(sx)])
        if ty + tx:
            diff[k] = rows
    C = Complex(F, dims, diff)
    inc = {}
    proj = {}
    for k in degrees:
        inc[k] = [[F.one if (i == j) else z for j in range(Y.dim(k))] for i in range(C.dim(k))]
        proj[k] = [[F.one if (j == Y.dim(k) + i) else z for j in range(C.dim(k))]
                   for i in range(X.dim(k + 1))]
    inclusion = ChainMap(Y, C, components={k: m for k, m in inc.items() if Y.dim(k)})
    projection = ChainMap(C, shift(X), components={k: m for k, m in proj.items() if C.dim(k)})
    return Cone(C, inclusion, projection)


# ---------------------------------------------------------------- homology

@dataclass(frozen=True)
class HomologyResult:
    window: GradedWindow
    dims: dict
    reps: dict

    def is_zero(self) -> bool:
        return not any(self.dims.values())

    def nonzero(self) -> dict:
        return {k: v for k, v in self.dims.items() if v}


def _check_flanked(C: Complex, w: GradedWindow) -> None:
    if C.known is not None and not C.known.covers(w.flanked()):
        raise WindowError(
            f"window {w} needs degrees {w.flanked()} but the complex is only known on {C.known}"
        )


def cycles(C: Complex, k: int) -> list[dict]:
    cols = la.columns_of(C.d(k), C.dim(k))
    return la.kernel(cols)


def boundaries(C: Complex, k: int) -> list[dict]:
    return [c for c in la.columns_of(C.d(k - 1), C.dim(k - 1)) if c]


def homology(C: Complex, w: GradedWindow) -> HomologyResult:
    """Per-degree homology dimensions and cycle representatives on ``w``."""
    _check_flanked(C, w)
    dims, reps = {}, {}
    F = C.field
    for k in w.degrees():
        z = cycles(C, k)
        b = boundaries(C, k)
        picked = la.quotient_reps(b, z)
        dims[k] = len(picked)
        reps[k] = [la.dense_vector(z[i], C.dim(k), F.zero) for i in picked]
    return HomologyResult(w, dims, reps)


def is_cycle(C: Complex, k: int, v: list) -> bool:
    return not any(C.apply_d(k, v))


def is_boundary(C: Complex, k: int, v: list) -> bool:
    return la.span(boundaries(C, k)).contains(la.sparse_vector(v))


def induced_homology_iso(p: ChainMap, w: GradedWindow) -> tuple[bool, int | None]:
    """Whether ``p`` induces isomorphisms on homology in ``w``; else a failing degree."""
    src = homology(p.source, w)
    tgt = homology(p.target, w)
    for k in w.degrees():
        if src.dims[k] != tgt.dims[k]:
            return False, k
        images = [la.sparse_vector(p.apply(k, r)) for r in src.reps[k]]
        picked = la.quotient_reps(boundaries(p.target, k), images)
        if len(picked) != len(images):
            return False, k
    return True, None


def check_surj_qiso(p: ChainMap, w: GradedWindow) -> Verdict:
    """Surjective in every degree of ``w`` and a homology isomorphism on ``w``."""
    try:
        _check_flanked(p.source, w)
        _check_flanked(p.target, w)
    except WindowError as e:
        return Verdict("inconclusive", details={"reason": str(e)})
    for k in w.degrees():
        r = la.rank(la.columns_of(p.comp(k), p.source.dim(k)))
        if r < p.target.dim(k):
            return Verdict("no", witness={"kind": "not-surjective", "degree": k,
                                          "rank": r, "target_dim": p.target.dim(k)})
    ok, bad = induced_homology_iso(p, w)
    if not ok:
        return Verdict("no", witness={
            "kind": "homology-mismatch", "degree": bad,
            "source_dim": homology(p.source, w).dims[bad],
            "target_dim": homology(p.target, w).dims[bad],
        })
    return Verdict("yes")


def lift_sphere_disk(p: ChainMap, z: list, w: list, *, degree: int) -> list:
    """Solve ``p(v) = w`` and ``dv = z`` for a cycle ``z`` of the given degree.

    ``w`` lives in degree ``degree - 1`` of the target and satisfies
    ``dw = p(z)``.  Takes a preimage of ``w`` and corrects it by an element of
    ``ker p``; raises :class:`LiftError` if the linear system has no solution
    inside the complex as given.
    """
    S, T, F = p.source, p.target, p.source.field
    k = degree - 1
    if any(S.apply_d(degree, z)):
        raise LiftError("z is not a cycle")
    if la.sparse_vector(T.apply_d(k, w)) != la.sparse_vector(p.apply(degree, z)):
        raise LiftError("square does not commute: dw != p(z)")
    pk = la.columns_of(p.comp(k), S.dim(k))
    coeffs = la.solve(pk, la.sparse_vector(w))
    if coeffs is None:
        raise LiftError(f"window insufficient: no preimage of w in degree {k}")
    v0 = la.dense_vector(coeffs, S.dim(k), F.zero)
    resid = la.sparse_vector([a - b for a, b in zip(z, S.apply_d(k, v0))])
    ker = [la.dense_vector(r, S.dim(k), F.zero) for r in la.kernel(pk)]
    dker = [la.sparse_vector(S.apply_d(k, kv)) for kv in ker]
    c = la.solve(dker, resid)
    if c is None:
        raise LiftError(f"window insufficient: kernel of p not acyclic in degree {degree}")
    v = list(v0)
    for i, a in c.items():
        v = [x + a * y for x, y in zip(v, ker[i])]
    assert la.sparse_vector(p.apply(k, v)) == la.sparse_vector(w)
    assert la.sparse_vector(S.apply_d(k, v)) == la.sparse_vector(z)
    return v


def sphere_disk_obstructed(p: ChainMap, z: list, w: list, *, degree: int) -> bool:
    """Independent re-check: the joint system ``p(v)=w, dv=z`` is infeasible."""
    S = p.source
    k = degree - 1
    cols = []
    for i in range(S.dim(k)):
        e = S.basis_vector(k, i)
        col = {("p", j): x for j, x in enumerate(p.apply(k, e)) if x}
        col.update({("d", j): x for j, x in enumerate(S.apply_d(k, e)) if x})
        cols.append(col)
    rhs = {("p", j): x for j, x in enumerate(w) if x}
    rhs.update({("d", j): x for j, x in enumerate(z) if x})
    return la.solve(cols, rhs) is None


# ------------------------------------------------------------ contractions

def contraction_of_cone_id(m: int, F: Field = QQ) -> GradedMap:
    """Degree -1 map ``h`` on ``disk(m + 1)`` with ``dh + hd = id``."""
    D = disk(m + 1, F)
    h = GradedMap(D, D, -1, {m: [[F.one]]})
    assert is_contraction(D, h)
    return h


def is_contraction(C: Complex, h: GradedMap) -> bool:
    if h.degree != -1:
        return False
    F = C.field
    for k in C.support:
        a = la.matmul(C.d(k - 1), h.comp(k), F.zero, C.dim(k))
        b = la.matmul(h.comp(k + 1), C.d(k), F.zero, C.dim(k))
        s = [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]
        if s != la.identity(C.dim(k), F.one, F.zero):
            return False
    return True


def conjugate(h: GradedMap, phi: ChainMap) -> GradedMap:
    """Transport ``h`` along an isomorphism ``phi``: ``phi h phi^-1``."""
    F = phi.source.field
    inv = {}
    for k in phi.target.support:
        m = la.inverse(phi.comp(k), F.one, F.zero)
        if m is None:
            raise ComplexError(f"not an isomorphism in degree {k}")
        inv[k] = m
    phi_inv = ChainMap(phi.target, phi.source, components=inv)
    out = compose(phi, compose(h, phi_inv))
    return GradedMap(phi.target, phi.target, h.degree, out.components)


# ----------------------------------------------------------- hom complexes

@dataclass(frozen=True, eq=False)
class HomComplex:
    """``Hom(A, B)`` with basis the matrix entries of each graded piece."""

    A: Complex
    B: Complex
    complex: Complex
    index: dict
    labels: dict

    def to_vector(self, f: GradedMap) -> list:
        v = self.complex.zero_vector(f.degree)
        for (i, r, c), pos in self.index[f.degree].items():
            v[pos] = f.comp(i)[r][c]
        return v

    def to_map(self, k: int, v: list) -> GradedMap:
        F = self.A.field
        comps = {i: _zeros(self.B.dim(i + k), self.A.dim(i), F.zero) for i in self.A.support}
        for pos, (i, r, c) in enumerate(self.labels.get(k, [])):
            if v[pos]:
                comps[i][r][c] = v[pos]
        return GradedMap(self.A, self.B, k, comps)


def hom_complex(A: Complex, B: Complex) -> HomComplex:
    F = A.field
    degs = set()
    for i in A.support:
        for j in B.support:
            degs.add(j - i)
    labels, index = {}, {}
    for k in sorted(degs):
        lab = [(i, r, c) for i in A.support for r in range(B.dim(i + k)) for c in range(A.dim(i))]
        if lab:
            labels[k] = lab
            index[k] = {x: n for n, x in enumerate(lab)}
    dims = {k: len(v) for k, v in labels.items()}
    diff = {}
    for k in labels:
        if k + 1 not in labels:
            continue
        sign = -1 if k % 2 else 1
        cols = []
        for (i, r, c) in labels[k]:
            col = [F.zero] * dims[k + 1]
            # d_B o e_{rc}: row r of degree i+k goes to column of B.d(i+k)
            dB = B.d(i + k)
            for rr in range(B.dim(i + k + 1)):
                x = dB[rr][r]
                if x:
                    col[index[k + 1][(i, rr, c)]] += x
            # -(-1)^k e_{rc} o d_A, d_A from degree i-1 to i
            dA = A.d(i - 1)
            for cc in range(A.dim(i - 1)):
                x = dA[c][cc]
                if x:
                    col[index[k + 1][(i - 1, r, cc)]] += -sign * x
            cols.append(col)
        diff[k] = [[cols[j][i] for j in range(dims[k])] for i in range(dims[k + 1])]
    return HomComplex(A, B, Complex(F, dims, diff), index, labels)


def hom_map(H1: HomComplex, H2: HomComplex, pre: ChainMap, post: ChainMap) -> ChainMap:
    """``phi -> post o phi o pre`` from ``Hom(A1, B1)`` to ``Hom(A2, B2)``.

    ``pre: A2 -> A1`` and ``post: B1 -> B2`` are chain maps.
    """
    comps = {}
    for k, lab in H1.labels.items():
        cols = []
        for pos in range(len(lab)):
            e = H1.complex.basis_vector(k, pos)
            img = compose(post, compose(H1.to_map(k, e), pre))
            img = GradedMap(H2.A, H2.B, k, img.components)
            cols.append(H2.to_vector(img) if k in H2.labels else [])
        n2 = H2.complex.dim(k)
        comps[k] = [[cols[j][i] for j in range(len(lab))] for i in range(n2)]
    return ChainMap(H1.complex, H2.complex, components={k: m for k, m in comps.items() if m})


def transport_contraction(pre: ChainMap, post: ChainMap, h: GradedMap) -> GradedMap:
    """Lift a contraction ``h`` of ``C1`` to one of ``C2`` through ``phi -> post phi pre``.

    ``pre: C1 -> C2`` and ``post: C2 -> C1``; the induced map
    ``End(C2) -> End(C1)`` must be a surjective quasi-isomorphism sending
    the identity to the identity.  The lift is the pair ``(h, 1)`` fed to
    :func:`lift_sphere_disk`.
    """
    C2, C1 = pre.target, pre.source
    E2, E1 = hom_complex(C2, C2), hom_complex(C1, C1)
    p = hom_map(E2, E1, pre, post)
    one = E2.to_vector(identity_map(C2))
    hv = E1.to_vector(h)
    v = lift_sphere_disk(p, one, hv, degree=0)
    hstar = E2.to_map(-1, v)
    assert is_contraction(C2, hstar)
    return hstar


# ---------------------------------------------------------- serialization

def to_text(C: Complex) -> str:
    F = C.field
    lines = [f"ring {F.name if F.name == 'Q' else 'F ' + str(F.p)}"]
    for k in C.support:
        lines.append(f"deg {k} dim {C.dim(k)}")
    for k in sorted(C.diff):
        entries = " ".join(F.format(x) for row in C.diff[k] for x in row)
        lines.append(f"d {k} = {entries}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Complex:
    F: Field = QQ
    dims: dict = {}
    raw: dict = {}
    for no, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "ring":
                F = field_from_spec("".join(parts[1:]))
            elif parts[0] == "deg" and len(parts) == 4 and parts[2] == "dim":
                dims[int(parts[1])] = int(parts[3])
            elif parts[0] == "d" and len(parts) >= 3 and parts[2] == "=":
                raw[int(parts[1])] = parts[3:]
            else:
                raise ValueError("unrecognized line")
        except (ValueError, IndexError) as e:
            raise ComplexError(f"line {no}: {e}: {line!r}") from None
    diff = {}
    for k, entries in raw.items():
        rows, cols = dims.get(k + 1, 0), dims.get(k, 0)
        if len(entries) != rows * cols:
            raise ComplexError(f"d {k} needs {rows * cols} entries, got {len(entries)}")
        vals = [F(Fraction(e)) for e in entries]
        diff[k] = [vals[i * cols:(i + 1) * cols] for i in range(rows)]
    return Complex(F, dims, diff)


def chain_map_from_matrices(A: Complex, B: Complex, mats: dict) -> ChainMap:
    F = A.field
    return ChainMap(A, B, components={k: [[F(x) for x in row] for row in m] for k, m in mats.items()})


def vector_space_sum(vectors: Iterable[list], zero) -> list:
    out = None
    for v in vectors:
        out = list(v) if out is None else [a + b for a, b in zip(out, v)]
    return out if out is not None else []
