"""Seeded random instances: complexes, chain maps and small presentations.

Everything is driven by ``random.Random(seed)`` so a seed always yields the
same object.  Bimodule categories have two objects ``X, Y`` with
``Hom(X, Y)`` a given complex (one generator per basis vector) and no
arrows back, which keeps every hom certified finite.
"""

from __future__ import annotations

import random

from . import linalg as la
from .complexes import ChainMap, Complex, direct_sum, disk, sphere
from .field import QQ, Field
from .presentation import Arrow, DgFunctor, DgPresentation, FormalSum, Word, add_point
from .realization import enumerate_words
from .complexes import GradedWindow

DEGREES = (-2, -1, 0, 1, 2)


def _scalar(rng: random.Random, F: Field, nonzero: bool = False):
    while True:
        x = F(rng.randint(-3, 3))
        if x or not nonzero:
            return x


def random_invertible(rng: random.Random, n: int, F: Field) -> list[list]:
    while True:
        m = [[_scalar(rng, F) for _ in range(n)] for _ in range(n)]
        if la.inverse(m, F.one, F.zero) is not None:
            return m


def change_basis(C: Complex, mats: dict) -> Complex:
    """``d_k -> P_{k+1} d_k P_k^{-1}``."""
    F = C.field
    inv = {k: la.inverse(m, F.one, F.zero) for k, m in mats.items()}
    diff = {}
    for k in C.dims:
        if C.dim(k + 1):
            d = la.matmul(mats[k + 1], C.d(k), F.zero, C.dim(k))
            diff[k] = la.matmul(d, inv[k], F.zero, C.dim(k))
    return Complex(F, C.dims, diff)


def random_complex(rng: random.Random, F: Field = QQ, max_total: int = 6,
                   degrees=DEGREES, acyclic: bool = False) -> tuple[Complex, dict]:
    """A sum of spheres and disks in a random basis; returns (complex, basis change)."""
    C = Complex(F, {}, {})
    budget = rng.randint(1, max_total)
    while C.total_dim < budget:
        room = budget - C.total_dim
        if room >= 2 and (acyclic or rng.random() < 0.5):
            C = direct_sum(C, disk(rng.choice(degrees) + 1, F))
        elif not acyclic:
            C = direct_sum(C, sphere(rng.choice(degrees), F))
        else:
            break
    mats = {k: random_invertible(rng, n, F) for k, n in C.dims.items()}
    return change_basis(C, mats), mats


def random_surj_qiso(rng: random.Random, F: Field = QQ, max_total: int = 8) -> ChainMap:
    """``p: N + D -> N`` with D acyclic, twisted by random chain maps and bases."""
    N, _ = random_complex(rng, F, max(1, max_total // 2))
    D = Complex(F, {}, {})
    while D.total_dim + 2 <= max_total - N.total_dim and rng.random() < 0.8:
        D = direct_sum(D, disk(rng.choice(DEGREES) + 1, F))
    M = direct_sum(N, D)
    # phi: D -> N is free on the bottom generator of each disk summand
    phi: dict = {k: [[F.zero] * D.dim(k) for _ in range(N.dim(k))] for k in D.dims}
    for k in sorted(D.dims):
        for i in range(D.dim(k)):
            col = [row[i] for row in D.d(k)]
            if not any(col):
                continue  # a top generator, its image is forced below
            x = [_scalar(rng, F) for _ in range(N.dim(k))]
            for r in range(N.dim(k)):
                phi[k][r][i] = x[r]
            dx = N.apply_d(k, x)
            j = next(t for t, c in enumerate(col) if c)
            phi.setdefault(k + 1, [[F.zero] * D.dim(k + 1) for _ in range(N.dim(k + 1))])
            for r in range(N.dim(k + 1)):
                phi[k + 1][r][j] = dx[r] / col[j]
    comps = {}
    for k in M.dims:
        nk, dk = N.dim(k), D.dim(k)
        rows = []
        for r in range(nk):
            rows.append([F.one if c == r else F.zero for c in range(nk)]
                        + [phi.get(k, [[F.zero] * dk] * nk)[r][c] for c in range(dk)])
        comps[k] = rows
    p = ChainMap(M, N, comps)
    # random bases on both ends
    P = {k: random_invertible(rng, n, F) for k, n in M.dims.items()}
    Qm = {k: random_invertible(rng, n, F) for k, n in N.dims.items()}
    M2, N2 = change_basis(M, P), change_basis(N, Qm)
    comps2 = {}
    for k in M.dims:
        if not N.dim(k):
            continue
        inv = la.inverse(P[k], F.one, F.zero)
        comps2[k] = la.matmul(la.matmul(Qm[k], p.comp(k), F.zero, M.dim(k)), inv, F.zero, M.dim(k))
    return ChainMap(M2, N2, comps2)


def random_non_qiso_map(rng: random.Random, F: Field = QQ, max_total: int = 8) -> ChainMap:
    """A chain map failing to be a surjective quasi-isomorphism."""
    kind = rng.choice(["extra-sphere", "not-surjective", "zero-to-sphere"])
    N, _ = random_complex(rng, F, max(1, max_total // 2))
    if kind == "extra-sphere":
        S = sphere(rng.choice(DEGREES), F)
        M = direct_sum(N, S)
        comps = {k: [[F.one if c == r else F.zero for c in range(M.dim(k))] for r in range(N.dim(k))]
                 for k in M.dims if N.dim(k)}
        return ChainMap(M, N, comps)
    if kind == "not-surjective":
        T = direct_sum(N, disk(rng.choice(DEGREES) + 1, F))
        comps = {k: [[F.one if c == r else F.zero for c in range(N.dim(k))] for r in range(T.dim(k))]
                 for k in N.dims}
        return ChainMap(N, T, comps)
    m = rng.choice(DEGREES)
    return ChainMap(N, sphere(m, F), {m: [[F.zero] * N.dim(m)]} if N.dim(m) else {})


# --------------------------------------------------------- bimodule cats

def _arrow_names(C: Complex, prefix: str) -> dict:
    out = {}
    i = 0
    for k in sorted(C.dims):
        for j in range(C.dim(k)):
            out[(k, j)] = f"{prefix}{i}"
            i += 1
    return out


def bimodule(C: Complex, prefix: str = "a", pointed: bool = True, extra_objects=()) -> DgPresentation:
    """Objects X, Y with ``Hom(X, Y) = C`` spanned by single arrows."""
    names = _arrow_names(C, prefix)
    arrows = [Arrow(nm, "X", "Y", k) for (k, j), nm in names.items()]
    d = {}
    for (k, j), nm in names.items():
        terms = {}
        for r, row in enumerate(C.d(k)):
            if row[j]:
                terms[Word("X", "Y", (names[(k + 1, r)],))] = row[j]
        if terms:
            d[nm] = FormalSum(terms)
    P = DgPresentation(["X", "Y", *extra_objects], arrows, d, field=C.field, name="bim")
    return add_point(P) if pointed else P


def bimodule_functor(p: ChainMap, pointed: bool = True, extra_target_objects=()) -> DgFunctor:
    S = bimodule(p.source, "a", pointed)
    T = bimodule(p.target, "b", pointed, extra_target_objects)
    sn, tn = _arrow_names(p.source, "a"), _arrow_names(p.target, "b")
    arrows = {}
    for (k, j), nm in sn.items():
        terms = {}
        for r, row in enumerate(p.comp(k)):
            if row[j]:
                terms[Word("X", "Y", (tn[(k, r)],))] = row[j]
        arrows[nm] = FormalSum(terms)
    objs = {"X": "X", "Y": "Y"}
    if pointed:
        objs[S.zero] = T.zero
    return DgFunctor(S, T, objs, arrows, name="bim")


def surj_functors(count: int, seed: int = 0, F: Field = QQ, max_total: int = 8) -> list[DgFunctor]:
    rng = random.Random(seed)
    return [bimodule_functor(random_surj_qiso(rng, F, max_total)) for _ in range(count)]


def non_surj_functors(count: int, seed: int = 0, F: Field = QQ, max_total: int = 8) -> list[DgFunctor]:
    """Alternates missed objects with maps that are not surjective quasi-isomorphisms."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        if i % 4 == 3:
            out.append(bimodule_functor(random_surj_qiso(rng, F, max_total),
                                        extra_target_objects=("Z",)))
        else:
            out.append(bimodule_functor(random_non_qiso_map(rng, F, max_total)))
    return out


# -------------------------------------------------- one-directional bases

def random_dag(rng: random.Random, F: Field = QQ, max_objects: int = 4, max_arrows: int = 6,
               degrees=DEGREES) -> DgPresentation:
    """Arrows only go from ``o_i`` to ``o_j`` with ``i < j``; d picked among cycles."""
    k = rng.randint(2, max_objects)
    objs = [f"o{i}" for i in range(k)]
    arrows: list[Arrow] = []
    d: dict = {}
    for a in range(rng.randint(1, max_arrows)):
        i = rng.randrange(k - 1)
        j = rng.randrange(i + 1, k)
        deg = rng.choice(degrees)
        name = f"x{a}"
        cur = DgPresentation(objs, arrows, d, field=F)
        words = enumerate_words(cur, objs[i], objs[j], GradedWindow(deg + 1, deg + 1), None)
        cols = [dict(cur.d_word(w).terms) for w in words]
        cyc = la.kernel(cols)
        if cyc and rng.random() < 0.7:
            s = FormalSum()
            for rel in cyc:
                c = _scalar(rng, F)
                for idx, e in rel.items():
                    s = s + FormalSum.of(words[idx], c * e)
            if s:
                d[name] = s
        arrows.append(Arrow(name, objs[i], objs[j], deg))
    return DgPresentation(objs, arrows, d, field=F, name="dag")


def dags(count: int, seed: int = 0, F: Field = QQ, **kw) -> list[DgPresentation]:
    rng = random.Random(seed)
    return [random_dag(rng, F, **kw) for _ in range(count)]


def corpus_presentations(seed: int = 0, F: Field = QQ) -> list[DgPresentation]:
    """The presentations used for fibrancy sweeps."""
    out = dags(10, seed, F)
    out += [f.source for f in surj_functors(5, seed, F)]
    out += [f.target for f in non_surj_functors(5, seed + 1, F)]
    return out
