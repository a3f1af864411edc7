"""Lifting problems against the generating maps, and what they detect.

The generating maps are the pointed functors ``Q: O -> IA``,
``IS(n): IC(n) -> IP(n)``, ``IR(n): IB -> IP(n)`` and ``IF: IA -> IK``.
A lifting problem is a commuting square from one of them to a functor
``G: H -> I``; a solution is a diagonal functor making both triangles
commute, which we always re-verify symbolically.

Every unknown in a lift is a finite combination of words, and every
condition on it is linear once the object images are chosen, so each
solver is one sparse linear solve over windowed word bases.  A failed
solve is only reported as a genuine obstruction when the bases involved
are complete; otherwise the answer is inconclusive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg as la
from .cells import AddObject, AttachDisk, CellAttachment, KillCycle, attach
from .complexes import GradedWindow, LiftError, lift_sphere_disk, sphere_disk_obstructed
from .presentation import (
    ZERO,
    DgFunctor,
    DgPresentation,
    FormalSum,
    PresentationError,
    Word,
    add_point,
    cat_K,
    compose_functors,
    functors_equal,
    generating_map,
    identity_functor,
    point_functor,
    validate_functor,
)
from .realization import (
    CERT_NO,
    CERT_YES,
    INCONCLUSIVE,
    H0Category,
    induced_hom,
    is_presentation_isomorphism,
    homology_map_iso,
    realize_hom,
)


class ModelError(PresentationError):
    pass


def _vec(s: FormalSum) -> dict:
    return dict(s.terms)


def _tagged(tag, s: FormalSum, coeff=1) -> dict:
    return {(tag, w): coeff * c for w, c in s.terms.items() if coeff * c}


def _sum(coeffs: dict, words: list) -> FormalSum:
    return FormalSum({words[i]: c for i, c in coeffs.items() if c})


# ------------------------------------------------------------------ Surj

@dataclass
class SurjVerdict:
    status: str
    objects_ok: bool
    missed: list = field(default_factory=list)
    pairs: list = field(default_factory=list)
    witness: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)

    def __bool__(self):
        return self.status == CERT_YES

    def as_dict(self) -> dict:
        return {"status": self.status, "objects_ok": self.objects_ok, "missed": self.missed,
                "pairs": self.pairs, "witness": self.witness, "bounds": self.bounds}


def missed_objects(G: DgFunctor) -> list:
    hit = set(G.objects.values())
    return [E for E in G.target.objects if E not in hit]


def _surjectivity(ih, window: GradedWindow):
    """First degree of ``window`` where the induced map misses the target basis."""
    tgt = ih.target
    for k in window.degrees():
        images = [_vec(ih.images[w]) for w in ih.source.basis.get(k, [])]
        ech = la.span(images)
        for t in tgt.basis.get(k, []):
            if not ech.contains({t: 1}):
                return k, ech.rank, len(tgt.basis[k]), t
    return None


def check_surj(G: DgFunctor, window: GradedWindow, maxlen: int) -> SurjVerdict:
    """Surjective on objects, and a surjective quasi-isomorphism on every hom."""
    bounds = {"window": [window.lo, window.hi], "maxlen": maxlen}
    missed = missed_objects(G)
    if not missed and is_presentation_isomorphism(G):
        return SurjVerdict(CERT_YES, True, [], [], {"kind": "isomorphism"}, bounds)
    S = G.source
    records = []
    witness: dict = {}
    if missed:
        witness = {"kind": "missed-object", "object": missed[0]}
    all_exact = True
    all_ok = True
    for X in S.objects:
        for Y in S.objects:
            ih = induced_hom(G, X, Y, window, maxlen)
            exact = ih.exact
            bad = _surjectivity(ih, window)
            qiso, hdeg = homology_map_iso(ih.source, ih.target, G)
            rec = {
                "pair": [X, Y],
                "target_pair": [G.obj(X), G.obj(Y)],
                "surjective": bad is None,
                "qiso": qiso,
                "exact": exact,
            }
            if bad is not None:
                rec["missed_word"] = str(bad[3])
                rec["degree"] = bad[0]
            if not qiso:
                rec["bad_degree"] = hdeg
            records.append(rec)
            all_exact = all_exact and exact
            ok = bad is None and qiso
            all_ok = all_ok and ok
            if not ok and exact and not witness:
                if bad is not None:
                    witness = {"kind": "not-surjective", "pair": [X, Y], "degree": bad[0],
                               "rank": bad[1], "target_dim": bad[2], "word": str(bad[3])}
                else:
                    witness = {"kind": "homology-mismatch", "pair": [X, Y], "degree": hdeg,
                               "source_dim": ih.source.homology().dims[hdeg],
                               "target_dim": ih.target.homology().dims[hdeg]}
    if witness:
        status = CERT_NO
    elif all_ok and all_exact:
        status = CERT_YES
    else:
        status = INCONCLUSIVE
    return SurjVerdict(status, not missed, missed, records, witness, bounds)


# --------------------------------------------------------- lift problems

@dataclass
class LiftProblem:
    kind: str
    n: int | None
    top: DgFunctor
    bottom: DgFunctor
    G: DgFunctor

    @property
    def generator(self) -> DgFunctor:
        g = self.__dict__.get("_gen")
        if g is None:
            g = generating_map(self.kind, self.n, self.G.source.field)
            self.__dict__["_gen"] = g
        return g

    def commutes(self) -> bool:
        return functors_equal(compose_functors(self.G, self.top),
                              compose_functors(self.bottom, self.generator))

    def describe(self) -> str:
        g = self.kind + (f"({self.n})" if self.n is not None else "")
        imgs = ", ".join(f"{a} -> {s}" for a, s in sorted(self.bottom.arrows.items()))
        return f"{g}-square, bottom objects {self.bottom.objects}, bottom arrows {{{imgs}}}"


@dataclass
class LiftSolution:
    problem: LiftProblem
    diagonal: DgFunctor
    verification: dict

    status = "lifted"

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "square": self.problem.describe(),
            "diagonal": {"objects": self.diagonal.objects,
                         "arrows": {a: str(s) for a, s in sorted(self.diagonal.arrows.items())}},
            "verification": self.verification,
        }


@dataclass
class NonLiftWitness:
    problem: LiftProblem
    certificate: dict

    status = "obstructed"

    def as_dict(self) -> dict:
        cert = {k: (str(v) if isinstance(v, FormalSum) else v) for k, v in self.certificate.items()}
        return {"status": self.status, "square": self.problem.describe(), "certificate": cert}


@dataclass
class Inconclusive:
    problem: LiftProblem | None
    reason: str

    status = "inconclusive"

    def as_dict(self) -> dict:
        return {"status": self.status, "reason": self.reason,
                "square": self.problem.describe() if self.problem else None}


def _require_pointed(G: DgFunctor) -> None:
    if not (G.source.pointed and G.target.pointed):
        raise ModelError("lifting problems need pointed presentations on both sides")


def _functor(src: DgPresentation, tgt: DgPresentation, objs: dict, arrows: dict, name="") -> DgFunctor:
    objs = dict(objs)
    if src.pointed:
        objs[src.zero] = tgt.zero
    return DgFunctor(src, tgt, objs, {a: s for a, s in arrows.items() if s}, name=name)


def square_Q(G: DgFunctor, E: str) -> LiftProblem:
    _require_pointed(G)
    gen = generating_map("Q", field=G.source.field)
    H, I = G.source, G.target
    top = _functor(gen.source, H, {}, {})
    bottom = _functor(gen.target, I, {"3": E}, {})
    return LiftProblem("Q", None, top, bottom, G)


def square_IS(G: DgFunctor, n: int, A: str, B: str, z: FormalSum, w: FormalSum) -> LiftProblem:
    _require_pointed(G)
    gen = generating_map("IS", n, G.source.field)
    H, I = G.source, G.target
    top = _functor(gen.source, H, {"8": A, "9": B}, {"s": z})
    bottom = _functor(gen.target, I, {"6": G.obj(A), "7": G.obj(B)}, {"l": w, "j": G.apply(z)})
    return LiftProblem("IS", n, top, bottom, G)


def square_IR(G: DgFunctor, n: int, A: str, B: str, w: FormalSum) -> LiftProblem:
    _require_pointed(G)
    gen = generating_map("IR", n, G.source.field)
    H, I = G.source, G.target
    top = _functor(gen.source, H, {"4": A, "5": B}, {})
    bottom = _functor(gen.target, I, {"6": G.obj(A), "7": G.obj(B)},
                      {"l": w, "j": I.differential(w)})
    return LiftProblem("IR", n, top, bottom, G)


def square_IF(G: DgFunctor, A: str, E: str, data: dict) -> LiftProblem:
    """``data`` maps f, g, r1, r2, r12 to K-data from ``G(A)`` to ``E`` in the target."""
    _require_pointed(G)
    gen = generating_map("IF", field=G.source.field)
    H, I = G.source, G.target
    top = _functor(gen.source, H, {"3": A}, {})
    bottom = _functor(gen.target, I, {"1": G.obj(A), "2": E}, data)
    return LiftProblem("IF", None, top, bottom, G)


def identity_k_data(P: DgPresentation, X: str, c=1) -> dict:
    """``f = c id``, ``g = c^-1 id``, all homotopies zero."""
    F = P.field
    c = F(c)
    return {"f": c * P.identity(X), "g": (F.one / c) * P.identity(X)}


def _verify(problem: LiftProblem, diag: DgFunctor) -> dict:
    rep = validate_functor(diag)
    upper = functors_equal(compose_functors(diag, problem.generator), problem.top)
    lower = functors_equal(compose_functors(problem.G, diag), problem.bottom)
    return {"diagonal_valid": rep.ok, "defects": rep.defects,
            "upper_triangle": upper, "lower_triangle": lower}


def _solution(problem: LiftProblem, objs: dict, arrows: dict) -> LiftSolution:
    diag = _functor(problem.generator.target, problem.G.source, objs, arrows, name="lift")
    ver = _verify(problem, diag)
    if not (ver["diagonal_valid"] and ver["upper_triangle"] and ver["lower_triangle"]):
        raise AssertionError(f"lift failed verification: {ver}")
    return LiftSolution(problem, diag, ver)


# ------------------------------------------------------------------ solvers

def _preimage_objects(G: DgFunctor, E: str, prefer: str | None = None) -> list:
    out = [x for x in G.source.objects if G.obj(x) == E]
    if prefer in out:
        out.remove(prefer)
        out.insert(0, prefer)
    return out


def _degree_basis(P, X, Y, k, maxlen):
    h = realize_hom(P, X, Y, GradedWindow(k, k), maxlen)
    return h.basis.get(k, []), h.exact


def _solve_q(pb: LiftProblem) -> LiftSolution | NonLiftWitness:
    E = pb.bottom.obj("3")
    pre = _preimage_objects(pb.G, E)
    if not pre:
        return NonLiftWitness(pb, {"kind": "missed-object", "object": E})
    return _solution(pb, {"3": pre[0]}, {})


def _solve_is(pb: LiftProblem, maxlen: int):
    G, H = pb.G, pb.G.source
    n = pb.n
    A, B = pb.top.obj("8"), pb.top.obj("9")
    z = pb.top.arrows.get("s", ZERO)
    w = pb.bottom.arrows.get("l", ZERO)
    objs = {"6": A, "7": B}
    if H.is_zero(A) or H.is_zero(B):
        if w:
            return NonLiftWitness(pb, {"kind": "zero-hom", "pair": [A, B], "w": w})
        return _solution(pb, objs, {})
    ih = induced_hom(G, A, B, GradedWindow(n - 2, n - 1), maxlen)
    if ih.exact:
        p = ih.chain_map()
        zc = ih.source.coordinates(z, n - 1)
        wc = ih.target.coordinates(w, n - 2)
        try:
            v = lift_sphere_disk(p, zc, wc, degree=n - 1)
        except LiftError:
            return NonLiftWitness(pb, {"kind": "sphere-disk", "pair": [A, B], "n": n, "z": z, "w": w})
        return _solution(pb, objs, {"l": ih.source.element(n - 2, v), "j": z})
    # truncated: joint solve on the available words, verified afterwards
    basis = ih.source.basis.get(n - 2, [])
    cols = [{**_tagged("d", H.d_word(b)), **_tagged("G", G.apply_word(b))} for b in basis]
    sol = la.solve(cols, {**_tagged("d", z), **_tagged("G", w)})
    if sol is None:
        return Inconclusive(pb, f"no lift among words of length <= {maxlen} (hom not certified finite)")
    return _solution(pb, objs, {"l": _sum(sol, basis), "j": z})


def _solve_ir(pb: LiftProblem, maxlen: int):
    G, H = pb.G, pb.G.source
    n = pb.n
    A, B = pb.top.obj("4"), pb.top.obj("5")
    w = pb.bottom.arrows.get("l", ZERO)
    objs = {"6": A, "7": B}
    if not w:
        return _solution(pb, objs, {})
    if H.is_zero(A) or H.is_zero(B):
        return NonLiftWitness(pb, {"kind": "zero-hom", "pair": [A, B], "w": w})
    basis, exact = _degree_basis(H, A, B, n - 2, maxlen)
    tgt_exact = realize_hom(G.target, G.obj(A), G.obj(B), GradedWindow(n - 2, n - 2), maxlen).exact
    cols = [_vec(G.apply_word(b)) for b in basis]
    sol = la.solve(cols, _vec(w))
    if sol is None:
        if exact and tgt_exact:
            return NonLiftWitness(pb, {"kind": "not-surjective", "pair": [A, B], "degree": n - 2,
                                       "w": w})
        return Inconclusive(pb, f"no preimage among words of length <= {maxlen}")
    wp = _sum(sol, basis)
    return _solution(pb, objs, {"l": wp, "j": H.differential(wp)})


def solve_k_data(
    H: DgPresentation, A: str, D: str, f: FormalSum, maxlen: int,
    G: DgFunctor | None = None, images: dict | None = None,
) -> tuple[dict | None, bool]:
    """Joint linear solve for ``g, r1, r2, r12`` completing ``f: A -> D`` to K-data.

    With ``G`` and ``images`` the unknowns must also map to the given
    target elements.  Returns ``(solution, exact)`` where ``exact`` says the
    unknown spaces were complete, so that ``None`` is a genuine obstruction.
    """
    unknowns = [("g", D, A, 0), ("r1", A, A, -1), ("r2", D, D, -1), ("r12", A, D, -2)]
    bases = {}
    exact = True
    for name, X, Y, k in unknowns:
        if H.is_zero(X) or H.is_zero(Y):
            bases[name] = []
            continue
        b, ex = _degree_basis(H, X, Y, k, maxlen)
        bases[name] = b
        exact = exact and ex
    cols, labels = [], []
    for name, *_ in unknowns:
        for b in bases[name]:
            s = FormalSum.of(b, 1)
            col: dict = {}
            db = H.differential(s)
            if name == "g":
                la.axpy(1, _tagged("dg", db), col)
                la.axpy(-1, _tagged("r1", s @ f), col)
                la.axpy(-1, _tagged("r2", f @ s), col)
            elif name == "r1":
                la.axpy(1, _tagged("r1", db), col)
                la.axpy(-1, _tagged("r12", f @ s), col)
            elif name == "r2":
                la.axpy(1, _tagged("r2", db), col)
                la.axpy(1, _tagged("r12", s @ f), col)
            else:
                la.axpy(1, _tagged("r12", db), col)
            if G is not None:
                la.axpy(1, _tagged("G" + name, G.apply(s)), col)
            cols.append(col)
            labels.append((name, b))
    rhs: dict = {}
    la.axpy(-1, _tagged("r1", H.identity(A)), rhs)
    la.axpy(-1, _tagged("r2", H.identity(D)), rhs)
    if G is not None:
        for name, *_ in unknowns:
            la.axpy(1, _tagged("G" + name, images.get(name, ZERO)), rhs)
    sol = la.solve(cols, rhs)
    if sol is None:
        return None, exact
    out = {name: FormalSum() for name, *_ in unknowns}
    for i, c in sol.items():
        name, b = labels[i]
        out[name] = out[name] + FormalSum.of(b, c)
    return out, exact


def _solve_if(pb: LiftProblem, maxlen: int):
    G, H = pb.G, pb.G.source
    A = pb.top.obj("3")
    E = pb.bottom.obj("2")
    phi = pb.bottom.arrows.get("f", ZERO)
    images = {k: pb.bottom.arrows.get(k, ZERO) for k in ("g", "r1", "r2", "r12")}
    cands = _preimage_objects(G, E, prefer=A)
    if not cands:
        return NonLiftWitness(pb, {"kind": "missed-object", "object": E})
    all_exact = True
    for D in cands:
        fcands = []
        if D == A and G.apply(H.identity(A)) == phi:
            fcands.append(H.identity(A))
        if not (H.is_zero(A) or H.is_zero(D)):
            basis, ex = _degree_basis(H, A, D, 0, maxlen)
            all_exact = all_exact and ex
            cols = [{**_tagged("d", H.d_word(b)), **_tagged("G", G.apply_word(b))} for b in basis]
            sol = la.solve(cols, _tagged("G", phi))
            if sol is not None:
                fcands.append(_sum(sol, basis))
        elif not phi:
            fcands.append(FormalSum())
        for fp in fcands:
            data, ex = solve_k_data(H, A, D, fp, maxlen, G, images)
            all_exact = all_exact and ex
            if data is not None:
                arrows = {"f": fp, **data}
                return _solution(pb, {"1": A, "2": D}, arrows)
    if all_exact:
        return NonLiftWitness(pb, {"kind": "htpy-data", "object": E,
                                   "detail": "no preimage object carries liftable K-data"})
    return Inconclusive(pb, f"no K-data lift among words of length <= {maxlen}")


def lift(problem: LiftProblem, maxlen: int = 8):
    """Solve a lifting problem; returns LiftSolution, NonLiftWitness or Inconclusive."""
    if not problem.commutes():
        raise ModelError("the square does not commute")
    kind = problem.kind
    if kind == "Q":
        return _solve_q(problem)
    if kind == "IS":
        return _solve_is(problem, maxlen)
    if kind == "IR":
        return _solve_ir(problem, maxlen)
    if kind == "IF":
        return _solve_if(problem, maxlen)
    raise ModelError(f"unknown generator {kind}")


def recheck_witness(w: NonLiftWitness, maxlen: int = 8) -> bool:
    """Re-derive a non-lift certificate by an independent computation."""
    cert = w.certificate
    pb = w.problem
    G = pb.G
    kind = cert["kind"]
    if kind == "missed-object":
        return cert["object"] not in set(G.objects.values())
    if kind == "zero-hom":
        return bool(cert["w"])
    if kind == "sphere-disk":
        A, B = cert["pair"]
        n = cert["n"]
        ih = induced_hom(G, A, B, GradedWindow(n - 2, n - 1), maxlen)
        if not ih.exact:
            return False
        p = ih.chain_map()
        return sphere_disk_obstructed(p, ih.source.coordinates(cert["z"], n - 1),
                                      ih.target.coordinates(cert["w"], n - 2), degree=n - 1)
    if kind == "not-surjective":
        A, B = cert["pair"]
        k = cert["degree"]
        ih = induced_hom(G, A, B, GradedWindow(k, k), maxlen)
        if not ih.exact:
            return False
        p = ih.chain_map()
        cols = la.columns_of(p.comp(k), p.source.dim(k))
        return la.solve(cols, la.sparse_vector(ih.target.coordinates(cert["w"], k))) is None
    if kind == "htpy-data":
        return isinstance(lift(pb, maxlen), NonLiftWitness)
    return False


# -------------------------------------------------------- square families

def _square_space(ih, k: int):
    """Basis of ``{(w, z): dz = 0, dw = p z}`` and of the image of ``v -> (p v, dv)``.

    ``w`` in degree k of the target, ``z`` in degree k+1 of the source.
    """
    p = ih.chain_map()
    S, T = ih.source.complex, ih.target.complex
    F = S.field
    nw, nz = T.dim(k), S.dim(k + 1)
    cols = []
    for i in range(nw):
        e = T.basis_vector(k, i)
        cols.append({("dw-pz", j): x for j, x in enumerate(T.apply_d(k, e)) if x})
    for i in range(nz):
        e = S.basis_vector(k + 1, i)
        col = {("dz", j): x for j, x in enumerate(S.apply_d(k + 1, e)) if x}
        la.axpy(-1, {("dw-pz", j): x for j, x in enumerate(p.apply(k + 1, e)) if x}, col)
        cols.append(col)
    space = []
    for rel in la.kernel(cols):
        v = {}
        for i, c in rel.items():
            v[("w", i) if i < nw else ("z", i - nw)] = c
        space.append(v)
    image = []
    for i in range(S.dim(k)):
        e = S.basis_vector(k, i)
        v = {("w", j): x for j, x in enumerate(p.apply(k, e)) if x}
        v.update({("z", j): x for j, x in enumerate(S.apply_d(k, e)) if x})
        if v:
            image.append(v)
    return space, image, F


def _split_wz(ih, k, v, F):
    w = [F.zero] * ih.target.complex.dim(k)
    z = [F.zero] * ih.source.complex.dim(k + 1)
    for (tag, i), c in v.items():
        (w if tag == "w" else z)[i] = c
    return ih.target.element(k, w), ih.source.element(k + 1, z)


def unliftable_squares(G: DgFunctor, window: GradedWindow, maxlen: int, limit: int | None = None):
    """IS-squares outside the image of ``v -> (Gv, dv)``, on certified homs only."""
    out = []
    for A in G.source.objects:
        for B in G.source.objects:
            if G.source.is_zero(A) or G.source.is_zero(B):
                continue
            ih = induced_hom(G, A, B, window, maxlen)
            if not ih.exact:
                continue
            for k in range(window.lo, window.hi):
                space, image, F = _square_space(ih, k)
                ech = la.span(image)
                for v in space:
                    if not ech.contains(v):
                        w, z = _split_wz(ih, k, v, F)
                        out.append(square_IS(G, k + 2, A, B, z, w))
                        if limit and len(out) >= limit:
                            return out
                        break
    return out


def find_nonlift_square(G: DgFunctor, window: GradedWindow, maxlen: int) -> LiftProblem | None:
    missed = missed_objects(G)
    if missed:
        return square_Q(G, missed[0])
    sq = unliftable_squares(G, window, maxlen, limit=1)
    return sq[0] if sq else None


def i_squares(G: DgFunctor, window: GradedWindow, maxlen: int) -> list:
    """Q-squares at every target object and IS-squares on a basis of each square space."""
    out = [square_Q(G, E) for E in G.target.objects]
    for A in G.source.objects:
        for B in G.source.objects:
            if G.source.is_zero(A) or G.source.is_zero(B):
                continue
            ih = induced_hom(G, A, B, window, maxlen)
            for k in range(window.lo, window.hi):
                space, _, F = _square_space(ih, k)
                for v in space:
                    w, z = _split_wz(ih, k, v, F)
                    if G.source.differential(z) or G.target.differential(w) != G.apply(z):
                        continue  # projection artifact on a truncated basis
                    out.append(square_IS(G, k + 2, A, B, z, w))
    return out


def find_k_data(P: DgPresentation) -> list[dict]:
    """K-data present among the generators: arrows satisfying the K relations on the nose."""
    out = []
    arrows = P.arrows.values()
    for f in arrows:
        if f.degree != 0:
            continue
        X, Y = f.src, f.dst
        for g in arrows:
            if g.degree != 0 or g.src != Y or g.dst != X:
                continue
            fs, gs = P.gen(f.name), P.gen(g.name)
            want1 = gs @ fs - P.identity(X)
            want2 = fs @ gs - P.identity(Y)
            r1s = [a for a in arrows if a.degree == -1 and (a.src, a.dst) == (X, X)
                   and P.d.get(a.name, ZERO) == want1]
            r2s = [a for a in arrows if a.degree == -1 and (a.src, a.dst) == (Y, Y)
                   and P.d.get(a.name, ZERO) == want2]
            for r1 in r1s:
                for r2 in r2s:
                    want12 = fs @ P.gen(r1.name) - P.gen(r2.name) @ fs
                    for r12 in arrows:
                        if (r12.degree == -2 and (r12.src, r12.dst) == (X, Y)
                                and P.d.get(r12.name, ZERO) == want12):
                            out.append({"X": X, "Y": Y, "f": fs, "g": gs, "r1": P.gen(r1.name),
                                        "r2": P.gen(r2.name), "r12": P.gen(r12.name)})
    return out


def j_squares(G: DgFunctor, window: GradedWindow, maxlen: int) -> list:
    """IR-squares on every target basis word and IF-squares on probe K-data."""
    out = []
    H, I = G.source, G.target
    for A in H.objects:
        for B in H.objects:
            if H.is_zero(A) or H.is_zero(B):
                continue
            th = realize_hom(I, G.obj(A), G.obj(B), window, maxlen)
            for k in window.degrees():
                for w in th.basis.get(k, []):
                    out.append(square_IR(G, k + 2, A, B, FormalSum.of(w, I.field.one)))
    out.extend(if_squares(G))
    return out


def if_squares(G: DgFunctor) -> list:
    H, I = G.source, G.target
    F = I.field
    scales = [1] + ([2] if F(2) else [])
    out = []
    for A in H.objects:
        X = G.obj(A)
        for c in scales:
            out.append(square_IF(G, A, X, identity_k_data(I, X, c)))
    for kd in find_k_data(I):
        for A in H.objects:
            if G.obj(A) == kd["X"]:
                data = {k: v for k, v in kd.items() if k not in ("X", "Y")}
                out.append(square_IF(G, A, kd["Y"], data))
    return out


# ------------------------------------------------ promotion and extraction

@dataclass
class Promotion:
    status: str
    functor: DgFunctor | None = None
    reason: str = ""
    data: dict = field(default_factory=dict)


def k_functor(S: DgPresentation, X: str, Y: str, data: dict) -> DgFunctor:
    K = cat_K(S.field)
    if S.pointed:
        K = add_point(K)
    return _functor(K, S, {"1": X, "2": Y}, data, name="kdata")


def promote_h0_iso(S: DgPresentation, q: FormalSum, X: str, Y: str, maxlen: int) -> Promotion:
    """Complete a degree-0 cycle ``q: X -> Y`` invertible in H0 to K-data."""
    if S.differential(q):
        return Promotion("rejected", reason=f"q is not a cycle: dq = {S.differential(q)}")
    h0 = H0Category(S, maxlen, [X, Y])
    coords = h0.classify(X, Y, q)
    if coords is None:
        return Promotion(INCONCLUSIVE, reason="q not expressible in the truncated H0 basis")
    st, _ = h0.iso_status(X, Y, coords)
    if st == "not-iso":
        return Promotion("rejected", reason="[q] is not invertible in H0 (certified)",
                         data={"h0_dims": {"XY": h0.dim(X, Y), "YX": h0.dim(Y, X)}})
    data, exact = solve_k_data(S, X, Y, q, maxlen)
    if data is None:
        if st == "iso" and exact:
            raise AssertionError("H0-iso without K-data on complete bases")
        return Promotion(INCONCLUSIVE, reason=f"no K-data among words of length <= {maxlen}")
    arrows = {"f": q, **data}
    Fk = k_functor(S, X, Y, arrows)
    rep = validate_functor(Fk)
    if not rep.ok:
        raise AssertionError(f"K-data failed validation: {rep.defects}")
    return Promotion(CERT_YES, Fk, data=arrows)


@dataclass
class Extraction:
    status: str
    object: str | None = None
    stages: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"status": self.status, "object": self.object, "stages": self.stages}


def extract_object_surjectivity(L: DgFunctor, E: str, maxlen: int) -> Extraction:
    """Lift a target object through ``L``: H0-iso search, K-data promotion, IF-lift."""
    _require_pointed(L)
    T = L.target
    stages = []
    h0 = H0Category(T, maxlen)
    order = sorted(L.source.objects, key=lambda c: (L.obj(c) != E, L.source.objects.index(c)))
    unknown = False
    for C in order:
        st, q = h0.find_iso(L.obj(C), E)
        if st != "iso":
            unknown = unknown or st == "unknown"
            continue
        stages.append({"stage": "h0-iso", "from": C, "q": str(q)})
        pr = promote_h0_iso(T, q, L.obj(C), E, maxlen)
        stages.append({"stage": "promote", "status": pr.status, "reason": pr.reason})
        if pr.functor is None:
            unknown = True
            continue
        data = {k: v for k, v in pr.data.items()}
        pb = square_IF(L, C, E, data)
        res = lift(pb, maxlen)
        stages.append({"stage": "lift", "status": res.status})
        if isinstance(res, LiftSolution):
            D = res.diagonal.obj("2")
            assert L.obj(D) == E
            return Extraction(CERT_YES, D, stages)
        unknown = True
    if unknown:
        return Extraction(INCONCLUSIVE, None, stages)
    stages.append({"stage": "essential-surjectivity", "status": "failed",
                   "detail": f"{E} is not H0-isomorphic to any image object"})
    return Extraction(CERT_NO, None, stages)


# ---------------------------------------------------------- fibrations

@dataclass
class ModelVerdict:
    status: str
    witness: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.status == CERT_YES

    def as_dict(self) -> dict:
        return {"status": self.status, "witness": self.witness, "details": self.details}


def terminal_functor(C: DgPresentation) -> DgFunctor:
    """``C -> O``: everything to the zero object."""
    from .presentation import cat_O

    if not C.pointed:
        C = add_point(C)
    O = cat_O(C.field)
    return DgFunctor(C, O, {x: O.zero for x in C.objects}, {}, name="terminal")


def initial_functor(C: DgPresentation) -> DgFunctor:
    """``O -> C`` picking the zero object."""
    from .presentation import cat_O

    if not C.pointed:
        C = add_point(C)
    O = cat_O(C.field)
    return DgFunctor(O, C, {O.zero: C.zero}, {}, name="initial")


def check_fibration(G: DgFunctor, window: GradedWindow, maxlen: int) -> ModelVerdict:
    """Surjectivity on every windowed hom plus IF-lifts for the probe family."""
    _require_pointed(G)
    bounds = {"window": [window.lo, window.hi], "maxlen": maxlen}
    if is_presentation_isomorphism(G):
        return ModelVerdict(CERT_YES, {}, {"reason": "isomorphism of presentations",
                                          "bounds": bounds})
    H = G.source
    pairs = []
    witness: dict = {}
    all_exact = True
    for A in H.objects:
        for B in H.objects:
            ih = induced_hom(G, A, B, window, maxlen)
            bad = _surjectivity(ih, window)
            ex = ih.target.exact
            pairs.append({"pair": [A, B], "surjective": bad is None, "target_exact": ex})
            if bad is None:
                all_exact = all_exact and ex
            elif ex and ih.source.exact and not witness:
                witness = {"kind": "not-surjective", "pair": [A, B], "degree": bad[0],
                           "rank": bad[1], "target_dim": bad[2], "word": str(bad[3])}
            else:
                all_exact = False
    probes = []
    for pb in if_squares(G):
        res = lift(pb, maxlen)
        probes.append({"square": pb.describe(), "status": res.status})
        if isinstance(res, NonLiftWitness) and not witness:
            witness = {"kind": "if-obstruction", **res.as_dict()}
        elif isinstance(res, Inconclusive):
            all_exact = False
    if witness:
        status = CERT_NO
    elif all_exact:
        status = CERT_YES
    else:
        status = INCONCLUSIVE
    return ModelVerdict(status, witness, {"pairs": pairs, "probes": probes, "bounds": bounds})


def check_fibrancy(C: DgPresentation, window: GradedWindow, maxlen: int) -> ModelVerdict:
    return check_fibration(terminal_functor(C), window, maxlen)


# ---------------------------------------------------------- factorization

@dataclass
class FactorizationResult:
    cells: list
    presentation: DgPresentation
    left: DgFunctor
    right: DgFunctor
    verdict: SurjVerdict
    stages: int
    converged: bool
    composite_ok: bool

    def as_dict(self) -> dict:
        return {
            "cells": [c.describe() for c in self.cells],
            "stages": self.stages,
            "converged": self.converged,
            "composite_equals_input": self.composite_ok,
            "objects": list(self.presentation.objects),
            "right": {"objects": self.right.objects,
                      "arrows": {a: str(s) for a, s in sorted(self.right.arrows.items())}},
            "remainder": self.verdict.as_dict(),
        }


def _next_cell(Cp: DgPresentation, R: DgFunctor, window: GradedWindow, maxlen: int):
    """The first target word missed by R, by (-degree, length, word), and the cell covering it."""
    T = R.target
    objs = [x for x in Cp.objects if not Cp.is_zero(x)]
    for k in sorted(window.degrees(), reverse=True):
        best = None
        for A in objs:
            for B in objs:
                src = realize_hom(Cp, A, B, window, maxlen)
                tgt = realize_hom(T, R.obj(A), R.obj(B), window, maxlen)
                ech = la.span([_vec(R.apply_word(w)) for w in src.basis.get(k, [])])
                for t in tgt.basis.get(k, []):
                    if not ech.contains({t: 1}):
                        if best is None or t < best[0]:
                            best = (t, A, B, src)
                        break
        if best is None:
            continue
        t, A, B, src = best
        dw = T.d_word(t)
        basis = src.basis.get(k + 1, [])
        cols = [{**_tagged("d", Cp.d_word(b)), **_tagged("R", R.apply_word(b))} for b in basis]
        sol = la.solve(cols, _tagged("R", dw))
        w = FormalSum.of(t, T.field.one)
        if sol is not None:
            z = _sum(sol, basis)
            return KillCycle(k + 2, A, B, z), {"t": w}
        return AttachDisk(k + 2, A, B), {"l": w, "j": dw}
    return None


def _residual_cell(Cp, R, window, maxlen):
    """A square (w, z) outside the image of ``v -> (Rv, dv)`` on certified homs."""
    sq = unliftable_squares(R, window, maxlen, limit=1) if Cp.pointed and R.target.pointed else []
    if not sq:
        return None
    pb = sq[0]
    A, B = pb.top.obj("8"), pb.top.obj("9")
    z = pb.top.arrows.get("s", ZERO)
    w = pb.bottom.arrows.get("l", ZERO)
    return KillCycle(pb.n, A, B, z), {"t": w}


def factorize(F: DgFunctor, window: GradedWindow, maxlen: int, stages: int = 3,
              max_cells: int = 64) -> FactorizationResult:
    """Bounded small-object argument: ``F = R o L`` with L a relative cell complex.

    Each stage adds Q-cells for missed objects, then repeatedly attaches
    the cell covering the first target word not yet hit (rescanning after
    each attachment), then kills squares left over on certified homs.  A
    stage that attaches nothing ends the loop.
    """
    S, T = F.source, F.target
    if T.pointed and not S.pointed:
        raise ModelError("a pointed target needs a pointed source")
    Cp = S
    left = identity_functor(S)
    robj = dict(F.objects)
    rarr = {a: s for a, s in F.arrows.items()}
    cells: list[CellAttachment] = []
    used = 0
    converged = False

    def add(cell, images):
        nonlocal Cp, left
        res = attach(Cp, cell)
        Cp = res.presentation
        left = compose_functors(res.inc, left)
        rec = res.record
        for role, img in images.items():
            if role == "object":
                robj[rec["object"]] = img
            elif role in rec and role not in rec.get("dropped", []):
                rarr[rec[role]] = img
        cells.append(cell)
        return rec

    for stage in range(1, stages + 1):
        before = len(cells)
        hit = set(robj.values())
        for E in T.objects:
            if E not in hit:
                add(AddObject(), {"object": E})
        while len(cells) < max_cells:
            R = DgFunctor(Cp, T, robj, rarr, name="right")
            nxt = _next_cell(Cp, R, window, maxlen)
            if nxt is None:
                nxt = _residual_cell(Cp, R, window, maxlen)
            if nxt is None:
                break
            add(*nxt)
        used = stage
        if len(cells) == before:
            converged = True
            break
    R = DgFunctor(Cp, T, robj, rarr, name="right")
    rep = validate_functor(R)
    if not rep.ok:
        raise AssertionError(f"right functor invalid: {rep.defects}")
    composite = compose_functors(R, left)
    ok = functors_equal(composite, F)
    verdict = check_surj(R, window, maxlen)
    return FactorizationResult(cells, Cp, left, R, verdict, used, converged, ok)


def cofibrant_replacement(C: DgPresentation, window: GradedWindow, maxlen: int, stages: int = 3):
    return factorize(initial_functor(C), window, maxlen, stages)


def pointed_version(F: DgFunctor) -> DgFunctor:
    if F.source.pointed and F.target.pointed:
        return F
    return point_functor(F)
