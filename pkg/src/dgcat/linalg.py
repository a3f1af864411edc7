"""Exact sparse linear algebra over dict-vectors.

A vector is a ``dict`` from sortable keys to nonzero field elements.  Keys
are degrees/indices for plain complexes and words for hom-complexes, so the
same elimination code serves both.  Pivots are always the smallest key of a
row, which keeps representatives reproducible.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Mapping


Vector = dict


def axpy(a, x: Mapping, y: dict) -> dict:
    """y += a*x in place, dropping zeros."""
    if not a:
        return y
    for k, v in x.items():
        nv = y.get(k, 0) + a * v
        if nv:
            y[k] = nv
        else:
            y.pop(k, None)
    return y


def scale(a, x: Mapping) -> dict:
    if not a:
        return {}
    return {k: a * v for k, v in x.items() if a * v}


def add(x: Mapping, y: Mapping) -> dict:
    out = dict(x)
    return axpy(1, y, out)


def sub(x: Mapping, y: Mapping) -> dict:
    out = dict(x)
    return axpy(-1, y, out)


class Echelon:
    """Incrementally built echelon basis that remembers how each row was made.

    ``add(vec, label)`` records ``vec`` as original vector ``label``; every
    stored row is a known combination of originals, so membership tests can
    return explicit coefficients.
    """

    def __init__(self):
        self.rows: dict = {}

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Mapping) -> tuple[dict, dict]:
        """Return ``(residual, combo)`` with ``vec = residual + sum combo[l]*orig[l]``."""
        v = dict(vec)
        combo: dict = {}
        rows = self.rows
        while True:
            hits = [k for k in v if k in rows]
            if not hits:
                return v, combo
            k = min(hits)
            a = v[k]
            rv, rc = rows[k]
            axpy(-a, rv, v)
            axpy(a, rc, combo)

    def add(self, vec: Mapping, label: Hashable = None) -> tuple[bool, dict]:
        """Insert a vector.

        Returns ``(True, {})`` when it was independent, otherwise
        ``(False, relation)`` where ``relation`` is a vanishing combination of
        originals involving ``label`` with coefficient 1.
        """
        r, combo = self.reduce(vec)
        own = {label: 1}
        if not r:
            return False, axpy(-1, combo, own)
        relation = axpy(-1, combo, own)
        piv = min(r)
        inv = 1 / r[piv]
        self.rows[piv] = (scale(inv, r), scale(inv, relation))
        return True, {}

    def contains(self, vec: Mapping) -> bool:
        return not self.reduce(vec)[0]

    def express(self, vec: Mapping) -> dict | None:
        """Coefficients on originals reproducing ``vec``, or ``None``."""
        r, combo = self.reduce(vec)
        if r:
            return None
        return combo


def span(vectors: Iterable[Mapping]) -> Echelon:
    e = Echelon()
    for i, v in enumerate(vectors):
        e.add(v, i)
    return e


def rank(vectors: Iterable[Mapping]) -> int:
    return span(vectors).rank


def kernel(columns: list[Mapping]) -> list[dict]:
    """Basis of relations ``{i: c_i}`` with ``sum c_i columns[i] = 0``."""
    e = Echelon()
    out = []
    for i, c in enumerate(columns):
        ok, rel = e.add(c, i)
        if not ok:
            out.append(rel)
    return out


def solve(columns: list[Mapping], target: Mapping) -> dict | None:
    """Find ``{i: x_i}`` with ``sum x_i columns[i] == target``."""
    return span(columns).express(target)


def combine(coeffs: Mapping, vectors: list[Mapping]) -> dict:
    out: dict = {}
    for i, c in coeffs.items():
        axpy(c, vectors[i], out)
    return out


def quotient_reps(subspace: Iterable[Mapping], candidates: Iterable[Mapping]) -> list[int]:
    """Indices of candidates forming a basis of their span modulo ``subspace``."""
    e = Echelon()
    for v in subspace:
        e.add(v, None)
    picked = []
    for i, c in enumerate(candidates):
        ok, _ = e.add(c, ("cand", i))
        if ok:
            picked.append(i)
    return picked


# dense <-> sparse helpers (matrices are row-major lists of lists)

def columns_of(mat: list[list], ncols: int) -> list[dict]:
    cols: list[dict] = [dict() for _ in range(ncols)]
    for i, row in enumerate(mat):
        for j, v in enumerate(row):
            if v:
                cols[j][i] = v
    return cols


def dense_vector(vec: Mapping, n: int, zero) -> list:
    out = [zero] * n
    for k, v in vec.items():
        out[k] = v
    return out


def sparse_vector(vec: list) -> dict:
    return {i: v for i, v in enumerate(vec) if v}


def matmul(a: list[list], b: list[list], zero, ncols: int | None = None) -> list[list]:
    """Product ``a @ b``; pass ``ncols`` when ``b`` may have no rows."""
    m = ncols if ncols is not None else (len(b[0]) if b else 0)
    out = []
    for row in a:
        r = [zero] * m
        for k, x in enumerate(row):
            if x:
                bk = b[k]
                for j in range(m):
                    if bk[j]:
                        r[j] = r[j] + x * bk[j]
        out.append(r)
    return out


def matvec(a: list[list], v: list, zero) -> list:
    return [sum((x * y for x, y in zip(row, v) if x and y), zero) for row in a]


def is_zero_matrix(a: list[list]) -> bool:
    return all(not x for row in a for x in row)


def identity(n: int, one, zero) -> list[list]:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def inverse(a: list[list], one, zero) -> list[list] | None:
    n = len(a)
    cols = columns_of(a, n)
    e = span(cols)
    if e.rank < n:
        return None
    inv_cols = []
    for j in range(n):
        x = e.express({j: one})
        inv_cols.append(dense_vector(x, n, zero))
    return [[inv_cols[j][i] for j in range(n)] for i in range(n)]
