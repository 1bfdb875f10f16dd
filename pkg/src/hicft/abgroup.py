"""Finitely generated abelian groups given by generators and relations.

Relations are stored as *columns*: a group on ``g`` generators with relation
matrix ``R`` (``g`` rows) is ``Z^g / R Z^k``, optionally tensored with
``Z/n``.  Every class group in the package is produced as such a cokernel.

All arithmetic uses Python integers, so there is no overflow.  Invariant
factors are computed in three stages:

1. sparse Tietze elimination of generators that occur with coefficient
   +-1 in some relation,
2. column echelon form of what is left (mod ``n`` when a modulus is set,
   keeping the extra lattice vectors a Howell form needs),
3. a dense Smith normal form whose transforms are re-multiplied and checked
   before the result is cached.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from math import gcd, prod
from typing import Iterable, Sequence

from .errors import HicftError, MixedModulus

__all__ = [
    "IntMatrix",
    "InvariantFactors",
    "PresentedGroup",
    "GroupMap",
    "smith_normal_form",
    "invariant_factors",
    "is_isomorphic",
    "cokernel",
    "kernel_basis",
    "subgroup_generated",
]


class IntMatrix:
    """Immutable dense integer matrix."""

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, entries: Sequence[Sequence[int]], cols: int | None = None):
        rows = [tuple(int(x) for x in r) for r in entries]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged matrix")
        self.rows = len(rows)
        self.cols = cols
        self._entries = tuple(rows)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls([[0] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> IntMatrix:
        return cls([[c[i] for c in columns] for i in range(rows)], len(columns))

    def __getitem__(self, ij):
        i, j = ij
        return self._entries[i][j]

    def row(self, i: int) -> tuple:
        return self._entries[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self._entries)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._entries]

    def transpose(self) -> IntMatrix:
        return IntMatrix([self.column(j) for j in range(self.cols)], self.rows)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        ot = [other.column(j) for j in range(other.cols)]
        return IntMatrix(
            [[sum(a * b for a, b in zip(r, c)) for c in ot] for r in self._entries],
            other.cols,
        )

    def __eq__(self, other):
        return (
            isinstance(other, IntMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self._entries == other._entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self._entries))

    def __repr__(self):
        return f"IntMatrix({self.tolist()!r})"

    def is_diagonal(self) -> bool:
        return all(
            self._entries[i][j] == 0
            for i in range(self.rows)
            for j in range(self.cols)
            if i != j
        )

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        n = self.rows
        if n != self.cols:
            raise ValueError("determinant of a non-square matrix")
        a = self.tolist()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1


# ---------------------------------------------------------------------------
# Smith normal form


def _smith(a: list[list[int]], m: int, n: int, want_vinv: bool = False):
    """In-place SNF of the m x n list matrix ``a``.

    Returns (U, V, Vinv) as list matrices with U * A_orig * V = a.
    """
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)] if want_vinv else None

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        if Vi is not None:
            Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, c):  # row_dst += c * row_src
        ra, rs = a[dst], a[src]
        for k in range(n):
            if rs[k]:
                ra[k] += c * rs[k]
        ua, us = U[dst], U[src]
        for k in range(m):
            if us[k]:
                ua[k] += c * us[k]

    def add_col(dst, src, c):  # col_dst += c * col_src
        for r in a:
            if r[src]:
                r[dst] += c * r[src]
        for r in V:
            if r[src]:
                r[dst] += c * r[src]
        if Vi is not None:
            vd, vs = Vi[dst], Vi[src]
            for k in range(n):
                if vd[k]:
                    vs[k] -= c * vd[k]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                row = a[i]
                for j in range(t, n):
                    x = row[j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
                        if best[0] == 1:
                            break
                if best is not None and best[0] == 1:
                    break
            if best is None:
                return U, V, Vi
            _, i, j = best
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    add_row(i, t, -q)
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    add_col(j, t, -q)
                    dirty = dirty or a[t][j] != 0
            if dirty:
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
    return U, V, Vi


def smith_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (U, S, V) with U*M*V = S diagonal, d_1 | d_2 | ..., U, V unimodular.

    Pivots are chosen as the entry of smallest absolute value.
    """
    a = M.tolist()
    U, V, _ = _smith(a, M.rows, M.cols)
    return IntMatrix(U, M.rows), IntMatrix(a, M.cols), IntMatrix(V, M.cols)


def _smith_with_inverse(M: IntMatrix):
    a = M.tolist()
    U, V, Vi = _smith(a, M.rows, M.cols, want_vinv=True)
    return (
        IntMatrix(U, M.rows),
        IntMatrix(a, M.cols),
        IntMatrix(V, M.cols),
        IntMatrix(Vi, M.cols),
    )


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class InvariantFactors:
    factors: tuple[int, ...]
    free_rank: int = 0

    def __post_init__(self):
        fs = tuple(self.factors)
        if any(f <= 1 for f in fs):
            raise ValueError("invariant factors must exceed 1")
        if any(b % a for a, b in zip(fs, fs[1:])):
            raise ValueError("invariant factors must form a divisibility chain")
        object.__setattr__(self, "factors", fs)

    @classmethod
    def from_diagonal(cls, diag: Iterable[int], free_rank: int = 0) -> InvariantFactors:
        return cls(tuple(d for d in diag if d > 1), free_rank)

    @classmethod
    def from_cyclic_orders(cls, orders: Iterable[int]) -> InvariantFactors:
        """Canonical form of a direct sum of cyclic groups (0 meaning Z)."""
        orders = list(orders)
        free = sum(1 for o in orders if o == 0)
        G = PresentedGroup.diagonal([o for o in orders if o != 0])
        return InvariantFactors(G.invariant_factors().factors, free)

    def order(self) -> int | None:
        return None if self.free_rank else prod(self.factors)

    def is_trivial(self) -> bool:
        return not self.factors and not self.free_rank

    def count_killed_by(self, k: int) -> int:
        """Number of elements x with k*x = 0 (finite groups only)."""
        if self.free_rank and k == 0:
            raise ValueError("infinite")
        return prod(gcd(k, d) for d in self.factors)

    def to_json(self) -> dict:
        return {"invariant_factors": list(self.factors), "free_rank": self.free_rank}

    def __str__(self):
        parts = [f"Z/{d}" for d in self.factors]
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"


def _sparse(col: Sequence[int] | dict) -> dict:
    if isinstance(col, dict):
        return {i: v for i, v in col.items() if v}
    return {i: v for i, v in enumerate(col) if v}


class PresentedGroup:
    """``Z^g / <relations>`` (tensored with ``Z/modulus`` when a modulus is set).

    ``relations`` may be an :class:`IntMatrix` (one relation per column) or an
    iterable of sparse columns (``{generator_index: coefficient}``).
    """

    def __init__(
        self,
        num_generators: int,
        relations: IntMatrix | Iterable = (),
        modulus: int | None = None,
        labels: Sequence[str] | None = None,
    ):
        if modulus is not None and modulus < 1:
            raise ValueError("modulus must be positive")
        if isinstance(relations, IntMatrix):
            if relations.cols and relations.rows != num_generators:
                raise ValueError("relation matrix must have one row per generator")
            cols = [_sparse(relations.column(j)) for j in range(relations.cols)]
        else:
            cols = [_sparse(c) for c in relations]
        for c in cols:
            if any(not 0 <= i < num_generators for i in c):
                raise ValueError("relation refers to a missing generator")
        self.num_generators = num_generators
        self.modulus = modulus
        self._cols = tuple(tuple(sorted(c.items())) for c in cols)
        self.labels = tuple(labels) if labels is not None else None
        self._invariants: InvariantFactors | None = None

    # constructors -----------------------------------------------------
    @classmethod
    def diagonal(cls, orders: Sequence[int], modulus: int | None = None, labels=None):
        rels = [{i: d} for i, d in enumerate(orders) if d]
        return cls(len(orders), rels, modulus, labels)

    @classmethod
    def cyclic(cls, n: int) -> PresentedGroup:
        return cls.diagonal([n])

    @classmethod
    def trivial(cls, modulus: int | None = None) -> PresentedGroup:
        return cls(0, (), modulus)

    # accessors ----------------------------------------------------------
    @property
    def num_relations(self) -> int:
        return len(self._cols)

    @property
    def relations(self) -> IntMatrix:
        g = self.num_generators
        dense = []
        for c in self._cols:
            v = [0] * g
            for i, x in c:
                v[i] = x
            dense.append(v)
        return IntMatrix.from_columns(dense, g)

    def sparse_relations(self) -> list[dict]:
        return [dict(c) for c in self._cols]

    def with_relations(self, extra: Iterable) -> PresentedGroup:
        return PresentedGroup(
            self.num_generators,
            [dict(c) for c in self._cols] + [_sparse(c) for c in extra],
            self.modulus,
            self.labels,
        )

    def direct_sum(self, other: PresentedGroup) -> PresentedGroup:
        if self.modulus != other.modulus:
            raise MixedModulus("direct sum needs equal moduli")
        g = self.num_generators
        rels = [dict(c) for c in self._cols]
        rels += [{i + g: v for i, v in c} for c in other._cols]
        labels = None
        if self.labels is not None and other.labels is not None:
            labels = self.labels + other.labels
        return PresentedGroup(g + other.num_generators, rels, self.modulus, labels)

    # invariants -----------------------------------------------------------
    def invariant_factors(self) -> InvariantFactors:
        if self._invariants is None:
            self._invariants = _compute_invariants(
                self.num_generators, [dict(c) for c in self._cols], self.modulus
            )
        return self._invariants

    def order(self) -> int | None:
        return self.invariant_factors().order()

    def is_trivial(self) -> bool:
        return self.invariant_factors().is_trivial()

    def contains_all(self, vectors: Iterable) -> bool:
        """True iff every vector lies in the relation lattice (element is 0)."""
        vecs = [_sparse(v) for v in vectors]
        vecs = [v for v in vecs if v]
        if not vecs:
            return True
        # a surjection between isomorphic f.g. abelian groups is injective
        return self.with_relations(vecs).invariant_factors() == self.invariant_factors()

    def __repr__(self):
        return (
            f"PresentedGroup(generators={self.num_generators}, "
            f"relations={self.num_relations}, modulus={self.modulus})"
        )


# ---------------------------------------------------------------------------
# reduction pipeline


def _tietze(ngens: int, cols: list[dict], modulus: int | None):
    """Eliminate generators occurring with a unit coefficient (+-1)."""
    if modulus is not None:
        cols = [{i: v % modulus for i, v in c.items() if v % modulus} for c in cols]
        if modulus == 1:
            return [], []

    def is_unit(v):
        if modulus is None:
            return v in (1, -1)
        return v % modulus in (1, modulus - 1)

    def norm(v):
        return v % modulus if modulus is not None else v

    live = {k: c for k, c in enumerate(cols) if c}
    by_row: dict[int, set] = {}
    for k, c in live.items():
        for i in c:
            by_row.setdefault(i, set()).add(k)
    alive_rows = set(range(ngens))
    heap = [(len(c), k) for k, c in live.items()]
    heapq.heapify(heap)
    while heap:
        size, k = heapq.heappop(heap)
        c = live.get(k)
        if c is None or len(c) != size:
            continue
        units = [i for i, v in c.items() if is_unit(v)]
        if not units:
            continue
        r = min(units, key=lambda i: (len(by_row[i]), i))
        u = c[r]
        u = 1 if (u == 1 or (modulus is not None and u % modulus == 1)) else -1
        # generator r = -u * sum_{i != r} c[i] * g_i
        del live[k]
        for i in c:
            by_row[i].discard(k)
        for k2 in list(by_row.get(r, ())):
            c2 = live[k2]
            a = c2[r] * u
            for i, v in c.items():
                nv = norm(c2.get(i, 0) - a * v)
                if nv:
                    if i not in c2:
                        by_row.setdefault(i, set()).add(k2)
                    c2[i] = nv
                elif i in c2:
                    del c2[i]
                    by_row[i].discard(k2)
            if c2:
                heapq.heappush(heap, (len(c2), k2))
            else:
                del live[k2]
        by_row.pop(r, None)
        alive_rows.discard(r)
    rows = sorted(alive_rows)
    index = {r: j for j, r in enumerate(rows)}
    out = [{index[i]: v for i, v in c.items()} for c in live.values()]
    return rows, out


def _egcd(a: int, b: int):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _column_echelon(g: int, cols: list[list[int]], modulus: int | None) -> list[list[int]]:
    """Basis of the column lattice (mod ``modulus`` when given, Howell style)."""

    def red(v):
        return [x % modulus for x in v] if modulus is not None else v

    remaining = [red(c) for c in cols]
    remaining = [c for c in remaining if any(c)]
    pivots = []
    for i in range(g):
        with_entry = [c for c in remaining if c[i]]
        if not with_entry:
            continue
        rest = [c for c in remaining if not c[i]]
        p = with_entry[0]
        for c in with_entry[1:]:
            a, b = p[i], c[i]
            d, x, y = _egcd(a, b)
            ad, bd = a // d, b // d
            newp = red([x * u + y * v for u, v in zip(p, c)])
            newc = red([ad * v - bd * u for u, v in zip(p, c)])
            p = newp
            if any(newc):
                rest.append(newc)
        if modulus is not None:
            if p[i] == 0:
                if any(p):
                    rest.append(p)
                remaining = rest
                continue
            k = modulus // gcd(p[i], modulus)
            extra = red([k * x for x in p])
            if any(extra):
                rest.append(extra)
        pivots.append(p)
        remaining = [c for c in rest if any(c)]
    return pivots


def _compute_invariants(ngens: int, cols: list[dict], modulus: int | None) -> InvariantFactors:
    rows, reduced = _tietze(ngens, cols, modulus)
    g = len(rows)
    if g == 0:
        return InvariantFactors(())
    dense = []
    for c in reduced:
        v = [0] * g
        for i, x in c.items():
            v[i] = x
        dense.append(v)
    basis = _column_echelon(g, dense, modulus)
    if modulus is not None:
        basis += [[modulus * int(i == j) for i in range(g)] for j in range(g)]
    if not basis:
        return InvariantFactors((), g)
    M = IntMatrix.from_columns(basis, g)
    U, S, V = smith_normal_form(M)
    if U @ M @ V != S or not S.is_diagonal():
        raise HicftError("Smith normal form failed verification")
    if abs(U.det()) != 1 or abs(V.det()) != 1:
        raise HicftError("Smith transforms are not unimodular")
    diag = [S[i, i] for i in range(min(S.rows, S.cols))]
    rank = sum(1 for d in diag if d)
    inv = InvariantFactors.from_diagonal([d for d in diag if d], g - rank)
    if modulus is not None and inv.free_rank:
        raise HicftError("group with modulus reported a free part")
    return inv


# ---------------------------------------------------------------------------
# maps


class GroupMap:
    """Homomorphism given on generators; ``matrix`` has one column per source generator."""

    def __init__(self, source: PresentedGroup, target: PresentedGroup, matrix: IntMatrix | Sequence):
        if not isinstance(matrix, IntMatrix):
            matrix = IntMatrix.from_columns([list(c) for c in matrix], target.num_generators)
        if matrix.rows != target.num_generators or matrix.cols != source.num_generators:
            raise ValueError("map matrix has the wrong shape")
        self.source = source
        self.target = target
        self.matrix = matrix
        images = [self.image(r) for r in source.sparse_relations()]
        if source.modulus is not None:
            images += [
                [source.modulus * x for x in matrix.column(j)] for j in range(matrix.cols)
            ]
        if not target.contains_all(images):
            raise HicftError("map does not respect the source relations")

    def image(self, vector: dict | Sequence[int]) -> list[int]:
        v = _sparse(vector)
        out = [0] * self.matrix.rows
        for j, c in v.items():
            for i in range(self.matrix.rows):
                x = self.matrix[i, j]
                if x:
                    out[i] += c * x
        return out


def invariant_factors(G: PresentedGroup) -> InvariantFactors:
    return G.invariant_factors()


def is_isomorphic(G: PresentedGroup, H: PresentedGroup) -> bool:
    if (G.modulus is None) != (H.modulus is None):
        raise MixedModulus("cannot compare a group with a modulus to one without")
    return G.invariant_factors() == H.invariant_factors()


def cokernel(f: GroupMap) -> PresentedGroup:
    t = f.target
    images = [f.matrix.column(j) for j in range(f.matrix.cols)]
    return PresentedGroup(
        t.num_generators,
        t.sparse_relations() + [_sparse(c) for c in images],
        t.modulus,
        t.labels,
    )


def kernel_basis(M: IntMatrix) -> list[list[int]]:
    """A Z-basis of ``{x : M x = 0}``, read from the column transform of the SNF."""
    if M.cols == 0:
        return []
    if M.rows == 0:
        return [list(IntMatrix.identity(M.cols).column(j)) for j in range(M.cols)]
    _, S, V = smith_normal_form(M)
    rank = sum(1 for i in range(min(S.rows, S.cols)) if S[i, i])
    return [list(V.column(j)) for j in range(rank, M.cols)]


def subgroup_generated(orders: Sequence[int], vectors: Sequence[Sequence[int]]) -> PresentedGroup:
    """The subgroup of ``⊕ Z/orders[i]`` spanned by ``vectors``, as ``Z^k / relations``.

    A coefficient vector ``c`` is a relation when ``sum c_j v_j`` vanishes in
    every coordinate, i.e. ``(c, y)`` lies in the kernel of ``[W | diag(orders)]``.
    """
    k = len(vectors)
    if k == 0:
        return PresentedGroup.trivial()
    J = len(orders)
    if J == 0:
        return PresentedGroup(k, [{j: 1} for j in range(k)])
    rows = [[vectors[j][i] for j in range(k)] + [orders[i] if t == i else 0 for t in range(J)] for i in range(J)]
    rels = [_sparse(v[:k]) for v in kernel_basis(IntMatrix(rows, k + J))]
    return PresentedGroup(k, [r for r in rels if r])
