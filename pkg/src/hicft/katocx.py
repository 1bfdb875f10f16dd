"""Nerve complexes of simple normal crossing configurations.

A configuration lists N components and, for each subset ``{i_1 < ... < i_s}``
with nonempty intersection, the number of connected components of that
intersection.  Face maps ``delta_nu`` drop the nu-th index (1-based) and send
a connected component to the one containing it.  When the target has a single
component the face map is forced; otherwise it must be given explicitly.

The complex has ``C_a = (Z/n)^{pi_0(Y^[a+1])}`` in degree a with
``d = sum_nu (-1)^(nu+1) (delta_nu)_*``; everything is combinatorial.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

from .abgroup import IntMatrix, PresentedGroup, kernel_basis
from .errors import DegreeOutOfRange, FaceMapIncompatible, ParseError


@dataclass(frozen=True)
class SNCConfig:
    components: int
    pi0: dict  # frozenset-free: tuple(sorted subset) -> count
    faces: dict  # (subset, nu) -> tuple of target component indices

    @classmethod
    def build(cls, components: int, intersections=(), faces=()) -> SNCConfig:
        """``intersections``: ``[(subset, pi0), ...]``; ``faces``: ``[(subset, nu, map), ...]``."""
        if components < 1:
            raise ParseError("a configuration needs at least one component")
        pi0 = {(i,): 1 for i in range(1, components + 1)}
        for subset, count in intersections:
            S = tuple(sorted(subset))
            if len(set(S)) != len(S) or not S or S[0] < 1 or S[-1] > components:
                raise ParseError(f"bad subset {list(subset)}")
            if count < 0:
                raise ParseError("pi0 counts are non-negative")
            pi0[S] = count
        pi0 = {S: c for S, c in pi0.items() if c}
        given = {}
        for subset, nu, mapping in faces:
            given[(tuple(sorted(subset)), nu)] = tuple(mapping)
        full = {}
        for S, c in pi0.items():
            if len(S) == 1:
                continue
            for nu in range(1, len(S) + 1):
                T = S[: nu - 1] + S[nu:]
                target = pi0.get(T, 0)
                if target == 0:
                    raise FaceMapIncompatible(
                        f"{list(S)} is nonempty but its face {list(T)} is empty"
                    )
                m = given.get((S, nu))
                if m is None:
                    if target != 1:
                        raise FaceMapIncompatible(
                            f"face map delta_{nu} on {list(S)} is ambiguous; give it explicitly"
                        )
                    m = (0,) * c
                if len(m) != c or any(not 0 <= x < target for x in m):
                    raise FaceMapIncompatible(f"face map delta_{nu} on {list(S)} is malformed")
                full[(S, nu)] = m
        cfg = cls(components, pi0, full)
        cfg.check_simplicial()
        return cfg

    @classmethod
    def from_json(cls, data) -> SNCConfig:
        if isinstance(data, (str, Path)):
            data = json.loads(Path(data).read_text())
        inter = [(d["subset"], int(d["pi0"])) for d in data.get("intersections", [])]
        faces = [(d["subset"], int(d["nu"]), d["map"]) for d in data.get("faces", [])]
        return cls.build(int(data["components"]), inter, faces)

    def to_json(self) -> dict:
        inter = [
            {"subset": list(S), "pi0": c} for S, c in sorted(self.pi0.items()) if len(S) > 1
        ]
        faces = [
            {"subset": list(S), "nu": nu, "map": list(m)} for (S, nu), m in sorted(self.faces.items())
        ]
        return {"components": self.components, "intersections": inter, "faces": faces}

    def cells(self, s: int) -> list[tuple]:
        """``pi_0(Y^[s])`` as ``(subset, index)`` pairs in canonical order."""
        out = []
        for S in combinations(range(1, self.components + 1), s):
            for c in range(self.pi0.get(S, 0)):
                out.append((S, c))
        return out

    def face(self, nu: int, cell: tuple) -> tuple:
        S, c = cell
        T = S[: nu - 1] + S[nu:]
        return (T, self.faces[(S, nu)][c])

    def check_simplicial(self):
        """``delta_mu delta_nu = delta_nu delta_(mu+1)`` for ``nu <= mu``."""
        for s in range(3, self.components + 1):
            for cell in self.cells(s):
                for nu in range(1, s):
                    for mu in range(nu, s):
                        a = self.face(mu, self.face(nu, cell))
                        b = self.face(nu, self.face(mu + 1, cell))
                        if a != b:
                            raise FaceMapIncompatible(
                                f"delta_{mu} delta_{nu} != delta_{nu} delta_{mu + 1} on {cell}"
                            )

    @property
    def top_degree(self) -> int:
        return max(len(S) for S in self.pi0) - 1


@dataclass(frozen=True)
class NerveComplex:
    config: SNCConfig
    n: int
    bases: tuple  # bases[a] = cells of C_a
    differentials: tuple  # differentials[a]: C_a -> C_(a-1), as IntMatrix (a >= 1)

    @property
    def top_degree(self) -> int:
        return len(self.bases) - 1

    def rank(self, a: int) -> int:
        return len(self.bases[a]) if 0 <= a < len(self.bases) else 0

    def matrix(self, a: int) -> IntMatrix:
        """``d_a: C_a -> C_(a-1)``; zero outside the range."""
        if 1 <= a <= self.top_degree:
            return self.differentials[a]
        return IntMatrix.zeros(self.rank(a - 1), self.rank(a))


def build_nerve_complex(config: SNCConfig, n: int) -> NerveComplex:
    if n < 2:
        raise ValueError("n must be at least 2")
    top = config.top_degree
    bases = tuple(tuple(config.cells(a + 1)) for a in range(top + 1))
    diffs = [None]
    for a in range(1, top + 1):
        index = {cell: i for i, cell in enumerate(bases[a - 1])}
        rows = [[0] * len(bases[a]) for _ in bases[a - 1]]
        for j, cell in enumerate(bases[a]):
            for nu in range(1, a + 2):
                rows[index[config.face(nu, cell)]][j] += (-1) ** (nu + 1)
        diffs.append(IntMatrix(rows, len(bases[a])))
    cx = NerveComplex(config, n, bases, tuple(diffs))
    for a in range(2, top + 1):
        dd = cx.matrix(a - 1) @ cx.matrix(a)
        if any(x % n for row in dd.tolist() for x in row):
            raise FaceMapIncompatible(f"d o d != 0 in degree {a}")
    return cx


def homology(cx: NerveComplex, a: int) -> PresentedGroup:
    """``H_a = ker d_a / im d_(a+1)`` over ``Z/n``."""
    if not 0 <= a <= cx.top_degree + 1:
        raise DegreeOutOfRange(f"degree {a} is outside 0..{cx.top_degree + 1}")
    n = cx.n
    ca, cb = cx.rank(a), cx.rank(a - 1)
    if ca == 0:
        return PresentedGroup.trivial(n)
    d = cx.matrix(a)
    # kernel of d_a mod n: integer kernel of [d_a | n I], first ca entries
    rows = [list(d.row(i)) + [n if j == i else 0 for j in range(cb)] for i in range(cb)]
    if cb:
        ker = [v[:ca] for v in kernel_basis(IntMatrix(rows, ca + cb))]
    else:
        ker = [[int(i == j) for i in range(ca)] for j in range(ca)]
    ker = [v for v in ker if any(x % n for x in v)]
    if not ker:
        return PresentedGroup.trivial(n)
    e = cx.matrix(a + 1)
    im = [list(e.column(j)) for j in range(e.cols)]
    k = len(ker)
    cols = ker + im + [[n if i == j else 0 for i in range(ca)] for j in range(ca)]
    W = IntMatrix([[c[i] for c in cols] for i in range(ca)], len(cols))
    rels = []
    for v in kernel_basis(W):
        r = {j: v[j] for j in range(k) if v[j]}
        if r:
            rels.append(r)
    return PresentedGroup(k, rels, n)


def euler_characteristic(cx: NerveComplex) -> int:
    return sum((-1) ** a * cx.rank(a) for a in range(cx.top_degree + 1))


@dataclass(frozen=True)
class ObstructionReport:
    n: int
    h1: tuple
    h2: tuple

    def render(self) -> str:
        def show(fs):
            return " + ".join(f"Z/{f}" for f in fs) if fs else "0"

        lines = [
            f"nerve complex over Z/{self.n}: H_1 = {show(self.h1)}, H_2 = {show(self.h2)}",
            f"  {show(self.h2)} -> C(X,D)/{self.n} -> pi_1^ab(X,D)/{self.n} -> {show(self.h1)} -> 0",
        ]
        if not self.h1 and not self.h2:
            lines.append("  both ends vanish: the reciprocity map is an isomorphism mod n")
        else:
            if self.h2:
                lines.append("  H_2 bounds the kernel of the reciprocity map")
            if self.h1:
                lines.append("  H_1 is the cokernel of the reciprocity map")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {"n": self.n, "H1": list(self.h1), "H2": list(self.h2), "statement": self.render()}


def obstruction_report(config: SNCConfig, n: int) -> ObstructionReport:
    cx = build_nerve_complex(config, n)

    def h(a):
        if a > cx.top_degree + 1:
            return ()
        return homology(cx, a).invariant_factors().factors

    return ObstructionReport(n, h(1), h(2))


# ---------------------------------------------------------------------------
# small configurations


def single_component() -> SNCConfig:
    return SNCConfig.build(1)


def triangle() -> SNCConfig:
    """Three lines meeting pairwise in one point each, no triple point."""
    return SNCConfig.build(3, [((1, 2), 1), ((1, 3), 1), ((2, 3), 1)])


def chain_of(k: int) -> SNCConfig:
    return SNCConfig.build(k, [((i, i + 1), 1) for i in range(1, k)])


def graph_config(vertices: int, edges) -> SNCConfig:
    """Point intersections along the edges of a simple graph (no triple points)."""
    return SNCConfig.build(vertices, [(tuple(e), 1) for e in edges])


__all__ = [
    "SNCConfig",
    "NerveComplex",
    "build_nerve_complex",
    "homology",
    "euler_characteristic",
    "ObstructionReport",
    "obstruction_report",
    "single_component",
    "triangle",
    "chain_of",
    "graph_config",
]
