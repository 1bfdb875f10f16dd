"""Scheme models with dimension functions, chains and their residue rings.

Two concrete models are supported:

* :class:`CurveModel` -- ``P^1`` over ``F_q``: the generic point (dimension 1)
  and the closed places (dimension 0);
* :class:`LocalSurfaceModel` -- ``Spec F_q[[s,t]]``: the closed point ``m``,
  height-one primes drawn from a curated list, and the generic point.

A third, :class:`PosetModel`, is a bare finite poset with a dimension
function.  It only supports chain classification (used for arithmetic
surfaces, where no residue rings are built).

Chains are tuples of points ``(p_0, ..., p_s)``, closed-most first.  The
kind predicates are kept apart from the enumerator so they can re-check it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations

from .bilaurent import TwoLocalField, bipoly, format_bipoly, parse_bipoly
from .curve import Place, parse_place
from .errors import (
    AnalyticSplittingUnsupported,
    NotMaximalChain,
    ParseError,
    UnsupportedPrime,
)
from .gf import GF, fq, trim
from .laurent import DEFAULT_PRECISION, LaurentField

GENERIC = "eta"
CLOSED = "m"
U_FAMILY = "x in U"


# ---------------------------------------------------------------------------
# height-one primes of F_q[[s,t]]


@dataclass(frozen=True)
class LocalPrime:
    """A height-one prime of ``F_q[[s,t]]``.

    ``kind`` is ``"s"``, ``"t"``, ``"graph_t"`` (``t - phi(s)`` with
    ``phi(0) = 0``), ``"graph_s"`` (``s - psi(t)`` with ``psi`` of order at
    least two) or ``"other"`` for anything outside the curated list.
    """

    field: GF
    kind: str
    coeffs: tuple = ()  # phi or psi, low degree first; the polynomial for "other"

    def polynomial(self):
        F = self.field
        if self.kind == "s":
            return bipoly(F, [((1, 0), 1)])
        if self.kind == "t":
            return bipoly(F, [((0, 1), 1)])
        if self.kind == "graph_t":
            return bipoly(F, [((0, 1), 1)] + [((i, 0), F.neg(c)) for i, c in enumerate(self.coeffs)])
        if self.kind == "graph_s":
            return bipoly(F, [((1, 0), 1)] + [((0, j), F.neg(c)) for j, c in enumerate(self.coeffs)])
        return self.coeffs

    @property
    def supported(self) -> bool:
        return self.kind != "other"

    @property
    def degree(self) -> int:
        return max(i + j for (i, j), _ in self.polynomial())

    def name(self) -> str:
        return format_bipoly(self.field, self.polynomial())

    def __str__(self):
        return f"({self.name()})"

    def key(self) -> tuple:
        order = {"s": 0, "t": 1, "graph_t": 2, "graph_s": 3, "other": 4}[self.kind]
        return (self.degree, order, self.coeffs)

    def __lt__(self, other):
        return self.key() < other.key()

    def parametrization(self) -> tuple[tuple, tuple]:
        """``(s(x), t(x))`` identifying ``A/p`` with ``F_q[[x]]``."""
        if self.kind == "s":
            return (), (0, 1)
        if self.kind == "t":
            return (0, 1), ()
        if self.kind == "graph_t":
            return (0, 1), self.coeffs
        if self.kind == "graph_s":
            return self.coeffs, (0, 1)
        raise AnalyticSplittingUnsupported(
            f"({self.name()}) is not on the list of primes with a known analytic branch"
        )

    def residue_var(self) -> str:
        return "t" if self.kind in ("s", "graph_s") else "s"


def classify_prime(F: GF, poly) -> LocalPrime:
    """Recognize ``poly`` (a BiPoly) as a curated prime, or return kind ``"other"``."""
    f = dict(bipoly(F, poly))
    if not f:
        raise UnsupportedPrime("zero does not define a prime")
    if f.get((0, 0), 0):
        raise UnsupportedPrime("a unit of F_q[[s,t]] does not define a prime")
    pure_s = all(j == 0 for (i, j) in f if (i, j) != (0, 1))
    pure_t = all(i == 0 for (i, j) in f if (i, j) != (1, 0))
    if f.get((0, 1)) and pure_s:
        c = F.inv(f[(0, 1)])
        chi = {i: F.mul(c, a) for (i, j), a in f.items() if (i, j) != (0, 1)}
        if not chi:
            return LocalPrime(F, "t")
        phi = trim([F.neg(chi.get(i, 0)) for i in range(max(chi) + 1)])
        return LocalPrime(F, "graph_t", phi)
    if f.get((1, 0)) and pure_t:
        c = F.inv(f[(1, 0)])
        chi = {j: F.mul(c, a) for (i, j), a in f.items() if (i, j) != (1, 0)}
        if not chi:
            return LocalPrime(F, "s")
        psi = trim([F.neg(chi.get(j, 0)) for j in range(max(chi) + 1)])
        if len(psi) >= 2 and psi[1]:
            if len(psi) == 2:
                # s = a t is the graph t = s / a
                return LocalPrime(F, "graph_t", (0, F.inv(psi[1])))
            return LocalPrime(F, "other", tuple(sorted(f.items())))
        return LocalPrime(F, "graph_s", psi)
    return LocalPrime(F, "other", tuple(sorted(f.items())))


def parse_local_prime(F: GF, text: str) -> LocalPrime:
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    return classify_prime(F, parse_bipoly(F, s))


def curated_primes(F: GF, B: int, exclude=()) -> list[LocalPrime]:
    """Supported height-one primes of total degree at most B, in canonical order."""
    from itertools import product as iproduct

    out = [LocalPrime(F, "s"), LocalPrime(F, "t")]
    units = list(F.elements())
    for d in range(1, B + 1):
        for tail in iproduct(units, repeat=d - 1):
            for top in F.units():
                phi = (0,) + tail + (top,)
                out.append(LocalPrime(F, "graph_t", phi))
        if d >= 2:
            for tail in iproduct(units, repeat=d - 2):
                for top in F.units():
                    psi = (0, 0) + tail + (top,)
                    out.append(LocalPrime(F, "graph_s", psi))
    out = [p for p in out if p not in exclude]
    return sorted(set(out))


# ---------------------------------------------------------------------------
# divisors


@dataclass(frozen=True)
class DivisorData:
    components: tuple = ()  # ((prime, multiplicity), ...), sorted, multiplicities >= 1

    @classmethod
    def make(cls, items) -> DivisorData:
        acc: dict = {}
        for p, m in items:
            if m < 1:
                raise ValueError("multiplicities must be positive")
            acc[p] = acc.get(p, 0) + m
        return cls(tuple(sorted(acc.items(), key=lambda pm: pm[0].key())))

    @property
    def support(self) -> tuple:
        return tuple(p for p, _ in self.components)

    def multiplicity(self, p) -> int:
        return dict(self.components).get(p, 0)

    def reduced(self) -> DivisorData:
        return DivisorData(tuple((p, 1) for p, _ in self.components))

    def __le__(self, other: DivisorData) -> bool:
        return all(other.multiplicity(p) >= m for p, m in self.components)

    def is_empty(self) -> bool:
        return not self.components

    def format(self) -> str:
        if not self.components:
            return "0"
        parts = []
        for p, m in self.components:
            body = str(p)
            parts.append(body if m == 1 else f"{m}{body}")
        return "+".join(parts)

    def to_json(self) -> list:
        return [{"prime": p.name(), "mult": m} for p, m in self.components]


_DIV_TERM = re.compile(r"^(\d*)\s*([\[(])(.*)([\])])$")


def _split_divisor(text: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch == "+" and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur).strip())
    return [x for x in out if x]


def parse_curve_divisor(F: GF, text: str) -> DivisorData:
    """``"2[0]+[inf]"``, ``"[t^2+1]"``; an empty string or ``"0"`` is the zero divisor."""
    s = text.strip()
    if s in ("", "0"):
        return DivisorData()
    items = []
    for term in _split_divisor(s):
        m = _DIV_TERM.match(term)
        if not m or m.group(2) != "[" or m.group(4) != "]":
            raise ParseError(f"bad divisor term {term!r}")
        items.append((parse_place(F, m.group(3)), int(m.group(1) or 1)))
    return DivisorData.make(items)


def parse_surface_divisor(F: GF, text: str) -> DivisorData:
    """``"(s)+(t)"``, ``"3(s)"``, ``"(st)"`` (shorthand for ``(s)+(t)``)."""
    s = text.strip().replace(" ", "")
    if s in ("", "0"):
        return DivisorData()
    items = []
    for term in _split_divisor(s):
        m = _DIV_TERM.match(term)
        if not m or m.group(2) != "(" or m.group(4) != ")":
            raise ParseError(f"bad divisor term {term!r}")
        mult = int(m.group(1) or 1)
        body = m.group(3)
        if body in ("st", "ts", "s*t", "t*s"):
            items += [(LocalPrime(F, "s"), mult), (LocalPrime(F, "t"), mult)]
            continue
        items.append((parse_local_prime(F, body), mult))
    return DivisorData.make(items)


def divisor_from_json(model, items) -> DivisorData:
    F = model.field
    out = []
    for it in items:
        text = str(it["prime"])
        p = parse_place(F, text) if isinstance(model, CurveModel) else parse_local_prime(F, text)
        out.append((p, int(it.get("mult", 1))))
    return DivisorData.make(out)


# ---------------------------------------------------------------------------
# models


@dataclass(frozen=True)
class SchemePoint:
    ident: object
    dim: int

    def name(self) -> str:
        if isinstance(self.ident, str):
            return self.ident
        return str(self.ident)


class CurveModel:
    """``P^1`` over ``F_q`` with ``d(x) = dim closure(x)``."""

    kind = "p1"
    dimension = 1
    min_dimension = 0

    def __init__(self, field: GF):
        self.field = field
        self.generic = SchemePoint(GENERIC, 1)

    @classmethod
    def over(cls, q: int) -> CurveModel:
        return cls(fq(q))

    def point(self, x) -> SchemePoint:
        if isinstance(x, SchemePoint):
            return x
        if x == GENERIC:
            return self.generic
        if x == U_FAMILY:
            return SchemePoint(U_FAMILY, 0)
        if isinstance(x, Place):
            return SchemePoint(x, 0)
        return SchemePoint(parse_place(self.field, str(x)), 0)

    def contains(self, x: SchemePoint, y: SchemePoint) -> bool:
        """Is x in the closure of y?"""
        return x == y or y.ident == GENERIC

    def in_divisor(self, x: SchemePoint, D: DivisorData) -> bool:
        if x.ident == U_FAMILY:
            return False
        return x.ident in D.support

    def check_divisor(self, D: DivisorData):
        for p in D.support:
            if not isinstance(p, Place):
                raise UnsupportedPrime(f"{p} is not a place of P^1")

    def codim_one_pairs(self, closed_points) -> list:
        return [(self.generic, self.point(x)) for x in closed_points]

    def spec(self) -> dict:
        return {"kind": "p1", "q": self.field.order}


class LocalSurfaceModel:
    """``Spec F_q[[s,t]]`` with the curated height-one primes."""

    kind = "local_surface"
    dimension = 2
    min_dimension = 0

    def __init__(self, field: GF):
        self.field = field
        self.generic = SchemePoint(GENERIC, 2)
        self.closed = SchemePoint(CLOSED, 0)

    @classmethod
    def over(cls, q: int) -> LocalSurfaceModel:
        return cls(fq(q))

    def point(self, x) -> SchemePoint:
        if isinstance(x, SchemePoint):
            return x
        if x == GENERIC:
            return self.generic
        if x == CLOSED:
            return self.closed
        if x == U_FAMILY:
            return SchemePoint(U_FAMILY, 1)
        if isinstance(x, LocalPrime):
            return SchemePoint(x, 1)
        return SchemePoint(parse_local_prime(self.field, str(x)), 1)

    def contains(self, x: SchemePoint, y: SchemePoint) -> bool:
        return x == y or y.ident == GENERIC or x.ident == CLOSED

    def in_divisor(self, x: SchemePoint, D: DivisorData) -> bool:
        # the closed point lies on every component; the generic point on none
        if x.ident == CLOSED:
            return not D.is_empty()
        if x.ident in (GENERIC, U_FAMILY):
            return False
        return x.ident in D.support

    def check_divisor(self, D: DivisorData):
        for p in D.support:
            if not isinstance(p, LocalPrime) or not p.supported:
                raise UnsupportedPrime(f"{p} is not a supported prime of F_q[[s,t]]")

    def codim_one_pairs(self, primes) -> list:
        out = []
        for p in primes:
            x = self.point(p)
            out += [(self.generic, x), (x, self.closed)]
        return out

    def spec(self) -> dict:
        return {"kind": "local_surface", "q": self.field.order}


class PosetModel:
    """A finite poset of named points with a dimension function.

    ``below`` maps each point to the points of codimension one in its
    closure; the containment order is the transitive closure.
    """

    kind = "poset"

    def __init__(self, dims: dict, below: dict):
        self.dims = dict(dims)
        self.below = {k: tuple(v) for k, v in below.items()}
        self.dimension = max(self.dims.values())
        self.min_dimension = min(self.dims.values())
        self._closure = {x: self._down(x) for x in self.dims}
        self.generic = SchemePoint(max(self.dims, key=lambda k: self.dims[k]), self.dimension)

    def _down(self, x) -> set:
        out, stack = {x}, [x]
        while stack:
            for y in self.below.get(stack.pop(), ()):
                if y not in out:
                    out.add(y)
                    stack.append(y)
        return out

    def point(self, x) -> SchemePoint:
        if isinstance(x, SchemePoint):
            return x
        return SchemePoint(x, self.dims[x])

    def points(self) -> list[SchemePoint]:
        return [SchemePoint(x, d) for x, d in sorted(self.dims.items(), key=lambda kv: (kv[1], str(kv[0])))]

    def contains(self, x: SchemePoint, y: SchemePoint) -> bool:
        return x.ident in self._closure[y.ident]

    def in_divisor(self, x: SchemePoint, D) -> bool:
        """D is a collection of divisor components (points); x is in D if it specializes from one."""
        return any(x.ident in self._closure[c] for c in D)

    def codim_one_pairs(self, _=None) -> list:
        return [(self.point(x), self.point(y)) for x, ys in self.below.items() for y in ys]

    def check_divisor(self, D):
        for c in D:
            if c not in self.dims:
                raise UnsupportedPrime(f"unknown point {c!r}")


def dimension_axiom_holds(model, pairs) -> bool:
    """``d(x) = d(y) + 1`` whenever y is a codimension-one specialization of x; ``d >= 0``."""
    return all(x.dim == y.dim + 1 and y.dim >= 0 for x, y in pairs)


# ---------------------------------------------------------------------------
# chains and kind predicates

KINDS = ("Chain", "Parshin", "ParshinOnPair", "QChain", "QoChain")


@dataclass(frozen=True)
class ChainRecord:
    model: object = field(compare=False, hash=False, repr=False)
    points: tuple
    kind: str
    family: bool = False

    @property
    def dimension(self) -> int:
        return self.points[-1].dim

    def names(self) -> list[str]:
        return [p.name() for p in self.points]

    def format(self) -> str:
        return "(" + ", ".join(_point_label(p) for p in self.points) + ")"

    def key(self) -> tuple:
        return tuple(_point_key(p) for p in self.points)


def _point_label(p: SchemePoint) -> str:
    if isinstance(p.ident, Place):
        return p.ident.name()
    if isinstance(p.ident, LocalPrime):
        return str(p.ident)
    return str(p.ident)


def _point_key(p: SchemePoint) -> tuple:
    k = p.ident.key() if hasattr(p.ident, "key") else (str(p.ident),)
    return (p.dim, k)


def is_chain(model, pts) -> bool:
    if not pts:
        return False
    return all(model.contains(pts[i], pts[i + 1]) and pts[i] != pts[i + 1] for i in range(len(pts) - 1))


def is_parshin(model, pts) -> bool:
    dm = model.min_dimension
    return is_chain(model, pts) and all(p.dim == i + dm for i, p in enumerate(pts))


def is_parshin_on_pair(model, pts, D) -> bool:
    if not is_parshin(model, pts):
        return False
    *head, last = pts
    return all(model.in_divisor(p, D) for p in head) and not model.in_divisor(last, D)


def is_q_chain(model, pts, D) -> bool:
    """``(p_0, ..., p_{s-2}, p_s)`` with the index s-1 skipped, ``1 <= s <= d``."""
    if not is_chain(model, pts):
        return False
    s = len(pts)
    dm = model.min_dimension
    if not 1 <= s <= model.dimension:
        return False
    head, last = pts[:-1], pts[-1]
    if any(p.dim != i + dm for i, p in enumerate(head)) or last.dim != s + dm:
        return False
    return all(model.in_divisor(p, D) for p in head) and not model.in_divisor(last, D)


def is_qo_chain(model, pts, D) -> bool:
    return is_q_chain(model, pts, D) and len(pts) >= 2


def classify_chain(model, pts, D) -> list[str]:
    """Every kind the chain satisfies, in the order of :data:`KINDS`."""
    out = []
    if is_chain(model, pts):
        out.append("Chain")
    if is_parshin(model, pts):
        out.append("Parshin")
    if is_parshin_on_pair(model, pts, D):
        out.append("ParshinOnPair")
    if is_q_chain(model, pts, D):
        out.append("QChain")
    if is_qo_chain(model, pts, D):
        out.append("QoChain")
    return out


def all_chains(model: PosetModel) -> list[tuple]:
    """Every chain of a finite poset (strictly increasing closures)."""
    pts = model.points()
    out = []
    for size in range(1, len(pts) + 1):
        for combo in combinations(pts, size):
            ordered = sorted(combo, key=lambda p: p.dim)
            if is_chain(model, tuple(ordered)):
                out.append(tuple(ordered))
    return out


def enumerate_chain_types(model, D: DivisorData) -> list[ChainRecord]:
    """Templates for the Parshin chains on the pair and the Q-chains.

    Closed points of U form a family template (``x in U``); every chain
    through a component of D is listed explicitly.  Parshin templates come
    first, then Q-chains, each block in the canonical point order.
    """
    model.check_divisor(D)
    out: list[ChainRecord] = []
    if isinstance(model, CurveModel):
        out.append(ChainRecord(model, (model.point(U_FAMILY),), "ParshinOnPair", True))
        for v in D.support:
            out.append(ChainRecord(model, (model.point(v), model.generic), "ParshinOnPair"))
        out.append(ChainRecord(model, (model.generic,), "QChain"))
        return out
    if isinstance(model, LocalSurfaceModel):
        m, eta = model.closed, model.generic
        if D.is_empty():
            out.append(ChainRecord(model, (m,), "ParshinOnPair"))
        else:
            for p in D.support:
                out.append(ChainRecord(model, (m, model.point(p), eta), "ParshinOnPair"))
            out.append(ChainRecord(model, (m, model.point(U_FAMILY)), "ParshinOnPair", True))
        out.append(ChainRecord(model, (model.point(U_FAMILY),), "QChain", True))
        if not D.is_empty():
            out.append(ChainRecord(model, (m, eta), "QoChain"))
        return out
    raise UnsupportedPrime("chain templates are available for P^1 and F_q[[s,t]]")


def instantiate(template: ChainRecord, point) -> ChainRecord:
    """Replace the family slot of a template by a concrete point."""
    model = template.model
    x = model.point(point)
    pts = tuple(x if p.ident == U_FAMILY else p for p in template.points)
    return ChainRecord(model, pts, template.kind)


def check_record(rec: ChainRecord, D) -> bool:
    """Re-check a concrete record against the predicate for its kind."""
    return rec.kind in classify_chain(rec.model, rec.points, D)


# ---------------------------------------------------------------------------
# residue rings and multiplicities


def residue_ring_at(chain: ChainRecord, precision: int = DEFAULT_PRECISION):
    """The field k(P) for a concrete supported chain."""
    model = chain.model
    pts = chain.points
    if chain.family or any(p.ident == U_FAMILY for p in pts):
        raise ValueError("instantiate the family template first")
    if isinstance(model, CurveModel):
        if len(pts) == 1 and pts[0].ident == GENERIC:
            raise AnalyticSplittingUnsupported("k(eta) = F_q(t) is global; no tower object")
        v = pts[0].ident
        if len(pts) == 1:
            return v.residue_field
        return v.local_field(precision)
    if isinstance(model, LocalSurfaceModel):
        F = model.field
        primes = [p.ident for p in pts if isinstance(p.ident, LocalPrime)]
        for p in primes:
            if not p.supported:
                raise AnalyticSplittingUnsupported(
                    f"k(P) at {p} may split into several fields; only curated primes are handled"
                )
        if pts == (model.closed,):
            return F
        if len(pts) == 2 and pts[0] == model.closed and primes:
            return LaurentField(F, primes[0].residue_var(), precision)
        if len(pts) == 3 and primes:
            p = primes[0]
            if p.kind in ("s", "t"):
                return TwoLocalField(F, outer=p.kind, precision=precision)
            raise UnsupportedPrime(f"no exact two-dimensional tower along {p}")
        if len(pts) == 1 and primes:
            return LaurentField(F, primes[0].residue_var(), precision)
        if pts == (model.closed, model.generic):
            raise AnalyticSplittingUnsupported("k(m, eta) = Frac F_q[[s,t]] has no tower object")
    raise UnsupportedPrime(f"unsupported chain {chain.format()}")


def multiplicity_D(chain: ChainRecord, D: DivisorData) -> int:
    """Multiplicity in D of the divisor through the penultimate point of a maximal chain."""
    model = chain.model
    pts = chain.points
    if not is_parshin_on_pair(model, pts, D):
        raise NotMaximalChain(f"{chain.format()} is not a Parshin chain on the pair")
    if len(pts) != model.dimension - model.min_dimension + 1:
        raise NotMaximalChain(f"{chain.format()} does not reach the generic point")
    return D.multiplicity(pts[-2].ident)


def closed_points_of_degree(model: CurveModel, d: int):
    from .curve import places_of_degree

    return places_of_degree(model.field, d)


__all__ = [
    "LocalPrime",
    "classify_prime",
    "parse_local_prime",
    "curated_primes",
    "DivisorData",
    "parse_curve_divisor",
    "parse_surface_divisor",
    "divisor_from_json",
    "SchemePoint",
    "CurveModel",
    "LocalSurfaceModel",
    "PosetModel",
    "dimension_axiom_holds",
    "ChainRecord",
    "is_chain",
    "is_parshin",
    "is_parshin_on_pair",
    "is_q_chain",
    "is_qo_chain",
    "classify_chain",
    "all_chains",
    "enumerate_chain_types",
    "instantiate",
    "check_record",
    "residue_ring_at",
    "multiplicity_D",
]
