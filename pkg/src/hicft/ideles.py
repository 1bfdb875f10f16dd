"""Idele groups and idele class groups mod n, with their oracles.

For ``P^1/F_q`` the class group of a modulus D is presented as

* one generator per closed point x of U with ``deg x <= B`` (the summand
  ``K_0(k(x)) = Z``),
* the generators of ``K_1(k_v((z)))/n`` at each place v of D, modulo the
  image of ``U^{D(v)}``,

with relations the images of ``F_q^x`` and of every monic irreducible of
degree at most B (plus the polynomials of the places of D).  Each relation
is a ``q_map_image``: the natural map at chains through D, the residue
symbol (the valuation) at the closed points of U.

For ``F_q[[s,t]]`` the punctured class group ``C(X', D')`` is presented the
same way: ``K_2`` of the two-dimensional local field at ``(p, eta)`` for
``p`` in D, ``K_1(kappa(p))`` at the curated primes of U, and relations from
symbols ``{f, g}`` with f, g in ``{gamma, s, t}`` plus the curated primes.

The truncation at B is certified by recomputing at a neighbouring bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

from .abgroup import GroupMap, InvariantFactors, PresentedGroup
from .bilaurent import BiLaurentElement, TwoLocalField, bp_slice, bipoly
from .chains import (
    ChainRecord,
    CurveModel,
    DivisorData,
    LocalPrime,
    LocalSurfaceModel,
    curated_primes,
    enumerate_chain_types,
    instantiate,
)
from .curve import Place, RationalFunction, infinity, places_up_to
from .errors import (
    NotStabilized,
    UnsupportedElementForm,
    UnsupportedPrime,
    WildCoefficients,
    ZeroElement,
)
from .gf import GF, fq, irreducibles, poly_mod, poly_mul, trim
from .laurent import LaurentField
from .milnor import (
    SymbolSum,
    coordinates,
    generators,
    moduli,
    principal_units,
    residue_symbol,
)

DEFAULT_BOUND = 2
DEFAULT_PRECISION = 16


# ---------------------------------------------------------------------------
# data types


@dataclass
class IdeleElement:
    """A finitely supported idele: chain -> symbol sum of degree d(P)."""

    support: dict = field(default_factory=dict)

    def add(self, chain: ChainRecord, x: SymbolSum):
        if x.is_formally_zero():
            return
        if chain in self.support:
            x = self.support[chain] + x
        if x.is_formally_zero():
            self.support.pop(chain, None)
        else:
            self.support[chain] = x

    def is_zero(self) -> bool:
        return not self.support

    def items(self):
        return sorted(self.support.items(), key=lambda kv: kv[0].key())

    def to_json(self) -> list:
        return [{"chain": c.format(), "component": x.format()} for c, x in self.items()]


@dataclass(frozen=True)
class ClassGroupJob:
    model: object
    D: DivisorData
    n: int
    degree_bound: int = DEFAULT_BOUND
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.degree_bound < 1:
            raise ValueError("the degree bound must be at least 1")
        if self.n % self.model.field.p == 0:
            raise WildCoefficients(f"n = {self.n} is not prime to p = {self.model.field.p}")


@dataclass(frozen=True)
class Certificate:
    bounds: tuple
    invariants: tuple

    @property
    def stable(self) -> bool:
        return len(set(self.invariants)) == 1

    def to_json(self) -> dict:
        return {
            "bounds": list(self.bounds),
            "invariant_factors": [list(f) for f in self.invariants],
            "stable": self.stable,
        }


@dataclass
class ClassGroupResult:
    group: PresentedGroup
    certificate: Certificate
    layout: object = field(repr=False)
    degree_bound: int = 0

    @property
    def invariants(self) -> InvariantFactors:
        return self.group.invariant_factors()

    def to_json(self) -> dict:
        return {
            "invariant_factors": list(self.invariants.factors),
            "certificate": self.certificate.to_json(),
            "generators": self.group.num_generators,
            "relations": self.group.num_relations,
            "degree_bound": self.degree_bound,
        }


# ---------------------------------------------------------------------------
# layouts: where each chain's coordinates live inside Z^g


class _Layout:
    def __init__(self, n: int):
        self.n = n
        self.slots: dict = {}  # chain -> (offset, field, degree, moduli)
        self.labels: list[str] = []
        self.orders: list[int] = []

    def add_slot(self, chain, K, degree: int, gens: list[str], mods: list[int]):
        self.slots[chain] = (len(self.labels), K, degree, mods)
        self.labels += gens
        self.orders += mods

    @property
    def size(self) -> int:
        return len(self.labels)

    def offset(self, chain) -> int:
        return self.slots[chain][0]

    def embed(self, chain, coords) -> dict:
        off = self.slots[chain][0]
        return {off + i: c for i, c in enumerate(coords) if c}

    def vector(self, idele: IdeleElement) -> dict:
        out: dict = {}
        for chain, x in idele.support.items():
            if chain not in self.slots:
                raise UnsupportedPrime(f"chain {chain.format()} lies outside the truncation")
            off, K, deg, mods = self.slots[chain]
            cs = [sum(c for _, c in x.terms)] if K is None else coordinates(x, self.n)
            for i, c in enumerate(cs):
                if c:
                    out[off + i] = out.get(off + i, 0) + c
        return {i: v for i, v in out.items() if v % self.n}

    def base_relations(self) -> list[dict]:
        return [{i: m} for i, m in enumerate(self.orders) if m and m != self.n]

    def presented(self, relations) -> PresentedGroup:
        rels = self.base_relations() + [r for r in relations if r]
        return PresentedGroup(self.size, rels, self.n, self.labels)


def _filtration_relations(layout: _Layout, chain, K, degree: int, level: int) -> list[dict]:
    """Coordinates of the generators of ``U^level K_degree(K)``; zero for tame n."""
    if level < 1:
        return []
    from itertools import product

    from .milnor import _unit_group_generators

    tails = _unit_group_generators(K)
    out = []
    for u in principal_units(K, level):
        for rest in product(tails, repeat=degree - 1):
            out.append(layout.embed(chain, coordinates(SymbolSum.symbol(K, u, *rest), layout.n)))
    return out


# ---------------------------------------------------------------------------
# P^1


def _curve_chains(model: CurveModel, D: DivisorData):
    templates = enumerate_chain_types(model, D)
    family = templates[0]
    d_chains = [t for t in templates if t.kind == "ParshinOnPair" and not t.family]
    return family, d_chains


def _as_function(F: GF, f) -> RationalFunction:
    if isinstance(f, RationalFunction):
        return f
    if isinstance(f, int):
        return RationalFunction.constant(F, f)
    if isinstance(f, str):
        from .curve import parse_function

        return parse_function(F, f)
    raise UnsupportedElementForm(f"cannot read {f!r} as an element of F_q(t)")


def q_map_image(f, model, D: DivisorData, precision: int = DEFAULT_PRECISION) -> IdeleElement:
    """Image of an element of the Q-chain K-group in the idele group.

    For P^1, f is a nonzero rational function (the Q-chain is ``(eta)``).
    For F_q[[s,t]], f is a pair of monomial-unit elements standing for
    ``{f[0], f[1]}`` at the Q-chain ``(m, eta)``.
    """
    if isinstance(model, CurveModel):
        return _curve_q_image(_as_function(model.field, f), model, D, precision)
    if isinstance(model, LocalSurfaceModel):
        a, b = f
        return _surface_q_image(a, b, model, D, precision)
    raise UnsupportedElementForm("q_map_image needs a P^1 or F_q[[s,t]] model")


def _curve_q_image(f: RationalFunction, model: CurveModel, D, precision) -> IdeleElement:
    family, d_chains = _curve_chains(model, D)
    out = IdeleElement()
    for chain in d_chains:
        v = chain.points[0].ident
        K = v.local_field(precision)
        out.add(chain, SymbolSum.symbol(K, f.expand_at(v, precision)))
    for place, e in f.divisor().items():
        if place in D.support:
            continue
        chain = instantiate(family, place)
        out.add(chain, SymbolSum(place.residue_field, 0, [((), e)]))
    return out


@lru_cache(maxsize=None)
def _local_coords(place: Place, n: int, order: int, lead: int) -> tuple:
    K = place.local_field(4)
    return coordinates(SymbolSum.symbol(K, K.monomial(order, lead)), n)


class _CurveSetup:
    def __init__(self, model: CurveModel, D: DivisorData, n: int, B: int):
        F = model.field
        self.model, self.D, self.n, self.B = model, D, n, B
        self.family, self.d_chains = _curve_chains(model, D)
        lay = _Layout(n)
        self.u_places = [x for x in places_up_to(F, B) if x not in D.support]
        for x in self.u_places:
            lay.add_slot(instantiate(self.family, x), None, 0, [str(x)], [n])
        self.d_places = []
        for chain in self.d_chains:
            v = chain.points[0].ident
            K = v.local_field(4)
            gens = generators(K, 1, n)
            lay.add_slot(chain, K, 1, [f"{g.format()}@{v}" for g in gens], moduli(K, 1, n))
            self.d_places.append(v)
        self.layout = lay

    def chain_of(self, x: Place):
        return instantiate(self.family, x)

    def relation(self, f: RationalFunction) -> dict:
        """``q_map_image(f)`` in coordinates, from exact orders and leading terms."""
        lay = self.layout
        out: dict = {}
        for chain, v in zip(self.d_chains, self.d_places):
            cs = _local_coords(v, self.n, f.order_at(v), f.lead_at(v))
            for i, c in lay.embed(chain, cs).items():
                out[i] = out.get(i, 0) + c
        for place, e in f.divisor().items():
            if place in self.D.support:
                continue
            chain = self.chain_of(place)
            if chain not in lay.slots:
                raise UnsupportedPrime(f"{place} has degree above the bound {self.B}")
            i = lay.offset(chain)
            out[i] = out.get(i, 0) + e
        return {i: v for i, v in out.items() if v % self.n}

    def relation_functions(self) -> list[RationalFunction]:
        F = self.model.field
        fs = [RationalFunction.constant(F, F.generator)]
        polys = {P for d in range(1, self.B + 1) for P in irreducibles(F, d)}
        polys |= {v.poly for v in self.d_places if not v.is_infinite}
        for P in sorted(polys, key=lambda P: (len(P), P)):
            fs.append(RationalFunction.make(F, P))
        return fs

    def group(self) -> PresentedGroup:
        rels = [self.relation(f) for f in self.relation_functions()]
        for chain, v in zip(self.d_chains, self.d_places):
            K = v.local_field(8)
            rels += _filtration_relations(self.layout, chain, K, 1, self.D.multiplicity(v))
        return self.layout.presented(rels)


# ---------------------------------------------------------------------------
# F_q[[s,t]]


def _monomial_rep(F: GF, poly, outer: str) -> tuple[int, int, int]:
    """``(a, b, c)`` with ``poly = c s^a t^b`` times a principal unit of the tower."""
    d = dict(poly)
    if not d:
        raise ZeroElement("zero polynomial")
    oi = 1 if outer == "t" else 0
    vo = min(k[oi] for k in d)
    inner = bp_slice(poly, outer, vo)
    vi = min(i for i, c in enumerate(inner) if c)
    c = inner[vi]
    return (vi, vo, c) if outer == "t" else (vo, vi, c)


def _restrict(F: GF, poly, prime: LocalPrime) -> tuple[int, int]:
    """``(valuation, leading coefficient)`` of ``poly(s(x), t(x))`` along the prime."""
    S, T = prime.parametrization()
    spow, tpow = [(1,)], [(1,)]
    acc: dict = {}
    for (i, j), c in poly:
        while len(spow) <= i:
            spow.append(trim(poly_mul(F, spow[-1], S)))
        while len(tpow) <= j:
            tpow.append(trim(poly_mul(F, tpow[-1], T)))
        for k, a in enumerate(poly_mul(F, spow[i], tpow[j])):
            if a:
                acc[k] = F.add(acc.get(k, 0), F.mul(c, a))
    nz = sorted(k for k, a in acc.items() if a)
    if not nz:
        raise ZeroElement(f"{poly} vanishes along {prime}")
    return nz[0], acc[nz[0]]


def _surface_fields(F: GF, precision: int):
    return {
        "s": TwoLocalField(F, outer="s", precision=precision),
        "t": TwoLocalField(F, outer="t", precision=precision),
    }


class _SurfaceSetup:
    """Presentation of ``C(X', D')/n`` truncated at curated primes of degree <= B."""

    def __init__(self, model: LocalSurfaceModel, D: DivisorData, n: int, B: int, precision: int):
        F = model.field
        model.check_divisor(D)
        for p in D.support:
            if p.kind not in ("s", "t"):
                raise UnsupportedPrime(f"class groups need D supported on (s) and (t), not {p}")
        self.model, self.D, self.n, self.B = model, D, n, B
        self.two = _surface_fields(F, precision)
        lay = _Layout(n)
        self.d_primes = list(D.support)
        self.d_chains = {}
        for p in self.d_primes:
            chain = ChainRecord(model, (model.point(p), model.generic), "ParshinOnPair")
            K = self.two[p.kind]
            gens = generators(K, 2, n)
            lay.add_slot(chain, K, 2, [f"{g.format()}@{p}" for g in gens], moduli(K, 2, n))
            self.d_chains[p] = chain
        self.u_primes = [p for p in curated_primes(F, B) if p not in D.support]
        self.u_chains = {}
        for p in self.u_primes:
            chain = ChainRecord(model, (model.point(p),), "ParshinOnPair")
            L = LaurentField(F, "x", 4)
            gens = generators(L, 1, n)
            lay.add_slot(chain, L, 1, [f"{g.format()}@{p}" for g in gens], moduli(L, 1, n))
            self.u_chains[p] = chain
        self.layout = lay
        self.elements = [("const", F.generator)] + [("prime", p) for p in curated_primes(F, B)]
        self._L = LaurentField(F, "x", 4)

    def _poly(self, e):
        F = self.model.field
        kind, val = e
        if kind == "const":
            return bipoly(F, [((0, 0), val)])
        return val.polynomial()

    def _d_coords(self, p: LocalPrime, f, g) -> tuple:
        F = self.model.field
        K = self.two[p.kind]
        reps = [_monomial_rep(F, self._poly(e), p.kind) for e in (f, g)]
        return _two_local_coords(K, self.n, tuple(reps))

    def _u_coords(self, p: LocalPrime, f, g) -> tuple:
        F = self.model.field
        fa = f == ("prime", p)
        ga = g == ("prime", p)
        if fa and ga:
            v, c = 0, F.minus_one
        elif fa:
            v, c = _restrict(F, self._poly(g), p)
        elif ga:
            v, c = _restrict(F, self._poly(f), p)
            v, c = -v, F.inv(c)
        else:
            return ()
        L = self._L
        return coordinates(SymbolSum.symbol(L, L.monomial(v, c)), self.n)

    def relation(self, f, g) -> dict:
        lay = self.layout
        out: dict = {}
        for p, chain in self.d_chains.items():
            for i, c in lay.embed(chain, self._d_coords(p, f, g)).items():
                out[i] = out.get(i, 0) + c
        for p in {e[1] for e in (f, g) if e[0] == "prime"}:
            if p in self.u_chains:
                for i, c in lay.embed(self.u_chains[p], self._u_coords(p, f, g)).items():
                    out[i] = out.get(i, 0) + c
        return {i: v for i, v in out.items() if v % self.n}

    def group(self) -> PresentedGroup:
        els = self.elements
        rels = []
        for a in range(len(els)):
            for b in range(a, len(els)):
                rels.append(self.relation(els[a], els[b]))
        for p, chain in self.d_chains.items():
            K = self.two[p.kind]
            rels += _filtration_relations(self.layout, chain, K, 2, self.D.multiplicity(p))
        return self.layout.presented(rels)


@lru_cache(maxsize=None)
def _two_local_coords(K: TwoLocalField, n: int, reps: tuple) -> tuple:
    xs = [K.monomial(a, b, c) for a, b, c in reps]
    return coordinates(SymbolSum.symbol(K, *xs), n)


def _surface_q_image(f, g, model: LocalSurfaceModel, D: DivisorData, precision) -> IdeleElement:
    F = model.field
    model.check_divisor(D)
    two = _surface_fields(F, precision)
    xs = []
    for e in (f, g):
        if isinstance(e, str):
            from .bilaurent import parse_bilaurent

            e = parse_bilaurent(F, e)
        if not isinstance(e, BiLaurentElement):
            raise UnsupportedElementForm("local surface symbols take monomial-unit entries")
        xs.append(e)
    out = IdeleElement()
    for p in D.support:
        if p.kind not in ("s", "t"):
            raise UnsupportedPrime(f"{p} is not (s) or (t)")
        chain = ChainRecord(model, (model.point(p), model.generic), "ParshinOnPair")
        K = two[p.kind]
        out.add(chain, SymbolSum.symbol(K, *xs))
    for kind in ("s", "t"):
        p = LocalPrime(F, kind)
        if p in D.support:
            continue
        K = two[kind]
        chain = ChainRecord(model, (model.point(p),), "ParshinOnPair")
        out.add(chain, residue_symbol(SymbolSum.symbol(K, *xs)))
    return out


# ---------------------------------------------------------------------------
# class groups with certificates


def _setup(model, D, n, B, precision):
    if isinstance(model, CurveModel):
        for v in D.support:
            if not isinstance(v, Place):
                raise UnsupportedPrime(f"{v} is not a place of P^1")
        return _CurveSetup(model, D, n, B)
    if isinstance(model, LocalSurfaceModel):
        return _SurfaceSetup(model, D, n, B, precision)
    raise UnsupportedPrime("class groups are computed for P^1 and F_q[[s,t]]")


def class_group(job: ClassGroupJob) -> ClassGroupResult:
    """``C(X, D)/n`` (``C(X', D')/n`` for F_q[[s,t]]) with a stabilization certificate.

    The certificate compares the invariants at ``B - 1`` and ``B`` (at 1 and
    2 when ``B = 1``).  A mismatch raises :class:`NotStabilized`.
    """
    B = job.degree_bound
    bounds = (B - 1, B) if B >= 2 else (B, B + 1)
    setups = {b: _setup(job.model, job.D, job.n, b, job.precision) for b in bounds}
    groups = {b: s.group() for b, s in setups.items()}
    invs = tuple(groups[b].invariant_factors().factors for b in bounds)
    cert = Certificate(bounds, invs)
    if not cert.stable:
        raise NotStabilized(
            f"invariants still change between B={bounds[0]} and B={bounds[1]}",
            **cert.to_json(),
        )
    return ClassGroupResult(groups[B], cert, setups[B].layout, B)


def class_group_at(model, D: DivisorData, n: int, B: int, precision: int = DEFAULT_PRECISION):
    """The truncated presentation at a single bound, with its layout (no certificate)."""
    s = _setup(model, D, n, B, precision)
    return s.group(), s


def transition_map(model: CurveModel, D_big: DivisorData, D_small: DivisorData, n: int, B: int) -> GroupMap:
    """The natural map ``C(X, D_big)/n -> C(X, D_small)/n`` for ``D_small <= D_big``."""
    if not D_small <= D_big:
        raise ValueError("the target modulus must be bounded by the source modulus")
    B = max([B] + [v.degree for v in D_big.support])
    src = _CurveSetup(model, D_big, n, B)
    dst = _CurveSetup(model, D_small, n, B)
    G, H = src.group(), dst.group()
    cols = [[0] * dst.layout.size for _ in range(src.layout.size)]
    for chain, (off, K, deg, mods) in src.layout.slots.items():
        if K is None:
            x = chain.points[0].ident
            cols[off][dst.layout.offset(dst.chain_of(x))] = 1
            continue
        v = chain.points[0].ident
        if v in D_small.support:
            d_chain = dst.d_chains[dst.d_places.index(v)]
            base = dst.layout.offset(d_chain)
            for i in range(len(mods)):
                cols[off + i][base + i] = 1
        else:
            # K_1(k_v((z))) -> Z by the valuation: only {pi} survives
            gens = generators(K, 1, n)
            target = dst.layout.offset(dst.chain_of(v))
            for i, g in enumerate(gens):
                cols[off + i][target] = sum(c for _, c in residue_symbol(g).terms)
    return GroupMap(G, H, cols)


def degree_map(result_or_setup) -> GroupMap:
    """``C(P^1, D)/n -> Z/n`` sending the class of 1 at x to ``deg x``."""
    if isinstance(result_or_setup, ClassGroupResult):
        lay = result_or_setup.layout
        G = result_or_setup.group
    else:
        lay = result_or_setup.layout
        G = result_or_setup.group()
    n = lay.n
    cols = [[0] for _ in range(lay.size)]
    for chain, (off, K, deg, mods) in lay.slots.items():
        x = chain.points[0].ident
        if K is None:
            cols[off][0] = x.degree
        else:
            for i, g in enumerate(generators(K, 1, n)):
                cols[off + i][0] = x.degree * sum(c for _, c in residue_symbol(g).terms)
    return GroupMap(G, PresentedGroup(1, [], n), cols)


def iota(result: ClassGroupResult, place: Place) -> dict:
    """The class of 1 in the ``Z``-summand at a closed point of U, as a sparse vector."""
    lay = result.layout
    for chain, (off, K, _, _) in lay.slots.items():
        if K is None and chain.points[0].ident == place:
            return {off: 1}
    raise UnsupportedPrime(f"{place} is not a closed point of U within the bound")


# ---------------------------------------------------------------------------
# ray class oracle for P^1


def oracle_bound(D: DivisorData) -> int:
    """Smallest bound at which every ray class key is realized by a monic polynomial."""
    deg_fin = sum(v.degree * m for v, m in D.components if not v.is_infinite)
    m_inf = sum(m for v, m in D.components if v.is_infinite)
    return deg_fin + max(m_inf - 1, 0) + 1


def _ray_presentation(F: GF, D: DivisorData, n: int, B: int) -> PresentedGroup:
    mult = dict(D.components)
    inf = infinity(F)
    m_inf = mult.get(inf, 0)
    M = (1,)
    for v, m in D.components:
        if not v.is_infinite:
            for _ in range(m):
                M = poly_mul(F, M, v.poly)
    excluded = {v.poly for v in D.support if not v.is_infinite}
    gens = [x for x in places_up_to(F, B) if x not in D.support]
    index = {x: i for i, x in enumerate(gens)}

    def res_mul(a, b):
        if len(M) == 1:
            return ()
        return tuple(poly_mod(F, poly_mul(F, a, b), M))

    def tail_mul(a, b):
        out = [0] * m_inf
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                if i + j < m_inf:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
        return tuple(out)

    primes = []
    for d in range(1, B + 1):
        for P in irreducibles(F, d):
            if P in excluded:
                continue
            res = tuple(poly_mod(F, P, M)) if len(M) > 1 else ()
            tail = tuple((tuple(reversed(P)) + (0,) * m_inf)[:m_inf])
            primes.append((P, d, res, tail))

    # every monic polynomial coprime to D_fin of degree <= B, as a product of primes
    one = ((), 0, (1,) if len(M) > 1 else (), tuple([1] + [0] * (m_inf - 1))[:m_inf])
    items = []

    def extend(start, fac, deg, res, tail):
        items.append((fac, deg, res, tail))
        for k in range(start, len(primes)):
            P, d, r, t = primes[k]
            if deg + d > B:
                break
            extend(k, fac + (P,), deg + d, res_mul(res, r) if len(M) > 1 else (), tail_mul(tail, t))

    primes.sort(key=lambda x: x[1])
    extend(0, one[0], 0, one[2], one[3])

    def canonical(res):
        if not res:
            return ()
        # orbit of the residue under F_q^x scaling
        return min(tuple(F.mul(c, a) for a in res) for c in F.units())

    classes: dict = {}
    for fac, deg, res, tail in items:
        if m_inf:
            key = (deg, res, tail)
        else:
            key = canonical(res)
        classes.setdefault(key, []).append((fac, deg))

    def div(fac, deg):
        v: dict = {}
        for P in fac:
            i = index[_place(F, P)]
            v[i] = v.get(i, 0) + 1
        if not m_inf:
            i = index[inf]
            v[i] = v.get(i, 0) - deg
        return v

    rels = []
    for key in sorted(classes, key=repr):
        members = classes[key]
        base = div(*members[0])
        for fac, deg in members[1:]:
            r = div(fac, deg)
            for i, c in base.items():
                r[i] = r.get(i, 0) - c
            rels.append({i: c for i, c in r.items() if c})
    return PresentedGroup(len(gens), rels, n, [str(x) for x in gens])


@lru_cache(maxsize=None)
def _place(F: GF, P) -> Place:
    return Place(F, P)


ORACLE_SEARCH = 3


def ray_class_oracle(q: int, D: DivisorData, n: int, degree_bound: int | None = None) -> ClassGroupResult:
    """Ray class group of ``P^1/F_q`` for the modulus D, tensored with ``Z/n``, by brute force.

    Divisors prime to D on places of degree at most B, modulo divisors of
    ``c A / A'`` with A, A' monic of degree at most B and ``c A / A' = 1 mod D``.

    With an explicit ``degree_bound`` the certificate compares B-1 with B.
    Without one, B starts at ``oracle_bound(D) + 1`` and grows (at most
    ``ORACLE_SEARCH`` steps) until two consecutive bounds agree; over F_2 the
    relations tying low-degree places together can first appear one degree
    later than the bound at which every residue class is realized.
    """
    F = fq(q)
    floor = max(2, max([v.degree for v in D.support], default=1))
    if degree_bound is not None:
        candidates = [max(degree_bound, floor)]
    else:
        start = max(oracle_bound(D) + 1, floor)
        candidates = list(range(start, start + ORACLE_SEARCH))
    groups: dict = {}

    def inv(b):
        if b not in groups:
            groups[b] = _ray_presentation(F, D, n, b)
        return groups[b].invariant_factors().factors

    for B in candidates:
        cert = Certificate((B - 1, B), (inv(B - 1), inv(B)))
        if cert.stable:
            return ClassGroupResult(groups[B], cert, None, B)
    raise NotStabilized(
        f"ray class invariants change between B={B - 1} and B={B}",
        **cert.to_json(),
    )


# ---------------------------------------------------------------------------
# reciprocity checks


def residue_at(F: GF, f: RationalFunction, g: RationalFunction, place: Place) -> int:
    """``d_v{f, g}`` in ``k(v)``, from exact orders and leading terms."""
    k = place.residue_field
    a, b = f.order_at(place), g.order_at(place)
    lf, lg = f.lead_at(place), g.lead_at(place)
    val = k.div(k.pow(lg, a % (k.order - 1)), k.pow(lf, b % (k.order - 1)))
    if (a * b) % 2:
        val = k.neg(val)
    return val


def weil_product(F: GF, f: RationalFunction, g: RationalFunction) -> int:
    """``prod_v Norm_{k(v)/F_q} d_v{f, g}`` over all places of P^1."""
    places = set(f.divisor()) | set(g.divisor())
    out = F.one
    for v in sorted(places):
        r = residue_at(F, f, g, v)
        k = v.residue_field
        out = F.mul(out, r if k is F else k.norm_to_base(r))
    return out


def weil_reciprocity_check(q: int, f, g) -> bool:
    F = fq(q)
    f, g = _as_function(F, f), _as_function(F, g)
    return F.is_one(weil_product(F, f, g))


def local_surface_residues(q: int, f, g, precision: int = DEFAULT_PRECISION) -> dict:
    """``{(s): v(d_(s){f,g}), (t): v(d_(t){f,g})}``: second residues of the two flags."""
    from .bilaurent import parse_bilaurent

    F = fq(q)
    xs = []
    for e in (f, g):
        if isinstance(e, str):
            e = parse_bilaurent(F, e)
        if not isinstance(e, BiLaurentElement):
            raise UnsupportedElementForm("expected a monomial-unit element s^a t^b U/V")
        xs.append(e)
    out = {}
    for kind in ("s", "t"):
        K = TwoLocalField(F, outer=kind, precision=precision)
        r = residue_symbol(SymbolSum.symbol(K, *xs))
        total = 0
        for (u,), c in r.terms:
            total += c * u.valuation
        out[f"({kind})"] = total
    return out


def local_surface_reciprocity_check(q: int, f, g, precision: int = DEFAULT_PRECISION) -> bool:
    return sum(local_surface_residues(q, f, g, precision).values()) == 0


def surface_character_oracle(K: TwoLocalField, n: int, x: SymbolSum) -> tuple:
    """Explicit characters of ``K_2(k((s))((t)))/n``, computed without the coordinate recursion.

    For ``x = {f, g}`` with towers ``f = t^a (u_f)``, ``g = t^b (u_g)``:
    ``chi_1 = v_s(d_t x)``, ``chi_2 = dlog(lead d_t x)``,
    ``chi_3 = d_s`` of the tame symbol of the inner leads twisted by the
    outer valuations.  Returns their values mod ``n``, ``gcd(n, q-1)`` and
    ``gcd(n, q-1)``.
    """
    F = K.coeff
    g = gcd(n, F.order - 1)
    total = [0, 0, 0]
    for entries, c in x.terms:
        if len(entries) != 2:
            raise ValueError("degree-two symbols only")
        f1, f2 = entries
        a, u1 = K.valuation(f1), K.lead(f1)
        b, u2 = K.valuation(f2), K.lead(f2)
        # d_t {f1, f2} = (-1)^{ab} u2^a / u1^b in k((s))
        vs = a * u2.valuation - b * u1.valuation
        lead = F.div(F.pow(u2.residue, a % (F.order - 1)), F.pow(u1.residue, b % (F.order - 1)))
        if (a * b) % 2:
            lead = F.neg(lead)
        # the symbol {u1, u2} of inner leads has d_s = (-1)^{..} r2^{a1}/r1^{b1}
        a1, b1 = u1.valuation, u2.valuation
        inner = F.div(F.pow(u2.residue, a1 % (F.order - 1)), F.pow(u1.residue, b1 % (F.order - 1)))
        if (a1 * b1) % 2:
            inner = F.neg(inner)
        total[0] += c * vs
        total[1] += c * F.dlog(lead)
        total[2] += c * F.dlog(inner)
    return (total[0] % n, total[1] % g, total[2] % g)


__all__ = [
    "IdeleElement",
    "ClassGroupJob",
    "Certificate",
    "ClassGroupResult",
    "q_map_image",
    "class_group",
    "class_group_at",
    "transition_map",
    "degree_map",
    "iota",
    "oracle_bound",
    "ray_class_oracle",
    "residue_at",
    "weil_product",
    "weil_reciprocity_check",
    "local_surface_residues",
    "local_surface_reciprocity_check",
    "surface_character_oracle",
]
