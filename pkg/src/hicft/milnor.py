"""Milnor K-symbols over finite fields and (iterated) Laurent fields.

Fields are handled through a small duck-typed interface shared by
:class:`~hicft.gf.GF`, :class:`~hicft.laurent.LaurentField` and
:class:`~hicft.bilaurent.TwoLocalField`: ``mul``, ``inv``, ``neg``,
``one_minus``, ``minus_one``, ``key``, ``is_one``, ``format`` and, for the
discretely valued ones, ``residue_field``, ``valuation``, ``lead`` (the
residue class of ``x / pi^v(x)``), ``uniformizer`` and ``lift``.

Residue convention: ``d{pi, u} = u mod m``.  On degree two this is
``d{f, g} = (-1)^{v(f) v(g)} g^{v(f)} / f^{v(g)}`` reduced to the residue field.

For n prime to the characteristic every element of ``K_r(K)/n`` has
coordinates obtained by recursion down the tower

    x  ->  ( coords_k( d({-pi} x) ),  coords_k( d x ) )

ending at a finite field, where ``K_0 = Z``, ``K_1 = F_q^x`` (discrete log)
and ``K_r = 0`` for ``r >= 2``.  :func:`steinberg_normalize` maps a symbol
sum to the canonical combination of the tower's generators with those
coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from math import gcd

from .abgroup import PresentedGroup, subgroup_generated
from .bilaurent import TwoLocalField
from .errors import (
    HicftError,
    UnsupportedField,
    WildCoefficients,
    ZeroElement,
)
from .gf import GF
from .laurent import LaurentField

CLOSURE_MAX_Q = 9
CLOSURE_MAX_R = 3


# ---------------------------------------------------------------------------
# symbols


def _check_field(K):
    if not isinstance(K, (GF, LaurentField, TwoLocalField)):
        raise UnsupportedField(f"unsupported field {K!r}")


def _is_one(K, x) -> bool:
    return K.is_one(x)


@dataclass(frozen=True)
class MilnorSymbol:
    field: object
    entries: tuple

    def __post_init__(self):
        for e in self.entries:
            if not self.field.is_nonzero(e):
                raise ZeroElement("symbol entries must be nonzero")

    @property
    def degree(self) -> int:
        return len(self.entries)

    def format(self) -> str:
        return "{" + ", ".join(self.field.format(e) for e in self.entries) + "}"


class SymbolSum:
    """A finite formal Z-combination of symbols of one degree over one field.

    Terms whose symbol has an entry equal to 1 are dropped (they vanish by
    multilinearity), and equal symbols are merged.
    """

    __slots__ = ("field", "degree", "terms")

    def __init__(self, field, degree: int, terms=()):
        acc: dict = {}
        for entries, c in terms:
            entries = tuple(entries)
            if len(entries) != degree:
                raise ValueError("inhomogeneous symbol sum")
            if c == 0 or any(_is_one(field, e) for e in entries):
                continue
            k = tuple(field.key(e) for e in entries)
            if k in acc:
                acc[k] = (acc[k][0], acc[k][1] + c)
            else:
                acc[k] = (entries, c)
        self.field = field
        self.degree = degree
        self.terms = tuple(
            (acc[k][0], acc[k][1]) for k in sorted(acc) if acc[k][1] != 0
        )

    @classmethod
    def symbol(cls, field, *entries, coeff: int = 1) -> SymbolSum:
        MilnorSymbol(field, tuple(entries))
        return cls(field, len(entries), [(entries, coeff)])

    @classmethod
    def zero(cls, field, degree: int) -> SymbolSum:
        return cls(field, degree)

    def _same(self, other: SymbolSum):
        if other.degree != self.degree or other.field != self.field:
            raise ValueError("symbol sums of different degree or field")

    def __add__(self, other: SymbolSum) -> SymbolSum:
        self._same(other)
        return SymbolSum(self.field, self.degree, self.terms + other.terms)

    def __neg__(self) -> SymbolSum:
        return SymbolSum(self.field, self.degree, [(e, -c) for e, c in self.terms])

    def __sub__(self, other: SymbolSum) -> SymbolSum:
        return self + (-other)

    def scale(self, k: int) -> SymbolSum:
        return SymbolSum(self.field, self.degree, [(e, k * c) for e, c in self.terms])

    def __rmul__(self, k: int) -> SymbolSum:
        return self.scale(k)

    def cup(self, other: SymbolSum) -> SymbolSum:
        """Product in the Milnor K-ring: concatenate entries."""
        if other.field != self.field:
            raise ValueError("symbols over different fields")
        terms = [(e + f, c * d) for e, c in self.terms for f, d in other.terms]
        return SymbolSum(self.field, self.degree + other.degree, terms)

    def prepend(self, x) -> SymbolSum:
        return SymbolSum.symbol(self.field, x).cup(self)

    def is_formally_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, SymbolSum)
            and self.field == other.field
            and self.degree == other.degree
            and self.key() == other.key()
        )

    def __hash__(self):
        return hash((self.degree, self.key()))

    def key(self) -> tuple:
        return tuple((tuple(self.field.key(e) for e in es), c) for es, c in self.terms)

    def format(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for es, c in self.terms:
            sym = "{" + ", ".join(self.field.format(e) for e in es) + "}"
            parts.append(sym if c == 1 else f"{c}*{sym}")
        return " + ".join(parts)

    def __repr__(self):
        return f"SymbolSum({self.format()})"

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "terms": [
                {"coeff": c, "entries": [self.field.format(e) for e in es]} for es, c in self.terms
            ],
        }


def symbol(field, *entries) -> SymbolSum:
    return SymbolSum.symbol(field, *entries)


# ---------------------------------------------------------------------------
# residue symbol


def _require_valued(K):
    _check_field(K)
    if K.is_finite:
        raise UnsupportedField("a finite field carries no discrete valuation")


def residue_symbol(x: SymbolSum) -> SymbolSum:
    """The tame symbol ``K_r(K) -> K_{r-1}(k)``, expanded multilinearly.

    Each entry is split as ``pi^v * u``.  A term with the uniformizer in the
    single slot ``i`` contributes ``(-1)^(i-1) v_i {u_rest}``; terms with the
    uniformizer in ``k >= 2`` slots reduce through ``{pi, pi} = {pi, -1}`` to
    ``prod(v) {-1, ..., -1, u_rest}`` (a 2-torsion class, so its sign is moot).
    """
    K = x.field
    _require_valued(K)
    k = K.residue_field
    r = x.degree
    if r == 0:
        return SymbolSum.zero(k, 0)
    out = []
    for entries, c in x.terms:
        vals = [K.valuation(e) for e in entries]
        units = [K.lead(e) for e in entries]
        for size in range(1, r + 1):
            for S in combinations(range(r), size):
                w = 1
                for i in S:
                    w *= vals[i]
                if w == 0:
                    continue
                rest = [units[j] for j in range(r) if j not in S]
                if size == 1:
                    sign = -1 if S[0] % 2 else 1
                    out.append((tuple(rest), c * sign * w))
                else:
                    out.append((tuple([k.minus_one] * (size - 1) + rest), c * w))
    return SymbolSum(k, r - 1, out)


def tame_symbol(K, f, g):
    """Degree-two residue by the closed formula ``(-1)^{ab} g^a / f^b``, ``a = v(f)``, ``b = v(g)``."""
    _require_valued(K)
    a, b = K.valuation(f), K.valuation(g)
    z = K.mul(_power(K, g, a), _power(K, K.inv(f), b))
    if (a * b) % 2:
        z = K.neg(z)
    if K.valuation(z) != 0:
        raise HicftError("tame symbol formula produced a non-unit")
    return K.lead(z)


def _power(K, x, e: int):
    if e < 0:
        x, e = K.inv(x), -e
    out = K.one()
    base = x
    while e:
        if e & 1:
            out = K.mul(out, base)
        base = K.mul(base, base)
        e >>= 1
    return out


def product_of(x: SymbolSum):
    """For a degree-one sum ``sum c_i {a_i}``, the field element ``prod a_i^c_i``."""
    if x.degree != 1:
        raise ValueError("only degree-one sums are products")
    K = x.field
    out = K.one() if not K.is_finite else 1
    for (a,), c in x.terms:
        out = K.mul(out, K.pow(a, c) if K.is_finite else _power(K, a, c))
    return out


def specialization(x: SymbolSum) -> SymbolSum:
    """``s(x) = d({-pi} x)``: the residue-field part of the tame splitting."""
    K = x.field
    _require_valued(K)
    return residue_symbol(x.prepend(K.neg(K.uniformizer())))


# ---------------------------------------------------------------------------
# tame-split coordinates


def _field_order(K) -> int:
    F = K
    while not F.is_finite:
        F = F.residue_field
    return F.order


def _base_field(K) -> GF:
    F = K
    while not F.is_finite:
        F = F.residue_field
    return F


def _check_tame(K, n: int):
    if n < 1:
        raise ValueError("modulus must be positive")
    if not K.is_finite and n % _base_field(K).p == 0:
        raise WildCoefficients(f"n = {n} is divisible by the residue characteristic")


def _raw_moduli(K, r: int, n: int) -> list[int]:
    if r < 0:
        return []
    if K.is_finite:
        if r == 0:
            return [n]
        if r == 1:
            return [gcd(n, K.order - 1)]
        return []
    k = K.residue_field
    return _raw_moduli(k, r, n) + _raw_moduli(k, r - 1, n)


def moduli(K, r: int, n: int) -> list[int]:
    """Orders of the cyclic summands of ``K_r(K)/n`` in generator order."""
    _check_field(K)
    _check_tame(K, n)
    return [m for m in _raw_moduli(K, r, n) if m > 1]


def _raw_coords(x: SymbolSum, n: int) -> list[int]:
    K = x.field
    r = x.degree
    if r < 0:
        return []
    if K.is_finite:
        if r == 0:
            return [sum(c for _, c in x.terms) % n]
        if r == 1:
            m = gcd(n, K.order - 1)
            return [sum(c * K.dlog(a) for (a,), c in x.terms) % m]
        return []
    tail = _raw_coords(residue_symbol(x), n) if r >= 1 else []
    return _raw_coords(specialization(x), n) + tail


def coordinates(x: SymbolSum, n: int) -> tuple[int, ...]:
    """Coordinates of x in ``K_r(K)/n`` with respect to :func:`generators`."""
    K = x.field
    _check_field(K)
    _check_tame(K, n)
    raw = _raw_coords(x, n)
    mods = _raw_moduli(K, x.degree, n)
    return tuple(c % m for c, m in zip(raw, mods) if m > 1)


def _lift_symbol(K, s: SymbolSum) -> SymbolSum:
    return SymbolSum(K, s.degree, [(tuple(K.lift(e) for e in es), c) for es, c in s.terms])


def _raw_generators(K, r: int, n: int) -> list[SymbolSum]:
    if r < 0:
        return []
    if K.is_finite:
        if r == 0:
            return [SymbolSum(K, 0, [((), 1)])]
        if r == 1:
            return [SymbolSum.symbol(K, K.generator)]
        return []
    k = K.residue_field
    pi = SymbolSum.symbol(K, K.uniformizer())
    lifted = [_lift_symbol(K, g) for g in _raw_generators(k, r, n)]
    with_pi = [pi.cup(_lift_symbol(K, g)) for g in _raw_generators(k, r - 1, n)]
    return lifted + with_pi


def generators(K, r: int, n: int) -> list[SymbolSum]:
    """Explicit symbols generating ``K_r(K)/n``, one per cyclic summand."""
    _check_field(K)
    _check_tame(K, n)
    gens = _raw_generators(K, r, n)
    mods = _raw_moduli(K, r, n)
    return [g for g, m in zip(gens, mods) if m > 1]


def steinberg_normalize(x: SymbolSum, n: int) -> SymbolSum:
    """Canonical representative of x modulo Steinberg relations, multilinearity and n.

    The representative is ``sum c_i g_i`` over :func:`generators` with
    ``0 <= c_i < m_i``; two sums are equal in ``K_r/n`` exactly when their
    normal forms coincide.
    """
    K = x.field
    coords = coordinates(x, n)
    gens = generators(K, x.degree, n)
    out = SymbolSum.zero(K, x.degree)
    for c, g in zip(coords, gens):
        if c:
            out = out + g.scale(c)
    return out


def is_zero_mod(x: SymbolSum, n: int) -> bool:
    return not any(coordinates(x, n))


# ---------------------------------------------------------------------------
# brute-force closure over finite fields


def closure_group(F: GF, r: int, n: int) -> PresentedGroup:
    """``K_r(F)/n`` straight from the definition.

    One generator per r-tuple of nonzero elements; relations are
    multiplicativity in every slot (all pairs), the Steinberg relation in
    every pair of adjacent slots, and n times each generator.
    """
    if not isinstance(F, GF):
        raise UnsupportedField("closure is only available over finite fields")
    if F.order > CLOSURE_MAX_Q or r > CLOSURE_MAX_R:
        raise UnsupportedField("closure is limited to q <= 9 and degree <= 3")
    units = list(F.units())
    tuples = list(product(units, repeat=r))
    index = {t: i for i, t in enumerate(tuples)}
    rels: list[dict] = []

    def rel(pairs):
        col: dict = {}
        for t, c in pairs:
            i = index[t]
            col[i] = col.get(i, 0) + c
        col = {i: c for i, c in col.items() if c}
        if col:
            rels.append(col)

    for slot in range(r):
        for t in tuples:
            a = t[slot]
            for b in units:
                if b < a:
                    continue
                ab = t[:slot] + (F.mul(a, b),) + t[slot + 1 :]
                tb = t[:slot] + (b,) + t[slot + 1 :]
                rel([(ab, 1), (t, -1), (tb, -1)])
    for slot in range(r - 1):
        for t in tuples:
            a, b = t[slot], t[slot + 1]
            if a != 1 and b == F.sub(1, a):
                rel([(t, 1)])
    labels = ["{" + ", ".join(F.format(e) for e in t) + "}" for t in tuples]
    return PresentedGroup(len(tuples), rels, n, labels)


def closure_vector(F: GF, x: SymbolSum) -> dict:
    """Coordinates of a symbol sum on the closure group's generators."""
    units = list(F.units())
    pos = {t: i for i, t in enumerate(product(units, repeat=x.degree))}
    col: dict = {}
    for es, c in x.terms:
        i = pos[tuple(es)]
        col[i] = col.get(i, 0) + c
    return col


def structural_finite(F: GF, r: int, n: int) -> list[int]:
    return [m for m in _raw_moduli(F, r, n) if m > 1]


# ---------------------------------------------------------------------------
# K-groups mod n


def km_method(K, r: int) -> str:
    if isinstance(K, GF):
        if K.order <= CLOSURE_MAX_Q and r <= CLOSURE_MAX_R:
            return "closure"
        return "structural"
    return "tame-split"


def km_mod_n(K, r: int, n: int) -> PresentedGroup:
    """A finite presentation of ``K^M_r(K)/n``.

    Finite fields with q <= 9 and r <= 3 are computed by closure and checked
    against the structural answer; larger finite fields use the structural
    answer directly.  Local fields use the tame splitting, labelled by the
    generating symbols.
    """
    _check_field(K)
    if r < 0:
        raise ValueError("degree must be non-negative")
    if isinstance(K, GF):
        expected = PresentedGroup.diagonal(structural_finite(K, r, n), n)
        if km_method(K, r) == "closure":
            G = closure_group(K, r, n)
            if G.invariant_factors() != expected.invariant_factors():
                raise HicftError(
                    f"closure and structural answers disagree for q={K.order}, r={r}, n={n}"
                )
            return G
        return expected
    mods = moduli(K, r, n)
    labels = [g.format() for g in generators(K, r, n)]
    return PresentedGroup.diagonal(mods, n, labels)


# ---------------------------------------------------------------------------
# unit filtration


def principal_units(K, i: int) -> list:
    """A finite family in ``1 + m^i`` spanning it modulo ``1 + m^(i+1)`` and n-th powers."""
    if i < 1:
        raise ValueError("level must be at least 1")
    pi = K.uniformizer()
    pii = _power(K, pi, i)
    k = K.residue_field
    if k.is_finite:
        coeffs = [K.lift(c) for c in k.units()]
    else:
        coeffs = [K.lift(e) for e in _residue_unit_samples(k)]
    out = []
    for c in coeffs:
        try:
            out.append(K.one_minus(K.neg(K.mul(c, pii))))
        except HicftError:
            continue
    return out


def _residue_unit_samples(k) -> list:
    """Units of a Laurent residue field that lift exactly: constants times small powers."""
    F = _base_field(k)
    return [k.monomial(v, c) for c in F.units() for v in (-1, 0, 1)]


def unit_filtration(K, r: int, i: int, n: int) -> PresentedGroup:
    """Image of ``U^i K_r(K)`` (generated by ``{1 + m^i, K^x, ..., K^x}``) in ``K_r(K)/n``.

    Level 0 is the whole group.  For higher levels the image is spanned by
    symbols whose first entry is a principal unit; their tame-split
    coordinates are computed and the span is presented as a subgroup.
    """
    _require_valued(K)
    if i < 0:
        raise ValueError("filtration level must be non-negative")
    if i == 0:
        return km_mod_n(K, r, n)
    _check_tame(K, n)
    if r == 0:
        return PresentedGroup.trivial()
    units = principal_units(K, i)
    tails = _unit_group_generators(K)
    vecs = []
    for u in units:
        for rest in product(tails, repeat=r - 1):
            s = SymbolSum.symbol(K, u, *rest)
            vecs.append(list(coordinates(s, n)))
    return subgroup_generated(moduli(K, r, n), vecs)


def _unit_group_generators(K) -> list:
    """Elements generating ``K^x`` modulo principal units."""
    if K.is_finite:
        return [K.generator]
    k = K.residue_field
    return [K.uniformizer()] + [K.lift(e) for e in _unit_group_generators(k)]


def field_from_spec(spec: str, q: int, precision: int = 32):
    """``"fq"``, ``"laurent"`` or ``"2local"`` to a field object over ``F_q``."""
    from .gf import fq

    F = fq(q)
    if spec in ("fq", "finite"):
        return F
    if spec in ("laurent", "local"):
        return LaurentField(F, "t", precision)
    if spec in ("2local", "two-local", "bilaurent"):
        return TwoLocalField(F, "t", precision)
    raise UnsupportedField(f"unknown field kind {spec!r}")


__all__ = [
    "MilnorSymbol",
    "SymbolSum",
    "symbol",
    "residue_symbol",
    "tame_symbol",
    "specialization",
    "product_of",
    "coordinates",
    "moduli",
    "generators",
    "steinberg_normalize",
    "is_zero_mod",
    "closure_group",
    "closure_vector",
    "km_mod_n",
    "km_method",
    "unit_filtration",
    "principal_units",
    "field_from_spec",
]
