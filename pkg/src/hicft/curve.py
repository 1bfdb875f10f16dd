"""The projective line over F_q: places, rational functions, local data.

A finite place is a monic irreducible polynomial P; the place at infinity
has uniformizer ``1/t``.  The completion at P is ``k_P((pi))`` with
``k_P = F_q[t]/P`` and ``pi = P``; polynomials are expanded in it through
the Teichmueller section ``a -> lift(a)^(Q^k) mod P^N`` (``Q = |k_P|``), which
is a ring map in characteristic p.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

from .errors import DivisionByZero, ParseError, UnsupportedInput, ZeroElement
from .gf import (
    GF,
    factor,
    irreducibles,
    poly_deg,
    poly_divmod,
    poly_key,
    poly_mod,
    poly_monic,
    poly_mul,
    poly_powmod,
    poly_scale,
    poly_sub,
    poly_to_code,
    residue_field,
    trim,
)
from .laurent import DEFAULT_PRECISION, LaurentElement, LaurentField, _split_top

LOCAL_VAR = "z"


@dataclass(frozen=True)
class Place:
    """A place of ``P^1/F_q``: ``poly`` is a monic irreducible, or None for infinity."""

    field: GF
    poly: tuple | None

    @property
    def is_infinite(self) -> bool:
        return self.poly is None

    @property
    def degree(self) -> int:
        return 1 if self.poly is None else len(self.poly) - 1

    @property
    def residue_field(self) -> GF:
        if self.poly is None:
            return self.field
        return residue_field(self.field, self.poly, "t")

    def key(self) -> tuple:
        if self.poly is None:
            return (1, 1, ())
        return (self.degree, 0, poly_key(self.poly))

    def __lt__(self, other: Place) -> bool:
        return self.key() < other.key()

    def name(self) -> str:
        if self.poly is None:
            return "inf"
        F = self.field
        if self.degree == 1:
            return F.format(F.neg(self.poly[0]))
        return format_poly(F, self.poly)

    def __str__(self):
        return f"[{self.name()}]"

    def local_field(self, precision: int = DEFAULT_PRECISION) -> LaurentField:
        return LaurentField(self.residue_field, LOCAL_VAR, precision)


def infinity(F: GF) -> Place:
    return Place(F, None)


def finite_place(F: GF, poly) -> Place:
    poly = trim(poly)
    if not poly or poly[-1] != 1:
        raise UnsupportedInput("a place is given by a monic irreducible polynomial")
    lead, fac = factor(F, poly)
    if len(fac) != 1 or list(fac.values()) != [1]:
        raise UnsupportedInput(f"{format_poly(F, poly)} is not irreducible")
    return Place(F, poly)


@lru_cache(maxsize=None)
def places_of_degree(F: GF, d: int) -> tuple:
    out = [Place(F, P) for P in irreducibles(F, d)]
    if d == 1:
        out.append(infinity(F))
    return tuple(out)


def places_up_to(F: GF, B: int) -> list[Place]:
    out = []
    for d in range(1, B + 1):
        out.extend(places_of_degree(F, d))
    return out


def count_places(q: int, d: int) -> int:
    """Number of degree-d places of ``P^1/F_q`` (Gauss formula, plus infinity at d = 1)."""
    total = 0
    for e in range(1, d + 1):
        if d % e == 0:
            total += _mobius(d // e) * q**e
    return total // d + (1 if d == 1 else 0)


def _mobius(n: int) -> int:
    out, k = 1, 2
    while k * k <= n:
        if n % k == 0:
            n //= k
            if n % k == 0:
                return 0
            out = -out
        k += 1
    return -out if n > 1 else out


# ---------------------------------------------------------------------------
# polynomial text


def format_poly(F: GF, f, var: str = "t") -> str:
    terms = []
    for k in range(len(f) - 1, -1, -1):
        c = f[k]
        if not c:
            continue
        cs = F.format(c)
        if not (cs.isdigit() or re.fullmatch(r"[a-z](\^\d+)?", cs)):
            cs = f"({cs})"
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if not mono:
            terms.append(cs)
        elif cs == "1":
            terms.append(mono)
        else:
            terms.append(f"{cs}*{mono}")
    return " + ".join(terms) if terms else "0"


def parse_poly(F: GF, text: str, var: str = "t") -> tuple:
    """Parse a polynomial in ``var`` over F.

    Grammar: sums and differences of products of factors, where a factor is
    an integer, the field generator, ``var``, or a parenthesized expression,
    optionally raised to a non-negative integer power.
    """
    tokens = re.findall(r"\d+|[a-z]+|[()+\-*^]", text.replace(" ", ""))
    if "".join(tokens) != text.replace(" ", ""):
        raise ParseError(f"unexpected characters in {text!r}")
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take():
        nonlocal pos
        tok = peek()
        if tok is None:
            raise ParseError(f"unexpected end of {text!r}")
        pos += 1
        return tok

    def expr():
        sign = 1
        if peek() == "-":
            take()
            sign = -1
        acc = term()
        if sign < 0:
            acc = poly_scale(F, F.minus_one, acc)
        while peek() in ("+", "-"):
            op = take()
            rhs = term()
            acc = poly_sub(F, acc, rhs) if op == "-" else trim(
                [F.add(x, y) for x, y in _zip_pad(acc, rhs)]
            )
        return acc

    def term():
        acc = factor_()
        while peek() == "*":
            take()
            acc = poly_mul(F, acc, factor_())
        return acc

    def factor_():
        base = atom()
        if peek() == "^":
            take()
            e = take()
            if not e.isdigit():
                raise ParseError("exponents must be non-negative integers")
            out = (1,)
            for _ in range(int(e)):
                out = poly_mul(F, out, base)
            return out
        return base

    def atom():
        tok = take()
        if tok == "(":
            inner = expr()
            if take() != ")":
                raise ParseError("missing ')'")
            return inner
        if tok.isdigit():
            return trim([int(tok) % F.p])
        if tok == var:
            return (0, 1)
        if F.base is not None and tok == F.var:
            return trim([F.parse(tok)])
        raise ParseError(f"unexpected token {tok!r}")

    out = expr()
    if pos != len(tokens):
        raise ParseError(f"trailing input in {text!r}")
    return out


def _zip_pad(a, b):
    n = max(len(a), len(b))
    return zip(list(a) + [0] * (n - len(a)), list(b) + [0] * (n - len(b)))


def parse_place(F: GF, text: str) -> Place:
    s = text.strip()
    if s in ("inf", "oo", "infinity"):
        return infinity(F)
    if "t" in s:
        return finite_place(F, parse_poly(F, s))
    c = F.parse(s)
    return Place(F, (F.neg(c), 1))


# ---------------------------------------------------------------------------
# rational functions


@dataclass(frozen=True)
class RationalFunction:
    """``num / den`` in ``F_q(t)``, both nonzero, den monic, no common factor."""

    field: GF
    num: tuple
    den: tuple = (1,)

    @classmethod
    def make(cls, F: GF, num, den=(1,)) -> RationalFunction:
        num, den = trim(num), trim(den)
        if not den:
            raise DivisionByZero("zero denominator")
        if not num:
            raise ZeroElement("the zero function has no divisor")
        g = _gcd(F, num, den)
        if len(g) > 1:
            num = poly_divmod(F, num, g)[0]
            den = poly_divmod(F, den, g)[0]
        c = F.inv(den[-1])
        return cls(F, poly_scale(F, c, num), poly_scale(F, c, den))

    @classmethod
    def constant(cls, F: GF, c: int) -> RationalFunction:
        return cls.make(F, (c,))

    @classmethod
    def t(cls, F: GF) -> RationalFunction:
        return cls.make(F, (0, 1))

    def __mul__(self, other: RationalFunction) -> RationalFunction:
        F = self.field
        return RationalFunction.make(F, poly_mul(F, self.num, other.num), poly_mul(F, self.den, other.den))

    def inverse(self) -> RationalFunction:
        return RationalFunction.make(self.field, self.den, self.num)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, k: int):
        out = RationalFunction.constant(self.field, 1)
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            out = out * base
        return out

    def divisor(self) -> dict:
        """``{place: order}`` over all places with nonzero order (infinity included)."""
        F = self.field
        out: dict = {}
        for poly, sgn in ((self.num, 1), (self.den, -1)):
            _, fac = factor(F, poly)
            for P, e in fac.items():
                pl = Place(F, P)
                out[pl] = out.get(pl, 0) + sgn * e
        d_inf = poly_deg(self.den) - poly_deg(self.num)
        if d_inf:
            out[infinity(F)] = d_inf
        return {p: e for p, e in out.items() if e}

    def order_at(self, place: Place) -> int:
        if place.is_infinite:
            return poly_deg(self.den) - poly_deg(self.num)
        return _multiplicity(self.field, self.num, place.poly) - _multiplicity(
            self.field, self.den, place.poly
        )

    def lead_at(self, place: Place) -> int:
        """Residue class of ``f / pi^ord(f)`` in the residue field at the place."""
        F = self.field
        if place.is_infinite:
            return F.div(self.num[-1], self.den[-1])
        k = place.residue_field
        a = _strip(F, self.num, place.poly)
        b = _strip(F, self.den, place.poly)
        ra = poly_to_code(k, poly_mod(F, a, place.poly)) if k is not F else _eval_mod(F, a, place.poly)
        rb = poly_to_code(k, poly_mod(F, b, place.poly)) if k is not F else _eval_mod(F, b, place.poly)
        return k.div(ra, rb)

    def expand_at(self, place: Place, precision: int = DEFAULT_PRECISION) -> LaurentElement:
        K = place.local_field(precision)
        return local_expansion(K, place, self.num) / local_expansion(K, place, self.den)

    def format(self) -> str:
        F = self.field
        n = format_poly(F, self.num)
        if self.den == (1,):
            return n
        return f"({n})/({format_poly(F, self.den)})"

    def is_constant(self) -> bool:
        return len(self.num) == 1 and self.den == (1,)


def parse_function(F: GF, text: str) -> RationalFunction:
    parts = _split_top(text.replace(" ", ""), "/")
    if len(parts) > 2:
        raise ParseError("at most one '/' in a rational function")
    num = parse_poly(F, parts[0])
    den = parse_poly(F, parts[1]) if len(parts) == 2 else (1,)
    return RationalFunction.make(F, num, den)


def _gcd(F, a, b):
    while b:
        a, b = b, poly_mod(F, a, b)
    return poly_monic(F, a)


def _multiplicity(F, f, P) -> int:
    e = 0
    while True:
        q, r = poly_divmod(F, f, P)
        if r:
            return e
        f, e = q, e + 1


def _strip(F, f, P):
    while True:
        q, r = poly_divmod(F, f, P)
        if r:
            return f
        f = q


def _eval_mod(F, f, P) -> int:
    r = poly_mod(F, f, P)
    return r[0] if r else 0


# ---------------------------------------------------------------------------
# local expansions


def teichmuller(F: GF, place: Place, a: tuple, N: int) -> tuple:
    """The Teichmueller representative of ``a mod P`` in ``F_q[t]/P^N``."""
    P = place.poly
    PN = (1,)
    for _ in range(N):
        PN = poly_mul(F, PN, P)
    Q = F.order**place.degree
    e = Q
    while e < N:
        e *= Q
    return poly_powmod(F, poly_mod(F, a, P), e, PN)


def local_expansion(K: LaurentField, place: Place, f) -> LaurentElement:
    """Expansion of a nonzero polynomial f in ``k_P((pi))`` to the precision of K."""
    F = place.field
    f = trim(f)
    if not f:
        raise ZeroElement("zero polynomial")
    N = K.precision
    if place.is_infinite:
        rev = tuple(reversed(f))
        return K.series(-poly_deg(f), rev, N)
    P = place.poly
    k = place.residue_field
    v = _multiplicity(F, f, P)
    g = _strip(F, f, P)
    PN = (1,)
    for _ in range(N):
        PN = poly_mul(F, PN, P)
    g = poly_mod(F, g, PN)
    digits = []
    for i in range(N):
        r = poly_mod(F, g, P)
        code = (poly_to_code(k, r) if k is not F else (r[0] if r else 0))
        digits.append(code)
        if r:
            g = poly_sub(F, g, teichmuller(F, place, r, N - i))
        q, rem = poly_divmod(F, g, P)
        if rem:
            raise AssertionError("Teichmueller digit did not cancel")
        g = q
    return K.series(v, digits, N)
