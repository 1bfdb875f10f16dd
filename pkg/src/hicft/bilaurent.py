"""Two-dimensional local fields ``F_q((s))((t))`` on exact monomial-times-unit elements.

An element is ``s^a * t^b * U / V`` where ``U`` and ``V`` are polynomials in
``s, t`` with nonzero constant term.  This set is a multiplicative group, it
contains every element whose divisor on ``Spec F_q[[s,t]]`` lives on ``(s)``
and ``(t)``, and every valuation and residue is read off without truncation.

The same element can be viewed in two towers: with ``t`` outermost the
residue field is ``F_q((s))``, and with ``s`` outermost it is ``F_q((t))``.
:class:`TwoLocalField` fixes one of those orderings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import (
    ExactFormRequired,
    ParseError,
    UnitConstantRequired,
    UnsupportedElementForm,
    ZeroElement,
)
from .gf import GF
from .laurent import DEFAULT_PRECISION, LaurentElement, LaurentField, _split_top

BiPoly = tuple  # sorted tuple of ((i, j), c): c * s^i * t^j, c != 0


def bipoly(F: GF, terms) -> BiPoly:
    """Normalize an iterable of ((i, j), c) or a dict, merging equal monomials."""
    acc: dict = {}
    items = terms.items() if isinstance(terms, dict) else terms
    for (i, j), c in items:
        acc[(i, j)] = F.add(acc.get((i, j), 0), c)
    return tuple(sorted((m, c) for m, c in acc.items() if c))


def bp_mul(F: GF, x: BiPoly, y: BiPoly) -> BiPoly:
    acc: dict = {}
    for (i, j), c in x:
        for (k, l), d in y:
            m = (i + k, j + l)
            acc[m] = F.add(acc.get(m, 0), F.mul(c, d))
    return bipoly(F, acc)


def bp_add(F: GF, x: BiPoly, y: BiPoly) -> BiPoly:
    return bipoly(F, list(x) + list(y))


def bp_scale(F: GF, c: int, x: BiPoly) -> BiPoly:
    return bipoly(F, [(m, F.mul(c, d)) for m, d in x])


def bp_shift(x: BiPoly, di: int, dj: int) -> BiPoly:
    return tuple(((i + di, j + dj), c) for (i, j), c in x)


def bp_const(x: BiPoly) -> int:
    return dict(x).get((0, 0), 0)


def bp_slice(x: BiPoly, var: str, k: int) -> list[int]:
    """Coefficient of ``var^k`` as a dense univariate list in the other variable."""
    out: dict = {}
    for (i, j), c in x:
        if var == "t" and j == k:
            out[i] = c
        elif var == "s" and i == k:
            out[j] = c
    if not out:
        return []
    top = max(out)
    return [out.get(e, 0) for e in range(top + 1)]


def bp_min_degree(x: BiPoly, var: str) -> int:
    idx = 1 if var == "t" else 0
    return min(m[idx] for m, _ in x)


def bp_strip(x: BiPoly) -> tuple[int, int, BiPoly]:
    """Pull out the largest monomial factor ``s^i t^j`` dividing x."""
    if not x:
        raise ZeroElement("zero polynomial")
    i0 = bp_min_degree(x, "s")
    j0 = bp_min_degree(x, "t")
    return i0, j0, bp_shift(x, -i0, -j0)


_ONE: BiPoly = (((0, 0), 1),)


@dataclass(frozen=True)
class BiLaurentElement:
    coeff: GF
    a: int
    b: int
    num: BiPoly = _ONE
    den: BiPoly = _ONE

    def __post_init__(self):
        if bp_const(self.num) == 0 or bp_const(self.den) == 0:
            raise UnitConstantRequired("unit factors need a nonzero constant term")
        if bp_const(self.den) != 1:
            F = self.coeff
            c = F.inv(bp_const(self.den))
            object.__setattr__(self, "num", bp_scale(F, c, self.num))
            object.__setattr__(self, "den", bp_scale(F, c, self.den))

    @classmethod
    def from_poly(cls, F: GF, poly) -> BiLaurentElement:
        """Exact element for a polynomial of the shape ``s^i t^j * unit``."""
        i, j, u = bp_strip(bipoly(F, poly))
        if bp_const(u) == 0:
            raise UnsupportedElementForm("polynomial is not a monomial times a unit")
        return cls(F, i, j, u)

    # -- arithmetic ---------------------------------------------------------------
    def __mul__(self, other: BiLaurentElement) -> BiLaurentElement:
        F = self.coeff
        return BiLaurentElement(
            F,
            self.a + other.a,
            self.b + other.b,
            bp_mul(F, self.num, other.num),
            bp_mul(F, self.den, other.den),
        )

    def inverse(self) -> BiLaurentElement:
        return BiLaurentElement(self.coeff, -self.a, -self.b, self.den, self.num)

    def __truediv__(self, other):
        return self * other.inverse()

    def __neg__(self):
        F = self.coeff
        return BiLaurentElement(F, self.a, self.b, bp_scale(F, F.minus_one, self.num), self.den)

    def __pow__(self, k: int) -> BiLaurentElement:
        base = self if k >= 0 else self.inverse()
        out = BiLaurentElement(self.coeff, 0, 0)
        for _ in range(abs(k)):
            out = out * base
        return out

    def __add__(self, other: BiLaurentElement) -> BiLaurentElement:
        """Sum, provided it is again a monomial times a unit."""
        F = self.coeff
        x = bp_shift(bp_mul(F, self.num, other.den), self.a, self.b)
        y = bp_shift(bp_mul(F, other.num, self.den), other.a, other.b)
        lo_i = min(self.a, other.a)
        lo_j = min(self.b, other.b)
        total = bp_add(F, bp_shift(x, -lo_i, -lo_j), bp_shift(y, -lo_i, -lo_j))
        if not total:
            raise ZeroElement("sum is zero")
        i, j, u = bp_strip(total)
        if bp_const(u) == 0:
            raise UnsupportedElementForm("sum leaves the monomial-unit form")
        return BiLaurentElement(F, lo_i + i, lo_j + j, u, bp_mul(F, self.den, other.den))

    def __sub__(self, other):
        return self + (-other)

    def equals(self, other: BiLaurentElement) -> bool:
        """Equality as field elements (cross-multiplied)."""
        F = self.coeff
        return (
            self.a == other.a
            and self.b == other.b
            and bp_mul(F, self.num, other.den) == bp_mul(F, other.num, self.den)
        )

    def is_one(self) -> bool:
        return self.a == 0 and self.b == 0 and self.num == self.den

    # -- towers ---------------------------------------------------------------------
    def tower(self, outer: str = "t", precision: int = DEFAULT_PRECISION):
        """``(v_outer, leading coefficient)`` with the coefficient in ``F_q((inner))``."""
        inner = "s" if outer == "t" else "t"
        K = LaurentField(self.coeff, inner, precision)
        v_out, v_in = (self.b, self.a) if outer == "t" else (self.a, self.b)
        u = K.from_poly(bp_slice(self.num, outer, 0))
        w = K.from_poly(bp_slice(self.den, outer, 0))
        lead = K.monomial(v_in) * u * w.inverse()
        return v_out, lead

    def expand(self, n_outer: int, n_inner: int, outer: str = "t") -> list[list[int]]:
        """Unit part ``U/V`` as a series in the outer variable.

        Entry ``k`` holds the coefficients of ``outer^k`` as a power series in
        the inner variable, exact modulo ``inner^n_inner``.  The monomial
        ``s^a t^b`` is not included.
        """
        F = self.coeff

        def trunc(c):
            c = list(c[:n_inner])
            return c + [0] * (n_inner - len(c))

        def smul(x, y):
            out = [0] * n_inner
            for i, c in enumerate(x):
                if c:
                    for j in range(n_inner - i):
                        if y[j]:
                            out[i + j] = F.add(out[i + j], F.mul(c, y[j]))
            return out

        d0 = trunc(bp_slice(self.den, outer, 0))
        d0_inv = [F.inv(d0[0])]
        for k in range(1, n_inner):
            acc = 0
            for i in range(1, k + 1):
                acc = F.add(acc, F.mul(d0[i], d0_inv[k - i]))
            d0_inv.append(F.neg(F.mul(acc, d0_inv[0])))
        out = []
        for k in range(n_outer):
            acc = trunc(bp_slice(self.num, outer, k))
            for i in range(1, k + 1):
                di = trunc(bp_slice(self.den, outer, i))
                prod = smul(di, out[k - i])
                acc = [F.sub(x, y) for x, y in zip(acc, prod)]
            out.append(smul(acc, d0_inv))
        return out

    # -- text ----------------------------------------------------------------------
    def format(self) -> str:
        body = f"s^{self.a}*t^{self.b}*({format_bipoly(self.coeff, self.num)})"
        if self.den != _ONE:
            body += f"/({format_bipoly(self.coeff, self.den)})"
        return body

    def __str__(self):
        return self.format()

    def sort_key(self) -> tuple:
        return (self.a, self.b, self.num, self.den)


def format_bipoly(F: GF, x: BiPoly) -> str:
    terms = []
    for (i, j), c in sorted(x, key=lambda mc: (mc[0][0] + mc[0][1], mc[0][1])):
        cs = F.format(c)
        if not (cs.isdigit() or re.fullmatch(r"[a-z](\^\d+)?", cs)):
            cs = f"({cs})"
        mono = [v if e == 1 else f"{v}^{e}" for v, e in (("s", i), ("t", j)) if e]
        if not mono:
            terms.append(cs)
        elif cs == "1":
            terms.append("*".join(mono))
        else:
            terms.append("*".join([cs] + mono))
    return " + ".join(terms) if terms else "0"


def parse_bipoly(F: GF, text: str) -> BiPoly:
    s = text.replace(" ", "")
    if not s:
        raise ParseError("empty polynomial")
    # top-level minus signs become negated terms
    depth, buf = 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "-" and depth == 0:
            buf.append("+-")
        else:
            buf.append(ch)
    acc = []
    for term in _split_top("".join(buf), "+"):
        if not term:
            continue
        sign = 1
        while term.startswith("-"):
            sign, term = -sign, term[1:]
        c, i, j = 1, 0, 0
        for fac in _split_top(term, "*"):
            m = re.fullmatch(r"([st])(?:\^(\d+))?", fac)
            if m:
                e = int(m.group(2) or 1)
                if m.group(1) == "s":
                    i += e
                else:
                    j += e
                continue
            if fac.startswith("(") and fac.endswith(")"):
                fac = fac[1:-1]
            c = F.mul(c, F.parse(fac))
        if sign < 0:
            c = F.neg(c)
        acc.append(((i, j), c))
    return bipoly(F, acc)


_PREFIX = re.compile(r"^s\^(-?\d+)\*t\^(-?\d+)\*")


def _group_end(s: str, start: int) -> int:
    """Index just past the parenthesized group opening at ``start``."""
    depth = 0
    for k in range(start, len(s)):
        depth += s[k] == "("
        depth -= s[k] == ")"
        if depth == 0:
            return k + 1
    raise ParseError("unbalanced parentheses")


def parse_bilaurent(F: GF, text: str) -> BiLaurentElement:
    """Parse ``s^a*t^b*(U)`` or ``s^a*t^b*(U)/(V)``; a bare polynomial is also accepted."""
    s = text.replace(" ", "")
    m = _PREFIX.match(s)
    if m and s[m.end() : m.end() + 1] == "(":
        k = _group_end(s, m.end())
        num = parse_bipoly(F, s[m.end() + 1 : k - 1])
        rest = s[k:]
        den = _ONE
        if rest:
            if not (rest.startswith("/(") and _group_end(rest, 1) == len(rest)):
                raise ParseError(f"trailing text in {text!r}")
            den = parse_bipoly(F, rest[2:-1])
        return BiLaurentElement(F, int(m.group(1)), int(m.group(2)), num, den)
    try:
        return BiLaurentElement.from_poly(F, parse_bipoly(F, s))
    except ZeroElement:
        raise ParseError(f"zero is not a unit: {text!r}") from None


class TwoLocalField:
    """``F_q((inner))((outer))`` acting on :class:`BiLaurentElement` values."""

    is_finite = False

    def __init__(self, coeff: GF, outer: str = "t", precision: int = DEFAULT_PRECISION):
        if outer not in ("s", "t"):
            raise ValueError("outer variable must be 's' or 't'")
        self.coeff = coeff
        self.outer = outer
        self.inner = "s" if outer == "t" else "t"
        self.precision = precision
        self.residue_field = LaurentField(coeff, self.inner, precision)

    def __eq__(self, other):
        return (
            isinstance(other, TwoLocalField)
            and other.coeff is self.coeff
            and other.outer == self.outer
            and other.precision == self.precision
        )

    def __hash__(self):
        return hash((id(self.coeff), self.outer, self.precision))

    def __repr__(self):
        return f"{self.coeff!r}(({self.inner}))(({self.outer}))"

    @property
    def p(self) -> int:
        return self.coeff.p

    def element(self, a: int, b: int, num=_ONE, den=_ONE) -> BiLaurentElement:
        F = self.coeff
        return BiLaurentElement(F, a, b, bipoly(F, num), bipoly(F, den))

    def monomial(self, a: int, b: int, c: int = 1) -> BiLaurentElement:
        if c == 0:
            raise ZeroElement("zero is not a unit")
        return BiLaurentElement(self.coeff, a, b, (((0, 0), c),))

    def constant(self, c: int) -> BiLaurentElement:
        return self.monomial(0, 0, c)

    def one(self) -> BiLaurentElement:
        return self.constant(1)

    @property
    def minus_one(self) -> BiLaurentElement:
        return self.constant(self.coeff.minus_one)

    def uniformizer(self) -> BiLaurentElement:
        return self.monomial(0, 1) if self.outer == "t" else self.monomial(1, 0)

    def valuation(self, x: BiLaurentElement) -> int:
        self._check(x)
        return x.b if self.outer == "t" else x.a

    def lead(self, x: BiLaurentElement) -> LaurentElement:
        self._check(x)
        return x.tower(self.outer, self.precision)[1]

    def lift(self, y: LaurentElement) -> BiLaurentElement:
        """Lift ``c * inner^k`` (an exact monomial of the residue field)."""
        if y.is_zero:
            raise ZeroElement("cannot lift zero")
        if any(y.coeffs[1:]):
            raise ExactFormRequired("only monomials of the residue field lift exactly")
        c, k = y.coeffs[0], y.valuation
        return self.monomial(k, 0, c) if self.inner == "s" else self.monomial(0, k, c)

    def _check(self, x):
        if not isinstance(x, BiLaurentElement):
            raise ExactFormRequired(f"expected an exact monomial-unit element, got {type(x).__name__}")

    def mul(self, x, y):
        return x * y

    def inv(self, x):
        return x.inverse()

    def neg(self, x):
        return -x

    def one_minus(self, x):
        return self.one() - x

    def key(self, x: BiLaurentElement) -> tuple:
        return x.sort_key()

    def is_one(self, x: BiLaurentElement) -> bool:
        return x.equals(self.one())

    def is_nonzero(self, x) -> bool:
        return True

    def format(self, x: BiLaurentElement) -> str:
        return x.format()

    def parse(self, text: str) -> BiLaurentElement:
        return parse_bilaurent(self.coeff, text)
