"""Truncated Laurent series ``F((t))`` over a finite field with certified precision.

A nonzero element is ``t^v * (u_0 + u_1 t + ... + u_{N-1} t^{N-1} + O(t^N))``
with ``u_0 != 0``; ``N`` is its *relative* precision.  Exact zero is a
separate flagged value.  Operations never invent coefficients:

* product and inverse keep ``min`` of the relative precisions,
* a sum is known up to ``t^{min(v_a + N_a, v_b + N_b)}`` (absolute), so
  cancellation of leading terms costs relative precision, and a sum whose
  visible window is entirely zero raises :class:`PrecisionExhausted`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import DivisionByZero, ParseError, PrecisionExhausted, ZeroElement
from .gf import GF

DEFAULT_PRECISION = 32


@dataclass(frozen=True)
class LaurentField:
    coeff: GF
    var: str = "t"
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.precision < 1:
            raise ValueError("precision must be positive")

    @property
    def p(self) -> int:
        return self.coeff.p

    def zero(self) -> LaurentElement:
        return LaurentElement(self, 0, (), True)

    def one(self) -> LaurentElement:
        return self.constant(1)

    def constant(self, c: int, precision: int | None = None) -> LaurentElement:
        if c == 0:
            return self.zero()
        N = precision or self.precision
        return LaurentElement(self, 0, (c,) + (0,) * (N - 1))

    def uniformizer(self) -> LaurentElement:
        return self.monomial(1)

    def monomial(self, v: int, c: int = 1) -> LaurentElement:
        return LaurentElement(self, v, (c,) + (0,) * (self.precision - 1))

    def from_poly(self, coeffs, precision: int | None = None) -> LaurentElement:
        """Exact polynomial sum(coeffs[i] t^i), truncated to the field precision."""
        coeffs = list(coeffs)
        v = next((i for i, c in enumerate(coeffs) if c), None)
        if v is None:
            return self.zero()
        N = precision or self.precision
        body = coeffs[v : v + N]
        return LaurentElement(self, v, tuple(body) + (0,) * (N - len(body)))

    def series(self, v: int, coeffs, precision: int | None = None) -> LaurentElement:
        """t^v * sum(coeffs[i] t^i) with coeffs[0] allowed to vanish."""
        e = self.from_poly(coeffs, precision)
        if e.is_zero:
            return e
        return LaurentElement(self, e.valuation + v, e.coeffs)

    def parse(self, text: str) -> LaurentElement:
        return parse_laurent(self, text)

    # -- tower interface (see gf.GF for the finite case) ------------------------
    is_finite = False

    @property
    def residue_field(self) -> GF:
        return self.coeff

    @property
    def minus_one(self) -> LaurentElement:
        return self.constant(self.coeff.minus_one)

    def valuation(self, x: LaurentElement) -> int:
        if x.is_zero:
            raise ZeroElement("valuation of zero")
        return x.valuation

    def lead(self, x: LaurentElement) -> int:
        """Residue class of ``x / t^v(x)``."""
        return x.residue

    def lift(self, c: int) -> LaurentElement:
        if c == 0:
            raise ZeroElement("cannot lift zero to a unit")
        return self.constant(c)

    def mul(self, x, y):
        return x * y

    def inv(self, x):
        return x.inverse()

    def neg(self, x):
        return -x

    def one_minus(self, x):
        return self.one() - x

    def key(self, x: LaurentElement) -> tuple:
        return x.sort_key()

    def is_one(self, x: LaurentElement) -> bool:
        return x.is_one()

    def is_nonzero(self, x: LaurentElement) -> bool:
        return not x.is_zero

    def format(self, x: LaurentElement) -> str:
        return x.format()

    def __repr__(self):
        return f"{self.coeff!r}(({self.var}))"


@dataclass(frozen=True)
class LaurentElement:
    field: LaurentField
    valuation: int
    coeffs: tuple
    is_zero: bool = False

    def __post_init__(self):
        if self.is_zero:
            return
        if not self.coeffs or self.coeffs[0] == 0:
            raise ValueError("leading unit coefficient must be nonzero")

    # -- basic data ------------------------------------------------------------
    @property
    def precision(self) -> int:
        return len(self.coeffs)

    @property
    def absolute_precision(self) -> int:
        return self.valuation + len(self.coeffs)

    @property
    def residue(self) -> int:
        """Leading coefficient u_0 (the residue class of the unit part)."""
        if self.is_zero:
            raise ZeroElement("zero has no leading coefficient")
        return self.coeffs[0]

    def unit_decompose(self) -> tuple[int, LaurentElement]:
        if self.is_zero:
            raise ZeroElement("cannot decompose zero")
        return self.valuation, LaurentElement(self.field, 0, self.coeffs)

    def coefficient(self, k: int) -> int:
        """Coefficient of t^k (raises when k is beyond the known window)."""
        if self.is_zero:
            return 0
        if k >= self.absolute_precision:
            raise PrecisionExhausted(f"coefficient of t^{k} is not known")
        i = k - self.valuation
        return self.coeffs[i] if i >= 0 else 0

    # -- arithmetic ------------------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, LaurentElement):
            other = self.field.constant(other)
        if other.field.coeff is not self.field.coeff:
            raise ValueError("elements of different fields")
        return other

    def __neg__(self):
        if self.is_zero:
            return self
        F = self.field.coeff
        return LaurentElement(self.field, self.valuation, tuple(F.neg(c) for c in self.coeffs))

    def __add__(self, other):
        other = self._check(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        F = self.field.coeff
        top = min(self.absolute_precision, other.absolute_precision)
        low = min(self.valuation, other.valuation)
        window = []
        for k in range(low, top):
            a = self.coeffs[k - self.valuation] if k >= self.valuation else 0
            b = other.coeffs[k - other.valuation] if k >= other.valuation else 0
            window.append(F.add(a, b))
        lead = next((i for i, c in enumerate(window) if c), None)
        if lead is None:
            raise PrecisionExhausted(
                f"sum vanishes to the known precision t^{top}; leading term not certified"
            )
        return LaurentElement(self.field, low + lead, tuple(window[lead:]))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        if self.is_zero or other.is_zero:
            return self.field.zero()
        F = self.field.coeff
        N = min(self.precision, other.precision)
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(N):
            s = 0
            for i in range(k + 1):
                if a[i] and b[k - i]:
                    s = F.add(s, F.mul(a[i], b[k - i]))
            out.append(s)
        return LaurentElement(self.field, self.valuation + other.valuation, tuple(out))

    __rmul__ = __mul__

    def inverse(self) -> LaurentElement:
        if self.is_zero:
            raise DivisionByZero("inverse of zero Laurent series")
        F = self.field.coeff
        a = self.coeffs
        N = len(a)
        inv0 = F.inv(a[0])
        out = [inv0]
        for k in range(1, N):
            s = 0
            for i in range(1, k + 1):
                if a[i] and out[k - i]:
                    s = F.add(s, F.mul(a[i], out[k - i]))
            out.append(F.neg(F.mul(s, inv0)))
        return LaurentElement(self.field, -self.valuation, tuple(out))

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def __rtruediv__(self, other):
        return self._check(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.constant(1, self.precision if not self.is_zero else None)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def truncate(self, precision: int) -> LaurentElement:
        if self.is_zero:
            return self
        return LaurentElement(self.field, self.valuation, self.coeffs[:precision])

    def agrees_with(self, other: LaurentElement) -> bool:
        """Equality on the common window of known coefficients."""
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        if self.valuation != other.valuation:
            return False
        n = min(self.precision, other.precision)
        return self.coeffs[:n] == other.coeffs[:n]

    def is_one(self) -> bool:
        return (
            not self.is_zero
            and self.valuation == 0
            and self.coeffs[0] == 1
            and not any(self.coeffs[1:])
        )

    def nth_root_principal(self, n: int) -> LaurentElement:
        """n-th root of a principal unit 1 + O(t) by Newton iteration (p does not divide n)."""
        if self.is_zero or self.valuation != 0 or self.coeffs[0] != 1:
            raise ValueError("not a principal unit")
        p = self.field.coeff.p
        if n % p == 0:
            raise ValueError("root order must be prime to the characteristic")
        n_inv = self.field.constant(pow(n % p, -1, p), self.precision)
        y = self.field.constant(1, self.precision)
        reached = 1
        while reached < self.precision:
            y = y - (y**n - self) * n_inv * (y ** (n - 1)).inverse()
            reached *= 2
        return y

    # -- text ----------------------------------------------------------------------
    def format(self) -> str:
        if self.is_zero:
            return "0"
        F = self.field.coeff
        x = self.field.var
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            cs = F.format(c)
            if not _atomic(cs):
                cs = f"({cs})"
            mono = "" if i == 0 else (x if i == 1 else f"{x}^{i}")
            if not mono:
                terms.append(cs)
            elif cs == "1":
                terms.append(mono)
            else:
                terms.append(f"{cs}*{mono}")
        terms.append(f"O({x}^{self.precision})")
        return f"{x}^{self.valuation}*({' + '.join(terms)})"

    def __str__(self):
        return self.format()

    def sort_key(self) -> tuple:
        if self.is_zero:
            return (0,)
        return (1, self.valuation, self.coeffs)


def _atomic(s: str) -> bool:
    return s.isdigit() or re.fullmatch(r"[a-z](\^\d+)?", s) is not None


_LAURENT = re.compile(r"^\s*([a-z])\^(-?\d+)\s*\*\s*\((.*)\)\s*$")


def _split_top(s: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def parse_laurent(K: LaurentField, text: str) -> LaurentElement:
    """Parse ``t^v*(c0 + c1*t + ... + O(t^N))``; the O-term is optional."""
    if text.strip() == "0":
        return K.zero()
    m = _LAURENT.match(text)
    if not m or m.group(1) != K.var:
        raise ParseError(f"not a Laurent element in {K.var}: {text!r}")
    v = int(m.group(2))
    body = m.group(3)
    F = K.coeff
    x = K.var
    coeffs: dict[int, int] = {}
    precision = None
    for term in _split_top(body, "+"):
        term = term.strip()
        if not term:
            continue
        om = re.fullmatch(rf"O\({x}\^(\d+)\)", term)
        if om:
            precision = int(om.group(1))
            continue
        parts = _split_top(term, "*")
        k = 0
        c = 1
        for part in parts:
            part = part.strip()
            mm = re.fullmatch(rf"{x}(?:\^(\d+))?", part)
            if mm:
                k = int(mm.group(1) or 1)
            else:
                if part.startswith("(") and part.endswith(")"):
                    part = part[1:-1]
                c = F.mul(c, F.parse(part))
        coeffs[k] = F.add(coeffs.get(k, 0), c)
    N = precision or K.precision
    raw = [coeffs.get(i, 0) for i in range(N)]
    if any(k >= N for k in coeffs if coeffs[k]):
        raise ParseError("coefficient beyond the stated precision")
    if not raw or raw[0] == 0:
        raise ParseError("leading coefficient must be nonzero")
    return LaurentElement(K, v, tuple(raw))
