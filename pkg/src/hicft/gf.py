"""Finite fields as towers of polynomial quotient rings.

Elements are plain integers ("codes").  In ``GF(base, m)`` with ``b`` elements
in the base, the code of ``c_0 + c_1 x + ... + c_{d-1} x^{d-1}`` is
``sum(c_i * b**i)``, so base-field constants keep their code and ``-1`` is
always ``p - 1``.  Multiplication and addition go through discrete log and
Zech log tables, which restricts fields to at most 2**16 elements.
"""

from __future__ import annotations

import re
from functools import lru_cache
from itertools import product

from .errors import DivisionByZero, ParseError, UnsupportedField

MAX_ORDER = 2**16

Poly = tuple  # coefficient codes, lowest degree first, no trailing zeros


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and _prime_factors(n) == [n]


class GF:
    """A finite field: the prime field (``base is None``) or ``base[x]/(modulus)``."""

    def __init__(self, p: int, base: GF | None = None, modulus: Poly | None = None, var: str = "g"):
        self.p = p
        self.base = base
        self.var = var
        if base is None:
            if not is_prime(p):
                raise UnsupportedField(f"{p} is not prime")
            self.degree = 1
            self.modulus = (0, 1)
            self.order = p
        else:
            modulus = tuple(modulus)
            if modulus[-1] != 1:
                raise ValueError("modulus must be monic")
            self.degree = len(modulus) - 1
            self.modulus = modulus
            self.order = base.order**self.degree
        if self.order > MAX_ORDER:
            raise UnsupportedField(f"fields are limited to {MAX_ORDER} elements")
        self.q = self.order
        self.minus_one = p - 1
        self._build_tables()

    # -- construction of log tables -------------------------------------------
    def digits(self, a: int) -> list[int]:
        b = self.base.order
        out = []
        for _ in range(self.degree):
            a, r = divmod(a, b)
            out.append(r)
        return out

    def from_digits(self, ds) -> int:
        b = self.base.order
        a = 0
        for d in reversed(list(ds)):
            a = a * b + d
        return a

    def _slow_mul(self, a: int, b: int) -> int:
        if self.base is None:
            return a * b % self.p
        F = self.base
        x, y = self.digits(a), self.digits(b)
        prod_ = [0] * (2 * self.degree - 1)
        for i, u in enumerate(x):
            if u:
                for j, v in enumerate(y):
                    if v:
                        prod_[i + j] = F.add(prod_[i + j], F.mul(u, v))
        m = self.modulus
        d = self.degree
        for k in range(len(prod_) - 1, d - 1, -1):
            c = prod_[k]
            if c:
                prod_[k] = 0
                for i in range(d):
                    if m[i]:
                        prod_[k - d + i] = F.sub(prod_[k - d + i], F.mul(c, m[i]))
        return self.from_digits(prod_[:d])

    def _slow_add(self, a: int, b: int) -> int:
        if self.base is None:
            return (a + b) % self.p
        F = self.base
        return self.from_digits(F.add(u, v) for u, v in zip(self.digits(a), self.digits(b)))

    def _slow_pow(self, a: int, k: int) -> int:
        r = 1
        while k:
            if k & 1:
                r = self._slow_mul(r, a)
            a = self._slow_mul(a, a)
            k >>= 1
        return r

    def _build_tables(self):
        Q = self.order
        n = Q - 1
        primes = _prime_factors(n)
        gen = None
        for cand in range(1, Q):
            if all(self._slow_pow(cand, n // r) != 1 for r in primes):
                gen = cand
                break
        if gen is None:
            raise UnsupportedField("no primitive element found; modulus is not irreducible")
        exp = [0] * n
        log = [None] * Q
        x = 1
        for i in range(n):
            if log[x] is not None:
                raise UnsupportedField("modulus is not irreducible")
            exp[i] = x
            log[x] = i
            x = self._slow_mul(x, gen)
        self._exp, self._log = exp, log
        self.generator = gen
        zech = [-1] * n
        for i in range(n):
            s = self._slow_add(1, exp[i])
            zech[i] = -1 if s == 0 else log[s]
        self._zech = zech

    # -- arithmetic ---------------------------------------------------------------
    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def add(self, a: int, b: int) -> int:
        if self.base is None:
            return (a + b) % self.p
        if a == 0:
            return b
        if b == 0:
            return a
        n = self.order - 1
        la = self._log[a]
        z = self._zech[(self._log[b] - la) % n]
        return 0 if z < 0 else self._exp[(la + z) % n]

    def neg(self, a: int) -> int:
        if self.base is None:
            return -a % self.p
        return self.mul(a, self.minus_one)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.base is None:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero in a finite field")
        return self._exp[-self._log[a] % (self.order - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k < 0:
                raise DivisionByZero("negative power of zero")
            return 1 if k == 0 else 0
        return self._exp[self._log[a] * k % (self.order - 1)]

    def dlog(self, a: int) -> int:
        """Discrete logarithm to the fixed primitive element ``generator``."""
        if a == 0:
            raise DivisionByZero("logarithm of zero")
        return self._log[a]

    def exp(self, k: int) -> int:
        return self._exp[k % (self.order - 1)]

    def elements(self) -> range:
        return range(self.order)

    def units(self) -> range:
        return range(1, self.order)

    def norm_to_base(self, a: int) -> int:
        """Norm to the base field (an element code below ``base.order``)."""
        if self.base is None:
            return a
        r = self.pow(a, (self.order - 1) // (self.base.order - 1))
        assert r < self.base.order
        return r

    def norm_to_prime(self, a: int) -> int:
        F, x = self, a
        while F.base is not None:
            x, F = F.norm_to_base(x), F.base
        return x

    # -- text ---------------------------------------------------------------------
    def format(self, a: int) -> str:
        if self.base is None:
            return str(a)
        ds = self.digits(a)
        terms = []
        for k in range(self.degree - 1, -1, -1):
            c = ds[k]
            if not c:
                continue
            cs = self.base.format(c)
            if self.base.base is not None and not cs.isdigit():
                cs = f"({cs})"
            mono = "" if k == 0 else (self.var if k == 1 else f"{self.var}^{k}")
            if not mono:
                terms.append(cs)
            elif cs == "1":
                terms.append(mono)
            else:
                terms.append(f"{cs}*{mono}")
        return " + ".join(terms) if terms else "0"

    def parse(self, text: str) -> int:
        if self.base is not None and self.base.base is not None:
            raise ParseError("parsing is supported for fields over a prime field")
        coeffs = parse_univariate(text, self.var, self.p)
        if self.base is None:
            if any(coeffs[1:]):
                raise ParseError(f"prime field element cannot contain {self.var}")
            return coeffs[0] if coeffs else 0
        # reduce modulo the defining polynomial
        return poly_to_code(self, poly_mod(self.base, tuple(coeffs), self.modulus))

    # -- tower interface shared with local fields ---------------------------------
    is_finite = True

    def key(self, a: int) -> int:
        return a

    def is_one(self, a: int) -> bool:
        return a == 1

    def one_minus(self, a: int) -> int:
        return self.sub(1, a)

    def is_nonzero(self, a: int) -> bool:
        return a != 0

    def __repr__(self):
        if self.base is None:
            return f"GF({self.p})"
        return f"GF({self.order}; {self.var})"


def poly_to_code(F: GF, poly: Poly) -> int:
    ds = list(poly) + [0] * (F.degree - len(poly))
    return F.from_digits(ds)


# ---------------------------------------------------------------------------
# polynomial arithmetic over a GF (codes, low degree first)


def trim(a) -> Poly:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def poly_add(F: GF, a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return trim(
        F.add(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)
    )


def poly_neg(F: GF, a: Poly) -> Poly:
    return tuple(F.neg(x) for x in a)


def poly_sub(F: GF, a: Poly, b: Poly) -> Poly:
    return poly_add(F, a, poly_neg(F, b))


def poly_scale(F: GF, c: int, a: Poly) -> Poly:
    return trim(F.mul(c, x) for x in a)


def poly_mul(F: GF, a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return trim(out)


def poly_divmod(F: GF, a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise DivisionByZero("polynomial division by zero")
    a = list(a)
    db = len(b) - 1
    lead_inv = F.inv(b[-1])
    if len(a) - 1 < db:
        return (), trim(a)
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if c:
            c = F.mul(c, lead_inv)
            q[k - db] = c
            for i in range(db + 1):
                if b[i]:
                    a[k - db + i] = F.sub(a[k - db + i], F.mul(c, b[i]))
    return trim(q), trim(a[:db])


def poly_mod(F: GF, a: Poly, b: Poly) -> Poly:
    return poly_divmod(F, a, b)[1]


def poly_monic(F: GF, a: Poly) -> Poly:
    return poly_scale(F, F.inv(a[-1]), a) if a else a


def poly_gcd(F: GF, a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, poly_mod(F, a, b)
    return poly_monic(F, a)


def poly_powmod(F: GF, a: Poly, k: int, m: Poly) -> Poly:
    r: Poly = (1,)
    a = poly_mod(F, a, m)
    while k:
        if k & 1:
            r = poly_mod(F, poly_mul(F, r, a), m)
        a = poly_mod(F, poly_mul(F, a, a), m)
        k >>= 1
    return poly_mod(F, r, m)


def poly_eval(F: GF, a: Poly, x: int) -> int:
    r = 0
    for c in reversed(a):
        r = F.add(F.mul(r, x), c)
    return r


def poly_deg(a: Poly) -> int:
    return len(a) - 1


def is_irreducible(F: GF, f: Poly) -> bool:
    """Rabin's irreducibility test."""
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    f = poly_monic(F, f)
    Q = F.order
    x: Poly = (0, 1)

    def frob_iter(k):
        y = x
        for _ in range(k):
            y = poly_powmod(F, y, Q, f)
        return y

    if poly_sub(F, frob_iter(d), x) != ():
        return False
    for r in _prime_factors(d):
        h = poly_sub(F, frob_iter(d // r), x)
        if len(poly_gcd(F, f, h)) > 1:
            return False
    return True


def monic_polys(F: GF, d: int):
    """All monic polynomials of degree d, in code order of the lower coefficients."""
    for low in product(range(F.order), repeat=d):
        yield tuple(reversed(low)) + (1,)


def poly_key(a: Poly) -> tuple:
    """Deterministic total order: degree first, then coefficients from the top."""
    return (len(a), tuple(reversed(a)))


@lru_cache(maxsize=None)
def _irreducibles_cached(F: GF, d: int) -> tuple:
    if d == 1:
        return tuple((F.neg(a), 1) for a in range(F.order))
    reducible = set()
    lower = {k: _irreducibles_cached(F, k) for k in range(1, d)}

    def extend(poly, remaining, min_deg, min_idx):
        if remaining == 0:
            reducible.add(poly)
            return
        for k in range(min_deg, remaining + 1):
            if k == d:
                continue
            start = min_idx if k == min_deg else 0
            irr = lower[k]
            for idx in range(start, len(irr)):
                extend(poly_mul(F, poly, irr[idx]), remaining - k, k, idx)

    extend((1,), d, 1, 0)
    out = [p for p in monic_polys(F, d) if p not in reducible]
    out.sort(key=poly_key)
    return tuple(out)


def irreducibles(F: GF, d: int) -> tuple:
    """Monic irreducible polynomials of degree d, ordered by :func:`poly_key`."""
    if F.order**d > 4 * MAX_ORDER:
        raise UnsupportedField("irreducible enumeration too large")
    return _irreducibles_cached(F, d)


def factor(F: GF, f: Poly) -> tuple[int, dict]:
    """Factor f as lead * prod P^e over monic irreducibles (trial division)."""
    if not f:
        raise DivisionByZero("cannot factor zero")
    lead = f[-1]
    g = poly_monic(F, f)
    out: dict = {}
    d = 1
    while 2 * d <= len(g) - 1:
        for P in irreducibles(F, d):
            while True:
                q, r = poly_divmod(F, g, P)
                if r:
                    break
                out[P] = out.get(P, 0) + 1
                g = q
        d += 1
    if len(g) > 1:
        out[g] = out.get(g, 0) + 1
    return lead, out


# ---------------------------------------------------------------------------
# canonical fields F_q


@lru_cache(maxsize=None)
def prime_field(p: int) -> GF:
    return GF(p)


@lru_cache(maxsize=None)
def fq(q: int) -> GF:
    """The canonical field with q elements.

    Its modulus is the least monic irreducible of degree e over F_p in code
    order (coefficient tuple read from the constant term as a base-p number).
    """
    ps = _prime_factors(q)
    if len(ps) != 1:
        raise UnsupportedField(f"{q} is not a prime power")
    p = ps[0]
    e = 0
    while p**e < q:
        e += 1
    if p**e != q:
        raise UnsupportedField(f"{q} is not a prime power")
    Fp = prime_field(p)
    if e == 1:
        return Fp
    for low in range(p**e):
        cand = tuple(Fp_digits(low, p, e)) + (1,)
        if is_irreducible(Fp, cand):
            return GF(p, Fp, cand, "g")
    raise UnsupportedField("no irreducible polynomial found")


def Fp_digits(n: int, p: int, e: int) -> list[int]:
    out = []
    for _ in range(e):
        n, r = divmod(n, p)
        out.append(r)
    return out


@lru_cache(maxsize=None)
def residue_field(F: GF, P: Poly, var: str = "t") -> GF:
    """``F[var]/(P)`` for a monic irreducible P; degree-1 places give F itself."""
    if len(P) == 2:
        return F
    return GF(F.p, F, P, var)


# ---------------------------------------------------------------------------
# univariate text syntax

_TERM = re.compile(r"^(?:(\d+)\*?)?(?:([a-z])(?:\^(\d+))?)?$")


def parse_univariate(text: str, var: str, p: int) -> list[int]:
    """Parse ``"2*g^2 + g + 1"`` into integer coefficients mod p (low first)."""
    s = text.replace(" ", "")
    if not s:
        raise ParseError("empty polynomial")
    s = s.replace("-", "+-")
    coeffs: dict[int, int] = {}
    for tok in s.split("+"):
        if not tok:
            continue
        sign = 1
        while tok.startswith("-"):
            sign, tok = -sign, tok[1:]
        m = _TERM.match(tok)
        if not m or (m.group(1) is None and m.group(2) is None):
            raise ParseError(f"cannot parse term {tok!r}")
        c = int(m.group(1)) if m.group(1) else 1
        if m.group(2) is not None:
            if m.group(2) != var:
                raise ParseError(f"unexpected variable {m.group(2)!r}")
            k = int(m.group(3)) if m.group(3) else 1
        else:
            k = 0
        coeffs[k] = coeffs.get(k, 0) + sign * c
    n = max(coeffs) + 1 if coeffs else 0
    return [coeffs.get(i, 0) % p for i in range(n)]
