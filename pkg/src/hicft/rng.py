"""Seeded randomness for the property suites.

Every suite takes a 64-bit seed.  ``trial_generators(seed, k)`` splits it
with :class:`numpy.random.SeedSequence` into k independent PCG64 streams, one
per trial, so a trial's inputs do not depend on how many draws earlier
trials made.
"""

from __future__ import annotations

import numpy as np

from .bilaurent import BiLaurentElement, bipoly
from .curve import RationalFunction
from .gf import GF, trim
from .laurent import LaurentElement, LaurentField


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def trial_generators(seed: int, k: int) -> list[np.random.Generator]:
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(k)]


def _int(rng, lo: int, hi: int) -> int:
    """Uniform on ``lo..hi`` inclusive, as a Python int."""
    return int(rng.integers(lo, hi + 1))


def random_unit(F: GF, rng) -> int:
    return _int(rng, 1, F.order - 1)


def random_element(F: GF, rng) -> int:
    return _int(rng, 0, F.order - 1)


def random_poly(F: GF, degree: int, rng, monic: bool = False) -> tuple:
    """A nonzero polynomial of degree at most ``degree``."""
    d = _int(rng, 0, degree)
    coeffs = [random_element(F, rng) for _ in range(d)]
    top = 1 if monic else random_unit(F, rng)
    return trim(coeffs + [top])


def random_function(F: GF, degree: int, rng) -> RationalFunction:
    return RationalFunction.make(F, random_poly(F, degree, rng), random_poly(F, degree, rng, monic=True))


def random_laurent(K: LaurentField, rng, vrange: int = 3, length: int = 4) -> LaurentElement:
    """``t^v (c_0 + ... )`` with a nonzero constant term, exact up to K's precision."""
    F = K.coeff
    v = _int(rng, -vrange, vrange)
    coeffs = [random_unit(F, rng)] + [random_element(F, rng) for _ in range(length - 1)]
    return K.series(v, coeffs)


def random_laurent_unit(K: LaurentField, rng, length: int = 4) -> LaurentElement:
    F = K.coeff
    coeffs = [random_unit(F, rng)] + [random_element(F, rng) for _ in range(length - 1)]
    return K.series(0, coeffs)


def random_bipoly_unit(F: GF, rng, degree: int = 2):
    """A polynomial in s, t of total degree at most ``degree`` with nonzero constant term."""
    terms = [((0, 0), random_unit(F, rng))]
    for i in range(degree + 1):
        for j in range(degree + 1 - i):
            if (i, j) != (0, 0) and rng.random() < 0.5:
                terms.append(((i, j), random_element(F, rng)))
    return bipoly(F, terms)


def random_bilaurent(F: GF, rng, vrange: int = 3, degree: int = 2, with_den: bool = True) -> BiLaurentElement:
    a = _int(rng, -vrange, vrange)
    b = _int(rng, -vrange, vrange)
    num = random_bipoly_unit(F, rng, degree)
    den = random_bipoly_unit(F, rng, degree) if with_den and rng.random() < 0.5 else bipoly(F, [((0, 0), 1)])
    return BiLaurentElement(F, a, b, num, den)


__all__ = [
    "generator",
    "trial_generators",
    "random_unit",
    "random_element",
    "random_poly",
    "random_function",
    "random_laurent",
    "random_laurent_unit",
    "random_bipoly_unit",
    "random_bilaurent",
]
