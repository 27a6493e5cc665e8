"""Dual numeric backend: exact rationals or IEEE doubles.

Algorithms are written once against Python's number protocol; these helpers
coerce inputs into the requested backend. Floats entering the rational
backend go through their shortest ``repr`` so ``0.7`` becomes ``7/10``.
"""

from __future__ import annotations

import os
from fractions import Fraction
from numbers import Rational

import gmpy2

FLOAT = "float"
RATIONAL = "rational"
BACKENDS = (FLOAT, RATIONAL)

# |value| at or below this is treated as zero by the float backend
FLOAT_ZERO_TOL = 1e-10


def default_backend():
    name = os.environ.get("SHEARERLAB_BACKEND", FLOAT)
    return check_backend(name)


def check_backend(backend):
    if backend is None:
        return default_backend()
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    return backend


def to_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(repr(float(x)))


def coerce(x, backend):
    if backend == RATIONAL:
        return to_rational(x)
    if isinstance(x, str):
        return float(Fraction(x.strip()))
    return float(x)


def coerce_seq(xs, backend):
    return tuple(coerce(x, backend) for x in xs)


def backend_of(x):
    return RATIONAL if isinstance(x, (Fraction, int)) and not isinstance(x, bool) else FLOAT


def is_zero(x, tol=FLOAT_ZERO_TOL):
    if isinstance(x, Fraction):
        return x == 0
    return abs(x) <= tol


def exact_root(x: Fraction, m: int):
    """m-th root of a non-negative rational, exact when it is a perfect power.

    Falls back to a float otherwise.
    """
    if m == 1:
        return x
    if x < 0:
        raise ValueError("root of a negative number")
    num, num_exact = gmpy2.iroot(gmpy2.mpz(x.numerator), m)
    den, den_exact = gmpy2.iroot(gmpy2.mpz(x.denominator), m)
    if num_exact and den_exact:
        return Fraction(int(num), int(den))
    return float(x) ** (1.0 / m)


def fmt(x):
    """JSON-friendly rendering: exact strings for rationals, floats otherwise."""
    if isinstance(x, Fraction):
        return str(x)
    return float(x)


def root_bracket(x: Fraction, m: int, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Rationals ``lo <= x**(1/m) <= hi`` with ``hi - lo <= 2**-bits``."""
    if x < 0:
        raise ValueError("root of a negative number")
    x = to_rational(x)
    scaled = (x.numerator << (m * bits)) // x.denominator
    r, exact = gmpy2.iroot(gmpy2.mpz(scaled), m)
    lo = Fraction(int(r), 1 << bits)
    if exact and (scaled * x.denominator == x.numerator << (m * bits)):
        return lo, lo
    return lo, lo + Fraction(1, 1 << bits)
