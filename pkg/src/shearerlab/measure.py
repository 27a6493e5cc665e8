"""Shearer's measure on finite graphs and the Shearer parameter region.

Configurations of a field on ``n`` vertices are bitmasks with bit ``v``
equal to the value at ``v``. A ``Dist`` is the dense table of their masses.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapExceeded, GraphError, NoEscape, OutsideRegion, PreconditionError
from .graph import Graph, as_params, check_cap, enumerate_independent_sets, lowest, members
from .numeric import FLOAT, FLOAT_ZERO_TOL, RATIONAL, check_backend, coerce, fmt, to_rational
from .xi import XiCache

MEASURE_CAP = 20
OR_CAP = 16
BALL_CAP = 18

INTERIOR = "Interior"
BOUNDARY = "Boundary"
OUTSIDE = "Outside"


@dataclass(frozen=True)
class Dist:
    """Dense law on ``{0,1}^n``; ``mass[c]`` is the probability of configuration ``c``."""

    n: int
    mass: tuple
    backend: str = FLOAT

    def __post_init__(self):
        if len(self.mass) != 1 << self.n:
            raise PreconditionError(f"mass table has {len(self.mass)} entries, expected {1 << self.n}")

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def array(self):
        return np.array(self.mass, dtype=object if self.backend == RATIONAL else float)

    def total(self):
        return sum(self.mass, coerce(0, self.backend))

    def marginal(self, v: int):
        return sum((m for c, m in enumerate(self.mass) if c >> v & 1), coerce(0, self.backend))

    def marginals(self) -> tuple:
        return tuple(self.marginal(v) for v in range(self.n))

    def prob_ones(self, w: int):
        """P(Y_v = 1 for all v in w)."""
        return sum((m for c, m in enumerate(self.mass) if c & w == w), coerce(0, self.backend))

    def prob_zeros(self, w: int):
        """P(Y_v = 0 for all v in w)."""
        return sum((m for c, m in enumerate(self.mass) if not c & w), coerce(0, self.backend))

    def prob_pattern(self, w: int, values: int):
        """P(Y restricted to ``w`` equals ``values`` restricted to ``w``)."""
        values &= w
        return sum((m for c, m in enumerate(self.mass) if c & w == values), coerce(0, self.backend))

    def ones_table(self):
        """Array whose entry ``w`` is P(Y_w = 1), via superset sums."""
        return _superset_sums(self.array(), self.n)

    def zeros_table(self):
        """Array whose entry ``w`` is P(Y_w = 0)."""
        sub = _subset_sums(self.array(), self.n)
        return sub[self.full ^ np.arange(1 << self.n)]

    def negative_config(self, tol: float = 0.0):
        """Least configuration with mass below ``-tol``, or None."""
        for c, m in enumerate(self.mass):
            if m < -tol:
                return c
        return None

    def is_probability(self, tol: float = 1e-9) -> bool:
        if self.backend == RATIONAL:
            return self.negative_config() is None and self.total() == 1
        return self.negative_config(tol) is None and abs(self.total() - 1) <= tol

    def to_rational(self) -> "Dist":
        """Exact copy; float masses are converted bit-exactly and renormalised."""
        if self.backend == RATIONAL:
            return self
        mass = [Fraction(m) for m in self.mass]
        tot = sum(mass)
        return Dist(self.n, tuple(m / tot for m in mass), RATIONAL)

    def to_float(self) -> "Dist":
        return Dist(self.n, tuple(float(m) for m in self.mass), FLOAT)

    def to_json(self) -> dict:
        if self.backend == RATIONAL:
            mass = [[str(m.numerator), str(m.denominator)] for m in self.mass]
        else:
            mass = [float(m) for m in self.mass]
        return {"n": self.n, "backend": self.backend, "mass": mass}

    @classmethod
    def from_json(cls, data: dict) -> "Dist":
        try:
            n = int(data["n"])
            raw = data["mass"]
            if data.get("backend", FLOAT) == RATIONAL or (raw and isinstance(raw[0], (list, str))):
                mass = tuple(
                    Fraction(int(m[0]), int(m[1])) if isinstance(m, list) else to_rational(m) for m in raw
                )
                return cls(n, mass, RATIONAL)
            return cls(n, tuple(float(m) for m in raw), FLOAT)
        except (KeyError, TypeError, ValueError, IndexError, ZeroDivisionError) as exc:
            if isinstance(exc, PreconditionError):
                raise
            raise GraphError(f"bad distribution JSON: {exc}") from None


def product(p, n: int | None = None, backend=None) -> Dist:
    """Bernoulli product law with marginals ``p`` (scalar needs ``n``)."""
    backend = check_backend(backend)
    if n is None:
        n = len(p)
    p = as_params(p, n, backend)
    mass = np.ones(1, dtype=object if backend == RATIONAL else float)
    if backend == RATIONAL:
        mass[0] = Fraction(1)
    for v in range(n):
        mass = np.concatenate([mass * (1 - p[v]), mass * p[v]])
    return Dist(n, tuple(mass.tolist()), backend)


def point_mass(n: int, config: int, backend=None) -> Dist:
    backend = check_backend(backend)
    zero, one = coerce(0, backend), coerce(1, backend)
    return Dist(n, tuple(one if c == config else zero for c in range(1 << n)), backend)


@dataclass(frozen=True)
class RegionStatus:
    status: str
    witness: int | None = None
    min_value: object = None

    def to_json(self) -> dict:
        out = {"status": self.status}
        if self.witness is not None:
            out["witness"] = members(self.witness)
        if self.min_value is not None:
            out["min_xi"] = fmt(self.min_value)
        return out


def _xi_table(g: Graph, p, backend, zero_tol: float = 0.0):
    cache = XiCache(g, p, backend)
    table = cache.fill_all(MEASURE_CAP)
    if zero_tol:
        table = table.copy()
        table[np.abs(table.astype(float)) <= zero_tol] = coerce(0, cache.backend)
    return cache, table


def construct_measure(g: Graph, p, backend=None, zero_tol: float = 0.0) -> Dist:
    """Shearer's measure, possibly signed when ``p`` lies outside the region.

    The configuration whose zero set is the independent set ``S`` gets
    ``prod_{v in S} q_v * Xi(G - N+[S])``; configurations with adjacent
    zeros get nothing. With ``zero_tol > 0`` critical-function values that
    small are snapped to zero and the law is renormalised, which makes
    boundary measures exact in the float backend.
    """
    check_cap(g.n, MEASURE_CAP)
    cache, table = _xi_table(g, p, backend, zero_tol)
    zero = coerce(0, cache.backend)
    mass = [zero] * (1 << g.n)
    full = g.full
    q = cache.q
    for s in enumerate_independent_sets(g, MEASURE_CAP):
        weight = table[full & ~g.closed_mask(s)]
        for v in members(s):
            weight = weight * q[v]
        mass[full ^ s] = weight
    if cache.backend == FLOAT:
        mass = [float(m) for m in mass]
    if zero_tol:
        tot = sum(mass)
        if tot > 0:
            mass = [m / tot for m in mass]
    return Dist(g.n, tuple(mass), cache.backend)


def membership(g: Graph, p, backend=None, tol: float = FLOAT_ZERO_TOL) -> RegionStatus:
    """Classify ``p`` against the Shearer region by the sign of Xi on every induced subgraph."""
    check_cap(g.n, MEASURE_CAP)
    cache, table = _xi_table(g, p, backend)
    if cache.backend == RATIONAL:
        tol = 0
    low = table < -tol
    if low.any():
        w = int(np.flatnonzero(low)[0])
        return RegionStatus(OUTSIDE, w, table[w])
    near = table <= tol
    if near.any():
        w = int(np.flatnonzero(near)[0])
        return RegionStatus(BOUNDARY, w, table[w])
    return RegionStatus(INTERIOR, None, min(table))


def in_closed_region(g: Graph, p, backend=None) -> bool:
    """Raw sign test: Xi >= 0 on every induced subgraph."""
    _, table = _xi_table(g, p, backend)
    return not (table < 0).any()


def boundary_crossing(g: Graph, p, backend=None, tol: float = 1e-12):
    """Point ``r = p + t (1 - p)`` where the segment towards all-ones enters the region.

    Returns ``(r, t)`` with ``r`` on the region side of the final bracket.
    """
    backend = check_backend(backend)
    p = as_params(p, g.n, backend)
    status = membership(g, p, backend)
    if status.status == INTERIOR:
        raise PreconditionError("parameter already lies in the interior of the region")
    if status.status == BOUNDARY:
        return p, coerce(0, backend)

    def point(t):
        return tuple(x + t * (1 - x) for x in p)

    lo, hi = coerce(0, backend), coerce(1, backend)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if not lo < mid < hi:
            break
        if in_closed_region(g, point(mid), backend):
            hi = mid
        else:
            lo = mid
    return point(hi), hi


def escaping_order(g: Graph, w: int, exterior: int) -> list[tuple[int, int]]:
    """Order ``w`` so every vertex has a neighbour outside its predecessors.

    Returns ``(vertex, escape)`` pairs. Built back to front: repeatedly
    remove a vertex adjacent to the exterior or to already removed vertices.
    """
    if w & exterior:
        raise PreconditionError("window and exterior overlap")
    remaining, peeled = w, 0
    order = []
    while remaining:
        outside = exterior | peeled
        for v in members(remaining):
            escapes = g.nbr[v] & outside
            if escapes:
                order.append((v, lowest(escapes)))
                remaining &= ~(1 << v)
                peeled |= 1 << v
                break
        else:
            raise NoEscape(f"vertices {members(remaining)} have no route to the exterior")
    order.reverse()
    return order


def sample(d: Dist, seed=None, count: int = 1) -> list[int]:
    """Independent draws from ``d`` by inverse CDF on the cumulative table."""
    if not d.is_probability():
        raise PreconditionError("cannot sample from a signed or unnormalised table")
    cum = np.cumsum(np.array([float(m) for m in d.mass]))
    cum /= cum[-1]
    rng = np.random.default_rng(seed)
    idx = np.searchsorted(cum, rng.random(count), side="right")
    return [int(i) for i in np.minimum(idx, len(cum) - 1)]


def or_with_product(d: Dist, c) -> Dist:
    """Law of ``Y | X`` (vertex-wise max) with ``X`` an independent product with marginals ``c``."""
    c = as_params(c, d.n, d.backend)
    a = d.array()
    for v in range(d.n):
        view = a.reshape(-1, 2, 1 << v)
        zero, one = view[:, 0, :].copy(), view[:, 1, :].copy()
        view[:, 1, :] = one + c[v] * zero
        view[:, 0, :] = (1 - c[v]) * zero
    return Dist(d.n, tuple(a.tolist()), d.backend)


def and_with_product(d: Dist, x) -> Dist:
    """Law of ``Y & X`` (vertex-wise min) with ``X`` an independent product with marginals ``x``."""
    x = as_params(x, d.n, d.backend)
    a = d.array()
    for v in range(d.n):
        view = a.reshape(-1, 2, 1 << v)
        zero, one = view[:, 0, :].copy(), view[:, 1, :].copy()
        view[:, 1, :] = x[v] * one
        view[:, 0, :] = zero + (1 - x[v]) * one
    return Dist(d.n, tuple(a.tolist()), d.backend)


def or_composition(g: Graph, p, c, backend=None) -> Dist:
    """Law of Shearer(p) OR an independent product with marginals ``c``."""
    check_cap(g.n, OR_CAP)
    status = membership(g, p, backend)
    if status.status == OUTSIDE:
        raise OutsideRegion("parameter outside the Shearer region", status.witness, status.min_value)
    return or_with_product(construct_measure(g, p, backend), c)


@dataclass(frozen=True)
class IntrinsicBound:
    vertex: int
    upper: object
    lower: object
    radius: int
    argmin: int

    def to_json(self) -> dict:
        return {
            "vertex": self.vertex,
            "upper": fmt(self.upper),
            "lower": fmt(self.lower),
            "radius": self.radius,
            "argmin": members(self.argmin),
        }


def intrinsic_vector(g: Graph, p, radius: int = 3, backend=None) -> list[IntrinsicBound]:
    """Truncated infimum of escaping OVOEPs at each vertex.

    ``W`` ranges over subsets of the radius-ball around ``v`` (minus ``v``)
    that miss at least one neighbour of ``v``; the result is only an upper
    bound on the infimum over all escaping pairs. The paired lower bound is
    the smallest ``q_w`` over neighbours. Isolated vertices report ``p_v``
    for both.
    """
    cache = XiCache(g, p, backend)
    out = []
    for v in range(g.n):
        ball = g.ball(v, radius) & ~(1 << v)
        if bin(ball).count("1") + 1 > BALL_CAP:
            raise CapExceeded(f"radius-{radius} ball at vertex {v} exceeds {BALL_CAP} vertices")
        nb = g.nbr[v]
        if not nb:
            out.append(IntrinsicBound(v, cache.p[v], cache.p[v], radius, 0))
            continue
        best, arg = None, 0
        sub = ball
        while True:
            if nb & ~sub:
                den = cache.value(sub)
                if den <= 0:
                    raise OutsideRegion(f"Xi on {members(sub)} is not positive", sub, den)
                val = cache.value(sub | (1 << v)) / den
                if best is None or val < best or (val == best and sub < arg):
                    best, arg = val, sub
            if sub == 0:
                break
            sub = (sub - 1) & ball
        lower = min(cache.q[w] for w in members(nb))
        out.append(IntrinsicBound(v, best, lower, radius, arg))
    return out


def _subset_sums(a, bits: int):
    out = a.copy()
    for b in range(bits):
        view = out.reshape(-1, 2, 1 << b)
        view[:, 1, :] += view[:, 0, :]
    return out


def _superset_sums(a, bits: int):
    out = a.copy()
    for b in range(bits):
        view = out.reshape(-1, 2, 1 << b)
        view[:, 0, :] += view[:, 1, :]
    return out
