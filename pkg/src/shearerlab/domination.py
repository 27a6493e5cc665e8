"""Stochastic domination between laws on {0,1}^n.

``Y`` dominates ``X`` when some coupling has ``Y >= X`` almost surely.
That is a transportation problem: ship the mass of ``Y`` at ``s`` to
configurations ``t`` below ``s`` so as to cover the law of ``X``. It is
decided by max-flow, and a minimum cut yields an up-set ``U`` with
``P(X in U) > P(Y in U)`` when domination fails.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import CapExceeded, MinorationViolated, PreconditionError
from .graph import Graph, as_params, members
from .maxflow import FlowNetwork
from .measure import (
    INTERIOR,
    Dist,
    and_with_product,
    boundary_crossing,
    construct_measure,
    membership,
    product,
)
from .numeric import FLOAT, FLOAT_ZERO_TOL, RATIONAL, check_backend, fmt

STRASSEN_CAP = 12
UPSET_CAP = 4
FLOW_SLACK = 1e-9
COUNTEREXAMPLE_CAP = 14


@dataclass(frozen=True)
class CouplingPlan:
    """Joint masses on pairs ``(y, x)`` with ``y >= x`` bitwise."""

    n: int
    pairs: tuple

    def row_sums(self) -> dict:
        out = {}
        for y, _, m in self.pairs:
            out[y] = out.get(y, 0) + m
        return out

    def col_sums(self) -> dict:
        out = {}
        for _, x, m in self.pairs:
            out[x] = out.get(x, 0) + m
        return out

    def is_ordered(self) -> bool:
        return all(y & x == x for y, x, _ in self.pairs)

    def to_json(self) -> dict:
        return {"n": self.n, "pairs": [[y, x, fmt(m)] for y, x, m in self.pairs]}


@dataclass(frozen=True)
class UpSet:
    """Set of configurations closed under switching coordinates to 1.

    ``mask`` has bit ``c`` set when configuration ``c`` belongs to the set.
    """

    n: int
    mask: int

    def configs(self) -> list[int]:
        return members(self.mask)

    def __contains__(self, c: int) -> bool:
        return bool(self.mask >> c & 1)

    def is_upset(self) -> bool:
        for c in self.configs():
            for v in range(self.n):
                if not self.mask >> (c | 1 << v) & 1:
                    return False
        return True

    def probability(self, d: Dist):
        return sum((d.mass[c] for c in self.configs()), d.mass[0] * 0)

    def to_json(self) -> list[int]:
        return self.configs()


@dataclass(frozen=True)
class DominationResult:
    dominates: bool
    plan: CouplingPlan | None
    violating_upset: UpSet | None
    deficit: object

    def __bool__(self):
        return self.dominates

    def to_json(self) -> dict:
        out = {"dominates": self.dominates, "deficit": fmt(self.deficit)}
        if self.violating_upset is not None:
            out["violating_upset"] = self.violating_upset.to_json()
        if self.plan is not None:
            out["plan"] = self.plan.to_json()["pairs"]
        return out


def _common(dY: Dist, dX: Dist, exact):
    if dY.n != dX.n:
        raise PreconditionError(f"dimension mismatch: {dY.n} vs {dX.n}")
    if exact is None:
        exact = dY.backend == RATIONAL and dX.backend == RATIONAL
    if exact:
        return dY.to_rational(), dX.to_rational(), True
    return dY.to_float(), dX.to_float(), False


def strassen_dominates(dY: Dist, dX: Dist, exact=None, slack: float = FLOW_SLACK) -> DominationResult:
    """Decide whether ``dY`` stochastically dominates ``dX`` by max-flow.

    ``exact`` defaults to True when both laws are rational; float mode
    accepts a shortfall of at most ``slack``.
    """
    dY, dX, exact = _common(dY, dX, exact)
    n = dY.n
    if n > STRASSEN_CAP:
        raise CapExceeded(f"{n} coordinates exceeds the max-flow cap of {STRASSEN_CAP}")
    size = 1 << n
    src, sink = 2 * size, 2 * size + 1
    net = FlowNetwork(2 * size + 2)
    zero = dY.mass[0] * 0
    big = dY.total() + dX.total() + 1
    order_edges = []
    for s in range(size):
        if dY.mass[s] > 0:
            net.add_edge(src, s, dY.mass[s])
            t = s
            while True:
                order_edges.append((s, t, net.add_edge(s, size + t, big)))
                if t == 0:
                    break
                t = (t - 1) & s
    for t in range(size):
        if dX.mass[t] > 0:
            net.add_edge(size + t, sink, dX.mass[t])
    flow = net.max_flow(src, sink, zero)
    deficit = dX.total() - flow
    ok = deficit <= 0 if exact else deficit <= slack
    if ok:
        pairs = []
        for s, t, e in order_edges:
            m = net.flow_on(e)
            if m > 0:
                pairs.append((s, t, m))
        return DominationResult(True, CouplingPlan(n, tuple(pairs)), None, max(deficit, zero))
    seen = net.reachable(src)
    cut = [t for t in range(size) if not seen[size + t]]
    return DominationResult(False, None, UpSet(n, _up_closure(cut, n)), deficit)


def _up_closure(configs, n: int) -> int:
    mask = 0
    for t in configs:
        mask |= 1 << t
    for v in range(n):
        for c in members(mask):
            mask |= 1 << (c | 1 << v)
    return mask


@lru_cache(maxsize=None)
def enumerate_upsets(n: int) -> tuple[int, ...]:
    """All up-sets of {0,1}^n as bitmasks over configurations.

    An up-set on ``n`` coordinates splits by the top coordinate into a pair
    ``U0 <= U1`` of up-sets on ``n - 1`` coordinates.
    """
    if n > UPSET_CAP:
        raise CapExceeded(f"up-set enumeration capped at n={UPSET_CAP}")
    if n == 0:
        return (0, 1)
    lower = enumerate_upsets(n - 1)
    shift = 1 << (n - 1)
    return tuple(u0 | u1 << shift for u1 in lower for u0 in lower if u0 & ~u1 == 0)


def upset_dominates(dY: Dist, dX: Dist, exact=None, slack: float = FLOW_SLACK) -> bool:
    """Domination checked on the indicator of every up-set (``n <= 4``)."""
    dY, dX, exact = _common(dY, dX, exact)
    for u in enumerate_upsets(dY.n):
        up = UpSet(dY.n, u)
        gap = up.probability(dX) - up.probability(dY)
        if gap > (0 if exact else slack):
            return False
    return True


def necessary_check(dY: Dist, dX: Dist, exact=None, slack: float = FLOW_SLACK) -> tuple[bool, bool]:
    """Compare ``P(.._W = 1)`` and ``P(.._W = 0)`` over all vertex subsets ``W``.

    Either flag False refutes domination.
    """
    dY, dX, exact = _common(dY, dX, exact)
    tol = 0 if exact else slack
    ones = bool(np.all(dX.ones_table() - dY.ones_table() <= tol))
    zeros = bool(np.all(dY.zeros_table() - dX.zeros_table() <= tol))
    return ones, zeros


def dominated_value(d: Dist, tol: float = 1e-9, exact: bool = True):
    """Largest ``c`` with ``d`` dominating the homogeneous product with marginal ``c``.

    Bisection on ``[0, min marginal]``; the dominated parameters form a
    closed down-set. Exact mode (default) runs the flow in rationals so a
    value of exactly zero is resolved.
    """
    if exact:
        d = d.to_rational()
        lo, hi = Fraction(0), min(d.marginals())
        backend = RATIONAL
    else:
        d = d.to_float()
        lo, hi = 0.0, float(min(d.marginals()))
        backend = FLOAT

    def dominated(c):
        return strassen_dominates(d, product(c, d.n, backend), exact=exact).dominates

    if hi <= 0 or dominated(hi):
        return hi
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if dominated(mid):
            lo = mid
        else:
            hi = mid
    return lo


def min_composition(dY: Dist, x) -> Dist:
    """Law of the vertex-wise minimum of ``Y`` and an independent product with marginals ``x``."""
    return and_with_product(dY, x)


@dataclass(frozen=True)
class Counterexample:
    """Boundary measure thinned by an independent product.

    ``boundary`` is the crossing point on the segment from ``p`` to all
    ones, ``t`` its position and ``thinning`` the product marginals.
    """

    dist: Dist
    boundary: tuple
    t: object
    thinning: tuple

    def to_json(self) -> dict:
        return {
            "boundary": [fmt(x) for x in self.boundary],
            "t": fmt(self.t),
            "thinning": [fmt(x) for x in self.thinning],
            "dist": self.dist.to_json(),
        }


def counterexample(g: Graph, p, backend=None) -> Counterexample:
    """Field with marginals ``p`` and dependency graph ``g`` dominating no nontrivial product.

    Valid only for ``p`` outside the interior of the region. Shearer's
    measure at the boundary point has zero mass on all-ones; thinning it
    down to marginals ``p`` keeps that zero.
    """
    backend = check_backend(backend)
    if g.n > COUNTEREXAMPLE_CAP:
        raise CapExceeded(f"{g.n} vertices exceeds the counterexample cap of {COUNTEREXAMPLE_CAP}")
    p = as_params(p, g.n, backend)
    if membership(g, p, backend).status == INTERIOR:
        raise PreconditionError("parameter lies in the interior; every such field dominates a product")
    tol = 0.0 if backend == FLOAT else Fraction(1, 1 << 64)
    r, t = boundary_crossing(g, p, backend, tol=tol)
    y = construct_measure(g, r, backend, zero_tol=FLOAT_ZERO_TOL)
    marg = y.marginals()
    x = tuple(min(1, pv / m) if m > 0 else 1 for pv, m in zip(p, marg))
    x = tuple(type(pv)(v) for pv, v in zip(p, x))
    return Counterexample(and_with_product(y, x), r, t, x)


def conditional_oracle(d: Dist):
    """``cond(prefix)`` = P(Z_k = 1 | Z_0..Z_{k-1} = prefix) with ``k = len(prefix)``.

    Unreachable prefixes (probability zero) return 1.
    """
    mass = d.mass
    size = 1 << d.n

    @lru_cache(maxsize=None)
    def prefix_prob(prefix: tuple):
        k = len(prefix)
        bits = sum(b << i for i, b in enumerate(prefix))
        low = (1 << k) - 1
        return sum((mass[c] for c in range(size) if c & low == bits), mass[0] * 0)

    def cond(prefix):
        prefix = tuple(int(b) for b in prefix)
        den = prefix_prob(prefix)
        if den <= 0:
            return 1
        return prefix_prob(prefix + (1,)) / den

    return cond


def russo_sample(cond, p, seed=None, count: int = 1) -> list[tuple[int, int]]:
    """Sequential ordered coupling of ``Z`` (via ``cond``) with a product of marginals ``p``.

    At step ``k`` one uniform ``u`` sets ``z_k = [u < cond]`` and
    ``x_k = [u < p_k]``, so ``x <= z`` whenever ``cond >= p_k``. Raises
    ``MinorationViolated`` at the first reachable prefix where that fails.
    Returns ``(z, x)`` bitmask pairs.
    """
    p = tuple(p)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        z_bits = []
        z = x = 0
        for k, target in enumerate(p):
            c = cond(tuple(z_bits))
            if c < target:
                raise MinorationViolated(tuple(z_bits), k, c, target)
            u = rng.random()
            zk = u < c
            z_bits.append(int(zk))
            z |= zk << k
            x |= (u < target) << k
        out.append((z, x))
    return out
