"""Closed-form constants, the uniformly dominated vector, and sufficient conditions.

The two condition checkers decide whether a weight vector ``s > 0`` with
``F_v(s) <= s_v`` at every vertex exists, where

* LLL: ``F_v(s) = q_v * prod_{w in N+(v)} (1 + s_w)``;
* cluster expansion: ``F_v(s) = q_v * I_{N+(v)}(s)`` with ``I`` the
  independent-set sum at positive weights ``s``.

Either condition certifies that ``p = 1 - q`` lies in the interior of the
Shearer region. A False answer only means no certificate was found.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import OutsideRegion, PreconditionError
from .graph import Graph, enumerate_independent_sets, induced_subgraph, members, popcount
from .measure import Dist
from .numeric import RATIONAL, check_backend, coerce, exact_root, fmt, to_rational
from .xi import XiCache

HALFBALL_CAP = 11

LOWER = "LowerBound"
UPPER = "UpperBound"
SUFFICIENT = "Sufficient"
EXACT = "Exact"


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: object
    inputs: dict = field(default_factory=dict)
    kind: str = EXACT

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "value": fmt(self.value),
            "inputs": {k: fmt(v) if isinstance(v, (Fraction, float)) else v for k, v in self.inputs.items()},
            "kind": self.kind,
        }


# --- uniformly dominated vector --------------------------------------------

def thm2_vector(g: Graph, p, infinite_markers: int = 0, backend=None) -> tuple:
    """Per-vertex parameters of a product dominated by every field in the weak class.

    Components are those of the subgraph on ``{v : p_v < 1}``. A component
    touching ``infinite_markers`` stands for an infinite one and gets
    ``q_v * min q_w`` over neighbours inside it; a finite component ``C``
    gets ``1 - (1 - Xi_C)^(1/|C|)``. Rational inputs keep exact results
    whenever the root is rational.
    """
    backend = check_backend(backend)
    cache = XiCache(g, p, backend)
    p, q = cache.p, cache.q
    active = sum(1 << v for v in range(g.n) if p[v] < 1)
    c = [coerce(1, backend)] * g.n
    for comp in g.components(active):
        if comp & infinite_markers:
            for v in members(comp):
                inside = g.nbr[v] & comp
                if not inside:
                    raise PreconditionError(f"vertex {v} of a marked component has no neighbour in it")
                c[v] = q[v] * min(q[w] for w in members(inside))
            continue
        xi = cache.value(comp)
        status = _component_interior(g, comp, p, backend)
        if status is not None:
            raise OutsideRegion(f"parameter not in the interior on component {members(comp)}", status)
        size = popcount(comp)
        gap = 1 - xi
        if backend == RATIONAL:
            root = exact_root(gap, size)
        else:
            root = gap ** (1.0 / size)
        val = 1 - root
        for v in members(comp):
            c[v] = val
    return tuple(c)


def _component_interior(g: Graph, comp: int, p, backend):
    """Least subset of ``comp`` with non-positive Xi, or None."""
    sub, remap = induced_subgraph(g, comp)
    table = XiCache(sub, [p[v] for v in remap], backend).fill_all()
    bad = [i for i, x in enumerate(table) if x <= 0]
    if not bad:
        return None
    return sum(1 << remap[j] for j in members(bad[0]))


# --- sufficient conditions --------------------------------------------------

class ConditionResult(NamedTuple):
    holds: bool
    s: tuple | None
    search: str

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "s": None if self.s is None else [fmt(x) for x in self.s],
            "search": self.search,
        }


FIXED_POINT = "fixed_point"
UNIFORM = "uniform"
SUPPLIED = "supplied"

ITERATIONS = 1000
DIVERGENCE_CAP = 1e6
INFLATE = (1e-12, 1e-9, 1e-6, 1e-4, 1e-3, 1e-2)


def _lll_maps(g: Graph, q):
    closed = [members(g.closed(v)) for v in range(g.n)]

    def f(v, s):
        out = q[v]
        for w in closed[v]:
            out = out * (1 + s[w])
        return out

    return f


def _fp_maps(g: Graph, q):
    sets = []
    for v in range(g.n):
        sub, remap = induced_subgraph(g, g.closed(v))
        sets.append([[remap[i] for i in members(t)] for t in enumerate_independent_sets(sub)])

    def f(v, s):
        total = 0
        for t in sets[v]:
            term = 1
            for w in t:
                term = term * s[w]
            total = total + term
        return q[v] * total

    return f


def _holds(f, s, n) -> bool:
    return all(f(v, s) <= s[v] for v in range(n))


def _search(f, q, n, s, search, iterations, cap) -> ConditionResult:
    if s is not None:
        s = tuple(s)
        if len(s) != n or any(x < 0 for x in s):
            raise PreconditionError("weight vector must be non-negative with one entry per vertex")
        if any(x == 0 and qv > 0 for x, qv in zip(s, q)):
            return ConditionResult(False, s, SUPPLIED)
        return ConditionResult(_holds(f, s, n), s, SUPPLIED)
    if search == FIXED_POINT:
        cur = tuple(float(x) for x in q)
        for _ in range(iterations):
            nxt = tuple(f(v, cur) for v in range(n))
            if max(nxt, default=0.0) > cap:
                return ConditionResult(False, None, search)
            if nxt == cur:
                break
            cur = nxt
    elif search == UNIFORM:
        scalar = max((float(x) for x in q), default=0.0)
        for _ in range(iterations):
            nxt = max((f(v, (scalar,) * n) for v in range(n)), default=0.0)
            if nxt > cap:
                return ConditionResult(False, None, search)
            if nxt == scalar:
                break
            scalar = nxt
        cur = (scalar,) * n
    else:
        raise PreconditionError(f"unknown search {search!r}")
    for eps in INFLATE:
        trial = tuple(x * (1 + eps) for x in cur)
        if _holds(f, trial, n):
            return ConditionResult(True, trial, search)
    return ConditionResult(False, None, search)


def lll_check(g: Graph, q, s=None, search: str = FIXED_POINT, iterations: int = ITERATIONS,
              cap: float = DIVERGENCE_CAP) -> ConditionResult:
    """Local lemma condition ``q_v prod_{N+(v)} (1 + s_w) <= s_v``.

    Without ``s``, iterate ``s <- F(s)`` from ``s = q`` and check the
    inequality at the limit inflated by a small factor. ``search="uniform"``
    restricts to constant vectors.
    """
    q = tuple(q) if isinstance(q, (list, tuple)) else (q,) * g.n
    return _search(_lll_maps(g, q), q, g.n, s, search, iterations, cap)


def fp_check(g: Graph, q, s=None, search: str = FIXED_POINT, iterations: int = ITERATIONS,
             cap: float = DIVERGENCE_CAP) -> ConditionResult:
    """Cluster-expansion condition ``q_v I_{N+(v)}(s) <= s_v``; search as in ``lll_check``."""
    q = tuple(q) if isinstance(q, (list, tuple)) else (q,) * g.n
    return _search(_fp_maps(g, q), q, g.n, s, search, iterations, cap)


# --- closed forms -----------------------------------------------------------

def _int_arg(name, val, low):
    if int(val) != val or val < low:
        raise PreconditionError(f"{name} must be an integer >= {low}, got {val}")
    return int(val)


def _root(x, m):
    return exact_root(x, m) if isinstance(x, Fraction) else float(x) ** (1.0 / m)


def p_sh_tree(D) -> BoundReport:
    D = _int_arg("D", D, 2)
    return BoundReport("p_sh_tree", 1 - Fraction((D - 1) ** (D - 1), D ** D), {"D": D}, EXACT)


def p_sh_kfuzz(k) -> BoundReport:
    k = _int_arg("k", k, 1)
    return BoundReport("p_sh_kfuzz", 1 - Fraction(k ** k, (k + 1) ** (k + 1)), {"k": k}, EXACT)


def zd_lower(d) -> BoundReport:
    d = _int_arg("d", d, 1)
    return BoundReport("zd_lower", 1 - Fraction(d ** d, (d + 1) ** (d + 1)), {"d": d}, LOWER)


def _check_p(p, threshold):
    if isinstance(p, str):
        p = to_rational(p)
    if not threshold <= p <= 1:
        raise PreconditionError(f"p = {p} must lie in [{threshold}, 1]")
    return p


def lss_lower(D, p) -> BoundReport:
    """Lower bound on the dominated value for degree-bounded graphs, valid above the tree threshold."""
    D = _int_arg("D", D, 2)
    p = _check_p(p, p_sh_tree(D).value)
    q = 1 - p
    val = (1 - _root(q / (D - 1) ** (D - 1), D)) * (1 - _root(q * (D - 1), D))
    return BoundReport("lss_lower", val, {"D": D, "p": p}, LOWER)


def lss_kfuzz(k, p) -> BoundReport:
    """Lower bound on the dominated value on the k-fuzz of the integers."""
    k = _int_arg("k", k, 1)
    p = _check_p(p, p_sh_kfuzz(k).value)
    q = 1 - p
    val = (1 - _root(q / k ** k, k + 1)) * (1 - _root(q * k, k + 1))
    return BoundReport("lss_kfuzz", val, {"k": k, "p": p}, LOWER)


def jump_lower(k) -> BoundReport:
    k = _int_arg("k", k, 1)
    return BoundReport("jump_lower", Fraction(k, (k + 1) ** 2), {"k": k}, LOWER)


def kfuzz_jump_upper(k) -> BoundReport:
    k = _int_arg("k", k, 1)
    val = 1 / (k + 1) + 1 - (k + 1) ** (-1 / (k + 1))
    return BoundReport("kfuzz_jump_upper", val, {"k": k}, UPPER)


def halfball_value(k) -> BoundReport:
    """Dominated value of the half-ball field, ``1 - k^(k/(k+1)) / (k+1)``."""
    k = _int_arg("k", k, 1)
    return BoundReport("halfball_value", 1 - k ** (k / (k + 1)) / (k + 1), {"k": k}, EXACT)


CLOSED_FORMS = {
    "p_sh_tree": (p_sh_tree, ("D",)),
    "p_sh_kfuzz": (p_sh_kfuzz, ("k",)),
    "zd_lower": (zd_lower, ("d",)),
    "lss_lower": (lss_lower, ("D", "p")),
    "lss_kfuzz": (lss_kfuzz, ("k", "p")),
    "jump_lower": (jump_lower, ("k",)),
    "kfuzz_jump_upper": (kfuzz_jump_upper, ("k",)),
    "halfball_value": (halfball_value, ("k",)),
}


def closed_forms(kind: str, **args) -> BoundReport:
    if kind not in CLOSED_FORMS:
        raise PreconditionError(f"unknown closed form {kind!r}; known: {sorted(CLOSED_FORMS)}")
    fn, names = CLOSED_FORMS[kind]
    missing = [n for n in names if args.get(n) is None]
    if missing:
        raise PreconditionError(f"{kind} needs {', '.join(missing)}")
    return fn(*(args[n] for n in names))


def kfuzz_halfball_brf(k: int) -> Dist:
    """All-or-nothing field on ``{0..k}``: all ones with the critical k-fuzz probability."""
    k = _int_arg("k", k, 1)
    if k > HALFBALL_CAP:
        raise PreconditionError(f"k = {k} exceeds the window cap of {HALFBALL_CAP}")
    top = p_sh_kfuzz(k).value
    n = k + 1
    mass = [Fraction(0)] * (1 << n)
    mass[-1] = top
    mass[0] = 1 - top
    return Dist(n, tuple(mass), RATIONAL)

