"""Critical function (independent-set polynomial at signed weights) and OVOEPs.

Three evaluation routes that must agree:

* ``xi_enumerate`` sums over explicitly enumerated independent sets;
* ``XiCache`` / ``xi_dc`` apply deletion-contraction
  ``Xi_G = Xi_{G-v} - q_v Xi_{G-N+(v)}`` with memoisation on bitmasks of
  the original graph;
* ``xi_grid`` runs a row-by-row transfer matrix on subsets of Z^2.
"""

from __future__ import annotations

import numpy as np

from .errors import CapExceeded, OutsideRegion, PreconditionError
from .graph import ENUM_CAP, Graph, as_params, check_cap, enumerate_independent_sets, members, popcount
from .numeric import RATIONAL, check_backend, coerce

GRID_COLUMN_CAP = 20


def xi_enumerate(g: Graph, w, cap: int = ENUM_CAP):
    """Sum over independent sets ``T`` of the product of ``w[v]`` for ``v`` in ``T``.

    With ``w = -q`` this is the critical function; with ``w = +s`` it is the
    quantity appearing in cluster-expansion conditions.
    """
    w = tuple(w)
    if len(w) != g.n:
        raise PreconditionError(f"weight vector has length {len(w)}, graph has {g.n} vertices")
    total = 0
    for t in enumerate_independent_sets(g, cap):
        term = 1
        for v in members(t):
            term = term * w[v]
        total = total + term
    return total


class XiCache:
    """Memo of ``Xi_{G[W]}(p)`` keyed by bitmasks ``W`` of the original graph.

    Reads are plain dict lookups and inserts go through ``setdefault``, so
    concurrent fillers at worst recompute an identical value.
    """

    def __init__(self, g: Graph, p, backend=None):
        self.g = g
        self.backend = check_backend(backend)
        self.p = as_params(p, g.n, self.backend)
        self.q = tuple(1 - x for x in self.p)
        self._one = coerce(1, self.backend)
        self._memo = {0: self._one}
        self._table = None

    def __len__(self):
        return len(self._memo) if self._table is None else len(self._table)

    def pivot(self, mask: int) -> int:
        """Highest degree inside ``mask``, lowest index on ties."""
        best, best_deg = -1, -1
        nbr = self.g.nbr
        for v in members(mask):
            d = popcount(nbr[v] & mask)
            if d > best_deg:
                best, best_deg = v, d
        return best

    def value(self, mask: int):
        hit = self._memo.get(mask)
        if hit is not None:
            return hit
        if self._table is not None:
            return self._table[mask]
        v = self.pivot(mask)
        val = self.value(mask & ~(1 << v)) - self.q[v] * self.value(mask & ~self.g.closed(v))
        return self._memo.setdefault(mask, val)

    def fill_all(self, cap: int = ENUM_CAP):
        """Tabulate Xi on every induced subgraph; returns the 2^n table.

        Block ``[2^j, 2^{j+1})`` follows from the lower half by the
        fundamental identity with pivot ``j``.
        """
        if self._table is not None:
            return self._table
        n = self.g.n
        check_cap(n, cap)
        dtype = object if self.backend == RATIONAL else float
        table = np.empty(1 << n, dtype=dtype)
        table[0] = self._one
        for j in range(n):
            size = 1 << j
            idx = np.arange(size, dtype=np.int64) & ((size - 1) & ~self.g.nbr[j])
            table[size:2 * size] = table[:size] - self.q[j] * table[idx]
        self._table = table
        return table

    def table(self):
        return self.fill_all()


def xi_dc(g: Graph, p=None, cache: XiCache | None = None, backend=None, cap: int = ENUM_CAP):
    """Xi_G(p) by memoised deletion-contraction."""
    check_cap(g.n, cap)
    if cache is None:
        if p is None:
            raise PreconditionError("xi_dc needs p or a cache")
        cache = XiCache(g, p, backend)
    return cache.value(g.full)


def ovoep(g: Graph, w: int, v: int, p=None, cache: XiCache | None = None, backend=None):
    """One-vertex open extension probability ``Xi_{G[W+v]} / Xi_{G[W]}``.

    Raises ``OutsideRegion`` when the denominator is not positive.
    """
    if w >> v & 1:
        raise PreconditionError(f"vertex {v} already lies in W")
    check_cap(popcount(w) + 1)
    if cache is None:
        cache = XiCache(g, p, backend)
    den = cache.value(w)
    if den <= 0:
        raise OutsideRegion(f"Xi on W={members(w)} is {den}, not positive", witness=w, value=den)
    return cache.value(w | (1 << v)) / den


def xi_grid(cells, p, backend=None):
    """Critical function of the subgraph of Z^2 induced by ``cells``.

    ``cells`` is an iterable of ``(x, y)`` pairs; ``p`` a scalar or a mapping
    from cell to parameter. Rows are swept one at a time; the state is the
    occupancy mask of the previous row, and a subset-sum transform gives
    all row-compatible predecessors at once.
    """
    backend = check_backend(backend)
    cells = list(dict.fromkeys((int(x), int(y)) for x, y in cells))
    one = coerce(1, backend)
    if not cells:
        return one
    x0 = min(c[0] for c in cells)
    y0 = min(c[1] for c in cells)
    width = max(c[0] for c in cells) - x0 + 1
    height = max(c[1] for c in cells) - y0 + 1
    transpose = width > height
    if transpose:
        width, height = height, width

    def local(c):
        x, y = c[0] - x0, c[1] - y0
        return (y, x) if transpose else (x, y)

    if width > GRID_COLUMN_CAP:
        raise CapExceeded(f"shape needs {width} columns, cap is {GRID_COLUMN_CAP}")

    if isinstance(p, dict):
        qmap = {local(c): 1 - coerce(p[c], backend) for c in cells}
    else:
        qv = 1 - coerce(p, backend)
        if not 0 <= qv <= 1:
            raise PreconditionError(f"parameter {p} outside [0, 1]")
        qmap = {local(c): qv for c in cells}

    rows = [0] * height
    for (x, y) in qmap:
        rows[y] |= 1 << x

    dtype = object if backend == RATIONAL else float
    size = 1 << width
    full = size - 1
    dp = np.zeros(size, dtype=dtype)
    dp[:] = coerce(0, backend)
    dp[0] = one
    for y, row in enumerate(rows):
        valid = _row_masks(row)
        weights = []
        for m in valid:
            wgt = one
            for x in members(m):
                wgt = wgt * -qmap[(x, y)]
            weights.append(wgt)
        acc = _subset_sums(dp, width)
        new = np.zeros(size, dtype=dtype)
        new[:] = coerce(0, backend)
        vidx = np.array(valid, dtype=np.int64)
        new[vidx] = np.array(weights, dtype=dtype) * acc[full ^ vidx]
        dp = new
    total = dp.sum()
    return total if backend == RATIONAL else float(total)


def _row_masks(row: int) -> list[int]:
    """Subsets of ``row`` with no two horizontally adjacent cells."""
    out = []

    def rec(rest, chosen):
        if not rest:
            out.append(chosen)
            return
        x = (rest & -rest).bit_length() - 1
        rest &= ~(1 << x)
        rec(rest, chosen)
        rec(rest & ~(1 << (x + 1)), chosen | (1 << x))

    rec(row, 0)
    return out


def _subset_sums(a, bits: int):
    out = a.copy()
    for b in range(bits):
        view = out.reshape(-1, 2, 1 << b)
        view[:, 1, :] += view[:, 0, :]
    return out
