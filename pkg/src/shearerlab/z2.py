"""Shearer critical function on boxes of Z^2 and its spiral factorisation.

A ``GridShape(n, k, l)`` is an ``n`` by ``k + l`` rectangle with a partial
column of height ``k`` attached on its right; the extension target is the
cell just above that column. Enumerating the N x N box in an outward
anticlockwise spiral makes every step (prefix, next cell) congruent to one
of these shapes, so the box value factors into shape OVOEPs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iproduct

from .errors import CapExceeded, OutsideRegion, PreconditionError
from .numeric import check_backend, coerce, fmt
from .xi import GRID_COLUMN_CAP, xi_grid

DENSITY_CAP = 12


@dataclass(frozen=True)
class GridShape:
    n: int
    k: int
    l: int

    def __post_init__(self):
        if min(self.n, self.k, self.l) < 0:
            raise PreconditionError(f"shape parameters must be non-negative, got {self.params}")

    @property
    def params(self) -> tuple[int, int, int]:
        return (self.n, self.k, self.l)

    @property
    def target(self) -> tuple[int, int]:
        return (self.n, self.k)

    def cells(self) -> frozenset:
        rect = {(x, y) for x in range(self.n) for y in range(self.k + self.l)}
        column = {(self.n, y) for y in range(self.k)}
        return frozenset(rect | column)


def shape_ovoep(shape: GridShape, p, backend=None):
    """Probability the target is open given the shape is open, under Shearer(p) on Z^2."""
    backend = check_backend(backend)
    cells = shape.cells()
    if min(shape.n + 1, shape.k + shape.l) > GRID_COLUMN_CAP:
        raise CapExceeded(f"shape {shape.params} exceeds the column cap of {GRID_COLUMN_CAP}")
    den = xi_grid(cells, p, backend)
    if den <= 0:
        raise OutsideRegion(f"critical function of shape {shape.params} is {den}", value=den)
    return xi_grid(cells | {shape.target}, p, backend) / den


@dataclass(frozen=True)
class AEstimate:
    value: object
    caps: tuple[int, int, int]
    argmin: tuple[int, int, int]

    def to_json(self) -> dict:
        return {"value": fmt(self.value), "caps": list(self.caps), "argmin": list(self.argmin), "kind": "UpperBound"}


def a_estimate(p, caps=(3, 3, 3), backend=None) -> AEstimate:
    """Minimum of ``shape_ovoep`` over all shapes with parameters up to ``caps``.

    Only an upper bound on the infimum over the whole family.
    """
    best, arg = None, None
    n_max, k_max, l_max = caps
    for n, k, l in iproduct(range(n_max + 1), range(k_max + 1), range(l_max + 1)):
        val = shape_ovoep(GridShape(n, k, l), p, backend)
        if best is None or val < best:
            best, arg = val, (n, k, l)
    return AEstimate(best, tuple(caps), arg)


_STEPS = ((-1, 0), (0, -1), (1, 0), (0, 1))


def spiral_order(N: int) -> list[tuple[int, int]]:
    """Cells of the N x N box spiralling out from the centre, first step west, anticlockwise.

    Cells outside the box are skipped.
    """
    if N < 1:
        raise PreconditionError("N must be at least 1")
    x = y = N // 2
    out = [(x, y)]
    leg, turn = 1, 0
    while len(out) < N * N:
        for _ in range(2):
            dx, dy = _STEPS[turn % 4]
            for _ in range(leg):
                x, y = x + dx, y + dy
                if 0 <= x < N and 0 <= y < N:
                    out.append((x, y))
            turn += 1
        leg += 1
    return out


_SYMMETRIES = (
    lambda x, y: (x, y), lambda x, y: (-x, y), lambda x, y: (x, -y), lambda x, y: (-x, -y),
    lambda x, y: (y, x), lambda x, y: (-y, x), lambda x, y: (y, -x), lambda x, y: (-y, -x),
)


def match_shape(cells, target) -> GridShape | None:
    """Shape congruent to ``(cells, target)`` under a symmetry of Z^2, or None."""
    cells = set(cells)
    if not cells:
        return GridShape(0, 0, 0)
    for sym in _SYMMETRIES:
        moved = [sym(*c) for c in cells]
        x0 = min(c[0] for c in moved)
        y0 = min(c[1] for c in moved)
        moved = frozenset((x - x0, y - y0) for x, y in moved)
        tx, ty = sym(*target)
        tx, ty = tx - x0, ty - y0
        if tx < 0 or ty < 0:
            continue
        n, k = tx, ty
        l = 0 if n == 0 else max(y for _, y in moved) + 1 - k
        if l < 0:
            continue
        shape = GridShape(n, k, l)
        if shape.cells() == moved:
            return shape
    return None


def spiral_shapes(N: int) -> list[GridShape]:
    """Shape of each step of the spiral enumeration of the N x N box."""
    order = spiral_order(N)
    out = []
    for i, v in enumerate(order):
        shape = match_shape(order[:i], v)
        if shape is None:
            raise PreconditionError(f"spiral step {i} at {v} matches no shape")
        out.append(shape)
    return out


def spiral_factors(N: int, p, backend=None) -> list:
    """OVOEP of each spiral step, computed directly on the box prefixes."""
    order = spiral_order(N)
    out = []
    prev = xi_grid([], p, backend)
    for i in range(len(order)):
        cur = xi_grid(order[: i + 1], p, backend)
        if prev <= 0:
            raise OutsideRegion(f"prefix of length {i} has critical function {prev}", value=prev)
        out.append(cur / prev)
        prev = cur
    return out


def box_xi(N: int, p, backend=None):
    if N < 1:
        raise PreconditionError("N must be at least 1")
    return xi_grid([(x, y) for y in range(N) for x in range(N)], p, backend)


def xi_log_density(N: int, p, backend=None) -> float:
    """``log Xi(N x N box) / N^2``."""
    if N > DENSITY_CAP:
        raise CapExceeded(f"N = {N} exceeds the box cap of {DENSITY_CAP}")
    val = box_xi(N, p, backend)
    if val <= 0:
        raise OutsideRegion(f"box critical function is {val}", value=val)
    return math.log(val) / (N * N)


def density_rows(Ns, p, backend=None) -> list[tuple]:
    backend = check_backend(backend)
    return [(N, fmt(coerce(p, backend)), xi_log_density(N, p, backend), backend) for N in Ns]


def ovoep_rows(caps, p, backend=None) -> list[tuple]:
    backend = check_backend(backend)
    rows = []
    for n, k, l in iproduct(*(range(c + 1) for c in caps)):
        val = shape_ovoep(GridShape(n, k, l), p, backend)
        rows.append((n, k, l, fmt(coerce(p, backend)), fmt(val), backend))
    return rows
