import math
from fractions import Fraction
from itertools import product as iproduct

import pytest

import oracles
from shearerlab.errors import CapExceeded, PreconditionError
from shearerlab.xi import xi_grid
from shearerlab.z2 import (
    GridShape,
    a_estimate,
    box_xi,
    density_rows,
    match_shape,
    ovoep_rows,
    shape_ovoep,
    spiral_factors,
    spiral_order,
    spiral_shapes,
    xi_log_density,
)

F = Fraction


def _brute_xi(cells, q):
    n, edges = oracles.grid_edges(sorted(cells))
    return oracles.xi(n, edges, [q] * n)


def test_shape_cells():
    s = GridShape(2, 1, 1)
    assert s.cells() == {(0, 0), (0, 1), (1, 0), (1, 1), (2, 0)}
    assert s.target == (2, 1) and s.target not in s.cells()
    assert GridShape(0, 0, 0).cells() == frozenset()
    with pytest.raises(PreconditionError):
        GridShape(-1, 0, 0)


def test_shape_ovoep_examples():
    assert shape_ovoep(GridShape(0, 0, 0), 0.9) == pytest.approx(0.9)
    s = GridShape(1, 1, 1)
    q = F(1, 10)
    expect = _brute_xi(s.cells() | {s.target}, q) / _brute_xi(s.cells(), q)
    assert shape_ovoep(s, F(9, 10), "rational") == expect


def test_shape_ovoep_monotone_and_bounded():
    caps = range(3)
    vals = {t: shape_ovoep(GridShape(*t), F(9, 10), "rational") for t in iproduct(caps, caps, caps)}
    for a, va in vals.items():
        assert F(1, 10) <= va <= F(9, 10)
        for b, vb in vals.items():
            if all(x <= y for x, y in zip(a, b)):
                assert va >= vb


def test_a_estimate():
    assert a_estimate(0.9, caps=(0, 0, 0)).value == pytest.approx(0.9)
    small, big = a_estimate(0.9, (3, 3, 3)), a_estimate(0.9, (4, 4, 4))
    assert big.value <= small.value
    assert big.value >= 0.1
    assert big.to_json()["kind"] == "UpperBound" and big.to_json()["caps"] == [4, 4, 4]
    assert shape_ovoep(GridShape(*big.argmin), 0.9) == big.value


def test_spiral_small_boxes():
    assert spiral_order(1) == [(0, 0)]
    assert spiral_order(2) == [(1, 1), (0, 1), (0, 0), (1, 0)]
    with pytest.raises(PreconditionError):
        spiral_order(0)


@pytest.mark.parametrize("N", range(1, 9))
def test_spiral_is_connected_permutation(N):
    order = spiral_order(N)
    assert sorted(order) == sorted(iproduct(range(N), range(N)))
    for i in range(1, len(order)):
        x, y = order[i]
        assert any(abs(x - a) + abs(y - b) == 1 for a, b in order[:i])


@pytest.mark.parametrize("N", range(1, 8))
def test_spiral_steps_are_shapes(N):
    for shape in spiral_shapes(N):
        assert max(shape.params) <= max(N - 1, 0)


def test_match_shape_under_symmetry():
    s = GridShape(2, 1, 2)
    cells = {(-y, x) for x, y in s.cells()}
    tx, ty = s.target
    assert match_shape(cells, (-ty, tx)) == s
    assert match_shape({(0, 0), (2, 0)}, (1, 0)) is None


def test_telescoping_rational():
    for N in range(1, 5):
        assert math.prod(spiral_factors(N, F(9, 10), "rational")) == box_xi(N, F(9, 10), "rational")


def test_spiral_factors_match_shape_ovoep():
    N = 4
    for shape, factor in zip(spiral_shapes(N), spiral_factors(N, F(9, 10), "rational")):
        assert factor == shape_ovoep(shape, F(9, 10), "rational")


def test_log_density_examples():
    assert xi_log_density(1, 0.9) == pytest.approx(math.log(0.9))
    assert xi_log_density(2, 0.9) == pytest.approx(math.log(0.62) / 4)
    assert box_xi(2, F(9, 10), "rational") == F(62, 100)
    with pytest.raises(CapExceeded):
        xi_log_density(13, 0.9)


def test_log_density_sandwich():
    for N in range(2, 9):
        val = xi_log_density(N, 0.9)
        factors = spiral_factors(N, 0.9)
        assert math.log(0.1) <= math.log(min(factors)) <= val <= math.log(max(factors)) <= math.log(0.9)


def test_grid_against_enumeration():
    q = F(1, 10)
    for s in [GridShape(n, k, l) for n, k, l in iproduct(range(4), range(3), range(3))]:
        cells = s.cells()
        if len(cells) <= 12:
            assert xi_grid(cells, F(9, 10), "rational") == _brute_xi(cells, q)


def test_csv_rows():
    rows = density_rows([1, 2], 0.9)
    assert rows[1][0] == 2 and rows[1][2] == pytest.approx(math.log(0.62) / 4)
    assert len(ovoep_rows((1, 1, 1), 0.9)) == 8
