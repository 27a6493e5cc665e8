import math
import random
from fractions import Fraction

import pytest

import oracles
from shearerlab.bounds import thm2_vector
from shearerlab.errors import CapExceeded, MinorationViolated, PreconditionError
from shearerlab.graph import complete, cycle, path
from shearerlab.maxflow import FlowNetwork
from shearerlab.measure import Dist, and_with_product, construct_measure, or_with_product, product
from shearerlab.domination import (
    UpSet,
    conditional_oracle,
    counterexample,
    dominated_value,
    enumerate_upsets,
    min_composition,
    necessary_check,
    russo_sample,
    strassen_dominates,
    upset_dominates,
)

F = Fraction


def _rational(mass):
    return Dist(int(math.log2(len(mass))), tuple(F(m) for m in mass), "rational")


def test_maxflow_small_network():
    net = FlowNetwork(4)
    net.add_edge(0, 1, F(1, 2))
    net.add_edge(0, 2, F(1, 3))
    net.add_edge(1, 3, F(1, 4))
    net.add_edge(2, 3, 1)
    net.add_edge(1, 2, 1)
    assert net.max_flow(0, 3, F(0)) == F(5, 6)


def test_upset_counts_match_filter():
    assert [len(enumerate_upsets(n)) for n in range(5)] == [2, 3, 6, 20, 168]
    for n in range(4):
        assert sorted(enumerate_upsets(n)) == oracles.upsets_by_filter(n)
    assert all(UpSet(4, u).is_upset() for u in enumerate_upsets(4))


def test_upset_cap():
    with pytest.raises(CapExceeded):
        enumerate_upsets(5)


def test_strassen_examples():
    d = construct_measure(cycle(4), F(9, 10), "rational")
    res = strassen_dominates(d, d)
    assert res.dominates
    assert all(y == x for y, x, _ in res.plan.pairs)
    assert strassen_dominates(product(0.6, 2), product(0.5, 2)).dominates
    res = strassen_dominates(construct_measure(path(2), 0.5), product(0.3, 2))
    assert not res.dominates
    assert res.violating_upset.configs() == [3]
    assert res.deficit == pytest.approx(0.09)


def test_strassen_dimension_mismatch():
    with pytest.raises(PreconditionError):
        strassen_dominates(product(0.5, 2), product(0.5, 3))


def test_plan_marginals_and_order():
    rng = random.Random(2)
    for _ in range(20):
        x = _rational(_random_mass(rng, 8))
        y = or_with_product(x, [F(rng.randint(0, 4), 4) for _ in range(3)])
        res = strassen_dominates(y, x)
        assert res.dominates and res.plan.is_ordered()
        rows, cols = res.plan.row_sums(), res.plan.col_sums()
        assert all(rows.get(c, 0) == y.mass[c] for c in range(8))
        assert all(cols.get(c, 0) == x.mass[c] for c in range(8))


def _random_mass(rng, size):
    raw = [rng.randint(0, 6) for _ in range(size)]
    if not any(raw):
        raw[0] = 1
    tot = sum(raw)
    return [F(r, tot) for r in raw]


def test_violating_upset_certifies_failure():
    rng = random.Random(4)
    found = 0
    for _ in range(60):
        y = _rational(_random_mass(rng, 8))
        x = _rational(_random_mass(rng, 8))
        res = strassen_dominates(y, x)
        if not res.dominates:
            found += 1
            up = res.violating_upset
            assert up.is_upset()
            assert up.probability(x) - up.probability(y) == res.deficit > 0
    assert found > 10


def test_upset_oracle_examples():
    d = product(F(1, 2), 2, "rational")
    assert upset_dominates(d, d)
    assert not upset_dominates(product(0.7, 1), product(0.8, 1))
    with pytest.raises(CapExceeded):
        upset_dominates(product(0.5, 5), product(0.5, 5))


def test_oracles_agree_on_random_pairs():
    rng = random.Random(6)
    for _ in range(80):
        n = rng.randint(1, 4)
        x = _rational(_random_mass(rng, 1 << n))
        y = or_with_product(x, [F(rng.randint(0, 3), 3) for _ in range(n)]) if rng.random() < 0.5 else _rational(
            _random_mass(rng, 1 << n)
        )
        assert strassen_dominates(y, x).dominates == upset_dominates(y, x)


def test_float_mode_slack():
    y = product(0.5, 2)
    x = product(0.5 + 1e-12, 2)
    assert strassen_dominates(y, x).dominates
    assert not strassen_dominates(y, x, exact=True).dominates


def test_dominated_value_examples():
    assert dominated_value(product([0.3, 0.6, 0.9])) == pytest.approx(0.3, abs=1e-9)
    assert dominated_value(construct_measure(path(2), 0.5)) == 0
    assert float(dominated_value(construct_measure(path(2), 0.75))) == pytest.approx(math.sqrt(0.5), abs=1e-9)


def test_dominated_value_float_flow_close():
    d = construct_measure(path(2), 0.75)
    assert dominated_value(d, exact=False) == pytest.approx(math.sqrt(0.5), abs=1e-8)


def test_min_composition_examples():
    y = construct_measure(path(2), F(1, 2), "rational")
    assert min_composition(y, 1).mass == y.mass
    assert min_composition(y, 0).mass == (1, 0, 0, 0)
    z = min_composition(y, F(4, 5))
    assert z.mass[3] == 0 and z.marginals() == (F(2, 5), F(2, 5))


def test_monotonicity_under_thinning():
    rng = random.Random(9)
    for _ in range(6):
        g = cycle(rng.randint(3, 4))
        d = construct_measure(g, F(rng.randint(17, 19), 20), "rational")
        r = [F(rng.randint(1, 10), 10) for _ in range(g.n)]
        assert dominated_value(min_composition(d, r), tol=1e-6) <= dominated_value(d, tol=1e-6) + F(1, 10**6)


def test_and_or_sandwich():
    for g in (path(3), cycle(4), complete(3)):
        y = construct_measure(g, F(9, 10), "rational")
        c = [F(1, 3)] * g.n
        assert strassen_dominates(y, and_with_product(y, c)).dominates
        assert strassen_dominates(or_with_product(y, c), y).dominates


def test_counterexample_examples():
    ce = counterexample(path(2), (F(2, 5), F(2, 5)), "rational")
    assert ce.dist.mass[3] == 0 and ce.dist.marginals() == (F(2, 5), F(2, 5))
    assert [float(x) for x in ce.thinning] == pytest.approx([0.8, 0.8], abs=1e-12)
    ce = counterexample(path(2), (0.5, 0.5))
    assert ce.t == 0 and ce.thinning == (1.0, 1.0)
    ce = counterexample(complete(3), 0.6)
    assert ce.boundary[0] == pytest.approx(2 / 3, abs=1e-12)
    assert ce.thinning[0] == pytest.approx(0.9, abs=1e-12)
    assert dominated_value(ce.dist) == 0


def test_counterexample_rejects_interior():
    with pytest.raises(PreconditionError):
        counterexample(path(3), 0.9)


def test_necessary_check_examples():
    y = construct_measure(path(2), 0.5)
    assert necessary_check(y, product(0.2, 2)) == (False, True)
    d = construct_measure(cycle(4), 0.9)
    assert necessary_check(d, d) == (True, True)


def test_necessary_fail_implies_strassen_fail():
    rng = random.Random(12)
    for _ in range(60):
        n = rng.randint(1, 3)
        y = _rational(_random_mass(rng, 1 << n))
        x = _rational(_random_mass(rng, 1 << n))
        ones, zeros = necessary_check(y, x)
        if strassen_dominates(y, x).dominates:
            assert ones and zeros


def test_conditional_oracle_matches_law():
    d = construct_measure(path(3), F(4, 5), "rational")
    cond = conditional_oracle(d)
    assert cond(()) == F(4, 5)
    # after a zero the neighbour must be open
    assert cond((0,)) == 1
    p01 = d.prob_pattern(0b11, 0b01)
    assert cond((1, 0)) == d.prob_pattern(0b111, 0b101) / p01


def test_russo_degenerate_and_violation():
    pairs = russo_sample(lambda prefix: 0.5, [0.5] * 3, seed=1, count=200)
    assert all(z == x for z, x in pairs)
    with pytest.raises(MinorationViolated) as info:
        russo_sample(lambda prefix: 0.3 if len(prefix) == 1 else 0.9, [0.5, 0.5], seed=1, count=1)
    assert info.value.index == 1


def test_russo_on_shearer_path():
    g = path(3)
    d = construct_measure(g, 0.8)
    c = thm2_vector(g, 0.8)
    pairs = russo_sample(conditional_oracle(d), c, seed=5, count=100_000)
    assert all(z & x == x for z, x in pairs)
    for v in range(3):
        freq = sum(x >> v & 1 for _, x in pairs) / len(pairs)
        sigma = math.sqrt(c[v] * (1 - c[v]) / len(pairs))
        assert abs(freq - c[v]) < 3 * sigma


def test_russo_determinism():
    d = construct_measure(path(3), 0.8)
    a = russo_sample(conditional_oracle(d), [0.2] * 3, seed=3, count=50)
    b = russo_sample(conditional_oracle(d), [0.2] * 3, seed=3, count=50)
    assert a == b
