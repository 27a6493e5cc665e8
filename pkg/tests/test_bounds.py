import math
from fractions import Fraction

import pytest

from shearerlab.bounds import (
    FIXED_POINT,
    UNIFORM,
    closed_forms,
    fp_check,
    jump_lower,
    kfuzz_halfball_brf,
    kfuzz_jump_upper,
    lll_check,
    lss_kfuzz,
    lss_lower,
    p_sh_kfuzz,
    p_sh_tree,
    thm2_vector,
    zd_lower,
)
from shearerlab.domination import dominated_value, strassen_dominates
from shearerlab.errors import OutsideRegion, PreconditionError
from shearerlab.graph import build_graph, complete, cycle, path
from shearerlab.measure import INTERIOR, construct_measure, membership, product
from shearerlab.numeric import root_bracket

F = Fraction


def test_thm2_finite_k2():
    c = thm2_vector(path(2), 0.75)
    assert c == pytest.approx((1 - math.sqrt(0.5),) * 2)


def test_thm2_marked_path():
    q = 0.2
    c = thm2_vector(path(6), 1 - q, infinite_markers=1)
    assert c == pytest.approx((q * q,) * 6)


def test_thm2_unit_entries_split_components():
    g = path(3)
    c = thm2_vector(g, [F(9, 10), 1, F(4, 5)], backend="rational")
    assert c[1] == 1
    assert c[0] == F(9, 10) and c[2] == F(4, 5)


def test_thm2_exact_root():
    g = path(2)
    p = F(5, 6)  # Xi = 1 - 2/6 = 2/3, 1 - Xi = 1/3, irrational root
    assert isinstance(thm2_vector(g, p, backend="rational")[0], float)
    p = F(7, 8)  # Xi = 3/4, 1 - Xi = 1/4, root 1/2
    assert thm2_vector(g, p, backend="rational") == (F(1, 2), F(1, 2))


def test_thm2_rejects_outside():
    with pytest.raises(OutsideRegion):
        thm2_vector(complete(3), 0.6)
    with pytest.raises(PreconditionError):
        thm2_vector(build_graph(2, []), 0.5, infinite_markers=1)


def test_thm2_continuity_at_boundary():
    g = cycle(4)
    q_star = 1 - 1 / math.sqrt(2)
    for eps in (1e-2, 1e-4, 1e-6):
        p = 1 - q_star + eps
        c = thm2_vector(g, p)[0]
        xi = construct_measure(g, p).mass[-1]
        assert c <= xi  # 1 - (1 - x)^(1/n) <= x
    assert thm2_vector(g, 1 - q_star + 1e-9)[0] < 1e-8


def test_thm2_dominated_by_shearer():
    for g in (path(3), cycle(4), complete(3)):
        for p in (F(17, 20), F(9, 10), F(19, 20)):
            c = thm2_vector(g, p, backend="rational")
            if not isinstance(c[0], Fraction):
                xi = construct_measure(g, p, "rational").mass[-1]
                lo, _ = root_bracket(1 - xi, g.n)
                c = [1 - lo] * g.n
            assert strassen_dominates(construct_measure(g, p, "rational"), product(c, backend="rational")).dominates


def test_lll_examples():
    g = path(9)
    assert lll_check(g, 4 / 27 - 0.001, search=UNIFORM).holds
    assert not lll_check(g, 4 / 27 + 0.01, search=UNIFORM).holds
    assert not lll_check(g, 4 / 27 + 0.01).holds
    ok, s, _ = lll_check(g, 0.0)
    assert ok and all(x == 0 for x in s)


def test_fp_examples():
    g = path(9)
    assert fp_check(g, 0.19).holds and not lll_check(g, 0.19).holds
    assert fp_check(g, 0.19, search=UNIFORM).holds
    assert not fp_check(g, 0.21, search=UNIFORM).holds


def test_supplied_weights():
    g = path(9)
    assert lll_check(g, 4 / 27, s=[0.5] * 9).holds
    assert fp_check(g, F(1, 5), s=[F(1)] * 9).holds
    assert not fp_check(g, F(1, 5) + F(1, 1000), s=[F(1)] * 9).holds
    assert not lll_check(g, 0.1, s=[0.0] * 9).holds
    with pytest.raises(PreconditionError):
        lll_check(g, 0.1, s=[-1.0] * 9)


def test_fp_uses_triangles():
    # the independent subsets of a triangle neighbourhood are only singletons
    tri = complete(3)
    q = 0.24
    assert fp_check(tri, q, search=UNIFORM).holds
    assert lll_check(tri, q, search=UNIFORM).holds is False


@pytest.mark.parametrize("g", [complete(4), cycle(5), path(9)])
@pytest.mark.parametrize("search", [FIXED_POINT, UNIFORM])
def test_condition_chain(g, search):
    for i in range(1, 80):
        q = i * 0.005
        lll = lll_check(g, q, search=search).holds
        fp = fp_check(g, q, search=search).holds
        if lll:
            assert fp
        if fp:
            assert membership(g, 1 - q).status == INTERIOR


def test_closed_form_values():
    assert p_sh_kfuzz(1).value == F(3, 4)
    assert p_sh_tree(3).value == zd_lower(2).value == 1 - F(4, 27)
    assert p_sh_tree(3).kind == "Exact" and zd_lower(2).kind == "LowerBound"
    for k in range(1, 7):
        assert lss_kfuzz(k, p_sh_kfuzz(k).value).value == F(k, (k + 1) ** 2) == jump_lower(k).value
    assert lss_lower(3, p_sh_tree(3).value).value == F(2, 3) * F(1, 3)
    assert kfuzz_jump_upper(1).value == pytest.approx(0.5 + 1 - 2**-0.5)


def test_closed_form_dispatch_and_errors():
    assert closed_forms("p_sh_kfuzz", k=1).value == F(3, 4)
    with pytest.raises(PreconditionError):
        closed_forms("nope", k=1)
    with pytest.raises(PreconditionError):
        closed_forms("lss_kfuzz", k=1)
    with pytest.raises(PreconditionError):
        p_sh_tree(1)
    with pytest.raises(PreconditionError):
        lss_kfuzz(1, 0.5)


def test_halfball_laws():
    d = kfuzz_halfball_brf(1)
    assert d.mass == (F(1, 4), 0, 0, F(3, 4))
    with pytest.raises(PreconditionError):
        kfuzz_halfball_brf(12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_halfball_dominated_value(k):
    sigma = dominated_value(kfuzz_halfball_brf(k))
    expect = 1 - k ** (k / (k + 1)) / (k + 1)
    assert float(sigma) == pytest.approx(expect, abs=1e-9)
    assert jump_lower(k).value <= sigma <= kfuzz_jump_upper(k).value


def test_halfball_value_below_upper_for_larger_k():
    for k in range(1, 9):
        assert 1 - k ** (k / (k + 1)) / (k + 1) <= kfuzz_jump_upper(k).value


def test_root_bracket():
    lo, hi = root_bracket(F(1, 2), 2)
    assert lo * lo <= F(1, 2) <= hi * hi and hi - lo <= F(1, 2**64)
    assert root_bracket(F(1, 4), 2) == (F(1, 2), F(1, 2))
