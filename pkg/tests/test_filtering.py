import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcp.core import Constraint, make_domains
from qcp.filtering import (
    INFEASIBLE,
    UNKNOWN,
    brute_force_dc,
    filter_alldifferent,
    filter_alldifferent_except0,
    filter_constraint,
    filter_gcc,
    filter_inverse,
)

from oracles import random_domains


def test_fig1_prunes_d2_from_x3_only():
    out = filter_alldifferent(make_domains([[1, 2], [1, 2], [2, 3, 4]]), (0, 1, 2))
    assert out.flag == UNKNOWN
    assert out.domains == ((1, 2), (1, 2), (3, 4))
    assert out.removed == {(2, 2)}


def test_example4_infeasible():
    assert filter_alldifferent(make_domains([[1, 2]] * 3), (0, 1, 2)).flag == INFEASIBLE
    c = Constraint("alldifferent", (0, 1, 2))
    assert brute_force_dc(make_domains([[1, 2]] * 3), c).flag == INFEASIBLE


def test_alldifferent_single_variable():
    doms = make_domains([[1, 5, 7]])
    out = filter_alldifferent(doms, (0,))
    assert out.domains == doms and out.flag == UNKNOWN


def test_except0_examples():
    out = filter_alldifferent_except0(make_domains([[0], [0]]), (0, 1))
    assert out.flag == UNKNOWN and out.domains == ((0,), (0,))
    out = filter_alldifferent_except0(make_domains([[1], [1], [0, 1]]), (0, 1, 2))
    assert out.flag == INFEASIBLE
    out = filter_alldifferent_except0(make_domains([[0, 1], [0, 1], [1]]), (0, 1, 2))
    assert out.domains == ((0,), (0,), (1,))


def test_gcc_examples():
    M, A = 1, 2
    out = filter_gcc(make_domains([[M, A]] * 3), (0, 1, 2), (M,), ((3, 3),))
    assert out.domains == ((M,),) * 3
    doms = make_domains([[1, 2, 3]] * 3)
    out = filter_gcc(doms, (0, 1, 2), (1, 2, 3), ((0, 3),) * 3)
    assert out.flag == UNKNOWN and out.domains == doms
    out = filter_gcc(make_domains([[1, 2]] * 2), (0, 1), (1,), ((3, 3),))
    assert out.flag == INFEASIBLE


def test_inverse_examples():
    # x1 = 2 forces y2 = 1, then x2 = 1 and y1 = 2
    doms = make_domains([[2], [1, 2], [1, 2], [1, 2]])
    out = filter_inverse(doms, (0, 1), (2, 3))
    assert out.domains == ((2,), (1,), (2,), (1,))
    full = make_domains([[1, 2, 3]] * 6)
    assert filter_inverse(full, (0, 1, 2), (3, 4, 5)).domains == full
    doms = make_domains([[2], [1, 2, 3], [1, 2, 3], [1, 2, 3], [3], [1, 2, 3]])
    assert filter_inverse(doms, (0, 1, 2), (3, 4, 5)).flag == INFEASIBLE


def test_brute_force_budget():
    doms = make_domains([range(40)] * 5)
    with pytest.raises(ValueError):
        brute_force_dc(doms, Constraint("alldifferent", (0, 1, 2, 3, 4)))


def test_brute_force_consistent_singletons_unchanged():
    doms = make_domains([[1], [2], [3]])
    assert brute_force_dc(doms, Constraint("alldifferent", (0, 1, 2))).domains == doms


def _random_constraint(rng, kind, nx):
    scope = tuple(range(nx))
    if kind == "inverse":
        half = nx // 2
        return Constraint("inverse", scope[:half], scope[half:2 * half])
    if kind == "gcc":
        values = tuple(sorted(rng.sample(range(1, 5), rng.randint(1, 3))))
        bounds = []
        for _ in values:
            lo = rng.randint(0, 2)
            bounds.append((lo, lo + rng.randint(0, 2)))
        return Constraint("gcc", scope, values=values, bounds=tuple(bounds))
    return Constraint(kind, scope)


@given(st.integers(0, 10**9), st.sampled_from(["alldifferent", "alldifferent_except_0",
                                               "inverse", "gcc"]))
def test_filters_sound_and_contracting(seed, kind):
    rng = random.Random(seed)
    nx = rng.randint(2, 6)
    lo = 1 if kind == "inverse" else 0
    c = _random_constraint(rng, kind, nx)
    nv = len(c.scope) if kind == "inverse" else rng.randint(1, 5)
    doms = random_domains(rng, nx, nv, lo=lo)
    got = filter_constraint(doms, c)
    want = brute_force_dc(doms, c)
    assert got.failed == want.failed
    if not got.failed:
        assert all(set(a) <= set(b) for a, b in zip(got.domains, doms))
        assert got.removed <= want.removed
        # filters are idempotent at their fixpoint
        assert filter_constraint(got.domains, c).domains == got.domains


@given(st.integers(0, 10**9))
def test_alldifferent_output_is_domain_consistent(seed):
    rng = random.Random(seed)
    nx = rng.randint(1, 6)
    doms = random_domains(rng, nx, rng.randint(1, 7))
    c = Constraint("alldifferent", tuple(range(nx)))
    out = filter_alldifferent(doms, c.scope)
    if not out.failed:
        assert brute_force_dc(out.domains, c).removed == frozenset()


@given(st.integers(0, 10**9))
def test_gcc_unit_bounds_match_alldifferent(seed):
    rng = random.Random(seed)
    nx = rng.randint(1, 5)
    doms = random_domains(rng, nx, rng.randint(nx, 6))
    values = tuple(sorted({v for d in doms for v in d}))
    gcc = filter_gcc(doms, tuple(range(nx)), values, ((0, 1),) * len(values))
    ad = filter_alldifferent(doms, tuple(range(nx)))
    assert gcc.failed == ad.failed
    if not ad.failed:
        assert gcc.removed == ad.removed


def test_binary_bounds_filtering():
    doms = make_domains([[1, 2, 3], [1, 2, 3]])
    out = filter_constraint(doms, Constraint("lt", (0, 1)))
    assert out.domains == ((1, 2), (2, 3))
    out = filter_constraint(make_domains([[2], [1, 2]]), Constraint("ne", (0, 1)))
    assert out.domains == ((2,), (1,))
