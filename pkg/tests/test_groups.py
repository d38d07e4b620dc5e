"""Group core: exact arithmetic, spans, bases, subsets."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import bogolib as bg
from bogolib.groups import (
    GroupSubset,
    annihilator_subgroup,
    is_subgroup,
    subgroup_generated,
    subgroup_generators,
)


def test_make_group_basics():
    g = bg.make_group([4, 2])
    assert g.order == 8
    assert bg.make_group([1]).order == 1
    g6 = bg.make_group([2, 3])
    assert g6.order == 6 and g6.exponent == 6


def test_make_group_ceiling():
    with pytest.raises(bg.GroupTooLargeError):
        bg.make_group([1 << 13, 1 << 13])


def test_index_encoding_roundtrip():
    g = bg.make_group([4, 3, 2])
    for i in range(g.order):
        assert g.element_from_index(i).index == i
    # factor 0 fastest-varying
    assert g.element_from_index(1).coords == (1, 0, 0)
    assert g.element_from_index(4).coords == (0, 1, 0)


def test_char_eval_examples():
    g4 = bg.make_group([4])
    assert bg.char_eval(g4.dual.element([1]), g4.element([1])) == Fraction(1, 4)
    assert bg.char_eval(g4.dual.element([0]), g4.element([3])) == 0
    g = bg.make_group([2, 3])
    assert bg.char_eval(g.dual.element([1, 1]), g.element([1, 2])) == Fraction(1, 6)


def test_char_eval_group_mismatch():
    g4 = bg.make_group([4])
    other = bg.make_group([4])
    with pytest.raises(bg.GroupMismatchError):
        bg.char_eval(other.dual.element([1]), g4.element([1]))


def test_torus_dist():
    assert bg.torus_dist(Fraction(0)) == 0
    assert bg.torus_dist(Fraction(3, 4)) == Fraction(1, 4)
    assert bg.torus_dist(Fraction(1, 2)) == Fraction(1, 2)


@given(
    st.integers(2, 12),
    st.integers(0, 1000),
    st.integers(0, 1000),
)
@settings(max_examples=100, deadline=None)
def test_char_additivity(q, a, b):
    g = bg.make_group([q, 3])
    x = g.element([a, a])
    y = g.element([b, b + 1])
    chi = g.dual.element([a % q, b % 3])
    left = bg.char_eval(chi, x + y)
    right = (bg.char_eval(chi, x) + bg.char_eval(chi, y)) % 1
    assert left == right


@given(st.fractions(0, 1), st.fractions(0, 1))
@settings(max_examples=100, deadline=None)
def test_torus_dist_triangle(s, t):
    assert bg.torus_dist(s + t) <= bg.torus_dist(s) + bg.torus_dist(t)


def test_bounded_span_examples():
    g8 = bg.make_group([8])
    assert sorted(bg.bounded_span(g8, [], 3).indices()) == [0]
    assert sorted(bg.bounded_span(g8, [g8.element([2])], 1).indices()) == [0, 2, 6]
    g4 = bg.make_group([4])
    assert bg.bounded_span(g4, [g4.element([1])], 2).size == 4


def test_bounded_span_monotone_and_symmetric():
    g = bg.make_group([5, 4])
    gens = [g.element([1, 2]), g.element([3, 1])]
    prev = bg.bounded_span(g, gens, 0)
    for r in range(1, 4):
        cur = bg.bounded_span(g, gens, r)
        assert prev.is_subset_of(cur)
        assert cur == cur.negate()
        prev = cur
    flipped = bg.bounded_span(g, [-gens[0], gens[1]], 2)
    assert flipped == bg.bounded_span(g, gens, 2)


def test_invariant_factors_examples():
    g = bg.make_group([2, 3])
    factors, basis = bg.invariant_factors(g)
    assert factors == [6]
    assert basis[0].coords == (1, 1)
    assert bg.invariant_factors(bg.make_group([4]))[0] == [4]
    assert bg.invariant_factors(bg.make_group([2, 2]))[0] == [2, 2]


@pytest.mark.parametrize("moduli", [[2, 3], [4], [2, 2], [12, 18], [8, 4, 6], [1, 5]])
def test_invariant_factors_are_a_basis(moduli):
    g = bg.make_group(moduli)
    factors, basis = bg.invariant_factors(g)
    for a, b in zip(factors, factors[1:]):
        assert b % a == 0
    assert np.prod([1] + factors) == g.order
    assert [x.order for x in basis] == factors
    assert bg.is_basis(g, basis)


def test_is_basis_examples():
    g4 = bg.make_group([4])
    assert bg.is_basis(g4, [g4.element([1])])
    assert not bg.is_basis(g4, [g4.element([2])])
    g22 = bg.make_group([2, 2])
    assert bg.is_basis(g22, [g22.element([1, 0]), g22.element([1, 1])])


def test_basis_reexpression_bijection():
    g = bg.make_group([4, 6])
    factors, basis = bg.invariant_factors(g)
    seen = set()
    ranges = [range(n) for n in factors]
    import itertools

    for coeffs in itertools.product(*ranges):
        x = g.zero
        for c, b in zip(coeffs, basis):
            x = x + c * b
        seen.add(x.index)
    assert len(seen) == g.order


def test_subset_algebra():
    g = bg.make_group([6])
    a = GroupSubset.from_indices(g, [0, 1, 2])
    b = GroupSubset.from_indices(g, [2, 3])
    assert sorted((a | b).indices()) == [0, 1, 2, 3]
    assert sorted((a & b).indices()) == [2]
    assert sorted(a.setminus(b).indices()) == [0, 1]
    assert sorted((a + g.element([2])).indices()) == [2, 3, 4]
    assert sorted(a.negate().indices()) == [0, 4, 5]
    assert sorted((a + b).indices()) == [2, 3, 4, 5]
    assert sorted((a - b).indices()) == [0, 3, 4, 5]


def test_sumset_matches_bruteforce():
    rng = np.random.default_rng(5)
    for _ in range(20):
        g = bg.make_group([int(rng.integers(2, 7)), int(rng.integers(2, 7))])
        a_idx = rng.choice(g.order, size=rng.integers(1, g.order), replace=False)
        b_idx = rng.choice(g.order, size=rng.integers(1, g.order), replace=False)
        a = GroupSubset.from_indices(g, a_idx)
        b = GroupSubset.from_indices(g, b_idx)
        expect = set()
        for i in a_idx:
            for j in b_idx:
                expect.add(
                    (g.element_from_index(int(i)) + g.element_from_index(int(j))).index
                )
        assert set(int(v) for v in (a + b).indices()) == expect


def test_subgroup_helpers():
    g = bg.make_group([8])
    evens = subgroup_generated(g, [g.element([2])])
    assert sorted(evens.indices()) == [0, 2, 4, 6]
    assert is_subgroup(evens)
    assert not is_subgroup(GroupSubset.from_indices(g, [0, 2, 4]))
    gens = subgroup_generators(evens)
    assert subgroup_generated(g, gens) == evens
    ann = annihilator_subgroup(evens)
    assert sorted(ann.indices()) == [0, 4]


def test_parse_group_spec():
    assert bg.parse_group_spec("Z4xZ2") == [4, 2]
    assert bg.parse_group_spec("Z1") == [1]
    assert bg.parse_group_spec(" Z4 x Z2 x Z9 ") == [4, 2, 9]
    with pytest.raises(bg.GroupSpecSyntaxError):
        bg.parse_group_spec("Z0")
    with pytest.raises(bg.GroupSpecSyntaxError):
        bg.parse_group_spec("4xZ2")
    with pytest.raises(bg.GroupSpecSyntaxError):
        bg.parse_group_spec("Z4yZ2")
    with pytest.raises(bg.GroupSpecSyntaxError):
        bg.parse_group_spec("")
