"""Coset progressions, Freiman homomorphisms and their refinements."""

from fractions import Fraction

import numpy as np
import pytest

import bogolib as bg
from bogolib.errors import PreconditionError
from bogolib.groups import GroupSubset, subgroup_generated
from bogolib.progressions import (
    Arm,
    CosetProgression,
    FreimanMap,
    change_basis,
    extract_subprogression,
    injectivity_partition,
    intersect_refine,
    is_freiman_homomorphism,
    is_freiman_subgroup,
    is_proper,
    partial_projectivity,
    popular_difference_progression,
    popular_difference_set,
    subgroup_basis,
)
from bogolib.rng import derive_rng


def interval(g, gen, lo, hi, base=0):
    return CosetProgression(
        g,
        g.element([base]),
        (Arm(g.element([gen]), lo, hi),),
        GroupSubset.from_indices(g, [0]),
    )


def test_is_proper_examples():
    g100 = bg.make_group([100])
    assert is_proper(interval(g100, 1, 0, 9))
    g10 = bg.make_group([10])
    assert not is_proper(interval(g10, 2, 0, 9))
    sub = subgroup_generated(g100, [g100.element([20])])
    assert is_proper(CosetProgression.from_subgroup(sub))


def test_enumeration_matches_formula():
    g = bg.make_group([12, 5])
    sub = subgroup_generated(g, [g.element([6, 0])])
    c = CosetProgression(
        g,
        g.element([1, 1]),
        (Arm(g.element([1, 0]), -2, 2), Arm(g.element([0, 1]), 0, 1)),
        sub,
    )
    assert c.formal_size == 5 * 2 * 2
    assert c.size == c.formal_size  # proper here
    coords = c.coordinates()
    assert len(coords) == c.size


def test_is_freiman_subgroup_examples():
    g = bg.make_group([100])
    b = bg.bounded_span(g, [g.element([1])], 4)
    assert is_freiman_subgroup(b, b)
    a = GroupSubset.from_indices(g, [0, 3])
    assert not is_freiman_subgroup(a, b)
    a_sym = GroupSubset.from_indices(g, [0, 3, 97])
    assert is_freiman_subgroup(a_sym, b)
    evens = GroupSubset.from_indices(g, [0, 2, 4, 96, 98])
    assert is_freiman_subgroup(evens, b)
    with pytest.raises(PreconditionError):
        is_freiman_subgroup(GroupSubset.from_indices(g, [50]), b)


def test_extract_subprogression_full_set():
    g = bg.make_group([50])
    c = CosetProgression.symmetric(g, [(g.element([1]), 10)])
    res = extract_subprogression(c.enumerate(), c, Fraction(1))
    assert all(ell <= 20 for ell in res.ells)
    assert res.progression.enumerate().is_subset_of(c.enumerate())


def test_extract_subprogression_evens():
    g = bg.make_group([100])
    c = CosetProgression.symmetric(g, [(g.element([1]), 10)])
    evens = GroupSubset.from_indices(
        g, [i for i in list(range(0, 11, 2)) + list(range(90, 100, 2))]
    )
    res = extract_subprogression(evens, c, Fraction(11, 21))
    assert res.ells == (2,)
    assert res.progression.arms[0].hi == 5  # M = floor(10 / 2)
    assert res.progression.enumerate().is_subset_of(evens)


def test_extract_subprogression_subgroup_only():
    g = bg.make_group([8])
    h = subgroup_generated(g, [g.element([2])])
    c = CosetProgression.from_subgroup(h)
    a = subgroup_generated(g, [g.element([4])])  # index 2 in h
    res = extract_subprogression(a, c, Fraction(1, 2))
    assert res.progression.subgroup == a


def test_change_basis_examples():
    g = bg.make_group([2, 4])
    _, basis = bg.invariant_factors(g)
    same = change_basis(g, basis, ("upper", 0, 1, 0))
    assert [b.coords for b in same] == [b.coords for b in basis]
    moved = change_basis(g, basis, ("upper", 0, 1, 1))
    assert bg.is_basis(g, moved)
    assert [b.order for b in moved] == [2, 4]
    with pytest.raises(PreconditionError):
        change_basis(g, basis, ("unit", 1, 2))  # gcd(2, 4) != 1


def test_change_basis_random_moves():
    rng = derive_rng(43)
    for moduli in ([4, 6], [8], [3, 9], [2, 2, 4]):
        g = bg.make_group(moduli)
        factors, basis = bg.invariant_factors(g)
        for _ in range(30):
            r = len(basis)
            kind = rng.choice(["upper", "lower", "unit"]) if r > 1 else "unit"
            if kind == "upper":
                i = int(rng.integers(0, r - 1))
                j = int(rng.integers(i + 1, r))
                move = ("upper", i, j, int(rng.integers(-3, 4)))
            elif kind == "lower":
                j = int(rng.integers(0, r - 1))
                i = int(rng.integers(j + 1, r))
                move = ("lower", i, j, int(rng.integers(-3, 4)))
            else:
                i = int(rng.integers(0, r))
                lam = 1 + 2 * int(rng.integers(0, 3))
                while np.gcd(lam, factors[i]) != 1:
                    lam += 2
                move = ("unit", i, lam)
            basis = change_basis(g, basis, move)  # validates internally
        assert [b.order for b in basis] == factors


def test_subgroup_basis():
    rng = derive_rng(47)
    for moduli in ([8], [4, 6], [2, 2, 9], [12, 10]):
        g = bg.make_group(moduli)
        for _ in range(5):
            gens = [
                g.element_from_index(int(rng.integers(0, g.order)))
                for _ in range(int(rng.integers(1, 3)))
            ]
            sub = subgroup_generated(g, gens)
            orders, basis = subgroup_basis(g, sub)
            assert int(np.prod([1] + orders)) == sub.size
            for a, b in zip(orders, orders[1:]):
                assert b % a == 0
            assert [x.order for x in basis] == orders
            assert subgroup_generated(g, basis) == sub


def test_partial_projectivity_trivial_kernel():
    g = bg.make_group([2])
    h = bg.make_group([4])
    k0 = GroupSubset.from_indices(h, [0])
    res = partial_projectivity(g, h, k0, lambda x: h.element([2 * x.coords[0]]), 2)
    assert res.progression.rank == 0
    assert res.progression.size == g.order


def test_partial_projectivity_z2_to_z4():
    g = bg.make_group([2])
    h = bg.make_group([4])
    k = GroupSubset.from_indices(h, [0, 2])
    res = partial_projectivity(g, h, k, lambda x: h.element([x.coords[0]]), 2)
    assert res.progression.size == 1
    assert res.lift.table[0].is_zero
    assert res.progression.size * k.size >= g.order
    assert 2 ** len(res.heavy_indices) <= k.size


def test_partial_projectivity_random():
    rng = derive_rng(53)
    done = 0
    while done < 10:
        g = bg.make_group([int(rng.integers(2, 9)), int(rng.integers(2, 5))])
        h = bg.make_group([int(rng.integers(2, 9)), int(rng.integers(2, 5))])
        kgen = h.element_from_index(int(rng.integers(0, h.order)))
        k = subgroup_generated(h, [kgen])
        if k.size > 8:
            continue
        orders, basis = bg.invariant_factors(g)
        reps = []
        for n in orders:
            cands = [
                e
                for e in h.elements()
                if (n * e) in k
            ]
            reps.append(cands[int(rng.integers(0, len(cands)))])
        lookup = {}
        import itertools

        for coeffs in itertools.product(*[range(n) for n in orders]):
            x = g.zero
            v = h.zero
            for c, b, r in zip(coeffs, basis, reps):
                x = x + c * b
                v = v + c * r
            lookup[x.index] = v
        res = partial_projectivity(g, h, k, lambda x: lookup[x.index], 2)
        assert is_freiman_homomorphism(res.lift, 2)
        done += 1


def test_injectivity_partition_projection():
    g = bg.make_group([4, 2])
    h = bg.make_group([4])
    sub = subgroup_generated(g, [g.element([0, 1])])
    c = CosetProgression(g, g.zero, (Arm(g.element([1, 0]), 0, 3),), sub)
    table = {i: h.element([g.element_from_index(i).coords[0]]) for i in range(8)}
    phi = FreimanMap(c, h, table, 2)
    res = injectivity_partition(phi, Fraction(1, 2))
    assert res.refinement.enumerate().is_subset_of(sub)
    assert 2**res.refinement.rank <= 2
    assert res.refinement.size >= Fraction(1, 4) * sub.size
    assert res.cell_count <= 8 * 1 * 2


def test_injectivity_partition_injective_map():
    g = bg.make_group([9])
    h = bg.make_group([9])
    c = interval(g, 1, 0, 8)
    table = {i: h.element([2 * i]) for i in range(9)}
    phi = FreimanMap(c, h, table, 2)
    res = injectivity_partition(phi, Fraction(1))
    assert res.cell_count >= 1


def test_popular_difference_examples():
    g8 = bg.make_group([8])
    h = subgroup_generated(g8, [g8.element([2])])
    pop = popular_difference_progression(h, Fraction(1))
    assert pop.enumerate() == h
    single = GroupSubset.from_indices(g8, [0])
    assert popular_difference_progression(single, Fraction(1)).size == 1
    g100 = bg.make_group([100])
    ap = GroupSubset.from_indices(g100, range(16))
    k = Fraction(ap.sumset(ap).size, ap.size)
    pop = popular_difference_progression(ap, k)
    assert pop.is_symmetric and pop.is_proper() and pop.size > 1


def test_popular_difference_threshold_direct():
    rng = derive_rng(59)
    from bogolib.fourier import quadruple_count_all

    for _ in range(10):
        g = bg.make_group([int(rng.integers(8, 40))])
        size = int(rng.integers(2, min(16, g.order)))
        a = GroupSubset.from_indices(g, rng.choice(g.order, size=size, replace=False))
        k = Fraction(a.sumset(a).size, a.size)
        pop = popular_difference_progression(a, k)
        counts = quadruple_count_all(a)
        thr = Fraction(a.size**3, 64) / k
        for idx in pop.enumerate().indices():
            assert counts[int(idx)] >= thr


def test_popular_difference_doubling_gate():
    g = bg.make_group([64])
    a = GroupSubset.from_indices(g, [0, 1, 5, 30])
    with pytest.raises(PreconditionError):
        popular_difference_progression(a, Fraction(1))


def test_intersect_refine_examples():
    g = bg.make_group([100])
    c1 = interval(g, 1, 0, 39)
    c2 = interval(g, 1, 0, 39, base=20)
    x12 = c1.enumerate() & c2.enumerate()
    res = intersect_refine([c1, c2], x12)
    inter = c1.enumerate() & c2.enumerate()
    assert res.progression.enumerate().is_subset_of(inter)
    assert res.overlap == (res.progression.enumerate() & x12).size
    solo = intersect_refine([c1], c1.enumerate())
    assert solo.overlap >= solo.progression.size
    with pytest.raises(PreconditionError):
        c3 = interval(g, 1, 0, 9, base=60)
        intersect_refine([c1, c3], GroupSubset.from_indices(g, [0]))


def test_freiman_map_verification():
    g = bg.make_group([16])
    h = bg.make_group([16])
    c = interval(g, 1, 0, 7)
    linear = FreimanMap(c, h, {i: h.element([3 * i]) for i in range(8)}, 2)
    assert is_freiman_homomorphism(linear, 2)
    broken_table = {i: h.element([3 * i]) for i in range(8)}
    broken_table[5] = h.element([1])
    broken = FreimanMap(c, h, broken_table, 2)
    assert not is_freiman_homomorphism(broken, 2)
