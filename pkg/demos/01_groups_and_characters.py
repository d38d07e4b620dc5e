#!/usr/bin/env python3
"""Exact arithmetic in finite abelian groups: elements, characters, spans.

Everything here is exact: character values are rationals over the group
exponent and Bohr-style comparisons never touch floating point.
"""

from fractions import Fraction

import bogolib as bg

# A group is a product of cyclic factors; the dual carries the same moduli.
g = bg.make_group([4, 6])
print(f"G = {g!r}, order {g.order}, exponent {g.exponent}")

x = g.element([1, 2])
y = g.element([3, 5])
print(f"x + y = {(x + y).coords},  3x = {(3 * x).coords},  ord(x) = {x.order}")

# Characters are elements of the dual; pairing is an exact fraction in [0, 1).
chi = g.dual.element([2, 3])
value = bg.char_eval(chi, x)
print(f"chi(x) = {value}  distance to 0: {bg.torus_dist(value)}")

# chi(x + y) = chi(x) + chi(y) exactly, as rationals mod 1
lhs = bg.char_eval(chi, x + y)
rhs = (bg.char_eval(chi, x) + bg.char_eval(chi, y)) % 1
assert lhs == rhs
print(f"additivity: chi(x+y) = {lhs} = chi(x) + chi(y) mod 1")

# Bounded spans <g_1, ..., g_k>_R enumerate all small integer combinations.
g8 = bg.make_group([8])
span = bg.bounded_span(g8, [g8.element([2])], 1)
print(f"<2>_1 in Z/8 = {sorted(int(i) for i in span.indices())}")

# Invariant factors give a canonical basis with divisibility n_1 | n_2 | ...
g_mixed = bg.make_group([12, 18])
factors, basis = bg.invariant_factors(g_mixed)
print(f"Z12 x Z18 ~ {' | '.join(map(str, factors))}")
print(f"basis: {[b.coords for b in basis]}, is_basis: {bg.is_basis(g_mixed, basis)}")

# Dense subsets support exact sumset/difference-set algebra via FFT counts.
from bogolib.groups import GroupSubset

a = GroupSubset.from_indices(g8, [0, 1, 3])
print(f"A = {sorted(int(i) for i in a.indices())}")
print(f"A + A = {sorted(int(i) for i in (a + a).indices())}")
print(f"A - A = {sorted(int(i) for i in (a - a).indices())}")
