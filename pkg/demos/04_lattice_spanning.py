#!/usr/bin/env python3
"""Integer-lattice utilities: annihilator boxes behind the Bohr size
formula, exact span membership, bounded coefficients and the quantitative
spanning cover."""

import bogolib as bg
from bogolib.lattices import (
    annihilator_points,
    bounded_representation,
    chain_monitor,
    in_z_span,
    span_cover,
)

g = bg.make_group([12])

# all small integer relations sum lambda_i s_i = 0
pts = annihilator_points([g.element([4]), g.element([6])], 3)
print(f"annihilator box points of (4, 6) in Z/12, |a| <= 3:")
print(pts.tolist())

# exact Z-span membership (Hermite reduction, arbitrary precision)
print(f"(4,3) in span of (2,0),(0,3): {in_z_span([4, 3], [[2, 0], [0, 3]])}")
print(f"(3,)  in span of (2,):       {in_z_span([3], [[2]])}")

# coefficients stay controlled: |lambda| <= k! K1^(k+1) (K2 + r)
lam = bounded_representation([4, 3], [[2, 0], [0, 3]], 3, 4)
print(f"(4,3) = {lam[0]} * (2,0) + {lam[1]} * (0,3)")

# the spanning cover: any subset of a bounded span is covered by bounded
# combinations of boundedly many of its own elements
g100 = bg.make_group([100])
members = [g100.element([v]) for v in (2, 3, 7, 11, 25)]
cover = span_cover(g100, members, [g100.element([1])], 30)
print(
    f"cover of {{2,3,7,11,25}} inside <1>_30: generators "
    f"{[e.coords[0] for e in cover.generators]}, max coefficient {cover.coefficient_bound}"
)
print(f"generator count budget (chain monitor): {cover.budget}")
print(f"budget formula at k=4, K=5: {chain_monitor(4, 5)} steps")
