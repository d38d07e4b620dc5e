#!/usr/bin/env python3
"""Bohr sets end to end: enumeration, size bounds, the approximate size
formula on weakly regular radii, large-spectrum certification, the
Bohr-sum identity and Bohr sets inside progressions."""

from fractions import Fraction

import bogolib as bg
from bogolib.bohr import (
    bohr_enumerate,
    bohr_in_progression,
    bohr_size_estimate,
    find_min_r,
    large_spectrum_certify,
    size_bounds,
    verify_bohr_sum,
    weak_regular_radius_search,
)
from bogolib.progressions import CosetProgression

g = bg.make_group([128])
gamma = g.dual.element([5])

# membership is the closed condition ||chi(x)|| <= rho, decided exactly
b = bohr_enumerate(g, [gamma], Fraction(1, 10))
print(f"|B(gamma; 1/10)| = {b.size} in Z/128")

sb = size_bounds(g, [gamma], Fraction(1, 10))
print(f"lower bound rho^k |G| = {float(sb.lower_bound):.1f} <= {sb.size}")
print(f"doubling: |B(2 rho)| = {sb.doubled_size} <= 4^k |B(rho)| = {sb.doubling_bound}")

# weak regularity: a radius whose eta-annulus is epsilon-thin; gamma = 5
# is invertible mod 128 so the annulus holds about 2 eta |G| points and
# eta must sit below eps / 2 for the grid search to succeed
eta, eps = Fraction(1, 40), Fraction(1, 10)
rho = weak_regular_radius_search(g, [gamma], Fraction(1, 8), Fraction(3, 8), eta, eps)
print(f"weakly regular radius: rho = {rho}")

# on weakly regular instances the annihilator-box formula pins the size
est = bohr_size_estimate(g, [gamma], rho, eta, eps)
true = bohr_enumerate(g, [gamma], rho).size
print(f"size formula: estimate {est:.2f} vs true {true} (tolerance {float(2 * eps * g.order):.0f})")

# every large Fourier coefficient of 1_B is a small combination of gamma
rep = large_spectrum_certify(g, [gamma], rho, eta, Fraction(3, 10), gamma)
print(f"certificate for gamma itself: coefficients {rep}")
rep2 = large_spectrum_certify(g, [gamma], rho, eta, Fraction(3, 10), 2 * gamma)
print(f"certificate for 2 gamma: {rep2}")

# B(<G1>_R cap <G2>_R; 1/4) lands inside B(G1; rho1) + B(G2; rho2)
g16 = bg.make_group([16])
chi = g16.dual.element([1])
r = find_min_r(g16, [chi], Fraction(1, 8), [chi], Fraction(1, 8))
print(f"Bohr-sum identity holds at R = {r}; "
      f"R = 0 control: {verify_bohr_sum(g16, [chi], Fraction(1, 8), [chi], Fraction(1, 8), 0)}")

# symmetric progressions contain certified Bohr sets
g64 = bg.make_group([64])
c = CosetProgression.symmetric(g64, [(g64.element([1]), 15)])
inner = bohr_in_progression(c)
print(f"[-15, 15] in Z/64 contains B of size {inner.enumerate().size}: "
      f"{sorted(int(i) for i in inner.enumerate().indices())}")
