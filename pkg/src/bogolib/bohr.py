"""Bohr sets: exact membership, size bounds, the approximate size formula,
large-spectrum certification, the Bohr-sum identity and Bohr sets inside
coset progressions.

Radii are exact rationals throughout; membership ``||chi(x)|| <= rho`` is a
closed condition decided without floating point.  Frequency sets are
deduplicated on construction (repeats would silently skew the size
formula's box exponent).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DensityShortfallError,
    GroupMismatchError,
    NoWeaklyRegularRadiusError,
    PreconditionError,
    TheoremViolationError,
)
from .fourier import GroupFunction, spectrum
from .groups import (
    Character,
    FiniteAbelianGroup,
    GroupElement,
    GroupSubset,
    annihilator_subgroup,
    bounded_span,
    subgroup_generators,
)
from .lattices import annihilator_points, span_cover
from .progressions import CosetProgression

_INT64_GUARD = 1 << 62


def _dedupe(frequencies: Sequence[Character]) -> tuple[Character, ...]:
    seen = set()
    out = []
    for chi in frequencies:
        if chi.coords not in seen:
            seen.add(chi.coords)
            out.append(chi)
    return tuple(out)


def bohr_mask(
    group: FiniteAbelianGroup,
    frequencies: Sequence[Character],
    radius: Fraction,
) -> np.ndarray:
    """Boolean membership mask of B(Gamma; rho) via exact comparisons."""
    radius = Fraction(radius)
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    e = group.exponent
    num, den = radius.numerator, radius.denominator
    mask = np.ones(group.order, dtype=bool)
    use_int64 = den * e < _INT64_GUARD and num * e < _INT64_GUARD
    for chi in frequencies:
        n = group.char_numerators(chi)
        dist_num = np.minimum(n, e - n)  # distance = dist_num / e
        if use_int64:
            mask &= dist_num * den <= num * e
        else:
            mask &= np.asarray(
                [int(v) * den <= num * e for v in dist_num], dtype=bool
            )
    return mask


@dataclass(frozen=True, eq=False)
class BohrSet:
    """B(Gamma; rho) = {x : ||chi(x)|| <= rho for all chi in Gamma}."""

    group: FiniteAbelianGroup
    frequencies: tuple[Character, ...]
    radius: Fraction

    def __post_init__(self):
        freqs = _dedupe(self.frequencies)
        for chi in freqs:
            if chi.group is not self.group.dual:
                raise GroupMismatchError("frequency outside the group's dual")
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "radius", Fraction(self.radius))

    @property
    def codimension(self) -> int:
        return len(self.frequencies)

    def contains(self, x: GroupElement) -> bool:
        from .groups import char_eval, torus_dist

        return all(torus_dist(char_eval(chi, x)) <= self.radius for chi in self.frequencies)

    @cached_property
    def _mask(self) -> np.ndarray:
        return bohr_mask(self.group, self.frequencies, self.radius)

    def enumerate(self) -> GroupSubset:
        return GroupSubset(self.group, self._mask)

    def with_radius(self, radius: Fraction) -> "BohrSet":
        return BohrSet(self.group, self.frequencies, Fraction(radius))


def bohr_enumerate(
    group: FiniteAbelianGroup,
    frequencies: Sequence[Character],
    radius: Fraction,
) -> GroupSubset:
    return BohrSet(group, tuple(frequencies), Fraction(radius)).enumerate()


@dataclass(frozen=True)
class SizeBounds:
    size: int
    lower_bound: Fraction  # rho^k |G|
    doubled_size: Optional[int]  # |B(2 rho)| when 2 rho <= 1/2
    doubling_bound: Optional[int]  # 4^k |B(rho)|


def size_bounds(
    group: FiniteAbelianGroup,
    frequencies: Sequence[Character],
    radius: Fraction,
) -> SizeBounds:
    """Check |B| >= rho^k |G| and |B(2 rho)| <= 4^k |B(rho)| by enumeration.

    Both inequalities are theorems; a failure raises, signalling a bug.
    """
    freqs = _dedupe(frequencies)
    radius = Fraction(radius)
    k = len(freqs)
    b = bohr_enumerate(group, freqs, radius)
    lower = radius**k * group.order
    if b.size < lower:
        raise TheoremViolationError(
            f"Bohr lower bound violated: |B| = {b.size} < {lower}"
        )
    doubled_size = doubling_bound = None
    if 2 * radius <= Fraction(1, 2):
        b2 = bohr_enumerate(group, freqs, 2 * radius)
        doubled_size = b2.size
        doubling_bound = 4**k * b.size
        if doubled_size > doubling_bound:
            raise TheoremViolationError(
                f"Bohr doubling bound violated: {doubled_size} > {doubling_bound}"
            )
    return SizeBounds(b.size, lower, doubled_size, doubling_bound)


def annulus_size(
    group: FiniteAbelianGroup,
    frequencies: Sequence[Character],
    radius: Fraction,
    eta: Fraction,
) -> int:
    """|B(Gamma; rho + eta) \\ B(Gamma; rho)|, exactly."""
    outer = bohr_mask(group, frequencies, Fraction(radius) + Fraction(eta))
    inner = bohr_mask(group, frequencies, Fraction(radius))
    return int(np.count_nonzero(outer & ~inner))


def is_weakly_regular(
    group: FiniteAbelianGroup,
    frequencies: Sequence[Character],
    radius: Fraction,
    eta: Fraction,
    epsilon: Fraction,
) -> bool:
    return annulus_size(group, frequencies, radius, eta) <= Fraction(epsilon) * group.order


def weak_regular_radius_search(
    group: FiniteAbelianGroup,
    frequencies: Sequence[Character],
    rho_lo: Fraction,
    rho_hi: Fraction,
    eta: Fraction,
    epsilon: Fraction,
) -> Fraction:
    """First grid radius whose (eta-)annulus holds at most epsilon |G| points.

    The grid is rho_lo + j (rho_hi - rho_lo)/ceil(2/epsilon); when eta is at
    most the grid step the annuli are disjoint, so pigeonhole guarantees a
    hit.  Raises when no grid point qualifies.
    """
    rho_lo, rho_hi = Fraction(rho_lo), Fraction(rho_hi)
    eta, epsilon = Fraction(eta), Fraction(epsilon)
    if not rho_lo < rho_hi:
        raise PreconditionError("need rho_lo < rho_hi")
    steps = math.ceil(2 / epsilon)
    step = (rho_hi - rho_lo) / steps
    freqs = _dedupe(frequencies)
    for j in range(steps + 1):
        rho = rho_lo + j * step
        if is_weakly_regular(group, freqs, rho, eta, epsilon):
            return rho
    raise NoWeaklyRegularRadiusError(
        "no weakly regular radius on grid; retry with a finer grid"
    )


def formula_coefficients(rho: Fraction, eta: Fraction, cutoff: int) -> np.ndarray:
    """Fourier coefficients c_a of the trapezoid cutoff, a in [-K, K].

    c_0 = 2 rho + eta (the integral); for a != 0,
    c_a = sin(2 pi a (rho + eta/2)) sin(pi a eta) / (pi^2 a^2 eta).
    Real, even and bounded by 1 in absolute value.
    """
    rho_f, eta_f = float(rho), float(eta)
    if 2 * rho_f + eta_f > 1 + 1e-12:
        raise PreconditionError("need 2 rho + eta <= 1 for coefficients in the disc")
    a = np.arange(-cutoff, cutoff + 1, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = (
            np.sin(2 * np.pi * a * (rho_f + eta_f / 2))
            * np.sin(np.pi * a * eta_f)
            / (np.pi**2 * a**2 * eta_f)
        )
    c[cutoff] = 2 * rho_f + eta_f
    return c


def size_formula_cutoff(k: int, eta: Fraction, epsilon: Fraction) -> int:
    """K = ceil(2 e k / (eta epsilon)) for the size formula."""
    return math.ceil(2 * math.e * k / float(Fraction(eta) * Fraction(epsilon)))


def spectrum_cutoff(k: int, eta: Fraction, epsilon: Fraction) -> int:
    """K = ceil(8 e k / (eta epsilon)) for large-spectrum certification."""
    return math.ceil(8 * math.e * k / float(Fraction(eta) * Fraction(epsilon)))


@dataclass(frozen=True)
class SizeFormulaParams:
    """Parameter bundle for the size formula: cutoff and coefficients.

    Coefficients are real, even, and sit in the unit disc; ``c_0`` equals
    ``2 rho + eta``.
    """

    rho: Fraction
    eta: Fraction
    epsilon: Fraction
    cutoff: int
    coefficients: np.ndarray  # index a + cutoff, a in [-cutoff, cutoff]

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.float64)
        if c.shape != (2 * self.cutoff + 1,):
            raise ValueError("coefficient vector must cover [-K, K]")
        if np.any(np.abs(c) > 1 + 1e-9):
            raise TheoremViolationError("coefficients escaped the unit disc")
        if not np.allclose(c, c[::-1]):
            raise TheoremViolationError("coefficients must be even in a")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def for_size_formula(
        cls, k: int, rho: Fraction, eta: Fraction, epsilon: Fraction
    ) -> "SizeFormulaParams":
        cutoff = size_formula_cutoff(k, eta, epsilon)
        return cls(
            Fraction(rho), Fraction(eta), Fraction(epsilon), cutoff,
            formula_coefficients(rho, eta, cutoff),
        )

    @classmethod
    def for_spectrum(
        cls, k: int, rho: Fraction, eta: Fraction, epsilon: Fraction
    ) -> "SizeFormulaParams":
        cutoff = spectrum_cutoff(k, eta, epsilon)
        return cls(
            Fraction(rho), Fraction(eta), Fraction(epsilon), cutoff,
            formula_coefficients(rho, eta, cutoff),
        )


def bohr_size_estimate(
    group: FiniteAbelianGroup,
    frequencies: Sequence[Character],
    rho: Fraction,
    eta: Fraction,
    epsilon: Fraction,
) -> float:
    """Annihilator-box estimate of |B(Gamma; rho)|.

    Under weak regularity of (Gamma, rho, eta, epsilon) the error is at
    most 2 epsilon |G|; that bound is asserted by the callers/tests, never
    assumed here.
    """
    freqs = _dedupe(frequencies)
    k = len(freqs)
    if k == 0:
        return float(group.order)
    if Fraction(rho) + Fraction(eta) > Fraction(1, 2):
        raise PreconditionError("size estimate needs rho + eta <= 1/2")
    params = SizeFormulaParams.for_size_formula(k, rho, eta, epsilon)
    pts = annihilator_points(list(freqs), params.cutoff)
    if pts.shape[0] == 0:
        return 0.0
    prods = np.prod(params.coefficients[pts + params.cutoff], axis=1)
    return float(prods.sum() * group.order)


def large_spectrum_certify(
    group: FiniteAbelianGroup,
    frequencies: Sequence[Character],
    rho: Fraction,
    eta: Fraction,
    epsilon: Fraction,
    chi: Character,
    *,
    box_cap: int = 1 << 24,
) -> Optional[tuple[int, ...]]:
    """Representation chi = sum a_i gamma_i with |a_i| <= K, or None.

    The search over the coefficient box is exhaustive (meet in the middle),
    so under the large-coefficient hypothesis of the certification theorem
    a representation is always found.
    """
    freqs = _dedupe(frequencies)
    k = len(freqs)
    dual = group.dual
    if chi.group is not dual:
        raise GroupMismatchError("chi must live in the dual group")
    if k == 0:
        return () if chi.is_zero else None
    cutoff = spectrum_cutoff(k, eta, epsilon)
    width = 2 * cutoff + 1
    from .lattices import _box_value_indices, _decode_box_positions

    half = k // 2 if width**k > box_cap else k
    if half == 0:
        half = k
    left, right = freqs[:half], freqs[half:]
    if width ** max(half, k - half) > box_cap:
        raise PreconditionError("spectrum certification box exceeds ceiling")
    left_vals = _box_value_indices(dual, list(left), cutoff)
    first_pos = np.full(dual.order, -1, dtype=np.int64)
    first_pos[left_vals[::-1]] = np.arange(left_vals.size - 1, -1, -1, dtype=np.int64)
    if right:
        right_vals = _box_value_indices(dual, list(right), cutoff)
        # need left + right = chi  =>  left = chi - right
        targets = dual.add_indices(
            np.full(right_vals.size, chi.index, dtype=np.int64),
            dual.negation_permutation[right_vals],
        )
        found = first_pos[targets]
        hits = np.flatnonzero(found >= 0)
        if hits.size == 0:
            return None
        rpos = int(hits[0])
        lpos = int(found[rpos])
        lcoef = _decode_box_positions(np.asarray([lpos]), len(left), cutoff)[0]
        rcoef = _decode_box_positions(np.asarray([rpos]), len(right), cutoff)[0]
        raw = [int(v) for v in np.concatenate([lcoef, rcoef])]
    else:
        pos = int(first_pos[chi.index])
        if pos < 0:
            return None
        raw = [int(v) for v in _decode_box_positions(np.asarray([pos]), k, cutoff)[0]]
    # canonicalize each coefficient to the balanced residue mod the
    # character order; the combination is unchanged and stays in the box
    out = []
    for a, gamma in zip(raw, freqs):
        ordg = gamma.order
        bal = ((a + ordg // 2) % ordg) - ordg // 2
        out.append(bal if abs(bal) <= cutoff else a)
    return tuple(out)


def verify_bohr_sum(
    group: FiniteAbelianGroup,
    freqs1: Sequence[Character],
    rho1: Fraction,
    freqs2: Sequence[Character],
    rho2: Fraction,
    span_radius: int,
) -> bool:
    """Containment B(<G1>_R cap <G2>_R; 1/4) subseteq B(G1; rho1) + B(G2; rho2)."""
    dual = group.dual
    span1 = bounded_span(dual, list(freqs1), span_radius)
    span2 = bounded_span(dual, list(freqs2), span_radius)
    inter = span1 & span2
    lhs = bohr_mask(group, list(inter.elements()), Fraction(1, 4))
    rhs = bohr_enumerate(group, freqs1, rho1) + bohr_enumerate(group, freqs2, rho2)
    return not np.any(lhs & ~rhs.mask)


def find_min_r(
    group: FiniteAbelianGroup,
    freqs1: Sequence[Character],
    rho1: Fraction,
    freqs2: Sequence[Character],
    rho2: Fraction,
) -> int:
    """Smallest power-of-two span radius making the Bohr-sum containment hold.

    Doubles R instead of scanning linearly; spans stabilize by R = exponent,
    where the containment is a theorem, so failure past that point raises.
    """
    r = 1
    cap = group.dual.exponent
    while True:
        if verify_bohr_sum(group, freqs1, rho1, freqs2, rho2, r):
            return r
        if r >= cap:
            raise TheoremViolationError("Bohr-sum containment failed at stabilized span")
        r = min(2 * r, cap)


def dense_difference_cover(
    subset: GroupSubset,
    frequencies: Sequence[Character],
    radius: Fraction,
) -> bool:
    """A - A covers B(Gamma; rho/2) for dense A inside B(Gamma; rho).

    Requires |A| >= (1 - 4^(-k-1)) |B|; under that hypothesis the covering
    is a theorem, so a containment failure raises.
    """
    freqs = _dedupe(frequencies)
    radius = Fraction(radius)
    k = len(freqs)
    b = bohr_enumerate(subset.group, freqs, radius)
    if not subset.is_subset_of(b):
        raise PreconditionError("A must be contained in the Bohr set")
    required = (1 - Fraction(1, 4 ** (k + 1))) * b.size
    if subset.size < required:
        raise DensityShortfallError(
            "density below the covering hypothesis", required, subset.size
        )
    diff = subset.diffset(subset)
    half = bohr_enumerate(subset.group, freqs, radius / 2)
    if not half.is_subset_of(diff):
        raise TheoremViolationError("dense difference cover failed")
    return True


def bohr_in_progression(
    progression: CosetProgression,
    *,
    frequency_cap: int = 64,
    shrink_grid: Sequence[int] = (4, 6, 8, 12, 16, 24, 32),
) -> BohrSet:
    """Bohr set contained in a symmetric coset progression, verified.

    Construction: shrink the progression by an even factor d, take the
    large spectrum of the shrunk copy at threshold ``delta^(1+1/(d-2))/2``
    and use radius 1/4; the d-fold positivity argument puts the Bohr set
    back inside the progression, and the containment is checked directly.
    When the spectrum is large it is compressed through a greedy spanning
    subset at radius ``1/(4 l S)`` instead of an external cover theorem.
    Fallbacks: the annihilator of the subgroup part, then the full dual
    (which pins {0}).
    """
    if not progression.is_symmetric:
        raise PreconditionError("progression must be symmetric")
    group = progression.group
    dual = group.dual
    target = progression.enumerate()
    exponent = group.exponent
    pin_radius = Fraction(1, 4 * exponent)

    candidates: list[BohrSet] = []
    for d in shrink_grid:
        arms = [
            (arm.generator, arm.hi // d)
            for arm in progression.arms
            if arm.hi // d >= 1
        ]
        shrunk = CosetProgression(
            group,
            group.zero,
            tuple(
                CosetProgression.Arm(gen, -half, half) for gen, half in arms
            ),
            progression.subgroup,
        )
        qmask = shrunk.enumerate()
        if qmask.size <= 1:
            continue  # the pinning fallback handles the degenerate case
        delta = Fraction(qmask.size, group.order)
        threshold = float(delta) ** (1 + 1 / (d - 2)) / 2
        freqs = spectrum(GroupFunction.indicator(qmask), threshold)
        if len(freqs) > frequency_cap:
            cover = span_cover(dual, freqs, freqs, 1)
            ell = len(cover.generators)
            cand = BohrSet(
                group,
                tuple(cover.generators),
                Fraction(1, 4 * ell * cover.coefficient_bound),
            )
        else:
            cand = BohrSet(group, tuple(freqs), Fraction(1, 4))
        if cand.enumerate().is_subset_of(target):
            candidates.append(cand)
            break
    ann = subgroup_generators(annihilator_subgroup(progression.subgroup))
    cand = BohrSet(group, tuple(ann), pin_radius)
    if cand.enumerate().is_subset_of(target):
        candidates.append(cand)
    basis = [
        dual.element(tuple(1 if j == i else 0 for j in range(dual.rank)))
        for i in range(dual.rank)
    ]
    candidates.append(BohrSet(group, tuple(basis), pin_radius))
    best = max(candidates, key=lambda b: b.enumerate().size)
    if not best.enumerate().is_subset_of(target):
        raise TheoremViolationError("fallback Bohr set escaped the progression")
    return best
