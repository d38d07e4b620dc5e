"""Finite abelian groups as explicit products of cyclic factors.

A group is ``Z/q_1 x ... x Z/q_d``; elements are coordinate tuples and are
also addressed by a mixed-radix index with factor 0 fastest-varying:

    index(x) = sum_i x_i * prod_{j<i} q_j

Every dense set representation in the library (:class:`GroupSubset`) is a
bit array over this index encoding.  The dual group carries the same
moduli; a character ``chi`` is an element of the dual and pairs with
``x`` as ``chi(x) = sum_i chi_i x_i / q_i  (mod 1)``, evaluated exactly
over the common denominator ``exponent(G)``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import (
    FeasibilityError,
    GroupMismatchError,
    GroupSpecSyntaxError,
    GroupTooLargeError,
)

DEFAULT_CEILING = 1 << 24


def group_order_ceiling() -> int:
    """Configured group-order ceiling; BOGO_CEILING overrides the default."""
    raw = os.environ.get("BOGO_CEILING")
    if raw is None:
        return DEFAULT_CEILING
    return int(raw)


class FiniteAbelianGroup:
    """Product of cyclic groups with a fixed index encoding and a dual."""

    def __init__(self, moduli: Sequence[int], _check_ceiling: bool = True):
        moduli = tuple(int(q) for q in moduli)
        if not moduli or any(q < 1 for q in moduli):
            raise ValueError("moduli must be a nonempty list of integers >= 1")
        order = math.prod(moduli)
        if _check_ceiling and order > group_order_ceiling():
            raise GroupTooLargeError(
                f"group too large: order {order} exceeds ceiling {group_order_ceiling()}"
            )
        self.moduli = moduli
        self.order = order
        self.exponent = math.lcm(*moduli)
        self._dual: Optional[FiniteAbelianGroup] = None
        self._is_dual = False
        # index(x) = sum x_i * _radix[i]
        radix = [1] * len(moduli)
        for i in range(1, len(moduli)):
            radix[i] = radix[i - 1] * moduli[i - 1]
        self._radix = tuple(radix)

    # -- identity-based equality: one group object per ambient group --

    def __repr__(self) -> str:
        body = "x".join(f"Z{q}" for q in self.moduli)
        return f"<dual {body}>" if self._is_dual else f"<{body}>"

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def dual(self) -> "FiniteAbelianGroup":
        if self._dual is None:
            d = FiniteAbelianGroup(self.moduli, _check_ceiling=False)
            d._dual = self
            d._is_dual = not self._is_dual
            self._dual = d
        return self._dual

    # -- elements ------------------------------------------------------

    @property
    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.rank)

    def element(self, coords: Sequence[int]) -> "GroupElement":
        if len(coords) != self.rank:
            raise ValueError("coordinate count does not match group rank")
        return GroupElement(
            self, tuple(int(c) % q for c, q in zip(coords, self.moduli))
        )

    def element_from_index(self, index: int) -> "GroupElement":
        index = int(index)
        if not 0 <= index < self.order:
            raise ValueError("element index out of range")
        coords = []
        for q in self.moduli:
            index, c = divmod(index, q)
            coords.append(c)
        return GroupElement(self, tuple(coords))

    def elements(self) -> Iterator["GroupElement"]:
        for i in range(self.order):
            yield self.element_from_index(i)

    # -- vectorized index arithmetic ------------------------------------

    @cached_property
    def coords_matrix(self) -> np.ndarray:
        """(order, rank) int64 matrix of coordinates for every index."""
        idx = np.arange(self.order, dtype=np.int64)
        cols = []
        for q in self.moduli:
            idx, c = np.divmod(idx, q)
            cols.append(c)
        return np.stack(cols, axis=1)

    def index_of_coords(self, coords: np.ndarray) -> np.ndarray:
        radix = np.asarray(self._radix, dtype=np.int64)
        return (np.asarray(coords, dtype=np.int64) % np.asarray(self.moduli)) @ radix

    def add_indices(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        ca = self.coords_matrix[np.asarray(a, dtype=np.int64)]
        cb = self.coords_matrix[np.asarray(b, dtype=np.int64)]
        return self.index_of_coords(ca + cb)

    @cached_property
    def negation_permutation(self) -> np.ndarray:
        q = np.asarray(self.moduli, dtype=np.int64)
        return self.index_of_coords((q - self.coords_matrix) % q)

    @cached_property
    def add_table(self) -> Optional[np.ndarray]:
        """Full |G| x |G| index addition table; None above 2048 elements."""
        if self.order > 2048:
            return None
        idx = np.arange(self.order, dtype=np.int64)
        return self.add_indices(
            np.repeat(idx, self.order), np.tile(idx, self.order)
        ).reshape(self.order, self.order)

    @property
    def tensor_shape(self) -> tuple[int, ...]:
        # C-order flattening of this shape reproduces the index encoding
        return tuple(reversed(self.moduli))

    def _roll_shifts(self, coords: Sequence[int]) -> tuple[int, ...]:
        return tuple(reversed([int(c) for c in coords]))

    def char_numerators(self, chi: "GroupElement") -> np.ndarray:
        """For each x (by index): numerator of chi(x) over denominator exponent."""
        if chi.group is not self.dual:
            raise GroupMismatchError("character does not belong to this group's dual")
        e = self.exponent
        w = np.asarray(
            [c * (e // q) for c, q in zip(chi.coords, self.moduli)], dtype=np.int64
        )
        return (self.coords_matrix @ w) % e


def make_group(moduli: Sequence[int], ceiling: Optional[int] = None) -> FiniteAbelianGroup:
    """Build the group ``Z/q_1 x ... x Z/q_d``; rejects orders over the ceiling."""
    moduli = tuple(int(q) for q in moduli)
    if not moduli or any(q < 1 for q in moduli):
        raise ValueError("moduli must be a nonempty list of integers >= 1")
    limit = group_order_ceiling() if ceiling is None else ceiling
    if math.prod(moduli) > limit:
        raise GroupTooLargeError(
            f"group too large: order {math.prod(moduli)} exceeds ceiling {limit}"
        )
    return FiniteAbelianGroup(moduli, _check_ceiling=False)


@dataclass(frozen=True)
class GroupElement:
    """Element of a :class:`FiniteAbelianGroup`, stored as reduced coordinates."""

    group: FiniteAbelianGroup
    coords: tuple[int, ...]

    def _check(self, other: "GroupElement") -> None:
        if self.group is not other.group:
            raise GroupMismatchError("elements belong to different groups")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return GroupElement(
            self.group,
            tuple((a + b) % q for a, b, q in zip(self.coords, other.coords, self.group.moduli)),
        )

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return GroupElement(
            self.group,
            tuple((a - b) % q for a, b, q in zip(self.coords, other.coords, self.group.moduli)),
        )

    def __neg__(self) -> "GroupElement":
        return GroupElement(
            self.group, tuple((-a) % q for a, q in zip(self.coords, self.group.moduli))
        )

    def __mul__(self, k: int) -> "GroupElement":
        return GroupElement(
            self.group, tuple((a * int(k)) % q for a, q in zip(self.coords, self.group.moduli))
        )

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, GroupElement)
            and self.group is other.group
            and self.coords == other.coords
        )

    def __hash__(self) -> int:
        return hash((id(self.group), self.coords))

    @property
    def index(self) -> int:
        return sum(c * r for c, r in zip(self.coords, self.group._radix))

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    @property
    def order(self) -> int:
        return math.lcm(*(q // math.gcd(q, c) for c, q in zip(self.coords, self.group.moduli)))


# Characters are elements of the dual group.
Character = GroupElement


def char_eval(chi: Character, x: GroupElement) -> Fraction:
    """Exact torus value chi(x) = sum_i chi_i x_i / q_i mod 1, in [0, 1)."""
    if chi.group is not x.group.dual:
        raise GroupMismatchError("character/element group mismatch")
    g = x.group
    e = g.exponent
    total = sum(
        (c * xi % q) * (e // q) for c, xi, q in zip(chi.coords, x.coords, g.moduli)
    )
    return Fraction(total % e, e)


def torus_dist(t: Fraction) -> Fraction:
    """Distance from a torus value to 0 + Z, in [0, 1/2]."""
    t = Fraction(t) % 1
    return min(t, 1 - t)


class GroupSubset:
    """Dense bit-indexed subset of a group; the universal set representation."""

    __slots__ = ("group", "mask")

    def __init__(self, group: FiniteAbelianGroup, mask: np.ndarray):
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (group.order,):
            raise ValueError("mask length must equal group order")
        mask.setflags(write=False)
        self.group = group
        self.mask = mask

    # -- constructors ---------------------------------------------------

    @classmethod
    def empty(cls, group: FiniteAbelianGroup) -> "GroupSubset":
        return cls(group, np.zeros(group.order, dtype=bool))

    @classmethod
    def full(cls, group: FiniteAbelianGroup) -> "GroupSubset":
        return cls(group, np.ones(group.order, dtype=bool))

    @classmethod
    def from_indices(cls, group: FiniteAbelianGroup, indices) -> "GroupSubset":
        mask = np.zeros(group.order, dtype=bool)
        idx = np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices, dtype=np.int64)
        if idx.size:
            mask[idx] = True
        return cls(group, mask)

    @classmethod
    def from_elements(cls, group: FiniteAbelianGroup, elements) -> "GroupSubset":
        return cls.from_indices(group, [e.index for e in elements])

    @classmethod
    def singleton(cls, x: GroupElement) -> "GroupSubset":
        return cls.from_indices(x.group, [x.index])

    # -- basic protocol --------------------------------------------------

    def _check(self, other: "GroupSubset") -> None:
        if self.group is not other.group:
            raise GroupMismatchError("subsets belong to different groups")

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    def __len__(self) -> int:
        return self.size

    def __contains__(self, x) -> bool:
        idx = x.index if isinstance(x, GroupElement) else int(x)
        return bool(self.mask[idx])

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, GroupSubset)
            and self.group is other.group
            and np.array_equal(self.mask, other.mask)
        )

    __hash__ = None  # mutable-adjacent value type; never used as a key

    def __repr__(self) -> str:
        return f"GroupSubset({self.group!r}, size={self.size})"

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def elements(self) -> Iterator[GroupElement]:
        for i in self.indices():
            yield self.group.element_from_index(int(i))

    def is_subset_of(self, other: "GroupSubset") -> bool:
        self._check(other)
        return not bool(np.any(self.mask & ~other.mask))

    # -- boolean algebra --------------------------------------------------

    def __or__(self, other: "GroupSubset") -> "GroupSubset":
        self._check(other)
        return GroupSubset(self.group, self.mask | other.mask)

    def __and__(self, other: "GroupSubset") -> "GroupSubset":
        self._check(other)
        return GroupSubset(self.group, self.mask & other.mask)

    def setminus(self, other: "GroupSubset") -> "GroupSubset":
        self._check(other)
        return GroupSubset(self.group, self.mask & ~other.mask)

    def complement(self) -> "GroupSubset":
        return GroupSubset(self.group, ~self.mask)

    # -- additive structure ------------------------------------------------

    def translate(self, x: GroupElement) -> "GroupSubset":
        if x.group is not self.group:
            raise GroupMismatchError("translation element from a different group")
        t = self.mask.reshape(self.group.tensor_shape)
        shifts = self.group._roll_shifts(x.coords)
        rolled = np.roll(t, shift=shifts, axis=tuple(range(len(shifts))))
        return GroupSubset(self.group, rolled.reshape(-1))

    def negate(self) -> "GroupSubset":
        return GroupSubset(self.group, self.mask[self.group.negation_permutation])

    def __neg__(self) -> "GroupSubset":
        return self.negate()

    def sumset(self, other: "GroupSubset") -> "GroupSubset":
        self._check(other)
        counts = _convolution_counts(self.group, self.mask, other.mask)
        return GroupSubset(self.group, counts > 0.5)

    def diffset(self, other: "GroupSubset") -> "GroupSubset":
        return self.sumset(other.negate())

    def __add__(self, other):
        if isinstance(other, GroupElement):
            return self.translate(other)
        return self.sumset(other)

    def __sub__(self, other):
        if isinstance(other, GroupElement):
            return self.translate(-other)
        return self.diffset(other)


def _convolution_counts(group: FiniteAbelianGroup, m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    """Unnormalized convolution counts(x) = #{(a, b): a + b = x} over masks."""
    shape = group.tensor_shape
    axes = tuple(range(len(shape)))
    f1 = np.fft.rfftn(m1.reshape(shape).astype(np.float64), s=shape, axes=axes)
    f2 = np.fft.rfftn(m2.reshape(shape).astype(np.float64), s=shape, axes=axes)
    out = np.fft.irfftn(f1 * f2, s=shape, axes=axes)
    return out.reshape(-1)


def sumset_counts(a: GroupSubset, b: GroupSubset) -> np.ndarray:
    """Exact representation counts of x = s + t with s in a, t in b."""
    a._check(b)
    return np.rint(_convolution_counts(a.group, a.mask, b.mask)).astype(np.int64)


# -- spanning, bases, subgroups -------------------------------------------


def bounded_span(
    group: FiniteAbelianGroup,
    elements: Sequence[GroupElement],
    radius: int,
    *,
    max_steps: int = 1 << 22,
) -> GroupSubset:
    """All combinations ``sum lambda_i g_i`` with ``|lambda_i| <= radius``.

    Folds one generator at a time over the dense mask, which enumerates the
    box exactly whatever its nominal size.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    for g in elements:
        if g.group is not group:
            raise GroupMismatchError("span generator from a different group")
    if len(elements) * (2 * radius + 1) > max_steps:
        raise FeasibilityError("bounded_span enumeration exceeds feasibility ceiling")
    mask = np.zeros(group.order, dtype=bool)
    mask[0] = True
    acc = GroupSubset(group, mask)
    for g in elements:
        cur = acc.translate(-radius * g)
        out = cur.mask.copy()
        for _ in range(2 * radius):
            cur = cur.translate(g)
            out |= cur.mask
        acc = GroupSubset(group, out)
    return acc


def is_basis(
    group: FiniteAbelianGroup,
    elements: Sequence[GroupElement],
    *,
    max_steps: int = 1 << 28,
) -> bool:
    """Basis test: order product equals |G| and the coefficient box injects.

    With ``n_i`` the element orders, injectivity of ``lambda -> sum lambda_i x_i``
    on ``prod [0, n_i)`` together with ``prod n_i == |G|`` is equivalent to the
    divisibility definition of a basis.
    """
    for g in elements:
        if g.group is not group:
            raise GroupMismatchError("basis candidate from a different group")
    orders = [g.order for g in elements]
    if math.prod(orders) != group.order:
        return False
    if sum(orders) * group.order > max_steps:
        raise FeasibilityError("basis check exceeds the enumeration ceiling")
    mask = np.zeros(group.order, dtype=bool)
    mask[0] = True
    acc = GroupSubset(group, mask)
    for g, n in zip(elements, orders):
        cur = acc
        out = cur.mask.copy()
        for _ in range(n - 1):
            cur = cur.translate(g)
            out |= cur.mask
        acc = GroupSubset(group, out)
    return acc.size == group.order


def invariant_factors(
    group: FiniteAbelianGroup,
) -> tuple[list[int], list[GroupElement]]:
    """Invariant factor decomposition ``n_1 | n_2 | ... | n_r`` with a basis.

    Canonical construction: for each prime, the j-th largest prime-power
    among the cyclic factors is assigned to the j-th invariant factor from
    the top; the basis element sums the corresponding prime-part generators
    ``(q_i / p^v) e_i``.
    """
    contributions: dict[int, list[tuple[int, int]]] = {}
    for i, q in enumerate(group.moduli):
        n = q
        p = 2
        while p * p <= n:
            if n % p == 0:
                v = 0
                while n % p == 0:
                    n //= p
                    v += 1
                contributions.setdefault(p, []).append((p**v, i))
            p += 1
        if n > 1:
            contributions.setdefault(n, []).append((n, i))
    for p in contributions:
        contributions[p].sort(key=lambda t: (-t[0], t[1]))
    r = max((len(v) for v in contributions.values()), default=0)
    factors_desc: list[int] = []
    basis_desc: list[GroupElement] = []
    for j in range(r):
        n_j = 1
        coords = [0] * group.rank
        for p in sorted(contributions):
            parts = contributions[p]
            if j < len(parts):
                power, i = parts[j]
                n_j *= power
                coords[i] = (coords[i] + group.moduli[i] // power) % group.moduli[i]
        factors_desc.append(n_j)
        basis_desc.append(group.element(coords))
    return list(reversed(factors_desc)), list(reversed(basis_desc))


def subgroup_generated(
    group: FiniteAbelianGroup, generators: Sequence[GroupElement]
) -> GroupSubset:
    mask = np.zeros(group.order, dtype=bool)
    mask[0] = True
    acc = GroupSubset(group, mask)
    for g in generators:
        if g.group is not group:
            raise GroupMismatchError("generator from a different group")
        cur = acc
        out = cur.mask.copy()
        for _ in range(g.order - 1):
            cur = cur.translate(g)
            out |= cur.mask
        acc = GroupSubset(group, out)
    return acc


def is_subgroup(subset: GroupSubset) -> bool:
    """Nonempty and closed under subtraction (checked via one convolution)."""
    if subset.size == 0 or not subset.mask[0]:
        return False
    return subset.diffset(subset) == subset


def subgroup_generators(subset: GroupSubset) -> list[GroupElement]:
    """Small generating set extracted greedily from a verified subgroup."""
    gens: list[GroupElement] = []
    covered = GroupSubset.from_indices(subset.group, [0])
    for idx in subset.indices():
        if not subset.mask[idx]:
            continue
        if covered.mask[idx]:
            continue
        g = subset.group.element_from_index(int(idx))
        gens.append(g)
        covered = subgroup_generated(subset.group, gens)
        if covered.size == subset.size:
            break
    return gens


def annihilator_subgroup(subset: GroupSubset) -> GroupSubset:
    """Characters vanishing on a subgroup: {chi : chi(h) = 0 for all h}."""
    group = subset.group
    dual = group.dual
    gens = subgroup_generators(subset)
    mask = np.ones(dual.order, dtype=bool)
    e = group.exponent
    for g in gens:
        w = np.asarray(
            [c * (e // q) for c, q in zip(g.coords, group.moduli)], dtype=np.int64
        )
        mask &= (dual.coords_matrix @ w) % e == 0
    return GroupSubset(dual, mask)


# -- group-spec grammar -----------------------------------------------------


def parse_group_spec(text: str) -> list[int]:
    """Parse ``Z<n>(xZ<n>)*`` (whitespace-insensitive) into a moduli list."""
    compact = "".join(text.split())
    if not compact:
        raise GroupSpecSyntaxError("empty group spec", 0)
    moduli: list[int] = []
    pos = 0
    while True:
        if pos >= len(compact) or compact[pos] != "Z":
            raise GroupSpecSyntaxError("expected 'Z'", pos)
        pos += 1
        start = pos
        while pos < len(compact) and compact[pos].isdigit():
            pos += 1
        if start == pos:
            raise GroupSpecSyntaxError("expected an integer after 'Z'", start)
        n = int(compact[start:pos])
        if n <= 0:
            raise GroupSpecSyntaxError(f"modulus must be positive, got {n}", start)
        moduli.append(n)
        if pos == len(compact):
            return moduli
        if compact[pos] != "x":
            raise GroupSpecSyntaxError("expected 'x' separator", pos)
        pos += 1
