"""Coset progressions and Freiman homomorphisms.

A coset progression is ``base + [lo_1, hi_1] v_1 + ... + [lo_r, hi_r] v_r + H``
with ``H`` a verified subgroup stored as an explicit subset.  It is proper
when the enumeration size matches the formal product, and symmetric when
the base is 0 and every interval is ``[-N, N]``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from . import intmat
from .errors import (
    GroupMismatchError,
    PreconditionError,
    TheoremViolationError,
)
from .fourier import quadruple_count_all
from .groups import (
    FiniteAbelianGroup,
    GroupElement,
    GroupSubset,
    invariant_factors,
    is_subgroup,
    subgroup_generated,
)
from .rng import derive_rng


class Arm(NamedTuple):
    generator: GroupElement
    lo: int
    hi: int

    @property
    def length(self) -> int:
        return self.hi - self.lo + 1


@dataclass(frozen=True, eq=False)
class CosetProgression:
    group: FiniteAbelianGroup
    base: GroupElement
    arms: tuple[Arm, ...]
    subgroup: GroupSubset

    Arm = Arm

    def __post_init__(self):
        if self.base.group is not self.group:
            raise GroupMismatchError("base element from a different group")
        for arm in self.arms:
            if arm.generator.group is not self.group:
                raise GroupMismatchError("arm generator from a different group")
            if arm.lo > arm.hi:
                raise ValueError("arm interval is empty")
        if self.subgroup.group is not self.group:
            raise GroupMismatchError("subgroup from a different group")
        if not is_subgroup(self.subgroup):
            raise PreconditionError("subgroup part is not a verified subgroup")

    # -- constructors -----------------------------------------------------

    @classmethod
    def whole_group(cls, group: FiniteAbelianGroup) -> "CosetProgression":
        return cls(group, group.zero, (), GroupSubset.full(group))

    @classmethod
    def singleton(cls, x: GroupElement) -> "CosetProgression":
        return cls(x.group, x, (), GroupSubset.from_indices(x.group, [0]))

    @classmethod
    def from_subgroup(cls, subgroup: GroupSubset) -> "CosetProgression":
        return cls(subgroup.group, subgroup.group.zero, (), subgroup)

    @classmethod
    def symmetric(
        cls,
        group: FiniteAbelianGroup,
        arms: Sequence[tuple[GroupElement, int]],
        subgroup: Optional[GroupSubset] = None,
    ) -> "CosetProgression":
        if subgroup is None:
            subgroup = GroupSubset.from_indices(group, [0])
        return cls(
            group,
            group.zero,
            tuple(Arm(gen, -n, n) for gen, n in arms),
            subgroup,
        )

    # -- structure ---------------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.arms)

    @property
    def formal_size(self) -> int:
        return math.prod(arm.length for arm in self.arms) * self.subgroup.size

    @property
    def is_symmetric(self) -> bool:
        return self.base.is_zero and all(arm.lo == -arm.hi for arm in self.arms)

    @cached_property
    def _mask(self) -> np.ndarray:
        acc = self.subgroup.translate(self.base)
        for arm in self.arms:
            cur = acc.translate(arm.lo * arm.generator)
            out = cur.mask.copy()
            for _ in range(arm.length - 1):
                cur = cur.translate(arm.generator)
                out |= cur.mask
            acc = GroupSubset(self.group, out)
        return acc.mask

    def enumerate(self) -> GroupSubset:
        return GroupSubset(self.group, self._mask)

    @property
    def size(self) -> int:
        return int(self._mask.sum())

    def is_proper(self) -> bool:
        return self.size == self.formal_size

    def translate(self, t: GroupElement) -> "CosetProgression":
        return CosetProgression(self.group, self.base + t, self.arms, self.subgroup)

    def coordinates(self) -> dict[int, tuple[tuple[int, ...], int]]:
        """element index -> (arm coefficients, subgroup element index).

        Only meaningful for proper progressions (raises on a collision).
        """
        out: dict[int, tuple[tuple[int, ...], int]] = {}
        sub_idx = self.subgroup.indices()
        ranges = [range(arm.lo, arm.hi + 1) for arm in self.arms]
        for coeffs in itertools.product(*ranges):
            offset = self.base
            for c, arm in zip(coeffs, self.arms):
                offset = offset + c * arm.generator
            base_index = offset.index
            shifted = self.group.add_indices(
                np.full(sub_idx.size, base_index, dtype=np.int64), sub_idx
            )
            for h, e in zip(sub_idx, shifted):
                e = int(e)
                if e in out:
                    raise PreconditionError("progression is not proper")
                out[e] = (coeffs, int(h))
        return out


def is_proper(progression: CosetProgression) -> bool:
    return progression.is_proper()


def is_freiman_subgroup(a: GroupSubset, b: GroupSubset, *, chunk: int = 1 << 22) -> bool:
    """Whenever x, y in A and x - y in B, also x - y in A (exhaustive)."""
    a._check(b)
    if not a.is_subset_of(b):
        raise PreconditionError("A must be a subset of B")
    idx = a.indices()
    if idx.size == 0:
        return True
    group = a.group
    neg = group.negation_permutation
    neg_idx = neg[idx]
    rows_per_block = max(1, chunk // max(1, idx.size))
    for start in range(0, idx.size, rows_per_block):
        block = idx[start : start + rows_per_block]
        diffs = group.add_indices(
            np.repeat(block, neg_idx.size), np.tile(neg_idx, block.size)
        )
        bad = b.mask[diffs] & ~a.mask[diffs]
        if np.any(bad):
            return False
    return True


@dataclass(frozen=True)
class ExtractionResult:
    progression: CosetProgression
    ells: tuple[int, ...]


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def extract_subprogression(
    a: GroupSubset, c: CosetProgression, alpha: Fraction
) -> ExtractionResult:
    """Structured sub-progression of a dense Freiman-subgroup of ``c``.

    Per arm, finds the smallest stride ``l <= 2 ceil(1/alpha)`` with
    ``l v in A`` (guaranteed by the fiber-pigeonhole argument when the arm
    is long); short arms degrade to stride ``floor(20/alpha)`` with a zero
    interval.  The subgroup part is ``A intersect H``.  All conclusion
    clauses are verified before returning.
    """
    alpha = Fraction(alpha)
    if not (0 < alpha <= 1):
        raise PreconditionError("alpha must be in (0, 1]")
    if not c.is_symmetric:
        raise PreconditionError("progression must be symmetric")
    if not c.is_proper():
        raise PreconditionError("progression must be proper")
    cmask = c.enumerate()
    if not a.is_subset_of(cmask):
        raise PreconditionError("A must sit inside the progression")
    if a.size < alpha * cmask.size:
        raise PreconditionError("A is below the requested density")
    if not is_freiman_subgroup(a, cmask):
        raise PreconditionError("A is not a Freiman-subgroup of the progression")
    group = c.group
    search_cap = 2 * _ceil_frac(1 / alpha)
    fallback_ell = int(20 / alpha)
    ells: list[int] = []
    new_arms: list[Arm] = []
    for arm in c.arms:
        n = arm.hi
        ell = None
        for cand in range(1, min(search_cap, n) + 1):
            if (cand * arm.generator) in a:
                ell = cand
                break
        if ell is None:
            ell = max(1, fallback_ell)
            m = 0
        else:
            m = n // ell
        ells.append(ell)
        new_arms.append(Arm(ell * arm.generator, -m, m))
    h_prime = a & c.subgroup
    if not is_subgroup(h_prime):
        raise TheoremViolationError("A intersect H failed to be a subgroup")
    if h_prime.size < alpha * c.subgroup.size:
        raise TheoremViolationError("subgroup part below the guaranteed density")
    result = CosetProgression(group, group.zero, tuple(new_arms), h_prime)
    if any(ell > 20 / alpha for ell in ells):
        raise TheoremViolationError("stride exceeded 20/alpha")
    if not result.enumerate().is_subset_of(a):
        raise TheoremViolationError("extracted progression escaped A")
    return ExtractionResult(result, tuple(ells))


# -- bases -------------------------------------------------------------------


def change_basis(
    group: FiniteAbelianGroup,
    basis: Sequence[GroupElement],
    move: tuple,
    *,
    validate: bool = True,
) -> list[GroupElement]:
    """Apply a basis move; kinds (0-based indices, orders n_1 | ... | n_r):

    ("upper", i, j, lam): i < j, x_i <- x_i - lam (n_j / n_i) x_j
    ("lower", i, j, lam): i > j, x_i <- x_i - lam x_j
    ("unit", i, lam):     gcd(lam, n_i) = 1, x_i <- lam x_i
    """
    from .groups import is_basis

    basis = list(basis)
    orders = [x.order for x in basis]
    for a, b in zip(orders, orders[1:]):
        if b % a != 0:
            raise PreconditionError("basis orders must form a divisibility chain")
    kind = move[0]
    if kind == "upper":
        _, i, j, lam = move
        if not 0 <= i < j < len(basis):
            raise PreconditionError("upper move needs i < j")
        basis[i] = basis[i] - lam * (orders[j] // orders[i]) * basis[j]
    elif kind == "lower":
        _, i, j, lam = move
        if not 0 <= j < i < len(basis):
            raise PreconditionError("lower move needs i > j")
        basis[i] = basis[i] - lam * basis[j]
    elif kind == "unit":
        _, i, lam = move
        if not 0 <= i < len(basis):
            raise PreconditionError("index out of range")
        if math.gcd(lam, orders[i]) != 1:
            raise PreconditionError("unit move scalar must be coprime to the order")
        basis[i] = lam * basis[i]
    else:
        raise PreconditionError(f"unknown move kind {kind!r}")
    if validate:
        if [x.order for x in basis] != orders:
            raise TheoremViolationError("basis move changed element orders")
        if not is_basis(group, basis):
            raise TheoremViolationError("basis move destroyed the basis property")
    return basis


def subgroup_basis(
    group: FiniteAbelianGroup, subgroup: GroupSubset
) -> tuple[list[int], list[GroupElement]]:
    """Invariant-factor basis of a subgroup given as a subset.

    Lifts the subgroup to a full-rank lattice in Z^d, expresses the
    relation lattice in a lattice basis and reads the decomposition off
    the Smith form.
    """
    from .groups import subgroup_generators

    if not is_subgroup(subgroup):
        raise PreconditionError("input is not a verified subgroup")
    g = group
    d = g.rank
    gens = subgroup_generators(subgroup)
    rows = [list(e.coords) for e in gens]
    rows += [[g.moduli[i] if j == i else 0 for j in range(d)] for i in range(d)]
    basis_rows, _ = intmat.row_hermite(rows)
    if len(basis_rows) != d:
        raise TheoremViolationError("lifted subgroup lattice is not full rank")
    # relation lattice Q = moduli * Z^d expressed over the lattice basis:
    # with U A V = D, the rows of V^-1 @ basis_rows are a basis of the
    # lifted lattice adapted to Q, and the quotient is the sum of Z/D[i][i]
    rel = []
    for i in range(d):
        target = [g.moduli[i] if j == i else 0 for j in range(d)]
        coeffs = intmat.solve_row_lattice(target, basis_rows)
        if coeffs is None:
            raise TheoremViolationError("relation lattice escaped the lifted lattice")
        rel.append(coeffs)
    dmat, _, vmat = intmat.smith_normal_form(rel)
    v_inv = intmat.unimodular_inverse(vmat)
    factors: list[int] = []
    basis: list[GroupElement] = []
    for i in range(d):
        order = dmat[i][i]
        if order == 1:
            continue
        vec = [0] * d
        for j in range(d):
            coef = v_inv[i][j]
            if coef:
                for t in range(d):
                    vec[t] += coef * basis_rows[j][t]
        factors.append(order)
        basis.append(g.element(vec))
    pairs = sorted(zip(factors, basis), key=lambda p: p[0])
    return [p[0] for p in pairs], [p[1] for p in pairs]


# -- Freiman homomorphisms ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class FreimanMap:
    """Tabulated map on a coset progression, tagged with a Freiman order."""

    domain: CosetProgression
    codomain: FiniteAbelianGroup
    table: dict[int, GroupElement]  # domain element index -> codomain element
    order: int = 2

    def __post_init__(self):
        need = self.domain.enumerate().indices()
        missing = [int(i) for i in need if int(i) not in self.table]
        if missing:
            raise PreconditionError("table does not cover the progression")

    def __call__(self, x) -> GroupElement:
        idx = x.index if isinstance(x, GroupElement) else int(x)
        return self.table[idx]

    def image_size(self) -> int:
        return len({v.index for v in self.table.values()})


def is_freiman_homomorphism(
    fmap: FreimanMap,
    s: Optional[int] = None,
    *,
    exhaustive_cutoff: int = 128,
    samples: int = 10_000,
    seed: int = 0,
) -> bool:
    """Respects all coincidences of s-fold sums on the domain.

    Exhaustive (vectorized over pair sums) for s = 2 up to the cutoff;
    larger domains and higher s are checked on seeded random tuples.
    """
    s = fmap.order if s is None else s
    if s < 2:
        raise PreconditionError("Freiman order must be at least 2")
    dom = fmap.domain.enumerate().indices()
    n = dom.size
    if n == 0:
        return True
    g = fmap.domain.group
    h = fmap.codomain
    vals = np.asarray([fmap.table[int(i)].index for i in dom], dtype=np.int64)
    if s == 2 and n <= exhaustive_cutoff:
        keys = g.add_indices(np.repeat(dom, n), np.tile(dom, n))
        sums = h.add_indices(np.repeat(vals, n), np.tile(vals, n))
        order = np.argsort(keys, kind="stable")
        keys, sums = keys[order], sums[order]
        boundaries = np.flatnonzero(np.diff(keys)) + 1
        for chunk in np.split(sums, boundaries):
            if chunk.size and np.any(chunk != chunk[0]):
                return False
        return True
    rng = derive_rng(seed, 17)
    lookup = np.full(g.order, -1, dtype=np.int64)
    lookup[dom] = vals
    for _ in range(samples):
        a = dom[rng.integers(0, n, size=s)]
        b = dom[rng.integers(0, n, size=s - 1)]
        asum = 0
        for i in a:
            asum = int(g.add_indices(np.asarray([asum]), np.asarray([i]))[0])
        bsum = 0
        for i in b:
            bsum = int(g.add_indices(np.asarray([bsum]), np.asarray([i]))[0])
        last = int(g.add_indices(np.asarray([asum]), g.negation_permutation[[bsum]])[0])
        if lookup[last] < 0:
            continue
        va = 0
        for i in a:
            va = int(h.add_indices(np.asarray([va]), np.asarray([lookup[i]]))[0])
        vb = 0
        for i in b:
            vb = int(h.add_indices(np.asarray([vb]), np.asarray([lookup[i]]))[0])
        vb = int(h.add_indices(np.asarray([vb]), np.asarray([lookup[last]]))[0])
        if va != vb:
            return False
    return True


@dataclass(frozen=True)
class ProjectivityResult:
    progression: CosetProgression
    lift: FreimanMap
    heavy_indices: tuple[int, ...]  # basis positions whose torsion survives
    arm_values: tuple[GroupElement, ...]  # lift values on the arm generators
    subgroup_values: tuple[GroupElement, ...]  # lift values on subgroup generators


def partial_projectivity(
    group: FiniteAbelianGroup,
    codomain: FiniteAbelianGroup,
    kernel: GroupSubset,
    phi_rep: Callable[[GroupElement], GroupElement],
    s: int = 2,
    *,
    domain: Optional[GroupSubset] = None,
    validate: bool = True,
) -> ProjectivityResult:
    """Lift a homomorphism into a quotient to a Freiman s-homomorphism.

    ``phi_rep`` returns a representative in the codomain; ``x ->
    phi_rep(x) + kernel`` must be a homomorphism.  The sweep rewrites the
    basis downward, replacing ``h_i`` by ``k_i`` with ``n_i k_i = 0``
    whenever ``n_i h_i`` already lies in the subgroup generated by the
    heavier torsion witnesses; each survivor doubles that subgroup, so at
    most ``log2 |kernel|`` arms remain.
    """
    if s < 2:
        raise PreconditionError("Freiman order must be at least 2")
    if kernel.group is not codomain:
        raise GroupMismatchError("kernel must live in the codomain")
    if not is_subgroup(kernel):
        raise PreconditionError("kernel is not a verified subgroup")
    if domain is None:
        orders, basis = invariant_factors(group)
    else:
        orders, basis = subgroup_basis(group, domain)
    r = len(basis)
    hs = [phi_rep(x) for x in basis]
    for h, x in zip(hs, basis):
        if h.group is not codomain:
            raise GroupMismatchError("representative outside the codomain")
        if (x.order * h) not in kernel:
            raise PreconditionError("phi is not a homomorphism into the quotient")
    ys: list[Optional[GroupElement]] = [None] * r
    ks: list[Optional[GroupElement]] = [None] * r
    for i in range(r - 1, -1, -1):
        n_i = orders[i]
        target = n_i * hs[i]
        heavier = [
            (j, orders[j] * ks[j])
            for j in range(i + 1, r)
            if not (orders[j] * ks[j]).is_zero
        ]
        coeffs = _subgroup_combination(codomain, [t for _, t in heavier], target)
        if coeffs is None:
            ys[i] = basis[i]
            ks[i] = hs[i]
        else:
            y = basis[i]
            k = hs[i]
            for (j, _), lam in zip(heavier, coeffs):
                ratio = orders[j] // n_i
                y = y - lam * ratio * ys[j]
                k = k - lam * ratio * ks[j]
            ys[i] = y
            ks[i] = k
            if validate and not (n_i * k).is_zero:
                raise TheoremViolationError("rewritten torsion failed to vanish")
    heavy = tuple(i for i in range(r) if not (orders[i] * ks[i]).is_zero)
    light = [i for i in range(r) if i not in heavy]
    arm_lengths = {i: -(-orders[i] // s) for i in heavy}  # ceil(n_i / s)
    sub = subgroup_generated(group, [ys[i] for i in light])
    prog = CosetProgression(
        group,
        group.zero,
        tuple(Arm(ys[i], 0, arm_lengths[i] - 1) for i in heavy),
        sub,
    )
    table: dict[int, GroupElement] = {}
    ranges = [range(arm_lengths[i]) for i in heavy] + [range(orders[i]) for i in light]
    members = [ys[i] for i in heavy] + [ys[i] for i in light]
    values = [ks[i] for i in heavy] + [ks[i] for i in light]
    for coeffs in itertools.product(*ranges):
        x = group.zero
        v = codomain.zero
        for lam, yy, kk in zip(coeffs, members, values):
            x = x + lam * yy
            v = v + lam * kk
        prev = table.get(x.index)
        if prev is not None and prev != v:
            raise TheoremViolationError("lift table is inconsistent")
        table[x.index] = v
    lift = FreimanMap(prog, codomain, table, order=s)
    if validate:
        if 2 ** len(heavy) > max(1, kernel.size):
            raise TheoremViolationError("rank exceeded log2 |kernel|")
        if not prog.is_proper():
            raise TheoremViolationError("lift progression is not proper")
        dom_size = group.order if domain is None else domain.size
        if s == 2:
            ok = prog.size * kernel.size >= dom_size
        else:
            ok = float(prog.size) * float(s) ** math.log2(max(1, kernel.size)) >= dom_size - 1e-9
        if not ok:
            raise TheoremViolationError("progression below the guaranteed size")
        for idx, v in table.items():
            rep = phi_rep(group.element_from_index(idx))
            if (rep - v) not in kernel:
                raise TheoremViolationError("lift disagrees with phi modulo the kernel")
    return ProjectivityResult(
        prog,
        lift,
        heavy,
        tuple(ys[i] for i in heavy),
        tuple(ks[i] for i in light),
    )


def _subgroup_combination(
    group: FiniteAbelianGroup,
    generators: Sequence[GroupElement],
    target: GroupElement,
) -> Optional[list[int]]:
    """Coefficients with sum lam_j g_j = target, or None; DP over the
    generated subgroup keyed by element index."""
    states: dict[int, tuple[int, ...]] = {0: ()}
    for g in generators:
        new_states: dict[int, tuple[int, ...]] = {}
        for lam in range(g.order):
            shift = (lam * g).index
            for idx, coeffs in states.items():
                nxt = int(
                    group.add_indices(
                        np.asarray([idx], dtype=np.int64),
                        np.asarray([shift], dtype=np.int64),
                    )[0]
                )
                if nxt not in new_states:
                    new_states[nxt] = coeffs + (lam,)
        states = new_states
    return list(states[target.index]) if target.index in states else None


@dataclass(frozen=True)
class InjectivityPartition:
    refinement: CosetProgression  # D, inside the subgroup part
    cells: tuple[CosetProgression, ...]  # partition of the arm part P
    cell_count: int


def injectivity_partition(
    phi: FreimanMap, alpha: Fraction
) -> InjectivityPartition:
    """Split a somewhat-injective Freiman homomorphism into injective pieces.

    Returns ``D`` inside the subgroup part and a grid partition of the arm
    part such that ``phi`` is injective on every ``k + P_i + D``; each
    injectivity claim is verified by enumeration.
    """
    alpha = Fraction(alpha)
    c = phi.domain
    if not c.is_proper():
        raise PreconditionError("domain progression must be proper")
    if phi.image_size() < alpha * c.size:
        raise PreconditionError("phi image below the requested density")
    if not is_freiman_homomorphism(phi):
        raise PreconditionError("phi is not a Freiman homomorphism")
    g = c.group
    h = phi.codomain
    kernel_sub = c.subgroup
    corner = c.base
    for arm in c.arms:
        corner = corner + arm.lo * arm.generator
    base_val = phi(corner)
    psi_table: dict[int, GroupElement] = {}
    corner_idx = corner.index
    for kidx in kernel_sub.indices():
        kidx = int(kidx)
        shifted = int(
            g.add_indices(np.asarray([corner_idx]), np.asarray([kidx]))[0]
        )
        psi_table[kidx] = phi(shifted) - base_val
    # psi is a genuine homomorphism K -> H
    for k1 in psi_table:
        for k2 in psi_table:
            ksum = int(g.add_indices(np.asarray([k1]), np.asarray([k2]))[0])
            if psi_table[ksum] != psi_table[k1] + psi_table[k2]:
                raise TheoremViolationError("difference map failed to be a homomorphism")
    ker_idx = [k for k, v in psi_table.items() if v.is_zero]
    s_mask = GroupSubset.from_indices(g, ker_idx)
    if s_mask.size > 1 / alpha:
        raise TheoremViolationError("kernel larger than 1/alpha")
    image_idx = sorted({v.index for v in psi_table.values()})
    psi_image = GroupSubset.from_indices(h, image_idx)
    nu_rep: dict[int, GroupElement] = {}
    for kidx in sorted(psi_table):
        vidx = psi_table[kidx].index
        if vidx not in nu_rep:
            nu_rep[vidx] = g.element_from_index(kidx)
    proj = partial_projectivity(
        h,
        g,
        s_mask,
        lambda y: nu_rep[y.index],
        s=2,
        domain=psi_image,
    )
    theta = proj.lift
    # theta is injective; its image is the desired progression D
    values = sorted(theta.table.items())
    if len({v.index for _, v in values}) != len(values):
        raise TheoremViolationError("projectivity lift failed to be injective")
    d_sub = subgroup_generated(g, list(proj.subgroup_values))
    d_prog = CosetProgression(
        g,
        g.zero,
        tuple(
            Arm(val, arm.lo, arm.hi)
            for val, arm in zip(proj.arm_values, proj.progression.arms)
        ),
        d_sub,
    )
    if not d_prog.is_proper():
        raise TheoremViolationError("refinement progression is not proper")
    if not d_prog.enumerate().is_subset_of(kernel_sub):
        raise TheoremViolationError("refinement escaped the subgroup part")
    if 2**d_prog.rank * alpha > 1:
        raise TheoremViolationError("refinement rank exceeded log2(1/alpha)")
    if d_prog.size < alpha * alpha * kernel_sub.size:
        raise TheoremViolationError("refinement below the guaranteed size")
    # grid partition of the arm part
    r = max(1, c.rank)
    cells: list[CosetProgression] = []
    blocks_per_arm: list[list[tuple[int, int]]] = []
    for arm in c.arms:
        n = arm.length
        width = _ceil_frac(alpha * n / (4 * r))
        blocks = [
            (arm.lo + t * width, min(arm.lo + (t + 1) * width - 1, arm.hi))
            for t in range(-(-n // width))
        ]
        blocks_per_arm.append(blocks)
    trivial = GroupSubset.from_indices(g, [0])
    for combo in itertools.product(*blocks_per_arm):
        base = c.base
        arms = []
        for (lo, hi), arm in zip(combo, c.arms):
            base = base + lo * arm.generator
            arms.append(Arm(arm.generator, 0, hi - lo))
        cells.append(CosetProgression(g, base, tuple(arms), trivial))
    m = len(cells)
    if c.rank and float(m) > float((8 * r / alpha)) ** r + 1e-9:
        raise TheoremViolationError("cell count exceeded (8 r / alpha)^r")
    # verify injectivity on every k + P_i + D
    d_idx = d_prog.enumerate().indices()
    for cell in cells:
        cell_idx = cell.enumerate().indices()
        pd = g.add_indices(
            np.repeat(cell_idx, d_idx.size), np.tile(d_idx, cell_idx.size)
        )
        for kidx in kernel_sub.indices():
            full = g.add_indices(
                np.full(pd.size, int(kidx), dtype=np.int64), pd
            )
            vals = [phi(int(e)).index for e in full]
            if len(set(vals)) != len(vals):
                raise TheoremViolationError(
                    "phi failed to be injective on a refined cell"
                )
    return InjectivityPartition(d_prog, tuple(cells), m)


# -- popular differences and intersection refinement --------------------------


def stabilizer(subset: GroupSubset) -> GroupSubset:
    """{h : subset + h = subset}; one convolution via the complement trick."""
    group = subset.group
    if subset.size == 0:
        return GroupSubset.full(group)
    shrink = subset.complement().sumset(subset.negate()).complement()
    # h with subset + h subseteq subset; equal sizes force equality
    return shrink


def grow_progression_inside(
    allowed: GroupSubset,
    *,
    candidate_order: Optional[Sequence[int]] = None,
    rank_cap: int = 3,
    candidate_cap: int = 512,
    use_stabilizer: bool = True,
) -> CosetProgression:
    """Greedy symmetric proper progression inside an allowed set containing 0.

    Arms extend while the enumeration stays in the allowed set and the
    progression stays proper; candidates are scanned in the given order
    (element index by default).
    """
    group = allowed.group
    if 0 not in allowed:
        raise PreconditionError("allowed set must contain 0")
    if use_stabilizer:
        sub = stabilizer(allowed)
        sub = sub if is_subgroup(sub) else GroupSubset.from_indices(group, [0])
    else:
        sub = GroupSubset.from_indices(group, [0])
    prog = CosetProgression(group, group.zero, (), sub)
    order = (
        [int(i) for i in candidate_order]
        if candidate_order is not None
        else [int(i) for i in allowed.indices()]
    )
    for raw in order[:candidate_cap]:
        if prog.rank >= rank_cap:
            break
        v = group.element_from_index(raw)
        if v.is_zero:
            continue
        best = None
        half = 1
        while half <= v.order // 2 + 1:
            trial = CosetProgression(
                group, group.zero, prog.arms + (Arm(v, -half, half),), prog.subgroup
            )
            if trial.is_proper() and trial.enumerate().is_subset_of(allowed):
                best = trial
                half += 1
            else:
                break
        if best is not None:
            prog = best
    return prog


def popular_difference_set(
    subset: GroupSubset, doubling: Fraction
) -> tuple[GroupSubset, np.ndarray]:
    """Set of x with at least |A|^3/(64 K) quadruple representations, plus
    the full count vector."""
    doubling = Fraction(doubling)
    if subset.size == 0:
        raise PreconditionError("set must be nonempty")
    if subset.sumset(subset).size > doubling * subset.size:
        raise PreconditionError("doubling constant below the actual doubling")
    counts = quadruple_count_all(subset)
    threshold = Fraction(subset.size**3, 64) / doubling
    popular = GroupSubset(subset.group, counts >= threshold)
    if 0 not in popular:
        raise TheoremViolationError("0 must always be a popular difference")
    return popular, counts


def popular_difference_progression(
    subset: GroupSubset,
    doubling: Fraction,
    *,
    rank_cap: int = 3,
    use_stabilizer: bool = True,
) -> CosetProgression:
    """Symmetric proper progression of popular quadruple differences.

    Every returned element x satisfies ``count(x) >= |A|^3 / (64 K)`` where
    K is the supplied doubling constant; the bound is enforced per element.
    """
    doubling = Fraction(doubling)
    popular, counts = popular_difference_set(subset, doubling)
    threshold = Fraction(subset.size**3, 64) / doubling
    order = sorted(
        (int(i) for i in popular.indices()),
        key=lambda i: (-int(counts[i]), i),
    )
    prog = grow_progression_inside(
        popular,
        candidate_order=order,
        rank_cap=rank_cap,
        use_stabilizer=use_stabilizer,
    )
    for idx in prog.enumerate().indices():
        if counts[int(idx)] < threshold:
            raise TheoremViolationError("returned element below the count threshold")
    return prog


@dataclass(frozen=True)
class RefineResult:
    progression: CosetProgression
    overlap: int  # |C cap X|


def intersect_refine(
    progressions: Sequence[CosetProgression], x_set: GroupSubset
) -> RefineResult:
    """Proper progression inside the intersection, meeting X in many points.

    Grid-partitions each progression into margin-protected cells, picks the
    densest common cell Y, then translates the popular-difference
    progression of Y into the intersection; falls back to the densest cell
    itself (rank one intersection) or a singleton.
    """
    if not progressions:
        raise PreconditionError("need at least one progression")
    group = progressions[0].group
    if x_set.size == 0:
        raise PreconditionError("X must be nonempty")
    inter = progressions[0].enumerate()
    for c in progressions[1:]:
        if c.group is not group:
            raise GroupMismatchError("progressions from different groups")
        inter = inter & c.enumerate()
    if not x_set.is_subset_of(inter):
        raise PreconditionError("X must sit inside every progression")
    delta = Fraction(x_set.size, group.order)
    r = len(progressions)
    d = max(1, max(c.rank for c in progressions))
    # per-progression cell id of every x in X; margin cells map to None
    coords = [c.coordinates() for c in progressions]
    widths = []
    margins = []
    for c in progressions:
        per_arm_w = []
        per_arm_margin = []
        for arm in c.arms:
            n = arm.length
            m = _ceil_frac(delta * n / (100 * d * r))
            t = -(-n // m)
            if t < 50 * d * r / delta:
                m, t, margin = 1, n, False
            else:
                margin = True
            per_arm_w.append(m)
            per_arm_margin.append(margin)
        widths.append(per_arm_w)
        margins.append(per_arm_margin)
    assignments: dict[tuple, list[int]] = {}
    for xi in x_set.indices():
        xi = int(xi)
        key = []
        ok = True
        for ci, c in enumerate(progressions):
            lam, _h = coords[ci][xi]
            cell = []
            for j, arm in enumerate(c.arms):
                off = lam[j] - arm.lo
                block = off // widths[ci][j]
                if margins[ci][j]:
                    t = -(-arm.length // widths[ci][j])
                    if block < 4 or block > t - 4:
                        ok = False
                        break
                cell.append(block)
            if not ok:
                break
            key.append(tuple(cell))
        if ok:
            assignments.setdefault(tuple(key), []).append(xi)
    candidates: list[tuple[CosetProgression, int]] = []

    def popular_route(y_set: GroupSubset, translate_tries: int = 8) -> None:
        k_doub = Fraction(y_set.sumset(y_set).size, y_set.size)
        pop = popular_difference_progression(y_set, k_doub)
        triple = y_set.negate().sumset(y_set).sumset(y_set)
        ladder = [pop]
        if pop.subgroup.size > 1:
            # a pure-arm variant can shrink below the stabilizer granularity
            ladder.append(
                popular_difference_progression(y_set, k_doub, use_stabilizer=False)
            )
        while any(arm.hi >= 1 for arm in ladder[-1].arms):
            prev = ladder[-1]
            ladder.append(
                CosetProgression(
                    group,
                    prev.base,
                    tuple(Arm(a.generator, -(a.hi // 2), a.hi // 2) for a in prev.arms),
                    prev.subgroup,
                )
            )
        for cand in ladder:
            # translates t = -y2 + y3 + y4 ranked by |(cand + t) cap X|
            overlap_counts = _overlap_by_translate(cand.enumerate(), x_set)
            overlap_counts[~triple.mask] = -1
            order = np.argsort(-overlap_counts, kind="stable")
            placed = False
            for t_idx in order[:translate_tries]:
                if overlap_counts[t_idx] < 0:
                    break
                shifted = cand.translate(group.element_from_index(int(t_idx)))
                if shifted.enumerate().is_subset_of(inter):
                    candidates.append(
                        (shifted, int((shifted.enumerate() & x_set).size))
                    )
                    placed = True
                    break
            if placed:
                break

    if assignments:
        best_key = max(assignments, key=lambda k: (len(assignments[k]), k))
        y_set = GroupSubset.from_indices(group, assignments[best_key])
        popular_route(y_set)
        if r == 1:
            cell = _cell_progression(progressions[0], best_key[0], widths[0])
            if cell.enumerate().is_subset_of(inter):
                candidates.append((cell, int((cell.enumerate() & x_set).size)))
        if y_set.size < x_set.size:
            popular_route(x_set)
    else:
        popular_route(x_set)
    first = int(x_set.indices()[0])
    singleton = CosetProgression.singleton(group.element_from_index(first))
    candidates.append((singleton, 1))
    best = max(candidates, key=lambda t: t[1])
    return RefineResult(best[0], best[1])


def _overlap_by_translate(a: GroupSubset, b: GroupSubset) -> np.ndarray:
    """For each t: |(A + t) cap B| = counts of t as b + (-a)."""
    from .groups import sumset_counts

    return sumset_counts(b, a.negate()).astype(np.int64)


def _cell_progression(
    c: CosetProgression, cell: tuple[int, ...], widths: Sequence[int]
) -> CosetProgression:
    base = c.base
    arms = []
    for block, arm, w in zip(cell, c.arms, widths):
        lo = arm.lo + block * w
        hi = min(lo + w - 1, arm.hi)
        base = base + lo * arm.generator
        arms.append(Arm(arm.generator, 0, hi - lo))
    return CosetProgression(c.group, base, tuple(arms), c.subgroup)
