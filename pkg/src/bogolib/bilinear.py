"""Subsets of G x H, directional difference operators, bilinear Bohr
varieties, the algebraic regularity partition, the linear covering loop and
the headline containment experiment.

Operator-word convention: the string "hvvhvhh" denotes the composition
d_hor . d_ver . d_ver . d_hor . d_ver . d_hor . d_hor applied to A with the
rightmost operator acting first.  Worked example: word "hv" applied to A
computes d_hor(d_ver(A)) -- the 'v' (rightmost letter) acts first.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from .bohr import BohrSet, bohr_mask
from .errors import (
    GroupMismatchError,
    PreconditionError,
)
from .fourier import bogolyubov_bohr_in_2A2A
from .groups import (
    Character,
    FiniteAbelianGroup,
    GroupElement,
    GroupSubset,
    subgroup_generated,
)
from .lattices import IntegerLattice, annihilator_points, chain_monitor
from .progressions import (
    Arm,
    CosetProgression,
    ExtractionResult,
    FreimanMap,
    extract_subprogression,
    grow_progression_inside,
    is_freiman_homomorphism,
)
from .rng import derive_rng


@dataclass(frozen=True, eq=False)
class BiSet:
    """Subset of G x H as a boolean (|H|, |G|) matrix; flat index y |G| + x."""

    group_x: FiniteAbelianGroup
    group_y: FiniteAbelianGroup
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=bool)
        if mat.shape != (self.group_y.order, self.group_x.order):
            raise ValueError("matrix shape must be (|H|, |G|)")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def empty(cls, gx: FiniteAbelianGroup, gy: FiniteAbelianGroup) -> "BiSet":
        return cls(gx, gy, np.zeros((gy.order, gx.order), dtype=bool))

    @classmethod
    def full(cls, gx: FiniteAbelianGroup, gy: FiniteAbelianGroup) -> "BiSet":
        return cls(gx, gy, np.ones((gy.order, gx.order), dtype=bool))

    @classmethod
    def from_flat_indices(cls, gx, gy, flat) -> "BiSet":
        mat = np.zeros(gx.order * gy.order, dtype=bool)
        flat = np.asarray(list(flat), dtype=np.int64)
        if flat.size:
            mat[flat] = True
        return cls(gx, gy, mat.reshape(gy.order, gx.order))

    @property
    def size(self) -> int:
        return int(self.matrix.sum())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BiSet)
            and self.group_x is other.group_x
            and self.group_y is other.group_y
            and np.array_equal(self.matrix, other.matrix)
        )

    __hash__ = None

    def row(self, y) -> GroupSubset:
        idx = y.index if isinstance(y, GroupElement) else int(y)
        return GroupSubset(self.group_x, self.matrix[idx].copy())

    def column(self, x) -> GroupSubset:
        idx = x.index if isinstance(x, GroupElement) else int(x)
        return GroupSubset(self.group_y, self.matrix[:, idx].copy())

    def transpose(self) -> "BiSet":
        return BiSet(self.group_y, self.group_x, self.matrix.T.copy())

    def is_subset_of(self, other: "BiSet") -> bool:
        return not bool(np.any(self.matrix & ~other.matrix))

    def contains(self, x: GroupElement, y: GroupElement) -> bool:
        return bool(self.matrix[y.index, x.index])


def d_hor(a: BiSet) -> BiSet:
    """Per-row difference set: {(x1 - x2, y) : (x1, y), (x2, y) in A}."""
    gx = a.group_x
    shape = (a.group_y.order,) + gx.tensor_shape
    axes = tuple(range(1, len(shape)))
    t = a.matrix.reshape(shape).astype(np.float64)
    spec = np.fft.fftn(t, axes=axes)
    counts = np.fft.ifftn(spec * np.conj(spec), axes=axes).real
    return BiSet(gx, a.group_y, (counts > 0.5).reshape(a.matrix.shape))


def d_ver(a: BiSet) -> BiSet:
    """Per-column difference set; the transpose dual of d_hor."""
    return d_hor(a.transpose()).transpose()


def iterated_difference(a: BiSet, word: str) -> BiSet:
    """Apply the operator word, rightmost letter first (see module docstring)."""
    for ch in reversed(word):
        if ch == "h":
            a = d_hor(a)
        elif ch == "v":
            a = d_ver(a)
        else:
            raise ValueError(f"operator word may only contain h/v, got {ch!r}")
    return a


# -- Freiman-linear maps into the dual ----------------------------------------


def is_freiman_linear(fmap: FreimanMap, *, chunk: int = 1 << 20) -> bool:
    """L(a - b) = L(a) - L(b) whenever a, b, a - b all lie in the domain."""
    dom = fmap.domain.enumerate()
    idx = dom.indices()
    if idx.size == 0:
        return True
    g = fmap.domain.group
    cod = fmap.codomain
    vals = np.asarray([fmap.table[int(i)].index for i in idx], dtype=np.int64)
    lookup = np.full(g.order, -1, dtype=np.int64)
    lookup[idx] = vals
    neg = g.negation_permutation
    neg_idx = neg[idx]
    rows_per_block = max(1, chunk // max(1, idx.size))
    cod_neg = cod.negation_permutation
    for start in range(0, idx.size, rows_per_block):
        block = slice(start, min(start + rows_per_block, idx.size))
        a_rep = np.repeat(idx[block], idx.size)
        av_rep = np.repeat(vals[block], idx.size)
        diffs = g.add_indices(a_rep, np.tile(neg_idx, idx[block].size))
        inside = lookup[diffs] >= 0
        if not np.any(inside):
            continue
        want = cod.add_indices(av_rep[inside], cod_neg[np.tile(vals, idx[block].size)[inside]])
        if np.any(lookup[diffs[inside]] != want):
            return False
    return True


def linear_map_on_progression(
    progression: CosetProgression,
    dual: FiniteAbelianGroup,
    arm_values: Sequence[GroupElement],
    base_value: Optional[GroupElement] = None,
    subgroup_value: Optional[Callable[[int], GroupElement]] = None,
) -> FreimanMap:
    """Tabulate y = base + sum k_i v_i + h  ->  base_value + sum k_i w_i.

    Requires a proper progression so coordinates are unique; the subgroup
    part maps through ``subgroup_value`` (zero by default).
    """
    if not progression.is_proper():
        raise PreconditionError("progression must be proper to carry a linear table")
    base_value = dual.element_from_index(0) if base_value is None else base_value
    table: dict[int, GroupElement] = {}
    for idx, (coeffs, h_idx) in progression.coordinates().items():
        v = base_value
        for k, w in zip(coeffs, arm_values):
            v = v + k * w
        if subgroup_value is not None:
            v = v + subgroup_value(h_idx)
        table[idx] = v
    return FreimanMap(progression, dual, table, order=2)


# -- bilinear Bohr varieties ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class BilinearVariety:
    """Pairs (x, y): y in C and x in B(Gamma cup {L_1(y)..L_r(y)}; rho)."""

    group_x: FiniteAbelianGroup
    gamma: tuple[Character, ...]
    rho: Fraction
    progression: CosetProgression
    maps: tuple[FreimanMap, ...]

    def __post_init__(self):
        object.__setattr__(self, "rho", Fraction(self.rho))
        for fmap in self.maps:
            if fmap.codomain is not self.group_x.dual:
                raise GroupMismatchError("variety maps must target the dual of G")

    @cached_property
    def _biset(self) -> BiSet:
        gx = self.group_x
        gy = self.progression.group
        base = bohr_mask(gx, self.gamma, self.rho)
        mat = np.zeros((gy.order, gx.order), dtype=bool)
        for yi in self.progression.enumerate().indices():
            yi = int(yi)
            row = base.copy()
            for fmap in self.maps:
                row &= bohr_mask(gx, [fmap.table[yi]], self.rho)
            mat[yi] = row
        return BiSet(gx, gy, mat)

    def enumerate(self) -> BiSet:
        return self._biset

    @property
    def size(self) -> int:
        return self._biset.size

    def describe(self) -> dict:
        return {
            "gamma": [list(chi.coords) for chi in self.gamma],
            "rho": f"{self.rho.numerator}/{self.rho.denominator}",
            "progression": {
                "base": list(self.progression.base.coords),
                "arms": [
                    {"generator": list(a.generator.coords), "lo": a.lo, "hi": a.hi}
                    for a in self.progression.arms
                ],
                "subgroup_size": self.progression.subgroup.size,
            },
            "maps": len(self.maps),
        }


def variety_enumerate(variety: BilinearVariety) -> BiSet:
    return variety.enumerate()


def variety_contained_in(variety: BilinearVariety, d: BiSet) -> bool:
    return variety.enumerate().is_subset_of(d)


def variety_membership_bruteforce(variety: BilinearVariety) -> BiSet:
    """Independent double-loop membership check (for cross-validation)."""
    from .groups import char_eval, torus_dist

    gx = variety.group_x
    gy = variety.progression.group
    cmask = variety.progression.enumerate()
    mat = np.zeros((gy.order, gx.order), dtype=bool)
    for y in gy.elements():
        if y.index not in cmask:
            continue
        chars = list(variety.gamma) + [m.table[y.index] for m in variety.maps]
        for x in gx.elements():
            ok = all(
                torus_dist(char_eval(chi, x)) <= variety.rho for chi in chars
            )
            mat[y.index, x.index] = ok
    return BiSet(gx, gy, mat)


# -- quasirandomness certification ---------------------------------------------


@dataclass(frozen=True)
class QRCheck:
    delta: float
    pass_i: bool
    pass_ii: bool
    fail_fraction_i: float
    fail_fraction_ii: float
    sampled: bool


def qr_property_check(
    cell: CosetProgression,
    gamma: Sequence[Character],
    maps: Sequence[FreimanMap],
    rho_i: Fraction,
    eta: Fraction,
    group_x: FiniteAbelianGroup,
    *,
    pair_cutoff: int = 1 << 20,
    pair_samples: int = 10_000,
    seed: int = 0,
) -> QRCheck:
    """Both regularity properties of a cell at radius rho_i.

    delta is the median of |B(Gamma cup L(y); rho_i)| / |B(Gamma; rho_i)|
    over the cell; property (i) asks a 1 - eta fraction of rows to deviate
    by at most eta |G| from delta |B(Gamma)|, property (ii) the analogue
    for pairs with delta^2.  Pair statistics are sampled above the cutoff.
    """
    rho_i = Fraction(rho_i)
    eta_f = float(eta)
    ys = cell.enumerate().indices()
    if ys.size == 0:
        raise PreconditionError("empty cell")
    e = group_x.exponent
    base_num = np.zeros(group_x.order, dtype=np.int64)
    for chi in gamma:
        n = group_x.char_numerators(chi)
        base_num = np.maximum(base_num, np.minimum(n, e - n))
    row_num = np.zeros((ys.size, group_x.order), dtype=np.int64)
    for j, yi in enumerate(ys):
        acc = base_num
        for fmap in maps:
            n = group_x.char_numerators(fmap.table[int(yi)])
            acc = np.maximum(acc, np.minimum(n, e - n))
        row_num[j] = acc
    num, den = rho_i.numerator, rho_i.denominator
    base_mask = base_num * den <= num * e
    b0 = int(base_mask.sum())
    row_masks = row_num * den <= num * e
    sizes = row_masks.sum(axis=1)
    delta = float(np.median(sizes)) / b0 if b0 else 1.0
    tol = eta_f * group_x.order + 1e-9
    dev_i = np.abs(sizes - delta * b0)
    fail_i = float(np.mean(dev_i > tol))
    pass_i = fail_i <= eta_f + 1e-12
    n_pairs = ys.size * ys.size
    sampled = n_pairs > pair_cutoff
    if not sampled:
        f = row_masks.astype(np.float64)
        inter = f @ f.T
        dev_ii = np.abs(inter - delta * delta * b0)
        fail_ii = float(np.mean(dev_ii > tol))
    else:
        rng = derive_rng(seed, 29)
        ia = rng.integers(0, ys.size, size=pair_samples)
        ib = rng.integers(0, ys.size, size=pair_samples)
        inter = (row_masks[ia] & row_masks[ib]).sum(axis=1)
        dev_ii = np.abs(inter - delta * delta * b0)
        fail_ii = float(np.mean(dev_ii > tol))
    pass_ii = fail_ii <= eta_f + 1e-12
    return QRCheck(delta, pass_i, pass_ii, fail_i, fail_ii, sampled)


# -- algebraic regularity partition ---------------------------------------------


@dataclass(frozen=True)
class RegularityCell:
    progression: CosetProgression
    rho: Fraction
    delta: float
    eta_achieved: float
    certified: bool
    sampled: bool


@dataclass(frozen=True)
class RegularityResult:
    cells: tuple[RegularityCell, ...]
    certified: bool
    steps: int
    relation_lattice: IntegerLattice


def _rho_candidates(rho: Fraction, eta: Fraction, cap: int = 64) -> list[Fraction]:
    """Grid rho - j eta^2 rho / 1000 for j in [0, 500 eta^-2], <= cap points."""
    rho, eta = Fraction(rho), Fraction(eta)
    j_max = _ceil(500 / (eta * eta))
    if j_max + 1 <= cap:
        js = list(range(j_max + 1))
    else:
        js = sorted({j_max * t // (cap - 1) for t in range(cap)})
    return [rho - j * eta * eta * rho / 1000 for j in js]


def _ceil(x: Fraction) -> int:
    x = Fraction(x)
    return -((-x.numerator) // x.denominator)


@dataclass
class _QState:
    """Shrinking progression Q_s tracked through strides over C's arms."""

    strides: list[int]
    halves: list[int]
    subgroup: GroupSubset

    def progression(self, c: CosetProgression) -> CosetProgression:
        arms = tuple(
            Arm(s * arm.generator, -m, m)
            for arm, s, m in zip(c.arms, self.strides, self.halves)
        )
        return CosetProgression(c.group, c.group.zero, arms, self.subgroup)


def _grid_cells(c: CosetProgression, q: _QState) -> list[CosetProgression]:
    """Partition C compatibly with translates of the half-shrunk Q_s.

    Arm positions split by residue modulo the stride and then into blocks
    of at most max(1, M_j) stride steps, so each cell minus itself lands
    inside Q_s; the subgroup part splits into cosets of H_s.
    """
    group = c.group
    per_arm: list[list[tuple[int, int, int]]] = []  # (start, stride, count)
    for arm, s, m in zip(c.arms, q.strides, q.halves):
        width = max(1, m)
        options = []
        span = arm.hi - arm.lo
        for rem in range(min(s, span + 1)):
            total = (span - rem) // s + 1
            t = 0
            while t < total:
                count = min(width, total - t)
                options.append((arm.lo + rem + s * t, s, count))
                t += count
        per_arm.append(options)
    h0 = c.subgroup
    hs = q.subgroup
    reps: list[int] = []
    covered = np.zeros(group.order, dtype=bool)
    for idx in h0.indices():
        if not covered[int(idx)]:
            reps.append(int(idx))
            covered |= hs.translate(group.element_from_index(int(idx))).mask
    cells = []
    for combo in itertools.product(*per_arm):
        for rep in reps:
            base = c.base + group.element_from_index(rep)
            arms = []
            for (start, stride, count), arm in zip(combo, c.arms):
                base = base + start * arm.generator
                arms.append(Arm(stride * arm.generator, 0, count - 1))
            cells.append(CosetProgression(group, base, tuple(arms), hs))
    return cells


def _extract_relation(
    qprog: CosetProgression,
    maps: Sequence[FreimanMap],
    lattice: IntegerLattice,
    box_radius: int,
) -> Optional[tuple[int, ...]]:
    """Most frequent small coefficient vector annihilating the maps on Q_s,
    outside the known relation lattice."""
    r = len(maps)
    if r == 0:
        return None
    dual = maps[0].codomain
    votes: dict[tuple[int, ...], int] = {}
    for zi in qprog.enumerate().indices():
        chars = [m.table[int(zi)] for m in maps]
        pts = annihilator_points(chars, box_radius)
        for row in pts:
            lam = tuple(int(v) for v in row)
            if not any(lam):
                continue
            votes[lam] = votes.get(lam, 0) + 1
    best = None
    for lam in sorted(votes, key=lambda t: (-votes[t], t)):
        if not lattice.member(lam):
            best = lam
            break
    return best


def regularity_partition(
    c: CosetProgression,
    gamma: Sequence[Character],
    maps: Sequence[FreimanMap],
    rho: Fraction,
    eta: Fraction,
    step_cap: int,
    group_x: FiniteAbelianGroup,
    *,
    relation_box: int = 4,
    rho_grid_cap: int = 64,
    seed: int = 0,
) -> RegularityResult:
    """Partition C into cells that pass both quasirandomness properties.

    Loop: certify cells at some grid radius; on failure extract a new
    vanishing coefficient vector of the maps, shrink Q_s through its
    Freiman-subgroup and repartition.  The relation lattice grows strictly
    inside [-box, box]^r, so the step count obeys the chain-monitor budget;
    cells still failing at the cap are flagged rather than forced.
    """
    if not c.is_symmetric or not c.is_proper():
        raise PreconditionError("C must be a proper symmetric coset progression")
    rho, eta = Fraction(rho), Fraction(eta)
    candidates = _rho_candidates(rho, eta, rho_grid_cap)
    q = _QState([1] * c.rank, [arm.hi for arm in c.arms], c.subgroup)
    lattice = IntegerLattice(len(maps))
    budget = chain_monitor(max(1, len(maps)), relation_box)
    steps = 0
    single_first = True
    while True:
        partition = [c] if single_first else _grid_cells(c, q)
        cells: list[RegularityCell] = []
        all_pass = True
        for cell in partition:
            chosen: Optional[RegularityCell] = None
            last: Optional[QRCheck] = None
            for rho_c in candidates:
                res = qr_property_check(
                    cell, gamma, maps, rho_c, eta, group_x, seed=seed
                )
                last = res
                if res.pass_i and res.pass_ii:
                    chosen = RegularityCell(
                        cell,
                        rho_c,
                        res.delta,
                        max(res.fail_fraction_i, res.fail_fraction_ii),
                        True,
                        res.sampled,
                    )
                    break
            if chosen is None:
                all_pass = False
                cells.append(
                    RegularityCell(
                        cell,
                        candidates[0],
                        last.delta,
                        max(last.fail_fraction_i, last.fail_fraction_ii),
                        False,
                        last.sampled,
                    )
                )
            else:
                cells.append(chosen)
        if all_pass:
            return RegularityResult(tuple(cells), True, steps, lattice)
        if single_first:
            single_first = False
            continue
        if steps >= step_cap or steps >= budget:
            return RegularityResult(tuple(cells), False, steps, lattice)
        qprog = q.progression(c)
        lam = _extract_relation(qprog, maps, lattice, relation_box)
        if lam is None:
            return RegularityResult(tuple(cells), False, steps, lattice)
        # Freiman-subgroup of Q_s where the relation vanishes
        zero_idx = []
        dual = maps[0].codomain
        for zi in qprog.enumerate().indices():
            acc = dual.element_from_index(0)
            for coef, m in zip(lam, maps):
                acc = acc + coef * m.table[int(zi)]
            if acc.is_zero:
                zero_idx.append(int(zi))
        fset = GroupSubset.from_indices(c.group, zero_idx)
        alpha = Fraction(fset.size, qprog.size)
        ext = extract_subprogression(fset, qprog, alpha)
        q = _QState(
            [s * ell for s, ell in zip(q.strides, ext.ells)],
            [arm.hi for arm in ext.progression.arms],
            ext.progression.subgroup,
        )
        lattice = lattice.with_row(lam)
        steps += 1


# -- respected quadruples and the linear covering loop ---------------------------


def respected_quadruple_count(
    group: FiniteAbelianGroup,
    codomain: FiniteAbelianGroup,
    table: dict[int, GroupElement],
) -> int:
    """#{(a,b,c,d) in A^4 : a + b = c + d and f(a) + f(b) = f(c) + f(d)}."""
    idx = np.asarray(sorted(table), dtype=np.int64)
    if idx.size == 0:
        return 0
    vals = np.asarray([table[int(i)].index for i in idx], dtype=np.int64)
    n = idx.size
    ksum = group.add_indices(np.repeat(idx, n), np.tile(idx, n))
    vsum = codomain.add_indices(np.repeat(vals, n), np.tile(vals, n))
    combined = ksum * codomain.order + vsum
    _, counts = np.unique(combined, return_counts=True)
    return int((counts.astype(np.int64) ** 2).sum())


@dataclass(frozen=True)
class CoverResult:
    maps: tuple[FreimanMap, ...]
    rounds: int
    condition_fraction: float
    complete: bool


def _value_set_diff(dual: FiniteAbelianGroup, a: frozenset, b: frozenset) -> frozenset:
    neg = dual.negation_permutation
    table = dual.add_table
    if table is not None:
        return frozenset(int(table[x, neg[y]]) for x in a for y in b)
    av = np.asarray(sorted(a), dtype=np.int64)
    bv = neg[np.asarray(sorted(b), dtype=np.int64)]
    out = dual.add_indices(np.repeat(av, bv.size), np.tile(bv, av.size))
    return frozenset(int(v) for v in out)


def _value_set_sum(dual: FiniteAbelianGroup, a: frozenset, b: frozenset) -> frozenset:
    table = dual.add_table
    if table is not None:
        return frozenset(int(table[x, y]) for x in a for y in b)
    av = np.asarray(sorted(a), dtype=np.int64)
    bv = np.asarray(sorted(b), dtype=np.int64)
    out = dual.add_indices(np.repeat(av, bv.size), np.tile(bv, av.size))
    return frozenset(int(v) for v in out)


def linear_cover(
    y_set: GroupSubset,
    value_sets: dict[int, Sequence[GroupElement]],
    hom_finder: Optional[Callable] = None,
    rounds_cap: int = 16,
    seed: int = 0,
    *,
    samples: int = 10_000,
) -> CoverResult:
    """Cover bounded character sets U_y by values of few Freiman maps.

    Iterates while the triple condition
    ``(U_{y+z} - U_z) cap (U_{y+w} - U_w) not subset (U'_{y+z} - U'_z) + (U'_{y+w} - U'_w)``
    holds on an estimated alpha^4/2 fraction of (y, z, w); each round draws
    a random table f(y) in U_y and asks the homomorphism finder for a map
    agreeing with it on uncovered values.  Maps that cover nothing new are
    discarded; the zero map is always present.
    """
    h = y_set.group
    y_idx = [int(i) for i in y_set.indices()]
    if not y_idx:
        return CoverResult((), 0, 0.0, True)
    dual = next(iter(value_sets.values()))[0].group
    for yi in y_idx:
        vals = value_sets.get(yi)
        if not vals or not any(v.is_zero for v in vals):
            raise PreconditionError("every U_y must exist and contain 0")
    if hom_finder is None:
        hom_finder = exhaustive_hom_finder
    u_sets = {yi: frozenset(v.index for v in value_sets[yi]) for yi in y_idx}
    zero_map = FreimanMap(
        CosetProgression.whole_group(h),
        dual,
        {i: dual.element_from_index(0) for i in range(h.order)},
        order=2,
    )
    maps: list[FreimanMap] = [zero_map]
    alpha = y_set.size / h.order
    threshold = alpha**4 / 2

    def covered_sets() -> dict[int, frozenset]:
        out: dict[int, frozenset] = {}
        for yi in y_idx:
            vals = set()
            for m in maps:
                if yi in m.table and m.table[yi].index in u_sets[yi]:
                    vals.add(m.table[yi].index)
            out[yi] = frozenset(vals)
        return out

    u_diff_cache: dict[tuple[int, int], frozenset] = {}

    def condition_fraction(cov: dict[int, frozenset], rng) -> float:
        hits = 0
        ys = rng.integers(0, h.order, size=samples)
        zs = rng.integers(0, h.order, size=samples)
        ws = rng.integers(0, h.order, size=samples)
        yz = h.add_indices(ys, zs)
        yw = h.add_indices(ys, ws)
        inside = (
            y_set.mask[zs]
            & y_set.mask[ws]
            & y_set.mask[yz]
            & y_set.mask[yw]
        )
        cov_diff_cache: dict[tuple[int, int], frozenset] = {}
        pair_rhs_cache: dict[tuple[int, int, int, int], frozenset] = {}

        def u_diff(a: int, b: int) -> frozenset:
            key = (a, b)
            if key not in u_diff_cache:
                u_diff_cache[key] = _value_set_diff(dual, u_sets[a], u_sets[b])
            return u_diff_cache[key]

        def cov_diff(a: int, b: int) -> frozenset:
            key = (a, b)
            if key not in cov_diff_cache:
                cov_diff_cache[key] = _value_set_diff(dual, cov[a], cov[b])
            return cov_diff_cache[key]

        for i in np.flatnonzero(inside):
            a, b = int(yz[i]), int(zs[i])
            cc, dd = int(yw[i]), int(ws[i])
            lhs = u_diff(a, b) & u_diff(cc, dd)
            rkey = (a, b, cc, dd)
            rhs = pair_rhs_cache.get(rkey)
            if rhs is None:
                rhs = _value_set_sum(dual, cov_diff(a, b), cov_diff(cc, dd))
                pair_rhs_cache[rkey] = rhs
            if not lhs <= rhs:
                hits += 1
        return hits / samples

    rounds = 0
    frac = 1.0
    for rounds in range(rounds_cap + 1):
        cov = covered_sets()
        rng = derive_rng(seed, 1000 + rounds)
        frac = condition_fraction(cov, rng)
        if frac < threshold:
            return CoverResult(tuple(maps), rounds, frac, True)
        if rounds == rounds_cap:
            break
        draw_rng = derive_rng(seed, 2000 + rounds)
        table = {}
        for yi in y_idx:
            options = sorted(u_sets[yi])
            table[yi] = options[int(draw_rng.integers(0, len(options)))]
        uncovered = {
            yi: dual.element_from_index(table[yi])
            for yi in y_idx
            if table[yi] not in cov[yi]
        }
        cand = hom_finder(h, dual, uncovered)
        if cand is None:
            continue
        gained = sum(
            1
            for yi in y_idx
            if yi in cand.table
            and cand.table[yi].index in u_sets[yi]
            and cand.table[yi].index not in cov[yi]
        )
        if gained >= 1:
            maps.append(cand)
    return CoverResult(tuple(maps), rounds, frac, False)


def exhaustive_hom_finder(
    group: FiniteAbelianGroup,
    dual: FiniteAbelianGroup,
    points: dict[int, GroupElement],
    *,
    min_agree: int = 3,
    direction_cap: int = 64,
) -> Optional[FreimanMap]:
    """Desk-scale Freiman-map finder: affine fits along cyclic lines.

    Scans directions v (bounded set), buckets the sample points into
    cosets of <v>, and for the best-populated line fits t(anchor + k v) =
    t0 + k w by exhausting w over the dual.  Returns a recentred map on a
    proper progression of length ceil(ord(v)/2), or None when nothing
    reaches ``min_agree`` agreements.
    """
    if not points:
        return None
    pts_idx = np.asarray(sorted(points), dtype=np.int64)
    pts_val = np.asarray([points[int(i)].index for i in pts_idx], dtype=np.int64)
    directions = []
    for i in range(group.rank):
        directions.append(group.element(tuple(1 if j == i else 0 for j in range(group.rank))))
    for idx in range(1, min(group.order, direction_cap + 1)):
        e = group.element_from_index(idx)
        if e not in directions:
            directions.append(e)
    best = None  # (agreement, v, anchor_idx, k_of_pts, w)
    for v in directions:
        if v.is_zero:
            continue
        ord_v = v.order
        if ord_v < 2:
            continue
        steps = np.asarray(
            [(k * v).index for k in range(ord_v)], dtype=np.int64
        )
        # representative of the <v>-coset of each point: min over y - k v
        shifts = np.stack(
            [
                group.add_indices(pts_idx, np.full(pts_idx.size, int(group.negation_permutation[s]), dtype=np.int64))
                for s in steps
            ]
        )
        reps = shifts.min(axis=0)
        k_of = shifts.argmin(axis=0) * 0
        for j in range(pts_idx.size):
            k_of[j] = int(np.flatnonzero(shifts[:, j] == reps[j])[0])
        # best-populated line
        uniq, counts = np.unique(reps, return_counts=True)
        line_rep = int(uniq[np.argmax(counts)])
        on_line = np.flatnonzero(reps == line_rep)
        if on_line.size < min_agree:
            continue
        ks = k_of[on_line]
        anchor_pos = int(on_line[np.argmin(ks)])
        k0 = int(k_of[anchor_pos])
        t0 = int(pts_val[anchor_pos])
        # all w at once: agreement[w] = #{j : t0 + (k_j - k0) w == value_j}
        moduli = np.asarray(dual.moduli, dtype=np.int64)
        coords = dual.coords_matrix
        agree_per_w = np.zeros(dual.order, dtype=np.int64)
        for j, pos in enumerate(on_line):
            c = int(ks[j]) - k0
            scaled = dual.index_of_coords((c * coords) % moduli)
            pred = dual.add_indices(
                np.full(dual.order, t0, dtype=np.int64), scaled
            )
            agree_per_w += pred == pts_val[pos]
        w_idx = int(np.argmax(agree_per_w))
        agree = int(agree_per_w[w_idx])
        if best is None or agree > best[0]:
            w = dual.element_from_index(w_idx)
            best = (agree, v, line_rep, k0, t0, w, sorted(int(k) for k in ks))
    if best is None or best[0] < min_agree:
        return None
    _, v, line_rep, k0, t0, w, _ = best
    length = -(-v.order // 2)  # no wraparound: differences stay decodable
    anchor = group.element_from_index(line_rep) + k0 * v
    prog = CosetProgression(
        group,
        anchor,
        (Arm(v, 0, length - 1),),
        GroupSubset.from_indices(group, [0]),
    )
    if not prog.is_proper():
        prog = CosetProgression(
            group, anchor, (Arm(v, 0, 0),), GroupSubset.from_indices(group, [0])
        )
    table = {}
    for idx, (coeffs, _h) in prog.coordinates().items():
        table[idx] = dual.element_from_index(t0) + coeffs[0] * w
    return FreimanMap(prog, dual, table, order=2)


# -- headline containment experiment ---------------------------------------------


@dataclass(frozen=True)
class ExperimentOutcome:
    report: dict
    variety: Optional[BilinearVariety]
    difference_set: BiSet


def group_spec_string(group: FiniteAbelianGroup) -> str:
    return "x".join(f"Z{q}" for q in group.moduli)


def sample_biset(
    gx: FiniteAbelianGroup, gy: FiniteAbelianGroup, delta: float, seed: int
) -> BiSet:
    """Seeded subset of G x H with exactly ceil(delta |G| |H|) points."""
    total = gx.order * gy.order
    n = min(total, math.ceil(delta * total))
    rng = derive_rng(seed, 3)
    flat = rng.choice(total, size=n, replace=False)
    return BiSet.from_flat_indices(gx, gy, flat)


def _pinning_frequencies(gx: FiniteAbelianGroup) -> tuple[tuple[Character, ...], Fraction]:
    """Frequency set and radius whose Bohr set is exactly {0}."""
    dual = gx.dual
    chars = tuple(
        dual.element(tuple(1 if j == i else 0 for j in range(dual.rank)))
        for i in range(dual.rank)
    )
    return chars, Fraction(1, 4 * gx.exponent)


def _bohr_inside(
    gx: FiniteAbelianGroup, allowed: GroupSubset, *, char_cap: int = 4096
) -> Optional[BohrSet]:
    """Verified Bohr subset of a symmetric set containing 0, size >= 2.

    Tries cyclic subgroups pinned by their annihilators, then single-char
    level sets; returns the largest hit.
    """
    from .groups import annihilator_subgroup, subgroup_generators

    if allowed.size == gx.order:
        return BohrSet(gx, (), Fraction(1, 2))
    best: Optional[BohrSet] = None

    def consider(cand: BohrSet):
        nonlocal best
        enum = cand.enumerate()
        if enum.size >= 2 and enum.is_subset_of(allowed):
            if best is None or enum.size > best.enumerate().size:
                best = cand

    e = gx.exponent
    for xi in allowed.indices()[:16]:
        xi = int(xi)
        if xi == 0:
            continue
        cyc = subgroup_generated(gx, [gx.element_from_index(xi)])
        if cyc.is_subset_of(allowed):
            gens = subgroup_generators(annihilator_subgroup(cyc))
            consider(BohrSet(gx, tuple(gens), Fraction(1, 4 * e)))
    dual = gx.dual
    nonzero = [int(i) for i in allowed.indices() if i != 0][:4]
    for chi_idx in range(1, min(dual.order, char_cap)):
        chi = dual.element_from_index(chi_idx)
        n = gx.char_numerators(chi)
        dist = np.minimum(n, e - n)
        for xi in nonzero:
            level = GroupSubset(gx, dist <= dist[xi])
            if level.size >= 2 and level.is_subset_of(allowed):
                consider(BohrSet(gx, (chi,), Fraction(int(dist[xi]), e)))
    return best


def main_theorem_experiment(
    gx: FiniteAbelianGroup,
    gy: FiniteAbelianGroup,
    delta: float,
    seed: int,
    search_budget: int = 8,
    word: str = "hvvhvhh",
    hom_finder: Optional[Callable] = None,
) -> ExperimentOutcome:
    """Sample a set of the given density, take the iterated difference set
    and search for a verified bilinear Bohr variety inside it.

    The search ladder: the full product, progressions over full or dense
    rows with a Bohr witness on the common row-set, covering maps fitted to
    the per-row Bogolyubov spectra, then a column progression through 0 and
    the pinned single point as floor.  Every candidate is gated by the
    exact containment verifier, and the largest verified variety wins.
    """
    start = time.monotonic()
    a = sample_biset(gx, gy, delta, seed)
    d = iterated_difference(a, word)
    pin_gamma, pin_rho = _pinning_frequencies(gx)
    trivial_sub = GroupSubset.from_indices(gy, [0])
    candidates: list[BilinearVariety] = []

    def consider(v: BilinearVariety) -> bool:
        if variety_contained_in(v, d):
            candidates.append(v)
            return True
        return False

    # full product
    full_ok = consider(
        BilinearVariety(
            gx, (), Fraction(1, 2), CosetProgression.whole_group(gy), ()
        )
    )
    if not full_ok:
        # rows of D that are all of G
        full_rows = GroupSubset(gy, np.all(d.matrix, axis=1))
        if 0 in full_rows and full_rows.size > 0:
            prog = grow_progression_inside(full_rows, rank_cap=2)
            consider(BilinearVariety(gx, (), Fraction(1, 2), prog, ()))
        # dense-row progression with a Bohr witness on the common rows
        col0 = d.column(gx.zero)
        if 0 in col0 and col0.size >= 1:
            prog = grow_progression_inside(col0, rank_cap=2)
            common = np.ones(gx.order, dtype=bool)
            for yi in prog.enumerate().indices():
                common &= d.matrix[int(yi)]
            witness = _bohr_inside(gx, GroupSubset(gx, common))
            if witness is not None:
                consider(
                    BilinearVariety(
                        gx, witness.frequencies, witness.radius, prog, ()
                    )
                )
        # covering maps fitted to per-row Bogolyubov spectra
        if search_budget > 0:
            dense_rows = [
                yi
                for yi in range(gy.order)
                if a.matrix[yi].sum() * 2 >= delta * gx.order
            ]
            value_sets: dict[int, list[Character]] = {}
            zero_char = gx.dual.element_from_index(0)
            for yi in dense_rows:
                row = GroupSubset(gx, a.matrix[yi].copy())
                if row.size == 0:
                    continue
                bohr = bogolyubov_bohr_in_2A2A(row)
                vals = [zero_char] + [
                    chi for chi in bohr.frequencies if not chi.is_zero
                ][:7]
                value_sets[yi] = vals
            if value_sets:
                yset = GroupSubset.from_indices(gy, sorted(value_sets))
                cover = linear_cover(
                    yset,
                    value_sets,
                    hom_finder,
                    rounds_cap=search_budget,
                    seed=seed,
                )
                for fmap in cover.maps[1:]:
                    dom = fmap.domain
                    base_val = fmap.table[
                        min(int(i) for i in dom.enumerate().indices())
                    ]
                    recentred = dom.translate(-dom.base)
                    table = {}
                    ok = True
                    for idx in recentred.enumerate().indices():
                        src = int(
                            gy.add_indices(
                                np.asarray([int(idx)]), np.asarray([dom.base.index])
                            )[0]
                        )
                        if src not in fmap.table:
                            ok = False
                            break
                        table[int(idx)] = fmap.table[src] - base_val
                    if not ok:
                        continue
                    lmap = FreimanMap(recentred, gx.dual, table, order=2)
                    for rho_c in (Fraction(1, 4), Fraction(1, 8)):
                        consider(
                            BilinearVariety(
                                gx,
                                (base_val,),
                                rho_c,
                                recentred,
                                (lmap,),
                            )
                        )
        # column progression through 0 with pinned x = 0
        col0 = d.column(gx.zero)
        best_arm = None
        for gi in col0.indices():
            gi = int(gi)
            if gi == 0:
                continue
            g = gy.element_from_index(gi)
            m = 0
            cur = gy.zero
            seen = {0}
            while True:
                cur = cur + g
                if cur.index in seen or cur.index not in col0:
                    break
                seen.add(cur.index)
                m += 1
            if m >= 1 and (best_arm is None or m > best_arm[1]):
                best_arm = (g, m)
        if best_arm is not None:
            g, m = best_arm
            prog = CosetProgression(gy, gy.zero, (Arm(g, 0, m),), trivial_sub)
            if prog.is_proper():
                consider(BilinearVariety(gx, pin_gamma, pin_rho, prog, ()))
    # floor: the single pinned point
    if a.size > 0:
        consider(
            BilinearVariety(
                gx, pin_gamma, pin_rho, CosetProgression.singleton(gy.zero), ()
            )
        )
    best = max(candidates, key=lambda v: v.size) if candidates else None
    elapsed_ms = int((time.monotonic() - start) * 1000)
    report = {
        "schema_version": 1,
        "group_g": group_spec_string(gx),
        "group_h": group_spec_string(gy),
        "delta": float(delta),
        "seed": int(seed),
        "word": word,
        "d_size": d.size,
        "variety": best.describe() if best else None,
        "variety_size": best.size if best else 0,
        "verified": best is not None,
        "elapsed_ms": elapsed_ms,
    }
    return ExperimentOutcome(report, best, d)
