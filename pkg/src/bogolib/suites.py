"""Named verification suites.

Each check runs a seeded batch of instances against an instance-checkable
theorem and reports pass/fail plus measured quantities.  The same
functions back both the CLI harness (``bogolib --suite ...``) and the
acceptance test module; all sizes and tolerances default to the values the
acceptance criteria pin down.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

import bogolib as bg
from . import quasirandom as qr_mod
from .bilinear import (
    BilinearVariety,
    linear_map_on_progression,
    main_theorem_experiment,
    qr_property_check,
    regularity_partition,
    variety_contained_in,
    variety_membership_bruteforce,
)
from .bohr import (
    bohr_enumerate,
    bohr_size_estimate,
    dense_difference_cover,
    find_min_r,
    large_spectrum_certify,
    size_bounds,
    verify_bohr_sum,
    weak_regular_radius_search,
)
from .errors import BogolibError, NoWeaklyRegularRadiusError
from .fourier import GroupFunction, dft, quadruple_count_all
from .groups import GroupSubset, subgroup_generated
from .lattices import chain_monitor, span_cover
from .progressions import (
    Arm,
    CosetProgression,
    FreimanMap,
    change_basis,
    extract_subprogression,
    is_freiman_homomorphism,
    partial_projectivity,
    popular_difference_progression,
)
from .rng import derive_rng


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)


@dataclass
class SuiteConfig:
    seed: int = 0
    step_cap: int = 12
    rounds_cap: int = 8
    search_budget: int = 6
    word: str = "hvvhvhh"


def _random_moduli(rng, max_order: int) -> list[int]:
    shape = rng.integers(0, 3)
    if shape == 0:
        return [int(rng.integers(4, max_order + 1))]
    if shape == 1:
        q1 = int(rng.integers(2, 9))
        return [q1, int(rng.integers(2, max(3, max_order // q1) + 1))]
    q1 = int(rng.integers(2, 5))
    q2 = int(rng.integers(2, 5))
    rest = max(2, max_order // (q1 * q2))
    return [q1, q2, int(rng.integers(2, rest + 1))]


def _random_radius(rng, max_den: int = 24) -> Fraction:
    den = int(rng.integers(5, max_den + 1))
    num = int(rng.integers(1, max(2, den // 4 + 1)))
    return Fraction(num, den)


# -- criterion 1 ------------------------------------------------------------


def check_bohr_size_bounds(
    seed: int, instances: int = 200, max_order: int = 2048, max_freqs: int = 3
) -> CheckResult:
    violations = 0
    doubling_checked = 0
    for i in range(instances):
        rng = derive_rng(seed, 100_000 + i)
        g = bg.make_group(_random_moduli(rng, max_order))
        k = int(rng.integers(1, max_freqs + 1))
        freqs = [
            g.dual.element_from_index(int(rng.integers(0, g.order)))
            for _ in range(k)
        ]
        rho = _random_radius(rng)
        try:
            sb = size_bounds(g, freqs, rho)
        except BogolibError:
            violations += 1
            continue
        if sb.doubled_size is not None:
            doubling_checked += 1
    return CheckResult(
        "bohr_size_bounds",
        violations == 0,
        {
            "instances": instances,
            "violations": violations,
            "doubling_checked": doubling_checked,
        },
    )


# -- criteria 2 + 3 ----------------------------------------------------------


def _weakly_regular_instances(
    seed: int, count: int, max_order: int, max_k: int, eta: Fraction, eps: Fraction
):
    found = []
    attempt = 0
    while len(found) < count and attempt < 50 * count:
        rng = derive_rng(seed, 200_000 + attempt)
        attempt += 1
        g = bg.make_group(_random_moduli(rng, max_order))
        k = int(rng.integers(1, max_k + 1))
        freqs = [
            g.dual.element_from_index(int(rng.integers(0, g.order)))
            for _ in range(k)
        ]
        try:
            # half-epsilon annulus serves both the size formula (eps) and
            # the large-spectrum hypothesis (eps / 2)
            rho = weak_regular_radius_search(
                g, freqs, Fraction(1, 8), Fraction(3, 8), eta, eps / 2
            )
        except NoWeaklyRegularRadiusError:
            continue
        found.append((g, freqs, rho))
    return found


def check_size_formula(
    seed: int,
    instances: int = 50,
    max_order: int = 512,
    max_k: int = 2,
    eta: Fraction = Fraction(1, 10),
    eps: Fraction = Fraction(1, 10),
) -> CheckResult:
    batch = _weakly_regular_instances(seed, instances, max_order, max_k, eta, eps)
    worst = 0.0
    failures = 0
    for g, freqs, rho in batch:
        est = bohr_size_estimate(g, freqs, rho, eta, eps)
        true = bohr_enumerate(g, freqs, rho).size
        err = abs(est - true)
        tol = float(2 * eps * g.order)
        worst = max(worst, err / tol if tol else 0.0)
        if err > tol:
            failures += 1
    return CheckResult(
        "bohr_size_formula",
        failures == 0 and len(batch) >= instances,
        {
            "instances": len(batch),
            "failures": failures,
            "worst_error_ratio": round(worst, 6),
        },
    )


def check_large_spectrum(
    seed: int,
    instances: int = 50,
    max_order: int = 512,
    max_k: int = 2,
    eta: Fraction = Fraction(1, 10),
    eps: Fraction = Fraction(1, 10),
) -> CheckResult:
    batch = _weakly_regular_instances(seed, instances, max_order, max_k, eta, eps)
    certified = 0
    failures = 0
    for g, freqs, rho in batch:
        b = bohr_enumerate(g, freqs, rho)
        coeffs = np.abs(dft(GroupFunction.indicator(b)).values)
        deduped = list(dict.fromkeys(f.coords for f in freqs))
        for chi_idx in np.flatnonzero(coeffs >= float(eps)):
            chi = g.dual.element_from_index(int(chi_idx))
            rep = large_spectrum_certify(g, freqs, rho, eta, eps, chi)
            if rep is None:
                failures += 1
                continue
            combo = g.dual.element_from_index(0)
            for a, coords in zip(rep, deduped):
                combo = combo + a * g.dual.element(coords)
            if combo != chi:
                failures += 1
            else:
                certified += 1
    return CheckResult(
        "bohr_large_spectrum",
        failures == 0 and len(batch) >= instances,
        {"instances": len(batch), "certified": certified, "failures": failures},
    )


# -- criterion 4 -------------------------------------------------------------


def check_bohr_sum(
    seed: int, instances: int = 20, max_order: int = 256
) -> CheckResult:
    failures = 0
    controls = 0
    max_r = 0
    done = 0
    attempt = 0
    while done < instances and attempt < 50 * instances:
        rng = derive_rng(seed, 300_000 + attempt)
        attempt += 1
        g = bg.make_group([int(rng.integers(8, max_order + 1))])
        k1 = int(rng.integers(1, 3))
        k2 = int(rng.integers(1, 3))
        f1 = [g.dual.element_from_index(int(rng.integers(0, g.order))) for _ in range(k1)]
        f2 = [g.dual.element_from_index(int(rng.integers(0, g.order))) for _ in range(k2)]
        rho1 = Fraction(1, int(rng.integers(6, 12)))
        rho2 = Fraction(1, int(rng.integers(6, 12)))
        done += 1
        try:
            r = find_min_r(g, f1, rho1, f2, rho2)
        except BogolibError:
            failures += 1
            continue
        max_r = max(max_r, r)
        if not verify_bohr_sum(g, f1, rho1, f2, rho2, r):
            failures += 1
        rhs = bohr_enumerate(g, f1, rho1) + bohr_enumerate(g, f2, rho2)
        if rhs.size < g.order:
            controls += 1
            if verify_bohr_sum(g, f1, rho1, f2, rho2, 0):
                failures += 1
    return CheckResult(
        "bohr_sum_identity",
        failures == 0 and done >= instances and controls > 0,
        {
            "instances": done,
            "failures": failures,
            "negative_controls": controls,
            "max_min_r": max_r,
        },
    )


# -- criterion 5 -------------------------------------------------------------


def check_dense_difference(
    seed: int, instances: int = 100, max_order: int = 256
) -> CheckResult:
    failures = 0
    for i in range(instances):
        rng = derive_rng(seed, 400_000 + i)
        g = bg.make_group(_random_moduli(rng, max_order))
        k = int(rng.integers(1, 3))
        freqs = [
            g.dual.element_from_index(int(rng.integers(0, g.order)))
            for _ in range(k)
        ]
        rho = Fraction(1, int(rng.integers(4, 10)))
        b = bohr_enumerate(g, freqs, rho)
        k_eff = len(dict.fromkeys(f.coords for f in freqs))
        removable = int(b.size / 4 ** (k_eff + 1))
        idx = b.indices()
        drop = set(
            int(v)
            for v in rng.choice(idx, size=min(removable, idx.size), replace=False)
        )
        a = GroupSubset.from_indices(g, [int(v) for v in idx if int(v) not in drop])
        try:
            dense_difference_cover(a, freqs, rho)
        except BogolibError:
            failures += 1
    return CheckResult(
        "dense_difference_cover",
        failures == 0,
        {"instances": instances, "failures": failures},
    )


# -- criterion 6 -------------------------------------------------------------


def check_lattice_spanning(
    seed: int,
    instances: int = 100,
    max_k: int = 4,
    max_radius: int = 5,
    max_order: int = 10_000,
) -> CheckResult:
    failures = 0
    max_gens = 0
    max_coeff = 0
    for i in range(instances):
        rng = derive_rng(seed, 500_000 + i)
        g = bg.make_group(_random_moduli(rng, max_order))
        k = int(rng.integers(1, max_k + 1))
        radius = int(rng.integers(1, max_radius + 1))
        ambient = [
            g.element_from_index(int(rng.integers(0, g.order))) for _ in range(k)
        ]
        span = bg.bounded_span(g, ambient, radius)
        idx = span.indices()
        size = int(rng.integers(1, min(40, idx.size) + 1))
        members = [
            g.element_from_index(int(v))
            for v in rng.choice(idx, size=size, replace=False)
        ]
        try:
            cover = span_cover(g, members, ambient, radius)
        except BogolibError:
            failures += 1
            continue
        max_gens = max(max_gens, len(cover.generators))
        max_coeff = max(max_coeff, cover.coefficient_bound)
        if len(cover.generators) > cover.budget:
            failures += 1
    return CheckResult(
        "lattice_spanning",
        failures == 0,
        {
            "instances": instances,
            "failures": failures,
            "max_generators": max_gens,
            "max_coefficient": max_coeff,
            "scale_monitor": (2 * max_radius * max_k) ** (max_k + 3),
        },
    )


# -- criterion 7 -------------------------------------------------------------


def _pair_multiplicity_count(g, subset: GroupSubset) -> np.ndarray:
    """Independent oracle: counts via pair-sum multiplicities."""
    idx = subset.indices()
    sums = g.add_indices(np.repeat(idx, idx.size), np.tile(idx, idx.size))
    r = np.bincount(sums, minlength=g.order).astype(np.int64)
    out = np.zeros(g.order, dtype=np.int64)
    neg = g.negation_permutation
    for x in range(g.order):
        shifted = g.add_indices(
            np.arange(g.order, dtype=np.int64), np.full(g.order, int(neg[x]))
        )
        out[x] = int((r * r[shifted]).sum())
    return out


def check_quadruple_counting(
    seed: int, cases: int = 1000, max_order: int = 64, max_size: int = 16
) -> CheckResult:
    mismatches = 0
    popular_failures = 0
    for i in range(cases):
        rng = derive_rng(seed, 600_000 + i)
        g = bg.make_group(_random_moduli(rng, max_order))
        size = int(rng.integers(1, min(max_size, g.order) + 1))
        subset = GroupSubset.from_indices(
            g, rng.choice(g.order, size=size, replace=False)
        )
        counts = quadruple_count_all(subset)
        oracle = _pair_multiplicity_count(g, subset)
        if not np.array_equal(counts, oracle):
            mismatches += 1
        if i % 10 == 0:
            k = Fraction(subset.sumset(subset).size, subset.size)
            prog = popular_difference_progression(subset, k)
            thr = Fraction(subset.size**3, 64) / k
            for xi in prog.enumerate().indices():
                if oracle[int(xi)] < thr:
                    popular_failures += 1
    return CheckResult(
        "quadruple_counting",
        mismatches == 0 and popular_failures == 0,
        {
            "cases": cases,
            "mismatches": mismatches,
            "popular_failures": popular_failures,
        },
    )


# -- criterion 8 -------------------------------------------------------------


def check_partial_projectivity(
    seed: int, instances: int = 50, max_order: int = 64, max_kernel: int = 8
) -> CheckResult:
    import itertools

    failures = 0
    done = 0
    attempt = 0
    while done < instances and attempt < 100 * instances:
        rng = derive_rng(seed, 700_000 + attempt)
        attempt += 1
        g = bg.make_group(_random_moduli(rng, max_order))
        h = bg.make_group(_random_moduli(rng, max_order))
        kernel = subgroup_generated(
            h, [h.element_from_index(int(rng.integers(0, h.order)))]
        )
        if kernel.size > max_kernel:
            continue
        orders, basis = bg.invariant_factors(g)
        reps = []
        ok = True
        for n in orders:
            cands = [e for e in h.elements() if (n * e) in kernel]
            if not cands:
                ok = False
                break
            reps.append(cands[int(rng.integers(0, len(cands)))])
        if not ok:
            continue
        lookup = {}
        for coeffs in itertools.product(*[range(n) for n in orders]):
            x = g.zero
            v = h.zero
            for c, b, r in zip(coeffs, basis, reps):
                x = x + c * b
                v = v + c * r
            lookup[x.index] = v
        done += 1
        try:
            res = partial_projectivity(g, h, kernel, lambda x: lookup[x.index], 2)
        except BogolibError:
            failures += 1
            continue
        prog, lift = res.progression, res.lift
        if 2 ** len(res.heavy_indices) > kernel.size:
            failures += 1
        if prog.size * kernel.size < g.order:
            failures += 1
        if not is_freiman_homomorphism(lift, 2, exhaustive_cutoff=max_order):
            failures += 1
        for idx, val in lift.table.items():
            if (lookup[idx] - val) not in kernel:
                failures += 1
                break
    return CheckResult(
        "partial_projectivity",
        failures == 0 and done >= instances,
        {"instances": done, "failures": failures},
    )


# -- criterion 9 -------------------------------------------------------------


def check_extraction_and_basis_moves(
    seed: int, extraction_instances: int = 30, moves: int = 1000
) -> CheckResult:
    failures = 0
    for i in range(extraction_instances):
        rng = derive_rng(seed, 800_000 + i)
        order = int(rng.integers(30, 200))
        g = bg.make_group([order])
        n = int(rng.integers(3, max(4, order // 4)))
        c = CosetProgression.symmetric(g, [(g.element([1]), n)])
        if not c.is_proper():
            continue
        stride = int(rng.integers(1, 4))
        strided = [
            (lam * stride) % order
            for lam in range(-(n // stride), n // stride + 1)
        ] if stride <= n else [0]
        a = GroupSubset.from_indices(g, sorted({v % order for v in strided}))
        alpha = Fraction(a.size, c.size)
        try:
            res = extract_subprogression(a, c, alpha)
        except BogolibError:
            failures += 1
            continue
        if not res.progression.enumerate().is_subset_of(a):
            failures += 1
        if any(ell > 20 / alpha for ell in res.ells):
            failures += 1
        for arm, carm, ell in zip(res.progression.arms, c.arms, res.ells):
            if arm.hi not in (0, carm.hi // ell):
                failures += 1
    move_count = 0
    rng = derive_rng(seed, 850_000)
    groups = [bg.make_group(m) for m in ([4, 6], [8, 3], [2, 2, 4], [9, 27])]
    while move_count < moves:
        for g in groups:
            factors, basis = bg.invariant_factors(g)
            for _ in range(moves // (4 * 4) + 1):
                r = len(basis)
                kind = ["upper", "lower", "unit"][int(rng.integers(0, 3))] if r > 1 else "unit"
                try:
                    if kind == "upper" and r > 1:
                        i = int(rng.integers(0, r - 1))
                        j = int(rng.integers(i + 1, r))
                        basis = change_basis(g, basis, ("upper", i, j, int(rng.integers(-3, 4))))
                    elif kind == "lower" and r > 1:
                        j = int(rng.integers(0, r - 1))
                        i = int(rng.integers(j + 1, r))
                        basis = change_basis(g, basis, ("lower", i, j, int(rng.integers(-3, 4))))
                    else:
                        i = int(rng.integers(0, r))
                        lam = 1
                        while True:
                            lam = int(rng.integers(1, 12))
                            if math.gcd(lam, factors[i]) == 1:
                                break
                        basis = change_basis(g, basis, ("unit", i, lam))
                except BogolibError:
                    failures += 1
                if [b.order for b in basis] != factors:
                    failures += 1
                move_count += 1
                if move_count >= moves:
                    break
            if move_count >= moves:
                break
    return CheckResult(
        "extraction_and_basis_moves",
        failures == 0,
        {
            "extraction_instances": extraction_instances,
            "moves": move_count,
            "failures": failures,
        },
    )


# -- criterion 10 ------------------------------------------------------------


def check_regularity(
    seed: int,
    instances: int = 20,
    max_order: int = 256,
    max_maps: int = 2,
    eta: Fraction = Fraction(1, 4),
    step_cap: int = 12,
) -> CheckResult:
    failures = 0
    certified_cells = 0
    total_cells = 0
    max_steps = 0
    for i in range(instances):
        rng = derive_rng(seed, 900_000 + i)
        gx = bg.make_group([int(rng.integers(8, max_order + 1))])
        gy = bg.make_group([int(rng.integers(8, max_order + 1))])
        half = int(rng.integers(2, max(3, gy.order // 3)))
        half = min(half, (gy.order - 1) // 2)
        c = CosetProgression.symmetric(gy, [(gy.element([1]), half)])
        r = int(rng.integers(1, max_maps + 1))
        maps = [
            linear_map_on_progression(
                c, gx.dual, [gx.dual.element_from_index(int(rng.integers(0, gx.order)))]
            )
            for _ in range(r)
        ]
        rho = Fraction(1, 4)
        res = regularity_partition(c, [], maps, rho, eta, step_cap, gx)
        max_steps = max(max_steps, res.steps)
        if res.steps > chain_monitor(r, 4):
            failures += 1
        for cell in res.cells:
            total_cells += 1
            if not cell.certified:
                continue
            certified_cells += 1
            if not (rho / 2 <= cell.rho <= rho):
                failures += 1
            again = qr_property_check(
                cell.progression, [], maps, cell.rho, eta, gx
            )
            if not (again.pass_i and again.pass_ii):
                failures += 1
    return CheckResult(
        "regularity_partition",
        failures == 0,
        {
            "instances": instances,
            "failures": failures,
            "cells": total_cells,
            "certified_cells": certified_cells,
            "max_steps": max_steps,
        },
    )


# -- criterion 11 ------------------------------------------------------------


def check_quasirandom_appendix(seed: int, triples: int = 1000) -> CheckResult:
    rng = derive_rng(seed, 1_000_000)
    failures = 0
    for _ in range(triples):
        nx, ny = int(rng.integers(2, 10)), int(rng.integers(2, 10))
        f = rng.choice([-1.0, 1.0], size=(nx, ny))
        u = rng.normal(size=nx)
        v = rng.normal(size=ny)
        try:
            qr_mod.correlation_bound_check(f, u, v)
        except BogolibError:
            failures += 1
    # exhaustive one-sided implication over all 4x4 bipartite graphs
    bits = np.arange(1 << 16, dtype=np.uint32)
    cells = ((bits[:, None] >> np.arange(16, dtype=np.uint32)[None, :]) & 1).astype(
        np.float64
    )
    graphs = cells.reshape(-1, 4, 4)
    dens = graphs.mean(axis=(1, 2))
    degrees = graphs.sum(axis=2)
    e1 = np.abs(degrees - dens[:, None] * 4).mean(axis=1) / 4
    codeg = np.einsum("gxy,gzy->gxz", graphs, graphs)
    e2 = np.abs(codeg - (dens**2)[:, None, None] * 4).mean(axis=(1, 2)) / 4
    eps = np.maximum(e1, e2)
    balanced = graphs - dens[:, None, None]
    inner = np.einsum("gxy,gzy->gxz", balanced, balanced) / 4
    box4 = (inner**2).mean(axis=(1, 2))
    bound = (3 * eps**0.125) ** 4
    violations = int(np.count_nonzero(box4 > bound**2 + 1e-9))
    single = np.zeros((2, 2))
    single[0, 0] = 1
    box_ok = abs(qr_mod.box_norm(single - 0.25) - (7 / 256) ** 0.25) < 1e-9
    passed = failures == 0 and violations == 0 and box_ok
    return CheckResult(
        "quasirandom_appendix",
        passed,
        {
            "triples": triples,
            "correlation_failures": failures,
            "exhaustive_graphs": 1 << 16,
            "one_sided_violations": violations,
            "single_edge_box_norm_ok": box_ok,
        },
    )


# -- criterion 12 ------------------------------------------------------------


def check_main_theorem(
    seed: int,
    orders: tuple[int, ...] = (16, 64, 256),
    deltas: tuple[float, ...] = (0.05, 0.1, 0.3),
    seeds_per_config: int = 10,
    word: str = "hvvhvhh",
    search_budget: int = 6,
    crosscheck_budget: int = 4,
) -> CheckResult:
    failures = 0
    runs = 0
    nontrivial = 0
    crosschecked = 0
    for order in orders:
        gx = bg.make_group([order])
        gy = bg.make_group([order])
        for delta in deltas:
            for s in range(seeds_per_config):
                run_seed = derive_rng(seed, 1_100_000 + runs).integers(0, 1 << 62)
                out = main_theorem_experiment(
                    gx,
                    gy,
                    delta,
                    int(run_seed),
                    search_budget=search_budget,
                    word=word,
                )
                runs += 1
                rep = out.report
                if not rep["verified"]:
                    failures += 1
                    continue
                if not variety_contained_in(out.variety, out.difference_set):
                    failures += 1
                if rep["d_size"] > 1:
                    if rep["variety_size"] > 1:
                        nontrivial += 1
                    else:
                        failures += 1
                if crosschecked < crosscheck_budget and gx.order * gy.order <= 4096:
                    brute = variety_membership_bruteforce(out.variety)
                    if brute != out.variety.enumerate():
                        failures += 1
                    if not brute.is_subset_of(out.difference_set):
                        failures += 1
                    crosschecked += 1
    return CheckResult(
        "main_theorem_containment",
        failures == 0,
        {
            "runs": runs,
            "failures": failures,
            "nontrivial": nontrivial,
            "crosschecked": crosschecked,
        },
    )


# -- suite registry -----------------------------------------------------------

SUITES: dict[str, list[Callable[..., CheckResult]]] = {
    "bohr": [
        check_bohr_size_bounds,
        check_size_formula,
        check_large_spectrum,
        check_bohr_sum,
        check_dense_difference,
    ],
    "progression": [
        check_quadruple_counting,
        check_partial_projectivity,
        check_extraction_and_basis_moves,
    ],
    "lattice": [check_lattice_spanning],
    "bilinear": [check_main_theorem],
    "quasirandom": [check_quasirandom_appendix],
    "regularity": [check_regularity],
    "main-theorem": [check_main_theorem],
}


def suite_names() -> list[str]:
    return sorted(SUITES) + ["all"]


def run_suite(name: str, config: Optional[SuiteConfig] = None) -> dict:
    """Run a named suite; returns the JSON-serializable report."""
    config = config or SuiteConfig()
    if name == "all":
        checks: list[Callable[..., CheckResult]] = []
        seen = set()
        for suite in sorted(SUITES):
            for fn in SUITES[suite]:
                if fn.__name__ not in seen:
                    seen.add(fn.__name__)
                    checks.append(fn)
    elif name in SUITES:
        checks = SUITES[name]
    else:
        raise KeyError(f"unknown suite {name!r}; choose from {suite_names()}")
    results = []
    start = time.monotonic()
    for fn in checks:
        t0 = time.monotonic()
        res = fn(config.seed)
        results.append(
            {
                "name": res.name,
                "passed": bool(res.passed),
                "measured": res.measured,
                "elapsed_ms": int((time.monotonic() - t0) * 1000),
            }
        )
    return {
        "schema_version": 1,
        "kind": "suite",
        "suite": name,
        "seed": config.seed,
        "checks": results,
        "all_passed": all(r["passed"] for r in results),
        "elapsed_ms": int((time.monotonic() - start) * 1000),
    }
