"""Exact integer matrix routines."""

import numpy as np
import pytest

from bogolib import intmat


def test_row_hermite_transform_identity():
    rows = [[2, 4, 4], [-6, 6, 12], [10, 4, 16]]
    h, t = intmat.row_hermite(rows)
    for hrow, trow in zip(h, t):
        rebuilt = [
            sum(c * rows[j][k] for j, c in enumerate(trow)) for k in range(3)
        ]
        assert rebuilt == hrow


def test_solve_row_lattice():
    rows = [[2, 0], [0, 3]]
    assert intmat.solve_row_lattice([4, 3], rows) == [2, 1]
    assert intmat.solve_row_lattice([3, 0], rows) is None
    assert intmat.solve_row_lattice([0, 0], rows) == [0, 0]
    assert intmat.solve_row_lattice([0, 0], []) == []
    assert intmat.solve_row_lattice([1], []) is None


def test_solve_random_roundtrip():
    rng = np.random.default_rng(0)
    for _ in range(50):
        m, n = rng.integers(1, 5), rng.integers(1, 5)
        rows = rng.integers(-5, 6, size=(m, n)).tolist()
        coeffs = rng.integers(-4, 5, size=m)
        vec = [int(sum(c * row[k] for c, row in zip(coeffs, rows))) for k in range(n)]
        got = intmat.solve_row_lattice(vec, rows)
        assert got is not None
        rebuilt = [sum(c * row[k] for c, row in zip(got, rows)) for k in range(n)]
        assert rebuilt == vec


def test_det_and_adjugate():
    a = [[2, 1], [7, 4]]
    assert intmat.det_int(a) == 1
    adj = intmat.adjugate_int(a)
    assert adj == [[4, -1], [-7, 2]]
    rng = np.random.default_rng(1)
    for _ in range(20):
        n = int(rng.integers(1, 5))
        m = rng.integers(-6, 7, size=(n, n))
        assert intmat.det_int(m.tolist()) == round(float(np.linalg.det(m)))


def test_smith_normal_form():
    mats = [
        [[2, 0], [0, 3]],
        [[12, 6, 4], [3, 9, 6], [2, 16, 14]],
        [[2, 4], [6, 8]],
        [[0, 0], [0, 0]],
    ]
    rng = np.random.default_rng(2)
    mats += [rng.integers(-9, 10, size=(3, 3)).tolist() for _ in range(20)]
    for m in mats:
        d, u, v = intmat.smith_normal_form(m)
        # U m V == D
        um = np.array(u) @ np.array(m)
        umv = um @ np.array(v)
        assert np.array_equal(umv, np.array(d))
        assert abs(intmat.det_int(u)) == 1
        assert abs(intmat.det_int(v)) == 1
        diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
        for a, b in zip(diag, diag[1:]):
            if a != 0:
                assert b % a == 0
            assert a >= 0


def test_smith_known_form():
    d, _, _ = intmat.smith_normal_form([[12, 6, 4], [3, 9, 6], [2, 16, 14]])
    assert [d[i][i] for i in range(3)] == [1, 10, 30]


def test_unimodular_inverse():
    u = [[1, 2], [1, 3]]
    inv = intmat.unimodular_inverse(u)
    prod = np.array(u) @ np.array(inv)
    assert np.array_equal(prod, np.eye(2, dtype=int))
    with pytest.raises(ValueError):
        intmat.unimodular_inverse([[2, 0], [0, 1]])
