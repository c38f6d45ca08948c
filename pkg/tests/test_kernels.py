"""Backend agreement and determinism of the mod-p matrix kernels."""

import random

import numpy as np
import pytest

from thetagrade import _kernels_py as kpy

try:
    from thetagrade import _kernels_cy as kcy

    HAVE_CY = True
except ImportError:
    HAVE_CY = False


def random_matrix(rng, rows, cols, p):
    return np.array([[rng.randrange(p) for _ in range(cols)] for _ in range(rows)], dtype=np.int64)


@pytest.mark.skipif(not HAVE_CY, reason="compiled kernels not built")
@pytest.mark.parametrize("p", [7, 13, 17, 101])
def test_backends_agree(p):
    rng = random.Random(p)
    for _ in range(80):
        n = rng.randrange(1, 9)
        m = rng.randrange(1, 9)
        a = random_matrix(rng, n, m, p)
        b = random_matrix(rng, m, 5, p)
        assert np.array_equal(kpy.matmul(a, b, p), kcy.matmul(a, b, p))
        R1, p1 = kpy.rref(a, p)
        R2, p2 = kcy.rref(a, p)
        assert np.array_equal(R1, R2) and p1 == p2
        sq = random_matrix(rng, n, n, p)
        e = rng.randrange(20)
        assert np.array_equal(kpy.charpoly(sq, p), kcy.charpoly(sq, p))
        assert np.array_equal(kpy.matpow(sq, e, p), kcy.matpow(sq, e, p))


def test_rref_reproducible():
    rng = random.Random(5)
    p = 13
    a = random_matrix(rng, 6, 9, p)
    first = kpy.rref(a.copy(), p)
    second = kpy.rref(a.copy(), p)
    assert np.array_equal(first[0], second[0])
    assert first[1] == second[1]


def test_charpoly_matches_direct_determinant():
    # det(xI - A) expanded by minors, degree 3
    p = 11
    a = np.array([[2, 1, 0], [0, 3, 5], [7, 0, 1]], dtype=np.int64)
    cp = kpy.charpoly(a, p)
    # evaluate det(xI - A) at every x and compare
    for x in range(p):
        m = (x * np.eye(3, dtype=np.int64) - a) % p
        det = (
            m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
            - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
            + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
        ) % p
        val = 0
        for c in cp:
            val = (val * x + int(c)) % p
        assert val == det
