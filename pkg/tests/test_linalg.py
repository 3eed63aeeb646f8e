"""Row reduction and kernel tests against brute-force oracles."""
import itertools
import random

import pytest

from kstfree.gf import make_field
from kstfree.linalg import is_scalar_multiple, left_kernel, rank, right_kernel, rref, solve_coords


def brute_rank(rows, spec):
    """Oracle: rank = log_q of the number of distinct span elements."""
    n = len(rows)
    if n == 0:
        return 0
    width = len(rows[0])
    span = set()
    for combo in itertools.product(range(spec.order), repeat=n):
        v = [0] * width
        for c, row in zip(combo, rows):
            for j in range(width):
                v[j] = spec.add(v[j], spec.mul(c, row[j]))
        span.add(tuple(v))
    size = len(span)
    r = 0
    while spec.order**r < size:
        r += 1
    assert spec.order**r == size
    return r


@pytest.mark.parametrize("p,k", [(2, 1), (3, 1), (2, 2)])
def test_rank_matches_brute_force(p, k):
    spec = make_field(p, k)
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randrange(1, 4)
        w = rng.randrange(1, 5)
        rows = [[rng.randrange(spec.order) for _ in range(w)] for _ in range(n)]
        assert rank(rows, spec) == brute_rank(rows, spec)


def test_rref_is_reduced_and_deterministic():
    spec = make_field(5)
    rows = [[2, 4, 1], [1, 2, 3], [3, 1, 0]]
    r1 = rref(rows, spec)
    r2 = rref(rows, spec)
    assert r1 == r2
    rnk, pivots, red = r1
    for i, pc in enumerate(pivots):
        assert red[i][pc] == 1
        for other in range(rnk):
            if other != i:
                assert red[other][pc] == 0


def test_kernels_annihilate():
    spec = make_field(7)
    rng = random.Random(9)
    for _ in range(40):
        n = rng.randrange(1, 5)
        w = rng.randrange(1, 6)
        rows = [[rng.randrange(7) for _ in range(w)] for _ in range(n)]
        rk = rank(rows, spec)
        rkern = right_kernel(rows, spec, w)
        assert len(rkern) == w - rk
        for v in rkern:
            for row in rows:
                acc = 0
                for x, y in zip(row, v):
                    acc = spec.add(acc, spec.mul(x, y))
                assert acc == 0
        lkern = left_kernel(rows, spec)
        assert len(lkern) == n - rk
        for c in lkern:
            for j in range(w):
                acc = 0
                for i in range(n):
                    acc = spec.add(acc, spec.mul(c[i], rows[i][j]))
                assert acc == 0


def test_solve_coords():
    spec = make_field(11)
    basis = [(1, 0, 2), (0, 1, 5)]
    t = (3, 4, (3 * 2 + 4 * 5) % 11)
    assert solve_coords(basis, t, spec) == (3, 4)
    assert solve_coords(basis, (0, 0, 1), spec) is None


def test_is_scalar_multiple():
    spec = make_field(5)
    assert is_scalar_multiple((2, 4), (1, 2), spec)
    assert not is_scalar_multiple((2, 3), (1, 2), spec)
    assert is_scalar_multiple((0, 0), (0, 0), spec)
