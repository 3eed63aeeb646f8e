"""Exact Gaussian elimination over a FieldSpec.

Matrices are lists of rows of integer encodings.  Pivoting is fixed
(first nonzero column, lowest row) so reduced forms and kernel bases are
deterministic and reports stay reproducible.  Sizes here are small by
construction; the bulk numpy kernels never need elimination.
"""
from __future__ import annotations

from .gf import FieldSpec


def rref(rows, spec: FieldSpec):
    """Reduced row echelon form.

    Returns (rank, pivot_columns, reduced_rows).  Input is not mutated.
    """
    m = [list(r) for r in rows]
    if not m:
        return 0, [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        sel = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                sel = i
                break
        if sel is None:
            continue
        m[r], m[sel] = m[sel], m[r]
        inv = spec.inv(m[r][c])
        m[r] = [spec.mul(inv, x) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [spec.sub(x, spec.mul(f, y)) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return r, pivots, m


def rank(rows, spec: FieldSpec) -> int:
    return rref(rows, spec)[0]


def right_kernel(rows, spec: FieldSpec, ncols: int):
    """Basis of {x : M x = 0}, one vector per free column, deterministic."""
    r, pivots, red = rref(rows, spec)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = spec.neg(red[i][fc])
        basis.append(tuple(v))
    return basis


def left_kernel(rows, spec: FieldSpec):
    """Basis of {c : c M = 0} via the transpose."""
    if not rows:
        return []
    t = [[row[j] for row in rows] for j in range(len(rows[0]))]
    return right_kernel(t, spec, len(rows))


def solve_coords(basis_rows, target, spec: FieldSpec):
    """Coordinates of target in the span of basis_rows, or None.

    basis_rows need not be square; uniqueness holds when they are
    linearly independent, which is the only way this is used.
    """
    n = len(basis_rows)
    if n == 0:
        return None
    width = len(target)
    aug = [[basis_rows[i][j] for i in range(n)] + [target[j]] for j in range(width)]
    r, pivots, red = rref(aug, spec)
    if n in pivots:  # target column is a pivot: inconsistent
        return None
    coords = [0] * n
    for i, pc in enumerate(pivots):
        coords[pc] = red[i][n]
    # confirm exactly (defensive; basis_rows independent makes this pass)
    for j in range(width):
        acc = 0
        for i in range(n):
            acc = spec.add(acc, spec.mul(coords[i], basis_rows[i][j]))
        if acc != target[j]:
            return None
    return tuple(coords)


def is_scalar_multiple(u, v, spec: FieldSpec) -> bool:
    """True iff u = c v for some nonzero c (both vectors nonzero)."""
    lead = next((i for i, x in enumerate(v) if x != 0), None)
    if lead is None:
        return all(x == 0 for x in u)
    if u[lead] == 0:
        return False
    c = spec.mul(u[lead], spec.inv(v[lead]))
    return all(u[i] == spec.mul(c, v[i]) for i in range(len(u)))
