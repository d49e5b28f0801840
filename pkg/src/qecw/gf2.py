"""GF(2) linear algebra on bit-packed rows.

Rows are Python ints used as bit vectors (bit j = column j), so XOR of two
rows is one machine operation per 64 columns.
"""

from __future__ import annotations

import numpy as np


def pack_rows(mat) -> list[int]:
    mat = np.asarray(mat, dtype=np.uint8) & 1
    rows = []
    for row in mat:
        value = 0
        for j in np.flatnonzero(row):
            value |= 1 << int(j)
        rows.append(value)
    return rows


def unpack_row(value: int, n: int) -> np.ndarray:
    return np.array([(value >> j) & 1 for j in range(n)], dtype=np.uint8)


def row_reduce(rows: list[int]) -> list[int]:
    """Reduced echelon basis of the row space (pivot = lowest set bit)."""
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            pivot = (r & -r).bit_length() - 1
            if pivot in basis:
                r ^= basis[pivot]
            else:
                for p, b in list(basis.items()):
                    if (b >> pivot) & 1:
                        basis[p] = b ^ r
                basis[pivot] = r
                break
    return [basis[p] for p in sorted(basis)]


def rank(mat) -> int:
    rows = mat if isinstance(mat, list) else pack_rows(mat)
    return len(row_reduce(rows))


def in_row_space(vec, mat) -> bool:
    rows = pack_rows(mat)
    target = pack_rows(np.atleast_2d(vec))[0]
    return rank(rows + [target]) == rank(rows)


def nullspace(mat) -> np.ndarray:
    """Basis (as rows) of {v : mat @ v = 0 mod 2}."""
    mat = np.asarray(mat, dtype=np.uint8) & 1
    m, n = mat.shape
    a = mat.copy()
    pivots = []
    r = 0
    for c in range(n):
        hit = np.flatnonzero(a[r:, c]) if r < m else []
        if len(hit) == 0:
            continue
        k = r + hit[0]
        a[[r, k]] = a[[k, r]]
        for i in range(m):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        pivots.append(c)
        r += 1
        if r == m:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(n, dtype=np.uint8)
        v[f] = 1
        for i, p in enumerate(pivots):
            v[p] = a[i, f]
        basis.append(v)
    return np.array(basis, dtype=np.uint8).reshape(len(basis), n)


def matvec(mat, vec) -> np.ndarray:
    return (np.asarray(mat, dtype=np.int64) @ np.asarray(vec, dtype=np.int64)) % 2
