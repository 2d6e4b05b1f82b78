"""Shared test helpers: dense-elimination oracles and random code generation.

The dense helpers deliberately avoid the packed kernels in fdsc.gf2 so they
can serve as independent cross-checks.
"""

from __future__ import annotations

import numpy as np

from fdsc import css
from fdsc.gf2 import BitMatrix


def dense_rref(a: np.ndarray):
    """Reduced row echelon form over GF(2) on a dense 0/1 array."""
    m = (np.asarray(a, dtype=np.uint8) & 1).copy()
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        hit = np.flatnonzero(m[r:, c])
        if hit.size == 0:
            continue
        p = r + hit[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def dense_rank(a: np.ndarray) -> int:
    return len(dense_rref(a)[1])


def dense_nullspace(a: np.ndarray) -> np.ndarray:
    """Basis (rows) of {x : a @ x = 0 mod 2}."""
    a = np.atleast_2d(np.asarray(a, dtype=np.uint8) & 1)
    rref, pivots = dense_rref(a)
    cols = a.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        x = np.zeros(cols, dtype=np.uint8)
        x[f] = 1
        for r, p in enumerate(pivots):
            x[p] = rref[r, f]
        basis.append(x)
    return np.array(basis, dtype=np.uint8).reshape(len(basis), cols)


def random_css_code(rng: np.random.Generator, n_max: int = 30) -> css.CssCode:
    """Random valid CSS code: random X supports, Z generators from the
    orthogonal complement of the X column space."""
    while True:
        n = int(rng.integers(4, n_max + 1))
        kx = int(rng.integers(1, min(6, n - 1) + 1))
        a = rng.integers(0, 2, size=(n, kx)).astype(np.uint8)
        for j in range(kx):
            if not a[:, j].any():
                a[rng.integers(0, n), j] = 1
        null = dense_nullspace(a.T)
        if null.shape[0] == 0:
            continue
        kz = int(rng.integers(1, 5))
        bcols = []
        for _ in range(kz):
            while True:
                combo = rng.integers(0, 2, size=null.shape[0]).astype(np.uint8)
                v = (combo @ null) % 2
                if v.any():
                    bcols.append(v)
                    break
        b = np.array(bcols, dtype=np.uint8).T
        return css.CssCode(n, BitMatrix.from_dense(a), BitMatrix.from_dense(b))


def padding_ok(m: BitMatrix) -> bool:
    """No set bits beyond the logical column count."""
    if m.cols % 64 == 0 or m.data.size == 0:
        return True
    tail = 64 - (m.cols % 64)
    mask = (~np.uint64(0)) >> np.uint64(tail)
    return bool(np.all(m.data[:, -1] & ~mask == 0))
