"""Packed GF(2) linear algebra against dense oracles and spec'd examples."""

import numpy as np
import pytest

from conftest import dense_rank, padding_ok
from fdsc import css, gf2
from fdsc.gf2 import BitMatrix, DimensionMismatch, EchelonBasis, RankDeficient


def test_rank_identity():
    assert gf2.rank(BitMatrix.identity(3)) == 3


def test_rank_duplicate_rows():
    assert gf2.rank(BitMatrix.from_dense([[1, 1], [1, 1]])) == 1


def test_rank_toric_vertex_matrix():
    # product of all vertex operators is the identity: rank = L^2 - 1
    code = css.build_toric(2)
    assert gf2.rank(code.x_stabs) == 3
    assert dense_rank(code.x_stabs.to_dense()) == 3


def test_rank_does_not_mutate_input():
    m = BitMatrix.from_dense([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    before = m.data.copy()
    gf2.rank(m)
    assert np.array_equal(m.data, before)


@pytest.mark.parametrize("seed", range(8))
def test_rank_matches_dense_oracle(seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 2, size=(rng.integers(1, 40), rng.integers(1, 40)))
    m = BitMatrix.from_dense(a)
    assert gf2.rank(m) == dense_rank(a)
    assert gf2.rank(m.transpose()) == gf2.rank(m)


@pytest.mark.parametrize("seed", range(6))
def test_rank_invariant_under_permutation(seed):
    rng = np.random.default_rng(100 + seed)
    a = rng.integers(0, 2, size=(12, 17))
    r = gf2.rank(BitMatrix.from_dense(a))
    pr = rng.permutation(12)
    pc = rng.permutation(17)
    assert gf2.rank(BitMatrix.from_dense(a[pr][:, pc])) == r


def test_right_inverse_identity():
    r = gf2.right_inverse(BitMatrix.identity(4))
    assert r == BitMatrix.identity(4)


def test_right_inverse_postcondition():
    m = BitMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    r = gf2.right_inverse(m)
    assert gf2.mul(m, r) == BitMatrix.identity(2)


def test_right_inverse_rank_deficient():
    with pytest.raises(RankDeficient):
        gf2.right_inverse(BitMatrix.from_dense([[1, 1], [1, 1]]))


@pytest.mark.parametrize("seed", range(10))
def test_right_inverse_random_full_rank(seed):
    rng = np.random.default_rng(200 + seed)
    rows = int(rng.integers(1, 12))
    cols = rows + int(rng.integers(0, 12))
    while True:
        a = rng.integers(0, 2, size=(rows, cols))
        if dense_rank(a) == rows:
            break
    m = BitMatrix.from_dense(a)
    for order in ("forward", "reverse"):
        r = gf2.right_inverse(m, pivot_order=order)
        assert gf2.mul(m, r) == BitMatrix.identity(rows)
        assert padding_ok(r)


def test_mul_identity():
    b = BitMatrix.from_dense([[1, 0, 1], [0, 1, 1]])
    assert gf2.mul(BitMatrix.identity(2), b) == b


def test_mul_mod2():
    a = BitMatrix.from_dense([[1, 1]])
    b = BitMatrix.from_dense([[1], [1]])
    assert gf2.mul(a, b).to_dense().tolist() == [[0]]


def test_mul_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        gf2.mul(BitMatrix.identity(2), BitMatrix.identity(3))


def test_mul_toric_column_is_vertex_support():
    # A * (single vertex indicator) = the four edges of that vertex star
    L = 2
    code = css.build_toric(L)
    phi = np.zeros(L * L, dtype=np.uint8)
    phi[1] = 1
    z = gf2.mul_vec(code.x_stabs, phi)
    assert np.array_equal(z, code.x_stabs.to_dense()[:, 1])
    assert z.sum() == 4


@pytest.mark.parametrize("seed", range(6))
def test_mul_matches_dense(seed):
    rng = np.random.default_rng(300 + seed)
    a = rng.integers(0, 2, size=(9, 13))
    b = rng.integers(0, 2, size=(13, 7))
    got = gf2.mul(BitMatrix.from_dense(a), BitMatrix.from_dense(b))
    assert np.array_equal(got.to_dense(), (a @ b) % 2)
    assert padding_ok(got)


def test_solve_identity():
    rhs = np.array([1, 0, 1], dtype=np.uint8)
    x = gf2.solve(BitMatrix.identity(3), rhs)
    assert np.array_equal(x, rhs)


def test_solve_underdetermined():
    m = BitMatrix.from_dense([[1, 1]])
    x = gf2.solve(m, np.array([1], dtype=np.uint8))
    assert x is not None and gf2.mul_vec(m, x).tolist() == [1]


def test_solve_no_solution():
    m = BitMatrix.zeros(2, 3)
    assert gf2.solve(m, np.array([1, 0], dtype=np.uint8)) is None


@pytest.mark.parametrize("seed", range(8))
def test_solve_random(seed):
    rng = np.random.default_rng(400 + seed)
    a = rng.integers(0, 2, size=(10, 14))
    m = BitMatrix.from_dense(a)
    x0 = rng.integers(0, 2, size=14).astype(np.uint8)
    rhs = (a @ x0) % 2
    x = gf2.solve(m, rhs.astype(np.uint8))
    assert x is not None
    assert np.array_equal(gf2.mul_vec(m, x), rhs.astype(np.uint8))


def test_nnz():
    assert gf2.nnz(BitMatrix.zeros(4, 70)) == 0
    assert gf2.nnz(BitMatrix.identity(5)) == 5


def test_nnz_ghz_reconstruction_column():
    from fdsc import synth
    code = css.build_ghz(4)
    m = synth.build_reconstruction(code, synth.SubsetS((0,)))
    assert gf2.nnz(m) == 4
    assert m.to_dense().tolist() == [[1], [1], [1], [1]]


def test_from_entries_round_trip():
    entries = [(0, 0), (0, 65), (2, 127), (1, 64)]
    m = BitMatrix.from_entries(entries, 3, 128)
    d = m.to_dense()
    assert [(i, j) for i, j in entries if not d[i, j]] == []
    assert d.sum() == 4
    assert padding_ok(m)


def test_transpose_matches_numpy():
    rng = np.random.default_rng(1)
    a = rng.integers(0, 2, size=(5, 70))
    t = BitMatrix.from_dense(a).transpose()
    assert np.array_equal(t.to_dense(), a.T)
    assert padding_ok(t)


def test_row_rank_profile_prefix_property():
    rng = np.random.default_rng(2)
    a = rng.integers(0, 2, size=(20, 8))
    m = BitMatrix.from_dense(a)
    profile = gf2.row_rank_profile(m)
    # each selected row increases the rank of the prefix
    for k in range(1, len(profile) + 1):
        assert dense_rank(a[profile[:k]]) == k
    assert len(profile) == dense_rank(a)


def test_column_rank_profile_lex_first():
    a = np.array([[1, 1, 0, 1], [0, 0, 0, 1], [1, 1, 0, 0]])
    assert gf2.column_rank_profile(BitMatrix.from_dense(a)) == [0, 3]


@pytest.mark.parametrize("seed", range(5))
def test_echelon_basis_decompose(seed):
    rng = np.random.default_rng(500 + seed)
    rows = rng.integers(0, 2, size=(10, 12)).astype(np.uint8)
    basis = EchelonBasis(12)
    for r in rows:
        basis.add(r)
    assert basis.rank == dense_rank(rows)
    combo_idx = rng.choice(10, size=4, replace=False)
    target = np.bitwise_xor.reduce(rows[combo_idx], axis=0)
    got = basis.decompose(target)
    assert got is not None
    assert np.array_equal(np.bitwise_xor.reduce(rows[got], axis=0), target)
    outside = np.ones(12, dtype=np.uint8)
    if dense_rank(np.vstack([rows, outside])) > basis.rank:
        assert basis.decompose(outside) is None


def test_zero_dimension_edge_cases():
    empty = BitMatrix.zeros(4, 0)
    assert gf2.rank(empty) == 0
    assert gf2.nnz(empty) == 0
    wide = BitMatrix.zeros(0, 7)
    assert gf2.rank(wide) == 0
    r = gf2.right_inverse(wide)
    assert (r.rows, r.cols) == (7, 0)
