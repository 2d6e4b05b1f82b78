"""Bit-packed dense linear algebra over GF(2).

Matrices are stored row-major as numpy uint64 words, 64 bits per word,
little-endian within each word.  Padding bits beyond ``cols`` in the last
word of each row are kept at zero by every operation.  All public
operations work on copies; no input is mutated.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

WORD = 64


class DimensionMismatch(ValueError):
    """Operand shapes are incompatible."""


class RankDeficient(ValueError):
    """A full-row-rank matrix was required."""


def _words(cols: int) -> int:
    return (cols + WORD - 1) // WORD


class BitMatrix:
    """Dense GF(2) matrix with 64-bit packed rows."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Optional[np.ndarray] = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        self.rows = rows
        self.cols = cols
        if data is None:
            data = np.zeros((rows, _words(cols)), dtype=np.uint64)
        else:
            if data.shape != (rows, _words(cols)):
                raise DimensionMismatch(
                    f"data shape {data.shape} != {(rows, _words(cols))}")
            data = np.ascontiguousarray(data, dtype=np.uint64)
        self.data = data

    # -- constructors -------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        m = cls(n, n)
        for i in range(n):
            m.data[i, i >> 6] = np.uint64(1) << np.uint64(i & 63)
        return m

    @classmethod
    def from_dense(cls, arr) -> "BitMatrix":
        a = np.atleast_2d(np.asarray(arr, dtype=np.uint8) & 1)
        rows, cols = a.shape
        m = cls(rows, cols)
        if cols:
            padded = np.zeros((rows, _words(cols) * WORD), dtype=np.uint8)
            padded[:, :cols] = a
            m.data = np.packbits(padded, axis=1, bitorder="little").view(
                np.uint64).reshape(rows, _words(cols)).copy()
        return m

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: int) -> "BitMatrix":
        """Build from an iterable of per-row column-index lists."""
        rows = list(rows)
        entries = [(i, j) for i, support in enumerate(rows) for j in support]
        return cls.from_entries(entries, len(rows), cols)

    @classmethod
    def from_entries(cls, entries: Sequence[tuple[int, int]], rows: int,
                     cols: int) -> "BitMatrix":
        """Build from (row, col) positions of the 1-bits (duplicates OR together)."""
        m = cls(rows, cols)
        if not len(entries):
            return m
        e = np.asarray(entries, dtype=np.int64)
        if e[:, 0].min() < 0 or e[:, 0].max() >= rows \
                or e[:, 1].min() < 0 or e[:, 1].max() >= cols:
            raise IndexError("entry out of range")
        words = _words(cols)
        flat = e[:, 0] * words + (e[:, 1] >> 6)
        bits = np.uint64(1) << (e[:, 1] & 63).astype(np.uint64)
        np.bitwise_or.at(m.data.reshape(-1), flat, bits)
        return m

    # -- element access ----------------------------------------------

    def get(self, i: int, j: int) -> int:
        return int((self.data[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1))

    def set(self, i: int, j: int, val: int) -> None:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError((i, j))
        bit = np.uint64(1) << np.uint64(j & 63)
        if val & 1:
            self.data[i, j >> 6] |= bit
        else:
            self.data[i, j >> 6] &= ~bit

    def to_dense(self) -> np.ndarray:
        if self.cols == 0:
            return np.zeros((self.rows, 0), dtype=np.uint8)
        bits = np.unpackbits(self.data.view(np.uint8), axis=1, bitorder="little")
        return np.ascontiguousarray(bits[:, :self.cols])

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.data.copy())

    def row_select(self, idx: Sequence[int]) -> "BitMatrix":
        idx = np.asarray(idx, dtype=np.intp)
        return BitMatrix(len(idx), self.cols, self.data[idx].copy())

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    def row_weights(self) -> np.ndarray:
        if self.cols == 0:
            return np.zeros(self.rows, dtype=np.int64)
        return np.bitwise_count(self.data).sum(axis=1).astype(np.int64)

    def __eq__(self, other) -> bool:
        return (isinstance(other, BitMatrix) and self.rows == other.rows
                and self.cols == other.cols and np.array_equal(self.data, other.data))

    def __hash__(self):
        raise TypeError("BitMatrix is unhashable")

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


# -- elimination core ----------------------------------------------------


def _eliminate(data: np.ndarray, col_order: Iterable[int], reduced: bool = False):
    """In-place Gaussian elimination over the given pivot-column order.

    Returns a list of (pivot_row, pivot_col) in elimination order.  Rows at
    and above previously placed pivots are only touched when ``reduced``.
    """
    nrows = data.shape[0]
    pivots = []
    r = 0
    one = np.uint64(1)
    for col in col_order:
        if r == nrows:
            break
        w = col >> 6
        b = np.uint64(col & 63)
        colbits = (data[r:, w] >> b) & one
        nz = np.flatnonzero(colbits)
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            data[[r, p]] = data[[p, r]]
        below = r + 1 + np.flatnonzero((data[r + 1:, w] >> b) & one)
        if below.size:
            data[below] ^= data[r]
        if reduced and r:
            above = np.flatnonzero((data[:r, w] >> b) & one)
            if above.size:
                data[above] ^= data[r]
        pivots.append((r, col))
        r += 1
    return pivots


def rank(m: BitMatrix) -> int:
    """Dimension of the image, by Gaussian elimination on a working copy."""
    work = m.data.copy()
    return len(_eliminate(work, range(m.cols)))


def column_rank_profile(m: BitMatrix) -> list[int]:
    """Lexicographically first set of independent columns (pivot columns)."""
    work = m.data.copy()
    return [col for _, col in _eliminate(work, range(m.cols))]


def row_rank_profile(m: BitMatrix, order: Optional[Sequence[int]] = None) -> list[int]:
    """Row indices forming the first independent row set in the given scan order.

    Equivalent to greedily keeping each row that is independent of the rows
    kept before it.  Returns indices into ``m`` (not positions in ``order``).
    """
    if order is None:
        order = range(m.rows)
    order = list(order)
    mt = BitMatrix.from_dense(m.to_dense()[order].T)
    profile = column_rank_profile(mt)
    return [order[j] for j in profile]


def mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Matrix product over GF(2)."""
    if a.cols != b.rows:
        raise DimensionMismatch(f"{a.cols} != {b.rows}")
    out = BitMatrix.zeros(a.rows, b.cols)
    if a.rows == 0 or a.cols == 0 or b.cols == 0:
        return out
    abits = a.to_dense()
    for i in range(a.rows):
        idx = np.flatnonzero(abits[i])
        if idx.size:
            out.data[i] = np.bitwise_xor.reduce(b.data[idx], axis=0)
    return out


def mul_vec(m: BitMatrix, x: np.ndarray) -> np.ndarray:
    """Matrix-vector product; ``x`` is a 0/1 array of length m.cols."""
    x = np.asarray(x, dtype=np.uint8) & 1
    if x.shape != (m.cols,):
        raise DimensionMismatch(f"vector length {x.shape} != {m.cols}")
    idx = np.flatnonzero(x)
    if idx.size == 0:
        return np.zeros(m.rows, dtype=np.uint8)
    return np.bitwise_xor.reduce(m.to_dense()[:, idx], axis=1)


def nnz(m: BitMatrix) -> int:
    """Number of set bits (padding excluded by construction)."""
    if m.data.size == 0:
        return 0
    return int(np.bitwise_count(m.data).sum())


def _hstack_identity(m: BitMatrix) -> tuple[np.ndarray, int]:
    """Pack [m | I] with the identity starting at a word boundary."""
    wl = _words(m.cols)
    wr = _words(m.rows)
    aug = np.zeros((m.rows, wl + wr), dtype=np.uint64)
    aug[:, :wl] = m.data
    for i in range(m.rows):
        aug[i, wl + (i >> 6)] = np.uint64(1) << np.uint64(i & 63)
    return aug, wl * WORD


def right_inverse(m: BitMatrix, pivot_order: str = "forward") -> BitMatrix:
    """Any R with m @ R = I, via Gauss-Jordan with column pivoting.

    ``pivot_order`` selects the column scan direction ("forward" or
    "reverse"); different orders may return different right inverses.
    Raises RankDeficient unless m has full row rank.
    """
    if pivot_order not in ("forward", "reverse"):
        raise ValueError(pivot_order)
    cols = range(m.cols) if pivot_order == "forward" else range(m.cols - 1, -1, -1)
    aug, off = _hstack_identity(m)
    pivots = _eliminate(aug, cols, reduced=True)
    if len(pivots) < m.rows:
        raise RankDeficient(f"rank {len(pivots)} < {m.rows} rows")
    out = BitMatrix.zeros(m.cols, m.rows)
    wr = _words(m.rows)
    for prow, pcol in pivots:
        out.data[pcol] = aug[prow, off >> 6: (off >> 6) + wr]
    return out


def solve(m: BitMatrix, rhs: np.ndarray) -> Optional[np.ndarray]:
    """Any x with m @ x = rhs, or None if no solution exists."""
    rhs = np.asarray(rhs, dtype=np.uint8) & 1
    if rhs.shape != (m.rows,):
        raise DimensionMismatch(f"rhs length {rhs.shape} != {m.rows}")
    wl = _words(m.cols)
    aug = np.zeros((m.rows, wl + 1), dtype=np.uint64)
    aug[:, :wl] = m.data
    aug[:, wl] = rhs
    pivots = _eliminate(aug, range(m.cols), reduced=True)
    npiv = len(pivots)
    if np.any(aug[npiv:, wl]):
        return None
    x = np.zeros(m.cols, dtype=np.uint8)
    for prow, pcol in pivots:
        x[pcol] = int(aug[prow, wl])
    return x


class EchelonBasis:
    """Incrementally maintained, fully reduced echelon basis over GF(2).

    Rows are 0/1 numpy arrays.  ``add`` returns True when the row enlarged
    the span.  ``decompose`` returns the sorted indices of previously added
    rows whose XOR equals the query, or None if the query is outside the
    span.  The basis is kept mutually reduced (each basis row is the only
    one with a 1 in its pivot column), so a single left-to-right reduction
    pass is exact.
    """

    def __init__(self, cols: int):
        self.cols = cols
        self._rows: list[np.ndarray] = []
        self._combos: list[frozenset] = []
        self._pivot_of: dict[int, int] = {}
        self.n_added = 0

    def _reduce(self, row: np.ndarray):
        row = (np.asarray(row, dtype=np.uint8) & 1).copy()
        combo: frozenset = frozenset()
        for col in np.flatnonzero(row):
            i = self._pivot_of.get(int(col))
            if i is not None:
                row ^= self._rows[i]
                combo ^= self._combos[i]
        return row, combo

    def add(self, row: np.ndarray) -> bool:
        idx = self.n_added
        self.n_added += 1
        row, combo = self._reduce(row)
        combo ^= frozenset((idx,))
        nz = np.flatnonzero(row)
        if nz.size == 0:
            return False
        p = int(nz[0])
        for j in range(len(self._rows)):
            if self._rows[j][p]:
                self._rows[j] = self._rows[j] ^ row
                self._combos[j] ^= combo
        self._pivot_of[p] = len(self._rows)
        self._rows.append(row)
        self._combos.append(combo)
        return True

    def decompose(self, row: np.ndarray) -> Optional[list[int]]:
        row, combo = self._reduce(row)
        if np.any(row):
            return None
        return sorted(combo)

    def contains(self, row: np.ndarray) -> bool:
        return self.decompose(row) is not None

    @property
    def rank(self) -> int:
        return len(self._rows)
