"""CSS stabilizer codes and the concrete lattice families.

A code is held as two stabilizer-support matrices over GF(2): ``x_stabs``
(n_qubits x #X-generators, column i = support of the i'th X-type product)
and ``z_stabs`` likewise for Z-type.  Construction validates the CSS
commutation condition (every X/Z column pair overlaps on an even number
of qubits) and rejects empty generators.

Qubit indexing conventions (stable, used by golden tests and file formats):
  ghz    flat 0..n-1
  toric  edge (x, y, o) -> 2*(x*L + y) + o, o=0 horizontal (+x), o=1 vertical (+y)
  xcube  edge (x, y, z, axis) -> 3*((x*L + y)*L + z) + axis, axis in {0,1,2}
  haah   vertex qubit (x, y, z, i) -> 2*(((x*(L+1)) + y)*(L+1) + z) + (i-1),
         vertices 0..L per axis (open boundary), i in {1, 2}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .gf2 import BitMatrix

FAMILIES = ("ghz", "toric", "xcube", "haah", "custom")


class InvalidSize(ValueError):
    """Lattice size below the family minimum."""


class ParseError(ValueError):
    """Malformed code description."""


class CommutationViolation(ValueError):
    """An X and a Z generator anticommute."""

    def __init__(self, i: int, j: int):
        super().__init__(f"x_stabs column {i} anticommutes with z_stabs column {j}")
        self.pair = (i, j)


@dataclass(frozen=True)
class CssCode:
    n_qubits: int
    x_stabs: BitMatrix
    z_stabs: BitMatrix
    family: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.x_stabs.rows != self.n_qubits or self.z_stabs.rows != self.n_qubits:
            raise ParseError("stabilizer matrices must have n_qubits rows")
        if self.family not in FAMILIES:
            raise ParseError(f"unknown family {self.family!r}")
        for name, m in (("x", self.x_stabs), ("z", self.z_stabs)):
            w = _column_weights(m)
            if w.size and w.min() == 0:
                raise ParseError(
                    f"{name}_stabs column {int(np.argmin(w))} is empty")
        overlap = _overlap_product(self.x_stabs, self.z_stabs)
        if gf2.nnz(overlap):
            dense = overlap.to_dense()
            i, j = map(int, np.argwhere(dense)[0])
            raise CommutationViolation(i, j)

    @property
    def n_x(self) -> int:
        return self.x_stabs.cols

    @property
    def n_z(self) -> int:
        return self.z_stabs.cols


def _column_weights(m: BitMatrix) -> np.ndarray:
    """Per-column popcounts without materializing the dense transpose."""
    counts = np.zeros(m.cols, dtype=np.int64)
    for q in range(m.rows):
        row = np.unpackbits(m.data[q:q + 1].view(np.uint8),
                            bitorder="little")[:m.cols]
        counts += row
    return counts


def _overlap_product(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """a^T b over GF(2), accumulated row by row (a is tall and row-sparse)."""
    out = BitMatrix.zeros(a.cols, b.cols)
    for q in range(a.rows):
        row = np.unpackbits(a.data[q:q + 1].view(np.uint8),
                            bitorder="little")[:a.cols]
        idx = np.flatnonzero(row)
        if idx.size:
            out.data[idx] ^= b.data[q]
    return out


# -- lattice index helpers ------------------------------------------------


def toric_edge_index(L: int, x: int, y: int, o: int) -> int:
    return 2 * ((x % L) * L + (y % L)) + o


def toric_edge_coords(L: int, q: int) -> tuple[int, int, int]:
    o = q & 1
    v = q >> 1
    return v // L, v % L, o


def xcube_edge_index(L: int, x: int, y: int, z: int, axis: int) -> int:
    return 3 * (((x % L) * L + (y % L)) * L + (z % L)) + axis


def xcube_edge_coords(L: int, q: int) -> tuple[int, int, int, int]:
    axis = q % 3
    v = q // 3
    return v // (L * L), (v // L) % L, v % L, axis


def haah_qubit_index(L: int, x: int, y: int, z: int, i: int) -> int:
    side = L + 1
    return 2 * ((x * side + y) * side + z) + (i - 1)


def haah_qubit_coords(L: int, q: int) -> tuple[int, int, int, int]:
    side = L + 1
    i = (q & 1) + 1
    v = q >> 1
    return v // (side * side), (v // side) % side, v % side, i


def qubit_coords(code: CssCode, q: int) -> tuple:
    """Family-specific lattice coordinates of a qubit (flat index for ghz
    and custom codes)."""
    if not 0 <= q < code.n_qubits:
        raise IndexError(q)
    if code.family == "toric":
        return toric_edge_coords(int(code.params["L"]), q)
    if code.family == "xcube":
        return xcube_edge_coords(int(code.params["L"]), q)
    if code.family == "haah":
        return haah_qubit_coords(int(code.params["L"]), q)
    return (q,)


# -- family builders ------------------------------------------------------


def build_ghz(n: int) -> CssCode:
    """All-ones X generator plus the pairwise Z_0 Z_i generators."""
    if n < 2:
        raise InvalidSize("GHZ needs n >= 2")
    x = BitMatrix.from_dense(np.ones((n, 1), dtype=np.uint8))
    z = BitMatrix.zeros(n, n - 1)
    for i in range(1, n):
        z.set(0, i - 1, 1)
        z.set(i, i - 1, 1)
    return CssCode(n, x, z, family="ghz", params={"n": n})


def build_toric(L: int) -> CssCode:
    """Toric code on an L x L torus: vertex stars (X) and plaquettes (Z)."""
    if L < 2:
        raise InvalidSize("toric code needs L >= 2")
    n = 2 * L * L
    xe, ze = [], []
    for vx in range(L):
        for vy in range(L):
            c = vx * L + vy
            for q in (toric_edge_index(L, vx, vy, 0),
                      toric_edge_index(L, vx - 1, vy, 0),
                      toric_edge_index(L, vx, vy, 1),
                      toric_edge_index(L, vx, vy - 1, 1)):
                xe.append((q, c))
            for q in (toric_edge_index(L, vx, vy, 0),
                      toric_edge_index(L, vx, vy + 1, 0),
                      toric_edge_index(L, vx, vy, 1),
                      toric_edge_index(L, vx + 1, vy, 1)):
                ze.append((q, c))
    x = BitMatrix.from_entries(xe, n, L * L)
    z = BitMatrix.from_entries(ze, n, L * L)
    return CssCode(n, x, z, family="toric", params={"L": L})


_XCUBE_PERP = {0: (1, 2), 1: (0, 2), 2: (0, 1)}


def build_xcube(L: int) -> CssCode:
    """X-cube model on an L^3 torus: cube operators (X) and vertex crosses (Z)."""
    if L < 2:
        raise InvalidSize("X-cube needs L >= 2")
    n = 3 * L ** 3
    xe, ze = [], []
    for cx in range(L):
        for cy in range(L):
            for cz in range(L):
                col = (cx * L + cy) * L + cz
                for axis in range(3):
                    a, b = _XCUBE_PERP[axis]
                    for da in (0, 1):
                        for db in (0, 1):
                            v = [cx, cy, cz]
                            v[a] += da
                            v[b] += db
                            xe.append((xcube_edge_index(L, *v, axis), col))
    for vx in range(L):
        for vy in range(L):
            for vz in range(L):
                base = 3 * ((vx * L + vy) * L + vz)
                for axis in range(3):
                    a, b = _XCUBE_PERP[axis]
                    for ax in (a, b):
                        for d in (0, -1):
                            v = [vx, vy, vz]
                            v[ax] += d
                            ze.append((xcube_edge_index(L, *v, ax), base + axis))
    x = BitMatrix.from_entries(xe, n, L ** 3)
    z = BitMatrix.from_entries(ze, n, 3 * L ** 3)
    return CssCode(n, x, z, family="xcube", params={"L": L})


# Corner offsets of the cube stabilizers, by vertex-qubit slot.
HAAH_X1 = ((0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1))  # X on qubit 1
HAAH_X2 = ((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1))  # X on qubit 2
HAAH_Z1 = ((1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1))  # Z on qubit 1
HAAH_Z2 = ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1))  # Z on qubit 2


def build_haah(L: int) -> CssCode:
    """Cubic two-qubit-per-vertex code with open boundaries, one X and one Z
    corner-pattern generator per cube."""
    if L < 1:
        raise InvalidSize("cubic code needs L >= 1")
    n = 2 * (L + 1) ** 3
    xe, ze = [], []
    for cx in range(L):
        for cy in range(L):
            for cz in range(L):
                col = (cx * L + cy) * L + cz
                for offs, slot, acc in ((HAAH_X1, 1, xe), (HAAH_X2, 2, xe),
                                        (HAAH_Z1, 1, ze), (HAAH_Z2, 2, ze)):
                    for (dx, dy, dz) in offs:
                        q = haah_qubit_index(L, cx + dx, cy + dy, cz + dz, slot)
                        acc.append((q, col))
    x = BitMatrix.from_entries(xe, n, L ** 3)
    z = BitMatrix.from_entries(ze, n, L ** 3)
    return CssCode(n, x, z, family="haah", params={"L": L})


def build_family(family: str, size: int) -> CssCode:
    if family == "ghz":
        return build_ghz(size)
    if family == "toric":
        return build_toric(size)
    if family == "xcube":
        return build_xcube(size)
    if family == "haah":
        return build_haah(size)
    raise ParseError(f"unknown family {family!r}")


# -- serialization --------------------------------------------------------


def _support_lists(m: BitMatrix) -> list[list[int]]:
    dense = m.to_dense()
    return [sorted(map(int, np.flatnonzero(dense[:, j]))) for j in range(m.cols)]


def serialize_code(code: CssCode) -> str:
    doc = {
        "version": 1,
        "n_qubits": code.n_qubits,
        "x_stabs": _support_lists(code.x_stabs),
        "z_stabs": _support_lists(code.z_stabs),
        "family": code.family,
        "params": code.params,
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def parse_code(text: str) -> CssCode:
    """Parse the JSON code format; validates all CssCode invariants."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from e
    try:
        if doc["version"] != 1:
            raise ParseError(f"unsupported version {doc['version']}")
        n = int(doc["n_qubits"])
        xs = doc["x_stabs"]
        zs = doc["z_stabs"]
        family = doc.get("family", "custom")
        params = doc.get("params", {})
    except (KeyError, TypeError) as e:
        raise ParseError(f"missing field: {e}") from e
    if n <= 0:
        raise ParseError("n_qubits must be positive")

    def from_lists(lists) -> BitMatrix:
        m = BitMatrix.zeros(n, len(lists))
        for j, sup in enumerate(lists):
            for q in sup:
                q = int(q)
                if not 0 <= q < n:
                    raise ParseError(f"qubit index {q} out of range")
                m.set(q, j, 1)
        return m

    return CssCode(n, from_lists(xs), from_lists(zs), family=family, params=params)
