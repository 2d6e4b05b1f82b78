"""Compiler core: subset selection, reconstruction matrix, circuit emission.

The preparation circuit for a CSS code is determined by a qubit subset S
whose rows of the X-stabilizer support matrix A form a basis of A's row
space (equivalently |S| = rank(pi_S A) = rank(A)).  The reconstruction
matrix M_S maps Z-values on S to Z-values everywhere; its off-diagonal
nonzero entries are exactly the CX gates of the one-layer circuit.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import css, gf2
from .css import CssCode
from .gf2 import BitMatrix

STRATEGIES = ("greedy", "toric_comb", "toric_recursive", "xcube_dual_trees",
              "haah_canonical", "explicit")


class IncompatibleStrategy(ValueError):
    """Strategy does not apply to this code family."""


class SizeNotPowerOfTwo(ValueError):
    """The recursive tree strategy needs L = 2^k."""


class InvalidSubset(ValueError):
    """Subset fails the rank conditions."""


class InternalInvariantViolation(AssertionError):
    """Greedy selection could not make progress (indicates a code bug)."""


@dataclass(frozen=True)
class SubsetS:
    """Sorted qubit indices whose A-rows form a basis of the row space."""

    qubits: tuple[int, ...]

    def __post_init__(self):
        q = self.qubits
        if any(q[i] >= q[i + 1] for i in range(len(q) - 1)):
            object.__setattr__(self, "qubits", tuple(sorted(set(q))))

    def __len__(self):
        return len(self.qubits)


@dataclass(frozen=True)
class FdscCircuit:
    """Initial |+>/|0> assignment plus one commuting CX layer.

    Controls always lie in ``plus_qubits`` and targets outside it, so all
    gates commute pairwise.  Gates are sorted by (control, target).
    """

    n_qubits: int
    plus_qubits: tuple[int, ...]
    gates: tuple[tuple[int, int], ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        plus = set(self.plus_qubits)
        if plus and not all(0 <= q < self.n_qubits for q in plus):
            raise ValueError("plus qubit outside the register")
        for c, t in self.gates:
            if not (0 <= t < self.n_qubits):
                raise ValueError(f"gate target {t} outside the register")
            if c not in plus or t in plus:
                raise ValueError(f"gate ({c},{t}) breaks the one-layer structure")
        object.__setattr__(self, "gates", tuple(sorted(set(self.gates))))

    @property
    def gate_count(self) -> int:
        return len(self.gates)


def gate_count(circ: FdscCircuit) -> int:
    return circ.gate_count


# -- subset selection ------------------------------------------------------


def check_subset(code: CssCode, s: SubsetS) -> bool:
    """Both rank conditions: |S| = rank(pi_S A) and |S| = rank(A)."""
    a = code.x_stabs
    sub = a.row_select(list(s.qubits))
    return gf2.rank(sub) == len(s) and gf2.rank(a) == len(s)


def greedy_select(code: CssCode, seed: Optional[int] = None) -> SubsetS:
    """Greedy scan keeping each qubit whose A-row is independent so far.

    ``seed=None`` scans qubits in index order (deterministic mode); an int
    seed scans a seeded random permutation.  Always reaches |S| = rank(A)
    for a valid code; anything less raises InternalInvariantViolation.
    """
    a = code.x_stabs
    order = list(range(code.n_qubits))
    if seed is not None:
        random.Random(seed).shuffle(order)
    chosen = gf2.row_rank_profile(a, order)
    target = gf2.rank(a)
    if len(chosen) != target:
        raise InternalInvariantViolation(
            f"greedy stalled at {len(chosen)} of rank {target}")
    return SubsetS(tuple(sorted(chosen)))


def _require_family(code: CssCode, family: str, strategy: str) -> int:
    if code.family != family or "L" not in code.params:
        raise IncompatibleStrategy(
            f"{strategy} needs a {family} code with lattice size params")
    return int(code.params["L"])


def toric_comb_qubits(L: int) -> list[int]:
    """All horizontal rows plus the leftmost vertical column, with one edge
    dropped per row cycle and one from the column to leave a spanning tree."""
    qubits = []
    for y in range(L):
        for x in range(L - 1):
            qubits.append(css.toric_edge_index(L, x, y, 0))
    for y in range(L - 1):
        qubits.append(css.toric_edge_index(L, 0, y, 1))
    return qubits


def _recursive_tree_edges(L: int, ox: int, oy: int, out: list):
    """Self-similar tree: left and right columns plus the top row, built
    from four half-size copies attached on the top, left, and right."""
    if L == 2:
        out.append((ox, oy, 1))          # left column
        out.append((ox + 1, oy, 1))      # right column
        out.append((ox, oy + 1, 0))      # top row
        return
    m = L // 2
    for (qx, qy) in ((0, 0), (m, 0), (0, m), (m, m)):
        _recursive_tree_edges(m, ox + qx, oy + qy, out)
    out.append((ox, oy + m - 1, 1))           # left attachment
    out.append((ox + L - 1, oy + m - 1, 1))   # right attachment
    out.append((ox + m - 1, oy + L - 1, 0))   # top attachment


def toric_recursive_qubits(L: int) -> list[int]:
    if L < 2 or L & (L - 1):
        raise SizeNotPowerOfTwo(f"L={L} is not a power of two >= 2")
    edges: list = []
    _recursive_tree_edges(L, 0, 0, edges)
    return [css.toric_edge_index(L, x, y, o) for (x, y, o) in edges]


def xcube_dual_qubits(code: CssCode) -> list[int]:
    """Vertical edges plus two boundary planes of horizontal edges, then a
    greedy rank repair (drop dependent members, extend if short)."""
    L = int(code.params["L"])
    seed_set = []
    for x in range(L):
        for y in range(L):
            for z in range(L):
                seed_set.append(css.xcube_edge_index(L, x, y, z, 2))
    for y in range(L):
        for z in range(L):
            seed_set.append(css.xcube_edge_index(L, 0, y, z, 0))
    for x in range(L):
        for z in range(L):
            seed_set.append(css.xcube_edge_index(L, x, 0, z, 1))
    rest = sorted(set(range(code.n_qubits)) - set(seed_set))
    order = sorted(seed_set) + rest
    chosen = gf2.row_rank_profile(code.x_stabs, order)
    return sorted(chosen)


def haah_canonical_qubits(L: int) -> list[int]:
    """Second-slot qubits on the L^3 interior vertex block.

    Either per-vertex slot works (each corner relation is triangular in the
    coordinate sum), but the second-slot choice reproduces the published
    gate counts and control patterns.
    """
    return [css.haah_qubit_index(L, x, y, z, 2)
            for x in range(L) for y in range(L) for z in range(L)]


def _toric_spanning_tree_parents(code: CssCode, qubits: Sequence[int]):
    """BFS structure of a toric edge subset, or None if not a spanning tree.

    A subset of edge qubits satisfies both rank conditions exactly when it
    is a spanning tree of the vertex graph (independent edge rows form a
    forest; |S| = L^2 - 1 = rank(A) makes it spanning).
    """
    L = int(code.params["L"])
    n_vert = L * L
    if len(qubits) != n_vert - 1:
        return None
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_vert)]
    for q in qubits:
        x, y, o = css.toric_edge_coords(L, q)
        u = x * L + y
        v = (((x + 1) % L) * L + y) if o == 0 else (x * L + (y + 1) % L)
        adj[u].append((v, q))
        adj[v].append((u, q))
    parent = np.full(n_vert, -1, dtype=np.int64)
    parent_edge = np.full(n_vert, -1, dtype=np.int64)
    depth = np.zeros(n_vert, dtype=np.int64)
    seen = np.zeros(n_vert, dtype=bool)
    seen[0] = True
    stack = [0]
    count = 1
    while stack:
        u = stack.pop()
        for v, q in adj[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                parent[v] = u
                parent_edge[v] = q
                depth[v] = depth[u] + 1
                stack.append(v)
    if count != n_vert:
        return None
    return parent, parent_edge, depth


def tree_select(code: CssCode, strategy: str) -> SubsetS:
    """The named lattice constructions; validates the rank conditions.

    Validation is family-specific: toric subsets are checked to be spanning
    trees (equivalent to the rank conditions), the X-cube repair is valid by
    construction of the rank profile, and the cubic-code subset is checked
    by the generic rank computations.
    """
    if strategy == "toric_comb":
        L = _require_family(code, "toric", strategy)
        qubits = toric_comb_qubits(L)
    elif strategy == "toric_recursive":
        L = _require_family(code, "toric", strategy)
        qubits = toric_recursive_qubits(L)
    elif strategy == "xcube_dual_trees":
        _require_family(code, "xcube", strategy)
        qubits = xcube_dual_qubits(code)
    elif strategy == "haah_canonical":
        L = _require_family(code, "haah", strategy)
        qubits = haah_canonical_qubits(L)
    else:
        raise IncompatibleStrategy(f"unknown tree strategy {strategy!r}")
    s = SubsetS(tuple(sorted(qubits)))
    if code.family == "toric":
        if _toric_spanning_tree_parents(code, s.qubits) is None:
            raise InternalInvariantViolation(f"{strategy} did not build a spanning tree")
    elif code.family == "haah":
        if not check_subset(code, s):
            raise InternalInvariantViolation(f"{strategy} subset fails rank conditions")
    return s


# -- reconstruction --------------------------------------------------------


def build_reconstruction(code: CssCode, s: SubsetS,
                         pivot_order: str = "forward",
                         method: str = "auto") -> BitMatrix:
    """The unique N x |S| matrix reconstructing all Z-values from S.

    Computed as A (pi_S A)^+ with any right inverse; rows indexed by
    qubits, columns by sorted S members.  Rows at S positions are unit
    vectors.  For toric spanning-tree subsets an equivalent tree-path
    construction is used unless ``method='generic'``.
    """
    if method not in ("auto", "generic", "tree"):
        raise ValueError(method)
    s_list = list(s.qubits)
    a = code.x_stabs
    if method != "generic" and code.family == "toric" and "L" in code.params:
        m = _toric_tree_reconstruction(code, s_list)
        if m is not None:
            return m
        if method == "tree":
            raise InvalidSubset("subset is not a toric spanning tree")
    sub = a.row_select(s_list)
    try:
        rinv = gf2.right_inverse(sub, pivot_order=pivot_order)
    except gf2.RankDeficient as e:
        raise InvalidSubset(str(e)) from e
    if gf2.rank(a) != len(s_list):
        raise InvalidSubset("|S| != rank of the X-stabilizer matrix")
    return gf2.mul(a, rinv)


def _toric_tree_reconstruction(code: CssCode, s_list: list[int]) -> Optional[BitMatrix]:
    """Path-based M_S for a toric spanning-tree subset (None if not a tree)."""
    L = int(code.params["L"])
    bfs = _toric_spanning_tree_parents(code, s_list)
    if bfs is None:
        return None
    parent, parent_edge, depth = bfs
    col_of = {q: i for i, q in enumerate(s_list)}
    m = BitMatrix.zeros(code.n_qubits, len(s_list))
    for col, q in enumerate(s_list):
        m.set(q, col, 1)
    in_s = set(s_list)
    for q in range(code.n_qubits):
        if q in in_s:
            continue
        x, y, o = css.toric_edge_coords(L, q)
        u = x * L + y
        v = (((x + 1) % L) * L + y) if o == 0 else (x * L + (y + 1) % L)
        while depth[u] > depth[v]:
            m.set(q, col_of[int(parent_edge[u])], 1)
            u = int(parent[u])
        while depth[v] > depth[u]:
            m.set(q, col_of[int(parent_edge[v])], 1)
            v = int(parent[v])
        while u != v:
            m.set(q, col_of[int(parent_edge[u])], 1)
            m.set(q, col_of[int(parent_edge[v])], 1)
            u = int(parent[u])
            v = int(parent[v])
    return m


def emit_circuit(code: CssCode, s: SubsetS, m: BitMatrix,
                 metadata: Optional[dict] = None) -> FdscCircuit:
    """One CX per off-S nonzero of the reconstruction matrix."""
    s_list = list(s.qubits)
    in_s = np.zeros(code.n_qubits, dtype=bool)
    in_s[s_list] = True
    controls = np.asarray(s_list, dtype=np.int64)
    gates = []
    for q in range(code.n_qubits):
        if in_s[q]:
            continue
        row = np.unpackbits(m.data[q:q + 1].view(np.uint8),
                            bitorder="little")[:m.cols]
        for col in np.flatnonzero(row):
            gates.append((int(controls[col]), q))
    gates.sort()
    expected = gf2.nnz(m) - len(s_list)
    if len(gates) != expected:
        raise InternalInvariantViolation(
            f"gate count {len(gates)} != nnz - |S| = {expected}")
    meta = dict(metadata or {})
    meta["gate_count"] = len(gates)
    return FdscCircuit(code.n_qubits, tuple(s_list), tuple(gates), meta)


def synthesize(code: CssCode, strategy: str, seed: Optional[int] = None,
               restarts: int = 1,
               subset: Optional[Sequence[int]] = None) -> FdscCircuit:
    """Select S, build the reconstruction, and emit the circuit.

    Greedy with ``restarts > 1`` tries seeds seed..seed+restarts-1 and keeps
    the smallest-gate-count circuit (ties to the lower seed).  Strategy
    "explicit" synthesizes from the caller-provided subset.
    """
    if strategy == "explicit":
        if subset is None:
            raise IncompatibleStrategy("explicit strategy needs a subset")
        s = SubsetS(tuple(sorted(subset)))
        if not check_subset(code, s):
            raise InvalidSubset("explicit subset fails the rank conditions")
        m = build_reconstruction(code, s)
        return emit_circuit(code, s, m, {"family": code.family,
                                         "params": code.params,
                                         "strategy": "explicit"})
    if strategy == "greedy":
        if restarts > 1:
            base = 0 if seed is None else seed
            best = None
            for k in range(restarts):
                s = greedy_select(code, base + k)
                m = build_reconstruction(code, s)
                if best is None or gf2.nnz(m) < best[0]:
                    best = (gf2.nnz(m), s, m, base + k)
            _, s, m, used_seed = best
            meta = {"family": code.family, "params": code.params,
                    "strategy": strategy, "seed": used_seed}
            return emit_circuit(code, s, m, meta)
        s = greedy_select(code, seed)
    elif strategy in ("toric_comb", "toric_recursive", "xcube_dual_trees",
                      "haah_canonical"):
        s = tree_select(code, strategy)
    else:
        raise IncompatibleStrategy(f"unknown strategy {strategy!r}")
    m = build_reconstruction(code, s)
    meta = {"family": code.family, "params": code.params, "strategy": strategy}
    if strategy == "greedy" and seed is not None:
        meta["seed"] = seed
    return emit_circuit(code, s, m, meta)


# -- cubic-code potential solve -------------------------------------------


def haah_phi_solve(L: int, z1: np.ndarray) -> np.ndarray:
    """Invert the corner relation on qubit-1 values to the cube potential.

    ``z1[(x*L + y)*L + z]`` holds the qubit-1 Z value at vertex (x,y,z) for
    0 <= x,y,z <= L-1.  The relation couples each cube to three cubes
    strictly closer to the origin, so sweeping in increasing x+y+z order is
    triangular and always solvable; out-of-range cubes count as zero.
    """
    z1 = np.asarray(z1, dtype=np.uint8) & 1
    if z1.shape != (L ** 3,):
        raise ValueError(f"z1 must have L^3 = {L**3} entries")
    phi = np.zeros(L ** 3, dtype=np.uint8)

    def at(x, y, z):
        if x < 0 or y < 0 or z < 0:
            return 0
        return phi[(x * L + y) * L + z]

    for ssum in range(3 * L - 2):
        for x in range(min(ssum, L - 1) + 1):
            for y in range(min(ssum - x, L - 1) + 1):
                z = ssum - x - y
                if not 0 <= z <= L - 1:
                    continue
                idx = (x * L + y) * L + z
                phi[idx] = (z1[idx] ^ at(x, y - 1, z - 1)
                            ^ at(x - 1, y, z - 1) ^ at(x - 1, y - 1, z))
    return phi


def haah_phi_solve_adjacent(L: int, z2: np.ndarray) -> np.ndarray:
    """Mirror solve for the qubit-2 corner relation (axis-adjacent cubes).

    ``z2[(x*L + y)*L + z]`` holds the qubit-2 Z value at vertex (x,y,z) for
    0 <= x,y,z <= L-1; same triangular sweep as :func:`haah_phi_solve`.
    """
    z2 = np.asarray(z2, dtype=np.uint8) & 1
    if z2.shape != (L ** 3,):
        raise ValueError(f"z2 must have L^3 = {L**3} entries")
    phi = np.zeros(L ** 3, dtype=np.uint8)

    def at(x, y, z):
        if x < 0 or y < 0 or z < 0:
            return 0
        return phi[(x * L + y) * L + z]

    for ssum in range(3 * L - 2):
        for x in range(min(ssum, L - 1) + 1):
            for y in range(min(ssum - x, L - 1) + 1):
                z = ssum - x - y
                if not 0 <= z <= L - 1:
                    continue
                idx = (x * L + y) * L + z
                phi[idx] = (z2[idx] ^ at(x - 1, y, z)
                            ^ at(x, y - 1, z) ^ at(x, y, z - 1))
    return phi


def haah_z_from_phi(L: int, phi: np.ndarray) -> np.ndarray:
    """All-qubit Z values generated by a cube potential (open boundary)."""
    phi = np.asarray(phi, dtype=np.uint8) & 1
    if phi.shape != (L ** 3,):
        raise ValueError(f"phi must have L^3 = {L**3} entries")
    z = np.zeros(2 * (L + 1) ** 3, dtype=np.uint8)

    def at(x, y, z_):
        if not (0 <= x < L and 0 <= y < L and 0 <= z_ < L):
            return 0
        return int(phi[(x * L + y) * L + z_])

    for x in range(L + 1):
        for y in range(L + 1):
            for zc in range(L + 1):
                v1 = (at(x, y, zc) ^ at(x, y - 1, zc - 1)
                      ^ at(x - 1, y, zc - 1) ^ at(x - 1, y - 1, zc))
                v2 = (at(x, y, zc) ^ at(x - 1, y, zc)
                      ^ at(x, y - 1, zc) ^ at(x, y, zc - 1))
                z[css.haah_qubit_index(L, x, y, zc, 1)] = v1
                z[css.haah_qubit_index(L, x, y, zc, 2)] = v2
    return z


# -- circuit serialization -------------------------------------------------


def serialize_circuit(circ: FdscCircuit) -> str:
    doc = {
        "version": 1,
        "n_qubits": circ.n_qubits,
        "plus_qubits": list(circ.plus_qubits),
        "gates": [list(g) for g in circ.gates],
        "metadata": circ.metadata,
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def parse_circuit(text: str) -> FdscCircuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise css.ParseError(f"invalid JSON: {e}") from e
    try:
        if doc["version"] != 1:
            raise css.ParseError(f"unsupported version {doc['version']}")
        return FdscCircuit(
            int(doc["n_qubits"]),
            tuple(int(q) for q in doc["plus_qubits"]),
            tuple((int(c), int(t)) for c, t in doc["gates"]),
            dict(doc.get("metadata", {})),
        )
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, css.ParseError):
            raise
        raise css.ParseError(f"bad circuit document: {e}") from e
