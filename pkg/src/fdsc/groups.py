"""Layered constant-depth multiplication planner for solvable finite groups.

Given a group table and a subnormal series with abelian quotients, builds a
classical dataflow network computing g1*...*gn whose layer count depends
only on the series length, never on n.  Each sequence element g splits as
a section image psi(h) times a normal part; the quotient suffix products
are formed in one simultaneous layer because the quotient is abelian, the
cocycle and conjugation corrections are parallel table lookups, and the
remaining 2n-1 normal-subgroup elements are multiplied recursively.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class InvalidSize(ValueError):
    """Group-family parameter out of range."""


class LengthMismatch(ValueError):
    """Sequence length differs from the planned network's arity."""


class GroupStructureError(ValueError):
    """Multiplication table or series fails a group axiom."""


class ParseError(ValueError):
    """Malformed group description file."""


@dataclass(frozen=True)
class FiniteGroup:
    order: int
    table: np.ndarray
    identity: int
    inverse: np.ndarray

    @classmethod
    def from_table(cls, table, check_associativity: bool = True) -> "FiniteGroup":
        t = np.asarray(table, dtype=np.int64)
        n = t.shape[0]
        if t.shape != (n, n) or n == 0:
            raise GroupStructureError("table must be square and nonempty")
        if t.min() < 0 or t.max() >= n:
            raise GroupStructureError("table entries out of range")
        ident = None
        rng = np.arange(n)
        for e in range(n):
            if np.array_equal(t[e], rng) and np.array_equal(t[:, e], rng):
                ident = e
                break
        if ident is None:
            raise GroupStructureError("no identity element")
        inv = np.full(n, -1, dtype=np.int64)
        for a in range(n):
            hits = np.flatnonzero(t[a] == ident)
            if hits.size != 1 or t[hits[0], a] != ident:
                raise GroupStructureError(f"element {a} lacks a two-sided inverse")
            inv[a] = hits[0]
        if check_associativity:
            if n <= 64:
                # lhs[a,b,c] = t[t[a,b],c], rhs[a,b,c] = t[a,t[b,c]]
                if not np.array_equal(t[t, :], t[:, t]):
                    raise GroupStructureError("multiplication is not associative")
            else:
                rs = np.random.default_rng(0)
                for _ in range(20000):
                    a, b, c = rs.integers(0, n, 3)
                    if t[t[a, b], c] != t[a, t[b, c]]:
                        raise GroupStructureError("multiplication is not associative")
        return cls(n, t, ident, inv)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def fold(self, seq: Sequence[int]) -> int:
        acc = self.identity
        for g in seq:
            acc = int(self.table[acc, g])
        return acc

    def is_abelian(self) -> bool:
        return np.array_equal(self.table, self.table.T)


@dataclass(frozen=True)
class SolvableSeries:
    """Chain {e} = G_0 <= G_1 <= ... <= G_k = G, each step normal with
    abelian quotient."""

    subgroups: tuple[tuple[int, ...], ...]

    @property
    def derived_length(self) -> int:
        return len(self.subgroups) - 1

    def validate(self, group: FiniteGroup) -> None:
        chain = [sorted(set(s)) for s in self.subgroups]
        if not chain or chain[0] != [group.identity]:
            raise GroupStructureError("series must start at the trivial subgroup")
        if chain[-1] != list(range(group.order)):
            raise GroupStructureError("series must end at the full group")
        for lo, hi in zip(chain, chain[1:]):
            if not set(lo) <= set(hi):
                raise GroupStructureError("series is not increasing")
        t = group.table
        for members in chain:
            mset = set(members)
            for a in members:
                for b in members:
                    if int(t[a, b]) not in mset:
                        raise GroupStructureError("series entry is not a subgroup")
        for lo, hi in zip(chain, chain[1:]):
            lset = set(lo)
            for g in hi:
                gi = group.inv(g)
                for a in lo:
                    if int(t[t[g, a], gi]) not in lset:
                        raise GroupStructureError(
                            f"subgroup not normal under conjugation by {g}")
            taus = _coset_map(group, lo, hi)
            for a in hi:
                for b in hi:
                    if taus[int(t[a, b])] != taus[int(t[b, a])]:
                        raise GroupStructureError("quotient is not abelian")


def _coset_map(group: FiniteGroup, sub: Sequence[int], ambient: Sequence[int]):
    """Map each ambient element to the minimum member of its left coset g*sub."""
    tau = {}
    for g in ambient:
        coset = min(int(group.table[g, a]) for a in sub)
        tau[g] = coset
    return tau


@dataclass(frozen=True)
class _Level:
    """Structure of one series step: G with normal subgroup N and data for
    the abelian quotient H = G/N (elements indexed 0..|H|-1 by their
    minimum-id coset representative)."""

    group: FiniteGroup
    tau: np.ndarray              # |G| -> H index
    psi: np.ndarray              # H index -> representative element of G
    h_table: np.ndarray          # quotient multiplication
    n_elements: np.ndarray       # N as sorted element ids of G
    n_local: dict                # G element -> local N index
    norm_part: np.ndarray        # |G| -> local index of psi(tau(g))^-1 g
    chi: np.ndarray              # (|H|, |H|) -> local N index
    phi: np.ndarray              # (|H|, |N|) -> local N index
    merge: np.ndarray            # (|G|, |N|) -> G element: g * n
    n_table: np.ndarray          # multiplication of N in local indices
    sub: Optional["_Level"]      # recursive structure of N (None when the
    #                              remaining chain is a single abelian step)


def _build_level(group: FiniteGroup, chain: Sequence[Sequence[int]]) -> Optional[_Level]:
    """Recursive level data for the full chain ({e}, ..., G)."""
    if len(chain) < 2:
        return None
    n_set = sorted(set(chain[-2]))
    ambient = list(range(group.order))
    rep_of = _coset_map(group, n_set, ambient)
    reps = sorted(set(rep_of.values()))
    h_index = {r: i for i, r in enumerate(reps)}
    tau = np.array([h_index[rep_of[g]] for g in ambient], dtype=np.int64)
    psi = np.array(reps, dtype=np.int64)
    nh = len(reps)
    h_table = np.zeros((nh, nh), dtype=np.int64)
    for i in range(nh):
        for j in range(nh):
            h_table[i, j] = tau[group.mul(int(psi[i]), int(psi[j]))]
    n_elements = np.array(n_set, dtype=np.int64)
    n_local = {int(g): i for i, g in enumerate(n_set)}
    norm_part = np.zeros(group.order, dtype=np.int64)
    for g in ambient:
        rep = int(psi[tau[g]])
        norm_part[g] = n_local[group.mul(group.inv(rep), g)]
    chi = np.zeros((nh, nh), dtype=np.int64)
    for i in range(nh):
        for j in range(nh):
            pij = int(psi[h_table[i, j]])
            val = group.mul(group.mul(group.inv(pij), int(psi[i])), int(psi[j]))
            if val not in n_local:
                raise GroupStructureError("cocycle left the normal subgroup")
            chi[i, j] = n_local[val]
    phi = np.zeros((nh, len(n_set)), dtype=np.int64)
    for i in range(nh):
        rep = int(psi[i])
        for k, nm in enumerate(n_set):
            val = group.mul(group.mul(group.inv(rep), int(nm)), rep)
            if val not in n_local:
                raise GroupStructureError("conjugation left the normal subgroup")
            phi[i, k] = n_local[val]
    merge = np.zeros((group.order, len(n_set)), dtype=np.int64)
    for g in ambient:
        for k, nm in enumerate(n_set):
            merge[g, k] = group.mul(g, int(nm))
    n_table = np.zeros((len(n_set), len(n_set)), dtype=np.int64)
    for a, ga in enumerate(n_set):
        for c, gc in enumerate(n_set):
            n_table[a, c] = n_local[group.mul(int(ga), int(gc))]
    sub = None
    if len(chain) > 3:
        sub_group = FiniteGroup.from_table(n_table, check_associativity=False)
        sub_chain = [[n_local[int(g)] for g in members] for members in chain[:-1]]
        sub = _build_level(sub_group, sub_chain)
    return _Level(group, tau, psi, h_table, n_elements, n_local, norm_part,
                  chi, phi, merge, n_table, sub)


# -- network ---------------------------------------------------------------


@dataclass
class Node:
    kind: str                    # quotient-lookup | normal-lookup | abelian-combine
    #                            | chi-lookup | phi-lookup | section-lift | group-mul
    inputs: tuple[int, ...]
    output: int
    table: np.ndarray
    _list: list = field(default=None, repr=False, compare=False)

    def table_list(self) -> list:
        if self._list is None:
            self._list = self.table.tolist()
        return self._list


@dataclass
class MulNetwork:
    n_inputs: int
    layers: tuple[tuple[Node, ...], ...]
    output: int
    n_slots: int

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def ancilla_count(self) -> int:
        return self.n_slots - self.n_inputs


class _Builder:
    def __init__(self, n_inputs: int):
        self.next_slot = n_inputs
        self.layers: list[list[Node]] = []

    def slot(self) -> int:
        s = self.next_slot
        self.next_slot += 1
        return s

    def layer(self, nodes: list[Node]) -> None:
        self.layers.append(nodes)


def _plan(level: _Level, inputs: list[int], b: _Builder) -> int:
    """Emit layers computing the ordered product of the input slots."""
    n = len(inputs)
    h_slots = []
    n_slots = []
    split_layer = []
    for g in inputs:
        h = b.slot()
        split_layer.append(Node("quotient-lookup", (g,), h, level.tau))
        h_slots.append(h)
    for g in inputs:
        nl = b.slot()
        split_layer.append(Node("normal-lookup", (g,), nl, level.norm_part))
        n_slots.append(nl)
    b.layer(split_layer)
    suffix = [0] * n
    suffix_layer = []
    for j in range(n):
        s = b.slot()
        suffix_layer.append(Node("abelian-combine", tuple(h_slots[j:]), s,
                                 level.h_table))
        suffix[j] = s
    b.layer(suffix_layer)
    lookup_layer = []
    lift = b.slot()
    lookup_layer.append(Node("section-lift", (suffix[0],), lift, level.psi))
    nseq = []
    for i in range(n - 1):
        c = b.slot()
        lookup_layer.append(Node("chi-lookup", (h_slots[i], suffix[i + 1]), c,
                                 level.chi))
        v = b.slot()
        lookup_layer.append(Node("phi-lookup", (suffix[i + 1], n_slots[i]), v,
                                 level.phi))
        nseq.extend((c, v))
    nseq.append(n_slots[n - 1])
    b.layer(lookup_layer)
    if level.sub is not None:
        n_out = _plan(level.sub, nseq, b)
    else:
        # remaining chain is {e} <= N with N abelian: fold in one layer
        n_out = b.slot()
        b.layer([Node("abelian-combine", tuple(nseq), n_out, level.n_table)])
    out = b.slot()
    b.layer([Node("group-mul", (lift, n_out), out, level.merge)])
    return out


def plan_network(group: FiniteGroup, series: SolvableSeries, n: int) -> MulNetwork:
    """Build the layered network for products of n elements."""
    if n < 1:
        raise InvalidSize("sequence length must be >= 1")
    series.validate(group)
    chain = [list(s) for s in series.subgroups]
    if len(chain) == 2:
        # abelian group: a single simultaneous combine layer
        if not group.is_abelian():
            raise GroupStructureError("one-step series requires an abelian group")
        b = _Builder(n)
        out = b.slot()
        b.layer([Node("abelian-combine", tuple(range(n)), out, group.table)])
        return MulNetwork(n, tuple(tuple(l) for l in b.layers), out, b.next_slot)
    level = _build_level(group, chain)
    b = _Builder(n)
    out = _plan(level, list(range(n)), b)
    return MulNetwork(n, tuple(tuple(l) for l in b.layers), out, b.next_slot)


def evaluate(net: MulNetwork, seq: Sequence[int]) -> int:
    """Deterministic layer-by-layer evaluation."""
    if len(seq) != net.n_inputs:
        raise LengthMismatch(f"expected {net.n_inputs} elements, got {len(seq)}")
    slots = [0] * net.n_slots
    for i, g in enumerate(seq):
        slots[i] = int(g)
    for layer in net.layers:
        staged = []
        for node in layer:
            # plain-list table view; numpy scalar indexing is slow here
            t = node.table_list()
            if node.kind == "abelian-combine":
                acc = None
                for s in node.inputs:
                    acc = slots[s] if acc is None else t[acc][slots[s]]
                staged.append((node.output, acc))
            elif node.kind in ("quotient-lookup", "normal-lookup", "section-lift"):
                staged.append((node.output, t[slots[node.inputs[0]]]))
            else:  # chi-lookup, phi-lookup, group-mul
                a, c = node.inputs
                staged.append((node.output, t[slots[a]][slots[c]]))
        for out, val in staged:
            slots[out] = val
    return slots[net.output]


# -- built-in families and file format --------------------------------------


def make_dihedral(n: int) -> tuple[FiniteGroup, SolvableSeries]:
    """Symmetries of the regular n-gon; elements p*n + k encode m^p r^k."""
    if n < 3:
        raise InvalidSize("dihedral group needs n >= 3")
    order = 2 * n
    t = np.zeros((order, order), dtype=np.int64)
    for p1 in (0, 1):
        for k1 in range(n):
            for p2 in (0, 1):
                for k2 in range(n):
                    k = (k2 + (k1 if p2 == 0 else -k1)) % n
                    t[p1 * n + k1, p2 * n + k2] = ((p1 ^ p2) * n) + k
    g = FiniteGroup.from_table(t)
    series = SolvableSeries(((0,), tuple(range(n)), tuple(range(order))))
    series.validate(g)
    return g, series


def make_abelian(orders: Sequence[int]) -> tuple[FiniteGroup, SolvableSeries]:
    """Direct product of cyclic groups, with the one-step series."""
    orders = list(orders)
    if not orders or any(d < 2 for d in orders):
        raise InvalidSize("cyclic factors must all be >= 2")
    total = int(np.prod(orders))

    def decode(x):
        digits = []
        for d in orders:
            digits.append(x % d)
            x //= d
        return digits

    def encode(digits):
        x = 0
        for d, v in zip(reversed(orders), reversed(digits)):
            x = x * d + v
        return x

    t = np.zeros((total, total), dtype=np.int64)
    for a in range(total):
        da = decode(a)
        for c in range(total):
            dc = decode(c)
            t[a, c] = encode([(u + v) % d for u, v, d in zip(da, dc, orders)])
    g = FiniteGroup.from_table(t)
    series = SolvableSeries(((0,), tuple(range(total))))
    series.validate(g)
    return g, series


def parse_group(text: str) -> tuple[FiniteGroup, SolvableSeries]:
    """JSON group format: {"order": n, "table": [[..]], "series": [[ids]..]}."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from e
    try:
        order = int(doc["order"])
        table = doc["table"]
        series = doc["series"]
    except (KeyError, TypeError) as e:
        raise ParseError(f"missing field: {e}") from e
    try:
        g = FiniteGroup.from_table(table)
    except (GroupStructureError, ValueError, IndexError) as e:
        raise ParseError(str(e)) from e
    if g.order != order:
        raise ParseError("order field disagrees with table size")
    s = SolvableSeries(tuple(tuple(int(x) for x in sub) for sub in series))
    try:
        s.validate(g)
    except GroupStructureError as e:
        raise ParseError(str(e)) from e
    return g, s


def depth_report(group: FiniteGroup, series: SolvableSeries,
                 n_values: Sequence[int]) -> list[dict]:
    """Rows of (n, depth, ancilla_count) for the planned networks."""
    rows = []
    for n in n_values:
        net = plan_network(group, series, n)
        rows.append({"n": int(n), "depth": net.depth,
                     "ancillas": net.ancilla_count})
    return rows


def exhaustive_check(group: FiniteGroup, series: SolvableSeries, n: int) -> bool:
    """Compare the network against the table fold on every length-n sequence."""
    net = plan_network(group, series, n)
    seq = [0] * n
    while True:
        if evaluate(net, seq) != group.fold(seq):
            return False
        for i in range(n - 1, -1, -1):
            seq[i] += 1
            if seq[i] < group.order:
                break
            seq[i] = 0
        else:
            return True


def random_check(group: FiniteGroup, series: SolvableSeries, n: int,
                 trials: int, seed: int = 0) -> bool:
    net = plan_network(group, series, n)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        seq = rng.integers(0, group.order, n).tolist()
        if evaluate(net, seq) != group.fold(seq):
            return False
    return True
