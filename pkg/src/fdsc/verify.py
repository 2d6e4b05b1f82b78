"""Exact verification of one-layer CX circuits by stabilizer propagation,
with a brute-force state-vector oracle at toy sizes.

States are tracked as stabilizer tableaus: one generator per qubit, each a
signed Pauli product stored as an X-mask row, a Z-mask row, and a sign bit
(0 for +1).  Paulis use the X^x Z^z convention per qubit, so multiplying
P1 * P2 picks up (-1)^(z1 . x2).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import gf2
from .css import CssCode
from .gf2 import BitMatrix, DimensionMismatch, EchelonBasis
from .synth import FdscCircuit


class IndexOutOfRange(ValueError):
    """A qubit index is outside the register."""


class InvalidLayer(ValueError):
    """Controls and targets overlap; not a valid one-layer circuit."""


class TooLarge(ValueError):
    """State-vector oracle cap exceeded."""


STATEVECTOR_CAP = 20


@dataclass(frozen=True)
class SymplecticState:
    n_qubits: int
    stab_x: BitMatrix
    stab_z: BitMatrix
    signs: np.ndarray

    def __post_init__(self):
        n = self.n_qubits
        if (self.stab_x.rows != n or self.stab_z.rows != n
                or self.stab_x.cols != n or self.stab_z.cols != n
                or self.signs.shape != (n,)):
            raise DimensionMismatch("tableau must be n generators over n qubits")

    def generator(self, i: int) -> tuple[np.ndarray, np.ndarray, int]:
        x = self.stab_x.to_dense()[i]
        z = self.stab_z.to_dense()[i]
        return x, z, int(self.signs[i])


def initial_state(n: int, plus_qubits: Iterable[int]) -> SymplecticState:
    """Product state |+> on the given qubits and |0> on the rest."""
    plus = sorted(set(int(q) for q in plus_qubits))
    if plus and not (0 <= plus[0] and plus[-1] < n):
        raise IndexOutOfRange(f"plus qubits outside 0..{n - 1}")
    sx = BitMatrix.zeros(n, n)
    sz = BitMatrix.zeros(n, n)
    in_plus = np.zeros(n, dtype=bool)
    in_plus[plus] = True
    for i in range(n):
        (sx if in_plus[i] else sz).set(i, i, 1)
    return SymplecticState(n, sx, sz, np.zeros(n, dtype=np.uint8))


def _col_bits(m: BitMatrix, j: int) -> np.ndarray:
    w, b = divmod(j, 64)
    return ((m.data[:, w] >> np.uint64(b)) & np.uint64(1)).astype(np.uint8)


def _col_xor(m: BitMatrix, j: int, bits: np.ndarray) -> None:
    w, b = divmod(j, 64)
    m.data[:, w] ^= bits.astype(np.uint64) << np.uint64(b)


def apply_cx_layer(state: SymplecticState,
                   gates: Sequence[tuple[int, int]]) -> SymplecticState:
    """Conjugate every generator by the commuting CX layer.

    X on a control spreads to its target, Z on a target spreads to its
    control.  In the X^x Z^z phase convention the exponent updates never
    reorder an X past a Z on the same qubit, so CX conjugation leaves every
    sign bit unchanged; signs are still carried so membership tests stay
    honest about the +1 eigenvalue.
    """
    controls = {c for c, _ in gates}
    targets = {t for _, t in gates}
    if controls & targets:
        raise InvalidLayer("control and target sets overlap")
    for q in controls | targets:
        if not 0 <= q < state.n_qubits:
            raise IndexOutOfRange(q)
    sx = state.stab_x.copy()
    sz = state.stab_z.copy()
    for c, t in gates:
        xc = _col_bits(sx, c)
        zt = _col_bits(sz, t)
        _col_xor(sx, t, xc)
        _col_xor(sz, c, zt)
    return SymplecticState(state.n_qubits, sx, sz, state.signs.copy())


class _GroupMembership:
    """Decides membership of signed Paulis in the generated stabilizer group."""

    def __init__(self, state: SymplecticState):
        self.state = state
        self.xs = state.stab_x.to_dense()
        self.zs = state.stab_z.to_dense()
        self.basis = EchelonBasis(2 * state.n_qubits)
        for i in range(state.n_qubits):
            self.basis.add(np.concatenate([self.xs[i], self.zs[i]]))

    def contains(self, x_mask: np.ndarray, z_mask: np.ndarray,
                 sign: int = 0) -> bool:
        target = np.concatenate([x_mask, z_mask]).astype(np.uint8) & 1
        combo = self.basis.decompose(target)
        if combo is None:
            return False
        acc_z = np.zeros(self.state.n_qubits, dtype=np.uint8)
        r = 0
        for i in combo:
            r ^= int(self.state.signs[i])
            r ^= int(np.bitwise_and(acc_z, self.xs[i]).sum() & 1)
            acc_z ^= self.zs[i]
        return r == (sign & 1)


def contains_stabilizer(state: SymplecticState, x_mask: np.ndarray,
                        z_mask: np.ndarray) -> bool:
    """True iff the +1-signed Pauli X^x Z^z is a product of the generators."""
    x_mask = np.asarray(x_mask, dtype=np.uint8) & 1
    z_mask = np.asarray(z_mask, dtype=np.uint8) & 1
    if x_mask.shape != (state.n_qubits,) or z_mask.shape != (state.n_qubits,):
        raise DimensionMismatch("mask length != n_qubits")
    return _GroupMembership(state).contains(x_mask, z_mask)


@dataclass(frozen=True)
class VerifyReport:
    passed: bool
    failed_x: tuple[int, ...]
    failed_z: tuple[int, ...]
    n_checked: int

    def to_json(self) -> str:
        return json.dumps({"pass": self.passed,
                           "failed_x": list(self.failed_x),
                           "failed_z": list(self.failed_z),
                           "n_checked": self.n_checked},
                          sort_keys=True, separators=(",", ":"))


def final_state(circ: FdscCircuit) -> SymplecticState:
    return apply_cx_layer(initial_state(circ.n_qubits, circ.plus_qubits),
                          circ.gates)


def verify_circuit(code: CssCode, circ: FdscCircuit) -> VerifyReport:
    """Check every X and Z generator of the code against the output state."""
    if circ.n_qubits != code.n_qubits:
        raise DimensionMismatch("circuit and code qubit counts differ")
    member = _GroupMembership(final_state(circ))
    zeros = np.zeros(code.n_qubits, dtype=np.uint8)
    xcols = code.x_stabs.to_dense()
    zcols = code.z_stabs.to_dense()
    failed_x = [j for j in range(code.n_x)
                if not member.contains(xcols[:, j], zeros)]
    failed_z = [j for j in range(code.n_z)
                if not member.contains(zeros, zcols[:, j])]
    return VerifyReport(not failed_x and not failed_z,
                        tuple(failed_x), tuple(failed_z),
                        code.n_x + code.n_z)


# -- state-vector oracle ---------------------------------------------------


def _circuit_output_basis(circ: FdscCircuit) -> np.ndarray:
    """Computational-basis labels of the circuit output superposition."""
    plus = list(circ.plus_qubits)
    k = len(plus)
    labels = np.zeros(1 << k, dtype=np.uint64)
    idx = np.arange(1 << k, dtype=np.uint64)
    for pos, q in enumerate(plus):
        labels |= ((idx >> np.uint64(pos)) & np.uint64(1)) << np.uint64(q)
    for c, t in circ.gates:
        bit = (labels >> np.uint64(c)) & np.uint64(1)
        labels ^= bit << np.uint64(t)
    return labels


def circuit_statevector(circ: FdscCircuit) -> np.ndarray:
    """Amplitude vector of the circuit output (n <= 20)."""
    if circ.n_qubits > STATEVECTOR_CAP:
        raise TooLarge(f"n={circ.n_qubits} > {STATEVECTOR_CAP}")
    labels = _circuit_output_basis(circ)
    vec = np.zeros(1 << circ.n_qubits, dtype=np.float64)
    np.add.at(vec, labels.astype(np.int64), 1.0)
    return vec / np.linalg.norm(vec)


def ground_state_statevector(code: CssCode) -> np.ndarray:
    """Equal superposition over applying every X-generator subset to |0...0>.

    Enumerates only an independent column subset of the X-stabilizer matrix
    so dependent generators do not blow the term count up.
    """
    if code.n_qubits > STATEVECTOR_CAP:
        raise TooLarge(f"n={code.n_qubits} > {STATEVECTOR_CAP}")
    cols = gf2.column_rank_profile(code.x_stabs)
    dense = code.x_stabs.to_dense()
    supports = []
    for j in cols:
        mask = np.uint64(0)
        for q in np.flatnonzero(dense[:, j]):
            mask |= np.uint64(1) << np.uint64(q)
        supports.append(mask)
    k = len(supports)
    labels = np.zeros(1 << k, dtype=np.uint64)
    idx = np.arange(1 << k, dtype=np.uint64)
    for pos, mask in enumerate(supports):
        labels ^= np.where((idx >> np.uint64(pos)) & np.uint64(1), mask,
                           np.uint64(0))
    vec = np.zeros(1 << code.n_qubits, dtype=np.float64)
    np.add.at(vec, labels.astype(np.int64), 1.0)
    return vec / np.linalg.norm(vec)


def statevector_check(code: CssCode, circ: FdscCircuit) -> bool:
    """Exact equality of circuit output and the superposition ground state."""
    if code.n_qubits > STATEVECTOR_CAP:
        raise TooLarge(f"n={code.n_qubits} > {STATEVECTOR_CAP}")
    if circ.n_qubits != code.n_qubits:
        raise DimensionMismatch("circuit and code qubit counts differ")
    return np.allclose(circuit_statevector(circ),
                       ground_state_statevector(code), atol=1e-12)
