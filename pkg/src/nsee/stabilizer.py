"""Stabilizer tableau simulation and exact stabilizer-state entropies.

A state is the unique joint +1 eigenstate of N independent commuting Pauli
generators; Clifford evolution conjugates the generators (Gottesman-Knill).
Entanglement entropy across a cut follows from a GF(2) rank of the
generator bit matrix; it is always an integer multiple of ln 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import PauliString
from .mps import Bipartition

STATEVECTOR_CAP = 14


class CapacityError(ValueError):
    """Raised when a dense-oracle routine is asked for too many qubits."""


@dataclass
class Tableau:
    n_qubits: int
    generators: list[PauliString]

    def __post_init__(self):
        if len(self.generators) != self.n_qubits:
            raise ValueError("need exactly N generators")
        for g in self.generators:
            if g.n_qubits != self.n_qubits or g.sign_power % 2:
                raise ValueError("generators must be Hermitian N-qubit strings")

    def copy(self) -> "Tableau":
        return Tableau(self.n_qubits, list(self.generators))

    def serialize(self) -> str:
        return "\n".join(g.label() for g in self.generators)

    @classmethod
    def deserialize(cls, text: str) -> "Tableau":
        gens = [PauliString.from_label(line.strip())
                for line in text.splitlines() if line.strip()]
        return cls(gens[0].n_qubits, gens)


def new_zero_state(n: int) -> Tableau:
    """|0>^N, stabilized by {+Z_1, ..., +Z_N}."""
    return Tableau(n, [PauliString(n, 0, 1 << j, 0) for j in range(n)])


def apply_gate(t: Tableau, gate, sites=None) -> Tableau:
    """Conjugate every generator; gate is a clifford.Gate, or a gate name in
    {"H", "S", "CNOT"} together with sites."""
    from .pauli import conjugate_by_gate
    if sites is None:
        gens = [gate.conjugate_pauli(g) for g in t.generators]
    else:
        gens = [conjugate_by_gate(g, gate, sites) for g in t.generators]
    return Tableau(t.n_qubits, gens)


def apply_circuit(t: Tableau, circuit) -> Tableau:
    for gate in circuit.gates:
        t = apply_gate(t, gate)
    return t


def _bit_matrix(generators, sites) -> np.ndarray:
    """Rows = generators, columns = (x|z) bits restricted to the given sites."""
    rows = []
    for g in generators:
        rows.append([(g.x_bits >> s) & 1 for s in sites]
                    + [(g.z_bits >> s) & 1 for s in sites])
    return np.array(rows, dtype=np.uint8)


def _gf2_rank(m: np.ndarray) -> int:
    m = m.copy()
    rank = 0
    rows, cols = m.shape
    for c in range(cols):
        pivot = None
        for r in range(rank, rows):
            if m[r, c]:
                pivot = r
                break
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(rows):
            if r != rank and m[r, c]:
                m[r] ^= m[rank]
        rank += 1
    return rank


def entanglement_entropy(t: Tableau, cut: Bipartition) -> float:
    """(N_A - log2|G_A|) ln 2, with |G_A| the subgroup supported on A.

    Generators supported entirely on A form the kernel of the restriction to
    B, so log2|G_A| = N - rank(M_B).
    """
    side_a = sorted(cut.side_a)
    side_b = sorted(set(range(t.n_qubits)) - cut.side_a)
    if not side_a or not side_b:
        raise ValueError("cut must leave both sides nonempty")
    log2_ga = t.n_qubits - _gf2_rank(_bit_matrix(t.generators, side_b))
    return (len(side_a) - log2_ga) * math.log(2)


def to_statevector(t: Tableau, cap: int = STATEVECTOR_CAP) -> np.ndarray:
    """Dense unit vector stabilized by all generators (test-oracle scale).

    A basis state with nonzero overlap is found by solving the sign
    constraints of the Z-only subgroup over GF(2); the projector product
    prod (1+g)/2 applied to it then yields the state exactly.
    """
    n = t.n_qubits
    if n > cap:
        raise CapacityError(f"{n} qubits exceeds statevector cap {cap}")

    # Gaussian elimination on the x-block, combining generators exactly so
    # that the Z-only subgroup keeps its correct signs.
    gens = list(t.generators)
    row = 0
    for col in range(n):
        pivot = None
        for r in range(row, n):
            if (gens[r].x_bits >> col) & 1:
                pivot = r
                break
        if pivot is None:
            continue
        gens[row], gens[pivot] = gens[pivot], gens[row]
        for r in range(n):
            if r != row and (gens[r].x_bits >> col) & 1:
                gens[r] = gens[r] * gens[row]
        row += 1
    z_only = [g for g in gens if g.x_bits == 0]

    # solve (-1)^{z.b} sign = +1 for every Z-only generator
    if z_only:
        a = np.array([[(g.z_bits >> j) & 1 for j in range(n)] for g in z_only],
                     dtype=np.uint8)
        rhs = np.array([0 if g.sign.real > 0 else 1 for g in z_only],
                       dtype=np.uint8)
        b_bits = _gf2_solve(a, rhs)
    else:
        b_bits = np.zeros(n, dtype=np.uint8)
    index = 0
    for j in range(n):
        if b_bits[j]:
            index |= 1 << (n - 1 - j)  # qubit 0 = most significant bit

    v = np.zeros(1 << n, dtype=complex)
    v[index] = 1.0
    for g in t.generators:
        v = 0.5 * (v + g.apply_to_statevector(v))
    norm = np.linalg.norm(v)
    if norm < 1e-9:
        raise AssertionError("projector product annihilated the seed state")
    return v / norm


def _gf2_solve(a: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """One solution of a @ x = rhs over GF(2); a has full row rank here."""
    a = a.copy()
    rhs = rhs.copy()
    rows, cols = a.shape
    pivots = []
    row = 0
    for c in range(cols):
        pivot = None
        for r in range(row, rows):
            if a[r, c]:
                pivot = r
                break
        if pivot is None:
            continue
        a[[row, pivot]] = a[[pivot, row]]
        rhs[row], rhs[pivot] = rhs[pivot], rhs[row]
        for r in range(rows):
            if r != row and a[r, c]:
                a[r] ^= a[row]
                rhs[r] ^= rhs[row]
        pivots.append(c)
        row += 1
    if np.any(rhs[row:]):
        raise AssertionError("inconsistent stabilizer sign system")
    x = np.zeros(cols, dtype=np.uint8)
    for r, c in enumerate(pivots):
        x[c] = rhs[r]
    return x
