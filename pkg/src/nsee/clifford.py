"""Two-qubit Clifford group: enumeration, composition, dense realization.

The group modulo global phase has 11520 = |Sp(4,2)| * 2^4 elements.  Each
element is stored by the images of X1, Z1, X2, Z2 under conjugation, which
fixes its action on every Pauli string.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .pauli import PauliString, commutes, conjugate_by_gate, conjugate_by_images

_LETTERS = "IXYZ"


def _signed_pauli_candidates(n: int) -> list[PauliString]:
    """All non-identity signed Hermitian Paulis on n qubits, in the canonical
    lexicographic (letters, sign) order with I<X<Y<Z and + before -."""
    out = []
    for idx in range(4 ** n):
        word = "".join(_LETTERS[(idx // 4 ** pos) % 4] for pos in range(n - 1, -1, -1))
        if word == "I" * n:
            continue
        for sign in ("+", "-"):
            out.append(PauliString.from_label(sign + word))
    return out


@dataclass(frozen=True)
class TwoQubitClifford:
    """A two-qubit Clifford element given by its images of X1, Z1, X2, Z2."""

    images: tuple[PauliString, PauliString, PauliString, PauliString]
    index: int | None = None

    def __post_init__(self):
        x1, z1, x2, z2 = self.images
        ok = (not commutes(x1, z1) and not commutes(x2, z2)
              and commutes(x1, x2) and commutes(x1, z2)
              and commutes(z1, x2) and commutes(z1, z2))
        if not ok:
            raise ValueError("images do not form a valid symplectic map")

    def key(self):
        return tuple((p.x_bits, p.z_bits, p.phase) for p in self.images)

    @property
    def is_identity(self) -> bool:
        return self.key() == _IDENTITY_KEY

    def conjugate_local(self, p: PauliString) -> PauliString:
        """U p U^dag for a 2-qubit PauliString p."""
        return conjugate_by_images(p, self.images, (0, 1))

    def conjugate_pauli(self, p: PauliString, sites: tuple[int, int]) -> PauliString:
        """U p U^dag acting on two (distinct) sites of an N-qubit string."""
        return conjugate_by_images(p, self.images, sites)

    def as_unitary(self) -> np.ndarray:
        """Dense 4x4 unitary with the stored conjugation action; global phase
        fixed by making the first nonzero entry real positive."""
        x1, z1, x2, z2 = (p.to_matrix() for p in self.images)
        # |v> spans the image of |00>: the joint +1 eigenvector of z1', z2'
        proj = 0.25 * (np.eye(4) + z1) @ (np.eye(4) + z2)
        col = np.argmax(np.linalg.norm(proj, axis=0))
        v = proj[:, col] / np.linalg.norm(proj[:, col])
        u = np.zeros((4, 4), dtype=complex)
        for a in range(2):
            for b in range(2):
                w = v
                if a:
                    w = x1 @ w
                if b:
                    w = x2 @ w
                u[:, 2 * a + b] = w
        flat = u.ravel()
        first = flat[np.flatnonzero(np.abs(flat) > 1e-12)[0]]
        u = u * (abs(first) / first)
        return u


_IDENTITY_IMAGES = tuple(PauliString.from_label(l) for l in ("+XI", "+ZI", "+IX", "+IZ"))
_IDENTITY_KEY = tuple((p.x_bits, p.z_bits, p.phase) for p in _IDENTITY_IMAGES)


@lru_cache(maxsize=1)
def enumerate_two_qubit_cliffords() -> tuple[TwoQubitClifford, ...]:
    """All 11520 two-qubit Cliffords in a deterministic canonical order."""
    cands = _signed_pauli_candidates(2)
    n = len(cands)
    anti = np.zeros((n, n), dtype=bool)
    for i, a in enumerate(cands):
        for j, b in enumerate(cands):
            anti[i, j] = not commutes(a, b)
    out = []
    for i in range(n):
        bi = anti[i]
        for j in np.flatnonzero(bi):
            for k in range(n):
                if anti[i, k] or anti[j, k]:
                    continue
                for l in np.flatnonzero(anti[k]):
                    if anti[i, l] or anti[j, l]:
                        continue
                    out.append(TwoQubitClifford(
                        (cands[i], cands[j], cands[k], cands[l]), index=len(out)))
    if len(out) != 11520:
        raise AssertionError(f"enumeration produced {len(out)} elements")
    return tuple(out)


@lru_cache(maxsize=1)
def _index_lookup() -> dict:
    return {c.key(): c.index for c in enumerate_two_qubit_cliffords()}


def clifford_from_images(images) -> TwoQubitClifford:
    """Canonical (indexed) element with the given images."""
    table = enumerate_two_qubit_cliffords()
    key = tuple((p.x_bits, p.z_bits, p.phase) for p in images)
    return table[_index_lookup()[key]]


def identity_clifford() -> TwoQubitClifford:
    return clifford_from_images(_IDENTITY_IMAGES)


def compose(a: TwoQubitClifford, b: TwoQubitClifford) -> TwoQubitClifford:
    """Element acting as "apply a, then b"."""
    return clifford_from_images(tuple(b.conjugate_local(p) for p in a.images))


def inverse(c: TwoQubitClifford) -> TwoQubitClifford:
    """Inverse element, found by inverting the conjugation bijection on the
    16 sign-free patterns."""
    preimages = {}
    for p in _signed_pauli_candidates(2):
        q = c.conjugate_local(p)
        preimages[(q.x_bits, q.z_bits, q.phase)] = p
    images = tuple(preimages[(g.x_bits, g.z_bits, g.phase)]
                   for g in _IDENTITY_IMAGES)
    return clifford_from_images(images)


# -- coset structure --------------------------------------------------------

@lru_cache(maxsize=1)
def _single_qubit_products() -> tuple[TwoQubitClifford, ...]:
    """The 576 elements of the form u1 (x) u2 with u1, u2 single-qubit."""
    cands1 = _signed_pauli_candidates(1)
    singles = []
    for a in cands1:
        for b in cands1:
            if commutes(a, b):
                continue
            singles.append((a, b))
    assert len(singles) == 24
    out = []
    for xa, za in singles:
        for xb, zb in singles:
            images = (
                PauliString(2, xa.x_bits, xa.z_bits, xa.phase),
                PauliString(2, za.x_bits, za.z_bits, za.phase),
                PauliString(2, xb.x_bits << 1, xb.z_bits << 1, xb.phase),
                PauliString(2, zb.x_bits << 1, zb.z_bits << 1, zb.phase),
            )
            out.append(clifford_from_images(images))
    assert len(out) == 576
    return tuple(out)


@lru_cache(maxsize=1)
def coset_data():
    """Partition of the group into left cosets (C1 x C1) V.

    Two elements in a coset differ by single-qubit gates applied after the
    entangling part, which leave every bipartition's Schmidt spectrum
    unchanged; candidate scoring in the CA-MPS search therefore only needs
    one representative per coset.

    Returns (coset_of: int array [11520], representatives: list of element
    indices (one per coset, the minimal index), n_cosets).
    """
    table = enumerate_two_qubit_cliffords()
    locals_ = _single_qubit_products()
    coset_of = np.full(11520, -1, dtype=np.int64)
    reps = []
    for v in table:
        if coset_of[v.index] >= 0:
            continue
        cid = len(reps)
        members = [compose(v, u).index for u in locals_]
        for m in members:
            coset_of[m] = cid
        reps.append(min(members))
    assert all(coset_of >= 0)
    return coset_of, reps, len(reps)


# -- circuits ---------------------------------------------------------------

@dataclass(frozen=True)
class Gate:
    """One circuit element: an elementary gate or an indexed two-qubit Clifford."""

    kind: str                    # "H" | "S" | "CNOT" | "C2"
    sites: tuple[int, ...]
    clifford: TwoQubitClifford | None = None

    def __post_init__(self):
        if self.kind in ("H", "S"):
            if len(self.sites) != 1:
                raise IndexError(f"{self.kind} acts on one site")
        elif self.kind == "CNOT":
            if len(self.sites) != 2 or self.sites[0] == self.sites[1]:
                raise IndexError("CNOT needs distinct (control, target)")
        elif self.kind == "C2":
            if len(self.sites) != 2 or self.sites[0] == self.sites[1]:
                raise IndexError("C2 needs two distinct sites")
            if self.clifford is None:
                raise ValueError("C2 gate needs a TwoQubitClifford")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")

    def conjugate_pauli(self, p: PauliString) -> PauliString:
        if self.kind == "C2":
            return self.clifford.conjugate_pauli(p, self.sites)
        return conjugate_by_gate(p, self.kind, self.sites)

    def unitary(self) -> np.ndarray:
        """Dense matrix (2x2 for H/S, 4x4 otherwise)."""
        if self.kind == "H":
            return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        if self.kind == "S":
            return np.diag([1, 1j]).astype(complex)
        if self.kind == "CNOT":
            return np.array([[1, 0, 0, 0], [0, 1, 0, 0],
                             [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
        return self.clifford.as_unitary()


@dataclass
class CliffordCircuit:
    """Ordered gate list; list order is application order (leftmost first)."""

    n_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def append(self, gate: Gate):
        for s in gate.sites:
            if not 0 <= s < self.n_qubits:
                raise IndexError(f"site {s} out of range")
        self.gates.append(gate)

    def append_c2(self, c: TwoQubitClifford, sites: tuple[int, int]):
        self.append(Gate("C2", tuple(sites), c))

    def inverted(self) -> "CliffordCircuit":
        inv = CliffordCircuit(self.n_qubits)
        for gate in reversed(self.gates):
            if gate.kind == "H" or gate.kind == "CNOT":
                inv.append(gate)
            elif gate.kind == "S":
                # S^-1 = S S S
                for _ in range(3):
                    inv.append(gate)
            else:
                inv.append(Gate("C2", gate.sites, inverse(gate.clifford)))
        return inv

    def to_json(self) -> str:
        return json.dumps([
            {"gate": g.kind, "sites": list(g.sites),
             **({"index": g.clifford.index} if g.kind == "C2" else {})}
            for g in self.gates])

    @classmethod
    def from_json(cls, text: str, n_qubits: int) -> "CliffordCircuit":
        table = enumerate_two_qubit_cliffords()
        circ = cls(n_qubits)
        for entry in json.loads(text):
            kind = entry["gate"]
            sites = tuple(entry["sites"])
            if kind == "C2":
                circ.append(Gate("C2", sites, table[entry["index"]]))
            else:
                circ.append(Gate(kind, sites))
        return circ


def random_clifford_layer(n_qubits: int, rng: np.random.Generator,
                          offset: int = 0) -> CliffordCircuit:
    """One brickwork layer of uniform random two-qubit Cliffords on adjacent
    pairs starting at the given offset (0 or 1)."""
    if n_qubits < 2:
        raise ValueError("need at least two qubits")
    table = enumerate_two_qubit_cliffords()
    circ = CliffordCircuit(n_qubits)
    for i in range(offset % 2, n_qubits - 1, 2):
        circ.append_c2(table[int(rng.integers(len(table)))], (i, i + 1))
    return circ
