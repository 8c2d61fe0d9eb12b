"""Signed Pauli-string algebra in symplectic (bit-packed) representation.

A Pauli operator on N qubits is stored as two N-bit integers (x_bits,
z_bits) together with an integer power of i:

    P = i^phase * prod_j X_j^{x_j} Z_j^{z_j}

with bit j of x_bits/z_bits referring to qubit j.  The letter Y is the
pattern x_j = z_j = 1 with the convention Y = i X Z, so the textual string
"+Y" is stored as (x=1, z=1, phase=1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

_LETTER_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_TO_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}

_LETTER_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_PHASE_VALUES = (1, 1j, -1, -1j)


class PauliDimensionError(ValueError):
    """Raised when two Pauli objects act on different qubit counts."""


@dataclass(frozen=True)
class PauliString:
    """A signed N-qubit Pauli operator, immutable and hashable."""

    n_qubits: int
    x_bits: int
    z_bits: int
    phase: int = 0  # power of i in [0, 4)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("need at least one qubit")
        mask = (1 << self.n_qubits) - 1
        object.__setattr__(self, "x_bits", self.x_bits & mask)
        object.__setattr__(self, "z_bits", self.z_bits & mask)
        object.__setattr__(self, "phase", self.phase % 4)

    # -- constructors ------------------------------------------------------

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0, 0)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse text like "-XIYZ" or "iY"; one letter per qubit, left = qubit 0."""
        s = label.strip()
        phase = 0
        for prefix, k in (("-i", 3), ("+i", 1), ("i", 1), ("-", 2), ("+", 0)):
            if s.startswith(prefix):
                phase = k
                s = s[len(prefix):]
                break
        if not s:
            raise ValueError(f"empty Pauli label: {label!r}")
        x = z = 0
        for j, letter in enumerate(s):
            try:
                xb, zb = _LETTER_TO_BITS[letter]
            except KeyError:
                raise ValueError(f"bad Pauli letter {letter!r} in {label!r}") from None
            x |= xb << j
            z |= zb << j
            if xb and zb:
                phase += 1  # Y = iXZ
        return cls(len(s), x, z, phase)

    @classmethod
    def from_ops(cls, n_qubits: int, ops: dict[int, str], sign: int = 1) -> "PauliString":
        """Build from a site -> letter map, e.g. {0: "X", 3: "Z"}."""
        x = z = phase = 0
        for site, letter in ops.items():
            if not 0 <= site < n_qubits:
                raise IndexError(f"site {site} out of range for {n_qubits} qubits")
            xb, zb = _LETTER_TO_BITS[letter]
            x |= xb << site
            z |= zb << site
            if xb and zb:
                phase += 1
        if sign == -1:
            phase += 2
        elif sign != 1:
            raise ValueError("sign must be +1 or -1")
        return cls(n_qubits, x, z, phase)

    # -- basic queries -----------------------------------------------------

    @property
    def n_y(self) -> int:
        return (self.x_bits & self.z_bits).bit_count()

    @property
    def sign_power(self) -> int:
        """Power of i multiplying the letter string (0/2 for Hermitian)."""
        return (self.phase - self.n_y) % 4

    @property
    def is_hermitian(self) -> bool:
        return self.sign_power % 2 == 0

    @property
    def sign(self) -> complex:
        """Scalar in {1, i, -1, -i} multiplying the letter string."""
        return _PHASE_VALUES[self.sign_power]

    @property
    def is_identity(self) -> bool:
        return self.x_bits == 0 and self.z_bits == 0

    def letter(self, site: int) -> str:
        return _BITS_TO_LETTER[((self.x_bits >> site) & 1, (self.z_bits >> site) & 1)]

    def support(self) -> tuple[int, ...]:
        bits = self.x_bits | self.z_bits
        return tuple(j for j in range(self.n_qubits) if (bits >> j) & 1)

    def label(self) -> str:
        prefix = {0: "+", 1: "i", 2: "-", 3: "-i"}[self.sign_power]
        return prefix + "".join(self.letter(j) for j in range(self.n_qubits))

    def __repr__(self):
        return f"PauliString({self.label()!r})"

    # -- algebra -----------------------------------------------------------

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def with_phase(self, phase: int) -> "PauliString":
        return PauliString(self.n_qubits, self.x_bits, self.z_bits, phase)

    def pattern(self) -> tuple[int, int]:
        """Sign-free (x_bits, z_bits) key."""
        return (self.x_bits, self.z_bits)

    def to_matrix(self) -> np.ndarray:
        """Dense 2^N x 2^N matrix (qubit 0 is the leftmost kron factor)."""
        m = np.array([[1.0 + 0j]])
        for j in range(self.n_qubits):
            m = np.kron(m, _LETTER_MATS[self.letter(j)])
        return self.sign * m

    def apply_to_statevector(self, vec: np.ndarray) -> np.ndarray:
        """P|v> with qubit 0 mapped to the most significant bit of the index."""
        n = self.n_qubits
        if vec.shape != (1 << n,):
            raise PauliDimensionError("statevector length mismatch")
        idx = np.arange(1 << n, dtype=np.int64)
        # reverse bit order: qubit j <-> bit (n-1-j) of the index
        xm = _reverse_bits(self.x_bits, n)
        zm = _reverse_bits(self.z_bits, n)
        signs = 1 - 2 * (np.bitwise_count(idx & zm) & 1).astype(np.int64)
        out = np.zeros_like(vec, dtype=complex)
        out[idx ^ xm] = _PHASE_VALUES[self.phase] * signs * vec
        return out


def _reverse_bits(bits: int, n: int) -> int:
    out = 0
    for j in range(n):
        if (bits >> j) & 1:
            out |= 1 << (n - 1 - j)
    return out


def _check_sizes(a: PauliString, b: PauliString):
    if a.n_qubits != b.n_qubits:
        raise PauliDimensionError(
            f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Product a*b with exact phase tracking.

    Moving X^{x_b} through Z^{z_a} picks up (-1)^{<z_a, x_b>}.
    """
    _check_sizes(a, b)
    phase = a.phase + b.phase + 2 * (a.z_bits & b.x_bits).bit_count()
    return PauliString(a.n_qubits, a.x_bits ^ b.x_bits, a.z_bits ^ b.z_bits, phase)


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff <a.x, b.z> + <a.z, b.x> = 0 (mod 2)."""
    _check_sizes(a, b)
    return ((a.x_bits & b.z_bits).bit_count()
            + (a.z_bits & b.x_bits).bit_count()) % 2 == 0


# -- Clifford conjugation ---------------------------------------------------

# Images of X and Z on each touched site, as labels on the gate's local qubits.
_GATE_IMAGES = {
    "H": ("+Z", "+X"),
    "S": ("+Y", "+Z"),
    "CNOT": ("+XX", "+ZI", "+IX", "+ZZ"),
}


def conjugate_by_images(p: PauliString, images: Sequence[PauliString],
                        sites: Sequence[int]) -> PauliString:
    """Rewrite p under U p U^dag where U maps X_s1 -> images[0], Z_s1 -> images[1], ...

    The images are local PauliStrings on len(sites) qubits.  The local
    restriction of p factors as prod_s X^{x_s} Z^{z_s} (distinct sites
    commute), so each factor is replaced by its image and the products are
    taken in that fixed order.
    """
    k = len(sites)
    if len(set(sites)) != k:
        raise IndexError("sites must be distinct")
    for s in sites:
        if not 0 <= s < p.n_qubits:
            raise IndexError(f"site {s} out of range for {p.n_qubits} qubits")
    if len(images) != 2 * k or any(im.n_qubits != k for im in images):
        raise ValueError("need one X image and one Z image per local qubit")

    local = PauliString.identity(k)
    for a, s in enumerate(sites):
        if (p.x_bits >> s) & 1:
            local = local * images[2 * a]
        if (p.z_bits >> s) & 1:
            local = local * images[2 * a + 1]

    x, z = p.x_bits, p.z_bits
    for a, s in enumerate(sites):
        x = (x & ~(1 << s)) | (((local.x_bits >> a) & 1) << s)
        z = (z & ~(1 << s)) | (((local.z_bits >> a) & 1) << s)
    return PauliString(p.n_qubits, x, z, p.phase + local.phase)


def conjugate_by_gate(p: PauliString, gate: str, sites: Sequence[int]) -> PauliString:
    """Conjugate by an elementary Clifford gate in {H, S, CNOT}.

    CNOT takes sites = (control, target).
    """
    try:
        images = [PauliString.from_label(l) for l in _GATE_IMAGES[gate]]
    except KeyError:
        raise ValueError(f"unknown gate {gate!r}") from None
    expected = len(images) // 2
    if len(sites) != expected:
        raise IndexError(f"{gate} acts on {expected} site(s)")
    return conjugate_by_images(p, images, sites)


# -- Pauli sums -------------------------------------------------------------

@dataclass
class PauliSum:
    """Real-weighted sum of Hermitian Pauli strings.

    Strings are normalized to a positive letter sign (any -1 is folded into
    the coefficient); duplicate bit patterns are merged and near-zero
    coefficients dropped.  Term order is the stable first-occurrence order.
    """

    n_qubits: int
    terms: list[tuple[float, PauliString]] = field(default_factory=list)

    COEFF_CUTOFF = 1e-14

    def __post_init__(self):
        merged: dict[tuple[int, int], float] = {}
        strings: dict[tuple[int, int], PauliString] = {}
        for coeff, s in self.terms:
            if s.n_qubits != self.n_qubits:
                raise PauliDimensionError("term qubit count mismatch")
            if not s.is_hermitian:
                raise ValueError(f"non-Hermitian term {s.label()!r}")
            c = float(coeff) * s.sign.real
            key = s.pattern()
            merged[key] = merged.get(key, 0.0) + c
            if key not in strings:
                strings[key] = s.with_phase(s.n_y)
        self.terms = [(c, strings[k]) for k, c in merged.items()
                      if abs(c) > self.COEFF_CUTOFF]

    def __len__(self):
        return len(self.terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.n_qubits != self.n_qubits:
            raise PauliDimensionError("qubit count mismatch")
        return PauliSum(self.n_qubits, self.terms + other.terms)

    def to_matrix(self) -> np.ndarray:
        dim = 1 << self.n_qubits
        m = np.zeros((dim, dim), dtype=complex)
        for coeff, s in self.terms:
            m += coeff * s.to_matrix()
        return m

    def serialize(self) -> str:
        """Lines of "coefficient<TAB>string"."""
        return "\n".join(f"{c:.17g}\t{s.label()}" for c, s in self.terms)

    @classmethod
    def deserialize(cls, text: str, n_qubits: int | None = None) -> "PauliSum":
        terms = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            coeff, label = line.split("\t")
            terms.append((float(coeff), PauliString.from_label(label)))
        if not terms:
            raise ValueError("empty Pauli sum text")
        n = n_qubits if n_qubits is not None else terms[0][1].n_qubits
        return cls(n, terms)


def conjugate_sum(h: PauliSum, circuit) -> PauliSum:
    """C H C^dag, term by term; the term count is preserved (conjugation is
    a bijection on Pauli patterns, so no merges can occur)."""
    terms = conjugate_terms(h.terms, circuit)
    return PauliSum(h.n_qubits, terms)


def conjugate_terms(terms, circuit):
    """Term-by-term conjugation preserving list order; used where downstream
    structures (MPO channels) rely on a stable term ordering.  Accepts a
    circuit or a single gate."""
    gates = circuit.gates if hasattr(circuit, "gates") else [circuit]
    out = []
    for coeff, s in terms:
        for gate in gates:
            s = gate.conjugate_pauli(s)
        c = coeff * s.sign.real
        out.append((c, s.with_phase(s.n_y)))
    return out
