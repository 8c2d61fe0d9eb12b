"""Open-boundary matrix product state engine.

Tensors are rank-3 arrays (left bond, physical=2, right bond) with an
orthogonality center: everything left of the center is left-orthonormal,
everything right of it right-orthonormal.  Entropies are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import PauliSum, PauliString, _LETTER_MATS

SWAP = np.array([[1, 0, 0, 0],
                 [0, 0, 1, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1]], dtype=complex)

STATEVECTOR_CAP = 16


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class Bipartition:
    """Subset of site indices forming side A; the complement is side B."""

    n_sites: int
    side_a: frozenset

    def __post_init__(self):
        if not self.side_a or len(self.side_a) >= self.n_sites:
            raise ValueError("side A must be a nonempty proper subset")
        if not all(0 <= s < self.n_sites for s in self.side_a):
            raise ValueError("site index out of range")

    @classmethod
    def prefix(cls, n_sites: int, k: int) -> "Bipartition":
        """First k sites vs the rest."""
        return cls(n_sites, frozenset(range(k)))

    def complement(self) -> "Bipartition":
        return Bipartition(self.n_sites,
                           frozenset(range(self.n_sites)) - self.side_a)

    def prefix_bond(self) -> int | None:
        """Bond index if side A or side B is a contiguous prefix, else None."""
        a = sorted(self.side_a)
        if a == list(range(len(a))):
            return len(a)
        b = sorted(set(range(self.n_sites)) - self.side_a)
        if b == list(range(len(b))):
            return len(b)
        return None


@dataclass(frozen=True)
class CutSet:
    cuts: tuple[Bipartition, ...]

    def __post_init__(self):
        if not self.cuts:
            raise ValueError("cut set must be nonempty")
        if len({c.side_a for c in self.cuts}) != len(self.cuts):
            raise ValueError("duplicate bipartitions")

    def __iter__(self):
        return iter(self.cuts)

    def __len__(self):
        return len(self.cuts)


def entropy_from_schmidt(svals: np.ndarray) -> float:
    """-sum p ln p over the renormalized squared Schmidt values."""
    p = np.asarray(svals, dtype=float) ** 2
    total = p.sum()
    if total <= 0:
        return 0.0
    p = p[p > 1e-30] / total
    return float(-(p * np.log(p)).sum())


class MpsState:
    """Mutable MPS with tracked orthogonality center.

    Gauge-moving operations (move_center, entropy reads) mutate tensors but
    not the represented state; use clone() for independent copies.
    """

    def __init__(self, tensors, center: int = 0):
        self.tensors = [np.asarray(t, dtype=complex) for t in tensors]
        self.center = center
        for i, t in enumerate(self.tensors):
            if t.ndim != 3 or t.shape[1] != 2:
                raise ValueError(f"tensor {i} must be (Dl, 2, Dr)")
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[2] != 1:
            raise ValueError("boundary bonds must have dimension 1")

    # -- constructors ------------------------------------------------------

    @classmethod
    def product_state(cls, bits) -> "MpsState":
        tensors = []
        for b in bits:
            t = np.zeros((1, 2, 1), dtype=complex)
            t[0, int(b), 0] = 1.0
            tensors.append(t)
        return cls(tensors, center=0)

    @classmethod
    def from_statevector(cls, vec, threshold: float = 0.0,
                         max_bond: int | None = None) -> "MpsState":
        vec = np.asarray(vec, dtype=complex)
        n = int(round(math.log2(vec.size)))
        if 1 << n != vec.size:
            raise ValueError("statevector length must be a power of two")
        tensors = []
        rest = vec.reshape(1, -1)
        for _ in range(n - 1):
            dl = rest.shape[0]
            m = rest.reshape(dl * 2, -1)
            u, s, vh = np.linalg.svd(m, full_matrices=False)
            keep = _keep_count(s, threshold, max_bond)
            u, s, vh = u[:, :keep], s[:keep], vh[:keep]
            tensors.append(u.reshape(dl, 2, keep))
            rest = (s[:, None] * vh)
        tensors.append(rest.reshape(rest.shape[0], 2, 1))
        state = cls(tensors, center=n - 1)
        state.normalize()
        return state

    def clone(self) -> "MpsState":
        return MpsState([t.copy() for t in self.tensors], self.center)

    # -- basic queries -----------------------------------------------------

    @property
    def n_sites(self) -> int:
        return len(self.tensors)

    @property
    def bond_dims(self) -> list[int]:
        return [self.tensors[0].shape[0]] + [t.shape[2] for t in self.tensors]

    def norm(self) -> float:
        return float(np.linalg.norm(self.tensors[self.center]))

    def normalize(self):
        nrm = self.norm()
        if nrm > 0:
            self.tensors[self.center] = self.tensors[self.center] / nrm

    def to_statevector(self, cap: int = STATEVECTOR_CAP) -> np.ndarray:
        if self.n_sites > cap:
            raise CapacityError(f"{self.n_sites} sites exceeds cap {cap}")
        v = self.tensors[0]
        for t in self.tensors[1:]:
            v = np.tensordot(v, t, axes=([v.ndim - 1], [0]))
        return v.reshape(-1)

    # -- canonical form ----------------------------------------------------

    def move_center(self, target: int):
        while self.center < target:
            i = self.center
            dl, _, dr = self.tensors[i].shape
            q, r = np.linalg.qr(self.tensors[i].reshape(dl * 2, dr))
            self.tensors[i] = q.reshape(dl, 2, -1)
            self.tensors[i + 1] = np.tensordot(r, self.tensors[i + 1], axes=(1, 0))
            self.center += 1
        while self.center > target:
            i = self.center
            dl, _, dr = self.tensors[i].shape
            m = self.tensors[i].reshape(dl, 2 * dr)
            q, r = np.linalg.qr(m.conj().T)
            self.tensors[i] = q.conj().T.reshape(-1, 2, dr)
            self.tensors[i - 1] = np.tensordot(self.tensors[i - 1], r.conj().T,
                                               axes=(2, 0))
            self.center -= 1

    # -- gates -------------------------------------------------------------

    def apply_single_site_gate(self, u: np.ndarray, site: int):
        self.tensors[site] = np.einsum("pq,aqb->apb", u, self.tensors[site])

    def apply_two_site_gate(self, u: np.ndarray, site: int,
                            max_bond: int | None = None,
                            threshold: float = 0.0,
                            center_to: str = "right") -> float:
        """Apply a 4x4 unitary to (site, site+1) with truncated SVD.

        Returns the discarded weight (sum of dropped squared Schmidt values
        of the normalized pre-truncation state); the state is renormalized.
        """
        u = np.asarray(u, dtype=complex)
        if u.shape != (4, 4) or np.abs(u @ u.conj().T - np.eye(4)).max() > 1e-8:
            raise ValueError("gate must be a 4x4 unitary")
        self.move_center(site if self.center <= site else site + 1)
        theta = self._two_site_tensor(site)
        theta = apply_gate_to_theta(theta, u)
        return self._split_theta(theta, site, max_bond, threshold, center_to)

    def _two_site_tensor(self, site: int) -> np.ndarray:
        if self.center not in (site, site + 1):
            raise AssertionError("center must sit on the two-site window")
        return np.tensordot(self.tensors[site], self.tensors[site + 1],
                            axes=(2, 0))

    def _split_theta(self, theta: np.ndarray, site: int,
                     max_bond: int | None, threshold: float,
                     center_to: str = "right") -> float:
        dl, _, _, dr = theta.shape
        u, s, vh = np.linalg.svd(theta.reshape(dl * 2, 2 * dr),
                                 full_matrices=False)
        total = float((s ** 2).sum())
        keep = _keep_count(s, threshold, max_bond)
        discarded = float((s[keep:] ** 2).sum()) / total if total > 0 else 0.0
        u, s, vh = u[:, :keep], s[:keep], vh[:keep]
        s = s / np.linalg.norm(s)  # renormalize after truncation
        if center_to == "right":
            self.tensors[site] = u.reshape(dl, 2, keep)
            self.tensors[site + 1] = (s[:, None] * vh).reshape(keep, 2, dr)
            self.center = site + 1
        else:
            self.tensors[site] = (u * s[None, :]).reshape(dl, 2, keep)
            self.tensors[site + 1] = vh.reshape(keep, 2, dr)
            self.center = site
        return discarded

    # -- entropies ---------------------------------------------------------

    def schmidt_values(self, bond: int) -> np.ndarray:
        """Descending Schmidt values across bond (1..N-1), renormalized."""
        if not 1 <= bond <= self.n_sites - 1:
            raise ValueError("internal bond index required")
        self.move_center(bond - 1)
        t = self.tensors[bond - 1]
        s = np.linalg.svd(t.reshape(t.shape[0] * 2, t.shape[2]),
                          compute_uv=False)
        nrm = np.linalg.norm(s)
        return s / nrm if nrm > 0 else s

    def entanglement_entropy_at(self, bond: int) -> float:
        return entropy_from_schmidt(self.schmidt_values(bond))

    def entropy_of_bipartition(self, cut: Bipartition,
                               swap_threshold: float = 1e-12) -> float:
        """Entropy of an arbitrary bipartition; non-contiguous side A is made
        contiguous on a working copy via a SWAP network."""
        if cut.n_sites != self.n_sites:
            raise ValueError("cut size mismatch")
        bond = cut.prefix_bond()
        if bond is not None:
            return self.entanglement_entropy_at(bond)
        work = self.clone()
        order = sorted(cut.side_a) + sorted(set(range(self.n_sites)) - cut.side_a)
        current = list(range(self.n_sites))
        for target_pos, site in enumerate(order):
            j = current.index(site)
            while j > target_pos:
                work.apply_two_site_gate(SWAP, j - 1, max_bond=None,
                                         threshold=swap_threshold)
                current[j - 1], current[j] = current[j], current[j - 1]
                j -= 1
        return work.entanglement_entropy_at(len(cut.side_a))

    # -- expectation values ------------------------------------------------

    def expectation_pauli_string(self, p: PauliString) -> complex:
        if p.n_qubits != self.n_sites:
            raise ValueError("operator size mismatch")
        env = np.ones((1, 1), dtype=complex)
        for i, t in enumerate(self.tensors):
            op = _LETTER_MATS[p.letter(i)]
            env = np.einsum("ab,apc,pq,bqd->cd", env, t.conj(), op, t,
                            optimize=True)
        return p.sign * env[0, 0]

    def expectation_pauli_sum(self, h: PauliSum) -> float:
        return float(sum((c * self.expectation_pauli_string(s)).real
                         for c, s in h.terms))

    def overlap(self, other: "MpsState") -> float:
        """|<self|other>| via transfer-matrix contraction."""
        if other.n_sites != self.n_sites:
            raise ValueError("size mismatch")
        env = np.ones((1, 1), dtype=complex)
        for a, b in zip(self.tensors, other.tensors):
            env = np.einsum("ab,apc,bpd->cd", env, a.conj(), b, optimize=True)
        return float(abs(env[0, 0]))


def apply_gate_to_theta(theta: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Contract a 4x4 gate into the physical legs of a (Dl,2,2,Dr) tensor."""
    ur = u.reshape(2, 2, 2, 2)
    out = np.tensordot(theta, ur, axes=([1, 2], [2, 3]))  # (Dl, Dr, s1, s2)
    return out.transpose(0, 2, 3, 1)


def _keep_count(s: np.ndarray, threshold: float, max_bond: int | None) -> int:
    keep = int((s >= max(threshold, 0.0)).sum()) if threshold > 0 else s.size
    if max_bond is not None:
        keep = min(keep, max_bond)
    return max(keep, 1)
