"""MPO construction from Pauli sums and a two-site DMRG ground-state solver.

The MPO uses the usual finite-state-automaton layout: a "ready" channel, a
"done" channel, and one channel per Hamiltonian term on every bond the term
crosses.  The construction is deterministic in the term order, so
conjugating terms on two adjacent sites only changes the two matching MPO
tensors; all cached environments elsewhere stay valid (used by camps).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from .mps import MpsState
from .pauli import PauliSum, _LETTER_MATS


@dataclass
class Mpo:
    n_sites: int
    tensors: list  # rank-4: (left bond, phys out, phys in, right bond)

    def to_matrix(self) -> np.ndarray:
        """Dense operator (oracle scale); selects the ready/done boundary
        channels."""
        m = self.tensors[0][0:1]
        for t in self.tensors[1:]:
            m = np.einsum("apqb,brsc->aprqsc", m, t).reshape(
                1, m.shape[1] * t.shape[1], m.shape[2] * t.shape[2], t.shape[3])
        return m[0, :, :, -1]


def _term_sites(string) -> tuple[int, int] | None:
    supp = string.support()
    if not supp:
        return None
    return supp[0], supp[-1]


def mpo_from_pauli_sum(h: PauliSum | list, n_sites: int | None = None) -> Mpo:
    """Exact MPO for a sum of Pauli strings.

    Accepts a PauliSum or a raw [(coeff, PauliString)] list (the latter is
    what camps uses to keep term order stable under conjugation).
    """
    terms = h.terms if isinstance(h, PauliSum) else h
    n = n_sites if n_sites is not None else (
        h.n_qubits if isinstance(h, PauliSum) else terms[0][1].n_qubits)
    if not terms:
        raise ValueError("empty Hamiltonian")

    spans = []
    for coeff, s in terms:
        st = _term_sites(s)
        if st is None:
            raise ValueError("identity term has no MPO site; fold it into energy")
        spans.append(st)

    # channels crossing bond b (between sites b-1 and b), in term order
    crossing = [[t for t, (lo, hi) in enumerate(spans) if lo < b <= hi]
                for b in range(n + 1)]

    tensors = []
    for i in range(n):
        left = crossing[i]
        right = crossing[i + 1]
        wl, wr = len(left) + 2, len(right) + 2
        w = np.zeros((wl, 2, 2, wr), dtype=complex)
        eye = np.eye(2)
        w[0, :, :, 0] = eye                     # ready -> ready
        w[wl - 1, :, :, wr - 1] = eye           # done -> done
        lpos = {t: 1 + k for k, t in enumerate(left)}
        rpos = {t: 1 + k for k, t in enumerate(right)}
        for t, (coeff, s) in enumerate(terms):
            lo, hi = spans[t]
            if not lo <= i <= hi:
                continue
            op = s.sign.real * _LETTER_MATS[s.letter(i)] if i == lo \
                else _LETTER_MATS[s.letter(i)]
            if i == lo:
                op = coeff * op
            src = 0 if i == lo else lpos[t]
            dst = wr - 1 if i == hi else rpos[t]
            # += not =: single-site terms on the same site share the
            # ready->done channel pair
            w[src, :, :, dst] += op
        tensors.append(w)
    return Mpo(n, tensors)


@dataclass
class DmrgConfig:
    max_bond: int = 64
    truncation_threshold: float = 1e-10
    max_sweeps: int = 30
    energy_tol: float = 1e-9
    eigensolver_tol: float = 1e-9
    eigensolver_max_iter: int = 200
    rng_seed: int = 0
    # decaying random perturbation of the two-site tensor; escapes the local
    # minima two-site updates hit on commuting-projector Hamiltonians
    noise_amplitude: float = 0.0
    noise_decay: float = 0.5

    def __post_init__(self):
        if min(self.max_bond, self.max_sweeps, self.eigensolver_max_iter) < 1:
            raise ValueError("config integers must be positive")
        if min(self.truncation_threshold, self.energy_tol,
               self.eigensolver_tol) <= 0:
            raise ValueError("config tolerances must be positive")


@dataclass
class DmrgResult:
    state: MpsState
    energy: float
    converged: bool
    sweeps: int
    trace: list = field(default_factory=list)  # (sweep, energy, max_bond, max_EE)


# -- environment contractions ----------------------------------------------

def _boundary_left(w_first: int) -> np.ndarray:
    e = np.zeros((1, w_first, 1), dtype=complex)
    e[0, 0, 0] = 1.0
    return e


def _boundary_right(w_last: int) -> np.ndarray:
    e = np.zeros((1, w_last, 1), dtype=complex)
    e[0, w_last - 1, 0] = 1.0
    return e


def update_left(env, a, w) -> np.ndarray:
    """Left environment, legs (bra, mpo, ket), extended over one site."""
    tmp = np.tensordot(env, a, axes=(2, 0))               # bra, w, p, ket
    tmp = np.tensordot(tmp, w, axes=([1, 2], [0, 2]))     # bra, ket, p_out, w2
    out = np.tensordot(a.conj(), tmp, axes=([0, 1], [0, 2]))  # bra2, ket, w2
    return out.transpose(0, 2, 1)


def update_right(env, a, w) -> np.ndarray:
    """Right environment, legs (bra, mpo, ket), extended one site leftward."""
    tmp = np.tensordot(a, env, axes=(2, 2))               # ket_l, p, bra, w
    tmp = np.tensordot(w, tmp, axes=([3, 2], [3, 1]))     # w_l, p_out, ket_l, bra
    return np.tensordot(a.conj(), tmp, axes=([1, 2], [1, 3]))  # bra_l, w_l, ket_l


def _heff_matvec(left, w1, w2, right, theta):
    x = np.tensordot(left, theta, axes=(2, 0))            # bra, w, p, q, ket_r
    x = np.tensordot(x, w1, axes=([1, 2], [0, 2]))        # bra, q, ket_r, p', w
    x = np.tensordot(x, w2, axes=([4, 1], [0, 2]))        # bra, ket_r, p', q', w
    x = np.tensordot(x, right, axes=([1, 4], [2, 1]))     # bra, p', q', bra_r
    return x


def solve_local(left, w1, w2, right, theta0, tol, maxiter):
    """Lowest eigenpair of the two-site effective Hamiltonian.

    Small problems are solved densely; larger ones with an implicitly
    restarted Lanczos iteration (scipy eigsh) on a matrix-free operator.
    """
    shape = theta0.shape
    dim = theta0.size

    def matvec(v):
        return _heff_matvec(left, w1, w2, right,
                            v.reshape(shape)).reshape(-1)

    if dim <= 64:
        basis = np.eye(dim, dtype=complex)
        dense = np.column_stack([matvec(basis[:, k]) for k in range(dim)])
        dense = 0.5 * (dense + dense.conj().T)
        vals, vecs = np.linalg.eigh(dense)
        return float(vals[0]), vecs[:, 0].reshape(shape)

    op = spla.LinearOperator((dim, dim), matvec=matvec, dtype=complex)
    v0 = theta0.reshape(-1)
    try:
        vals, vecs = spla.eigsh(op, k=1, which="SA", v0=v0, tol=tol,
                                maxiter=maxiter)
    except spla.ArpackNoConvergence as err:
        if err.eigenvalues.size:
            vals, vecs = err.eigenvalues, err.eigenvectors
        else:
            return float(np.vdot(v0, matvec(v0)).real), theta0
    return float(vals[0]), vecs[:, 0].reshape(shape)


def _random_product_state(n: int, rng) -> MpsState:
    tensors = []
    for _ in range(n):
        amp = rng.normal(size=2) + 1j * rng.normal(size=2)
        amp /= np.linalg.norm(amp)
        tensors.append(amp.reshape(1, 2, 1))
    return MpsState(tensors, center=0)


class TwoSiteSweeper:
    """Shared two-site sweep machinery for DMRG and CA-MPS ground state.

    Holds the MPS, the MPO, and both environment stacks; exposes per-bond
    local solves so camps can splice a Clifford step between the solve and
    the truncation.
    """

    def __init__(self, terms, n_sites: int, cfg: DmrgConfig,
                 state: MpsState | None = None):
        self.terms = list(terms)
        self.n = n_sites
        self.cfg = cfg
        rng = np.random.default_rng(cfg.rng_seed)
        self.rng = rng
        self.noise = cfg.noise_amplitude
        self.state = state if state is not None else _random_product_state(n_sites, rng)
        self.state.move_center(0)
        self.mpo = mpo_from_pauli_sum(self.terms, n_sites)
        self._build_right_envs()
        self.left_envs = [_boundary_left(self.mpo.tensors[0].shape[0])]

    def _build_right_envs(self):
        self.right_envs = [None] * (self.n + 1)
        self.right_envs[self.n] = _boundary_right(self.mpo.tensors[-1].shape[3])
        for i in range(self.n - 1, 0, -1):
            self.right_envs[i] = update_right(
                self.right_envs[i + 1], self.state.tensors[i],
                self.mpo.tensors[i])

    def refresh_mpo_pair(self, site: int):
        """Rebuild the MPO after the terms were conjugated on (site, site+1).

        The channel structure is stable (conjugation is a bijection on the
        pair's Pauli patterns), so away from the pair only one thing can
        change: a term whose sign flipped carries its coefficient at its
        first support site, which may lie left of the pair.  Right
        environments never depend on such a site's coefficient placement;
        left environments are rebuilt when an upstream tensor changed."""
        old = self.mpo.tensors
        self.mpo = mpo_from_pauli_sum(self.terms, self.n)
        stale = any(not np.array_equal(old[i], self.mpo.tensors[i])
                    for i in range(site))
        if stale:
            for i in range(len(self.left_envs) - 1):
                self.left_envs[i + 1] = update_left(
                    self.left_envs[i], self.state.tensors[i],
                    self.mpo.tensors[i])

    def solve_bond(self, site: int):
        """Eigen-solve the two-site problem at (site, site+1); returns
        (energy, theta) with theta normalized."""
        if self.state.center < site:
            self.state.move_center(site)
        elif self.state.center > site + 1:
            self.state.move_center(site + 1)
        theta0 = self.state._two_site_tensor(site)
        nrm = np.linalg.norm(theta0)
        if nrm > 0:
            theta0 = theta0 / nrm
        energy, theta = solve_local(
            self.left_envs[site], self.mpo.tensors[site],
            self.mpo.tensors[site + 1], self.right_envs[site + 2],
            theta0, self.cfg.eigensolver_tol, self.cfg.eigensolver_max_iter)
        if self.noise > 1e-14:
            theta = theta + self.noise * (
                self.rng.normal(size=theta.shape)
                + 1j * self.rng.normal(size=theta.shape))
        return energy, theta / np.linalg.norm(theta)

    def decay_noise(self):
        self.noise *= self.cfg.noise_decay

    def place_theta(self, site: int, theta, direction: str) -> float:
        """Split theta back into the chain and advance the environments."""
        discarded = self.state._split_theta(
            theta, site, self.cfg.max_bond, self.cfg.truncation_threshold,
            center_to="right" if direction == "right" else "left")
        if direction == "right":
            env = update_left(self.left_envs[site], self.state.tensors[site],
                              self.mpo.tensors[site])
            if len(self.left_envs) > site + 1:
                self.left_envs[site + 1] = env
                del self.left_envs[site + 2:]
            else:
                self.left_envs.append(env)
        else:
            self.right_envs[site + 1] = update_right(
                self.right_envs[site + 2], self.state.tensors[site + 1],
                self.mpo.tensors[site + 1])
            del self.left_envs[site + 1:]
        return discarded

    def bond_sequence(self):
        """One full sweep: left-to-right then right-to-left bond visits."""
        right = [(i, "right") for i in range(self.n - 1)]
        left = [(i, "left") for i in range(self.n - 2, -1, -1)]
        return right + left


def ground_state(h: PauliSum, cfg: DmrgConfig | None = None,
                 initial: MpsState | None = None) -> DmrgResult:
    """Two-site DMRG; returns the variational ground state and energy."""
    cfg = cfg or DmrgConfig()
    sweeper = TwoSiteSweeper(h.terms, h.n_qubits, cfg, state=initial)
    energy = np.inf
    trace = []
    converged = False
    sweep = 0
    for sweep in range(1, cfg.max_sweeps + 1):
        last = energy
        for site, direction in sweeper.bond_sequence():
            energy, theta = sweeper.solve_bond(site)
            sweeper.place_theta(site, theta, direction)
        # entropies read on a clone: gauge moves would invalidate the
        # cached environments
        probe = sweeper.state.clone()
        max_ee = max(probe.entanglement_entropy_at(b)
                     for b in range(1, sweeper.n))
        trace.append((sweep, energy, max(sweeper.state.bond_dims), max_ee))
        # noise perturbs the variational energy at second order
        if abs(energy - last) < cfg.energy_tol and sweeper.noise ** 2 <= cfg.energy_tol:
            converged = True
            break
        sweeper.decay_noise()
    return DmrgResult(sweeper.state, energy, converged, sweep, trace)
