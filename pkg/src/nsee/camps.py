"""Clifford-circuits-augmented MPS.

At every two-site step a two-qubit Clifford gate is chosen to minimize the
truncation error (ground-state mode) or the bond entanglement entropy
(state-disentangling mode); the gate is applied to the state, accumulated in
a circuit, and -- in ground-state mode -- the Hamiltonian is conjugated by
the same gate so the energy is frame invariant.

The non-stabilizerness entanglement entropy (NsEE) of a state is the summed
cut entropy remaining after the disentangling sweeps; the greedy local
search yields an upper bound on the true minimum over all Clifford circuits.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .clifford import (CliffordCircuit, Gate, TwoQubitClifford, coset_data,
                       enumerate_two_qubit_cliffords, identity_clifford)
from .dmrg import DmrgConfig, TwoSiteSweeper, ground_state
from .mps import (CutSet, MpsState, apply_gate_to_theta, entropy_from_schmidt,
                  _keep_count)
from .pauli import PauliSum, conjugate_terms

SELECTION_MODES = ("min_truncation_error", "min_entropy")


@dataclass
class CampsConfig:
    dmrg: DmrgConfig = field(default_factory=DmrgConfig)
    selection_mode: str = "min_truncation_error"
    candidates: tuple | None = None      # None = the full two-qubit group
    sweep_tol_entropy: float = 1e-8
    max_camps_sweeps: int = 50
    score_tol: float = 1e-12

    def __post_init__(self):
        if self.selection_mode not in SELECTION_MODES:
            raise ValueError(f"unknown selection mode {self.selection_mode!r}")
        if self.candidates is not None:
            if not any(c.is_identity for c in self.candidates):
                raise ValueError("candidate set must contain the identity")
        if self.max_camps_sweeps < 1 or self.sweep_tol_entropy <= 0:
            raise ValueError("bad sweep limits")


@dataclass
class CampsResult:
    state: MpsState
    circuit: CliffordCircuit
    transformed_hamiltonian: PauliSum | None
    energy: float | None
    converged: bool
    sweeps: int
    # rows: (sweep, energy or None, summed EE over cuts, max cut EE, gates)
    per_sweep_trace: list = field(default_factory=list)


@lru_cache(maxsize=None)
def _unitary(index: int) -> np.ndarray:
    return enumerate_two_qubit_cliffords()[index].as_unitary()


def _spectrum_after(theta: np.ndarray, index: int) -> np.ndarray:
    dl, _, _, dr = theta.shape
    out = apply_gate_to_theta(theta, _unitary(index))
    return np.linalg.svd(out.reshape(dl * 2, 2 * dr), compute_uv=False)


def _score(svals: np.ndarray, max_bond, threshold) -> tuple[float, float]:
    """(discarded weight at the configured truncation, full-spectrum entropy)."""
    total = float((svals ** 2).sum())
    keep = _keep_count(svals, threshold, max_bond)
    disc = float((svals[keep:] ** 2).sum()) / total if total > 0 else 0.0
    return disc, entropy_from_schmidt(svals)


def select_clifford(theta: np.ndarray, mode: str,
                    candidates=None, max_bond: int | None = None,
                    threshold: float = 0.0, score_tol: float = 1e-12
                    ) -> tuple[TwoQubitClifford, float, float]:
    """Best two-qubit Clifford for the (normalized) two-site tensor theta.

    Scores: min_truncation_error ranks by (discarded weight, entropy);
    min_entropy by (entropy, discarded weight).  Ties within score_tol are
    broken identity-first, then lowest canonical index.  With the default
    full candidate set only one representative per (C1 x C1) left coset is
    scored: gates differing by single-qubit factors applied after the
    entangling part share every bipartition spectrum.
    """
    if mode not in SELECTION_MODES:
        raise ValueError(f"unknown selection mode {mode!r}")
    table = enumerate_two_qubit_cliffords()

    if candidates is None:
        coset_of, reps, _ = coset_data()
        scored = [(rep, _spectrum_after(theta, rep)) for rep in reps]
        id_index = identity_clifford().index
        id_group = int(coset_of[id_index])
    else:
        scored = [(c.index, _spectrum_after(theta, c.index))
                  for c in candidates]
        id_group = None

    pairs = [_score(s, max_bond, threshold) for _, s in scored]
    primary, secondary = (0, 1) if mode == "min_truncation_error" else (1, 0)

    tied = range(len(scored))
    for comp in (primary, secondary):
        best = min(pairs[k][comp] for k in tied)
        tied = [k for k in tied if pairs[k][comp] <= best + score_tol]

    if candidates is None:
        if id_group in [int(coset_of[scored[k][0]]) for k in tied]:
            winner = next(k for k in tied
                          if int(coset_of[scored[k][0]]) == id_group)
            chosen = table[id_index]
        else:
            winner = min(tied, key=lambda k: scored[k][0])
            chosen = table[scored[winner][0]]
    else:
        ids = [k for k in tied if table[scored[k][0]].is_identity]
        winner = ids[0] if ids else min(tied, key=lambda k: scored[k][0])
        chosen = table[scored[winner][0]]
    disc, ent = pairs[winner]
    return chosen, disc, ent


def _cut_entropies(state: MpsState, cut_set: CutSet) -> list[float]:
    probe = state.clone()
    return [probe.entropy_of_bipartition(cut) for cut in cut_set]


def camps_ground_state(h: PauliSum, cut_set: CutSet,
                       cfg: CampsConfig | None = None,
                       initial: MpsState | None = None) -> CampsResult:
    """Ground-state search with per-bond Clifford disentangling.

    Alternates DMRG local solves with Clifford selection; each accepted gate
    is applied to the state and the working Hamiltonian is conjugated so
    C H_eff C^dag (C|MPS>) = E (C|MPS>) holds throughout.
    """
    cfg = cfg or CampsConfig()
    if cfg.selection_mode != "min_truncation_error":
        raise ValueError("ground-state mode requires min_truncation_error")
    # Phase 1: plain DMRG to convergence.  Interleaving Clifford selection
    # from a cold start traps the variational search in product-state local
    # minima; disentangling the converged state keeps the energy pinned.
    warm = ground_state(h, cfg.dmrg, initial=initial)
    dcfg = replace(cfg.dmrg, noise_amplitude=0.0)
    sweeper = TwoSiteSweeper(h.terms, h.n_qubits, dcfg, state=warm.state)
    circuit = CliffordCircuit(h.n_qubits)
    energy = warm.energy
    entropies = _cut_entropies(sweeper.state, cut_set)
    ee_sum = sum(entropies)
    trace = [(0, energy, ee_sum, max(entropies), 0)]
    converged = False
    sweep = 0
    for sweep in range(1, cfg.max_camps_sweeps + 1):
        last_e, last_ee = energy, ee_sum
        gates_before = len(circuit.gates)
        for site, direction in sweeper.bond_sequence():
            energy, theta = sweeper.solve_bond(site)
            chosen, _, _ = select_clifford(
                theta, "min_truncation_error", cfg.candidates,
                max_bond=dcfg.max_bond, threshold=dcfg.truncation_threshold,
                score_tol=cfg.score_tol)
            if not chosen.is_identity:
                theta = apply_gate_to_theta(theta, _unitary(chosen.index))
                gate = Gate("C2", (site, site + 1), chosen)
                circuit.append(gate)
                sweeper.terms = conjugate_terms(sweeper.terms, gate)
                sweeper.refresh_mpo_pair(site)
            sweeper.place_theta(site, theta, direction)
        entropies = _cut_entropies(sweeper.state, cut_set)
        ee_sum = sum(entropies)
        trace.append((sweep, energy, ee_sum, max(entropies),
                      len(circuit.gates) - gates_before))
        if (abs(energy - last_e) < dcfg.energy_tol
                and abs(ee_sum - last_ee) < cfg.sweep_tol_entropy):
            converged = True
            break
    return CampsResult(sweeper.state, circuit,
                       PauliSum(h.n_qubits, sweeper.terms), energy,
                       converged, sweep, trace)


def camps_disentangle_state(s: MpsState, cut_set: CutSet,
                            cfg: CampsConfig | None = None) -> CampsResult:
    """Entanglement-minimizing Clifford sweeps over a fixed state."""
    cfg = cfg or CampsConfig(selection_mode="min_entropy")
    if cfg.selection_mode != "min_entropy":
        raise ValueError("state disentangling requires min_entropy")
    dcfg = cfg.dmrg
    state = s.clone()
    state.move_center(0)
    state.normalize()
    circuit = CliffordCircuit(state.n_sites)
    ee_sum = sum(_cut_entropies(state, cut_set))
    # identity is always an admissible circuit: track the best state seen so
    # the reported NsEE can never exceed the input's summed EE
    best = (ee_sum, state.clone(), 0)
    trace = []
    converged = False
    sweep = 0
    n = state.n_sites
    bonds = ([(i, "right") for i in range(n - 1)]
             + [(i, "left") for i in range(n - 2, -1, -1)])
    for sweep in range(1, cfg.max_camps_sweeps + 1):
        last_ee = ee_sum
        gates_before = len(circuit.gates)
        for site, direction in bonds:
            if state.center < site:
                state.move_center(site)
            elif state.center > site + 1:
                state.move_center(site + 1)
            theta = state._two_site_tensor(site)
            nrm = np.linalg.norm(theta)
            if nrm > 0:
                theta = theta / nrm
            chosen, _, _ = select_clifford(
                theta, "min_entropy", cfg.candidates,
                max_bond=dcfg.max_bond, threshold=dcfg.truncation_threshold,
                score_tol=cfg.score_tol)
            if not chosen.is_identity:
                theta = apply_gate_to_theta(theta, _unitary(chosen.index))
                circuit.append(Gate("C2", (site, site + 1), chosen))
            state._split_theta(theta, site, dcfg.max_bond,
                               dcfg.truncation_threshold,
                               center_to="right" if direction == "right"
                               else "left")
        entropies = _cut_entropies(state, cut_set)
        ee_sum = sum(entropies)
        trace.append((sweep, None, ee_sum, max(entropies),
                      len(circuit.gates) - gates_before))
        if ee_sum < best[0]:
            best = (ee_sum, state.clone(), len(circuit.gates))
        if abs(ee_sum - last_ee) < cfg.sweep_tol_entropy:
            converged = True
            break
    final_circuit = CliffordCircuit(state.n_sites, circuit.gates[:best[2]])
    return CampsResult(best[1], final_circuit, None, None, converged, sweep,
                       trace)


def nsee(s_or_result, cut_set: CutSet) -> float:
    """Summed cut entropy of a disentangled state (NsEE upper bound)."""
    state = s_or_result.state if isinstance(s_or_result, CampsResult) \
        else s_or_result
    return float(sum(_cut_entropies(state, cut_set)))
