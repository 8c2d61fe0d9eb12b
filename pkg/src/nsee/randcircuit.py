"""Random Clifford+T transition experiment.

Each round applies a fixed number of random brickwork two-qubit Clifford
layers followed by a few T gates on distinct random qubits, truncating the
MPS at a finite threshold throughout.  After every round the state is
disentangled with entanglement-minimizing Clifford sweeps and the remaining
summed cut entropy (NsEE), the overlap with the pre-disentangling snapshot,
the second-order SRE density, and the middle-cut Schmidt spectrum are
recorded, averaged over independent runs.

While the cumulative T-count stays below the qubit number the state remains
(close to) a stabilizer state: NsEE vanishes and the disentangling circuit
reproduces the snapshot almost exactly.  Once the T-count exceeds the qubit
number the magic can no longer be removed by Clifford circuits and NsEE
rises sharply.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .camps import CampsConfig, camps_disentangle_state, nsee
from .dmrg import DmrgConfig
from .magic import SRE_CAP, sre_exact, sre_random_ct_average
from .models import LatticeSpec, cut_set
from .mps import MpsState
from .clifford import random_clifford_layer

T_GATE = np.diag([1.0, np.exp(1j * math.pi / 4)]).astype(complex)

# Largest qubit count at which the exact SRE (cost ~ N 4^N) stays affordable.
SRE_BUDGET = 14


def _default_camps(threshold: float) -> CampsConfig:
    return CampsConfig(
        dmrg=DmrgConfig(max_bond=4096,
                        truncation_threshold=max(threshold, 1e-12)),
        selection_mode="min_entropy")


@dataclass
class CtExperimentConfig:
    n_qubits: int = 14
    rounds_max: int = 12
    layers_per_round: int = 20
    t_gates_per_round: int = 2
    truncation_threshold: float = 5e-3
    runs_to_average: int = 10
    rng_seed: int = 0
    camps: CampsConfig | None = None
    sre_budget: int = SRE_BUDGET

    def __post_init__(self):
        if min(self.n_qubits, self.rounds_max, self.layers_per_round,
               self.runs_to_average) < 1:
            raise ValueError("config integers must be positive")
        if not 0 <= self.t_gates_per_round <= self.n_qubits:
            raise ValueError("T gates per round must fit on distinct qubits")
        if self.truncation_threshold < 0:
            raise ValueError("truncation threshold must be nonnegative")
        if self.camps is None:
            self.camps = _default_camps(self.truncation_threshold)


@dataclass
class RoundRecord:
    round: int
    nsee: float                 # mean over runs
    overlap_f: float            # mean over runs
    m2_density: float           # mean over runs; nan when over budget
    spectrum: np.ndarray        # middle-cut Schmidt values (first run)
    nsee_stderr: float = 0.0
    overlap_stderr: float = 0.0
    m2_stderr: float = 0.0
    m2_formula: float = 0.0     # exact ensemble average, same round


def build_round(state: MpsState, cfg: CtExperimentConfig,
                rng: np.random.Generator) -> MpsState:
    """One circuit round, in place: brickwork Clifford layers then T gates
    on distinct random qubits, truncating at the configured threshold."""
    n = state.n_sites
    for layer in range(cfg.layers_per_round):
        circ = random_clifford_layer(n, rng, offset=layer % 2)
        for g in circ.gates:
            state.apply_two_site_gate(g.unitary(), g.sites[0],
                                      threshold=cfg.truncation_threshold)
    if cfg.t_gates_per_round:
        targets = rng.choice(n, size=cfg.t_gates_per_round, replace=False)
        for q in sorted(int(q) for q in targets):
            state.apply_single_site_gate(T_GATE, q)
    return state


def _replay_circuit(snapshot: MpsState, circuit) -> MpsState:
    """Apply the disentangling circuit to a copy of the snapshot with a tight
    threshold; gates were chosen to shrink bonds, so this stays cheap."""
    out = snapshot.clone()
    for g in circuit.gates:
        out.apply_two_site_gate(g.unitary(), g.sites[0], threshold=1e-14)
    return out


def _middle_spectrum(state: MpsState) -> np.ndarray:
    return state.clone().schmidt_values(state.n_sites // 2)


def run_transition_experiment(cfg: CtExperimentConfig) -> list[RoundRecord]:
    """Per-round NsEE / overlap / SRE density averaged over independent runs.

    Round 0 is the untouched |0...0> state.  The overlap compares the
    disentangling circuit applied to the pre-disentangling snapshot against
    the disentangled state, so it measures the fidelity lost to truncation
    during the sweeps; with no gates accepted it is exactly 1.
    """
    n = cfg.n_qubits
    cuts = cut_set(LatticeSpec(1, n))
    seeds = np.random.SeedSequence(cfg.rng_seed).spawn(cfg.runs_to_average)
    n_rounds = cfg.rounds_max + 1
    nsees = np.zeros((cfg.runs_to_average, n_rounds))
    overlaps = np.zeros_like(nsees)
    m2s = np.full_like(nsees, np.nan)
    spectra: list[np.ndarray] = []

    for run, seed in enumerate(seeds):
        rng = np.random.default_rng(seed)
        state = MpsState.product_state([0] * n)
        for r in range(n_rounds):
            if r > 0:
                build_round(state, cfg, rng)
            snapshot = state.clone()
            if run == 0:
                spectra.append(_middle_spectrum(snapshot))
            dis = camps_disentangle_state(snapshot, cuts, cfg.camps)
            nsees[run, r] = nsee(dis, cuts)
            overlaps[run, r] = _replay_circuit(snapshot,
                                               dis.circuit).overlap(dis.state)
            if n <= cfg.sre_budget:
                # SRE is Clifford invariant, so the low-entanglement
                # disentangled frame gives the snapshot's value
                frame = dis.state if n > SRE_CAP else snapshot
                res = sre_exact(frame, 2, cap=cfg.sre_budget, single=n > SRE_CAP)
                m2s[run, r] = res.density

    def stderr(a: np.ndarray) -> np.ndarray:
        if a.shape[0] < 2:
            return np.zeros(a.shape[1])
        return np.std(a, axis=0, ddof=1) / math.sqrt(a.shape[0])

    records = []
    for r in range(n_rounds):
        records.append(RoundRecord(
            round=r,
            nsee=float(nsees[:, r].mean()),
            overlap_f=float(overlaps[:, r].mean()),
            m2_density=float(np.nanmean(m2s[:, r]))
            if not np.isnan(m2s[:, r]).all() else float("nan"),
            spectrum=spectra[r],
            nsee_stderr=float(stderr(nsees)[r]),
            overlap_stderr=float(stderr(overlaps)[r]),
            m2_stderr=float(stderr(m2s)[r])
            if not np.isnan(m2s[:, r]).any() else float("nan"),
            m2_formula=sre_random_ct_average(n, r) / n,
        ))
    return records
