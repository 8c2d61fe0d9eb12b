"""Non-stabilizerness entanglement entropy via Clifford-augmented MPS."""

__version__ = "0.1.0"

from .camps import (CampsConfig, CampsResult, camps_disentangle_state,
                    camps_ground_state, nsee, select_clifford)
from .clifford import (CliffordCircuit, Gate, TwoQubitClifford,
                       enumerate_two_qubit_cliffords, random_clifford_layer)
from .dmrg import DmrgConfig, DmrgResult, ground_state
from .magic import SreResult, sre_exact, sre_random_ct_average, sre_tstate
from .models import (LatticeSpec, cut_set, snake_order, toric_code,
                     transverse_ising, xxz)
from .mps import Bipartition, CapacityError, CutSet, MpsState
from .pauli import PauliString, PauliSum
from .randcircuit import (CtExperimentConfig, RoundRecord, build_round,
                          run_transition_experiment)
from .stabilizer import Tableau

__all__ = [
    "Bipartition", "CampsConfig", "CampsResult", "CapacityError",
    "CliffordCircuit", "CtExperimentConfig", "CutSet", "DmrgConfig",
    "DmrgResult", "Gate", "LatticeSpec", "MpsState", "PauliString",
    "PauliSum", "RoundRecord", "SreResult", "Tableau", "TwoQubitClifford",
    "build_round", "camps_disentangle_state", "camps_ground_state",
    "cut_set", "enumerate_two_qubit_cliffords", "ground_state", "nsee",
    "random_clifford_layer", "run_transition_experiment", "select_clifford",
    "snake_order", "sre_exact", "sre_random_ct_average", "sre_tstate",
    "toric_code", "transverse_ising", "xxz",
]
