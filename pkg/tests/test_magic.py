import itertools
import math

import numpy as np
import pytest

from nsee.magic import (SRE_CAP, SreResult, pauli_moment_sum, sre_exact,
                        sre_random_ct_average, sre_tstate)
from nsee.mps import CapacityError, MpsState
from nsee.pauli import PauliString

RNG = np.random.default_rng(67)

T_PLUS = np.array([1.0, np.exp(1j * math.pi / 4)]) / math.sqrt(2)


def random_vec(n, rng=RNG):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def brute_force_moment(vec, order):
    """Oracle: loop over all 4^N Paulis with dense matrices."""
    n = int(round(math.log2(vec.size)))
    total = 0.0
    for letters in itertools.product("IXYZ", repeat=n):
        p = PauliString.from_ops(n, dict(enumerate(letters)))
        total += np.vdot(vec, p.to_matrix() @ vec).real ** (2 * order)
    return total


def kron_power(v, n):
    out = v
    for _ in range(n - 1):
        out = np.kron(out, v)
    return out


class TestMomentSum:
    def test_against_brute_force(self):
        for n in (1, 2, 3, 4):
            vec = random_vec(n)
            assert pauli_moment_sum(vec, 2) == pytest.approx(
                brute_force_moment(vec, 2), rel=1e-10)

    def test_order_three(self):
        vec = random_vec(3)
        assert pauli_moment_sum(vec, 3) == pytest.approx(
            brute_force_moment(vec, 3), rel=1e-10)

    def test_single_precision_close(self):
        vec = random_vec(8)
        exact = pauli_moment_sum(vec, 2)
        fast = pauli_moment_sum(vec, 2, single=True)
        assert fast == pytest.approx(exact, rel=1e-4)


class TestSreExact:
    def test_stabilizer_states_zero(self):
        from nsee.stabilizer import (apply_circuit, new_zero_state,
                                     to_statevector)
        from tests.test_stabilizer import random_clifford_circuit
        for _ in range(10):
            n = int(RNG.integers(2, 7))
            circ = random_clifford_circuit(n, 10, RNG)
            v = to_statevector(apply_circuit(new_zero_state(n), circ))
            assert abs(sre_exact(v).value) < 1e-10

    def test_tstate_closed_form(self):
        for n in (1, 2, 4, 6):
            vec = kron_power(T_PLUS, n)
            assert sre_exact(vec).value == pytest.approx(sre_tstate(n),
                                                         abs=1e-10)

    def test_accepts_mps(self):
        vec = random_vec(5)
        s = MpsState.from_statevector(vec)
        assert sre_exact(s).value == pytest.approx(sre_exact(vec).value,
                                                   abs=1e-9)

    def test_clifford_invariance(self):
        from nsee.clifford import enumerate_two_qubit_cliffords
        from tests.test_pauli import _embed
        table = enumerate_two_qubit_cliffords()
        for _ in range(10):
            n = int(RNG.integers(2, 6))
            vec = random_vec(n)
            c = table[int(RNG.integers(len(table)))]
            a, b = RNG.choice(n, size=2, replace=False)
            u = _embed(c.as_unitary(), (int(a), int(b)), n)
            assert sre_exact(u @ vec).value == pytest.approx(
                sre_exact(vec).value, abs=1e-10)

    def test_elementary_gate_invariance(self):
        from nsee.clifford import Gate
        from tests.test_pauli import _embed
        n = 4
        vec = random_vec(n)
        base = sre_exact(vec).value
        for gate, sites in (("H", (1,)), ("S", (3,)), ("CNOT", (0, 2))):
            u = _embed(Gate(gate, sites).unitary(), sites, n)
            assert sre_exact(u @ vec).value == pytest.approx(base, abs=1e-10)

    def test_additivity(self):
        a, b = random_vec(3), random_vec(3)
        joint = sre_exact(np.kron(a, b)).value
        assert joint == pytest.approx(sre_exact(a).value + sre_exact(b).value,
                                      abs=1e-9)

    def test_nonnegative_random_states(self):
        for _ in range(100):
            n = int(RNG.integers(1, 6))
            assert sre_exact(random_vec(n)).value >= -1e-10

    def test_density(self):
        r = SreResult(2, 4, 2.0)
        assert r.density == pytest.approx(0.5)

    def test_validation(self):
        with pytest.raises(ValueError):
            sre_exact(random_vec(2), n=1)
        with pytest.raises(ValueError):
            sre_exact(np.ones(3))
        with pytest.raises(CapacityError):
            sre_exact(np.ones(1 << 11) / math.sqrt(1 << 11), cap=SRE_CAP)
        with pytest.raises(CapacityError):
            sre_exact(MpsState.product_state([0] * 12))


class TestTstate:
    def test_values(self):
        assert sre_tstate(0) == 0.0
        assert sre_tstate(1) == pytest.approx(math.log(4 / 3))
        assert sre_tstate(4) == pytest.approx(4 * math.log(4 / 3))
        with pytest.raises(ValueError):
            sre_tstate(-1)


class TestEnsembleAverage:
    def test_zero_rounds(self):
        for n in (2, 6, 14):
            assert sre_random_ct_average(n, 0) == 0.0

    def test_saturation_plateau(self):
        n = 6
        plateau = -math.log(4 / (3 + 2.0 ** n))
        assert sre_random_ct_average(n, 500) == pytest.approx(plateau,
                                                              abs=1e-12)

    def test_monotone_increasing(self):
        vals = [sre_random_ct_average(8, r) for r in range(12)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_validation(self):
        with pytest.raises(ValueError):
            sre_random_ct_average(4, -1)
