import math

import numpy as np
import pytest

from nsee.mps import (Bipartition, CapacityError, CutSet, MpsState,
                      entropy_from_schmidt)

RNG = np.random.default_rng(47)
LN2 = math.log(2)


def random_vec(n, rng=RNG):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def dense_entropy(vec, side_a, n):
    """Bipartition entropy by explicit index regrouping (oracle)."""
    side_a = sorted(side_a)
    side_b = [q for q in range(n) if q not in side_a]
    t = vec.reshape([2] * n)
    t = np.transpose(t, side_a + side_b)
    m = t.reshape(1 << len(side_a), -1)
    s = np.linalg.svd(m, compute_uv=False)
    p = s ** 2
    p = p[p > 1e-15]
    return float(-(p * np.log(p)).sum())


class TestBipartition:
    def test_validation(self):
        with pytest.raises(ValueError):
            Bipartition(3, frozenset())
        with pytest.raises(ValueError):
            Bipartition(3, frozenset({0, 1, 2}))
        with pytest.raises(ValueError):
            Bipartition(3, frozenset({5}))

    def test_prefix_bond(self):
        assert Bipartition.prefix(5, 2).prefix_bond() == 2
        assert Bipartition(5, frozenset({2, 3, 4})).prefix_bond() == 2
        assert Bipartition(5, frozenset({0, 2})).prefix_bond() is None

    def test_cut_set_rejects_duplicates(self):
        c = Bipartition.prefix(4, 2)
        with pytest.raises(ValueError):
            CutSet((c, c))
        with pytest.raises(ValueError):
            CutSet(())


class TestConstruction:
    def test_product_state(self):
        s = MpsState.product_state([0, 1, 1])
        v = s.to_statevector()
        expect = np.zeros(8)
        expect[0b011] = 1
        assert np.allclose(v, expect)

    def test_statevector_roundtrip(self):
        for n in (2, 4, 6):
            vec = random_vec(n)
            s = MpsState.from_statevector(vec)
            out = s.to_statevector()
            assert abs(abs(np.vdot(vec, out)) - 1) < 1e-12

    def test_bad_tensors(self):
        with pytest.raises(ValueError):
            MpsState([np.zeros((1, 3, 1))])
        with pytest.raises(ValueError):
            MpsState([np.zeros((2, 2, 1))])

    def test_capacity(self):
        s = MpsState.product_state([0] * 6)
        with pytest.raises(CapacityError):
            s.to_statevector(cap=5)


class TestGauge:
    def test_move_center_preserves_state(self):
        vec = random_vec(5)
        s = MpsState.from_statevector(vec)
        for target in (0, 4, 2):
            s.move_center(target)
            assert s.center == target
            assert abs(abs(np.vdot(vec, s.to_statevector())) - 1) < 1e-12

    def test_norm_and_normalize(self):
        s = MpsState.from_statevector(random_vec(4))
        s.tensors[s.center] *= 3.0
        assert s.norm() == pytest.approx(3.0)
        s.normalize()
        assert s.norm() == pytest.approx(1.0)


class TestGates:
    def test_single_site_gate_dense(self):
        from tests.test_pauli import _embed
        h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        vec = random_vec(4)
        s = MpsState.from_statevector(vec)
        s.apply_single_site_gate(h, 2)
        ref = _embed(h, (2,), 4) @ vec
        assert abs(abs(np.vdot(ref, s.to_statevector())) - 1) < 1e-12

    def test_two_site_gate_dense(self):
        from tests.test_pauli import _embed
        rng = np.random.default_rng(3)
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        u, _ = np.linalg.qr(m)
        vec = random_vec(5)
        s = MpsState.from_statevector(vec)
        s.apply_two_site_gate(u, 2)
        ref = _embed(u, (2, 3), 5) @ vec
        assert abs(abs(np.vdot(ref, s.to_statevector())) - 1) < 1e-12

    def test_rejects_non_unitary(self):
        s = MpsState.product_state([0, 0])
        with pytest.raises(ValueError):
            s.apply_two_site_gate(np.ones((4, 4)), 0)

    def test_truncation_discards_weight(self):
        vec = random_vec(6)
        s = MpsState.from_statevector(vec)
        disc = s.apply_two_site_gate(np.eye(4), 2, max_bond=2)
        full = MpsState.from_statevector(vec)
        svals = full.schmidt_values(3)
        assert disc == pytest.approx(float((svals[2:] ** 2).sum()), abs=1e-10)


class TestEntropies:
    def test_schmidt_values_normalized_descending(self):
        s = MpsState.from_statevector(random_vec(6))
        svals = s.schmidt_values(3)
        assert np.linalg.norm(svals) == pytest.approx(1.0)
        assert (np.diff(svals) <= 1e-14).all()
        with pytest.raises(ValueError):
            s.schmidt_values(0)

    def test_entropy_from_schmidt_edge_cases(self):
        assert entropy_from_schmidt(np.array([1.0])) == 0.0
        assert entropy_from_schmidt(np.zeros(3)) == 0.0
        assert entropy_from_schmidt(np.array([1.0, 1.0]) / np.sqrt(2)) == \
            pytest.approx(LN2)

    def test_contiguous_cut_equals_bond_entropy(self):
        s = MpsState.from_statevector(random_vec(6))
        for k in (1, 3, 5):
            cut = Bipartition.prefix(6, k)
            assert s.entropy_of_bipartition(cut) == pytest.approx(
                s.entanglement_entropy_at(k))

    def test_noncontiguous_cut_dense_oracle(self):
        n = 6
        for _ in range(10):
            vec = random_vec(n)
            s = MpsState.from_statevector(vec)
            size = int(RNG.integers(1, n))
            side = frozenset(int(q) for q in
                             RNG.choice(n, size=size, replace=False))
            cut = Bipartition(n, side)
            assert s.entropy_of_bipartition(cut) == pytest.approx(
                dense_entropy(vec, side, n), abs=1e-8)

    def test_entropy_probe_does_not_mutate(self):
        s = MpsState.from_statevector(random_vec(5))
        before = s.to_statevector()
        s.entropy_of_bipartition(Bipartition(5, frozenset({0, 2, 4})))
        assert np.allclose(before, s.to_statevector())

    def test_four_qubit_interleaved_cut(self):
        vec = random_vec(4)
        s = MpsState.from_statevector(vec)
        cut = Bipartition(4, frozenset({0, 2}))
        assert s.entropy_of_bipartition(cut) == pytest.approx(
            dense_entropy(vec, {0, 2}, 4), abs=1e-8)


class TestExpectations:
    def test_pauli_expectation_dense(self):
        from nsee.pauli import PauliString
        n = 5
        vec = random_vec(n)
        s = MpsState.from_statevector(vec)
        for _ in range(20):
            p = PauliString(n, int(RNG.integers(1 << n)),
                            int(RNG.integers(1 << n)))
            p = p.with_phase(p.n_y)
            expect = np.vdot(vec, p.to_matrix() @ vec)
            assert s.expectation_pauli_string(p) == pytest.approx(
                expect, abs=1e-10)

    def test_overlap(self):
        a, b = random_vec(4), random_vec(4)
        sa = MpsState.from_statevector(a)
        sb = MpsState.from_statevector(b)
        assert sa.overlap(sb) == pytest.approx(abs(np.vdot(a, b)), abs=1e-10)
        assert sa.overlap(sa) == pytest.approx(1.0)
