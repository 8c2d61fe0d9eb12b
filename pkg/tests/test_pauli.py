import numpy as np
import pytest

from nsee.pauli import (PauliDimensionError, PauliString, PauliSum, commutes,
                        conjugate_by_gate, conjugate_sum, conjugate_terms,
                        multiply)

RNG = np.random.default_rng(11)

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j]).astype(complex)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0],
                 [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0],
                 [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def random_string(n, rng=RNG):
    return PauliString(n, int(rng.integers(1 << n)), int(rng.integers(1 << n)),
                       int(rng.integers(4)))


def random_hermitian_string(n, rng=RNG):
    p = random_string(n, rng)
    return p.with_phase(p.phase + 1) if not p.is_hermitian else p


class TestPauliString:
    def test_label_roundtrip(self):
        for label in ("+XIYZ", "-ZZ", "iY", "-iXY", "+I"):
            assert PauliString.from_label(label).label() == label.replace(
                "+i", "i")

    def test_from_ops_matches_label(self):
        a = PauliString.from_ops(4, {0: "X", 2: "Y", 3: "Z"})
        assert a.label() == "+XIYZ"
        b = PauliString.from_ops(2, {1: "Z"}, sign=-1)
        assert b.label() == "-IZ"

    def test_bad_labels(self):
        with pytest.raises(ValueError):
            PauliString.from_label("+AB")
        with pytest.raises(ValueError):
            PauliString.from_label("-")

    def test_y_convention(self):
        y = PauliString.from_label("+Y")
        x = PauliString.from_label("+X").to_matrix()
        z = PauliString.from_label("+Z").to_matrix()
        assert np.allclose(y.to_matrix(), 1j * x @ z)

    def test_multiply_against_dense(self):
        for _ in range(50):
            n = int(RNG.integers(1, 4))
            a, b = random_string(n), random_string(n)
            assert np.allclose((a * b).to_matrix(),
                               a.to_matrix() @ b.to_matrix())

    def test_multiply_size_mismatch(self):
        with pytest.raises(PauliDimensionError):
            multiply(random_string(2), random_string(3))

    def test_commutes_against_dense(self):
        for _ in range(50):
            n = int(RNG.integers(1, 4))
            a, b = random_string(n), random_string(n)
            ma, mb = a.to_matrix(), b.to_matrix()
            assert commutes(a, b) == np.allclose(ma @ mb, mb @ ma)

    def test_hermiticity_flag(self):
        assert PauliString.from_label("+XY").is_hermitian
        assert not PauliString.from_label("iX").is_hermitian
        for _ in range(20):
            p = random_string(3)
            m = p.to_matrix()
            assert p.is_hermitian == np.allclose(m, m.conj().T)

    def test_apply_to_statevector(self):
        for _ in range(20):
            n = int(RNG.integers(1, 5))
            p = random_string(n)
            v = RNG.normal(size=1 << n) + 1j * RNG.normal(size=1 << n)
            assert np.allclose(p.apply_to_statevector(v), p.to_matrix() @ v)

    def test_support_and_letters(self):
        p = PauliString.from_label("+XIYZ")
        assert p.support() == (0, 2, 3)
        assert [p.letter(j) for j in range(4)] == ["X", "I", "Y", "Z"]


def _embed(u, sites, n):
    """Dense N-qubit unitary acting as u on the given sites (qubit 0 is the
    leftmost kron factor), built by conjugating with adjacent swaps."""
    k = int(round(np.log2(u.shape[0])))
    full = u
    for _ in range(n - k):
        full = np.kron(full, np.eye(2))
    # full acts on qubits 0..k-1; permute into place
    order = list(sites) + [q for q in range(n) if q not in sites]
    perm = np.zeros((1 << n, 1 << n))
    for idx in range(1 << n):
        bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
        out = 0
        for pos, q in enumerate(order):
            out |= bits[q] << (n - 1 - pos)
        perm[idx, out] = 1
    return perm @ full @ perm.T


class TestConjugation:
    @pytest.mark.parametrize("gate,u,sites", [
        ("H", H, (0,)), ("H", H, (1,)), ("S", S, (1,)),
        ("CNOT", CNOT, (0, 1)), ("CNOT", CNOT, (1, 0)),
        ("CNOT", CNOT, (2, 0)),
    ])
    def test_gate_conjugation_dense(self, gate, u, sites):
        n = 3
        dense = _embed(u, sites, n)
        for _ in range(20):
            p = random_string(n)
            q = conjugate_by_gate(p, gate, sites)
            assert np.allclose(q.to_matrix(),
                               dense @ p.to_matrix() @ dense.conj().T)

    def test_unknown_gate(self):
        with pytest.raises(ValueError):
            conjugate_by_gate(random_string(2), "T", (0,))

    def test_site_errors(self):
        with pytest.raises(IndexError):
            conjugate_by_gate(random_string(2), "CNOT", (0,))
        with pytest.raises(IndexError):
            conjugate_by_gate(random_string(2), "H", (5,))


class TestPauliSum:
    def test_merges_duplicates_and_signs(self):
        x = PauliString.from_label("+XI")
        mx = PauliString.from_label("-XI")
        h = PauliSum(2, [(1.0, x), (0.25, mx), (2.0, x)])
        assert len(h) == 1
        coeff, s = h.terms[0]
        assert coeff == pytest.approx(2.75)
        assert s.sign == 1

    def test_drops_near_zero(self):
        x = PauliString.from_label("+X")
        assert len(PauliSum(1, [(1.0, x), (-1.0, x)])) == 0

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            PauliSum(1, [(1.0, PauliString.from_label("iX"))])

    def test_rejects_size_mismatch(self):
        with pytest.raises(PauliDimensionError):
            PauliSum(2, [(1.0, PauliString.from_label("+X"))])

    def test_to_matrix_hermitian(self):
        terms = [(float(RNG.normal()), random_hermitian_string(3))
                 for _ in range(6)]
        m = PauliSum(3, terms).to_matrix()
        assert np.allclose(m, m.conj().T)

    def test_serialize_roundtrip(self):
        terms = [(0.5, PauliString.from_label("+XZ")),
                 (-1.25, PauliString.from_label("+YY"))]
        h = PauliSum(2, terms)
        h2 = PauliSum.deserialize(h.serialize())
        assert np.allclose(h.to_matrix(), h2.to_matrix())

    def test_addition(self):
        x = PauliString.from_label("+X")
        z = PauliString.from_label("+Z")
        total = PauliSum(1, [(1.0, x)]) + PauliSum(1, [(2.0, z)])
        assert np.allclose(total.to_matrix(),
                           x.to_matrix() + 2 * z.to_matrix())


class TestConjugateSum:
    def test_against_dense(self):
        from nsee.clifford import CliffordCircuit, Gate
        n = 3
        circ = CliffordCircuit(n, [Gate("H", (0,)), Gate("CNOT", (0, 1)),
                                   Gate("S", (2,)), Gate("CNOT", (2, 1))])
        u = np.eye(1 << n, dtype=complex)
        for g in circ.gates:
            u = _embed(g.unitary(), g.sites, n) @ u
        terms = [(float(RNG.normal()), random_hermitian_string(n))
                 for _ in range(8)]
        h = PauliSum(n, terms)
        hc = conjugate_sum(h, circ)
        assert len(hc) == len(h)
        assert np.allclose(hc.to_matrix(), u @ h.to_matrix() @ u.conj().T)

    def test_terms_preserve_order_and_accept_single_gate(self):
        from nsee.clifford import Gate
        terms = [(1.0, PauliString.from_label("+XI")),
                 (2.0, PauliString.from_label("+IZ"))]
        out = conjugate_terms(terms, Gate("H", (0,)))
        assert out[0][1].label() == "+ZI"
        assert out[1][1].label() == "+IZ"
