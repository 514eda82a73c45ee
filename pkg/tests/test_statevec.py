import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bmsakit import clifford, simkit, statevec as sv
from bmsakit.pauli import PauliString, all_paulis

from conftest import dense_pauli

PLUS = np.array([1, 1]) / math.sqrt(2)


def test_expectation_examples():
    assert sv.expectation(sv.basis_state(1), PauliString.from_label("Z")) == pytest.approx(1)
    assert sv.expectation(PLUS, PauliString.from_label("Z")) == pytest.approx(0, abs=1e-15)
    chi = simkit.chi_state()
    for p in "XYZ":
        assert abs(sv.expectation(chi, PauliString.from_label(p))) == pytest.approx(1 / math.sqrt(3), abs=1e-14)
    with pytest.raises(ValueError):
        sv.expectation(PLUS, PauliString.from_label("iX"))


def test_expectation_matches_dense(rng):
    psi = sv.random_state(3, rng)
    for p in all_paulis(3):
        m = p.to_matrix()
        assert sv.expectation(psi, p) == pytest.approx(np.vdot(psi, m @ psi).real, abs=1e-12)


def test_pauli_spectrum_examples(rng):
    # index order I, X, Z, Y for one qubit
    assert np.allclose(sv.pauli_spectrum(sv.basis_state(1)), [1, 0, 1, 0])
    b = sv.pauli_spectrum(np.kron(PLUS, PLUS))
    nz = {i for i in range(16) if abs(b[i]) > 1e-12}
    assert nz == {x for x in range(4)} and np.allclose(b[list(nz)], 1)
    psi = sv.random_state(2, rng)
    b = sv.pauli_spectrum(psi)
    assert np.sum(b**2) == pytest.approx(4, abs=1e-10)
    assert b[0] == pytest.approx(1)
    assert np.all(np.abs(b) <= 1 + 1e-12)


def test_pauli_spectrum_cap():
    with pytest.raises(sv.CapabilityError):
        sv.pauli_spectrum(sv.basis_state(3), cap=2)


def test_spectrum_is_signed_permutation_under_clifford(rng):
    for n in (1, 2, 3):
        psi = sv.random_state(n, rng)
        t = clifford.random_clifford(n, rng)
        b = sv.pauli_spectrum(psi)
        bc = sv.pauli_spectrum(clifford.apply_to_state(t, psi))
        assert np.allclose(np.sort(np.abs(b)), np.sort(np.abs(bc)), atol=1e-12)
        for idx in range(4**n):
            p = PauliString.from_index(idx, n)
            img = t.conjugate(p)
            sign = 1 if img.phase == 0 else -1
            assert bc[img.index] == pytest.approx(sign * b[idx], abs=1e-12)


def test_participation_entropy():
    for n in (1, 3, 5):
        plus = np.ones(2**n) / math.sqrt(2**n)
        for a in (0, 0.5, 1, 2, math.inf):
            assert sv.participation_entropy(plus, a) == pytest.approx(n * math.log(2))
            assert sv.participation_entropy(sv.basis_state(n), a) == pytest.approx(0, abs=1e-15)
    for n in range(2, 7):
        assert sv.participation_entropy(simkit.w_state(n), 1) == pytest.approx(math.log(n))


def test_renyi_batch_matches_scalar(rng):
    p = rng.random((4, 8))
    p /= p.sum(axis=1, keepdims=True)
    for a in (0, 0.5, 1, 2, 3, math.inf):
        ref = [sv.renyi_entropy(row, a) for row in p]
        assert np.allclose(sv.renyi_entropy_batch(p, a), ref)


def test_measure_qubit():
    out = sv.measure_qubit(PLUS, 0)
    assert [p for p, _ in out] == pytest.approx([0.5, 0.5])
    assert np.allclose(out[0][1], [1, 0]) and np.allclose(out[1][1], [0, 1])
    out = sv.measure_qubit(sv.basis_state(1), 0)
    assert len(out) == 1 and out[0][0] == pytest.approx(1)


def test_measure_qubit_psi_eps():
    eps, n = 0.1, 4
    psi = simkit.psi_eps(n, eps)
    p1 = dict(enumerate(p for p, _ in sv.measure_qubit(psi, 0)))[1]
    beta = simkit.CHI_BETA
    exact = eps**2 * math.sin(beta) ** 2 / simkit.psi_eps_norm(n, eps)
    assert p1 == pytest.approx(exact, rel=1e-10)
    # leading-order estimate eps^2 sin^2(beta) / (1 + eps^2) ignores the O(eps) cross term
    assert p1 == pytest.approx(eps**2 * math.sin(beta) ** 2 / (1 + eps**2), rel=0.2)


def test_pauli_rotation(rng):
    psi = sv.random_state(2, rng)
    p = PauliString.from_label("XZ")
    assert np.allclose(sv.apply_pauli_rotation(psi, p, 0.0), psi)
    assert sv.fidelity(sv.apply_pauli_rotation(psi, p, math.pi / 2), 1j * (p.to_matrix() @ psi)) == pytest.approx(1)
    out = sv.apply_pauli_rotation(PLUS, PauliString.from_label("Z"), math.pi / 8)
    assert sv.participation_entropy(out, 1) == pytest.approx(math.log(2))
    theta = 0.37
    dense = (math.cos(theta) * np.eye(4) + 1j * math.sin(theta) * p.to_matrix()) @ psi
    assert np.allclose(sv.apply_pauli_rotation(psi, p, theta), dense)


def test_gates_tensor_inner(rng):
    h = clifford.GATE_MATRICES["H"]
    assert np.allclose(sv.apply_gate(sv.basis_state(1), h, [0]), PLUS)
    ket = sv.tensor([1, 0], [0, 1])
    assert np.allclose(ket, sv.basis_state(2, 0b10))
    psi = sv.random_state(3, rng)
    assert sv.inner(psi, psi) == pytest.approx(1)
    u = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    full = np.kron(np.eye(2), u)  # acts on qubits 0, 1 of three
    assert np.allclose(sv.apply_gate(psi, u, [0, 1]), full @ psi)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1), st.floats(-3, 3))
def test_operations_preserve_norm(n, seed, theta):
    rng = np.random.default_rng(seed)
    psi = sv.random_state(n, rng)
    p = PauliString(n, int(rng.integers(2**n)), int(rng.integers(2**n)))
    out = sv.apply_pauli_rotation(psi, p, theta)
    assert np.linalg.norm(out) == pytest.approx(1, abs=1e-10)
    out = sv.apply_gate(out, clifford.GATE_MATRICES["H"], [int(rng.integers(n))])
    assert np.linalg.norm(out) == pytest.approx(1, abs=1e-10)
    for prob, post in sv.measure_qubit(out, 0):
        assert np.linalg.norm(post) == pytest.approx(1, abs=1e-10)


def test_second_moment_inequality_commuting(rng):
    n = 3
    count = 0
    while count < 1000:
        psi = sv.random_state(n, rng)
        p = PauliString(n, int(rng.integers(8)), int(rng.integers(8)))
        q = PauliString(n, int(rng.integers(8)), int(rng.integers(8)))
        if p.commutes(q) or q.x == q.z == 0:  # stated for commuting P, Q
            continue
        lhs = sum(prob * sv.expectation(post, p) ** 2 for prob, post in sv.measure_pauli(psi, q))
        assert lhs >= sv.expectation(psi, p) ** 2 - 1e-10
        count += 1


def test_state_io_roundtrip(tmp_path, rng):
    psi = sv.random_state(3, rng)
    for name in ("s.json", "s.bin"):
        sv.save_state(psi, tmp_path / name)
        assert np.allclose(sv.load_state(tmp_path / name), psi)


def test_as_state_validation():
    with pytest.raises(ValueError):
        sv.as_state([1, 0, 0])
    with pytest.raises(ValueError):
        sv.as_state([1, 1])
    assert np.allclose(sv.as_state([1, 1], normalize=True), PLUS)


def test_dense_pauli_helper_consistency():
    assert np.allclose(dense_pauli("ZI"), np.kron(np.eye(2), np.diag([1, -1])))
