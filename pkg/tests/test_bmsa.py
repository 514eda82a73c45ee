import itertools
import json
import math

import numpy as np
import pytest

from bmsakit import bmsa, clifford, measures, simkit, statevec as sv
from bmsakit.bmsa import StabBasisKey
from bmsakit.f2linalg import q_binomial

P_CHI = (1 + 1 / math.sqrt(3)) / 2
H_CHI = -P_CHI * math.log(P_CHI) - (1 - P_CHI) * math.log(1 - P_CHI)


def test_key_validation_and_json():
    with pytest.raises(ValueError):
        StabBasisKey(2, 1, (0b11,), (), (0, 0))
    with pytest.raises(ValueError):
        StabBasisKey.from_matrices(np.array([[0], [1], [1]]) * 0)
    for key in list(bmsa.iter_bases(2))[::7]:
        again = StabBasisKey.from_json(json.loads(json.dumps(key.to_json())), n=2)
        assert again == key


def test_bases_are_orthonormal():
    for n in (1, 2):
        for key in bmsa.iter_bases(n):
            b = key.basis_states()
            assert np.allclose(b.conj().T @ b, np.eye(2**n), atol=1e-12)


def test_basis_counts():
    for n in (1, 2, 3):
        keys = list(bmsa.iter_bases(n))
        total = 2**n * math.prod(2**k + 1 for k in range(1, n + 1))
        assert len(keys) * 2**n == total
        for k in range(n + 1):
            cnt = sum(key.k == k for key in keys)
            assert cnt == 2 ** (k * (k - 1) // 2) * 2**k * q_binomial(n, k)


def test_distribution_examples(rng):
    psi = sv.random_state(3, rng)
    d = bmsa.distribution_for_basis(psi, StabBasisKey.computational(3))
    assert np.allclose(d.probs, np.abs(psi) ** 2)
    h = StabBasisKey.from_matrices(np.eye(3, dtype=np.uint8))
    assert np.allclose(bmsa.distribution_for_basis(sv.basis_state(3), h).probs, 1 / 8)
    keys = list(bmsa.iter_bases(3))
    for i in rng.choice(len(keys), 20, replace=False):
        key = keys[int(i)]
        probs = bmsa.distribution_for_basis(psi, key).probs
        oracle = np.abs(key.basis_states().conj().T @ psi) ** 2
        assert np.allclose(probs, oracle, atol=1e-10)
        assert probs.sum() == pytest.approx(1, abs=1e-9)


def test_bruteforce_examples(rng):
    for a in (0.5, 1, 2, math.inf):
        stab = simkit.random_stabilizer_state(3, rng)
        res = bmsa.bmsa_bruteforce(stab, a)
        assert res.value == pytest.approx(0, abs=1e-10)
        assert sv.renyi_entropy(bmsa.distribution_for_basis(stab, res.key).probs, a) == pytest.approx(0, abs=1e-10)
        assert bmsa.bmsa_bruteforce(simkit.w_state(2), a).value == pytest.approx(0, abs=1e-10)
    chi = simkit.chi_state()
    assert bmsa.bmsa_bruteforce(chi, 1).value == pytest.approx(H_CHI, abs=1e-12)
    assert bmsa.bmsa_bruteforce(chi, 1, backend="pauli").value == pytest.approx(H_CHI, abs=1e-12)
    for key in bmsa.iter_bases(1):
        if key.c_index == 0 and key.q_index == 0:
            assert sv.renyi_entropy(bmsa.distribution_for_basis(chi, key).probs, 1) == pytest.approx(H_CHI)


def test_backends_agree(rng):
    for n in (2, 3):
        for _ in range(4):
            psi = sv.random_state(n, rng)
            for a in (0.5, 1, 2, math.inf):
                ref = bmsa.bmsa_bruteforce(psi, a).value
                assert bmsa.bmsa_bruteforce(psi, a, backend="pauli").value == pytest.approx(ref, abs=1e-9)
                if a != 0.5:
                    assert bmsa.bmsa_branch_bound(psi, a).value == pytest.approx(ref, abs=1e-9)


def test_argmin_key_reproduces_value(rng):
    psi = sv.random_state(3, rng)
    for res in (bmsa.bmsa_bruteforce(psi, 2), bmsa.bmsa_branch_bound(psi, 2),
                bmsa.bmsa_bruteforce(psi, 2, backend="pauli")):
        d = bmsa.distribution_for_basis(psi, res.key).probs
        assert sv.renyi_entropy(d, 2) == pytest.approx(res.value, abs=1e-10)


def test_bound_for_R(rng):
    psi = sv.random_state(3, rng)
    keys = [k for k in bmsa.iter_bases(3) if k.q_index == 0 and k.c_index == 0]
    assert len(keys) == 16
    for key in keys:
        exact = min(
            sv.renyi_entropy(bmsa.distribution_for_basis(psi, StabBasisKey.from_indices(3, key.columns, q, c)).probs, 2)
            for q in range(2 ** (key.k * (key.k - 1) // 2)) for c in range(2**key.k)
        )
        assert bmsa.bound_for_R(psi, key, 2) <= exact + 1e-12
        zero = sv.renyi_entropy(bmsa.distribution_for_basis(sv.basis_state(3), key).probs, 2)
        assert bmsa.bound_for_R(sv.basis_state(3), key, 2) == pytest.approx(zero)
    pos = np.abs(psi)
    for key in keys[::5]:
        attained = sv.renyi_entropy(bmsa.distribution_for_basis(pos, key).probs, 3)
        assert bmsa.bound_for_R(pos, key, 3) == pytest.approx(attained)


def test_bound_alpha_gate():
    psi = sv.basis_state(2)
    key = StabBasisKey.computational(2)
    for bad in (0.5, 1.5):
        with pytest.raises(ValueError):
            bmsa.bound_for_R(psi, key, bad)
        with pytest.raises(ValueError):
            bmsa.bmsa_branch_bound(psi, bad)
    with pytest.raises(ValueError):
        bmsa.bmsa_branch_bound(psi, 1, assume_alpha1_bound=False)
    assert bmsa.bound_for_R(psi, key, 1, assume_alpha1_bound=True) == pytest.approx(0)


def test_branch_bound_fast_paths(rng):
    psi = sv.random_state(3, rng)
    real = psi.real / np.linalg.norm(psi.real)
    res = bmsa.bmsa_branch_bound(real * np.exp(0.3j), 2)
    assert res.extra["real_amplitudes"]
    assert res.value == pytest.approx(bmsa.bmsa_bruteforce(real, 2).value, abs=1e-10)
    pos = np.abs(psi)
    res = bmsa.bmsa_branch_bound(pos, 1)
    assert res.extra["positive_amplitudes"]
    assert res.value == pytest.approx(bmsa.bmsa_bruteforce(pos, 1).value, abs=1e-10)
    forced = bmsa.bmsa_branch_bound(psi, 2, real_amplitudes=False, positive_amplitudes=False, verify=True)
    assert forced.extra["verified"]
    assert forced.nodes_visited > 0 and forced.pruned >= 0


def test_branch_bound_dmin(rng):
    chi = simkit.chi_state()
    assert bmsa.bmsa_branch_bound(chi, math.inf).value == pytest.approx(measures.d_min(chi), abs=1e-12)
    psi = sv.random_state(3, rng)
    assert bmsa.bmsa_branch_bound(psi, math.inf).value == pytest.approx(measures.d_min(psi), abs=1e-10)


def test_product_state_linear():
    vals = [bmsa.bmsa_branch_bound(simkit.product_theta_state(n, math.pi / 8), 1).value for n in (2, 3, 4)]
    assert vals[0] < vals[1] < vals[2]
    assert vals[2] - vals[1] == pytest.approx(vals[1] - vals[0], abs=1e-9)


def test_a2_lin(rng):
    assert bmsa.a2_lin_exact(simkit.random_stabilizer_state(3, rng)) == pytest.approx(0, abs=1e-12)
    assert bmsa.a2_lin_exact(simkit.chi_state()) == pytest.approx(1 / 3, abs=1e-12)
    for _ in range(50):
        psi = sv.random_state(2, rng)
        a2 = bmsa.bmsa_bruteforce(psi, 2).value
        assert -math.log(1 - bmsa.a2_lin_exact(psi)) == pytest.approx(a2, abs=1e-9)


def test_invariants(rng):
    for _ in range(3):
        psi = sv.random_state(3, rng)
        vals = [bmsa.bmsa_bruteforce(psi, a).value for a in (0.5, 1, 2, math.inf)]
        assert all(0 <= v <= 3 * math.log(2) + 1e-12 for v in vals)
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
        cpsi = clifford.apply_to_state(clifford.random_clifford(3, rng), psi)
        for a, v in zip((1, 2), vals[1:3]):
            assert bmsa.bmsa_branch_bound(cpsi, a).value == pytest.approx(v, abs=1e-9)
    left, right = sv.random_state(1, rng), sv.random_state(2, rng)
    joint = sv.tensor(left, right)
    for a in (1, 2):
        total = bmsa.bmsa_bruteforce(left, a).value + bmsa.bmsa_bruteforce(right, a).value
        assert bmsa.bmsa_bruteforce(joint, a).value <= total + 1e-9


def test_bmme_equality(rng):
    psi = sv.random_state(3, rng)
    res = bmsa.bmsa_bruteforce(psi, 1)
    for _ in range(200):
        c = clifford.random_clifford(3, rng)
        s = sv.participation_entropy(clifford.apply_to_state(clifford.inverse(c), psi), 1)
        assert s >= res.value - 1e-9
    c = clifford.basis_to_tableau(res.key)
    s = sv.participation_entropy(clifford.apply_to_state(clifford.inverse(c), psi), 1)
    assert s == pytest.approx(res.value, abs=1e-10)


def test_deterministic_ties_and_json():
    psi = simkit.product_theta_state(2, math.pi / 8)
    a = bmsa.bmsa_branch_bound(psi, 2)
    b = bmsa.bmsa_bruteforce(psi, 2)
    assert a.key == b.key
    d = a.to_json()
    assert {"alpha", "value_nats", "value_bits", "key", "tableau", "method", "nodes"} <= set(d)
    assert "wall_time_s" not in d and "wall_time_s" in a.to_json(timing=True)
    assert json.dumps(d, sort_keys=True) == json.dumps(bmsa.bmsa_branch_bound(psi, 2).to_json(), sort_keys=True)


def test_caps():
    with pytest.raises(sv.CapabilityError):
        bmsa.bmsa_bruteforce(sv.basis_state(6), 1)
    with pytest.raises(sv.CapabilityError):
        bmsa.bmsa_branch_bound(sv.basis_state(11), 2)
    with pytest.raises(ValueError):
        bmsa.bmsa_bruteforce(sv.basis_state(1), 1, backend="nope")
