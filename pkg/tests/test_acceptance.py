"""Acceptance criteria 1-10; each test prints and records one PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from bmsakit import bmsa, clifford, measures, simkit, statevec as sv
from bmsakit.anneal import AnnealConfig, anneal_minimize
from bmsakit.cli import inequality_battery
from bmsakit.f2linalg import q_binomial
from bmsakit.pauli import PauliString

from conftest import ACCEPTANCE_LINES, all_stabilizer_states

LN2 = math.log(2)


def report(k, ok, detail):
    line = f"[criterion {k}] {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_backend_agreement():
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    count = 0
    for n, trials in ((3, 100), (4, 25)):
        for _ in range(trials):
            psi = sv.random_state(n, rng)
            for a in (1.0, 2.0):
                vals = [
                    bmsa.bmsa_bruteforce(psi, a).value,
                    bmsa.bmsa_bruteforce(psi, a, backend="pauli").value,
                    bmsa.bmsa_branch_bound(psi, a).value,
                ]
                worst = max(worst, max(vals) - min(vals))
                count += 1
    wall = time.perf_counter() - t0
    report(1, worst <= 1e-9 and wall < 300,
           f"{count} (state, alpha) cases, max backend spread {worst:.2e} nats, {wall:.1f}s")


def test_criterion_2_enumeration_counts():
    ok = True
    parts = []
    for n in (1, 2, 3):
        keys = list(bmsa.iter_bases(n))
        total = 2**n * len(keys)
        expected = 2**n * math.prod(2**k + 1 for k in range(1, n + 1))
        ok &= total == expected
        for k in range(n + 1):
            ks = [key for key in keys if key.k == k]
            n_q = len({key.qp for key in ks if key.columns == ks[0].columns and key.c == ks[0].c})
            n_c = len({key.c for key in ks if key.columns == ks[0].columns and key.qp == ks[0].qp})
            n_r = len({key.columns for key in ks})
            ok &= (n_q, n_c, n_r) == (2 ** (k * (k + 1) // 2) // 2**k, 2**k, q_binomial(n, k))
            # Q includes the diagonal: 2^{k(k+1)/2} = |Q'| * |Q_d|, and 2^{N-k} values of t
            ok &= len(ks) * 2**n == 2 ** (k * (k + 1) // 2) * 2**k * q_binomial(n, k) * 2 ** (n - k)
        parts.append(f"N={n}: {total}")
    distinct = True
    for n in (1, 2):
        states = all_stabilizer_states(n)
        gram = np.abs(states.conj().T @ states) ** 2
        np.fill_diagonal(gram, 0)
        distinct &= bool(np.all(gram < 1 - 1e-9))
    report(2, ok and distinct, f"{', '.join(parts)} states; per-k (Q, c, R, t) counts exact; "
                               f"pairwise distinct at N<=2: {distinct}")


def test_criterion_3_w_state():
    worst = 0.0
    sandwich = True
    for n in range(3, 7):
        w = simkit.w_state(n)
        worst = max(worst, abs(measures.sre(w, 2) - (3 * math.log(n) - math.log(7 * n - 6))))
        a2 = bmsa.bmsa_branch_bound(w, 2).value
        lo = 1.5 * math.log(n) - 0.5 * math.log(7 * n - 6)
        sandwich &= lo - 1e-9 <= a2 <= math.log(n) + 1e-9
    report(3, worst <= 1e-9 and sandwich, f"max |M2 - formula| {worst:.2e}; sandwich holds N=3..6: {sandwich}")


def test_criterion_4_single_qubit():
    chi = simkit.chi_state()
    # exhaustive single-qubit oracles
    stab = [np.array(v, dtype=complex) / np.linalg.norm(v)
            for v in ([1, 0], [0, 1], [1, 1], [1, -1], [1, 1j], [1, -1j])]
    f_oracle = max(abs(np.vdot(s, chi)) ** 2 for s in stab)
    bases = [(stab[0], stab[1]), (stab[2], stab[3]), (stab[4], stab[5])]
    a1_oracle = min(sv.renyi_entropy([abs(np.vdot(s, chi)) ** 2 for s in b], 1) for b in bases)
    b = [np.vdot(chi, PauliString.from_label(p).to_matrix() @ chi).real for p in "IXYZ"]
    m2_oracle = -math.log(sum(x**4 for x in b) / 2)
    p = (1 + 1 / math.sqrt(3)) / 2
    frozen = {"M2": math.log(1.5), "D_min": -math.log(p), "A1": -p * math.log(p) - (1 - p) * math.log(1 - p)}
    oracles = {"M2": m2_oracle, "D_min": -math.log(f_oracle), "A1": a1_oracle}
    got = {"M2": measures.sre(chi, 2), "D_min": measures.d_min(chi), "A1": bmsa.bmsa_bruteforce(chi, 1).value}
    err = max(max(abs(got[k] - frozen[k]), abs(oracles[k] - frozen[k])) for k in frozen)
    report(4, err <= 1e-10, f"M2={got['M2']:.12f} D_min={got['D_min']:.12f} A1={got['A1']:.12f}, max err {err:.1e}")


def test_criterion_5_inequality_battery():
    t0 = time.perf_counter()
    rep = inequality_battery(3, 100, np.random.default_rng(5))
    wall = time.perf_counter() - t0
    bad = {k: v["violations"] for k, v in rep.items() if v["violations"]}
    checked = sum(v["checked"] for v in rep.values())
    report(5, not bad and wall < 600,
           f"{len(rep)} relations, {checked} checks, violations {bad or 0}, {wall:.1f}s")


def test_criterion_6_strong_monotonicity_and_second_moment():
    rng = np.random.default_rng(6)
    worst = -math.inf
    for _ in range(50):
        psi = sv.random_state(3, rng)
        a1 = bmsa.bmsa_bruteforce(psi, 1).value
        for j in range(3):
            avg = sum(p * bmsa.bmsa_bruteforce(post, 1).value for p, post in sv.measure_qubit(psi, j))
            worst = max(worst, avg - a1)
    moment = -math.inf
    triples = 0
    while triples < 1000:
        psi = sv.random_state(3, rng)
        p = PauliString(3, int(rng.integers(8)), int(rng.integers(8)))
        q = PauliString(3, int(rng.integers(8)), int(rng.integers(8)))
        if q.x == q.z == 0 or p.commutes(q):  # the inequality is stated for commuting P, Q
            continue
        lhs = sum(w * sv.expectation(post, p) ** 2 for w, post in sv.measure_pauli(psi, q))
        moment = max(moment, sv.expectation(psi, p) ** 2 - lhs)
        triples += 1
    report(6, worst <= 1e-9 and moment <= 1e-10,
           f"max (avg post-measurement A1 - A1) {worst:.3e}; max second-moment gap {moment:.2e} "
           f"over {triples} commuting triples")


def test_criterion_7_product_scaling():
    ns = np.arange(2, 7)
    vals = np.array([bmsa.bmsa_branch_bound(simkit.product_theta_state(int(n), math.pi / 8), 1).value for n in ns])
    slope, icpt = np.polyfit(ns, vals, 1)
    resid = vals - (slope * ns + icpt)
    r2 = 1 - np.sum(resid**2) / np.sum((vals - vals.mean()) ** 2)
    mono = bool(np.all(np.diff(vals) > 0))
    report(7, mono and r2 > 0.99,
           f"A1 = {', '.join(f'{v:.4f}' for v in vals)}; slope {slope:.4f} nats/qubit, R^2 {r2:.6f}")


def test_criterion_8_ising():
    t0 = time.perf_counter()
    hs = np.round(np.arange(0.7, 1.31, 0.1), 10)
    exact, annealed = [], []
    guess = clifford.ising_initial_guess(8)
    for h in hs:
        psi = simkit.ising_ground_state(8, float(h), "periodic")
        exact.append(bmsa.bmsa_branch_bound(psi, 1).value)
        annealed.append(anneal_minimize(psi, AnnealConfig(initial_tableau=guess)).best_value)
    exact, annealed = np.array(exact), np.array(annealed)
    peak = float(hs[int(np.argmax(exact))])
    gap = float(np.max(np.abs(annealed - exact)))
    wall = time.perf_counter() - t0
    report(8, abs(peak - 1.0) <= 0.1 + 1e-9 and gap <= 1e-6 and wall < 1800,
           f"density peak at h={peak:.1f} ({exact.max() / 8:.4f} nats/site); max |anneal - exact| {gap:.1e}; {wall:.1f}s")


def test_criterion_9_sparse_simulator():
    rng = np.random.default_rng(9)
    worst_inf = 0.0
    ok = True
    for i in range(20):
        n_t = i % 6
        circ = simkit.doped_clifford_circuit(6, n_t, rng)
        run = simkit.simulate_sparse(circ, 0.0)
        f = sv.fidelity(circ.run_dense(), simkit.sparse_to_statevector(run.expansion))
        worst_inf = max(worst_inf, 1 - f)
        ok &= max(run.term_counts) <= 2**n_t
        for before, after, op in zip(run.term_counts, run.term_counts[1:], circ.ops):
            ok &= op[0] != "gate" or after == before
    report(9, ok and worst_inf <= 1e-10,
           f"20 circuits N=6, N_T=0..5: max infidelity {worst_inf:.1e}; term bound and Clifford invariance hold: {ok}")


def _slope(x, y):
    return np.polyfit(np.asarray(x, float), np.asarray(y, float), 1)[0]


def test_criterion_10_ensemble_trends():
    ts = [0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 7.0, 10.0]
    m2 = np.zeros(len(ts))
    a1 = np.zeros(len(ts))
    for s in range(100):
        rng = np.random.default_rng(s)
        h = simkit.gue_hamiltonian(3, rng)
        for i, t in enumerate(ts):
            psi = simkit.gue_evolved(3, t, rng, hamiltonian=h)
            m2[i] += measures.sre(psi, 2) / 100
            a1[i] += bmsa.bmsa_branch_bound(psi, 1).value / 100
    gue_ok = True
    for curve in (m2, a1):
        late = curve[ts.index(5.0):]
        gue_ok &= abs(curve[0]) < 1e-9
        gue_ok &= bool(np.all(np.diff(curve[: ts.index(1.0) + 1]) > 0))
        gue_ok &= (late.max() - late.min()) < 0.05 * late.mean()
    nts = list(range(9))
    dm2 = []
    for nt in nts:
        dm2.append(np.mean([measures.sre(simkit.doped_clifford_state(3, nt, np.random.default_rng(1000 + s)), 2)
                            for s in range(20)]))
    early, late = _slope(nts[:4], dm2[:4]), _slope(nts[-3:], dm2[-3:])
    doped_ok = abs(dm2[0]) < 1e-9 and early > 0 and late < 0.25 * early
    report(10, gue_ok and doped_ok,
           f"GUE N=3 mean M2 {m2[0]:.3f}->{m2[ts.index(1.0)]:.3f}->{m2[-1]:.3f}, A1 {a1[0]:.3f}->{a1[-1]:.3f}; "
           f"doped M2 slope early {early:.3f} late {late:.3f} per T")
