"""State generators and a sparse stabilizer-basis circuit simulator.

The simulator keeps ``|psi> = sum_i c_i U|i>``: a Clifford tableau ``U`` and a
sparse map ``i -> c_i``.  ``U|i> = (U X^i U^dagger) U|0>``, so ``i`` is the
destabilizer bitstring of the basis element.  Clifford gates only update
``U``; a Pauli rotation ``exp(i theta P)`` acts on the coefficients through
``P' = U^dagger P U`` and at most doubles the number of terms.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from . import clifford, statevec
from .clifford import CliffordTableau
from .pauli import PauliString

DENSE_CAP = 14
ISING_DENSE_MAX = 10
T_ANGLE = math.pi / 8  # diag(1, e^{-i pi/4}) = e^{i pi/8} exp(i pi/8 Z)


# -- named states ---------------------------------------------------------------------

def product_theta_state(n: int, theta: float) -> np.ndarray:
    """``(|0> + e^{i theta}|1>)^{(x) n} / 2^{n/2}``."""
    one = np.array([1.0, np.exp(1j * theta)]) / math.sqrt(2)
    out = one
    for _ in range(n - 1):
        out = statevec.tensor(out, one)
    return out


CHI_BETA = 0.5 * math.acos(1 / math.sqrt(3))


def chi_state() -> np.ndarray:
    """``e^{-i pi/4} cos(beta)|0> + sin(beta)|1>`` with ``cos(2 beta) = 1/sqrt(3)``."""
    return np.array([np.exp(-1j * math.pi / 4) * math.cos(CHI_BETA), math.sin(CHI_BETA)])


def w_state(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("W state needs n >= 1")
    psi = np.zeros(1 << n, dtype=complex)
    psi[[1 << j for j in range(n)]] = 1 / math.sqrt(n)
    return psi


def psi_eps_norm(n: int, eps: float) -> float:
    """``1 + eps^2 + 2 eps cos(beta)^n cos(n pi/4)``."""
    return 1 + eps**2 + 2 * eps * math.cos(CHI_BETA) ** n * math.cos(n * math.pi / 4)


def psi_eps(n: int, eps: float) -> np.ndarray:
    """``(|0>^n + eps |chi>^n) / sqrt(N_eps)``."""
    chi = chi_state()
    chin = chi
    for _ in range(n - 1):
        chin = statevec.tensor(chin, chi)
    psi = eps * chin
    psi[0] += 1.0
    return psi / math.sqrt(psi_eps_norm(n, eps))


def random_stabilizer_state(n: int, rng: np.random.Generator) -> np.ndarray:
    t = clifford.random_clifford(n, rng)
    return clifford.apply_to_state(t, statevec.basis_state(n))


# -- Ising chain ------------------------------------------------------------------------

def ising_hamiltonian(n: int, h: float, boundary: str = "open") -> scipy.sparse.csr_matrix:
    """``H = -sum_j Z_j Z_{j+1} - h sum_j X_j`` as a sparse matrix."""
    if boundary not in ("open", "periodic"):
        raise ValueError("boundary must be 'open' or 'periodic'")
    dim = 1 << n
    idx = np.arange(dim)
    spins = 1 - 2 * ((idx[:, None] >> np.arange(n)[None, :]) & 1)
    bonds = [(j, j + 1) for j in range(n - 1)]
    if boundary == "periodic" and n > 2:
        bonds.append((n - 1, 0))
    diag = -sum(spins[:, a] * spins[:, b] for a, b in bonds) if bonds else np.zeros(dim)
    rows = [idx]
    cols = [idx]
    vals = [diag.astype(float)]
    for j in range(n):
        rows.append(idx)
        cols.append(idx ^ (1 << j))
        vals.append(np.full(dim, -float(h)))
    return scipy.sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )


def ising_ground_state(n: int, h: float, boundary: str = "open") -> np.ndarray:
    """Ground state of the transverse-field Ising chain.

    Dense ``eigh`` up to 10 qubits, Lanczos beyond.  The phase is fixed by
    making the largest-magnitude amplitude real and positive.
    """
    if h == 0:
        raise ValueError("h = 0 has a degenerate ground state; use h > 0")
    if n > DENSE_CAP:
        raise statevec.CapabilityError(f"Ising ground states capped at {DENSE_CAP} qubits")
    ham = ising_hamiltonian(n, h, boundary)
    if n <= ISING_DENSE_MAX:
        w, v = np.linalg.eigh(ham.toarray())
        psi = v[:, 0]
    else:
        w, v = scipy.sparse.linalg.eigsh(ham, k=2, which="SA", tol=1e-12, v0=np.ones(1 << n))
        order = np.argsort(w)
        w, psi = w[order], v[:, order[0]]
    if w[1] - w[0] < 1e-12:
        raise ValueError(f"ground state is degenerate at h={h}")
    psi = psi / np.linalg.norm(psi)
    i = int(np.argmax(np.abs(psi)))
    psi = psi * (abs(psi[i]) / psi[i])
    return psi.astype(complex)


# -- random ensembles -------------------------------------------------------------------

def gue_hamiltonian(n: int, rng: np.random.Generator) -> np.ndarray:
    """GUE matrix rescaled so that its largest eigenvalue modulus is 2."""
    dim = 1 << n
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = (a + a.conj().T) / 2
    return h * (2 / np.max(np.abs(np.linalg.eigvalsh(h))))


def gue_evolved(n: int, t: float, rng: np.random.Generator, hamiltonian=None) -> np.ndarray:
    """``exp(-i H t)|0...0>`` for a GUE Hamiltonian (sampled from ``rng`` unless given)."""
    if n > 6:
        raise statevec.CapabilityError("GUE evolution capped at 6 qubits")
    h = gue_hamiltonian(n, rng) if hamiltonian is None else np.asarray(hamiltonian)
    w, v = np.linalg.eigh(h)
    psi = v @ (np.exp(-1j * w * t) * v[0].conj())
    return psi / np.linalg.norm(psi)


def doped_clifford_circuit(n: int, n_t: int, rng: np.random.Generator) -> "CircuitIR":
    """``U^(0) prod_k (T (x) I) U^(k) |0>`` with fresh uniform Cliffords; T on qubit 0."""
    ops = []
    for k in range(n_t + 1):
        ops.extend(("gate", name, qs) for name, qs in clifford.decompose(clifford.random_clifford(n, rng)))
        if k < n_t:
            ops.append(("rot", PauliString.single(n, 0, "Z"), T_ANGLE))
    return CircuitIR(n, ops)


def doped_clifford_state(n: int, n_t: int, rng: np.random.Generator) -> np.ndarray:
    return doped_clifford_circuit(n, n_t, rng).run_dense()


# -- circuit IR -----------------------------------------------------------------------------

@dataclass
class CircuitIR:
    """Ordered gate list: ``("gate", name, qubits)`` or ``("rot", PauliString, theta)``."""

    n: int
    ops: list = field(default_factory=list)

    def __post_init__(self):
        for op in self.ops:
            if op[0] == "gate":
                _, name, qs = op
                if name not in clifford.GATE_MATRICES:
                    raise ValueError(f"unknown gate {name!r}")
                if len(qs) != clifford.GATE_ARITY[name] or any(not 0 <= q < self.n for q in qs):
                    raise ValueError(f"bad qubits {qs} for gate {name}")
            elif op[0] == "rot":
                if op[1].n != self.n or not op[1].is_hermitian:
                    raise ValueError("rotation needs a Hermitian Pauli on every qubit")
            else:
                raise ValueError(f"unsupported operation {op[0]!r}")

    @property
    def n_rotations(self) -> int:
        return sum(op[0] == "rot" for op in self.ops)

    def run_dense(self, psi=None) -> np.ndarray:
        psi = statevec.basis_state(self.n) if psi is None else np.asarray(psi, dtype=complex)
        for op in self.ops:
            if op[0] == "gate":
                psi = statevec.apply_gate(psi, clifford.GATE_MATRICES[op[1]], op[2])
            else:
                psi = statevec.apply_pauli_rotation(psi, op[1], op[2])
        return psi

    def to_lines(self) -> list[str]:
        out = [json.dumps({"n_qubits": self.n})]
        for op in self.ops:
            if op[0] == "gate":
                out.append(json.dumps({"g": op[1], "q": list(op[2])}))
            else:
                out.append(json.dumps({"g": "ROT", "p": op[1].label(), "theta": op[2]}))
        return out

    def save(self, path) -> None:
        Path(path).write_text("\n".join(self.to_lines()) + "\n")

    @classmethod
    def from_lines(cls, lines) -> "CircuitIR":
        """Parse JSON lines; errors name the offending line (1-based)."""
        n = None
        raw = []
        for lineno, line in enumerate(lines, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(rec, dict):
                raise ValueError(f"line {lineno}: expected an object")
            if "n_qubits" in rec:
                n = int(rec["n_qubits"])
                continue
            raw.append((lineno, rec))
        if n is None:
            n = 1
            for _, rec in raw:
                if "p" in rec:
                    n = max(n, len(str(rec["p"]).lstrip("+-i")))
                n = max([n] + [q + 1 for q in rec.get("q", [])])
        ops = []
        for lineno, rec in raw:
            try:
                ops.extend(_parse_op(rec, n))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        return cls(n, ops)

    @classmethod
    def load(cls, path) -> "CircuitIR":
        return cls.from_lines(Path(path).read_text().splitlines())


def _parse_op(rec, n):
    g = str(rec["g"]).upper()
    if g == "ROT":
        p = PauliString.from_label(rec["p"])
        if p.n != n:
            raise ValueError(f"Pauli {rec['p']} does not act on {n} qubits")
        return [("rot", p, float(rec["theta"]))]
    qs = tuple(int(q) for q in rec["q"])
    if any(not 0 <= q < n for q in qs):
        raise ValueError(f"qubit index out of range in {qs}")
    if g in ("T", "TDG"):
        if len(qs) != 1:
            raise ValueError("T acts on one qubit")
        angle = T_ANGLE if g == "T" else -T_ANGLE
        return [("rot", PauliString.single(n, qs[0], "Z"), angle)]
    if g not in clifford.GATE_MATRICES:
        raise ValueError(f"unsupported gate {rec['g']!r}")
    if len(qs) != clifford.GATE_ARITY[g]:
        raise ValueError(f"gate {g} takes {clifford.GATE_ARITY[g]} qubits")
    return [("gate", g, qs)]


# -- sparse stabilizer-basis expansion ------------------------------------------------------

@dataclass
class SparseStabExpansion:
    """``|psi> = sum_i c_i U|i>`` with ``U = basis`` and ``c = coeffs``."""

    basis: CliffordTableau
    coeffs: dict
    discarded: float = 0.0
    angle: float = 0.0  # summed Fubini-Study angles of the truncations

    @property
    def infidelity_bound(self) -> float:
        """Upper bound on ``1 - |<exact|self>|^2`` from the truncations so far."""
        return math.sin(min(self.angle, math.pi / 2)) ** 2

    @classmethod
    def zero(cls, n: int) -> "SparseStabExpansion":
        return cls(CliffordTableau.identity(n), {0: 1.0 + 0j})

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def n_terms(self) -> int:
        return len(self.coeffs)

    def norm2(self) -> float:
        return float(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def probabilities(self) -> np.ndarray:
        return np.array([abs(c) ** 2 for c in self.coeffs.values()])


def sparse_apply(exp: SparseStabExpansion, op) -> SparseStabExpansion:
    """Apply one IR operation; Clifford gates leave the coefficients untouched."""
    if op[0] == "gate":
        g = clifford.named_gate(op[1], tuple(op[2]), exp.n)
        return SparseStabExpansion(clifford.compose(g, exp.basis), dict(exp.coeffs), exp.discarded, exp.angle)
    if op[0] != "rot":
        raise ValueError(f"unsupported operation {op[0]!r}")
    p, theta = op[1], float(op[2])
    pp = clifford.inverse(exp.basis).conjugate(p)  # U^dagger P U
    keys = np.fromiter(exp.coeffs.keys(), dtype=np.int64, count=len(exp.coeffs))
    vals = np.fromiter(exp.coeffs.values(), dtype=complex, count=len(exp.coeffs))
    # P'|i> = omega(i) |i ^ x'>
    sign = 1 - 2 * (np.bitwise_count(keys & pp.z) & 1).astype(np.int64)
    omega = (1j ** ((pp.phase + bin(pp.x & pp.z).count("1")) % 4)) * sign
    if pp.x == 0:
        new = dict(zip(keys.tolist(), (vals * np.exp(1j * theta * omega.real)).tolist()))
    else:
        new = dict(zip(keys.tolist(), (math.cos(theta) * vals).tolist()))
        for k, v in zip((keys ^ pp.x).tolist(), (1j * math.sin(theta) * omega * vals).tolist()):
            new[k] = new.get(k, 0) + v
    return SparseStabExpansion(exp.basis, new, exp.discarded, exp.angle)


def sparse_truncate(exp: SparseStabExpansion, eps: float) -> SparseStabExpansion:
    """Drop coefficients with ``|c| < eps`` and renormalise; the dropped weight accumulates."""
    if eps <= 0:
        return exp
    kept = {k: v for k, v in exp.coeffs.items() if abs(v) >= eps}
    lost = sum(abs(v) ** 2 for k, v in exp.coeffs.items() if k not in kept)
    if not kept:
        raise ValueError("truncation removed every term")
    norm = math.sqrt(sum(abs(v) ** 2 for v in kept.values()))
    total = exp.norm2()
    angle = math.asin(min(1.0, math.sqrt(lost / total)))
    return SparseStabExpansion(
        exp.basis, {k: v / norm for k, v in kept.items()}, exp.discarded + lost, exp.angle + angle
    )


def sparse_to_statevector(exp: SparseStabExpansion) -> np.ndarray:
    """Dense state (up to a global phase)."""
    c = np.zeros(1 << exp.n, dtype=complex)
    for k, v in exp.coeffs.items():
        c[k] = v
    return clifford.apply_to_state(exp.basis, c)


@dataclass
class SparseRun:
    expansion: SparseStabExpansion
    term_counts: list
    discarded: float
    infidelity_bound: float


def simulate_sparse(circuit: CircuitIR, eps: float = 0.0) -> SparseRun:
    """Run a circuit from ``|0...0>``, truncating after every rotation."""
    exp = SparseStabExpansion.zero(circuit.n)
    counts = [exp.n_terms]
    for op in circuit.ops:
        exp = sparse_apply(exp, op)
        if op[0] == "rot":
            exp = sparse_truncate(exp, eps)
        counts.append(exp.n_terms)
    return SparseRun(exp, counts, exp.discarded, exp.infidelity_bound)
