"""Clifford tableaux.

A tableau stores, for each generator ``X_0..X_{n-1}, Z_0..Z_{n-1}``, its image
``U g U^dagger`` as a Hermitian :class:`~bmsakit.pauli.PauliString` (phase 0
or 2, i.e. a sign).  ``compose(a, b)`` is the operator product ``a b``: ``b``
acts first.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

from . import statevec
from .pauli import PauliString, popcount

_SQ2 = 1 / math.sqrt(2)

GATE_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "S": np.diag([1, 1j]),
    "SDG": np.diag([1, -1j]),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0 + 0j, -1.0]),
    # two-qubit gates: local index bit 0 is the first listed qubit
    "CNOT": np.eye(4, dtype=complex)[[0, 3, 2, 1]],
    "CZ": np.diag([1.0 + 0j, 1, 1, -1]),
    "SWAP": np.eye(4, dtype=complex)[[0, 2, 1, 3]],
}
GATE_MATRICES["CX"] = GATE_MATRICES["CNOT"]
GATE_ARITY = {name: int(round(math.log2(m.shape[0]))) for name, m in GATE_MATRICES.items()}
_SELF_INVERSE = {"I", "H", "X", "Y", "Z", "CNOT", "CX", "CZ", "SWAP"}


def inverse_gate(name: str) -> str:
    if name in _SELF_INVERSE:
        return name
    return {"S": "SDG", "SDG": "S"}[name]


@dataclass(frozen=True)
class CliffordTableau:
    n: int
    images: tuple  # 2n PauliStrings: images of X_0..X_{n-1}, Z_0..Z_{n-1}

    # -- construction ------------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "CliffordTableau":
        xs = tuple(PauliString(n, 1 << j, 0) for j in range(n))
        zs = tuple(PauliString(n, 0, 1 << j) for j in range(n))
        return cls(n, xs + zs)

    @classmethod
    def from_matrix(cls, matrix, signs=None) -> "CliffordTableau":
        """Build from a ``2n x 2n`` symplectic bit matrix (rows ``x|z``) and sign bits."""
        m = np.asarray(matrix, dtype=np.uint8) & 1
        n = m.shape[0] // 2
        signs = np.zeros(2 * n, dtype=np.uint8) if signs is None else np.asarray(signs)
        images = []
        for r in range(2 * n):
            x = sum(int(m[r, j]) << j for j in range(n))
            z = sum(int(m[r, n + j]) << j for j in range(n))
            images.append(PauliString(n, x, z, 2 * int(signs[r])))
        t = cls(n, tuple(images))
        if not t.is_valid():
            raise ValueError("matrix is not symplectic")
        return t

    @classmethod
    def from_unitary(cls, u) -> "CliffordTableau":
        """Tableau of a small dense Clifford unitary (by conjugating every generator)."""
        u = np.asarray(u, dtype=complex)
        n = int(round(math.log2(u.shape[0])))
        paulis = [PauliString.from_index(i, n) for i in range(4**n)]
        mats = [p.to_matrix() for p in paulis]
        images = []
        for g in cls.identity(n).images:
            img = u @ g.to_matrix() @ u.conj().T
            for p, pm in zip(paulis, mats):
                coeff = np.trace(pm.conj().T @ img) / (1 << n)
                if abs(abs(coeff) - 1) < 1e-9:
                    if abs(coeff.imag) > 1e-9:
                        raise ValueError("unitary maps a generator to a non-Hermitian Pauli")
                    images.append(PauliString(n, p.x, p.z, 0 if coeff.real > 0 else 2))
                    break
            else:
                raise ValueError("unitary is not Clifford")
        return cls(n, tuple(images))

    # -- views ---------------------------------------------------------------
    @property
    def matrix(self) -> np.ndarray:
        n = self.n
        m = np.zeros((2 * n, 2 * n), dtype=np.uint8)
        for r, p in enumerate(self.images):
            for j in range(n):
                m[r, j] = (p.x >> j) & 1
                m[r, n + j] = (p.z >> j) & 1
        return m

    @property
    def signs(self) -> np.ndarray:
        return np.array([p.phase // 2 for p in self.images], dtype=np.uint8)

    def key(self) -> tuple:
        return tuple((p.x, p.z, p.phase) for p in self.images)

    def is_valid(self) -> bool:
        """Symplectic check: images keep every pairwise commutation relation."""
        n = self.n
        gens = CliffordTableau.identity(n).images
        for a in range(2 * n):
            if not self.images[a].is_hermitian or self.images[a].n != n:
                return False
            for b in range(a + 1, 2 * n):
                if self.images[a].commutes(self.images[b]) != gens[a].commutes(gens[b]):
                    return False
        return True

    def __eq__(self, other):
        return isinstance(other, CliffordTableau) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    # -- action --------------------------------------------------------------
    def conjugate(self, p: PauliString) -> PauliString:
        """``U P U^dagger``."""
        if p.n != self.n:
            raise ValueError(f"qubit count mismatch: tableau {self.n}, Pauli {p.n}")
        n = self.n
        out = PauliString(n, 0, 0, p.phase + popcount(p.x & p.z))
        for j in range(n):
            if (p.x >> j) & 1:
                out = out.multiply(self.images[j])
            if (p.z >> j) & 1:
                out = out.multiply(self.images[n + j])
        return out

    def __matmul__(self, other: "CliffordTableau") -> "CliffordTableau":
        return compose(self, other)

    def to_json(self) -> dict:
        n = self.n
        rows = []
        for p in self.images:
            rows.append(
                "".join(str((p.x >> j) & 1) for j in range(n))
                + "|"
                + "".join(str((p.z >> j) & 1) for j in range(n))
            )
        return {
            "n": n,
            "rows": rows,
            "signs": [int(s) for s in self.signs],
            "images": [p.label() for p in self.images],
        }

    @classmethod
    def from_json(cls, data) -> "CliffordTableau":
        if isinstance(data, str):
            data = json.loads(data)
        n = data["n"]
        m = np.zeros((2 * n, 2 * n), dtype=np.uint8)
        for r, row in enumerate(data["rows"]):
            xs, zs = row.split("|")
            m[r, :n] = [int(c) for c in xs]
            m[r, n:] = [int(c) for c in zs]
        return cls.from_matrix(m, data["signs"])


# -- group operations ------------------------------------------------------------

def compose(a: CliffordTableau, b: CliffordTableau) -> CliffordTableau:
    """Operator product ``a b`` (apply ``b`` first)."""
    if a.n != b.n:
        raise ValueError("tableaux act on different numbers of qubits")
    return CliffordTableau(a.n, tuple(a.conjugate(p) for p in b.images))


def inverse(t: CliffordTableau) -> CliffordTableau:
    n = t.n
    m = t.matrix.astype(np.int64)
    omega = np.zeros((2 * n, 2 * n), dtype=np.int64)
    omega[:n, n:] = np.eye(n, dtype=np.int64)
    omega[n:, :n] = np.eye(n, dtype=np.int64)
    inv = omega @ m.T @ omega % 2
    cand = CliffordTableau.from_matrix(inv)
    # fix signs so that t . cand is the identity
    check = compose(t, cand)
    signs = check.signs
    return CliffordTableau.from_matrix(inv, signs)


def embed(t: CliffordTableau, targets, n: int) -> CliffordTableau:
    """Place a ``len(targets)``-qubit tableau on ``targets`` of an ``n``-qubit register."""
    targets = list(targets)
    m = t.n
    if len(targets) != m or len(set(targets)) != m or any(not 0 <= q < n for q in targets):
        raise ValueError(f"bad targets {targets}")

    def spread(v):
        return sum(((v >> i) & 1) << targets[i] for i in range(m))

    images = list(CliffordTableau.identity(n).images)
    for i, q in enumerate(targets):
        px, pz = t.images[i], t.images[m + i]
        images[q] = PauliString(n, spread(px.x), spread(px.z), px.phase)
        images[n + q] = PauliString(n, spread(pz.x), spread(pz.z), pz.phase)
    return CliffordTableau(n, tuple(images))


@lru_cache(maxsize=None)
def _local_gate(name: str) -> CliffordTableau:
    return CliffordTableau.from_unitary(GATE_MATRICES[name])


@lru_cache(maxsize=4096)
def named_gate(name: str, targets, n: int) -> CliffordTableau:
    """Tableau of a named gate (``H, S, SDG, X, Y, Z, CNOT, CZ, SWAP``) on an ``n``-qubit register."""
    name = name.upper()
    if name not in GATE_MATRICES:
        raise ValueError(f"unknown Clifford gate {name!r}")
    targets = tuple(targets) if not isinstance(targets, int) else (targets,)
    if len(targets) != GATE_ARITY[name]:
        raise ValueError(f"{name} acts on {GATE_ARITY[name]} qubit(s)")
    return embed(_local_gate(name), targets, n)


def from_gates(gates, n: int) -> CliffordTableau:
    """Tableau of a gate list given in time order as ``(name, qubits)`` pairs."""
    t = CliffordTableau.identity(n)
    for name, qs in gates:
        t = compose(named_gate(name, tuple(qs), n), t)
    return t


# -- synthesis ------------------------------------------------------------------

def decompose(t: CliffordTableau) -> list[tuple[str, tuple[int, ...]]]:
    """Gate list (time order) over ``H, S, SDG, CNOT, SWAP, X, Z`` realising ``t``.

    Gaussian elimination: gates are applied on the output side until the
    tableau becomes the identity; the circuit is the inverse of that sequence.
    """
    n = t.n
    cur = t
    ops: list[tuple[str, tuple[int, ...]]] = []

    def do(name, *qs):
        nonlocal cur
        cur = compose(named_gate(name, qs, n), cur)
        ops.append((name, qs))

    def bit(v, j):
        return (v >> j) & 1

    for i in range(n):
        p = cur.images[i]
        if not bit(p.x, i):
            j = next(j for j in range(i, n) if bit(p.x | p.z, j))
            if not bit(p.x, j):
                do("H", j)
            if j != i:
                do("SWAP", i, j)
        p = cur.images[i]
        for j in range(i + 1, n):
            if bit(p.x, j):
                do("CNOT", i, j)
        p = cur.images[i]
        if p.z >> (i + 1):
            if not bit(p.z, i):
                do("S", i)
            for j in range(i + 1, n):
                if bit(p.z, j):
                    do("CNOT", j, i)
        if bit(cur.images[i].z, i):
            do("S", i)
        # image of Z_i: clear qubits > i, then its X part on qubit i
        for j in range(i + 1, n):
            q = cur.images[n + i]
            if bit(q.x, j) and bit(q.z, j):
                do("S", j)
            if bit(cur.images[n + i].x, j):
                do("H", j)
        q = cur.images[n + i]
        for j in range(i + 1, n):
            if bit(q.z, j):
                do("CNOT", j, i)
        if bit(cur.images[n + i].x, i):
            do("H", i)
            do("S", i)
            do("H", i)
    for i in range(n):
        if cur.images[i].phase == 2:
            do("Z", i)
        if cur.images[n + i].phase == 2:
            do("X", i)
    assert cur == CliffordTableau.identity(n), "tableau reduction failed"
    return [(inverse_gate(name), qs) for name, qs in reversed(ops)]


def apply_gates(psi, gates) -> np.ndarray:
    for name, qs in gates:
        psi = statevec.apply_gate(psi, GATE_MATRICES[name.upper()], qs)
    return psi


def apply_to_state(t: CliffordTableau, psi) -> np.ndarray:
    """``U psi`` for the Clifford ``U`` of ``t`` (defined up to a global phase)."""
    psi = np.asarray(psi, dtype=complex)
    if psi.size != 1 << t.n:
        raise ValueError("state and tableau sizes differ")
    return apply_gates(psi, decompose(t))


def to_unitary(t: CliffordTableau) -> np.ndarray:
    """Dense unitary (up to global phase) built from the stabilizer picture.

    Column ``x`` is ``U|x> = (U X^x U^dagger) U|0>``, with ``U|0>`` the joint
    +1 eigenvector of the images of ``Z_j``.  Independent of :func:`decompose`.
    """
    n = t.n
    dim = 1 << n
    proj = reduce(lambda a, b: a @ b, [(np.eye(dim) + t.images[n + j].to_matrix()) / 2 for j in range(n)])
    col = int(np.argmax(np.linalg.norm(proj, axis=0)))
    s0 = proj[:, col] / np.linalg.norm(proj[:, col])
    u = np.zeros((dim, dim), dtype=complex)
    for x in range(dim):
        v = s0
        for j in range(n):
            if (x >> j) & 1:
                v = statevec.apply_pauli(v, t.images[j])
        u[:, x] = v
    return u


# -- sampling ---------------------------------------------------------------------

def _sp(a: int, b: int, n: int) -> int:
    mask = (1 << n) - 1
    return popcount(((a & mask) & (b >> n)) ^ ((a >> n) & (b & mask))) & 1


def random_clifford(n: int, rng: np.random.Generator) -> CliffordTableau:
    """Uniformly random Clifford (modulo global phase).

    Builds a uniformly random symplectic basis pair by pair, projecting
    fresh uniform vectors onto the symplectic complement of the pairs chosen
    so far, then draws uniform signs.
    """
    pairs: list[tuple[int, int]] = []

    def draw():
        u = int(rng.integers(0, 1 << (2 * n)))
        for v, w in pairs:
            u ^= (v if _sp(u, w, n) else 0) ^ (w if _sp(u, v, n) else 0)
        return u

    for _ in range(n):
        v = 0
        while v == 0:
            v = draw()
        w = draw()
        while not _sp(v, w, n):
            w = draw()
        pairs.append((v, w))
    signs = rng.integers(0, 2, size=2 * n)
    mask = (1 << n) - 1
    xs = [PauliString(n, v & mask, v >> n, 2 * int(signs[i])) for i, (v, _) in enumerate(pairs)]
    zs = [PauliString(n, w & mask, w >> n, 2 * int(signs[n + i])) for i, (_, w) in enumerate(pairs)]
    return CliffordTableau(n, tuple(xs + zs))


# -- two-qubit group ------------------------------------------------------------

_C2_GENERATORS = [("H", (0,)), ("H", (1,)), ("S", (0,)), ("S", (1,)), ("CNOT", (0, 1)), ("CNOT", (1, 0))]


@lru_cache(maxsize=None)
def two_qubit_group() -> tuple[CliffordTableau, ...]:
    """All 11520 two-qubit Clifford tableaux (breadth-first closure), sorted by key."""
    start = CliffordTableau.identity(2)
    gens = [named_gate(name, qs, 2) for name, qs in _C2_GENERATORS]
    seen = {start.key(): start}
    frontier = [start]
    while frontier:
        nxt = []
        for t in frontier:
            for g in gens:
                u = compose(g, t)
                k = u.key()
                if k not in seen:
                    seen[k] = u
                    nxt.append(u)
        frontier = nxt
    return tuple(seen[k] for k in sorted(seen))


def preserves_diagonal(t: CliffordTableau) -> bool:
    """True if ``t`` maps Z-type strings to Z-type strings."""
    return all(p.x == 0 for p in t.images[t.n :])


@lru_cache(maxsize=None)
def diagonal_subgroup() -> tuple[CliffordTableau, ...]:
    return tuple(t for t in two_qubit_group() if preserves_diagonal(t))


@lru_cache(maxsize=None)
def two_qubit_coset_reps() -> tuple[CliffordTableau, ...]:
    """One representative per coset ``C_z g`` of the diagonal subgroup in C_2.

    Every ``g`` in C_2 factors uniquely as ``compose(h, rep)`` with ``h`` in
    C_z; since ``h`` only permutes and rephases computational basis states,
    the participation entropy after ``g`` equals that after ``rep``.  The
    identity represents its own coset; other representatives are the
    smallest tableau key of each coset.
    """
    group = two_qubit_group()
    cz = diagonal_subgroup()
    identity = CliffordTableau.identity(2)
    assigned: set = set()
    reps = []
    for g in (identity,) + group:
        if g.key() in assigned:
            continue
        reps.append(g)
        for h in cz:
            assigned.add(compose(h, g).key())
    return tuple(reps)


@lru_cache(maxsize=None)
def two_qubit_coset_unitaries() -> np.ndarray:
    """Dense 4x4 unitaries of :func:`two_qubit_coset_reps`, shape ``(15, 4, 4)``."""
    return np.stack([to_unitary(t) for t in two_qubit_coset_reps()])


@lru_cache(maxsize=None)
def diagonal_subgroup_unitaries() -> np.ndarray:
    """Dense 4x4 unitaries of :func:`diagonal_subgroup`, shape ``(768, 4, 4)``."""
    return np.stack([to_unitary(t) for t in diagonal_subgroup()])


# -- stabilizer bases -----------------------------------------------------------

def basis_gates(key) -> list[tuple[str, tuple[int, ...]]]:
    """Circuit (time order) sending ``|y>`` to the stabilizer-basis state of ``key`` labelled ``y``.

    ``key`` needs attributes ``n, k, qp, c, R`` (see :class:`bmsakit.bmsa.StabBasisKey`).
    Label ``y`` carries the diagonal bits ``Q_d`` on the pivot rows of ``R``
    and the coset representative ``t`` on the remaining rows.
    """
    piv = key.pivots
    gates: list[tuple[str, tuple[int, ...]]] = [("H", (p,)) for p in piv]
    for j, p in enumerate(piv):
        if key.c[j]:
            gates.append(("S", (p,)))
    for i in range(key.k):
        for j in range(i + 1, key.k):
            if key.qp[i][j]:
                gates.append(("CZ", (piv[i], piv[j])))
    for j, p in enumerate(piv):
        col = key.columns[j]
        for r in range(key.n):
            if r != p and (col >> r) & 1:
                gates.append(("CNOT", (p, r)))
    return gates


def basis_to_tableau(key) -> CliffordTableau:
    """Clifford ``C`` whose columns ``C|y>`` are the stabilizer basis labelled by ``key``."""
    return from_gates(basis_gates(key), key.n)


def ising_initial_guess(n: int) -> CliffordTableau:
    """``H_1 CNOT_{1,2} CNOT_{2,3} ... CNOT_{N-1,N}`` (rightmost factor acts first)."""
    if n < 2:
        raise ValueError("needs at least two qubits")
    gates = [("CNOT", (j - 1, j)) for j in range(n - 1, 0, -1)] + [("H", (0,))]
    return from_gates(gates, n)
