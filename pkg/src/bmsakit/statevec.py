"""Dense pure-state backend.

States are 1-D complex numpy arrays of length ``2^n``; basis index bit ``j``
is the value of qubit ``j`` (qubit 0 is the least significant bit).  All
entropies are in nats.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .f2linalg import fwht
from .pauli import PauliString

SPECTRUM_CAP = 12
SUPPORT_EPS = 1e-12


class CapabilityError(ValueError):
    """Raised when a request exceeds a size cap of the dense backend."""


def as_state(psi, normalize: bool = False) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    dim = psi.size
    if dim < 2 or dim & (dim - 1):
        raise ValueError(f"state dimension {dim} is not a power of two >= 2")
    if normalize:
        psi = psi / np.linalg.norm(psi)
    elif abs(np.vdot(psi, psi).real - 1.0) > 1e-10:
        raise ValueError("state is not normalized")
    return psi


def num_qubits(psi) -> int:
    return int(np.asarray(psi).size).bit_length() - 1


def basis_state(n: int, index: int = 0) -> np.ndarray:
    psi = np.zeros(1 << n, dtype=complex)
    psi[index] = 1.0
    return psi


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state."""
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def tensor(a, b) -> np.ndarray:
    """``a`` on the low qubits, ``b`` on the following ones."""
    return np.kron(np.asarray(b, dtype=complex), np.asarray(a, dtype=complex))


def inner(a, b) -> complex:
    return complex(np.vdot(a, b))


def fidelity(a, b) -> float:
    return float(abs(np.vdot(a, b)) ** 2)


# -- Pauli action --------------------------------------------------------------

def apply_pauli(psi, p: PauliString) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    idx = np.arange(psi.size)
    signs = 1 - 2 * (np.bitwise_count(idx & p.z) & 1).astype(np.int64)
    out = np.empty_like(psi)
    out[idx ^ p.x] = psi * signs
    coeff = 1j ** ((p.phase + bin(p.x & p.z).count("1")) % 4)
    return coeff * out


def expectation(psi, p: PauliString) -> float:
    if not p.is_hermitian:
        raise ValueError(f"{p.label()} is not Hermitian")
    psi = np.asarray(psi, dtype=complex)
    if psi.size != 1 << p.n:
        raise ValueError("Pauli and state sizes differ")
    return float(np.vdot(psi, apply_pauli(psi, p)).real)


def pauli_overlaps(bra, ket, cap: int = SPECTRUM_CAP) -> np.ndarray:
    """``<bra|P|ket>`` for all ``4^n`` unsigned Paulis, indexed by ``x | z << n``."""
    bra = np.asarray(bra, dtype=complex)
    ket = np.asarray(ket, dtype=complex)
    n = num_qubits(ket)
    if n > cap:
        raise CapabilityError(f"Pauli spectra capped at {cap} qubits (got {n})")
    dim = ket.size
    s = np.arange(dim)
    vals = np.empty((dim, dim), dtype=complex)  # [x, z]
    step = max(1, (1 << 20) // dim)
    for lo in range(0, dim, step):
        xs = s[lo : lo + step]
        # v[x, s] = conj(bra[s ^ x]) ket[s]; transforming over s gives sum_s (-1)^(z.s) v
        v = np.conj(bra[s[None, :] ^ xs[:, None]]) * ket[None, :]
        w = fwht(v, axis=1)
        xz = np.bitwise_count(xs[:, None] & s[None, :]) % 4
        vals[lo : lo + step] = w * (1j**xz)
    # index = x | z << n  ->  array laid out as [z, x]
    return np.ascontiguousarray(vals.T).ravel()


def pauli_spectrum(psi, cap: int = SPECTRUM_CAP) -> np.ndarray:
    """All ``4^n`` expectation values ``<psi|P|psi>``, indexed by ``x | z << n``."""
    return pauli_overlaps(psi, psi, cap).real.copy()


# -- entropies -----------------------------------------------------------------

def renyi_entropy(p, alpha: float) -> float:
    """Renyi entropy (nats) of a probability vector; alpha in [0, inf]."""
    p = np.asarray(p, dtype=float).ravel()
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha == 0:
        return math.log(np.count_nonzero(p > SUPPORT_EPS))
    if alpha == 1:
        q = p[p > 0]
        return float(-np.sum(q * np.log(q)))
    if math.isinf(alpha):
        return float(-math.log(p.max()))
    return float(math.log(np.sum(p**alpha)) / (1 - alpha))


def renyi_entropy_batch(p, alpha: float, axis=-1) -> np.ndarray:
    """Vectorised :func:`renyi_entropy` over the trailing axis (or axes)."""
    p = np.asarray(p, dtype=float)
    if alpha == 0:
        return np.log(np.count_nonzero(p > SUPPORT_EPS, axis=axis))
    if alpha == 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(p > 0, p * np.log(np.where(p > 0, p, 1.0)), 0.0)
        return -np.sum(t, axis=axis)
    if math.isinf(alpha):
        return -np.log(np.max(p, axis=axis))
    if alpha == 2:
        return -np.log(np.sum(p * p, axis=axis))
    return np.log(np.sum(p**alpha, axis=axis)) / (1 - alpha)


def probabilities(psi) -> np.ndarray:
    return np.abs(np.asarray(psi)) ** 2


def participation_entropy(psi, alpha: float) -> float:
    """Renyi-alpha entropy of the computational-basis distribution of ``psi``."""
    return renyi_entropy(probabilities(psi), alpha)


# -- measurement ----------------------------------------------------------------

def measure_qubit(psi, j: int):
    """Computational-basis measurement of qubit ``j``.

    Returns ``[(p, post_state), ...]`` over outcomes 0 and 1, omitting
    branches of zero probability.
    """
    psi = np.asarray(psi, dtype=complex)
    n = num_qubits(psi)
    if not 0 <= j < n:
        raise ValueError(f"qubit {j} out of range for {n} qubits")
    bit = (np.arange(psi.size) >> j) & 1
    out = []
    for outcome in (0, 1):
        proj = np.where(bit == outcome, psi, 0)
        p = float(np.vdot(proj, proj).real)
        if p > 1e-15:
            out.append((p, proj / math.sqrt(p)))
    return out


def measure_pauli(psi, q: PauliString):
    """Projective measurement of a Hermitian Pauli; returns ``[(p, post_state), ...]``."""
    psi = np.asarray(psi, dtype=complex)
    qpsi = apply_pauli(psi, q)
    out = []
    for lam in (1, -1):
        proj = 0.5 * (psi + lam * qpsi)
        p = float(np.vdot(proj, proj).real)
        if p > 1e-15:
            out.append((p, proj / math.sqrt(p)))
    return out


# -- gates -----------------------------------------------------------------------

def apply_gate(psi, u, targets) -> np.ndarray:
    """Apply a ``2^m x 2^m`` unitary to ``targets``.

    The local index of ``u`` uses ``targets[0]`` as its least significant bit.
    """
    psi = np.asarray(psi, dtype=complex)
    n = num_qubits(psi)
    targets = list(targets)
    m = len(targets)
    u = np.asarray(u, dtype=complex)
    if u.shape != (1 << m, 1 << m):
        raise ValueError("gate shape does not match number of targets")
    if len(set(targets)) != m or any(not 0 <= t < n for t in targets):
        raise ValueError(f"bad targets {targets} for {n} qubits")
    t = psi.reshape((2,) * n)
    axes = [n - 1 - q for q in reversed(targets)]
    t = np.moveaxis(t, axes, range(n - m, n))
    shape = t.shape
    t = (t.reshape(-1, 1 << m) @ u.T).reshape(shape)
    t = np.moveaxis(t, range(n - m, n), axes)
    return t.reshape(-1)


def apply_pauli_rotation(psi, p: PauliString, theta: float) -> np.ndarray:
    """``exp(i theta P) psi = cos(theta) psi + i sin(theta) P psi``."""
    if not p.is_hermitian:
        raise ValueError("rotation generator must be Hermitian")
    psi = np.asarray(psi, dtype=complex)
    out = math.cos(theta) * psi + 1j * math.sin(theta) * apply_pauli(psi, p)
    return out / np.linalg.norm(out)


# -- I/O ---------------------------------------------------------------------------

def save_state(psi, path) -> None:
    """JSON list of ``[re, im]`` pairs (index order), or raw complex128 for ``.bin``."""
    path = Path(path)
    psi = np.asarray(psi, dtype=np.complex128)
    if path.suffix == ".bin":
        psi.astype("<c16").tofile(path)
    else:
        path.write_text(json.dumps([[float(a.real), float(a.imag)] for a in psi]))


def load_state(path) -> np.ndarray:
    path = Path(path)
    if path.suffix == ".bin":
        psi = np.fromfile(path, dtype="<c16")
    else:
        data = json.loads(path.read_text())
        psi = np.array([complex(re, im) for re, im in data])
    return as_state(psi, normalize=True)
