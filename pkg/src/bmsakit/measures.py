"""Magic measures that need no basis minimisation (plus a few that enumerate groups).

All values are in nats unless stated otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bmsa as _bmsa
from . import statevec
from .f2linalg import fwht, rank
from .pauli import PauliString, product_phase, symplectic_product
from .statevec import CapabilityError, renyi_entropy

CONV_CAP = 6


@dataclass
class MeasureResult:
    measure: str
    value: float
    params: dict = field(default_factory=dict)
    certificate: dict | None = None

    @property
    def value_bits(self) -> float:
        return self.value / math.log(2)

    def to_json(self) -> dict:
        return {
            "measure": self.measure,
            "params": self.params,
            "value_nats": self.value,
            "value_bits": self.value_bits,
            "certificate": self.certificate,
        }


# -- stabilizer Renyi entropies ------------------------------------------------------

def sre(psi, n: float = 2.0, linear: bool = False) -> float:
    """Stabilizer Renyi entropy ``M_n`` (nats), or its linear version.

    ``M_n = (1-n)^-1 ln sum_P <P>^(2n) / 2^N``; the linear version is
    ``1 - sum_P <P>^(2n) / 2^N``.  ``n = 1`` is the Shannon limit.  Only
    ``n >= 2`` carries monotonicity guarantees; other orders are computed all
    the same.
    """
    if n <= 0:
        raise ValueError("SRE order must be > 0")
    psi = statevec.as_state(psi)
    nq = statevec.num_qubits(psi)
    b2 = statevec.pauli_spectrum(psi) ** 2
    xi = b2 / (1 << nq)
    if linear:
        return 1.0 - float(np.sum(b2**n)) / (1 << nq)
    return renyi_entropy(xi, n) - nq * math.log(2)


# -- stabilizer groups ----------------------------------------------------------------

@dataclass(frozen=True)
class StabilizerGroupGens:
    """Independent, mutually commuting unsigned Pauli generators (``k <= n``)."""

    gens: tuple

    def __post_init__(self):
        gens = tuple(PauliString(g.n, g.x, g.z) for g in self.gens)
        if not gens:
            raise ValueError("need at least one generator")
        n = gens[0].n
        if any(g.n != n for g in gens):
            raise ValueError("generators act on different qubit counts")
        for i, a in enumerate(gens):
            for b in gens[i + 1 :]:
                if a.commutes(b):
                    raise ValueError(f"generators {a.label()} and {b.label()} anticommute")
        rows = [[(g.x >> j) & 1 for j in range(n)] + [(g.z >> j) & 1 for j in range(n)] for g in gens]
        if rank(rows) != len(gens):
            raise ValueError("generators are not independent")
        object.__setattr__(self, "gens", gens)

    @classmethod
    def from_labels(cls, labels) -> "StabilizerGroupGens":
        return cls(tuple(PauliString.from_label(s) for s in labels))

    @classmethod
    def from_key(cls, key) -> "StabilizerGroupGens":
        """Stabilizer group of the basis labelled by a :class:`StabBasisKey`."""
        return cls(tuple(PauliString(key.n, x, z) for x, z in _bmsa.group_generators(key)))

    @property
    def n(self) -> int:
        return self.gens[0].n

    @property
    def k(self) -> int:
        return len(self.gens)

    def elements(self):
        """``(x, z, phase)`` arrays of ``g_1^u1 ... g_k^uk`` indexed by ``u``."""
        ex = np.zeros(1, dtype=np.int64)
        ez = np.zeros(1, dtype=np.int64)
        eph = np.zeros(1, dtype=np.int64)
        for g in self.gens:
            ph = (eph + product_phase(ex, ez, g.x, g.z)) % 4
            ex = np.concatenate([ex, ex ^ g.x])
            ez = np.concatenate([ez, ez ^ g.z])
            eph = np.concatenate([eph, ph])
        return ex, ez, eph


def group_distribution(psi, G: StabilizerGroupGens) -> np.ndarray:
    """Probabilities of the ``2^k`` joint eigenvalue patterns of the generators."""
    psi = statevec.as_state(psi)
    n = statevec.num_qubits(psi)
    if G.n != n:
        raise ValueError("group and state sizes differ")
    b = statevec.pauli_spectrum(psi)
    ex, ez, eph = G.elements()
    c = (1 - eph) * b[ex | (ez << n)]
    d = fwht(c) / (1 << G.k)
    return np.clip(d, 0.0, None)


def g_asymmetry(psi, G: StabilizerGroupGens, alpha: float) -> float:
    """Renyi-alpha G-asymmetry of a pure state: entropy of its G-twirl."""
    return renyi_entropy(group_distribution(psi, G), alpha)


def g_asymmetry_renyi2_pauli(psi, G: StabilizerGroupGens) -> float:
    """Renyi-2 G-asymmetry from the Paulis commuting with every generator."""
    psi = statevec.as_state(psi)
    n = statevec.num_qubits(psi)
    b2 = statevec.pauli_spectrum(psi) ** 2
    idx = np.arange(4**n)
    x, z = idx & ((1 << n) - 1), idx >> n
    keep = np.ones(idx.size, dtype=bool)
    for g in G.gens:
        keep &= symplectic_product(x, z, g.x, g.z) == 0
    return -math.log(b2[keep].sum() / b2.sum())


# -- stabilizer fidelity / nullity ----------------------------------------------------

def stabilizer_fidelity(psi, cap: int = _bmsa.BRUTEFORCE_CAP) -> MeasureResult:
    """Largest squared overlap with a stabilizer state, by exhaustive search."""
    f, key, y = _bmsa.max_overlap(psi, cap=cap)
    return MeasureResult("stabilizer_fidelity", f, {}, {"key": key.to_json(), "label": y})


def d_min(psi, cap: int = _bmsa.BRUTEFORCE_CAP) -> float:
    return -math.log(stabilizer_fidelity(psi, cap).value)


def nullity(psi, tol: float = 1e-8) -> int:
    """``N - log2 |{P : |<P>| >= 1 - tol}|``; the counted set must form a group."""
    psi = statevec.as_state(psi)
    n = statevec.num_qubits(psi)
    b = statevec.pauli_spectrum(psi)
    sel = np.nonzero(np.abs(b) >= 1 - tol)[0]
    size = sel.size
    if size & (size - 1):
        raise ValueError(f"{size} Paulis with |<P>| ~ 1 is not a power of two; adjust tol")
    # unsigned products are xors of indices
    if not np.all(np.isin(sel[:, None] ^ sel[None, :], sel)):
        raise ValueError("Paulis with |<P>| ~ 1 do not close under products; adjust tol")
    return n - (size.bit_length() - 1)


# -- convolved characteristic function ----------------------------------------------

def characteristic(psi) -> np.ndarray:
    """``Xi(a) = <P_a>^2 / 2^N`` over the ``4^N`` Pauli indices."""
    psi = statevec.as_state(psi)
    return statevec.pauli_spectrum(psi) ** 2 / psi.size


def bell_distribution(psi) -> np.ndarray:
    """``|<psi|P_a|psi*>|^2 / 2^N``, a probability distribution over Pauli indices."""
    psi = statevec.as_state(psi)
    return np.abs(statevec.pauli_overlaps(psi, np.conj(psi))) ** 2 / psi.size


def self_convolution(f) -> np.ndarray:
    """``sum_a f(a) f(a xor b)`` over ``2N``-bit indices."""
    f = np.asarray(f, dtype=float)
    return fwht(fwht(f) ** 2) / f.size


def convolved_spectrum(psi, cap: int = CONV_CAP) -> np.ndarray:
    """``Q(b) = sum_a Xi(a) Xi(a xor b)``."""
    n = statevec.num_qubits(psi)
    if n > cap:
        raise CapabilityError(f"convolved_spectrum capped at {cap} qubits (got {n})")
    return self_convolution(characteristic(psi))


def a2_conv(psi, cap: int = 3) -> MeasureResult:
    """``min_G -ln sum_{P in G} Q(P)`` over full-rank unsigned stabilizer groups."""
    n = statevec.num_qubits(psi)
    if n > cap:
        raise CapabilityError(f"a2_conv capped at {cap} qubits (got {n})")
    q = np.clip(convolved_spectrum(psi), 0.0, None)
    value, key = _bmsa.min_over_groups(q, n)
    return MeasureResult("a2_conv", max(value, 0.0), {}, {"key": key.to_json()})
