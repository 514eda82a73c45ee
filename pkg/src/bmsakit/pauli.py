"""Pauli strings in the symplectic (x|z) representation.

A Pauli string on ``n`` qubits is stored as two ``n``-bit integers ``x`` and
``z`` plus a phase exponent ``phase`` (power of ``i``, mod 4).  Bit ``j`` of
``x``/``z`` refers to qubit ``j``.  Per qubit the operator is

    P(x_j, z_j) = i^(x_j z_j) X^x_j Z^z_j

so ``(1, 1)`` is the ordinary Hermitian ``Y`` and every string with
``phase == 0`` is Hermitian with eigenvalues +-1.

The integer index of an unsigned string is ``x | (z << n)``; this fixes the
ordering of Pauli spectra everywhere in the package.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

_PREFIX = {0: "", 1: "+i", 2: "-", 3: "-i"}
_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {v: k for k, v in _LETTER.items()}

_I2 = np.eye(2, dtype=complex)
_X2 = np.array([[0, 1], [1, 0]], dtype=complex)
_Z2 = np.array([[1, 0], [0, -1]], dtype=complex)


def popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a Pauli string needs at least one qubit")
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError(f"bits outside of {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    # -- construction -------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def from_index(cls, index: int, n: int) -> "PauliString":
        mask = (1 << n) - 1
        return cls(n, index & mask, (index >> n) & mask)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse labels such as ``"XIZ"``, ``"-YY"`` or ``"+iXZ"``.

        Character ``j`` of the body acts on qubit ``j``.
        """
        body = label.strip()
        phase = 0
        for pre, ph in (("-i", 3), ("+i", 1), ("i", 1), ("-", 2), ("+", 0)):
            if body.startswith(pre):
                body, phase = body[len(pre):], ph
                break
        if not body:
            raise ValueError(f"empty Pauli label {label!r}")
        x = z = 0
        for j, ch in enumerate(body):
            try:
                xb, zb = _BITS[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli character {ch!r} in {label!r}") from None
            x |= xb << j
            z |= zb << j
        return cls(len(body), x, z, phase)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliString":
        xb, zb = _BITS[letter]
        return cls(n, xb << qubit, zb << qubit)

    # -- views --------------------------------------------------------
    @property
    def index(self) -> int:
        return self.x | (self.z << self.n)

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def weight(self) -> int:
        return popcount(self.x | self.z)

    def unsigned(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z)

    def label(self) -> str:
        body = "".join(
            _LETTER[((self.x >> j) & 1, (self.z >> j) & 1)] for j in range(self.n)
        )
        return _PREFIX[self.phase] + body

    def __str__(self) -> str:
        return self.label()

    def to_matrix(self) -> np.ndarray:
        """Dense ``2^n x 2^n`` matrix, qubit 0 being the least significant bit."""
        factors = []
        for j in range(self.n):
            xb, zb = (self.x >> j) & 1, (self.z >> j) & 1
            m = (1j ** (xb * zb)) * (np.linalg.matrix_power(_X2, xb) @ np.linalg.matrix_power(_Z2, zb))
            factors.append(m)
        # kron puts its first argument on the most significant bit
        return (1j ** self.phase) * reduce(np.kron, factors[::-1])

    # -- algebra ------------------------------------------------------
    def _check(self, other: "PauliString"):
        if self.n != other.n:
            raise ValueError(f"qubit count mismatch: {self.n} vs {other.n}")

    def commutes(self, other: "PauliString") -> int:
        """Symplectic product: 0 if the strings commute, 1 if they anticommute."""
        self._check(other)
        return popcount((self.x & other.z) ^ (self.z & other.x)) & 1

    def multiply(self, other: "PauliString") -> "PauliString":
        self._check(other)
        x, z = self.x ^ other.x, self.z ^ other.z
        # Z^z1 X^x2 = (-1)^(z1 x2) X^x2 Z^z1, then re-absorb the i^(xz) factors
        phase = (
            self.phase
            + other.phase
            + popcount(self.x & self.z)
            + popcount(other.x & other.z)
            + 2 * popcount(self.z & other.x)
            - popcount(x & z)
        )
        return PauliString(self.n, x, z, phase)

    __mul__ = multiply

    def tensor(self, other: "PauliString") -> "PauliString":
        """``self`` on the low qubits, ``other`` on the following ones."""
        return PauliString(
            self.n + other.n,
            self.x | (other.x << self.n),
            self.z | (other.z << self.n),
            self.phase + other.phase,
        )


def commutes(a: PauliString, b: PauliString) -> int:
    return a.commutes(b)


def multiply(a: PauliString, b: PauliString) -> PauliString:
    return a.multiply(b)


def parse(label: str) -> PauliString:
    return PauliString.from_label(label)


def render(p: PauliString) -> str:
    return p.label()


def all_paulis(n: int):
    """Every unsigned Pauli string on ``n`` qubits, in index order."""
    for idx in range(4**n):
        yield PauliString.from_index(idx, n)


def symplectic_product(xa, za, xb, zb):
    """Vectorised commutation parity for integer (or integer-array) bit masks."""
    return np.bitwise_count(np.bitwise_xor(np.bitwise_and(xa, zb), np.bitwise_and(za, xb))) & 1


def product_phase(xa, za, xb, zb):
    """Phase exponent (mod 4) picked up by ``P(xa,za) P(xb,zb)``; vectorised."""
    bc = np.bitwise_count
    xc = np.bitwise_xor(xa, xb)
    zc = np.bitwise_xor(za, zb)
    ph = (
        bc(np.bitwise_and(xa, za)).astype(np.int64)
        + bc(np.bitwise_and(xb, zb))
        + 2 * bc(np.bitwise_and(za, xb)).astype(np.int64)
        - bc(np.bitwise_and(xc, zc))
    )
    return ph % 4
