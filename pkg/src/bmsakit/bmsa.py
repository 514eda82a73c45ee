"""Basis-minimised stabilizerness asymmetry (BMSA), computed exactly.

Stabilizer bases are labelled by ``(k, Q', c, R)``: ``R`` an ``n x k`` rank-k
matrix in reduced column echelon form, ``Q'`` a strictly upper triangular
``k x k`` bit matrix and ``c`` a k-bit vector.  The basis states are

    |phi(Q_d, t)> = 2^(-k/2) sum_x (-1)^(x'Q'x + Q_d.x) i^(c.x) |R x + t>

over the diagonal bits ``Q_d`` and coset representatives ``t`` of Im(R).
For fixed ``R`` and ``t`` the overlaps with every ``Q_d`` come out of one
Walsh-Hadamard transform of length ``2^k``.

Three exact routes are provided:

* ``bmsa_bruteforce(..., backend="overlap")``: every basis, overlaps as above;
* ``bmsa_bruteforce(..., backend="pauli")``: every full-rank stabilizer group,
  from the Pauli spectrum and a Hadamard transform over the group;
* :func:`bmsa_branch_bound`: overlap route with the per-``R`` lower bound
  obtained from the amplitude moduli, plus real/positive amplitude shortcuts.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import statevec
from .f2linalg import coset_reps_for_pivots, fwht, span_table, subspace_blocks, upper_positions
from .pauli import product_phase
from .statevec import CapabilityError, renyi_entropy, renyi_entropy_batch

BRUTEFORCE_CAP = 5
BRANCH_BOUND_CAP = 10
TIE_EPS = 1e-12
_CHUNK = 1 << 21


@dataclass(frozen=True)
class StabBasisKey:
    """Label ``(k, Q', c, R)`` of one stabilizer basis on ``n`` qubits.

    ``columns`` holds the columns of ``R`` packed as ``n``-bit integers.
    """

    n: int
    k: int
    columns: tuple = ()
    qp: tuple = ()
    c: tuple = ()

    def __post_init__(self):
        k = self.k
        if len(self.columns) != k or len(self.c) != k:
            raise ValueError("key dimensions are inconsistent")
        qp = self.qp if self.qp else tuple((0,) * k for _ in range(k))
        if len(qp) != k or any(len(row) != k for row in qp):
            raise ValueError("Q' must be k x k")
        if any(qp[i][j] for i in range(k) for j in range(i + 1)):
            raise ValueError("Q' must be strictly upper triangular")
        object.__setattr__(self, "qp", tuple(tuple(int(v) for v in row) for row in qp))
        object.__setattr__(self, "c", tuple(int(v) for v in self.c))
        object.__setattr__(self, "columns", tuple(int(v) for v in self.columns))
        piv = self.pivots
        for j, col in enumerate(self.columns):
            if col >> self.n or col == 0:
                raise ValueError("column outside of register")
            # reduced column echelon form: pivot rows increase, pivot rows of
            # other columns are clear
            if any((col >> piv[i]) & 1 for i in range(k) if i != j):
                raise ValueError("R is not in reduced column echelon form")
        if list(piv) != sorted(set(piv)):
            raise ValueError("R is not in reduced column echelon form")

    @classmethod
    def computational(cls, n: int) -> "StabBasisKey":
        return cls(n, 0)

    @classmethod
    def from_indices(cls, n: int, columns, q_index: int, c_index: int) -> "StabBasisKey":
        k = len(columns)
        qp = [[0] * k for _ in range(k)]
        for b, (i, j) in enumerate(upper_positions(k, strict=True)):
            qp[i][j] = (q_index >> b) & 1
        c = [(c_index >> j) & 1 for j in range(k)]
        return cls(n, k, tuple(int(v) for v in columns), tuple(map(tuple, qp)), tuple(c))

    @classmethod
    def from_matrices(cls, R, Qp=None, c=None) -> "StabBasisKey":
        R = np.asarray(R, dtype=np.uint8)
        n, k = R.shape
        cols = tuple(int(sum(int(R[r, j]) << r for r in range(n))) for j in range(k))
        qp = tuple(map(tuple, np.asarray(Qp, dtype=int))) if Qp is not None and k else ()
        c = tuple(int(v) for v in c) if c is not None else (0,) * k
        return cls(n, k, cols, qp, c)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple((col & -col).bit_length() - 1 for col in self.columns)

    @property
    def R(self) -> np.ndarray:
        m = np.zeros((self.n, self.k), dtype=np.uint8)
        for j, col in enumerate(self.columns):
            for r in range(self.n):
                m[r, j] = (col >> r) & 1
        return m

    @property
    def Qp(self) -> np.ndarray:
        return np.array(self.qp, dtype=np.uint8).reshape(self.k, self.k)

    @property
    def q_index(self) -> int:
        return sum(self.qp[i][j] << b for b, (i, j) in enumerate(upper_positions(self.k, strict=True)))

    @property
    def c_index(self) -> int:
        return sum(v << j for j, v in enumerate(self.c))

    def label_of(self, qd: int, t: int) -> int:
        """Basis label ``y`` of the element ``(Q_d, t)``: ``Q_d`` bits sit on the pivot rows."""
        return t | sum(((qd >> j) & 1) << p for j, p in enumerate(self.pivots))

    def basis_states(self) -> np.ndarray:
        """Dense basis, column ``y`` being the state labelled ``y`` (small ``n`` only)."""
        n, k = self.n, self.k
        dim = 1 << n
        out = np.zeros((dim, dim), dtype=complex)
        piv = self.pivots
        free = [r for r in range(n) if r not in piv]
        for qd in range(1 << k):
            for tb in range(1 << len(free)):
                t = sum(((tb >> b) & 1) << r for b, r in enumerate(free))
                y = self.label_of(qd, t)
                for x in range(1 << k):
                    xb = [(x >> j) & 1 for j in range(k)]
                    quad = sum(self.qp[i][j] * xb[i] * xb[j] for i in range(k) for j in range(k))
                    quad += sum(((qd >> j) & 1) * xb[j] for j in range(k))
                    cx = sum(self.c[j] * xb[j] for j in range(k))
                    idx = t
                    for j in range(k):
                        if xb[j]:
                            idx ^= self.columns[j]
                    out[idx, y] += (-1) ** quad * 1j**cx / 2 ** (k / 2)
        return out

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "Qp": [list(row) for row in self.qp],
            "c": list(self.c),
            "R": self.R.tolist(),
        }

    @classmethod
    def from_json(cls, data, n: int | None = None) -> "StabBasisKey":
        R = np.asarray(data["R"], dtype=np.uint8)
        if R.size == 0:
            return cls(int(n if n is not None else len(data["R"])), 0)
        return cls.from_matrices(R, data["Qp"], data["c"])


@dataclass
class BasisDistribution:
    key: StabBasisKey
    probs: np.ndarray  # indexed by the basis label y


@dataclass
class BmsaResult:
    value: float
    alpha: float
    key: StabBasisKey
    method: str
    nodes_visited: int = 0
    pruned: int = 0
    bases_evaluated: int = 0
    wall_time_s: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def value_bits(self) -> float:
        return self.value / math.log(2)

    def to_json(self, tableau: bool = True, timing: bool = False) -> dict:
        out = {
            "alpha": _alpha_json(self.alpha),
            "value_nats": self.value,
            "value_bits": self.value_bits,
            "key": self.key.to_json(),
            "method": self.method,
            "nodes": {
                "visited": self.nodes_visited,
                "pruned": self.pruned,
                "bases_evaluated": self.bases_evaluated,
            },
        }
        if tableau:
            from .clifford import basis_to_tableau

            out["tableau"] = basis_to_tableau(self.key).to_json()
        if timing:
            out["wall_time_s"] = self.wall_time_s
        out.update(self.extra)
        return out


def _alpha_json(alpha):
    return "inf" if math.isinf(alpha) else alpha


# -- overlap machinery ----------------------------------------------------------

@lru_cache(maxsize=None)
def _quadratic_signs(k: int) -> np.ndarray:
    """``(-1)^(x' Q' x)`` for every strict upper ``Q'`` (rows) and ``x`` (columns)."""
    pos = upper_positions(k, strict=True)
    x = np.arange(1 << k)
    if not pos:
        return np.ones((1, 1 << k))
    pair = np.array([((x >> i) & 1) & ((x >> j) & 1) for i, j in pos], dtype=np.int64)  # (M, X)
    q = np.arange(1 << len(pos))
    qbits = (q[:, None] >> np.arange(len(pos))[None, :]) & 1  # (nq, M)
    par = (qbits @ pair) & 1
    return 1.0 - 2.0 * par


@lru_cache(maxsize=None)
def _linear_phases(k: int) -> np.ndarray:
    """Conjugated ``i^(c.x)`` (as integer sum) for every ``c`` (rows) and ``x`` (columns)."""
    x = np.arange(1 << k)
    cx = np.bitwise_count(x[None, :] & x[:, None]).astype(np.int64) % 4
    return (-1j) ** cx


def _gather(psi, cols, pivots, n):
    """``psi[R x + t]`` laid out as ``(m, T, X)`` for a batch of ``R`` (rows of ``cols``)."""
    span = span_table(cols)  # (m, X)
    t = coset_reps_for_pivots(n, pivots)  # (T,)
    return psi[span[:, None, :] ^ t[None, :, None]], t


def _overlap_probs(g, k):
    """Squared overlaps for every ``Q_d``: ``|WHT(g)|^2 / 2^k`` along the last axis."""
    return np.abs(fwht(g, axis=-1)) ** 2 / (1 << k)


def _spread_table(pivots) -> np.ndarray:
    k = len(pivots)
    a = np.arange(1 << k)
    out = np.zeros(1 << k, dtype=np.int64)
    for j, p in enumerate(pivots):
        out |= ((a >> j) & 1) << p
    return out


def distribution_for_basis(psi, key: StabBasisKey) -> BasisDistribution:
    """Squared overlaps of ``psi`` with every element of the basis ``key``."""
    psi = np.asarray(psi, dtype=complex)
    n = statevec.num_qubits(psi)
    if key.n != n:
        raise ValueError("key and state sizes differ")
    k = key.k
    vals, t = _gather(psi, np.array([key.columns], dtype=np.int64).reshape(1, k), key.pivots, n)
    vals = vals[0]  # (T, X)
    phase = _quadratic_signs(k)[key.q_index] * _linear_phases(k)[key.c_index]
    p = _overlap_probs(vals * phase[None, :], k)  # (T, Qd)
    probs = np.empty(1 << n)
    labels = t[:, None] | _spread_table(key.pivots)[None, :]
    probs[labels] = p
    return BasisDistribution(key, probs)


def bound_for_R(psi, R, alpha: float, assume_alpha1_bound: bool = False) -> float:
    """Lower bound on ``min_{Q',c} S_alpha`` for the column space ``R``.

    Entropy of the basis ``Q'=0, c=0`` evaluated on the amplitude moduli of
    ``psi``.  Proven for integer ``alpha >= 2`` and ``alpha = inf``; ``alpha = 1``
    only with ``assume_alpha1_bound``.
    """
    _check_bound_alpha(alpha, assume_alpha1_bound)
    psi = np.asarray(psi, dtype=complex)
    n = statevec.num_qubits(psi)
    if isinstance(R, StabBasisKey):
        cols, piv = R.columns, R.pivots
    else:
        key = StabBasisKey.from_matrices(R)
        cols, piv = key.columns, key.pivots
    k = len(cols)
    vals, _ = _gather(np.abs(psi), np.array([cols], dtype=np.int64).reshape(1, k), piv, n)
    return renyi_entropy(_overlap_probs(vals[0], k), alpha)


def _check_bound_alpha(alpha, assume_alpha1_bound):
    if math.isinf(alpha):
        return
    if alpha == 1 and assume_alpha1_bound:
        return
    if alpha >= 2 and float(alpha).is_integer():
        return
    raise ValueError(
        f"the per-R lower bound is only established for integer alpha >= 2 or alpha = inf "
        f"(alpha = 1 needs assume_alpha1_bound); got alpha = {alpha}"
    )


# -- search -----------------------------------------------------------------------

@dataclass
class _Incumbent:
    value: float
    key: StabBasisKey
    evaluated: int = 0

    def offer(self, value, make_key):
        if value < self.value - TIE_EPS:
            self.value = float(value)
            self.key = make_key()
            return True
        return False


def _snap(value: float) -> float:
    """Round-off below 1e-12 is reported as an exact zero."""
    return 0.0 if abs(value) < 1e-12 else float(value)


def _detect_phase_class(psi, tol=1e-12):
    """``(real, positive)`` flags of ``psi`` modulo a global phase."""
    i = int(np.argmax(np.abs(psi)))
    ph = psi[i] / abs(psi[i])
    v = psi / ph
    real = bool(np.all(np.abs(v.imag) <= tol))
    positive = real and bool(np.all(v.real >= -tol))
    return real, positive, v


def _evaluate_R(vals, k, alpha, n_q, c_values, best, make_key_base, counter):
    """Best ``(Q', c)`` for one ``R``; ``vals`` is ``psi[R x + t]`` shaped ``(T, X)``."""
    T, X = vals.shape
    qsigns = _quadratic_signs(k)
    cph = _linear_phases(k)[c_values]  # (nc, X)
    nc = len(c_values)
    step = max(1, _CHUNK // (nc * T * X))
    for lo in range(0, n_q, step):
        qs = qsigns[lo : min(lo + step, n_q)]
        phase = qs[:, None, :] * cph[None, :, :]  # (bq, nc, X)
        g = phase[:, :, None, :] * vals[None, None, :, :]
        ent = renyi_entropy_batch(_overlap_probs(g, k), alpha, axis=(-2, -1))  # (bq, nc)
        counter[0] += ent.size
        flat = int(np.argmin(ent))
        qi, ci = divmod(flat, nc)
        best.offer(ent.flat[flat], lambda: make_key_base(lo + qi, int(c_values[ci])))


def _search(psi, alpha, prune, real, positive, assume_alpha1_bound, method):
    psi = np.asarray(psi, dtype=complex)
    n = statevec.num_qubits(psi)
    t0 = time.perf_counter()
    best = _Incumbent(renyi_entropy(np.abs(psi) ** 2, alpha), StabBasisKey.computational(n), 1)
    counter = [1]
    visited = pruned = 0
    abs_psi = np.abs(psi)
    for k in range(1, n + 1):
        n_q = 1 << (k * (k - 1) // 2)
        c_values = np.array([0]) if real else np.arange(1 << k)
        for pivots, block in subspace_blocks(n, k):
            step = max(1, _CHUNK // (1 << n))
            for lo in range(0, len(block), step):
                cols = block[lo : lo + step]
                if prune or positive:
                    avals, _ = _gather(abs_psi, cols, pivots, n)
                    bounds = renyi_entropy_batch(_overlap_probs(avals, k), alpha, axis=(-2, -1))
                if positive:
                    # bound attained by Q'=0, c=0 on nonnegative amplitudes
                    visited += len(cols)
                    counter[0] += len(cols)
                    i = int(np.argmin(bounds))
                    best.offer(bounds[i], lambda: StabBasisKey.from_indices(n, cols[i], 0, 0))
                    continue
                vals, _ = _gather(psi, cols, pivots, n)
                for i in range(len(cols)):
                    visited += 1
                    if prune and bounds[i] >= best.value - TIE_EPS:
                        pruned += 1
                        continue
                    col_i = cols[i]
                    _evaluate_R(
                        vals[i],
                        k,
                        alpha,
                        n_q,
                        c_values,
                        best,
                        lambda q, c, col_i=col_i: StabBasisKey.from_indices(n, col_i, q, c),
                        counter,
                    )
    return BmsaResult(
        value=_snap(best.value),
        alpha=alpha,
        key=best.key,
        method=method,
        nodes_visited=visited,
        pruned=pruned,
        bases_evaluated=counter[0],
        wall_time_s=time.perf_counter() - t0,
    )


def bmsa_branch_bound(
    psi,
    alpha: float,
    assume_alpha1_bound: bool = True,
    real_amplitudes: bool | None = None,
    positive_amplitudes: bool | None = None,
    verify: bool = False,
    cap: int = BRANCH_BOUND_CAP,
) -> BmsaResult:
    """Exact BMSA by branch and bound over the column spaces ``R``.

    ``real_amplitudes``/``positive_amplitudes`` default to auto-detection
    (modulo a global phase).  Real amplitudes restrict the search to
    ``c = 0``; nonnegative amplitudes make the per-``R`` bound exact, so only
    ``R`` is enumerated.  ``verify`` re-runs an unpruned search (``n <= 4``)
    and raises if the two disagree.
    """
    _check_bound_alpha(alpha, assume_alpha1_bound)
    psi = statevec.as_state(psi)
    n = statevec.num_qubits(psi)
    if n > cap:
        raise CapabilityError(f"branch and bound capped at {cap} qubits (got {n})")
    real, positive, rotated = _detect_phase_class(psi)
    if real_amplitudes is not None:
        real = bool(real_amplitudes)
    if positive_amplitudes is not None:
        positive = bool(positive_amplitudes)
    work = rotated if (real or positive) else psi
    res = _search(work, alpha, True, real or positive, positive, assume_alpha1_bound, "branch-bound")
    res.extra = {"real_amplitudes": real, "positive_amplitudes": positive}
    if verify:
        if n > 4:
            raise CapabilityError("verification re-runs the unpruned search; n <= 4 only")
        ref = _search(psi, alpha, False, False, False, True, "bruteforce-overlap")
        if abs(ref.value - res.value) > 1e-9:
            raise AssertionError(
                f"branch and bound ({res.value}) disagrees with unpruned search ({ref.value})"
            )
        res.extra["verified"] = True
    return res


def bmsa_bruteforce(psi, alpha: float, backend: str = "overlap", cap: int = BRUTEFORCE_CAP) -> BmsaResult:
    """Exact BMSA by exhaustive minimisation over all stabilizer bases."""
    psi = statevec.as_state(psi)
    n = statevec.num_qubits(psi)
    if n > cap:
        raise CapabilityError(f"brute force capped at {cap} qubits (got {n})")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if backend == "overlap":
        return _search(psi, alpha, False, False, False, True, "bruteforce-overlap")
    if backend == "pauli":
        return _pauli_search(psi, alpha)
    raise ValueError(f"unknown backend {backend!r}")


def bmsa(psi, alpha: float = 1.0, method: str = "auto", **kw) -> BmsaResult:
    """Convenience front end: ``method`` in ``auto, brute, pauli, bb``."""
    if method == "auto":
        try:
            _check_bound_alpha(alpha, kw.get("assume_alpha1_bound", True))
            method = "bb"
        except ValueError:
            method = "brute"
    if method == "bb":
        return bmsa_branch_bound(psi, alpha, **kw)
    if method == "brute":
        return bmsa_bruteforce(psi, alpha, "overlap")
    if method == "pauli":
        return bmsa_bruteforce(psi, alpha, "pauli")
    raise ValueError(f"unknown method {method!r}")


# -- Pauli-vector route -------------------------------------------------------------

def group_generators(key: StabBasisKey):
    """Unsigned generators ``(x, z)`` of the stabilizer group of the basis ``key``.

    Pivot columns first (in column order), then the remaining rows.
    """
    n, k = key.n, key.k
    piv = key.pivots
    gens = []
    for j in range(k):
        z = key.c[j] << piv[j]
        for l in range(k):
            if l != j and (key.qp[min(j, l)][max(j, l)]):
                z |= 1 << piv[l]
        gens.append((key.columns[j], z))
    for r in range(n):
        if r in piv:
            continue
        z = 1 << r
        for j in range(k):
            if (key.columns[j] >> r) & 1:
                z |= 1 << piv[j]
        gens.append((0, z))
    return gens


def _group_batches(n: int):
    """Yield ``(cols, q_idx, c_idx, ex, ez, eph)`` per ``R``, vectorised over ``(Q', c)``.

    ``ex, ez, eph`` have shape ``(B, 2^n)``: the elements ``g_1^u1 ... g_n^un``
    of each full-rank group and the phase exponent of the ordered product
    relative to the Hermitian string with the same bits.
    """
    for k in range(n + 1):
        npairs = k * (k - 1) // 2
        pos = upper_positions(k, strict=True)
        q = np.arange(1 << npairs)
        c = np.arange(1 << k)
        qq, cc = np.meshgrid(q, c, indexing="ij")
        qq, cc = qq.ravel(), cc.ravel()
        for pivots, block in subspace_blocks(n, k):
            free = [r for r in range(n) if r not in pivots]
            for cols in block:
                gx, gz = [], []
                for j in range(k):
                    z = ((cc >> j) & 1) << pivots[j]
                    for b, (a1, a2) in enumerate(pos):
                        if j in (a1, a2):
                            other = a2 if j == a1 else a1
                            z = z | (((qq >> b) & 1) << pivots[other])
                    gx.append(np.full(qq.shape, int(cols[j]), dtype=np.int64))
                    gz.append(z.astype(np.int64))
                for r in free:
                    z = 1 << r
                    for j in range(k):
                        if (int(cols[j]) >> r) & 1:
                            z |= 1 << pivots[j]
                    gx.append(np.zeros(qq.shape, dtype=np.int64))
                    gz.append(np.full(qq.shape, z, dtype=np.int64))
                ex = np.zeros((qq.size, 1), dtype=np.int64)
                ez = np.zeros((qq.size, 1), dtype=np.int64)
                eph = np.zeros((qq.size, 1), dtype=np.int64)
                for j in range(n):
                    bx, bz = gx[j][:, None], gz[j][:, None]
                    ph = (eph + product_phase(ex, ez, bx, bz)) % 4
                    ex = np.concatenate([ex, ex ^ bx], axis=1)
                    ez = np.concatenate([ez, ez ^ bz], axis=1)
                    eph = np.concatenate([eph, ph], axis=1)
                yield tuple(int(v) for v in cols), qq, cc, ex, ez, eph


def _pauli_search(psi, alpha):
    n = statevec.num_qubits(psi)
    t0 = time.perf_counter()
    b = statevec.pauli_spectrum(psi)
    best = None
    count = 0
    for cols, qq, cc, ex, ez, eph in _group_batches(n):
        if np.any(eph % 2):
            raise AssertionError("non-Hermitian group element")
        cvec = (1 - eph) * b[ex | (ez << n)]  # signed expectations c_u
        d = fwht(cvec, axis=-1) / (1 << n)
        d = np.clip(d, 0.0, None)
        ent = renyi_entropy_batch(d, alpha, axis=-1)
        count += ent.size
        i = int(np.argmin(ent))
        if best is None or ent[i] < best.value - TIE_EPS:
            key = StabBasisKey.from_indices(n, cols, int(qq[i]), int(cc[i]))
            best = _Incumbent(float(ent[i]), key)
    return BmsaResult(
        value=_snap(best.value),
        alpha=alpha,
        key=best.key,
        method="bruteforce-pauli",
        bases_evaluated=count,
        nodes_visited=count,
        wall_time_s=time.perf_counter() - t0,
    )


def a2_lin_exact(psi, cap: int = BRUTEFORCE_CAP) -> float:
    """``min_G 1 - sum_{P in G} <P>^2 / 2^n`` over full-rank stabilizer groups."""
    psi = statevec.as_state(psi)
    n = statevec.num_qubits(psi)
    if n > cap:
        raise CapabilityError(f"a2_lin_exact capped at {cap} qubits (got {n})")
    b2 = statevec.pauli_spectrum(psi) ** 2
    best = 0.0
    for _, _, _, ex, ez, _ in _group_batches(n):
        best = max(best, float(np.max(b2[ex | (ez << n)].sum(axis=-1))))
    return 1.0 - best / (1 << n)


def min_over_groups(weights, n: int) -> tuple[float, StabBasisKey]:
    """``min_G -ln sum_{P in G} w(P)`` for a nonnegative function on Pauli indices."""
    best, best_key = -np.inf, None
    for cols, qq, cc, ex, ez, _ in _group_batches(n):
        s = weights[ex | (ez << n)].sum(axis=-1)
        i = int(np.argmax(s))
        if s[i] > best + TIE_EPS:
            best, best_key = float(s[i]), StabBasisKey.from_indices(n, cols, int(qq[i]), int(cc[i]))
    return -math.log(best), best_key


def iter_bases(n: int):
    """Every stabilizer basis key on ``n`` qubits, in search order."""
    yield StabBasisKey.computational(n)
    for k in range(1, n + 1):
        n_q = 1 << (k * (k - 1) // 2)
        for _, block in subspace_blocks(n, k):
            for cols in block:
                for q in range(n_q):
                    for c in range(1 << k):
                        yield StabBasisKey.from_indices(n, cols, q, c)


def max_overlap(psi, cap: int = BRUTEFORCE_CAP):
    """Largest squared overlap with any stabilizer state: ``(F, key, label)``."""
    psi = statevec.as_state(psi)
    n = statevec.num_qubits(psi)
    if n > cap:
        raise CapabilityError(
            f"exhaustive stabilizer fidelity capped at {cap} qubits (got {n}); "
            "use bmsa_branch_bound with alpha=inf"
        )
    res = _search(psi, math.inf, False, False, False, True, "bruteforce-overlap")
    dist = distribution_for_basis(psi, res.key)
    y = int(np.argmax(dist.probs))
    return float(dist.probs[y]), res.key, y
