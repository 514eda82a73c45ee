"""Heuristic BMSA upper bounds by simulated annealing over Clifford circuits.

The chain state is ``C_ref psi``.  A move picks, for one neighbouring pair
``(j, j+1)``, one of the 15 cosets ``C_z g`` of the diagonal two-qubit
Cliffords (the participation entropy only depends on the coset) by heat-bath
sampling, and updates ``C_ref -> h g C_ref`` with ``h`` a uniformly random
diagonal Clifford on the pair.  The entropy ignores ``h``, but without it the
chain could never apply the permutations and phases (SWAP, CZ, S, ...) that
sit in the identity coset, and gets trapped on entropy plateaus.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import clifford, statevec
from .clifford import CliffordTableau
from .statevec import CapabilityError, renyi_entropy, renyi_entropy_batch

ANNEAL_CAP = 14


def default_temperatures() -> tuple[float, ...]:
    return tuple(np.geomspace(1e-1, 1e-4, 16))


@dataclass
class AnnealConfig:
    alpha: float = 1.0
    temperatures: tuple = field(default_factory=default_temperatures)
    sweeps_per_temperature: int = 2
    seed: int = 0
    initial_tableau: CliffordTableau | None = None
    restarts: int = 4

    def __post_init__(self):
        temps = tuple(float(t) for t in self.temperatures)
        if not temps:
            raise ValueError("empty temperature grid")
        if any(t <= 0 for t in temps) or any(b >= a for a, b in zip(temps, temps[1:])):
            raise ValueError("temperatures must be positive and strictly descending")
        if self.sweeps_per_temperature < 1 or self.restarts < 1:
            raise ValueError("sweeps_per_temperature and restarts must be >= 1")
        self.temperatures = temps


@dataclass
class AnnealResult:
    best_value: float
    best_tableau: CliffordTableau
    trace: list  # (sweep, temperature, best value so far)
    accepted_moves: int
    alpha: float

    def to_json(self) -> dict:
        return {
            "alpha": "inf" if math.isinf(self.alpha) else self.alpha,
            "best_value_nats": self.best_value,
            "best_value_bits": self.best_value / math.log(2),
            "accepted_moves": self.accepted_moves,
            "best_tableau": self.best_tableau.to_json(),
        }

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["sweep", "temperature", "best_value"])
        for row in self.trace:
            w.writerow([row[0], repr(row[1]), repr(row[2])])
        return buf.getvalue()


def _candidates(cur, n, j, unitaries):
    """All coset moves on the pair ``(j, j+1)``: shape ``(15, 2^n)``."""
    hi = 1 << (n - j - 2)
    lo = 1 << j
    c = cur.reshape(hi, 4, lo)
    return np.einsum("kab,hbl->khal", unitaries, c).reshape(len(unitaries), -1)


def _apply_pair(vec, n, j, u):
    c = vec.reshape(1 << (n - j - 2), 4, 1 << j)
    return np.einsum("ab,hbl->hal", u, c).reshape(-1)


def _chain(psi, n, cfg, rng, unitaries, diag_unitaries, embedded):
    c_ref = cfg.initial_tableau if cfg.initial_tableau is not None else CliffordTableau.identity(n)
    if c_ref.n != n:
        raise ValueError("initial tableau size does not match the state")
    cur = clifford.apply_to_state(c_ref, psi) if cfg.initial_tableau is not None else psi.copy()
    s_cur = renyi_entropy(np.abs(cur) ** 2, cfg.alpha)
    best, best_ref = s_cur, c_ref
    trace = []
    accepted = 0
    sweep = 0
    for temp in cfg.temperatures:
        for _ in range(cfg.sweeps_per_temperature):
            for j in range(n - 1):
                cand = _candidates(cur, n, j, unitaries)
                ent = renyi_entropy_batch(np.abs(cand) ** 2, cfg.alpha)
                w = np.exp(-(ent - ent.min()) / temp)
                i = int(rng.choice(len(w), p=w / w.sum()))
                h = int(rng.integers(len(diag_unitaries)))
                accepted += i != 0  # index 0 is the identity coset
                cur = _apply_pair(cand[i], n, j, diag_unitaries[h])
                s_cur = float(ent[i])
                c_ref = clifford.compose(embedded(h, i, j), c_ref)
                if s_cur < best:
                    best, best_ref = s_cur, c_ref
            trace.append((sweep, temp, best))
            sweep += 1
    return best, best_ref, trace, accepted


def anneal_minimize(psi, config: AnnealConfig | None = None) -> AnnealResult:
    """Minimise the participation entropy of ``C psi`` over Clifford circuits ``C``.

    Returns the lowest entropy seen; ``best_tableau`` is ``C^dagger`` so that
    ``participation_entropy(best_tableau^dagger psi) == best_value``.
    """
    cfg = config or AnnealConfig()
    psi = statevec.as_state(psi)
    n = statevec.num_qubits(psi)
    if n > ANNEAL_CAP:
        raise CapabilityError(f"annealing capped at {ANNEAL_CAP} qubits (got {n})")
    if n < 2:
        raise ValueError("annealing needs at least two qubits")
    reps = clifford.two_qubit_coset_reps()
    diag = clifford.diagonal_subgroup()
    unitaries = clifford.two_qubit_coset_unitaries()
    diag_unitaries = clifford.diagonal_subgroup_unitaries()
    cache: dict = {}

    def embedded(h, i, j):
        if (h, i, j) not in cache:
            cache[h, i, j] = clifford.embed(clifford.compose(diag[h], reps[i]), (j, j + 1), n)
        return cache[h, i, j]

    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    best = None
    for r, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        value, c_ref, trace, accepted = _chain(psi, n, cfg, rng, unitaries, diag_unitaries, embedded)
        if best is None or value < best[0]:
            best = (value, c_ref, trace, accepted)
    value, c_ref, trace, accepted = best
    return AnnealResult(value, clifford.inverse(c_ref), trace, accepted, cfg.alpha)
