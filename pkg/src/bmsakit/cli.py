"""Command-line interface.

Subcommands: ``measure``, ``scan-product``, ``scan-ising``,
``check-inequalities``, ``sim`` and ``doped-circuit``.  Every command prints a
JSON run record (default) or a CSV table.  Exit codes: 0 ok, 2 capability or
validation error, 3 property violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
import time

import numpy as np

from . import __version__, anneal, bmsa, clifford, measures, simkit, statevec
from .statevec import CapabilityError

EXIT_OK, EXIT_INVALID, EXIT_VIOLATION = 0, 2, 3
LN2 = math.log(2)
CSV_VERSION = "bmsakit-csv/1"


class PropertyViolation(RuntimeError):
    pass


# -- parsing helpers -------------------------------------------------------------------

_PI_RE = re.compile(r"^\s*([-+]?[\d.]*)\s*\*?\s*pi\s*(?:/\s*([\d.]+))?\s*$")


def parse_real(text: str) -> float:
    """Float, ``inf``, or multiples of pi such as ``pi/8`` or ``3pi/4``."""
    text = str(text).strip()
    m = _PI_RE.match(text)
    if m:
        num = m.group(1)
        coef = -1.0 if num == "-" else 1.0 if num in ("", "+") else float(num)
        return coef * math.pi / (float(m.group(2)) if m.group(2) else 1.0)
    return float(text)


def parse_alpha_list(text: str) -> list[float]:
    return [parse_real(a) for a in str(text).split(",")]


def parse_int_range(text: str) -> list[int]:
    """``"2:6"`` (inclusive), ``"2,4,8"`` or ``"5"``."""
    text = str(text)
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",")]


def parse_real_grid(text: str) -> list[float]:
    """``"0.7:1.3:0.1"`` (inclusive, rounded to 12 digits) or a comma list."""
    text = str(text)
    if text.count(":") == 2:
        lo, hi, step = (parse_real(v) for v in text.split(":"))
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [round(lo + i * step, 12) for i in range(count)]
    return [parse_real(v) for v in text.split(",")]


def load_state_source(source: str, seed: int):
    """Resolve ``--state``; returns ``(psi, metadata)``."""
    rng = np.random.default_rng(seed)
    parts = source.split(":")
    name, args = parts[0], parts[1:]
    try:
        if name == "w":
            psi = simkit.w_state(int(args[0]))
        elif name == "chi":
            psi = simkit.chi_state()
        elif name == "theta":
            psi = simkit.product_theta_state(int(args[1]), parse_real(args[0]))
        elif name == "ising":
            bc = args[2] if len(args) > 2 else "open"
            psi = simkit.ising_ground_state(int(args[0]), parse_real(args[1]), bc)
        elif name == "gue":
            psi = simkit.gue_evolved(int(args[0]), parse_real(args[1]), rng)
        elif name == "doped":
            psi = simkit.doped_clifford_state(int(args[0]), int(args[1]), rng)
        elif name == "psieps":
            psi = simkit.psi_eps(int(args[0]), parse_real(args[1]))
        elif name == "stab-random":
            psi = simkit.random_stabilizer_state(int(args[0]), rng)
        elif name == "haar":
            psi = statevec.random_state(int(args[0]), rng)
        elif name == "file":
            psi = statevec.load_state(":".join(args))
        elif source.endswith((".json", ".bin")):
            psi = statevec.load_state(source)
        else:
            raise ValueError(f"unknown state source {source!r}")
    except IndexError:
        raise ValueError(f"state source {source!r} is missing parameters") from None
    meta = {"source": source, "n_qubits": statevec.num_qubits(psi)}
    if name == "gue":
        meta["gue_normalisation"] = "scale to max |eigenvalue| = 2"
    return psi, meta


# -- output ------------------------------------------------------------------------------

def _finite(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


def entropy_row(measure: str, value: float, params: dict, certificate=None) -> dict:
    return {
        "measure": measure,
        "params": {k: _finite(v) for k, v in params.items()},
        "value_nats": value,
        "value_bits": value / LN2,
        "certificate": certificate,
    }


def plain_row(measure: str, value, params: dict, certificate=None) -> dict:
    return {
        "measure": measure,
        "params": {k: _finite(v) for k, v in params.items()},
        "value": value,
        "certificate": certificate,
    }


def _with_base(row: dict, base: str) -> dict:
    if "value_nats" in row:
        row = dict(row)
        row["value"] = row["value_nats"] if base == "e" else row["value_bits"]
        row["unit"] = "nats" if base == "e" else "bits"
    return row


def emit(args, command: str, rows: list[dict], extra: dict | None = None, wall: float | None = None) -> str:
    rows = [_with_base(r, args.log_base) for r in rows]
    if args.out == "csv":
        return _to_csv(command, rows)
    record = {
        "command": command,
        "version": f"bmsakit {__version__}",
        "seed": args.seed,
        "config": {k: _finite(v) for k, v in sorted(vars(args).items()) if k not in ("func", "inject_fault")},
        "results": rows,
    }
    if extra:
        record.update(extra)
    if args.timing and wall is not None:
        record["wall_time_s"] = wall
    return json.dumps(record, indent=2, sort_keys=True)


def _flatten(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, dict) and k == "params":
            out.update({f"{k2}": v2 for k2, v2 in v.items()})
        elif isinstance(v, (dict, list)):
            out[k] = json.dumps(v, sort_keys=True)
        else:
            out[k] = v
    return out


def _to_csv(command: str, rows: list[dict]) -> str:
    flat = [_flatten(r) for r in rows]
    cols: list[str] = []
    for r in flat:
        cols.extend(c for c in r if c not in cols)
    buf = io.StringIO()
    buf.write(f"# {CSV_VERSION} command={command} version={__version__}\n")
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in flat:
        w.writerow({c: _fmt(r.get(c, "")) for c in cols})
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return v


# -- BMSA dispatch ------------------------------------------------------------------------

def run_bmsa(psi, alpha: float, method: str, seed: int, anneal_init=None):
    """Returns ``(value, certificate, method tag)``."""
    if method == "brute":
        r = bmsa.bmsa_bruteforce(psi, alpha)
        return r.value, {"key": r.key.to_json(), "nodes": _nodes(r)}, r.method
    if method == "pauli":
        r = bmsa.bmsa_bruteforce(psi, alpha, backend="pauli")
        return r.value, {"key": r.key.to_json(), "nodes": _nodes(r)}, r.method
    if method == "bb":
        r = bmsa.bmsa_branch_bound(psi, alpha)
        return r.value, {"key": r.key.to_json(), "nodes": _nodes(r)}, r.method
    if method == "anneal":
        cfg = anneal.AnnealConfig(alpha=alpha, seed=seed, initial_tableau=anneal_init)
        r = anneal.anneal_minimize(psi, cfg)
        return r.best_value, {"tableau": r.best_tableau.to_json(), "accepted_moves": r.accepted_moves}, "anneal"
    raise ValueError(f"unknown method {method!r}")


def _nodes(r):
    return {"visited": r.nodes_visited, "pruned": r.pruned, "bases_evaluated": r.bases_evaluated}


def _methods(text: str) -> list[str]:
    methods = [m.strip() for m in str(text).split(",") if m.strip()]
    for m in methods:
        if m not in ("brute", "pauli", "bb", "anneal"):
            raise ValueError(f"unknown method {m!r}")
    return methods


# -- commands -----------------------------------------------------------------------------

def cmd_measure(args) -> str:
    t0 = time.perf_counter()
    psi, meta = load_state_source(args.state, args.seed)
    rows = []
    for order in args.sre or []:
        rows.append(entropy_row("sre", measures.sre(psi, order), {"n": order}))
    for order in args.sre_lin or []:
        rows.append(plain_row("sre_lin", measures.sre(psi, order, linear=True), {"n": order}))
    if args.dmin or args.fidelity:
        fid = measures.stabilizer_fidelity(psi)
        if args.fidelity:
            rows.append(plain_row("stabilizer_fidelity", fid.value, {}, fid.certificate))
        if args.dmin:
            rows.append(entropy_row("d_min", -math.log(fid.value), {}, fid.certificate))
    if args.nullity:
        rows.append(plain_row("nullity", measures.nullity(psi), {"tol": 1e-8}))
    for alpha in args.bmsa_exact or []:
        method = "bb"
        try:
            bmsa._check_bound_alpha(alpha, True)
        except ValueError:
            method = "brute"
        value, cert, tag = run_bmsa(psi, alpha, method, args.seed)
        rows.append(entropy_row("bmsa", value, {"alpha": alpha, "method": tag}, cert))
    if args.bmsa:
        for alpha in parse_alpha_list(args.alpha):
            for method in _methods(args.method):
                value, cert, tag = run_bmsa(psi, alpha, method, args.seed)
                rows.append(entropy_row("bmsa", value, {"alpha": alpha, "method": tag}, cert))
    if args.a2_lin:
        rows.append(plain_row("a2_lin", bmsa.a2_lin_exact(psi), {}))
    if args.a2_conv:
        r = measures.a2_conv(psi)
        rows.append(entropy_row("a2_conv", r.value, {}, r.certificate))
    if not rows:
        raise ValueError("no measure requested (try --sre 2, --dmin, --bmsa-exact 1, ...)")
    return emit(args, "measure", rows, {"state": meta}, time.perf_counter() - t0)


def cmd_scan_product(args) -> str:
    t_all = time.perf_counter()
    theta = parse_real(args.theta)
    rows = []
    for n in parse_int_range(args.n):
        psi = simkit.product_theta_state(n, theta)
        for alpha in parse_alpha_list(args.alpha):
            for method in _methods(args.method):
                t0 = time.perf_counter()
                value, _, tag = run_bmsa(psi, alpha, method, args.seed)
                row = {"N": n, "theta": theta, "alpha": _finite(alpha), "method": tag,
                       "value_nats": value, "value_bits": value / LN2}
                if args.timing:
                    row["runtime_s"] = time.perf_counter() - t0
                rows.append(row)
    return emit(args, "scan-product", rows, None, time.perf_counter() - t_all)


def cmd_scan_ising(args) -> str:
    t_all = time.perf_counter()
    rows = []
    ns = parse_int_range(args.n)
    for n in ns:
        init = clifford.ising_initial_guess(n) if n >= 2 and not args.no_initial_guess else None
        for h in parse_real_grid(args.h):
            psi = simkit.ising_ground_state(n, h, args.bc)
            for alpha in parse_alpha_list(args.alpha):
                for method in _methods(args.method):
                    t0 = time.perf_counter()
                    value, _, tag = run_bmsa(psi, alpha, method, args.seed, anneal_init=init)
                    row = {"N": n, "h": h, "bc": args.bc, "alpha": _finite(alpha), "method": tag,
                           "value_nats": value, "value_bits": value / LN2, "density_nats": value / n}
                    if args.timing:
                        row["runtime_s"] = time.perf_counter() - t0
                    rows.append(row)
    return emit(args, "scan-ising", rows, None, time.perf_counter() - t_all)


def inequality_battery(n: int, trials: int, rng: np.random.Generator, tol: float = 1e-9, fault: bool = False):
    """Check the BMSA relations on random states; returns ``{name: {checked, violations, worst}}``."""
    report: dict = {}

    def check(name, lhs, rhs):
        # records lhs <= rhs (+tol)
        entry = report.setdefault(name, {"checked": 0, "violations": 0, "worst_gap_nats": -math.inf})
        gap = float(lhs - rhs)
        entry["checked"] += 1
        entry["worst_gap_nats"] = max(entry["worst_gap_nats"], gap)
        if gap > tol:
            entry["violations"] += 1

    def bm(psi, a):
        return bmsa.bmsa_bruteforce(psi, a).value

    for _ in range(trials):
        psi = statevec.random_state(n, rng)
        A = {a: bm(psi, a) for a in (0.5, 1.0, 2.0, math.inf)}
        M = {k: measures.sre(psi, k) for k in (0.5, 1.0, 2.0)}
        if fault:
            M[2.0] = M[2.0] * 10 + 1.0
        nu = measures.nullity(psi)
        dmin = measures.d_min(psi)
        for a in (1.0, 2.0):
            check(f"M2 <= 2 A_{a:g}", M[2.0], 2 * A[a])
        for k in (0.5, 1.0, 2.0):
            check(f"M_{k:g} <= 2 A_0.5", M[k], 2 * A[0.5])
        for a, v in A.items():
            check(f"A_{a:g} <= nullity ln2", v, nu * LN2)
            check(f"D_min <= A_{a:g}", dmin, v)
            check(f"A_{a:g} >= 0", -v, 0.0)
            check(f"A_{a:g} <= N ln2", v, n * LN2)
        check("A_2 <= 2 D_min", A[2.0], 2 * dmin)
        check("A_inf == D_min", abs(A[math.inf] - dmin), 0.0)
        order = [0.5, 1.0, 2.0, math.inf]
        for lo, hi in zip(order, order[1:]):
            check(f"A_{hi:g} <= A_{lo:g}", A[hi], A[lo])
        c = clifford.random_clifford(n, rng)
        cpsi = clifford.apply_to_state(c, psi)
        for a in (1.0, 2.0):
            check(f"Clifford invariance A_{a:g}", abs(bm(cpsi, a) - A[a]), 0.0)
        if n >= 2:
            left = statevec.random_state(1, rng)
            right = statevec.random_state(n - 1, rng)
            joint = statevec.tensor(left, right)
            for a in (1.0, 2.0):
                check(f"subadditivity A_{a:g}", bm(joint, a), bm(left, a) + bm(right, a))
    for size in range(3, 7):
        w = simkit.w_state(size)
        a2 = bmsa.bmsa_branch_bound(w, 2.0).value
        check("W sandwich lower", 1.5 * math.log(size) - 0.5 * math.log(7 * size - 6), a2)
        check("W sandwich upper", a2, math.log(size))
    for entry in report.values():
        entry["worst_gap_bits"] = entry["worst_gap_nats"] / LN2
    return report


def cmd_check_inequalities(args) -> str:
    t0 = time.perf_counter()
    n = parse_int_range(args.n)[0]
    if n > 3:
        raise CapabilityError("the full inequality battery runs at N <= 3")
    rng = np.random.default_rng(args.seed)
    report = inequality_battery(n, args.trials, rng, fault=args.inject_fault)
    rows = [{"relation": k, **v} for k, v in report.items()]
    bad = sum(r["violations"] for r in rows)
    out = emit(args, "check-inequalities", rows, {"total_violations": bad}, time.perf_counter() - t0)
    if bad:
        raise PropertyViolation(out)
    return out


def cmd_sim(args) -> str:
    t0 = time.perf_counter()
    circuit = simkit.CircuitIR.load(args.circuit)
    run = simkit.simulate_sparse(circuit, args.eps)
    probs = run.expansion.probabilities()
    probs = probs / probs.sum()
    result = {
        "n_qubits": circuit.n,
        "n_gates": len(circuit.ops),
        "n_rotations": circuit.n_rotations,
        "eps": args.eps,
        "final_terms": run.expansion.n_terms,
        "max_terms": max(run.term_counts),
        "term_counts": run.term_counts,
        "discarded_weight": run.discarded,
        "infidelity_bound": run.infidelity_bound,
        "coefficient_entropy_nats": statevec.renyi_entropy(probs, 1.0),
        "coefficient_entropy_bits": statevec.renyi_entropy(probs, 1.0) / LN2,
    }
    if circuit.n <= statevec.SPECTRUM_CAP:
        dense = circuit.run_dense()
        result["fidelity_vs_dense"] = statevec.fidelity(dense, simkit.sparse_to_statevector(run.expansion))
    return emit(args, "sim", [result], None, time.perf_counter() - t0)


def cmd_doped_circuit(args) -> str:
    circuit = simkit.doped_clifford_circuit(args.qubits, args.nt, np.random.default_rng(args.seed))
    return "\n".join(circuit.to_lines())


# -- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--log-base", choices=["e", "2"], default="e", help="unit of the 'value' column")
    common.add_argument("--out", choices=["json", "csv"], default="json")
    common.add_argument("--timing", action="store_true", help="include wall-clock times (output no longer byte-stable)")
    common.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="bmsakit", description="Nonstabilizerness measures of pure qubit states.")
    p.add_argument("--version", action="version", version=f"bmsakit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("measure", parents=[common], help="evaluate measures on one state")
    m.add_argument("--state", required=True,
                   help="w:N, chi, theta:T:N, ising:N:h:bc, gue:N:t, doped:N:NT, psieps:N:eps, "
                        "stab-random:N, haar:N, or a .json/.bin state file")
    m.add_argument("--sre", type=parse_real, action="append", metavar="N", help="stabilizer Renyi entropy of order N")
    m.add_argument("--sre-lin", type=parse_real, action="append", metavar="N", help="linear SRE of order N")
    m.add_argument("--dmin", action="store_true", help="min-relative entropy D_min (exhaustive, N <= 5)")
    m.add_argument("--fidelity", action="store_true", help="stabilizer fidelity")
    m.add_argument("--nullity", action="store_true")
    m.add_argument("--bmsa-exact", type=parse_real, action="append", metavar="ALPHA",
                   help="exact BMSA (branch and bound when supported, else brute force)")
    m.add_argument("--bmsa", action="store_true", help="BMSA for every --alpha and --method")
    m.add_argument("--alpha", default="1", help="comma list of Renyi orders (inf allowed)")
    m.add_argument("--method", default="bb", help="comma list from brute, pauli, bb, anneal")
    m.add_argument("--a2-lin", action="store_true", help="linear Renyi-2 BMSA (N <= 5)")
    m.add_argument("--a2-conv", action="store_true", help="convolved Renyi-2 BMSA (N <= 3)")
    m.set_defaults(func=cmd_measure)

    sp = sub.add_parser("scan-product", parents=[common], help="BMSA of (|0>+e^{i theta}|1>)^N over N")
    sp.add_argument("--theta", default="pi/8")
    sp.add_argument("--n", default="2:6", help="qubit range, e.g. 2:6")
    sp.add_argument("--alpha", default="1")
    sp.add_argument("--method", default="bb")
    sp.set_defaults(func=cmd_scan_product)

    si = sub.add_parser("scan-ising", parents=[common], help="BMSA of Ising ground states over h")
    si.add_argument("--n", default="8")
    si.add_argument("--h", default="0.7:1.3:0.1", help="grid lo:hi:step or comma list")
    si.add_argument("--bc", choices=["open", "periodic"], default="periodic")
    si.add_argument("--alpha", default="1")
    si.add_argument("--method", default="bb")
    si.add_argument("--no-initial-guess", action="store_true", help="start annealing from the identity")
    si.set_defaults(func=cmd_scan_ising)

    ci = sub.add_parser("check-inequalities", parents=[common], help="relation battery on random states")
    ci.add_argument("--n", default="3")
    ci.add_argument("--trials", type=int, default=100)
    ci.set_defaults(func=cmd_check_inequalities)

    sm = sub.add_parser("sim", parents=[common], help="sparse stabilizer-basis simulation of a circuit file")
    sm.add_argument("circuit", help="JSON-lines circuit")
    sm.add_argument("--eps", type=float, default=0.0, help="truncation threshold on |c_i|")
    sm.set_defaults(func=cmd_sim)

    dc = sub.add_parser("doped-circuit", parents=[common], help="write a random T-doped Clifford circuit")
    dc.add_argument("--qubits", type=int, required=True)
    dc.add_argument("--nt", type=int, required=True)
    dc.set_defaults(func=cmd_doped_circuit)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except PropertyViolation as exc:
        out = str(exc)
        print(out, end="" if out.endswith("\n") else "\n")
        print("property violation detected", file=sys.stderr)
        return EXIT_VIOLATION
    except (CapabilityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(out, end="" if out.endswith("\n") else "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
