"""Command-line front end.

    relaxlab check SYSTEM [--a0 FILE] [--grid N] [--tmax T] [--tol TOL]
    relaxlab kreiss SYSTEM [--grid N] [--eps LIST]
    relaxlab scan SYSTEM [--grid N] [--tmax T] [--tol TOL]
    relaxlab verify-lemmas [SYSTEM] [--samples N] [--seed S]
    relaxlab solve SYSTEM --eps E [--t T] [--cutoff N] [--seed S] [--beta-tilde B]
    relaxlab converge SYSTEM [--eps LIST] [--t T] [--cutoff N] [--seed S] [--beta-tilde B]
    relaxlab kernel SYSTEM [--eps LIST] [--t T] [--grid N]

SYSTEM is a JSON file or a built-in name such as ``osc3`` or
``jinxin:a=1,b=0.5``. CSV goes to ``--out`` (summary on stdout) or to stdout
(summary on stderr). Exit status: 0 when every asserted inequality holds,
1 when one fails, 2 on a configuration or precondition error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (
    GrlCase,
    PolynomialField,
    PreconditionError,
    TrigField,
    check_integral_bound,
    g_bound_check,
    grl_check,
    integral_I_closed,
    random_integral_queries,
)
from .linalg import LinalgError, operator_norm
from .model import (
    DecompositionError,
    SchemaError,
    block_decompose,
    candidate_symmetrizer,
    family_scan,
    is_stiffly_well_posed,
    jinxin,
    load_system,
    osc3,
    scan_directions,
    symbol,
)
from .mz import convergence_study, coupling_kernel, make_initial_data, slow_error
from .stability import is_quasi_stable, kreiss_measure, yong_check

HEADER = "# relaxlab v1, natural-log, spectral-norm"
CONVERGE_COLUMNS = ["epsilon", "t", "l2_error", "low_freq_error", "high_freq_error", "rate_ratio", "h2_norm"]
KERNEL_COLUMNS = ["t", "xi", "eta", "g_norm", "bound", "holds"]

OK, VIOLATED, CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # one-line errors instead of usage dumps
    def error(self, message):
        raise ConfigError(message)


def _eps_list(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid epsilon list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty epsilon list")
    return vals


def build_parser():
    p = _Parser(prog="relaxlab", description="Relaxation-limit stability and convergence toolkit.")
    p.add_argument("--version", action="version", version=f"relaxlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, system=True, optional_system=False):
        if system:
            sp.add_argument("system", nargs="?" if optional_system else None,
                            help="JSON file or built-in name (osc3, jinxin:a=1,b=0.5)")
        sp.add_argument("--out", help="CSV output path (default: stdout)")
        sp.add_argument("--tol", type=float, default=1e-8, help="quasi-stability tolerance (default 1e-8)")
        sp.add_argument("--seed", type=int, default=0, help="random seed (default 0)")

    sp = sub.add_parser("check", help="quasi-stability and Yong certificate")
    common(sp)
    sp.add_argument("--a0", help="JSON file with the symmetrizer in transformed coordinates")
    sp.add_argument("--grid", type=int, default=128, help="F0 scan directions (default 128)")
    sp.add_argument("--tmax", type=float, default=50.0, help="semigroup horizon (default 50)")

    sp = sub.add_parser("kreiss", help="Kreiss measurements of Q, B and sampled symbols")
    common(sp)
    sp.add_argument("--grid", type=int, default=8, help="sampled symbol directions (default 8)")
    sp.add_argument("--eps", type=_eps_list, default=[1e-1, 1e-2], help="epsilon list for symbols")

    sp = sub.add_parser("scan", help="F0/F1/F2 family scans")
    common(sp)
    sp.add_argument("--grid", type=int, default=64, help="directions per family (default 64)")
    sp.add_argument("--tmax", type=float, default=50.0, help="semigroup horizon (default 50)")

    sp = sub.add_parser("verify-lemmas", help="integral, Riemann-Lebesgue and kernel batteries")
    common(sp, optional_system=True)
    sp.add_argument("--samples", type=int, default=1000, help="integral queries (default 1000)")

    for name, helptext in (("solve", "single error record"), ("converge", "convergence table")):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        sp.add_argument("--t", type=float, default=1.0, help="final time (default 1)")
        if name == "solve":
            sp.add_argument("--eps", type=float, required=True, help="relaxation time")
        else:
            sp.add_argument("--eps", type=_eps_list, default=[1e-1, 1e-2, 1e-3, 1e-4],
                            help="strictly decreasing epsilon list")
        sp.add_argument("--cutoff", type=int, default=64, help="Fourier cutoff N (default 64)")
        sp.add_argument("--smoothness", type=float, default=2.0, help="data smoothness s (default 2)")
        sp.add_argument("--beta-tilde", type=float, default=10.0, help="frequency split constant (default 10)")

    sp = sub.add_parser("kernel", help="coupling-kernel norm sweep against its bound")
    common(sp)
    sp.add_argument("--t", type=float, default=1.0, help="time (default 1)")
    sp.add_argument("--eps", type=_eps_list, default=[1e-2, 1e-3, 1e-4], help="epsilon list")
    sp.add_argument("--grid", type=int, default=5, help="frequencies xi = 1..grid (default 5)")
    return p


def validate(args):
    """Reject bad knobs before any computation."""
    if not (math.isfinite(args.tol) and args.tol > 0):
        raise ConfigError("--tol must be a positive number")
    if args.seed < 0:
        raise ConfigError("--seed must be non-negative")
    for knob in ("grid", "samples", "cutoff"):
        v = getattr(args, knob, None)
        if v is not None and v < 1:
            raise ConfigError(f"--{knob} must be at least 1")
    for knob in ("tmax", "t", "beta_tilde"):
        v = getattr(args, knob, None)
        if v is not None and not (math.isfinite(v) and v > 0):
            raise ConfigError(f"--{knob.replace('_', '-')} must be a positive number")
    eps = getattr(args, "eps", None)
    if eps is not None:
        vals = eps if isinstance(eps, list) else [eps]
        if any(not 0.0 < e < 1.0 for e in vals):
            raise ConfigError("--eps values must lie in (0, 1)")
        if args.command == "converge" and any(b >= a for a, b in zip(vals, vals[1:])):
            raise ConfigError("--eps must be strictly decreasing")
    if args.command == "solve" or args.command == "converge":
        if args.smoothness < 0:
            raise ConfigError("--smoothness must be non-negative")


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


@dataclass
class Output:
    rows: list
    columns: list | None = None
    summary: list = None
    status: int = OK


def _csv_text(columns, rows):
    buf = io.StringIO()
    buf.write(HEADER + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


# --- commands -------------------------------------------------------------


def cmd_check(args, system):
    decomp = block_decompose(system, args.tol)
    lines = [f"system: {system.name} (d={system.d}, n={system.n}, r={decomp.r})"]
    qrep = is_quasi_stable(system.Q, args.tol)
    lines.append(f"Q quasi-stable: {_fmt(qrep.quasi_stable)}")
    if args.a0:
        A0 = np.asarray(_read_json(args.a0), dtype=complex)
        source = args.a0
    else:
        A0 = candidate_symmetrizer(system)
        source = "candidate"
    y = yong_check(system, A0, decomp=decomp)
    lines.append(f"A0: {source}, min eigenvalue {_fmt(y.margins['min_eig_A0'])}")
    lines.append(f"yong condition (i): {'pass' if y.condition_i else 'fail'}")
    lines.append(f"yong condition (ii): {'pass' if y.condition_ii else 'fail'}")
    lines.append(f"yong condition (iii): {'pass' if y.condition_iii else 'fail'}")
    verdict = is_stiffly_well_posed(system, decomp, directions=args.grid, t_max=args.tmax)
    lines.append(f"F0 scan: {verdict}")
    status = OK if qrep.quasi_stable and verdict != "fail" else VIOLATED
    return Output([], None, lines, status)


def cmd_kreiss(args, system):
    decomp = block_decompose(system, args.tol)
    d = system.d
    cols = ["matrix"] + [f"xi{j + 1}" for j in range(d)] + ["eta", "kreiss", "divergent"]
    rows = []
    nan = [math.nan] * d

    def add(label, M, xi, eta):
        k = kreiss_measure(M, tol=args.tol)
        rows.append([label, *xi, eta, k.value, k.divergent])

    add("Q", system.Q, nan, math.nan)
    if decomp.r:
        add("B", decomp.B, nan, math.nan)
    dirs = scan_directions(d, "F0", args.grid)
    for e in args.eps:
        eta = 1.0 / e
        for direction in dirs:
            xi = direction[:-1] * eta
            add("H", symbol(system, decomp, xi, eta).H, list(xi), eta)
    worst = max((r[-2] for r in rows), default=0.0)
    n_div = sum(bool(r[-1]) for r in rows)
    lines = [f"kreiss: {len(rows)} matrices, max K {_fmt(worst)}, divergent {n_div}"]
    return Output(rows, cols, lines, VIOLATED if n_div else OK)


def cmd_scan(args, system):
    decomp = block_decompose(system, args.tol)
    d = system.d
    cols = ["family"] + [f"xi{j + 1}" for j in range(d)] + ["eta", "quasi_stable", "sup_norm"]
    rows, lines, ok = [], [], True
    for fam in ("F0", "F1", "F2"):
        rep = family_scan(system, decomp, fam, args.grid, args.tmax, tol=args.tol)
        for direction, qs, sup in zip(rep.grid, rep.quasi_stable, rep.sups):
            rows.append([fam, *direction[:-1], direction[-1], bool(qs), float(sup)])
        verdict = "pass" if rep.all_quasi_stable else "fail"
        ok &= rep.all_quasi_stable
        lines.append(f"{fam}: {verdict}, worst sup {_fmt(rep.worst_sup_semigroup)}, kappa_P {_fmt(rep.kappa_P)}")
    return Output(rows, cols, lines, OK if ok else VIOLATED)


def _grl_cases():
    rot = np.array([[0.0, 1.0], [-1.0, 0.0]])
    diag = np.diag([-1.0, -2.0])
    cases = []
    for eta in (1e2, 1e3, 1e4, 1e5):
        cases.append(("rotation,M=0,f=const", GrlCase(rot, np.zeros((2, 2)), PolynomialField([[1.0, 0.0]]), 1.0, eta)))
        cases.append(("rotation,M=shear,f=trig", GrlCase(rot, [[0.0, 0.5], [0.0, 0.0]],
                                                         TrigField([[1.0, 0.0], [0.0, 1.0]], [[0.0, 0.0], [0.5, 0.0]], 2.0), 1.0, eta)))
        cases.append(("diagonal,M=0.3I,f=poly", GrlCase(diag, 0.3 * np.eye(2),
                                                        PolynomialField([[1.0, 0.0], [0.0, 1.0], [0.5, -0.5]]), 1.0, eta)))
    for eta in (50.0, 5e2, 5e3):
        cases.append(("scalar,M=0.3,f=s", GrlCase([[-1.0]], [[0.3]], PolynomialField([[0.0], [1.0]]), 2.0, eta)))
    return cases


def cmd_verify(args, system):
    lines, ok = [], True
    qs = random_integral_queries(args.samples, args.seed)
    passed = closed_ok = closed_n = 0
    for q in qs:
        res = check_integral_bound(q)
        passed += res.holds
        c = integral_I_closed(q)
        if c is not None:
            closed_n += 1
            closed_ok += abs(res.lhs - c) <= 1e-8 * c
    lines.append(f"integral: {passed}/{len(qs)} pass")
    lines.append(f"integral closed forms: {closed_ok}/{closed_n} match")
    ok &= passed == len(qs) and closed_ok == closed_n

    cases = _grl_cases()
    n32 = sum(grl_check(c).holds for _, c in cases)
    lines.append(f"riemann-lebesgue: {n32}/{len(cases)} pass")
    ok &= n32 == len(cases)

    systems = [system] if system is not None else [jinxin(), osc3()]
    n33 = total33 = 0
    for s in systems:
        decomp = block_decompose(s, args.tol)
        if decomp.r == 0 or decomp.r == s.n:
            continue
        xi = np.zeros(s.d)
        xi[0] = 1.0
        for eta in (1e2, 1e3, 1e4):
            total33 += 1
            n33 += g_bound_check(s, decomp, 1.0, xi, eta).holds
    lines.append(f"kernel bound: {n33}/{total33} pass")
    ok &= n33 == total33
    return Output([], None, lines, OK if ok else VIOLATED)


def _record_row(rec):
    return [rec.epsilon, rec.t, rec.l2_error, rec.low_freq_error, rec.high_freq_error, rec.rate_ratio, rec.h2_norm_u0]


def _initial_data(args, system):
    return make_initial_data(system.d, system.n, args.cutoff, args.smoothness, args.seed)


def cmd_solve(args, system):
    decomp = block_decompose(system, args.tol)
    rec = slow_error(system, decomp, _initial_data(args, system), args.t, args.eps, args.beta_tilde)
    lines = [f"solve: eps {_fmt(rec.epsilon)}, l2_error {_fmt(rec.l2_error)}"]
    return Output([_record_row(rec)], CONVERGE_COLUMNS, lines, OK)


def cmd_converge(args, system):
    decomp = block_decompose(system, args.tol)
    summary = convergence_study(system, decomp, _initial_data(args, system), args.t, args.eps, args.beta_tilde)
    rows = [_record_row(r) for r in summary.records]
    lines = [
        f"converge: {len(rows)} rows, error decreasing {_fmt(summary.error_decreasing)}",
        f"rate ratio range [{_fmt(summary.min_rate_ratio)}, {_fmt(summary.max_rate_ratio)}]",
    ]
    return Output(rows, CONVERGE_COLUMNS, lines, OK if summary.error_decreasing else VIOLATED)


def cmd_kernel(args, system):
    decomp = block_decompose(system, args.tol)
    if decomp.r == 0:
        raise PreconditionError("the fast block is empty; there is no coupling kernel")
    rows, skipped, failed = [], [], 0
    for e in args.eps:
        eta = 1.0 / e
        for k in range(1, args.grid + 1):
            xi = np.zeros(system.d)
            xi[0] = float(k)
            try:
                res = g_bound_check(system, decomp, args.t, xi, eta)
            except PreconditionError as exc:
                skipped.append(str(exc))
                g = operator_norm(coupling_kernel(system, decomp, args.t, xi, eta))
                rows.append([args.t, float(k), eta, g, math.nan, "skipped"])
                continue
            failed += not res.holds
            rows.append([args.t, float(k), eta, res.lhs, res.rhs, res.holds])
    checked = len(rows) - len(skipped)
    lines = [f"kernel: {checked - failed}/{checked} pass, {len(skipped)} skipped below the eta threshold"]
    lines += [f"skipped: {s}" for s in skipped]
    return Output(rows, KERNEL_COLUMNS, lines, VIOLATED if failed else OK)


COMMANDS = {
    "check": cmd_check,
    "kreiss": cmd_kreiss,
    "scan": cmd_scan,
    "verify-lemmas": cmd_verify,
    "solve": cmd_solve,
    "converge": cmd_converge,
    "kernel": cmd_kernel,
}


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None


def run(argv=None, stdout=None, stderr=None):
    """Parse ``argv``, run the command and return the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        validate(args)
        system = None
        if getattr(args, "system", None) is not None:
            try:
                system = load_system(args.system)
            except (SchemaError, ValueError, OSError) as exc:
                raise ConfigError(str(exc)) from None
        elif args.command != "verify-lemmas":
            raise ConfigError("a system is required")
        out = COMMANDS[args.command](args, system)
    except ConfigError as exc:
        print(f"relaxlab: error: {exc}", file=stderr)
        return CONFIG
    except (PreconditionError, DecompositionError, LinalgError) as exc:
        print(f"relaxlab: error: {exc}", file=stderr)
        return CONFIG

    summary_stream = stdout
    if out.columns is not None:
        text = _csv_text(out.columns, out.rows)
        if args.out:
            Path(args.out).write_text(text)
        else:
            stdout.write(text)
            summary_stream = stderr
    for line in out.summary or []:
        print(line, file=summary_stream)
    return out.status


def main(argv=None):
    sys.exit(run(argv))
