"""Command-line front end.

Exit codes: 0 success, 1 verification (or integration) failure, 2 usage or
input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import quantumrel as qr
from .exprparse import parse_polynomial
from .laxdet import Variant, conserved
from .polyring import PolyError
from .todaflow import FlowError, FlowState, check_state, integrate, random_state

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(out, text: str) -> None:
    out.write(text)
    if not text.endswith("\n"):
        out.write("\n")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


# -- relations ---------------------------------------------------------------


def cmd_relations(args, out) -> int:
    family = qr.Family(args.variant)
    n_min = 3 if family is qr.Family.PERIODIC else 2
    if args.n < n_min:
        raise UsageError(f"--variant {family.value} needs --n >= {n_min}")
    fam = qr.qs_family(args.n) if family is qr.Family.PERIODIC else qr.qs_hat_family(args.n)
    if args.basis == "y":
        fam = fam.in_y_basis()
    if args.format == "json":
        _emit(out, _dump(fam.to_json()))
    else:
        for k in range(args.n):
            _emit(out, f"QS{k} = {fam.relations[k]}")
    return EXIT_OK


# -- verify ------------------------------------------------------------------


def _suite_list(text: str) -> list[str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    unknown = [s for s in names if s not in qr.SUITES]
    if unknown or not names:
        raise argparse.ArgumentTypeError(
            f"unknown suite(s) {', '.join(unknown) or '(none given)'}; choose from {', '.join(qr.SUITES)}"
        )
    return names


def cmd_verify(args, out) -> int:
    if args.n_max < 3:
        raise UsageError("--n-max must be at least 3")
    rows = qr.run_suites(args.n_max, args.which)
    failures = [r for r in rows if not r.passed]
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(_dump([r.to_json() for r in rows]) + "\n")
    if args.format == "json":
        _emit(out, _dump([r.to_json() for r in rows]))
    else:
        _emit(out, f"{'suite':<14}{'n':>3}{'k':>4}  status")
        for r in rows:
            _emit(out, f"{r.suite:<14}{r.n:>3}{str(r.k):>4}  {r.status.upper()}")
            if not r.passed:
                _emit(out, f"    witness: {r.witness}")
        _emit(out, f"{len(rows)} checks, {len(failures)} failed")
    return EXIT_FAIL if failures else EXIT_OK


# -- evalq -------------------------------------------------------------------


def cmd_evalq(args, out) -> int:
    if args.n < 1:
        raise UsageError("--n must be positive")
    try:
        p = parse_polynomial(args.expression, args.n)
        result = qr.ev_q_normal_form(p)
    except PolyError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        _emit(out, _dump(result.to_json()))
    else:
        _emit(out, str(result))
    return EXIT_OK


# -- conserved ---------------------------------------------------------------


def cmd_conserved(args, out) -> int:
    variant = Variant(args.variant)
    try:
        cs = conserved(args.n, variant, args.method)
    except PolyError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        _emit(out, _dump(cs.to_json()))
    else:
        for name, p in cs.named().items():
            _emit(out, f"{name} = {p}")
    return EXIT_OK


# -- flow --------------------------------------------------------------------


def _floats(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def cmd_flow(args, out) -> int:
    variant = Variant(args.variant)
    if args.dt <= 0 or args.t_end < 0:
        raise UsageError("need --dt > 0 and --t-end >= 0")
    if (args.x is None) != (args.q is None):
        raise UsageError("give both --x and --q, or neither (random state from --seed)")
    if args.x is None:
        if args.n is None:
            raise UsageError("--n is required for a random initial state")
        s0 = random_state(args.n, variant, np.random.default_rng(args.seed))
    else:
        if args.n is not None and len(args.x) != args.n:
            raise UsageError(f"--x has {len(args.x)} entries but --n is {args.n}")
        s0 = FlowState(0.0, args.x, args.q)
    try:
        check_state(s0, variant)
    except FlowError as exc:
        raise UsageError(str(exc)) from None
    try:
        _, report = integrate(s0, args.t_end, args.dt, variant)
    except FlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    data = report.to_json()
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(json.dumps(data) + "\n")
    if args.format == "json":
        _emit(out, json.dumps(data))
    else:
        _emit(out, f"{variant.value} Toda, n={report.n}, dt={report.dt!r}, t_end={report.t_end!r}, {report.steps} RK4 steps")
        for k, v in report.drift.items():
            _emit(out, f"  {k:<4} relative drift {v:.3e}")
        _emit(out, f"  max |sum x| {report.sumx_max:.3e}")
        if report.prodq_drift is not None:
            _emit(out, f"  prod q relative drift {report.prodq_drift:.3e}")
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qtoda",
        description="Quantum cohomology relations and Toda lattice conserved quantities.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    fmt = dict(choices=["text", "json"], default="text")

    r = sub.add_parser("relations", help="print the quantum relations QS^k_n")
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--variant", choices=["periodic", "open-hat"], default="periodic")
    r.add_argument("--basis", choices=["x", "y"], default="x")
    r.add_argument("--format", **fmt)
    r.set_defaults(func=cmd_relations)

    v = sub.add_parser("verify", help="check the polynomial identities exactly")
    v.add_argument("--n-max", type=int, default=7)
    v.add_argument("--which", type=_suite_list, default=None,
                   help=f"comma-separated subset of: {', '.join(qr.SUITES)}")
    v.add_argument("--format", **fmt)
    v.add_argument("--report", metavar="PATH", help="also write the rows as JSON")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("evalq", help="quantum normal form of an element of V")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("expression")
    e.add_argument("--format", **fmt)
    e.set_defaults(func=cmd_evalq)

    c = sub.add_parser("conserved", help="print the Toda conserved quantities")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--variant", choices=["open", "periodic"], default="open")
    c.add_argument("--method", choices=["cofactor", "bareiss"], default="cofactor")
    c.add_argument("--format", **fmt)
    c.set_defaults(func=cmd_conserved)

    f = sub.add_parser("flow", help="integrate a Toda flow and report drift")
    f.add_argument("--variant", choices=["open", "periodic"], default="periodic")
    f.add_argument("--n", type=int)
    f.add_argument("--x", type=_floats)
    f.add_argument("--q", type=_floats)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--t-end", type=float, default=1.0)
    f.add_argument("--dt", type=float, default=1e-3)
    f.add_argument("--report", metavar="PATH")
    f.add_argument("--format", **fmt)
    f.set_defaults(func=cmd_flow)
    return p


def _glue_negative_values(argv: Sequence[str]) -> list[str]:
    # "--q -1,-2" would otherwise be read as a flag
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in ("--x", "--q"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_glue_negative_values(argv))
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
