"""Command-line entry points: validate, run, learn, oracle.

Exit status 0 on success, 1 on diagnostics, non-convergence or failed
checks, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Sequence

from .engine import EngineConfig, NonConvergenceError, run
from .lattice import LatticeError, brute_force_residual, implies, table_from_lattice, validate
from .learning import LearnConfig, LearningError, learn, weight_diff
from .modelfile import (
    ModelDocument,
    format_weights,
    load_model,
    serialize_coefficients,
    serialize_trace,
)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mvcm", description="Multi-valued cognitive maps.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check lattice axioms and model diagnostics")
    v.add_argument("file")

    r = sub.add_parser("run", help="iterate a map to its fixed point")
    r.add_argument("file")
    r.add_argument("--init", action="append", required=True, metavar="CASE",
                   help="init case; repeat for several")
    r.add_argument("--max-iters", type=int, default=100)
    r.add_argument("--neg-mode", choices=("symmetric", "strict"), default="symmetric")
    r.add_argument("--f0", metavar="LABEL")
    r.add_argument("--format", choices=("table", "lines"), default="table")
    r.add_argument("--timing", action="store_true")
    r.add_argument("--r-diag", action="store_true")

    l = sub.add_parser("learn", help="learn weights so outputs land in their doc sets")
    l.add_argument("file")
    l.add_argument("--init", required=True, metavar="CASE")
    l.add_argument("--mode", choices=("end", "step"), required=True)
    l.add_argument("--doc-select", choices=("first", "best"), default="first")
    l.add_argument("--max-outer", type=int, default=50)
    l.add_argument("--max-iters", type=int, default=100)
    l.add_argument("--neg-mode", choices=("symmetric", "strict"), default="symmetric")
    l.add_argument("--format", choices=("table", "lines"), default="table")
    l.add_argument("--timing", action="store_true")

    o = sub.add_parser("oracle", help="cross-check implication against brute force")
    o.add_argument("file")
    return p


def _load(path: str, err) -> tuple[ModelDocument | None, int]:
    t0 = time.perf_counter()
    try:
        doc = load_model(path)
    except OSError as exc:
        print(f"mvcm: cannot read {path}: {exc.strerror or exc}", file=err)
        return None, 0
    elapsed = int((time.perf_counter() - t0) * 1e6)
    for d in doc.diagnostics:
        print(f"{path}: {d}", file=err)
    return doc, elapsed


def _engine_cfg(args, model) -> EngineConfig:
    f0 = model.lattice.parse(args.f0) if getattr(args, "f0", None) else None
    return EngineConfig(f0=f0, max_iters=args.max_iters, neg_mode=args.neg_mode,
                        record_r=getattr(args, "r_diag", False))


def _cmd_validate(args, out, err) -> int:
    doc, _ = _load(args.file, err)
    if doc is None or not doc.ok:
        return 1
    report = validate(table_from_lattice(doc.model.lattice))
    lat = doc.model.lattice
    print(f"lattice: {len(lat.atoms)} atoms, {len(lat)} elements", file=out)
    for name, flag in report.flags().items():
        print(f"  {name:<18} {'yes' if flag else 'NO'}", file=out)
    for law, witness in report.counterexamples:
        shown = ", ".join(lat.format(lat.from_mask(w)) if isinstance(w, int) else str(w) for w in witness)
        print(f"  counterexample {law}: {shown}", file=out)
    m = doc.model
    print(f"model: {len(m.concepts)} concepts, {len(m.weights)} weights, "
          f"{len(m.init_cases)} init cases", file=out)
    return 0 if report.ok else 1


def _cmd_run(args, out, err) -> int:
    doc, t_parse = _load(args.file, err)
    if doc is None or not doc.ok:
        return 1
    model = doc.model
    try:
        cfg = _engine_cfg(args, model)
    except (ValueError, LatticeError) as exc:
        print(f"mvcm: {exc}", file=err)
        return 2
    status = 0
    for case in args.init:
        if case not in model.init_cases:
            print(f"mvcm: unknown init case {case!r}", file=err)
            status = 1
            continue
        if len(args.init) > 1:
            print(f"== {case}", file=out)
        t0 = time.perf_counter()
        try:
            trace = run(model, cfg, case)
        except NonConvergenceError as exc:
            trace = exc.trace
            print(f"mvcm: {case}: {exc}", file=err)
            status = 1
        t_run = int((time.perf_counter() - t0) * 1e6)
        out.write(serialize_trace(trace, args.format))
        if args.r_diag:
            out.write(serialize_coefficients(trace))
        if args.timing:
            per = t_run // max(len(trace.coeffs), 1)
            print(f"timing {case}: parse {t_parse} us, run {t_run} us, "
                  f"per iteration {per} us", file=err)
    return status


def _cmd_learn(args, out, err) -> int:
    doc, t_parse = _load(args.file, err)
    if doc is None or not doc.ok:
        return 1
    model = doc.model
    if args.init not in model.init_cases:
        print(f"mvcm: unknown init case {args.init!r}", file=err)
        return 1
    try:
        cfg = _engine_cfg(args, model)
        lcfg = LearnConfig(mode={"end": "end_of_run", "step": "per_step"}[args.mode],
                           doc_select=args.doc_select, max_outer=args.max_outer)
    except ValueError as exc:
        print(f"mvcm: {exc}", file=err)
        return 2
    t0 = time.perf_counter()
    try:
        result = learn(model, cfg, lcfg, args.init)
        status = 0
    except LearningError as exc:
        print(f"mvcm: {exc}", file=err)
        result, status = exc.result, 1
    except (NonConvergenceError, ValueError) as exc:
        print(f"mvcm: {exc}", file=err)
        return 1
    t_learn = int((time.perf_counter() - t0) * 1e6)
    print("learned weights:", file=out)
    out.write(format_weights(model, result.weights))
    changed = weight_diff(model.weights, result.weights)
    print(f"changed entries: {len(changed)}; correction rounds: {result.outer_rounds}", file=out)
    for (src, dst), (before, after) in changed.items():
        print(f"  {src} -> {dst}: {before.format() if before else '0'} => "
              f"{after.format() if after else '0'}", file=out)
    print("final trace:", file=out)
    out.write(serialize_trace(result.trace, args.format))
    if args.timing:
        print(f"timing: parse {t_parse} us, learn {t_learn} us", file=err)
    return status


def _cmd_oracle(args, out, err) -> int:
    doc, _ = _load(args.file, err)
    if doc is None or not doc.ok:
        return 1
    lat = doc.model.lattice
    table = table_from_lattice(lat)
    mismatches = 0
    for a in lat.elements():
        for b in lat.elements():
            if implies(a, b).mask != brute_force_residual(table, a.mask, b.mask):
                mismatches += 1
                if mismatches <= 10:
                    print(f"mismatch: {lat.format(a)} => {lat.format(b)}", file=out)
    n = len(lat)
    print(f"checked {n * n} pairs: {mismatches} mismatches", file=out)
    return 0 if mismatches == 0 else 1


def cli(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {
        "validate": _cmd_validate,
        "run": _cmd_run,
        "learn": _cmd_learn,
        "oracle": _cmd_oracle,
    }[args.command]
    return handler(args, out, err)


def main() -> None:
    sys.exit(cli())
