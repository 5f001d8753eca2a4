"""Command-line front end: evaluate and check `.pd` files, run the theorem suite.

Commands
    parse FILE...            syntax-check files, print a summary
    eval FILE                typecheck + contract diagrams, print Choi/scalar
    check FILE               run the file's `check` directives
    theorems                 run the seeded theorem suite
    quotient FILE            evaluate and print canonical (scale-quotient) forms

Exit codes: 0 success / all checks pass, 1 typecheck violations or failing
checks, 2 parse or semantic errors, 3 unknown check property. The
environment variable PROCTHEORY_TOL_EQ overrides the default equality
tolerance; everything else is flag-configured.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import diagram as dlang
from . import groups, suite, theories
from .numerics import Tolerances
from .processes import as_scalar, is_causal, preserves_identity, preserves_max_mixed
from .theories import membership, normalization_scalar, theory_by_name

EXIT_OK = 0
EXIT_TYPECHECK = 1
EXIT_PARSE = 2
EXIT_UNKNOWN_PROP = 3


def _fmt_complex(z):
    return f"{z.real:.17g}{z.imag:+.17g}i"


def _print_process(name, pt):
    if pt.input.is_trivial() and pt.output.is_trivial():
        print(f"{name}: scalar {as_scalar(pt).value!r}")
        return
    print(f"{name}: process {pt.input} -> {pt.output} choi {pt.choi.shape[0]}x{pt.choi.shape[1]}")
    for row in pt.choi:
        print(" ".join(_fmt_complex(z) for z in row))


def _tolerances(args):
    eq_default = float(os.environ.get("PROCTHEORY_TOL_EQ", 1e-9))
    eq = args.tol_eq if args.tol_eq is not None else eq_default
    zero = args.tol_zero if args.tol_zero is not None else 1e-12
    return Tolerances(zero_abs=zero, eq_rel=eq, psd_rel=1e-9)


def _load(path):
    try:
        return dlang.parse_file(path), None
    except (dlang.ParseError, OSError) as exc:
        return None, str(exc)


def cmd_parse(args):
    code = EXIT_OK
    for path in args.files:
        parsed, err = _load(path)
        if err is not None:
            print(err, file=sys.stderr)
            code = EXIT_PARSE
            continue
        print(
            f"{path}: systems={len(parsed.systems)} boxes={len(parsed.boxes)} "
            f"diagrams={len(parsed.diagrams)} checks={len(parsed.checks)}"
        )
        for name, d in parsed.diagrams.items():
            print(f"  diagram {name}: nodes={len(d.nodes)} wires={len(d.wires)}")
    return code


def _typecheck_or_report(parsed, name, d, theory, strict, path):
    violations = dlang.typecheck(d, compact=theory.compact, strict_orientation=strict)
    for v in violations:
        print(v.format(path), file=sys.stderr)
    return not violations


def cmd_eval(args):
    parsed, err = _load(args.file)
    if err is not None:
        print(err, file=sys.stderr)
        return EXIT_PARSE
    tol = _tolerances(args)
    theory = theory_by_name(args.theory)
    try:
        env = dlang.build_env(parsed, tol)
    except dlang.SemanticError as exc:
        print(exc, file=sys.stderr)
        return EXIT_PARSE
    targets = [args.diagram] if args.diagram else list(parsed.diagrams)
    ok = True
    for name in targets:
        if name not in parsed.diagrams:
            print(f"{args.file}: no diagram named {name!r}", file=sys.stderr)
            return EXIT_PARSE
        d = parsed.diagrams[name]
        if not _typecheck_or_report(parsed, name, d, theory, args.strict_orientation, args.file):
            ok = False
            continue
        _print_process(name, dlang.evaluate(d, env, tol))
    return EXIT_OK if ok else EXIT_TYPECHECK


def _resolve_target(parsed, env, directive, theory, strict, tol, path):
    """Target of a check directive: an evaluated diagram or a box process."""
    if directive.target in parsed.diagrams:
        d = parsed.diagrams[directive.target]
        violations = dlang.typecheck(d, compact=theory.compact, strict_orientation=strict)
        if violations:
            for v in violations:
                print(v.format(path), file=sys.stderr)
            return None
        return dlang.evaluate(d, env, tol)
    return env[directive.target]


def cmd_check(args):
    parsed, err = _load(args.file)
    if err is not None:
        print(err, file=sys.stderr)
        return EXIT_PARSE
    tol = _tolerances(args)
    try:
        env = dlang.build_env(parsed, tol)
    except dlang.SemanticError as exc:
        print(exc, file=sys.stderr)
        return EXIT_PARSE

    rep_in = rep_out = None
    if args.rep_in:
        rep_in = groups.load_representation(args.rep_in)
    if args.rep_out:
        rep_out = groups.load_representation(args.rep_out)

    had_typecheck_failure = False
    all_pass = True
    for directive in parsed.checks:
        label = f"check {directive.prop} {directive.target} in {directive.theory}"
        if directive.prop not in dlang.CHECK_PROPS:
            print(f"{label}: unknown property {directive.prop!r}", file=sys.stderr)
            return EXIT_UNKNOWN_PROP
        try:
            theory = theory_by_name(directive.theory) if directive.theory != "qpart" else None
        except KeyError as exc:
            print(f"{label}: {exc}", file=sys.stderr)
            return EXIT_PARSE
        caps = theory if theory is not None else theories.QCALC
        f = _resolve_target(parsed, env, directive, caps, args.strict_orientation, tol, args.file)
        if f is None:
            had_typecheck_failure = True
            all_pass = False
            continue
        if directive.prop == "causal":
            good, detail = is_causal(f, tol), ""
        elif directive.prop == "retrocausal":
            good, detail = preserves_identity(f, tol), ""
        elif directive.prop == "unital":
            good, detail = preserves_max_mixed(f, tol), ""
        elif directive.prop == "member":
            verdict = membership(theory, f, tol)
            good = verdict.ok
            detail = "" if good else f" ({verdict})"
        elif directive.prop == "intertwiner":
            if rep_in is None or rep_out is None:
                print(f"{label}: supply --rep-in and --rep-out files", file=sys.stderr)
                return EXIT_PARSE
            ri = groups.Representation(rep_in.group, f.input, rep_in.action)
            ro = groups.Representation(rep_out.group, f.output, rep_out.action)
            good, detail = groups.is_intertwiner(f, ri, ro, tol), ""
        elif directive.prop == "nosignalling":
            verdict = groups.no_signalling(f, tol=tol)
            good = verdict.ok
            detail = "" if good else f" (signalling: {', '.join(verdict.failed_directions())})"
        print(f"{label}: {'pass' if good else 'fail'}{detail}")
        all_pass = all_pass and good
    if had_typecheck_failure:
        return EXIT_TYPECHECK
    return EXIT_OK if all_pass else EXIT_TYPECHECK


def cmd_theorems(args):
    tol = _tolerances(args)
    reports = suite.run_all(seed=args.seed, dims=tuple(args.dims), trials=args.trials, tol=tol)
    for r in reports:
        print(suite.format_report(r))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_TYPECHECK


def cmd_quotient(args):
    parsed, err = _load(args.file)
    if err is not None:
        print(err, file=sys.stderr)
        return EXIT_PARSE
    tol = _tolerances(args)
    try:
        env = dlang.build_env(parsed, tol)
    except dlang.SemanticError as exc:
        print(exc, file=sys.stderr)
        return EXIT_PARSE
    theory = theory_by_name("qcalc")
    targets = [args.diagram] if args.diagram else list(parsed.diagrams)
    ok = True
    for name in targets:
        d = parsed.diagrams[name]
        if not _typecheck_or_report(parsed, name, d, theory, args.strict_orientation, args.file):
            ok = False
            continue
        f = dlang.evaluate(d, env, tol)
        n = normalization_scalar(f).value
        cls = theories.canonical_rep(f, tol)
        print(f"{name}: N={n!r} zero={cls.is_zero_class(tol)}")
        _print_process(f"{name} canonical", cls.canonical)
    return EXIT_OK if ok else EXIT_TYPECHECK


def _add_tol_flags(p):
    p.add_argument("--tol-zero", type=float, default=None, help="absolute zero threshold")
    p.add_argument("--tol-eq", type=float, default=None,
                   help="relative equality tolerance (default from PROCTHEORY_TOL_EQ or 1e-9)")


def _add_strict_flag(p):
    p.add_argument("--strict-orientation", action="store_true",
                   help="require wire orientations to match exactly")


def build_parser():
    parser = argparse.ArgumentParser(prog="proctheory",
                                     description="process-theory diagram evaluator and checker")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="syntax-check .pd files")
    p.add_argument("files", nargs="+")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("eval", help="typecheck and evaluate diagrams")
    p.add_argument("file")
    p.add_argument("--theory", default="qcalc", help="theory fixing the wiring capabilities")
    p.add_argument("--diagram", default=None, help="evaluate a single named diagram")
    _add_strict_flag(p)
    _add_tol_flags(p)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("check", help="run a file's check directives")
    p.add_argument("file")
    p.add_argument("--rep-in", default=None, help="representation file for intertwiner checks (input)")
    p.add_argument("--rep-out", default=None, help="representation file for intertwiner checks (output)")
    _add_strict_flag(p)
    _add_tol_flags(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("theorems", help="run the seeded theorem suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--dims", type=int, nargs="+", default=[2, 3])
    p.add_argument("--trials", type=int, default=100)
    _add_tol_flags(p)
    p.set_defaults(fn=cmd_theorems)

    p = sub.add_parser("quotient", help="evaluate diagrams and print canonical class forms")
    p.add_argument("file")
    p.add_argument("--diagram", default=None)
    _add_strict_flag(p)
    _add_tol_flags(p)
    p.set_defaults(fn=cmd_quotient)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
