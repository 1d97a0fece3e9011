"""Command line front end: zetascope analyze|poles|coeff|verify <problem.json>."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import InputError, ResourceLimitError
from .exact import parse_rational
from .pipeline import EXIT_PRECONDITION, ProblemSpec, render_json, render_text, run_analyze


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zetascope", description="Candidate poles and Laurent data of local zeta functions.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("file", help="problem file (UTF-8 JSON)")
        sp.add_argument("--depth", help="largest lambda to enumerate, as p/q")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--seed", type=int, help="seed for the numerical non-degeneracy search")
        sp.add_argument("--tol", type=float, help="quadrature tolerance")
        sp.add_argument("--out", help="write the report here instead of stdout")

    a = sub.add_parser("analyze", help="full pipeline")
    common(a)
    a.add_argument("--verify", action="store_true", help="run the numerical oracle checks")
    common(sub.add_parser("poles", help="candidate poles and vanishing certificates only"))
    c = sub.add_parser("coeff", help="exact coefficients of one pole")
    common(c)
    c.add_argument("--pole", type=int, required=True)
    v = sub.add_parser("verify", help="numerical check of one pole")
    common(v)
    v.add_argument("--pole", type=int, required=True)
    return p


def _load(args) -> ProblemSpec:
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {args.file}: {exc.strerror}") from exc
    spec = ProblemSpec.from_text(text)
    opts = spec.options
    if args.seed is not None:
        opts = replace(opts, seed=args.seed)
    if args.tol is not None:
        if args.tol <= 0:
            raise InputError("--tol must be positive")
        opts = replace(opts, tolerance=args.tol)
    if args.depth is not None:
        try:
            depth = parse_rational(args.depth)
        except ValueError as exc:
            raise InputError(f"--depth: {exc}") from exc
        if depth <= 0:
            raise InputError("--depth must be positive")
        spec = replace(spec, depth=depth)
    return replace(spec, options=opts)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        spec = _load(args)
        if args.command == "analyze":
            report, code = run_analyze(spec, do_verify=args.verify or None)
        elif args.command == "poles":
            report, code = run_analyze(spec, do_verify=False, stage="poles")
        elif args.command == "coeff":
            report, code = run_analyze(spec, do_verify=False, report_poles=[args.pole])
        else:
            report, code = run_analyze(spec, verify_poles=[args.pole], report_poles=[args.pole])
    except (InputError, ResourceLimitError) as exc:
        print(f"zetascope: error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    text = render_json(report) if args.format == "json" else render_text(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if report["status"] != "ok":
        print(f"zetascope: precondition failed: {report['hypothesis']}: {report['detail']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
