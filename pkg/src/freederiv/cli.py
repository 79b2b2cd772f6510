"""Command-line interface: ``freederiv <command> ...``.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from fractions import Fraction

import numpy as np

from . import field
from .als import Als, series_expand
from .derivation import directional, formal_derivative, partial
from .errors import ExprSyntaxError, FreeDerivError
from .evaluation import als_eval, als_equal
from .expr import als_from_text, expr_letters, expr_to_als, parse, resolve_letters
from .minimize import rank


class _UsageError(Exception):
    pass


def _letters(arg: str | None) -> list[str] | None:
    if not arg:
        return None
    return [s.strip() for s in arg.split(",") if s.strip()]


def _build(text: str, letters, extra=(), minimized: bool = False) -> Als:
    e, letters = resolve_letters(text, letters)
    for y in extra:
        if y and y not in letters:
            letters.append(y)
    return expr_to_als(e, letters, minimize=minimized)


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _UsageError(f"{path}: invalid JSON ({exc})") from exc


def _scalar_exact(x) -> bool:
    return isinstance(x, int) or (isinstance(x, str) and "." not in x and "e" not in x.lower())


def _matrix(rows, exact: bool) -> np.ndarray:
    if exact:
        return field.exact_array([[Fraction(str(x)) for x in r] for r in rows])
    return np.array([[float(Fraction(x)) if isinstance(x, str) else float(x) for x in r] for r in rows])


def _assignment(data) -> dict[str, np.ndarray]:
    if not isinstance(data, dict) or "assign" not in data:
        raise _UsageError('assignment JSON must look like {"m": 3, "assign": {"x": [[...]]}}')
    exact = all(_scalar_exact(x) for mat in data["assign"].values() for r in mat for x in r)
    out = {k: _matrix(v, exact) for k, v in data["assign"].items()}
    m = data.get("m")
    if m is not None and any(a.shape != (m, m) for a in out.values()):
        raise _UsageError(f"assignment matrices must be {m}x{m}")
    return out


def _fmt_matrix(a: np.ndarray) -> list[list[str]]:
    return [[field.format_scalar(x) for x in row] for row in a]


# ---------------------------------------------------------------- commands


def cmd_parse(args) -> int:
    f = _build(args.expr, _letters(args.letters), minimized=args.minimize)
    print(f.dumps())
    return 0


def cmd_derive(args) -> int:
    f = _build(args.expr, _letters(args.letters), extra=(args.wrt, args.dir))
    if args.minimize:
        out = directional(f, args.wrt, args.dir) if args.dir else partial(f, args.wrt)
    else:
        out = formal_derivative(f, args.wrt, args.dir)
    print(out.dumps())
    return 0


def cmd_series(args) -> int:
    f = _build(args.expr, _letters(args.letters))
    print(series_expand(f, args.degree).to_text(order=f.letters))
    return 0


def cmd_eval(args) -> int:
    sigma = _assignment(_read_json(args.assign))
    f = _build(args.expr, _letters(args.letters))
    print(json.dumps(_fmt_matrix(als_eval(f, sigma))))
    return 0


def cmd_equal(args) -> int:
    letters = _letters(args.letters)
    if letters is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            seen: dict[str, None] = {}
            for text in (args.expr1, args.expr2):
                for y in expr_letters(parse(text)):
                    seen.setdefault(y, None)
        letters = list(seen)
        warnings.warn(f"letters inferred from expressions: {','.join(letters)}", stacklevel=1)
    f = als_from_text(args.expr1, letters)
    g = als_from_text(args.expr2, letters)
    res = als_equal(f, g, trials=args.trials, seed=args.seed)
    print(res.verdict.value)
    if res.witness is not None:
        print(json.dumps(res.witness.to_json()))
    return 0


def cmd_rank(args) -> int:
    print(rank(_build(args.expr, _letters(args.letters))))
    return 0


def cmd_newton(args) -> int:
    from .newton import NewtonProblem, StepPattern, newton_solve

    f = _build(args.f, _letters(args.letters), extra=(args.wrt,))
    x0_data = _read_json(args.x0)
    if isinstance(x0_data, dict):
        x0_data = x0_data.get("assign", {}).get(args.wrt)
        if x0_data is None:
            raise _UsageError(f"x0 file has no matrix for {args.wrt!r}")
    X0 = _matrix(x0_data, exact=False)
    params = {}
    if args.params:
        params = {k: field.float_array(v) for k, v in _assignment(_read_json(args.params)).items()}
    reference = _matrix(_read_json(args.reference), exact=False) if args.reference else None
    problem = NewtonProblem(f, args.wrt, X0, params, direction=args.dir, tol=args.tol, max_iter=args.max_iter,
                            reference=reference, commutator=args.commutator)
    step_system = pattern = None
    if args.step_als:
        step_system = Als.from_json(_read_json(args.step_als))
    if args.pattern:
        p = _read_json(args.pattern)
        pattern = StepPattern(int(p["split"]), tuple(map(tuple, p["t_blocks"])), tuple(map(tuple, p["u_blocks"])))
    X, trace = newton_solve(problem, method=args.method, step_system=step_system, pattern=pattern)
    sys.stdout.write(trace.to_csv())
    print(f"# status: {trace.status}", file=sys.stderr)
    return 0


def cmd_tables(args) -> int:
    from . import tables

    if args.which == "cbrt2":
        sys.stdout.write(tables.format_rows(["k", "abs_step", "x_k"], tables.cbrt2()))
    elif args.which == "table1":
        rows = tables.table1(aligned=args.aligned)
        sys.stdout.write(tables.format_rows(["k", "norm_step", "norm_err", "norm_commutator"], rows))
    else:
        _, trace = tables.table2(method=args.method)
        sys.stdout.write(trace.to_csv())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="freederiv", description="Free derivatives of nc rational expressions.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("parse", cmd_parse, "expression to ALS JSON")
    sp.add_argument("expr")
    sp.add_argument("--letters")
    sp.add_argument("--minimize", action="store_true")

    sp = add("derive", cmd_derive, "free derivative as ALS JSON")
    sp.add_argument("expr")
    sp.add_argument("--wrt", required=True)
    sp.add_argument("--dir")
    sp.add_argument("--letters")
    sp.add_argument("--minimize", action="store_true")

    sp = add("series", cmd_series, "truncated power series")
    sp.add_argument("expr")
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--letters")

    sp = add("eval", cmd_eval, "evaluate at matrices")
    sp.add_argument("expr")
    sp.add_argument("--assign", required=True)
    sp.add_argument("--letters")

    sp = add("equal", cmd_equal, "compare two expressions")
    sp.add_argument("expr1")
    sp.add_argument("expr2")
    sp.add_argument("--trials", type=int, default=5)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--letters")

    sp = add("rank", cmd_rank, "minimal dimension")
    sp.add_argument("expr")
    sp.add_argument("--letters")

    sp = add("newton", cmd_newton, "nc Newton iteration, CSV trace")
    sp.add_argument("--f", required=True)
    sp.add_argument("--wrt", required=True)
    sp.add_argument("--x0", required=True)
    sp.add_argument("--params")
    sp.add_argument("--letters")
    sp.add_argument("--dir", default="b")
    sp.add_argument("--method", choices=["probe", "pq"], default="probe")
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--max-iter", type=int, default=50)
    sp.add_argument("--reference")
    sp.add_argument("--commutator")
    sp.add_argument("--step-als")
    sp.add_argument("--pattern")

    sp = add("tables", cmd_tables, "reproduce the cube-root tables")
    sp.add_argument("which", choices=["cbrt2", "table1", "table2"])
    sp.add_argument("--aligned", action="store_true", help="table1: error of X_k in row k")
    sp.add_argument("--method", choices=["probe", "pq"], default="probe")
    return p


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def main(argv=None) -> int:
    warnings.showwarning = _show_warning
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ExprSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return 2
    except (FreeDerivError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
