"""Command-line pipeline: sample, formulate, census, solve, certify, check.

Exit codes: 0 ok, 1 check/diagnostic failure, 2 usage error, 3 genericity
failure (resample the random inputs).
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from schubsquare import census as census_mod
from schubsquare import combinatorics as comb
from schubsquare import coordinates as coords
from schubsquare import formulations as forms
from schubsquare import polysys
from schubsquare import solve_certify as sc

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_GENERICITY = 3


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def cmd_sample(args) -> int:
    t = comb.DescentType(args.n, tuple(int(x) for x in args.a.split(",")))
    cond = comb.parse_condition(args.w, t)
    flag = forms.materialize_flag(args.flag, t.n, os.getcwd())
    point = coords.sample_cell_point(cond, flag, args.seed)
    _write(args.out, coords.emit_matrix(point))
    return EXIT_OK


def cmd_formulate(args) -> int:
    spec = forms.parse_problem(_read(args.problem))
    base = os.path.dirname(os.path.abspath(args.problem))
    problem, strategy = forms.materialize_problem(spec, base)
    system, report = forms.assemble_problem(problem, strategy)
    _write(args.out, polysys.emit_system(system))
    if args.format == "json-like":
        text = report.json_like()
    elif args.format == "csv":
        text = report.csv()
    else:
        text = report.text()
    _write(args.report, text)
    return EXIT_OK


def cmd_census(args) -> int:
    report = census_mod.run_census(args.n, mode=args.mode,
                                   reduced_pd=args.reduced_pd, jobs=args.jobs)
    if args.format == "csv":
        _write(args.out, report.csv())
    else:
        _write(args.out, report.text())
    if args.csv:
        _write(args.csv, report.csv())
    if args.n == 9 and args.mode == "all" and args.reduced_pd:
        sys.stdout.write(census_mod.split_diff(report,
                                               census_mod.REFERENCE_SPLIT_ALL))
    return EXIT_OK


def cmd_solve(args) -> int:
    system = polysys.parse_system(_read(args.system))
    solutions = sc.solve_total_degree(system, seed=args.seed)
    _write(args.out, sc.emit_solutions(solutions, system.nvars))
    return EXIT_OK


def cmd_certify(args) -> int:
    system = polysys.parse_system(_read(args.system))
    solutions = sc.parse_solutions(_read(args.solutions))
    if args.soft:
        certs = []
        for s in solutions:
            pts = [sc.QQi.from_complex(v) for v in s.point]
            try:
                certs.append(sc.alpha_test_soft(system, pts))
            except sc.SingularJacobianError:
                certs.append(sc.Certificate(tuple(pts), Fraction(0), Fraction(0),
                                            Fraction(0), certified=False))
    else:
        points = [[sc.QQi.from_complex(v, max_denominator=10 ** 12)
                   for v in s.point] for s in solutions]
        certs = sc.certify_batch(system, points, refine_steps=args.refine)
    _write(args.out, sc.emit_certificates(certs))
    return EXIT_OK


# ---------------------------------------------------------------------------
# invariant batteries

def _battery_identities(n_max: int):
    """Exhaustive per-condition identities up to n_max."""
    for n in range(2, n_max + 1):
        for t in comb.all_descent_types(n):
            for cond in comb.enumerate_conditions(t):
                full = comb.lift_indices(cond)
                red = comb.reduced_lift_indices(cond)
                if cond.length + cond.codim != t.dim:
                    return False, f"length identity fails at {cond}"
                if t.dim + full.size - full.equation_count(n) != cond.length:
                    return False, f"lifted count identity fails at {cond}"
                if t.dim + red.size - red.equation_count(n) != cond.length:
                    return False, f"reduced count identity fails at {cond}"
                for k in range(len(full.entries)):
                    if not set(red.entries[k]) <= set(full.entries[k]):
                        return False, f"reduced set not inside full at {cond}"
                dual = comb.dual_condition(cond)
                if comb.dual_condition(dual) != cond:
                    return False, f"duality is not an involution at {cond}"
                if dual.length != cond.length or dual.codim != cond.codim:
                    return False, f"duality breaks length/codim at {cond}"
    return True, f"identities exhaustive to n={n_max}"


def _battery_patterns(n_max: int):
    for n in range(2, n_max + 1):
        for t in comb.all_descent_types(n):
            for cond in comb.enumerate_conditions(t):
                if coords.stiefel_pattern(cond).var_count != cond.length:
                    return False, f"pattern count fails at {cond}"
    return True, f"pattern counts exhaustive to n={n_max}"


def _battery_roundtrips(seeds=(1, 2, 3)):
    t = comb.DescentType(6, (2, 4))
    for seed in seeds:
        flag = coords.random_flag(6, seed)
        for w in ((3, 5, 2, 6, 1, 4), (2, 4, 1, 5, 3, 6)):
            cond = comb.SchubertCondition(w, t)
            pt = coords.sample_cell_point(cond, flag, seed)
            if coords.position(pt, flag, t) != cond:
                return False, f"position round trip fails at {cond} seed {seed}"
    return True, "sample/position round trips"


def _battery_lifts(seeds=range(10)):
    t = comb.DescentType(8, (3,))
    cond = comb.parse_condition("458|12367", t)
    flag = coords.random_flag(8, 7)
    for seed in seeds:
        pt = coords.sample_cell_point(cond, flag, seed)
        for kind in ("full", "reduced"):
            forms.solve_lift(cond, flag, pt, kind)  # raises on failure
    return True, "exact lifts on in-cell samples"


def _battery_census_small():
    import itertools as it
    for n in (3, 4):
        report = census_mod.run_census(n, jobs=1)
        expected = 0
        for t in comb.all_descent_types(n):
            for w in it.permutations(range(1, n + 1)):
                if comb.descent_set(w) <= set(t.a):
                    c = comb.SchubertCondition(w, t)
                    if 1 < c.codim < t.dim / 2:
                        expected += 1
        if report.total_varieties != expected:
            return False, f"census n={n} total {report.total_varieties} != {expected}"
    return True, "census totals vs direct enumeration (n<=4)"


def cmd_check(args) -> int:
    level = args.level
    batteries = []
    if level == "fast":
        batteries = [
            ("identities-n5", lambda: _battery_identities(5)),
            ("patterns-n5", lambda: _battery_patterns(5)),
            ("roundtrips", _battery_roundtrips),
            ("lifts", _battery_lifts),
            ("census-small", _battery_census_small),
        ]
    elif level.startswith("exhaustive-"):
        tail = level.split("-", 1)[1]
        if tail.endswith("census"):
            n = int(tail.split("-")[0])

            def census_battery():
                report = census_mod.run_census(n, jobs=args.jobs)
                if n == 9 and report.total_varieties != census_mod.REFERENCE_TOTAL_ALL:
                    return False, f"census total {report.total_varieties}"
                sys.stdout.write(report.text())
                return True, f"census n={n} total {report.total_varieties}"

            batteries = [(f"census-{n}", census_battery)]
        else:
            n = int(tail)
            batteries = [
                (f"identities-n{n}", lambda: _battery_identities(n)),
                (f"patterns-n{n}", lambda: _battery_patterns(n)),
            ]
    else:
        print(f"unknown check level {level!r}", file=sys.stderr)
        return EXIT_USAGE
    failures = 0
    for name, fn in batteries:
        ok, message = fn()
        print(f"{'PASS' if ok else 'FAIL'} {name}: {message}")
        if not ok:
            failures += 1
    return EXIT_OK if failures == 0 else EXIT_FAIL


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schubsquare",
        description="Square bilinear formulations of Schubert problems",
    )
    parser.add_argument("--jobs", type=int, default=None,
                        help="worker count (default: SCHUBSQUARE_JOBS or cores)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample an exact point of a Schubert cell")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", required=True, help="comma-separated descent positions")
    p.add_argument("--w", required=True, help="permutation text")
    p.add_argument("--flag", default="standard",
                   help="standard | opposite | random:<seed> | file:<path>")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("formulate", help="assemble a problem file into a system")
    p.add_argument("problem")
    p.add_argument("--out", default="-", help="system file")
    p.add_argument("--report", default="-", help="formulation report")
    p.add_argument("--format", choices=("text", "json-like", "csv"),
                   default="text")
    p.set_defaults(fn=cmd_formulate)

    p = sub.add_parser("census", help="added-variable census over C^n manifolds")
    p.add_argument("--n", type=int, default=9)
    p.add_argument("--mode", choices=("all", "favorable"), default="all")
    p.add_argument("--reduced-pd", dest="reduced_pd", action="store_true",
                   default=True)
    p.add_argument("--plain-pd", dest="reduced_pd", action="store_false")
    p.add_argument("--out", default="-")
    p.add_argument("--csv", default=None, help="also write per-manifold CSV")
    p.add_argument("--format", choices=("text", "json-like", "csv"),
                   default="text")
    p.set_defaults(fn=cmd_census)

    p = sub.add_parser("solve", help="total-degree homotopy on a system file")
    p.add_argument("system")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("certify", help="alpha-certify solutions of a system")
    p.add_argument("system")
    p.add_argument("solutions")
    p.add_argument("--refine", type=int, default=3,
                   help="exact Newton refinements before testing")
    p.add_argument("--soft", action="store_true",
                   help="floating-point (heuristic) certification")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("check", help="run invariant batteries")
    p.add_argument("level", nargs="?", default="fast",
                   help="fast | exhaustive-<n> | exhaustive-<n>-census")
    p.set_defaults(fn=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if args.jobs is not None:
        os.environ["SCHUBSQUARE_JOBS"] = str(args.jobs)
    try:
        return args.fn(args)
    except coords.GenericityError as exc:
        print(f"genericity failure: {exc}; resample the random inputs",
              file=sys.stderr)
        return EXIT_GENERICITY
    except (forms.CodimensionError, forms.InconsistentSystemError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ValueError, FileNotFoundError, polysys.CapacityError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
