"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 budget exceeded, 3 invariant violation.
Budgets default from ``WORDMAPS_BUDGET_<NAME>`` environment variables and an
optional ``--config`` JSON file whose keys mirror the long flag names.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__, kernels
from .errors import BudgetExceeded, InvariantViolation
from .quotients import INF

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_INVARIANT = 0, 1, 2, 3

BUDGETS = {
    "max_labels": 14,
    "max_quotients": 2_000_000,
    "bruteforce_limit": 10**7,
    "eig_budget": 4000,
    "path_budget": 10**7,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _env_budgets() -> dict:
    out = {}
    for key, default in BUDGETS.items():
        raw = os.environ.get(f"WORDMAPS_BUDGET_{key.upper()}")
        if raw is None:
            out[key] = default
            continue
        try:
            out[key] = int(raw)
        except ValueError:
            raise UsageError(f"WORDMAPS_BUDGET_{key.upper()} must be an integer") from None
    return out


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float) and x in (INF, -INF):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _graph(args):
    from .lifts import BaseGraph, load_base_graph

    if args.graph:
        return load_base_graph(args.graph)
    if args.bouquet:
        return BaseGraph.bouquet(args.bouquet)
    raise UsageError("give --graph FILE or --bouquet K")


def _word(args):
    from .words import parse_word

    return parse_word(args.word, args.k)


def _qbudget(args) -> dict:
    return {"max_labels": args.max_labels, "max_quotients": args.max_quotients}


# -- subcommands --------------------------------------------------------------


def cmd_word_analyze(args) -> dict:
    from .quotients import closed_trail, enumerate_quotients
    from .series import phi_and_series

    w = _word(args)
    analysis = phi_and_series(w, args.I, **_qbudget(args))
    report = analysis.to_json()
    qs = enumerate_quotients(closed_trail(w), **_qbudget(args), classify=True)
    census = {}
    for (chi, typ), c in sorted(qs.census().items()):
        census.setdefault(f"chi={chi}", {})[typ] = c
    report["quotient_count"] = len(qs)
    report["census"] = census
    if args.quotients:
        report["quotients"] = [q.to_json() for q in qs]
    return report


def cmd_word_scan(args) -> dict:
    from .scan import scan, summarize

    rows = scan(args.k, args.max_len, args.min_len, upsilon=args.upsilon, **_qbudget(args))
    return {"k": args.k, "max_len": args.max_len, "summary": summarize(rows), "rows": [r.to_json() for r in rows]}


def cmd_nica(args) -> dict:
    from .nica import free_spot_gf, h_set, nica_report

    if args.d < 1 or args.L < 1 or args.r < 0:
        raise UsageError("need d, L >= 1 and r >= 0")
    report = nica_report(args.d, args.L, args.r, args.max_value)
    report["free_spot_gf"] = {
        str(h): {str(j): str(c) for j, c in free_spot_gf(h, args.L, args.r).as_dict().items()}
        for h in h_set(args.d, args.L)
    }
    return report


def cmd_perm_mc(args) -> dict:
    from .nica import PoissonMixture, mixture_pmf
    from .perms import compare_pmf, mc_estimate
    from .words import cyclic_reduce, power_decompose

    w = _word(args)
    if args.samples < 1 or args.n < 1 or args.L < 1:
        raise UsageError("need samples, n, L >= 1")
    rep = mc_estimate(w, args.L, args.n, args.samples, args.seed, args.r_max)
    out = rep.to_json()
    core, _ = cyclic_reduce(w)
    if core.letters:
        d = power_decompose(core).exponent
        table = mixture_pmf(PoissonMixture.for_power(d, args.L))
        out["limit_law"] = {"d": d, "comparison": compare_pmf(rep, table.pmf)}
    return out


def cmd_perm_exact(args) -> dict:
    from .perms import exact_expectation_bruteforce
    from .series import expectation_rational

    w = _word(args)
    brute = exact_expectation_bruteforce(w, args.L, args.r, args.n, args.bruteforce_limit, args.workers)
    out = {"word": str(w), "L": args.L, "r": args.r, "n": args.n, "bruteforce": str(brute)}
    if not args.no_rational:
        f = expectation_rational(w, args.L, args.r, **_qbudget(args))
        value = f(args.n)
        out["rational_function"] = f.to_json()
        out["rational_value"] = str(value)
        out["agree"] = value == brute
        if value != brute:
            raise InvariantViolation(f"brute force {brute} != rational function {value}")
    return out


def cmd_lift_sample(args) -> dict:
    from .lifts import rho, sample_lift, spectrum_report, theorem_bound

    G = _graph(args)
    H = sample_lift(G, args.n, args.seed)
    rep = spectrum_report(H, args.tolerance, args.eig_budget)
    est = rho(G, args.radius)
    out = {"n": args.n, "seed": args.seed, **rep.to_json(), "rho": est.to_json()}
    out["theorem_bound"] = theorem_bound(rep.lambda1, est.upper_bound)
    if args.csv:
        Path(args.csv).write_text("".join(f"{x:.15g}\n" for x in rep.all_eigenvalues))
        out["csv"] = str(args.csv)
    return out


def cmd_lift_bound(args) -> dict:
    from .lifts import lambda1, rho, theorem_bound

    G = _graph(args)
    lam = lambda1(G)
    est = rho(G, args.radius, args.s_max)
    return {
        "lambda1": lam,
        "rho": est.to_json(),
        "theorem_bound": theorem_bound(lam, est.upper_bound),
        "theorem_bound_at_rho_lower": theorem_bound(lam, est.lower_bound),
    }


def cmd_census(args) -> dict:
    from .lifts import census_beta

    return census_beta(_graph(args), args.t, args.n, args.path_budget, **_qbudget(args))


def cmd_trace_check(args) -> dict:
    from .lifts import trace_identity_check

    lhs, rhs = trace_identity_check(_graph(args), args.t, args.n, args.bruteforce_limit, **_qbudget(args))
    if lhs != rhs:
        raise InvariantViolation(f"trace identity fails: {lhs} != {rhs}")
    return {"t": args.t, "n": args.n, "lhs": str(lhs), "rhs": str(rhs), "equal": True}


COMMANDS = {
    "word-analyze": cmd_word_analyze,
    "word-scan": cmd_word_scan,
    "nica": cmd_nica,
    "perm-mc": cmd_perm_mc,
    "perm-exact": cmd_perm_exact,
    "lift-sample": cmd_lift_sample,
    "lift-bound": cmd_lift_bound,
    "census": cmd_census,
    "trace-check": cmd_trace_check,
}


def build_parser(defaults: dict) -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", "-o", help="write the JSON report here instead of stdout")
    common.add_argument("--config", help="JSON file with default values for any flag")
    common.add_argument("--seed", type=int, default=0)
    for key, value in defaults.items():
        common.add_argument("--" + key.replace("_", "-"), dest=key, type=int, default=value)

    p = _Parser(prog="wordmaps", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"wordmaps {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def word_args(sp):
        sp.add_argument("--word", required=True, help="letters a,b,...; upper case for inverses")
        sp.add_argument("--k", type=int, default=None, help="number of generators")

    def graph_args(sp):
        sp.add_argument("--graph", help="base graph file with lines 'tail head label'")
        sp.add_argument("--bouquet", type=int, help="use a one-vertex bouquet of this many loops")

    sp = sub.add_parser("word-analyze", parents=[common])
    word_args(sp)
    sp.add_argument("--I", type=int, default=None, help="series truncation order (default |w|)")
    sp.add_argument("--quotients", action="store_true", help="include every quotient graph")

    sp = sub.add_parser("word-scan", parents=[common])
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--max-len", type=int, required=True)
    sp.add_argument("--min-len", type=int, default=1)
    sp.add_argument("--upsilon", action="store_true", help="report the pair-graph check for primitive words")

    sp = sub.add_parser("nica", parents=[common])
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--L", type=int, default=1)
    sp.add_argument("--r", type=int, default=4)
    sp.add_argument("--max-value", type=int, default=None)

    sp = sub.add_parser("perm-mc", parents=[common])
    word_args(sp)
    sp.add_argument("--L", type=int, default=1)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--r-max", type=int, default=4)

    sp = sub.add_parser("perm-exact", parents=[common])
    word_args(sp)
    sp.add_argument("--L", type=int, default=1)
    sp.add_argument("--r", type=int, default=1)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--no-rational", action="store_true", help="skip the rational-function comparison")

    sp = sub.add_parser("lift-sample", parents=[common])
    graph_args(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--tolerance", type=float, default=1e-6)
    sp.add_argument("--radius", type=int, default=30)
    sp.add_argument("--csv", help="write all lift eigenvalues (descending) to this CSV file")

    sp = sub.add_parser("lift-bound", parents=[common])
    graph_args(sp)
    sp.add_argument("--radius", type=int, default=30)
    sp.add_argument("--s-max", type=int, default=None)

    sp = sub.add_parser("census", parents=[common])
    graph_args(sp)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--n", type=int, default=None, help="also evaluate Phi bounds at this n")

    sp = sub.add_parser("trace-check", parents=[common])
    graph_args(sp)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    return p


def _parse(argv) -> argparse.Namespace:
    defaults = _env_budgets()
    parser = build_parser(defaults)
    args = parser.parse_args(argv)
    if args.config:
        try:
            config = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(config, dict):
            raise UsageError("config must be a JSON object")
        explicit = {a.lstrip("-").split("=")[0].replace("-", "_") for a in argv if a.startswith("--")}
        for key, value in config.items():
            key = key.replace("-", "_")
            if not hasattr(args, key):
                raise UsageError(f"unknown config key {key!r}")
            if key not in explicit:
                setattr(args, key, value)
    for key in BUDGETS:
        if getattr(args, key) < 1:
            raise UsageError(f"budget {key} must be positive")
    return args


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
    except UsageError as exc:
        print(f"wordmaps: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        body = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"wordmaps: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"wordmaps: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantViolation as exc:
        print(f"wordmaps: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValueError, OSError) as exc:
        print(f"wordmaps: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    from .perms import GENERATOR_ID

    report = {
        "command": args.command,
        "result": _jsonable(body),
        "metadata": {
            "tool": "wordmaps",
            "version": __version__,
            "kernel_backend": kernels.BACKEND,
            "budgets": {k: getattr(args, k) for k in BUDGETS},
            "seed": args.seed,
            "prng": GENERATOR_ID,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        },
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
