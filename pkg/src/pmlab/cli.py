"""Command-line entry point: ``pmlab <subcommand> [options]``.

Every run prints (or writes to ``--out``) one JSON document whose
``header`` records the parsed arguments, library versions and seed.
Exit codes: 0 success, 1 invalid arguments or caps, 2 suite failure,
3 infeasible parameter regime.
"""
from __future__ import annotations

import argparse
import json
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import reduce

import mpmath
import numpy
import scipy

from . import __version__
from .errors import EtaOutOfRange, InfeasibleRegime, PMLabError

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_INFEASIBLE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # keep exit code 2 for suite failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _jsonable(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (numpy.integer,)):
        return int(x)
    if isinstance(x, (numpy.floating, mpmath.mpf)):
        return float(x)
    return x


def _header(args) -> dict:
    # output locations are not part of the experiment
    spec = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "csv")}
    return {
        "spec": spec,
        "versions": {"pmlab": __version__, "python": platform.python_version(),
                     "numpy": numpy.__version__, "scipy": scipy.__version__,
                     "mpmath": mpmath.__version__},
        "seed": getattr(args, "seed", None),
    }


def _emit(args, result: dict) -> None:
    doc = json.dumps(_jsonable({"header": _header(args), "result": result}),
                     sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(doc + "\n")
    else:
        print(doc)


def _split(samples: int, streams: int) -> list[int]:
    base, extra = divmod(samples, streams)
    return [base + (i < extra) for i in range(streams)]


def _map_streams(fn, jobs: list, streams: int) -> list:
    if streams <= 1:
        return [fn(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=streams) as pool:
        return list(pool.map(fn, *zip(*jobs)))


# -- subcommands --------------------------------------------------------------------


def _sample_stream(n, d, seed, stream, count):
    from .graph import encode_graph6
    from .sampler import RngStream, sample_regular

    gen = RngStream(seed, stream).generator()
    return [encode_graph6(sample_regular(n, d, gen)).decode() for _ in range(count)]


def cmd_sample(args) -> int:
    jobs = [(args.n, args.d, args.seed, s, c)
            for s, c in enumerate(_split(args.samples, args.streams))]
    lines = [g for chunk in _map_streams(_sample_stream, jobs, args.streams) for g in chunk]
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.writelines(g + "\n" for g in lines)
    _emit(args, {"n": args.n, "d": args.d, "count": len(lines),
                 "graph6": lines if not args.csv else args.csv})
    return EXIT_OK


def cmd_count(args) -> int:
    from .counting import count_perfect_matchings, count_pm_in_complement, count_triangles
    from .graph import decode_graph6

    codes = list(args.graph6)
    if args.input:
        with open(args.input) as fh:
            codes += [ln.strip() for ln in fh if ln.strip()]
    if not codes:
        raise PMLabError("give graph6 strings or --input FILE")
    rows = []
    for code in codes:
        G = decode_graph6(code)
        rows.append({"graph6": code, "n": G.n, "Y": count_perfect_matchings(G),
                     "Z": count_pm_in_complement(G), "X": count_triangles(G)})
    _emit(args, {"graphs": rows})
    return EXIT_OK


def cmd_enumerate(args) -> int:
    from .counting import enumerate_regular

    ens = enumerate_regular(args.n, args.d)
    result = {"n": args.n, "d": args.d, "size": len(ens)}
    if args.csv:
        g6_path = args.csv.removesuffix(".csv") + ".g6"
        with open(g6_path, "w") as g6, open(args.csv, "w") as fh:
            ens.export(g6, fh)
        result.update(graph6_file=g6_path, csv_file=args.csv)
    _emit(args, result)
    return EXIT_OK


def cmd_pairs(args) -> int:
    from .pairs import log_pm_pair_count_asymptotic, pm_pair_counts_exact

    mode = args.mode or "exact"
    if mode == "exact":
        table = {k: m for k, m in enumerate(pm_pair_counts_exact(args.n).counts)}
    elif mode == "asymptotic":
        table = {k: float(log_pm_pair_count_asymptotic(args.n, k)) for k in range(args.n // 2)}
    else:
        raise PMLabError(f"pairs mode must be exact or asymptotic, not {mode!r}")
    _emit(args, {"n": args.n, "mode": mode, "log_scale": mode == "asymptotic", "m_k": table})
    return EXIT_OK


def cmd_moments(args) -> int:
    from dataclasses import asdict

    from .asymptotics import ensemble_report, moment_report
    from .config import DEFAULT_LIMITS
    from .counting import enumerate_regular

    cap = DEFAULT_LIMITS.enum_cap(args.d)
    result = {}
    if args.mode in (None, "formula", "both"):
        result["formula"] = asdict(moment_report(args.n, args.d))
    if args.mode in ("exact", "both") or (args.mode is None and args.n <= cap):
        result["ensemble"] = asdict(ensemble_report(enumerate_regular(args.n, args.d)))
    _emit(args, result)
    return EXIT_OK


def _coupling_stream(n, d, q, seed, stream, count, keep):
    from .counting import enumerate_regular
    from .coupling import build_exact_config, run_steps
    from .sampler import RngStream

    cfg = build_exact_config(enumerate_regular(n, d), enumerate_regular(n, d + 1), q)
    return run_steps(cfg, count, RngStream(seed, stream), keep_outcomes=keep)


def cmd_coupling(args) -> int:
    from .coupling import (build_asymptotic_config, build_exact_config, containment_probability,
                           exact_marginal, max_uniform_deviation, verify_degree_bounds,
                           write_outcomes_csv)
    from .counting import enumerate_regular
    from .stats import chi_square_uniform

    mode = args.mode or "exact"
    if mode == "asymptotic":
        cfg = build_asymptotic_config(args.n, args.d, args.alpha, args.C, args.Cprime, strict=False)
        feasible = cfg.eta < 1
        _emit(args, {"config": cfg.to_dict(), "feasible": feasible})
        return EXIT_OK if feasible else EXIT_INFEASIBLE
    if mode != "exact":
        raise PMLabError(f"coupling mode must be exact or asymptotic, not {mode!r}")
    cfg = build_exact_config(enumerate_regular(args.n, args.d),
                             enumerate_regular(args.n, args.d + 1), args.q)
    report = verify_degree_bounds(cfg)
    result = {"config": cfg.to_dict(),
              "degree_bounds": {**vars(report), "passed": report.passed},
              "containment_exact": containment_probability(cfg)}
    if args.marginal:
        marg = exact_marginal(cfg)
        result["marginal"] = marg
        result["marginal_max_deviation"] = max_uniform_deviation(marg)
    if args.samples:
        jobs = [(args.n, args.d, args.q, args.seed, s, c, bool(args.csv))
                for s, c in enumerate(_split(args.samples, args.streams))]
        run = reduce(lambda a, b: a.merge(b), _map_streams(_coupling_stream, jobs, args.streams))
        stat, p = chi_square_uniform(run.class_counts)
        result["monte_carlo"] = {"samples": run.samples, "containment_rate": run.containment_rate,
                                 "branches": run.branches, "chi_square": stat, "p_value": p}
        if args.csv:
            with open(args.csv, "w") as fh:
                write_outcomes_csv(run.outcomes, fh)
    _emit(args, result)
    return EXIT_OK


def _chain_stream(n, d, steps, q, seed, stream, count):
    from .counting import enumerate_regular
    from .coupling import build_exact_config, run_chains
    from .sampler import RngStream

    ens = [enumerate_regular(n, d + j) for j in range(steps + 1)]
    cfgs = [build_exact_config(a, b, q) for a, b in zip(ens, ens[1:])]
    return run_chains(cfgs, count, RngStream(seed, stream))


def cmd_chain(args) -> int:
    from .counting import enumerate_regular
    from .coupling import build_exact_config, chain_containment_probability
    from .stats import chi_square_uniform

    ens = [enumerate_regular(args.n, args.d + j) for j in range(args.steps + 1)]
    cfgs = [build_exact_config(a, b, args.q) for a, b in zip(ens, ens[1:])]
    result = {"etas": [c.eta for c in cfgs],
              "containment_exact": chain_containment_probability(cfgs)}
    if args.samples:
        jobs = [(args.n, args.d, args.steps, args.q, args.seed, s, c)
                for s, c in enumerate(_split(args.samples, args.streams))]
        run = reduce(lambda a, b: a.merge(b), _map_streams(_chain_stream, jobs, args.streams))
        stat, p = chi_square_uniform(run.class_counts)
        result["monte_carlo"] = {"samples": run.samples, "containment_rate": run.containment_rate,
                                 "final_chi_square": stat, "final_p_value": p}
    _emit(args, result)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .acceptance import run_suite

    results = run_suite(args.suite, args.seed)
    for r in results:
        print(r.line(), file=sys.stderr)
    passed = all(r.passed for r in results)
    # timings vary between runs, keep them out of the JSON body
    body = [{k: v for k, v in r.to_dict().items() if k != "seconds"} for r in results]
    _emit(args, {"suite": args.suite, "passed": passed, "criteria": body})
    return EXIT_OK if passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pmlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"pmlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, *flags):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        if "n" in flags:
            sp.add_argument("--n", type=int, required=True)
        if "d" in flags:
            sp.add_argument("--d", type=int, required=True)
        if "rng" in flags:
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--streams", type=int, default=1)
            sp.add_argument("--samples", type=int, default=0)
        if "mode" in flags:
            sp.add_argument("--mode", default=None)
        if "q" in flags:
            sp.add_argument("--q", type=float, default=0.1)
        sp.add_argument("--out", default=None, help="write the JSON document here")
        return sp

    s = add("sample", cmd_sample, "uniform d-regular graphs as graph6", "n", "d", "rng")
    s.add_argument("--csv", default=None, help="write graph6 lines to this file")

    c = add("count", cmd_count, "Y, Z and X of graphs given in graph6")
    c.add_argument("graph6", nargs="*")
    c.add_argument("--input", default=None)

    e = add("enumerate", cmd_enumerate, "enumerate G(n, d)", "n", "d")
    e.add_argument("--csv", default=None, help="CSV path; graph6 goes next to it")

    add("pairs", cmd_pairs, "overlap table of perfect-matching pairs", "n", "mode")
    add("moments", cmd_moments, "moment report (formula, exact or both)", "n", "d", "mode")

    cp = add("coupling", cmd_coupling, "build and run one coupling step",
             "n", "d", "rng", "mode", "q")
    cp.add_argument("--alpha", type=float, default=0.1)
    cp.add_argument("--C", type=float, default=1.0)
    cp.add_argument("--Cprime", type=float, default=1.0)
    cp.add_argument("--marginal", action="store_true")
    cp.add_argument("--csv", default=None, help="stream outcomes to this CSV")

    ch = add("chain", cmd_chain, "chained coupling d -> d+steps", "n", "d", "rng", "q")
    ch.add_argument("--steps", type=int, default=2)

    v = sub.add_parser("verify", help="run an acceptance suite")
    v.set_defaults(func=cmd_verify)
    v.add_argument("suite", nargs="?", default=None)
    v.add_argument("--suite", dest="suite_opt", default=None)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", default=None)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        args.suite = args.suite or args.suite_opt or "fast"
        del args.suite_opt
    if getattr(args, "streams", 1) < 1:
        parser.error("--streams must be at least 1")
    try:
        return args.func(args)
    except (EtaOutOfRange, InfeasibleRegime) as exc:
        print(f"pmlab: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (PMLabError, KeyError) as exc:
        print(f"pmlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
