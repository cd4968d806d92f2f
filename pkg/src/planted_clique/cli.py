"""Command-line front end: ``planted-clique <subcommand> [options]``.

Exit codes: 0 success, 2 invalid parameters, 3 parse error, 4 resource limit.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .core import ProblemParams, RngStream, sample_null, sample_planted
from .detector import (RowLayout, detector_mask, f_batch, midpoint_threshold, tau_poly)
from .errors import InvalidParametersError, PlantedCliqueError
from .harness import (ExperimentConfig, phase_sweep, random_mask, render_svg, reports_to_csv,
                      reports_to_json, run_experiment, write_text)
from .ldub import analytic_vertex_bound, certify_hardness, ldub_exact, ldub_mc
from .mask_ops import donate, reduce_mask, restrict_mask
from .maskio import format_mask, format_observations, load_mask, load_observations

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_RESOURCE = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=_u64, default=d(0), help="master seed (u64)")
    p.add_argument("--threads", type=_positive, default=d(1), help="worker threads")
    p.add_argument("--out", default=d(None), help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=d("csv"),
                   help="report format; mask outputs use the mask file format unless json")


def _params(a, need_gamma=False) -> ProblemParams:
    if a.k is None and a.delta is None:
        raise InvalidParametersError("give either --k or --delta")
    if need_gamma and a.gamma is None:
        raise InvalidParametersError("--gamma is required")
    if a.k is not None:
        return ProblemParams(a.n, a.k, delta=a.delta, gamma=a.gamma, D=a.D, ell=a.ell)
    return ProblemParams.from_exponents(a.n, a.delta, a.gamma, D=a.D, ell=a.ell)


def _add_params(p, n_required=True):
    p.add_argument("--n", type=int, required=n_required)
    p.add_argument("--k", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--D", type=int)
    p.add_argument("--ell", type=int)


def _emit(a, payload: dict | list, text: str | None = None) -> None:
    if a.format == "json" or text is None:
        write_text(json.dumps(payload, indent=2, default=_jsonable) + "\n", a.out)
    else:
        write_text(text, a.out)


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _kv_csv(d: dict) -> str:
    keys = list(d)
    return ",".join(keys) + "\n" + ",".join(_scalar(d[k]) for k in keys) + "\n"


def _scalar(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _mask_payload(M) -> dict:
    return {"n": M.n, "edges": M.edges.tolist()}


def _subset(a):
    return None if a.S is None else _ints(a.S)


# ---- subcommands -------------------------------------------------------------

def cmd_gen_mask(a):
    if a.kind == "rectangular":
        rp, M = detector_mask(_params(a, need_gamma=True))
        info = {"R": rp.R, "L": rp.L, "ell": rp.ell, "edges": rp.edge_count, "truncated": rp.truncated}
    else:
        if a.edges is not None:
            m = a.edges
        else:
            if a.gamma is None:
                raise InvalidParametersError("random masks need --edges or --gamma")
            m = round(a.n ** a.gamma)
        M = random_mask(a.n, m, RngStream(a.seed, 0))
        info = {"edges": m}
    if a.format == "json":
        _emit(a, {**_mask_payload(M), "info": info})
    else:
        write_text(format_mask(M), a.out)


def cmd_sample(a):
    M = load_mask(a.mask)
    stream = RngStream(a.seed, 0)
    if a.planted:
        if a.k is None:
            raise InvalidParametersError("--planted needs --k")
        Y, K = sample_planted(ProblemParams(M.n, a.k), M, _subset(a), stream)
        members = K.members.tolist()
    else:
        Y, members = sample_null(M, stream), None
    if a.format == "json":
        _emit(a, {**_mask_payload(M), "values": Y.values.tolist(), "clique": members})
    else:
        head = "" if members is None else "# clique " + " ".join(map(str, members)) + "\n"
        write_text(head + format_observations(Y), a.out)


def cmd_donate(a):
    M2 = donate(load_mask(a.mask), a.v, a.u)
    _emit(a, _mask_payload(M2), format_mask(M2))


def cmd_reduce(a):
    M2, trace = reduce_mask(load_mask(a.mask), a.t)
    if a.format == "json":
        _emit(a, {**_mask_payload(M2), "t": trace.t, "final_vertex_count": trace.final_vertex_count,
                  "vertex_bound": trace.vertex_bound,
                  "removed": [s.removed_vertex for s in trace.steps]})
    else:
        removed = " ".join(str(s.removed_vertex) for s in trace.steps)
        write_text(f"# removed {removed}\n# vertices {trace.final_vertex_count} "
                   f"(bound {trace.vertex_bound:g})\n" + format_mask(M2), a.out)


def cmd_restrict(a):
    M = load_mask(a.mask)
    n_prime, M_S, phi = restrict_mask(M, _ints(a.S))
    if a.format == "json":
        _emit(a, {**_mask_payload(M_S), "phi": phi.tolist()})
    else:
        write_text("# phi " + " ".join(map(str, phi.tolist())) + "\n" + format_mask(M_S), a.out)


def _ldub_params(a, M) -> ProblemParams:
    return ProblemParams(M.n, a.k, D=a.D)


def cmd_ldub_exact(a):
    M = load_mask(a.mask)
    res = ldub_exact(_ldub_params(a, M), M, _subset(a), method=a.method)
    row = {"value": str(res.value), "float": float(res.value)}
    _emit(a, {**row, "per_degree_terms": [str(t) for t in res.per_degree_terms]}, _kv_csv(row))


def cmd_ldub_mc(a):
    M = load_mask(a.mask)
    res = ldub_mc(_ldub_params(a, M), M, _subset(a), trials=a.trials, rng=RngStream(a.seed, 0))
    row = {"value": res.value, "std_error": res.std_error, "trials": res.trials}
    _emit(a, res.as_dict(), _kv_csv(row))


def cmd_bound(a):
    params = ProblemParams(a.n, a.k, D=a.D)
    res = analytic_vertex_bound(params, a.vertices)
    _emit(a, res.as_dict(), _kv_csv({"value": res.value}))


def cmd_certify(a):
    if a.mask is not None:
        M = load_mask(a.mask)
        n = M.n
    else:
        if a.n is None or a.edges is None:
            raise InvalidParametersError("give --mask, or --n with --edges for a random mask")
        n = a.n
        M = random_mask(n, a.edges, RngStream(a.seed, 0))
    cert = certify_hardness(ProblemParams(n, a.k, D=a.D), M)
    d = cert.as_dict()
    _emit(a, d, _kv_csv({k: v for k, v in d.items() if not isinstance(v, (list, np.ndarray))}))


def cmd_detect(a):
    if a.observations is not None:
        Y = load_observations(a.observations)
        if a.k is None:
            raise InvalidParametersError("--k is required with --observations")
        if a.ell is None:
            raise InvalidParametersError("--ell is required with --observations")
        params = ProblemParams(Y.mask.n, a.k, ell=a.ell)
        layout, ell = RowLayout.from_mask(Y.mask), a.ell
        values = Y.values
    else:
        params = _params(a, need_gamma=True)
        rp, M = detector_mask(params)
        layout, ell = RowLayout.from_mask(M), rp.ell
        stream = RngStream(a.seed, 0)
        Y = sample_planted(params, M, None, stream)[0] if a.hypothesis == "planted" else sample_null(M, stream)
        values = Y.values
    tau = tau_poly(ell)
    stat = float(f_batch(values, layout, tau, params))
    thr = midpoint_threshold(layout, params) if a.threshold is None else a.threshold
    row = {"statistic": stat, "threshold": thr, "verdict": "planted" if stat > thr else "null",
           "ell": ell, "rows": layout.L, "edges": layout.edge_count}
    _emit(a, row, _kv_csv(row))


def _config(a, params) -> ExperimentConfig:
    return ExperimentConfig(params=params, mask_source=a.mask_source, trials=a.trials,
                            master_seed=a.seed, threshold_mode=a.threshold_mode, alpha=a.alpha,
                            ell=a.ell, workers=a.threads)


def cmd_run(a):
    report = run_experiment(_config(a, _params(a, need_gamma=a.mask_source in ("rectangular", "random"))))
    text = reports_to_json([report]) if a.format == "json" else reports_to_csv([report])
    write_text(text, a.out)


def cmd_sweep(a):
    deltas, gammas = _floats(a.deltas), _floats(a.gammas)
    grid = [(d, g) for d in deltas for g in gammas]
    base = ProblemParams(a.n, max(1, math.isqrt(a.n)), D=a.D, ell=a.ell)
    reports = phase_sweep(grid, _config(a, base))
    text = reports_to_json(reports) if a.format == "json" else reports_to_csv(reports)
    write_text(text, a.out)
    if a.svg:
        write_text(render_svg(reports), a.svg)


def _add_run_options(p):
    p.add_argument("--trials", type=_positive, default=100)
    p.add_argument("--mask-source", default="rectangular",
                   help="rectangular, random, or a mask file path")
    p.add_argument("--threshold-mode", choices=("midpoint", "null-quantile"), default="midpoint")
    p.add_argument("--alpha", type=float, default=0.05)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="planted-clique",
                     description="Planted clique detection under non-adaptive query masks.")
    parser.add_argument("--version", action="version", version=__version__)
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        _add_globals(p, suppress=True)
        p.set_defaults(func=func)
        return p

    p = add("gen-mask", cmd_gen_mask, "write a rectangular or random mask file")
    p.add_argument("kind", choices=("rectangular", "random"))
    _add_params(p)
    p.add_argument("--edges", type=int, help="edge count for random masks (default round(n^gamma))")

    p = add("sample", cmd_sample, "draw observations on a mask")
    p.add_argument("--mask", required=True)
    p.add_argument("--planted", action="store_true")
    p.add_argument("--k", type=int)
    p.add_argument("--S", help="comma-separated vertices the clique is confined to")

    p = add("donate", cmd_donate, "Donate(M, v -> u)")
    p.add_argument("--mask", required=True)
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--u", type=int, required=True)

    p = add("reduce", cmd_reduce, "repeat vertex removal until few vertices remain")
    p.add_argument("--mask", required=True)
    p.add_argument("--t", type=int, required=True)

    p = add("restrict", cmd_restrict, "restrict a mask to a vertex subset")
    p.add_argument("--mask", required=True)
    p.add_argument("--S", required=True, help="comma-separated vertices")

    for name, func, text in (("ldub-exact", cmd_ldub_exact, "exact low-degree upper bound"),
                             ("ldub-mc", cmd_ldub_mc, "Monte Carlo low-degree upper bound")):
        p = add(name, func, text)
        p.add_argument("--mask", required=True)
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--D", type=int)
        p.add_argument("--S", help="comma-separated vertices the clique is confined to")
        if name == "ldub-exact":
            p.add_argument("--method", choices=("auto", "pattern", "pairs"), default="auto")
        else:
            p.add_argument("--trials", type=_positive, default=10**5)

    p = add("bound", cmd_bound, "analytic bound for masks on few vertices")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--D", type=int)
    p.add_argument("--vertices", type=float, required=True)

    p = add("certify", cmd_certify, "hardness certificate for a mask")
    p.add_argument("--mask")
    p.add_argument("--n", type=int)
    p.add_argument("--edges", type=int, help="random mask size when --mask is absent")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--D", type=int)

    p = add("detect", cmd_detect, "run the degree-counting detector once")
    p.add_argument("--observations", help="observation file (i j ±1 lines)")
    _add_params(p, n_required=False)
    p.add_argument("--hypothesis", choices=("null", "planted"), default="null")
    p.add_argument("--threshold", type=float)

    p = add("run", cmd_run, "separation experiment at one (delta, gamma)")
    _add_params(p)
    _add_run_options(p)

    p = add("sweep", cmd_sweep, "phase-diagram sweep over a (delta, gamma) grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--deltas", required=True, help="comma-separated delta values")
    p.add_argument("--gammas", required=True, help="comma-separated gamma values")
    p.add_argument("--D", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--svg", help="also write an SVG heat map here")
    _add_run_options(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "detect" and args.observations is None and args.n is None:
            parser.error("detect needs --observations or --n")
    except SystemExit as exc:  # argparse usage errors, --help, --version
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    try:
        args.func(args)
    except PlantedCliqueError as exc:
        label = {EXIT_PARSE: "parse error", EXIT_RESOURCE: "resource limit"}.get(
            exc.exit_code, "invalid parameters")
        print(f"{label}: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"cannot read {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_PARSE
    except MemoryError:
        print("resource limit: out of memory", file=sys.stderr)
        return EXIT_RESOURCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
