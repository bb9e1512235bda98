"""Command-line front end.

Analytic moments, distribution/density/quantile evaluation, Monte Carlo
simulation, and the named verification suites, each emitting CSV (default)
or a single JSON record.  Every command is a pure function of its flags and
seed: repeated invocations produce identical bytes.  Wall-clock timing is
therefore only included on request (--timing).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import analytic, laplace_inv, path_lab
from ._stats import ks_critical, ks_two_sample, ks_uniform
from .analytic import GFunction, QuadratureSpec
from .excursion_max import M3Law
from .identities import (
    positive_part_product_mean,
    quadrant_prob,
    scaled_positive_part_mean,
)
from .mc_sampler import MSampleConfig, mc_cdf, mc_pdf, sample_m_many
from .special_fns import SeriesControl

_SUITES = (
    "l1-uniform",
    "straddle",
    "identities",
    "doob",
    "excursion",
    "independence",
    "hull-oracle",
)


class UsageError(Exception):
    """Bad flag values discovered after parsing; exits with code 2."""


@dataclass
class OutputRecord:
    command: str
    inputs: dict
    results: dict
    meta: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "meta": self.meta,
        }
        return json.dumps(payload, sort_keys=True)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "pass" if value else "fail"
    if isinstance(value, float):
        # plain-float repr even for numpy scalar subclasses
        return repr(float(value))
    return str(value)


def _float_list(text: str) -> list[float]:
    tokens = text.replace(",", " ").split()
    if not tokens:
        raise argparse.ArgumentTypeError("expected a comma-separated number list")
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise argparse.ArgumentTypeError("could not parse %r as numbers" % text)


def _threads(args) -> int:
    if args.threads is not None:
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        return args.threads
    env = os.environ.get("MAJORANT_GAP_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise UsageError("MAJORANT_GAP_THREADS must be an integer")
        if value < 1:
            raise UsageError("MAJORANT_GAP_THREADS must be at least 1")
        return value
    return os.cpu_count() or 1


def _pipeline(args) -> tuple[GFunction, QuadratureSpec, M3Law]:
    """Series/quadrature policies honoring the --tol override."""
    if args.tol is not None:
        if not args.tol > 0.0:
            raise UsageError("--tol must be positive")
        control = SeriesControl(abs_tol=args.tol)
        quad = QuadratureSpec(abs_tol=args.tol)
    else:
        control = SeriesControl()
        quad = QuadratureSpec()
    return GFunction(control=control, quad=quad), quad, M3Law(control=control)


def _meta(args, started: float) -> dict:
    meta = {
        "seed": args.seed,
        "versions": {"majorant_gap": __version__, "numpy": np.__version__},
    }
    if args.timing:
        meta["wall_time_s"] = time.perf_counter() - started
    return meta


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _cmd_moments(args):
    if any(r <= 0.0 for r in args.r):
        raise UsageError("moment orders must be positive")
    gfn, quad, law = _pipeline(args)
    analytic_vals = [analytic.moment(r, quad=quad, gfn=gfn) for r in args.r]
    mc_vals = mc_ses = None
    if args.mc is not None:
        if args.mc < 2:
            raise UsageError("--mc needs at least 2 samples")
        cfg = MSampleConfig(seed=args.seed, n_samples=args.mc)
        samples = sample_m_many(cfg, n_threads=_threads(args), law=law)
        mc_vals, mc_ses = [], []
        for r in args.r:
            powers = samples**r
            mc_vals.append(float(powers.mean()))
            mc_ses.append(float(powers.std(ddof=1) / math.sqrt(powers.size)))
    header = ["r", "analytic", "mc", "mc_se"]
    rows = []
    for i, r in enumerate(args.r):
        rows.append([
            r,
            analytic_vals[i],
            None if mc_vals is None else mc_vals[i],
            None if mc_ses is None else mc_ses[i],
        ])
    record = OutputRecord(
        command="moments",
        inputs={"r": args.r, "mc": args.mc, "tol": args.tol},
        results={
            "r": args.r,
            "analytic": analytic_vals,
            "mc": mc_vals,
            "mc_se": mc_ses,
        },
    )
    return record, header, rows, 0


def _cmd_curve(args, name: str, analytic_fn, mc_fn):
    if any(x <= 0.0 for x in args.x):
        raise UsageError("%s arguments must be positive" % name)
    _, _, law = _pipeline(args)
    if args.method == "analytic":
        values = [analytic_fn(x) for x in args.x]
    else:
        if args.n < 1:
            raise UsageError("--n must be at least 1")
        # fresh identically-seeded generator per x: common random numbers
        # keep the estimated cdf monotone across the grid
        values = [
            mc_fn(x, args.n, np.random.default_rng(args.seed), law=law)
            for x in args.x
        ]
    header = ["x", name]
    rows = [[x, v] for x, v in zip(args.x, values)]
    record = OutputRecord(
        command=name,
        inputs={
            "x": args.x,
            "method": args.method,
            "n": args.n if args.method == "mc" else None,
            "tol": args.tol,
        },
        results={"x": args.x, name: values},
    )
    return record, header, rows, 0


def _cmd_cdf(args):
    return _cmd_curve(args, "cdf", laplace_inv.cdf, mc_cdf)


def _cmd_pdf(args):
    return _cmd_curve(args, "pdf", laplace_inv.pdf, mc_pdf)


def _cmd_quantile(args):
    if any(not 0.0 < p < 1.0 for p in args.p):
        raise UsageError("quantile levels must lie strictly inside (0, 1)")
    values = [laplace_inv.quantile(p) for p in args.p]
    header = ["p", "quantile"]
    rows = [[p, q] for p, q in zip(args.p, values)]
    record = OutputRecord(
        command="quantile",
        inputs={"p": args.p},
        results={"p": args.p, "quantile": values},
    )
    return record, header, rows, 0


def _cmd_simulate(args):
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    _, _, law = _pipeline(args)
    cfg = MSampleConfig(seed=args.seed, n_samples=args.n)
    samples = sample_m_many(cfg, n_threads=_threads(args), law=law)
    inputs = {"n": args.n, "emit": args.emit, "tol": args.tol}
    if args.emit == "samples":
        header = ["index", "m"]
        rows = [[i, float(v)] for i, v in enumerate(samples)]
        results = {"m": [float(v) for v in samples]}
    else:
        mean = float(samples.mean())
        std = float(samples.std(ddof=1)) if samples.size > 1 else 0.0
        se = std / math.sqrt(samples.size)
        results = {
            "n": args.n,
            "mean": mean,
            "se": se,
            "std": std,
            "min": float(samples.min()),
            "max": float(samples.max()),
        }
        header = ["n", "mean", "se", "std", "min", "max"]
        rows = [[args.n, mean, se, std, results["min"], results["max"]]]
    return OutputRecord("simulate", inputs, results), header, rows, 0


# ---------------------------------------------------------------------------
# Verification suites
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckRow:
    name: str
    statistic: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.statistic <= self.threshold


def _suite_l1_uniform(args):
    reps = args.n or 5000
    study = path_lab.gap_study(2**15, reps, seed=args.seed, kind="bridge",
                               n_threads=_threads(args))
    return [CheckRow("covering-length-ks", ks_uniform(study.covering_lengths),
                     ks_critical(reps, 0.01))]


def _suite_straddle(args):
    rows = [
        CheckRow("motion-normalization",
                 abs(path_lab.straddle_motion_total(1.0) - 1.0), 1e-6),
        CheckRow("bridge-normalization",
                 abs(path_lab.straddle_bridge_total(0.5) - 1.0), 1e-6),
    ]
    for l in (0.1, 0.5, 0.9):
        rows.append(CheckRow("length-marginal-%g" % l,
                             abs(path_lab.segment_length_marginal(l) - 1.0), 1e-6))
    return rows


def _suite_identities(args):
    rho_grid = np.linspace(-0.999, 0.999, 401)
    orthant = max(abs(quadrant_prob(r) + quadrant_prob(-r) - 0.5) for r in rho_grid)
    chain = 0.0
    for v1 in (0.05, 0.3, 0.8, 0.97):
        for v2 in (1.02, 1.5, 2.5, 12.0):
            d = v2 - v1
            via = 2.0 / d**1.5 * scaled_positive_part_mean(math.sqrt(v1), math.sqrt(d))
            chain = max(chain, abs(via - path_lab.straddle_density_motion(v1, v2, 1.0)))
    route = 0.0
    for a, b in ((1.0, 1.0), (0.2, 3.0), (5.0, 0.4), (2.0, 2.0)):
        t = b / a
        hypo = math.sqrt(1.0 + t * t)
        derived = hypo / b * positive_part_product_mean(-1.0 / hypo)
        route = max(route, abs(derived - scaled_positive_part_mean(a, b)))
    rng = np.random.default_rng(args.seed)
    z = rng.standard_normal((2, 10**6))
    rho = -0.5
    x, y = z[0], rho * z[0] + math.sqrt(1.0 - rho * rho) * z[1]
    quad_emp = float(np.mean((x > 0.0) & (y > 0.0)))
    quad_se = math.sqrt(quad_emp * (1.0 - quad_emp) / x.size)
    prods = np.maximum(x, 0.0) * np.maximum(y, 0.0)
    scaled = np.maximum(z[0], 0.0) * np.maximum(z[1] - z[0], 0.0)
    return [
        CheckRow("orthant-symmetry", orthant, 1e-14),
        CheckRow("straddle-identity-chain", chain, 1e-10),
        CheckRow("scaled-mean-routes", route, 1e-8),
        CheckRow("quadrant-mc", abs(quad_emp - quadrant_prob(rho)), 3.0 * quad_se),
        CheckRow("product-mean-mc",
                 abs(float(prods.mean()) - positive_part_product_mean(rho)),
                 3.0 * float(prods.std(ddof=1)) / math.sqrt(prods.size)),
        CheckRow("scaled-mean-mc",
                 abs(float(scaled.mean()) - scaled_positive_part_mean(1.0, 1.0)),
                 3.0 * float(scaled.std(ddof=1)) / math.sqrt(scaled.size)),
    ]


def _suite_doob(args):
    reps = args.n or 5000
    check = path_lab.doob_transform_check(2**12, np.random.default_rng(args.seed),
                                          replications=reps)
    rows = [
        CheckRow("marginal-ks-v%g" % p, k, check.ks_critical_1pct)
        for p, k in zip(check.probes, check.ks_statistics)
    ]
    rows.append(CheckRow("covariance-dev",
                         abs(check.covariance - check.covariance_expected),
                         3.0 * check.covariance_se))
    return rows


def _suite_excursion(args):
    reps = args.n or 5000
    check = path_lab.excursion_decomposition_check(
        2**15, np.random.default_rng(args.seed), replications=reps)
    # 0.007 on top of the KS critical value covers the grid bias at n = 2^15
    return [
        CheckRow("rescaled-max-ks", check.ks_statistic,
                 ks_critical(reps, 0.01) + 0.007),
        CheckRow("length-correlation", abs(check.length_correlation), 0.05),
        CheckRow("degenerate-paths", float(check.degenerate_count), 0.0),
    ]


def _suite_independence(args):
    reps = args.n or 10_000
    threads = _threads(args)
    motion = path_lab.gap_study(2**15, reps, seed=args.seed, kind="motion",
                                n_threads=threads)
    pair = min(reps, 5000)
    bridge = path_lab.gap_study(2**15, pair, seed=args.seed + 1, kind="bridge",
                                n_threads=threads)
    band = 3.0 / math.sqrt(reps)
    corr_gap = np.corrcoef(motion.max_gaps, motion.endpoints)[0, 1]
    corr_len = np.corrcoef(motion.covering_lengths, motion.endpoints)[0, 1]
    return [
        CheckRow("gap-endpoint-corr", abs(float(corr_gap)), band),
        CheckRow("length-endpoint-corr", abs(float(corr_len)), band),
        CheckRow("bridge-vs-motion-ks",
                 ks_two_sample(bridge.max_gaps, motion.max_gaps[:pair]), 0.03),
    ]


def _suite_hull_oracle(args):
    reps = args.n or 200
    rng = np.random.default_rng(args.seed)
    sizes = (4, 8, 16, 32, 64)
    mismatches = 0
    for _ in range(reps):
        n = int(rng.integers(0, len(sizes)))
        path = path_lab.sample_bridge(sizes[n], float(rng.standard_normal()), rng)
        fast = path_lab.concave_majorant(path)
        slow = path_lab.brute_force_majorant(path)
        if not np.array_equal(fast.vertex_indices, slow.vertex_indices):
            mismatches += 1
    return [CheckRow("hull-mismatches", float(mismatches), 0.0)]


_SUITE_RUNNERS = {
    "l1-uniform": _suite_l1_uniform,
    "straddle": _suite_straddle,
    "identities": _suite_identities,
    "doob": _suite_doob,
    "excursion": _suite_excursion,
    "independence": _suite_independence,
    "hull-oracle": _suite_hull_oracle,
}


def _cmd_verify(args):
    if args.n is not None and args.n < 2:
        raise UsageError("--n must be at least 2")
    rows_data = _SUITE_RUNNERS[args.suite](args)
    header = ["check", "statistic", "threshold", "verdict"]
    rows = [[c.name, c.statistic, c.threshold, c.passed] for c in rows_data]
    all_passed = all(c.passed for c in rows_data)
    record = OutputRecord(
        command="verify",
        inputs={"suite": args.suite, "n": args.n},
        results={
            "checks": [
                {
                    "name": c.name,
                    "statistic": c.statistic,
                    "threshold": c.threshold,
                    "passed": c.passed,
                }
                for c in rows_data
            ],
            "all_passed": all_passed,
        },
    )
    return record, header, rows, 0 if all_passed else 1


# ---------------------------------------------------------------------------
# Parser and entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="master seed for every random stream (default 0)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker processes; wall time only, never values "
                             "(default: MAJORANT_GAP_THREADS or all cores)")
    common.add_argument("--tol", type=float, default=None,
                        help="absolute tolerance override for series "
                             "truncation and quadrature")
    common.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="output format (default csv)")
    common.add_argument("--timing", action="store_true",
                        help="include wall time in JSON meta "
                             "(breaks byte-for-byte reproducibility)")

    parser = argparse.ArgumentParser(
        prog="majorant-gap",
        description="Distribution of the maximal gap between a Brownian path "
                    "and its least concave majorant.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", parents=[common],
                       help="analytic moments, optionally with Monte Carlo")
    p.add_argument("--r", type=_float_list, required=True,
                   help="comma-separated moment orders, e.g. 1,2,3")
    p.add_argument("--mc", type=int, default=None,
                   help="also estimate from this many simulated samples")
    p.set_defaults(handler=_cmd_moments)

    for name, doc in (("cdf", "distribution function"),
                      ("pdf", "density")):
        p = sub.add_parser(name, parents=[common], help=doc)
        p.add_argument("--x", type=_float_list, required=True,
                       help="comma-separated evaluation points (positive)")
        p.add_argument("--method", choices=("analytic", "mc"),
                       default="analytic")
        p.add_argument("--n", type=int, default=10_000,
                       help="Monte Carlo replications for --method mc")
        p.set_defaults(handler=_cmd_cdf if name == "cdf" else _cmd_pdf)

    p = sub.add_parser("quantile", parents=[common], help="analytic quantiles")
    p.add_argument("--p", type=_float_list, required=True,
                   help="comma-separated probability levels in (0, 1)")
    p.set_defaults(handler=_cmd_quantile)

    p = sub.add_parser("simulate", parents=[common],
                       help="draw max-gap samples or their summary")
    p.add_argument("--n", type=int, required=True, help="number of samples")
    p.add_argument("--emit", choices=("samples", "summary"), default="summary")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("verify", parents=[common],
                       help="run a named verification suite")
    p.add_argument("--suite", choices=_SUITES, required=True)
    p.add_argument("--n", type=int, default=None,
                   help="replication override where the suite samples")
    p.set_defaults(handler=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        record, header, rows, code = args.handler(args)
    except UsageError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    record.meta = _meta(args, started)
    out = sys.stdout
    if args.format == "json":
        out.write(record.to_json() + "\n")
    else:
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(_cell(v) for v in row) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
