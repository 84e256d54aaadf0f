"""Command-line entry point: ``lipdist run | estimate | describe``.

Exit status: 0 when every selected check passes, 1 when a check fails or
errors, 2 for usage and configuration errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .analytic import ClosedFormMap, load_corpus
from .config import DEFAULTS, load_config
from .domains import DiscretizedDomain
from .exceptions import ConfigError, LipdistError
from .functions import WeightField
from .lipschitz import (
    TargetSet,
    bloch_norm,
    holder_seminorm,
    local_holder_seminorm,
    p_regular_constant,
    upper_dilatation,
)
from .moebius import operator_norm
from .report import write_reports
from .suite import CHECKS, run_suite

__all__ = ["main", "build_parser", "ESTIMATORS"]

log = logging.getLogger("lipdist")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

ESTIMATORS = ("holder", "local_holder", "dilatation", "bloch", "regularity", "differential_norm")


def build_parser():
    parser = argparse.ArgumentParser(prog="lipdist", description="Numerical checks for Lipschitz-type classes of maps.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the verification suite")
    run.add_argument("--config", help="INI file; missing keys take their defaults")
    run.add_argument("--seed", type=int, help="override suite.seed")
    run.add_argument("--out", help="output directory (overrides suite.out_dir)")

    est = sub.add_parser("estimate", help="run one estimator on a corpus map")
    est.add_argument("estimator", choices=ESTIMATORS)
    est.add_argument("--map", required=True, dest="map_id",
                     help="corpus id, or power_branch:<alpha> for (1 - z)^alpha")
    est.add_argument("--alpha", type=float, default=0.5)
    est.add_argument("--p", type=float, default=None, help="regularity exponent (default: 1 for scalar maps, else 2)")
    est.add_argument("--samples", type=int, default=2000)
    est.add_argument("--seed", type=int, default=0)

    sub.add_parser("describe", help="list the checks and the configuration keys")
    return parser


def _resolve_map(map_id):
    if map_id.startswith("power_branch:"):
        return ClosedFormMap.power_branch(float(map_id.split(":", 1)[1]))
    corpus = load_corpus()
    if map_id not in corpus:
        raise ConfigError(f"unknown map {map_id!r}; known: {', '.join(sorted(corpus))}", key="map")
    return corpus[map_id]


def _estimate(args):
    f = _resolve_map(args.map_id)
    D = DiscretizedDomain.unit_disk() if f.n == 1 else DiscretizedDomain.complex_ball(f.n)
    rng = np.random.default_rng(args.seed)
    n = args.samples
    if args.estimator == "holder":
        est = holder_seminorm(f, *D.sample_pairs(n, rng), alpha=args.alpha)
    elif args.estimator == "local_holder":
        est = local_holder_seminorm(f, WeightField.half_boundary_distance(D), D.sample(max(n // 64, 1), rng, 1e-3),
                                    alpha=args.alpha, random_state=rng, domain=D)
    elif args.estimator == "dilatation":
        est = upper_dilatation(f, D.sample(1, rng, 0.1)[0], random_state=rng)
    elif args.estimator == "bloch":
        est = bloch_norm(f, WeightField.boundary_distance(D), D.sample(max(n // 100, 1), rng, 1e-3),
                         domain=D, relative=True, random_state=rng)
    elif args.estimator == "regularity":
        p = args.p if args.p is not None else (1 if f.m == 1 else 2)
        est = p_regular_constant(f, WeightField.boundary_distance(D), TargetSet.origin(), p,
                                 D.sample(max(n // 100, 1), rng, 1e-3), random_state=rng)
    else:
        z = D.sample(1, rng, 0.1)[0]
        value = operator_norm(f.differential(z))
        print(json.dumps({"estimator": "differential_norm", "map": args.map_id, "z": z.tolist(), "value": value},
                         sort_keys=True))
        return EXIT_OK
    out = {"estimator": args.estimator, "map": args.map_id, **est.to_dict()}
    print(json.dumps(out, sort_keys=True, default=float))
    return EXIT_OK


def _describe():
    print("checks:")
    for name in sorted(CHECKS):
        print(f"  {name:28s} {CHECKS[name].description}")
    print("\nconfiguration keys (section.key = default):")
    for section, keys in DEFAULTS.items():
        for key, value in keys.items():
            print(f"  {section}.{key} = {value}")
    return EXIT_OK


def _run(args):
    cfg = load_config(args.config).with_overrides(seed=args.seed, out_dir=args.out)
    cfg.selected(CHECKS)

    def progress(name, records, seconds):
        status = "errored" if any(r["status"] == "errored" for r in records) else (
            "passed" if all(r["status"] == "passed" for r in records) else "failed")
        log.info("%-28s %-8s %.1fs", name, status, seconds)

    report = run_suite(cfg, progress=progress)
    paths = write_reports(report, cfg.out_dir)
    for rec in report.records:
        print(f"{rec['status'].upper():8s} {rec['name']}")
    print(f"report: {paths['json']}")
    return EXIT_OK if report.passed else EXIT_FAIL


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        if args.command == "run":
            return _run(args)
        if args.command == "estimate":
            return _estimate(args)
        return _describe()
    except ConfigError as exc:
        print(f"lipdist: configuration error ({exc.key}): {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LipdistError as exc:
        print(f"lipdist: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"lipdist: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
