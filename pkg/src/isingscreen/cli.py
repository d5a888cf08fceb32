"""Command-line front end: ``isingscreen <command> [options]``.

Commands
--------
gen-model   write a model file for a standard topology
sample      draw clean samples from a model file
corrupt     pass a clean sample file through a missing or flip channel
recover     learn the graph from a (corrupted) sample file
verify      run a named property suite; nonzero exit on failure
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

import numpy as np

from .corruption import (
    CLEAN,
    FLIP,
    MISSING,
    CorruptionChannel,
    SampleSet,
    check_probabilities,
    read_samples,
    write_samples,
)
from .errors import IsingScreenError, WrongChannelError
from .model import exact_probabilities, gibbs_samples, read_model, sample_exact, write_model
from .recovery import (
    RecoveryConfig,
    declared_edge_error,
    max_weight_error,
    recover_graph,
    recover_graph_unknown_p,
)
from .suites import SUITES
from .topologies import build_model, parse_theta

METRIC_FIELDS = ["command", "seed", "n", "channel", "p", "lambda", "beta", "T", "metric", "value"]


def _seed(args) -> int:
    if args.seed is None:
        args.seed = int(np.random.SeedSequence().entropy % 2**32)
    print(f"seed={args.seed}")
    return args.seed


def _eta(text: str):
    if text == "auto":
        return "auto"
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("--eta takes 'auto' or a positive number") from None
    if not value > 0:
        raise argparse.ArgumentTypeError("--eta must be positive")
    return value


def append_metrics(path, rows) -> None:
    """Append rows to a metrics CSV, writing the header only for a new file."""
    path = Path(path)
    fresh = not path.exists() or path.stat().st_size == 0
    with path.open("a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=METRIC_FIELDS)
        if fresh:
            writer.writeheader()
        writer.writerows(rows)


def write_edges(edges, path) -> None:
    Path(path).write_text("".join(f"{i} {j} {w:.10g}\n" for i, j, w in edges))


def cmd_gen_model(args) -> int:
    seed = _seed(args)
    rng = np.random.default_rng(seed)
    theta = parse_theta(args.theta, args.n, rng)
    model = build_model(args.kind, args.n, args.weight, theta, seed=seed)
    write_model(model, args.out)
    beta = "none" if model.beta_min is None else f"{model.beta_min:.10g}"
    print(f"n={model.n} edges={len(model.edges())} lambda={model.lambda_width:.10g} beta={beta}")
    return 0


def cmd_sample(args) -> int:
    seed = _seed(args)
    rng = np.random.default_rng(seed)
    model = read_model(args.model)
    if args.count < 0:
        raise ValueError("--count must be nonnegative")
    if args.sampler == "exact":
        dist = exact_probabilities(model)
        values = sample_exact(dist, rng, args.count)
    else:
        values = gibbs_samples(model, args.count, rng, burn_in=args.burn_in, thin=args.thin)
    values = np.asarray(values, dtype=np.int8).reshape(args.count, model.n)
    write_samples(SampleSet(values, CLEAN), args.out)
    print(f"wrote {args.count} samples to {args.out}")
    return 0


def cmd_corrupt(args) -> int:
    seed = _seed(args)
    rng = np.random.default_rng(seed)
    clean = read_samples(args.samples)
    if clean.channel != CLEAN:
        raise WrongChannelError(f"{args.samples} is already corrupted ({clean.channel})")
    check_probabilities(args.channel, args.p)
    values = clean.values
    if len(clean):
        channel = CorruptionChannel.uniform(args.channel, args.p, values.shape[1])
        values = channel.apply(values, rng)
    write_samples(SampleSet(values, args.channel), args.out)
    if args.channel == MISSING and values.size:
        print(f"missing fraction {np.mean(values == 0):.6f}")
    return 0


def cmd_recover(args) -> int:
    seed = _seed(args)
    data = read_samples(args.samples)
    kind = FLIP if data.channel == FLIP else MISSING
    if args.channel is not None and data.channel != CLEAN and args.channel != data.channel:
        raise WrongChannelError(f"--channel {args.channel} but the file header says {data.channel}")
    if args.estimate_p and args.p is not None:
        raise ValueError("give either --p or --estimate-p, not both")
    if data.channel == CLEAN:
        p = 0.0 if args.p is None else args.p
    else:
        p = args.p
        if p is None and not args.estimate_p:
            raise ValueError(f"{args.samples} is a {data.channel} file: pass --p or --estimate-p")
    config = RecoveryConfig(lambda_budget=args.lam, beta_threshold=args.beta, kind=kind, p=p,
                            iterations=args.T, step_eta=args.eta, mean_field=args.mean_field,
                            rule=args.rule)
    start = time.perf_counter()
    if args.estimate_p:
        est = read_samples(args.estimate_p)
        if est.channel != MISSING:
            raise WrongChannelError(f"{args.estimate_p} must be a missing-channel file")
        result = recover_graph_unknown_p(est, data, config)
        p = result.diagnostics["p_hat"]
    else:
        result = recover_graph(data, config)
    wall = time.perf_counter() - start
    write_edges(result.edges(), args.out)
    print(f"recovered {len(result.edge_set)} edges -> {args.out}")

    diag = result.diagnostics
    metrics = {
        "samples_used": diag["samples_used"],
        "wall_seconds": wall,
        "edges_declared": len(result.edge_set),
    }
    if args.estimate_p:
        metrics["p_hat"] = diag["p_hat"]
        metrics["p_deviation_bound"] = diag["p_deviation_bound"]
    if args.truth:
        truth = read_model(args.truth)
        if truth.n != result.n:
            raise ValueError(f"--truth has {truth.n} vertices, samples have {result.n}")
        want = truth.edge_set()
        metrics["max_weight_error"] = max_weight_error(result, truth)
        metrics["declared_edge_error"] = declared_edge_error(result, truth)
        metrics["false_positives"] = len(result.edge_set - want)
        metrics["false_negatives"] = len(want - result.edge_set)
        metrics["exact_recovery"] = int(result.edge_set == want)
    for name, value in metrics.items():
        print(f"{name}={value:.6g}" if isinstance(value, float) else f"{name}={value}")
    if args.metrics:
        common = {"command": "recover", "seed": seed, "n": result.n, "channel": data.channel,
                  "p": f"{float(p):.10g}", "lambda": args.lam, "beta": args.beta, "T": diag["samples_used"]}
        append_metrics(args.metrics, [{**common, "metric": k, "value": v} for k, v in metrics.items()])
    return 0


def cmd_verify(args) -> int:
    seed = _seed(args)
    checks = SUITES[args.suite](np.random.default_rng(seed))
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{args.suite}: {len(checks) - failed}/{len(checks)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isingscreen", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def seeded(p):
        p.add_argument("--seed", type=int, default=None, help="random seed (drawn and printed if omitted)")
        return p

    p = seeded(sub.add_parser("gen-model", help="write a model file"))
    p.add_argument("--kind", required=True, help="cycle, path, star, empty or random-degree-<d>")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--weight", type=float, default=0.4)
    p.add_argument("--theta", default="0", help="0, a constant, uniform:<a> or a comma list")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_model)

    p = seeded(sub.add_parser("sample", help="draw clean samples"))
    p.add_argument("--model", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--sampler", choices=["exact", "gibbs"], default="exact")
    p.add_argument("--burn-in", type=int, default=None, help="Gibbs sweeps discarded (default 100 n)")
    p.add_argument("--thin", type=int, default=10, help="Gibbs sweeps between kept samples")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = seeded(sub.add_parser("corrupt", help="apply a corruption channel"))
    p.add_argument("--samples", required=True)
    p.add_argument("--channel", choices=[MISSING, FLIP], required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_corrupt)

    p = seeded(sub.add_parser("recover", help="recover the interaction graph"))
    p.add_argument("--samples", required=True)
    p.add_argument("--channel", choices=[MISSING, FLIP], default=None, help="checked against the file header")
    p.add_argument("--p", type=float, default=None, help="known corruption probability")
    p.add_argument("--estimate-p", default=None, metavar="FILE",
                   help="separate missing-channel file used to estimate p")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--T", type=int, default=None, help="iterations (default: every sample)")
    p.add_argument("--eta", type=_eta, default="auto")
    p.add_argument("--mean-field", action="store_true")
    p.add_argument("--rule", choices=["or", "and"], default="or")
    p.add_argument("--truth", default=None, help="model file to score against")
    p.add_argument("--metrics", default=None, help="CSV file to append metrics to")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_recover)

    p = seeded(sub.add_parser("verify", help="run a property suite"))
    p.add_argument("suite", choices=sorted(SUITES))
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (IsingScreenError, ValueError, OSError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
