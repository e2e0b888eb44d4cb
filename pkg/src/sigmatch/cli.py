"""Command-line front end: ``sigmatch {generate,match,experiment,diagnose}``.

Experiment CSV columns (frozen, in this order):
    n, p, alpha, seed, variant, outcome, accuracy, exact, coverage, candidates
Wall times go to a separate ``<out>.timing.csv`` (n, p, alpha, seed, wall_time_s)
so that the results table itself is byte-reproducible.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .diagnostics import accuracy, diagnose_round, diagnose_simplified, write_report
from .matcher import (
    AlgoParams, FeasibilityWarning, ParamError, degree_baseline_match, match_graphs, paper_params,
    resolve_p, simplified_match, write_match_result,
)
from .model import ModelParams, load_instance, sample_correlated, save_instance

RESULT_COLUMNS = ["n", "p", "alpha", "seed", "variant", "outcome", "accuracy", "exact", "coverage",
                  "candidates"]
VARIANTS = ("full", "simplified", "degree-baseline")


class CLIError(Exception):
    pass


@dataclass
class ExperimentConfig:
    ns: list
    ps: list
    alphas: list
    seeds: list
    variant: str = "full"
    mode: str = "practical"
    overrides: dict = field(default_factory=dict)
    p_spec: str | None = None

    def __post_init__(self):
        if not (self.ns and self.ps and self.alphas):
            raise CLIError("experiment grid is empty")
        if not self.seeds:
            raise CLIError("need at least one seed")
        if self.variant not in VARIANTS:
            raise CLIError(f"unknown variant {self.variant!r}")

    def grid(self):
        return list(itertools.product(self.ns, self.ps, self.alphas, self.seeds))


def build_params(mode: str, n: int, overrides: dict, seed: int) -> AlgoParams:
    """Mode defaults plus explicit flags.  Paper mode derives beta, m and
    omega itself; passing any of them there is an error."""
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if mode == "paper":
        bad = sorted(k for k in ("beta", "m", "omega") if k in overrides)
        if bad:
            raise CLIError(f"--{', --'.join(bad)} cannot be combined with --mode paper")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", FeasibilityWarning)
            base = paper_params(n, overrides.pop("delta", 0.05), seed=seed)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        overrides.pop("delta", None)
        return base.with_overrides(**overrides)
    overrides.pop("delta", None)
    return AlgoParams(mode="practical", seed=seed).with_overrides(**overrides)


def run_variant(instance, variant: str, p, mode: str, overrides: dict, seed: int, workers: int = 1):
    p_val = resolve_p(instance, p)
    if variant == "full":
        params = build_params(mode, instance.n, overrides, seed)
        return match_graphs(instance, p_val, params, workers=workers)
    if variant == "simplified":
        m = overrides.get("m") or 7
        return simplified_match(instance.g_pi, instance.g_prime, p_val, m)
    if variant == "degree-baseline":
        return degree_baseline_match(instance.g_pi, instance.g_prime)
    raise CLIError(f"unknown variant {variant!r}")


def _experiment_row(task):
    (n, p, alpha, seed), cfg = task
    t0 = time.perf_counter()
    inst = sample_correlated(ModelParams(n, p, alpha), rng=seed)
    res = run_variant(inst, cfg.variant, cfg.p_spec, cfg.mode, dict(cfg.overrides), seed)
    acc, exact = accuracy(res.estimate, inst.truth)
    row = {"n": n, "p": repr(p), "alpha": repr(alpha), "seed": seed, "variant": cfg.variant,
           "outcome": res.outcome, "accuracy": f"{acc:.6f}", "exact": int(exact),
           "coverage": f"{res.coverage:.6f}", "candidates": res.candidates}
    return row, time.perf_counter() - t0


def run_experiment(cfg: ExperimentConfig, workers: int = 1):
    """Rows in grid order (n, p, alpha, seed) and per-row wall times."""
    tasks = [(pt, cfg) for pt in cfg.grid()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_experiment_row, tasks))
    else:
        out = [_experiment_row(t) for t in tasks]
    return [r for r, _ in out], [t for _, t in out]


def format_rows(rows, fmt: str) -> str:
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.DictWriter(buf, fieldnames=RESULT_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    else:
        for r in rows:
            buf.write(" ".join(f"{k}={r[k]}" for k in RESULT_COLUMNS) + "\n")
    return buf.getvalue()


# --------------------------------------------------------------------------
# commands

def _overrides(args) -> dict:
    return {"beta": args.beta, "m": args.m, "omega": args.omega, "reps": args.reps,
            "threshold_slack": args.slack, "delta": args.delta}


def _p_arg(value):
    if value is None or value == "estimate":
        return value
    return float(value)


def cmd_generate(args) -> int:
    out = Path(args.out)
    if out.exists() and not args.force:
        raise CLIError(f"{out} already exists (pass --force to overwrite)")
    try:
        params = ModelParams(args.n, args.p, args.alpha)
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    inst = sample_correlated(params, rng=args.seed)
    save_instance(inst, out, force=True)
    print(f"wrote {out} (edges: g_pi={inst.g_pi.num_edges}, g_prime={inst.g_prime.num_edges})")
    return 0


def cmd_match(args) -> int:
    inst = load_instance(args.instance)
    if args.mode == "paper" and args.variant != "full":
        raise CLIError("--mode paper only applies to the full variant")
    if args.variant != "full" and any(v is not None for v in (args.beta, args.omega, args.reps, args.slack)):
        raise CLIError(f"--beta/--omega/--reps/--slack do not apply to the {args.variant} variant")
    res = run_variant(inst, args.variant, _p_arg(args.p), args.mode, _overrides(args), args.seed,
                      workers=args.workers)
    extra = {}
    if inst.truth is not None:
        acc, exact = accuracy(res.estimate, inst.truth)
        extra = {"accuracy": f"{acc:.6f}", "exact": int(exact)}
    if args.out:
        write_match_result(res, args.out, extra)
    summary = f"outcome={res.outcome} coverage={res.coverage:.6f}"
    if extra:
        summary += f" accuracy={extra['accuracy']} exact={extra['exact']}"
    print(summary)
    return 0


def cmd_experiment(args) -> int:
    seeds = args.seed_list if args.seed_list else list(range(args.seeds))
    cfg = ExperimentConfig(ns=args.n, ps=args.p, alphas=args.alpha, seeds=seeds, variant=args.variant,
                           mode=args.mode, overrides=_overrides(args), p_spec=args.p_used)
    if cfg.mode == "paper" and any(cfg.overrides.get(k) is not None for k in ("beta", "m", "omega")):
        raise CLIError("--beta/--m/--omega cannot be combined with --mode paper")
    for n, p, a in itertools.product(cfg.ns, cfg.ps, cfg.alphas):
        try:
            ModelParams(n, p, a)
        except ValueError as exc:
            raise CLIError(str(exc)) from None
    rows, times = run_experiment(cfg, workers=args.workers)
    text = format_rows(rows, args.format)
    if args.out:
        out = Path(args.out)
        out.write_text(text, encoding="ascii")
        with open(str(out) + ".timing.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "p", "alpha", "seed", "wall_time_s"])
            for r, t in zip(rows, times):
                w.writerow([r["n"], r["p"], r["alpha"], r["seed"], f"{t:.4f}"])
    else:
        sys.stdout.write(text)
    return 0


def cmd_diagnose(args) -> int:
    inst = load_instance(args.instance)
    if inst.truth is None:
        raise CLIError("diagnostics need the instance's truth.txt")
    p = resolve_p(inst, _p_arg(args.p))
    if args.variant == "simplified":
        report = diagnose_simplified(inst, p, args.m or 7)
    elif args.variant == "full":
        report = diagnose_round(inst, p, build_params(args.mode, inst.n, _overrides(args), args.seed))
    else:
        raise CLIError("diagnose supports --variant full or simplified")
    write_report(report, args.out)
    line = f"sym_diff_fraction={report.sym_diff_fraction:.6f}"
    if report.bad_code_count is not None:
        line += f" bad_code_count={report.bad_code_count}"
    print(line)
    return 0


def _add_algo_flags(sp, with_variant=True):
    sp.add_argument("--mode", choices=("paper", "practical"), default="practical")
    sp.add_argument("--beta", type=float)
    sp.add_argument("--m", type=int)
    sp.add_argument("--omega", type=int)
    sp.add_argument("--reps", type=int)
    sp.add_argument("--slack", type=float, help="additive threshold term (default beta / ln ln n)")
    sp.add_argument("--delta", type=float, help="theorem delta for --mode paper (default 0.05)")
    if with_variant:
        sp.add_argument("--variant", choices=VARIANTS, default="full")
    sp.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sigmatch", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample a correlated Erdős–Rényi instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float, required=True)
    g.add_argument("--alpha", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--force", action="store_true")
    g.set_defaults(func=cmd_generate)

    m = sub.add_parser("match", help="match one instance")
    m.add_argument("instance")
    m.add_argument("--p", help="edge probability, or 'estimate' (default: params.txt)")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out")
    _add_algo_flags(m)
    m.set_defaults(func=cmd_match)

    e = sub.add_parser("experiment", help="grid of sampled instances x seeds")
    e.add_argument("--n", type=int, nargs="+", required=True)
    e.add_argument("--p", type=float, nargs="+", required=True)
    e.add_argument("--alpha", type=float, nargs="+", default=[0.0])
    e.add_argument("--seeds", type=int, default=1, help="use seeds 0..K-1")
    e.add_argument("--seed-list", type=int, nargs="+")
    e.add_argument("--p-used", choices=("estimate",), help="match with an estimated p")
    e.add_argument("--format", choices=("csv", "text"), default="csv")
    e.add_argument("--out")
    _add_algo_flags(e)
    e.set_defaults(func=cmd_experiment)

    d = sub.add_parser("diagnose", help="overlap report for one round")
    d.add_argument("instance")
    d.add_argument("--p")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out", required=True)
    _add_algo_flags(d)
    d.set_defaults(func=cmd_diagnose)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CLIError, ParamError, ValueError, FileNotFoundError, FileExistsError, KeyError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
