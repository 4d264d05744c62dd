"""Command-line harness: generation, solving, probing, estimation, benchmarks.

Exit codes: 0 success, 1 usage error, 2 infeasible input or failed
validation. The environment variable LCASC_SEED, when set, overrides any
--seed flag; it is the sole reproducibility knob.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from dataclasses import dataclass, fields

from . import instance as inst_mod
from .access import AlgoParams, ProbeContext
from .estimator import estimate_opt
from .instance import (BlockPlanted, IntegralCover, Star, UniformRandom,
                       generate_instance, load_instance, save_instance,
                       validate_cover)
from .integral import integral_probe_element, integral_probe_set, warmup_integral_probe
from .main_lca import main_probe_weight
from .randomness import RandomTape
from .reference import (SampledDegreeEstimator, SlackPolicy, exact_cover,
                        greedy_cover, run_alg1, run_alg2, run_alg6)
from .warmup_lca import lca_weight

__all__ = ["main", "run", "BenchRecord"]

USAGE_ERROR = 1
VALIDATION_ERROR = 2


@dataclass
class BenchRecord:
    algorithm: str
    seed: int
    n: int
    m: int
    delta: int
    freq: int
    params: str
    cover_cost: float
    baseline_cost: float
    ratio: float
    queries_max: int
    queries_mean: float
    wall_millis: float


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; usage errors are 1 here
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(USAGE_ERROR)


def _build_parser() -> _Parser:
    parser = _Parser(prog="lcasc")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--family", required=True, choices=["star", "block", "uniform"])
    g.add_argument("--delta", type=int, default=8)
    g.add_argument("--opt-size", type=int, default=4)
    g.add_argument("--f", dest="freq", type=int, default=2)
    g.add_argument("--n", type=int, default=64)
    g.add_argument("--m", type=int, default=16)
    g.add_argument("--f-target", type=int, default=3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    s = sub.add_parser("solve", help="run a global solver and print cost/validity")
    s.add_argument("--alg", required=True,
                   choices=["greedy", "exact", "alg1", "alg2", "alg6"])
    s.add_argument("--instance", required=True)
    s.add_argument("--seed", type=int, default=0)
    _add_param_flags(s)

    p = sub.add_parser("probe", help="answer a single local probe")
    p.add_argument("--alg", required=True,
                   choices=["warmup", "main", "integral", "warmup-integral"])
    p.add_argument("--kind", default="set", choices=["set", "element"])
    p.add_argument("--id", type=int, required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_param_flags(p)

    e = sub.add_parser("estimate", help="sublinear cover-size estimate")
    e.add_argument("--instance", required=True)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--strict-cache", action="store_true",
                   help="fresh context per sampled probe")
    _add_param_flags(e)

    b = sub.add_parser("bench", help="sweep a grid and append CSV records")
    b.add_argument("--grid", default="default", choices=["default", "smoke"])
    b.add_argument("--out", required=True)
    b.add_argument("--seed", type=int, default=0)
    _add_param_flags(b)
    return parser


def _add_param_flags(cmd: argparse.ArgumentParser) -> None:
    cmd.add_argument("--sample-scale", type=int, default=None,
                     help="sampling multiplier; default (log2 delta * log2 f)^3")
    cmd.add_argument("--k-const", type=int, default=8)
    cmd.add_argument("--delta-boost", type=int, default=2)
    cmd.add_argument("--no-scale-by-four", action="store_true")
    cmd.add_argument("--shared-cache", action="store_true",
                     help="reuse one probe context across probes")


def _params_for(inst, args) -> AlgoParams:
    return AlgoParams.from_instance(
        inst,
        sample_scale=args.sample_scale,
        K=args.k_const,
        delta_boost=args.delta_boost,
        scale_by_four=not args.no_scale_by_four,
    )


def _seed_of(args) -> int:
    env = os.environ.get("LCASC_SEED")
    if env is not None:
        return int(env)
    return args.seed


def _load(path: str):
    try:
        return load_instance(path)
    except OSError as exc:
        print(f"error: cannot read instance: {exc}", file=sys.stderr)
        raise SystemExit(VALIDATION_ERROR)
    except (inst_mod.ParseError, inst_mod.ConsistencyError) as exc:
        print(f"error: bad instance: {exc}", file=sys.stderr)
        raise SystemExit(VALIDATION_ERROR)


def _cmd_gen(args) -> int:
    if args.family == "star":
        family = Star(delta=args.delta)
    elif args.family == "block":
        family = BlockPlanted(opt_size=args.opt_size, delta=args.delta, freq=args.freq)
    else:
        family = UniformRandom(n=args.n, m=args.m, f_target=args.f_target)
    try:
        inst = generate_instance(family, _seed_of(args))
    except inst_mod.InfeasibleParameters as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VALIDATION_ERROR
    save_instance(inst, args.out)
    print(f"wrote {args.out} sets={inst.num_sets} elements={inst.num_elements} "
          f"delta={inst.delta} f={inst.freq}")
    return 0


def _cmd_solve(args) -> int:
    inst = _load(args.instance)
    seed = _seed_of(args)
    params = _params_for(inst, args)
    tape = RandomTape(seed)
    if args.alg == "greedy":
        cover = greedy_cover(inst)
        return _report_integral(inst, args.alg, cover)
    if args.alg == "exact":
        try:
            cover = exact_cover(inst)
        except Exception as exc:
            print(f"error: {exc}", file=sys.stderr)
            return VALIDATION_ERROR
        return _report_integral(inst, args.alg, cover)
    if args.alg == "alg1":
        frac, _ = run_alg1(inst, params=params)
    elif args.alg == "alg2":
        frac, _ = run_alg2(inst, SlackPolicy.identity(), params=params)
    else:
        frac, _ = run_alg6(inst, SampledDegreeEstimator(tape, K=params.K), tape,
                           params=params)
    feasible = frac.is_feasible(inst)
    print(f"algorithm={args.alg} cost={frac.total():.6f} "
          f"valid={'ok' if feasible else 'infeasible'}")
    return 0 if feasible else VALIDATION_ERROR


def _report_integral(inst, tag: str, cover: IntegralCover) -> int:
    verdict = validate_cover(inst, cover)
    valid = "ok" if verdict is None else f"uncovered {verdict}"
    print(f"algorithm={tag} cost={len(cover)} valid={valid}")
    return 0 if verdict is None else VALIDATION_ERROR


def _cmd_probe(args) -> int:
    inst = _load(args.instance)
    seed = _seed_of(args)
    params = _params_for(inst, args)
    ctx = ProbeContext(inst, RandomTape(seed), params)
    kind, vid = args.kind, args.id
    if kind == "set" and not 0 <= vid < inst.num_sets:
        print(f"error: set id {vid} out of range", file=sys.stderr)
        return VALIDATION_ERROR
    if kind == "element" and not 0 <= vid < inst.num_elements:
        print(f"error: element id {vid} out of range", file=sys.stderr)
        return VALIDATION_ERROR
    if args.alg == "warmup":
        if kind != "set":
            print("error: warmup probes answer set queries only", file=sys.stderr)
            return USAGE_ERROR
        decision = f"weight={lca_weight(ctx, vid):.6f}"
    elif args.alg == "main":
        if kind != "set":
            print("error: main probes answer set queries only", file=sys.stderr)
            return USAGE_ERROR
        decision = f"weight={main_probe_weight(ctx, vid):.6f}"
    elif args.alg == "warmup-integral":
        if kind != "set":
            print("error: warmup-integral probes answer set queries only",
                  file=sys.stderr)
            return USAGE_ERROR
        decision = f"in_cover={'yes' if warmup_integral_probe(ctx, vid) else 'no'}"
    else:
        if kind == "set":
            decision = f"in_cover={'yes' if integral_probe_set(ctx, vid) else 'no'}"
        else:
            decision = f"covering_set={integral_probe_element(ctx, vid)}"
    print(f"alg={args.alg} kind={kind} id={vid} {decision} queries={ctx.query_count()}")
    return 0


def _cmd_estimate(args) -> int:
    inst = _load(args.instance)
    seed = _seed_of(args)
    params = _params_for(inst, args)
    report = estimate_opt(inst, params, seed, shared_cache=not args.strict_cache)
    print(f"{args.instance},{seed},{report.samples},{report.hits},"
          f"{report.estimate:.6f},{report.queries}")
    return 0


# ---------------------------------------------------------------------------
# Benchmark sweep
# ---------------------------------------------------------------------------

def _default_grid(smoke: bool):
    cells = []
    deltas = [4, 8] if smoke else [4, 8, 16]
    freqs = [2] if smoke else [2, 4]
    seeds = [1] if smoke else [1, 2, 3]
    for delta in deltas:
        for freq in freqs:
            cells.append(BlockPlanted(opt_size=3, delta=delta, freq=freq))
        cells.append(Star(delta=delta))
    algorithms = ["greedy", "alg1", "alg2", "alg6", "warmup", "main", "integral"]
    return cells, seeds, algorithms


def _bench_cell(inst, algorithm: str, seed: int, params: AlgoParams) -> BenchRecord:
    tape = RandomTape(seed)
    t0 = time.perf_counter()
    queries: list[int] = []
    if algorithm == "greedy":
        cost = float(len(greedy_cover(inst)))
    elif algorithm == "alg1":
        frac, _ = run_alg1(inst, params=params)
        cost = frac.total()
    elif algorithm == "alg2":
        frac, _ = run_alg2(inst, SlackPolicy.identity(), params=params)
        cost = frac.total()
    elif algorithm == "alg6":
        frac, _ = run_alg6(inst, SampledDegreeEstimator(tape, K=params.K), tape, params)
        cost = frac.total()
    elif algorithm == "warmup":
        total = 0.0
        for s in range(inst.num_sets):
            ctx = ProbeContext(inst, tape, params)
            total += lca_weight(ctx, s)
            queries.append(ctx.query_count())
        cost = total
    elif algorithm == "main":
        total = 0.0
        for s in range(inst.num_sets):
            ctx = ProbeContext(inst, tape, params)
            total += main_probe_weight(ctx, s)
            queries.append(ctx.query_count())
        cost = total
    elif algorithm == "integral":
        chosen = 0
        for s in range(inst.num_sets):
            ctx = ProbeContext(inst, tape, params)
            if integral_probe_set(ctx, s):
                chosen += 1
            queries.append(ctx.query_count())
        cost = float(chosen)
    else:
        raise ValueError(f"unknown algorithm {algorithm}")
    wall = (time.perf_counter() - t0) * 1000.0
    if inst.num_sets <= 24:
        baseline = float(len(exact_cover(inst)))
    else:
        baseline = float(len(greedy_cover(inst)))
    return BenchRecord(
        algorithm=algorithm, seed=seed, n=inst.num_elements, m=inst.num_sets,
        delta=inst.delta, freq=inst.freq, params=params.fingerprint(),
        cover_cost=cost, baseline_cost=baseline,
        ratio=cost / baseline if baseline else float("inf"),
        queries_max=max(queries, default=0),
        queries_mean=(sum(queries) / len(queries)) if queries else 0.0,
        wall_millis=wall,
    )


def _cmd_bench(args) -> int:
    cells, seeds, algorithms = _default_grid(args.grid == "smoke")
    base_seed = _seed_of(args)
    records = []
    for family in cells:
        for seed in seeds:
            inst = generate_instance(family, base_seed + seed)
            params = AlgoParams.from_instance(
                inst, sample_scale=args.sample_scale or 8, K=args.k_const,
                delta_boost=args.delta_boost,
                scale_by_four=not args.no_scale_by_four)
            for algorithm in algorithms:
                records.append(_bench_cell(inst, algorithm, base_seed + seed, params))
    keyed = sorted(records, key=lambda r: (r.algorithm, r.delta, r.freq, r.m, r.seed))
    new_file = not os.path.exists(args.out)
    with open(args.out, "a", newline="") as fh:
        writer = csv.writer(fh)
        if new_file:
            writer.writerow([f.name for f in fields(BenchRecord)])
        for r in keyed:
            writer.writerow([getattr(r, f.name) for f in fields(BenchRecord)])
    print(f"appended {len(keyed)} records to {args.out}")
    return 0


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {
        "gen": _cmd_gen,
        "solve": _cmd_solve,
        "probe": _cmd_probe,
        "estimate": _cmd_estimate,
        "bench": _cmd_bench,
    }[args.command]
    return handler(args)


def main() -> None:
    raise SystemExit(run(sys.argv[1:]))
