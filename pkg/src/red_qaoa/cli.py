"""Command-line entry point: ``red-qaoa <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import __version__
from .graphs import (Graph, GraphError, generate_connected_erdos_renyi, generate_cycle,
                     generate_erdos_renyi, is_connected, read_edge_list)
from .landscape import LandscapeSpec, load_landscape, sample_landscape
from .metrics import compare_landscapes
from .noise import NoisyEvaluator, load_noise
from .pipeline import (OptimizerConfig, bench_reduction_stats, default_restarts, optimize_params,
                       run_baseline, run_red_qaoa)
from .reduction import DEFAULT_THRESHOLD, SAConfig, find_reduced_graph, sa_reduce
from .simulator import max_cut_bruteforce, qaoa_expectation

log = logging.getLogger("red_qaoa")


class RunManifest:
    """Provenance block embedded in every JSON output."""

    def __init__(self, args: argparse.Namespace):
        self.subcommand = args.command
        self.flags = {k: v for k, v in vars(args).items() if k not in ("func", "command")}
        self.inputs: dict[str, str] = {}
        self.timings: dict[str, float] = {}
        self._t0 = time.perf_counter()

    def add_input(self, name: str, g: Graph) -> Graph:
        self.inputs[str(name)] = g.fingerprint
        return g

    def to_json(self) -> dict:
        self.timings.setdefault("total_seconds", time.perf_counter() - self._t0)
        seeds = {k: v for k, v in self.flags.items() if "seed" in k}
        return {
            "subcommand": self.subcommand,
            "flags": self.flags,
            "seeds": seeds,
            "version": __version__,
            "input_fingerprints": self.inputs,
            "timings": self.timings,
        }


def _emit(payload: dict, manifest: RunManifest, output: str | None) -> None:
    payload = dict(payload)
    payload["manifest"] = manifest.to_json()
    text = json.dumps(payload, indent=2, default=str)
    _write(text + "\n", output)


def _write(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _sa_config(args) -> SAConfig:
    return SAConfig(seed=args.seed, cooling=getattr(args, "cooling", "adaptive"),
                    max_steps=getattr(args, "max_steps", None))


def _opt_config(args) -> OptimizerConfig:
    restarts = args.restarts if args.restarts is not None else default_restarts(args.p)
    return OptimizerConfig(restarts=restarts, max_evals_per_restart=args.max_evals, seed=args.seed)


def _dataset(args, manifest: RunManifest) -> list[tuple[str, Graph]]:
    paths: list[Path] = []
    if getattr(args, "input", None):
        paths.append(Path(args.input))
    if getattr(args, "dataset_dir", None):
        paths.extend(sorted(p for p in Path(args.dataset_dir).iterdir() if p.is_file()))
    if not paths:
        raise GraphError("no input graphs given (use --input or --dataset-dir)")
    return [(str(p), manifest.add_input(p, read_edge_list(p))) for p in paths]


# ---------------------------------------------------------------------------
# subcommands

def cmd_gen(args, manifest):
    if args.cycle is not None:
        g = generate_cycle(args.cycle)
    else:
        n, prob = int(args.er[0]), float(args.er[1])
        g = (generate_connected_erdos_renyi(n, prob, args.seed) if args.connected
             else generate_erdos_renyi(n, prob, args.seed))
    _write(g.to_edge_list(), args.output)


def cmd_reduce(args, manifest):
    g = manifest.add_input(args.input, read_edge_list(args.input))
    if not is_connected(g):
        raise GraphError("input graph is disconnected")
    t = time.perf_counter()
    if args.k is not None:
        res = sa_reduce(g, args.k, _sa_config(args))
    else:
        res = find_reduced_graph(g, args.threshold, _sa_config(args))
    manifest.timings["reduction_seconds"] = time.perf_counter() - t
    if res.warning:
        print(f"warning: {res.warning}", file=sys.stderr)
    _emit({"reduction": res.to_json(g)}, manifest, args.output)


def _landscape_spec(args) -> LandscapeSpec:
    if args.grid is not None:
        return LandscapeSpec.grid(args.grid)
    return LandscapeSpec.random(args.random, args.seed)


def cmd_landscape(args, manifest):
    g = manifest.add_input(args.input, read_edge_list(args.input))
    noise = load_noise(args.noise)
    evaluator = None if noise is None else NoisyEvaluator(noise, seed=args.seed, method=args.noise_method)
    land = sample_landscape(g, args.p, _landscape_spec(args), evaluator, workers=args.threads)
    if args.format == "csv":
        _write(land.to_csv(), args.output)
        return
    payload = land.to_json()
    payload["noise"] = None if noise is None else noise.to_json()
    _emit(payload, manifest, args.output)


def cmd_compare(args, manifest):
    a, b = load_landscape(args.a), load_landscape(args.b)
    report = compare_landscapes(a, b, args.top_k)
    _emit({"comparison": report.to_json()}, manifest, args.output)


def _trace_out(trace, path):
    if path:
        Path(path).write_text(trace.to_csv(), encoding="utf-8")


def cmd_optimize(args, manifest):
    g = manifest.add_input(args.input, read_edge_list(args.input))
    noise = load_noise(args.noise)
    evaluator = None if noise is None else NoisyEvaluator(noise, seed=args.seed, method=args.noise_method)
    trace = optimize_params(g, args.p, evaluator, _opt_config(args), workers=args.threads)
    _trace_out(trace, args.trace_csv)
    best = trace.best_params
    mc, _ = max_cut_bruteforce(g)
    _emit({"trace": trace.to_json(), "max_cut": mc,
           "approximation_ratio": qaoa_expectation(g, best) / mc}, manifest, args.output)


def cmd_baseline(args, manifest):
    g = manifest.add_input(args.input, read_edge_list(args.input))
    trace = run_baseline(g, args.p, load_noise(args.noise), _opt_config(args), args.noise_method,
                         workers=args.threads)
    _trace_out(trace, args.trace_csv)
    mc, _ = max_cut_bruteforce(g)
    _emit({"trace": trace.to_json(), "max_cut": mc,
           "approximation_ratio": qaoa_expectation(g, trace.best_params) / mc}, manifest, args.output)


def cmd_pipeline(args, manifest):
    runs = []
    for i, (name, g) in enumerate(_dataset(args, manifest)):
        res = run_red_qaoa(g, args.p, load_noise(args.noise), _sa_config(args), args.threshold,
                           _opt_config(args), args.refine_frac, args.noise_method, args.baseline,
                           workers=args.threads)
        if res.reduction.warning:
            print(f"warning: {name}: {res.reduction.warning}", file=sys.stderr)
        if args.trace_csv:
            stem = args.trace_csv if len(runs) == 0 and not args.dataset_dir else f"{args.trace_csv}.{i}"
            Path(stem).write_text(res.reduced_trace.to_csv() + res.refined_trace.to_csv().split("\n", 1)[1],
                                  encoding="utf-8")
        runs.append({"input": name, "result": res.to_json(g)})
    _emit({"runs": runs}, manifest, args.output)


def cmd_bench(args, manifest):
    named = _dataset(args, manifest)
    graphs = [g for _, g in named]
    if args.timing:
        timings = []
        for name, g in named:
            t = time.perf_counter()
            res = find_reduced_graph(g, args.threshold, _sa_config(args))
            timings.append({"input": name, "nodes": g.node_count, "edges": g.edge_count,
                            "k": res.k, "seconds": time.perf_counter() - t})
        _emit({"timing": timings}, manifest, args.output)
        return
    spec = _landscape_spec(args)
    summary = bench_reduction_stats(graphs, args.threshold, tuple(args.p_values), spec, _sa_config(args))
    _emit({"summary": summary}, manifest, args.output)


# ---------------------------------------------------------------------------

def _add_common(sp, seed=True):
    sp.add_argument("--output", "-o", help="output file (default: stdout)")
    if seed:
        sp.add_argument("--seed", type=int, default=0)


def _add_noise(sp):
    sp.add_argument("--noise", default="none", help="none, default, a JSON file or inline JSON")
    sp.add_argument("--noise-method", choices=("auto", "dm", "global"), default="auto")


def _add_opt(sp):
    sp.add_argument("--p", type=int, default=1)
    sp.add_argument("--restarts", type=int, help="default 20/50/150 for p=1/2/3")
    sp.add_argument("--max-evals", type=int, default=200, help="evaluations per restart")
    sp.add_argument("--trace-csv", help="write the iteration trace as CSV")


def _add_sampling(sp, required=True):
    grp = sp.add_mutually_exclusive_group(required=required)
    grp.add_argument("--grid", type=int, metavar="W", help="W x W grid (p=1)")
    grp.add_argument("--random", type=int, metavar="N", help="N uniform random points")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="red-qaoa", description="Graph reduction for QAOA parameter search")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker count")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen", help="write an edge-list graph")
    grp = sp.add_mutually_exclusive_group(required=True)
    grp.add_argument("--cycle", type=int, metavar="N")
    grp.add_argument("--er", nargs=2, metavar=("N", "P"))
    sp.add_argument("--connected", action="store_true", help="redraw ER graphs until connected")
    _add_common(sp)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("reduce", help="find a reduced graph")
    sp.add_argument("--input", "-i", required=True)
    sp.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    sp.add_argument("--k", type=int, help="fixed subgraph size (single annealing run)")
    sp.add_argument("--cooling", choices=("adaptive", "constant"), default="adaptive")
    sp.add_argument("--max-steps", type=int)
    _add_common(sp)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("landscape", help="sample an energy landscape")
    sp.add_argument("--input", "-i", required=True)
    sp.add_argument("--p", type=int, default=1)
    _add_sampling(sp)
    _add_noise(sp)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    _add_common(sp)
    sp.set_defaults(func=cmd_landscape)

    sp = sub.add_parser("compare", help="compare two landscape JSON files")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--top-k", type=int, default=1)
    _add_common(sp, seed=False)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("optimize", help="multi-start Nelder-Mead on one graph")
    sp.add_argument("--input", "-i", required=True)
    _add_opt(sp)
    _add_noise(sp)
    _add_common(sp)
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("baseline", help="direct optimisation with the full budget")
    sp.add_argument("--input", "-i", required=True)
    _add_opt(sp)
    _add_noise(sp)
    _add_common(sp)
    sp.set_defaults(func=cmd_baseline)

    sp = sub.add_parser("pipeline", help="reduce, optimise, transfer, refine")
    sp.add_argument("--input", "-i")
    sp.add_argument("--dataset-dir")
    sp.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    sp.add_argument("--refine-frac", type=float, default=0.2)
    sp.add_argument("--baseline", action="store_true", help="also run the baseline arm")
    _add_opt(sp)
    _add_noise(sp)
    _add_common(sp)
    sp.set_defaults(func=cmd_pipeline)

    sp = sub.add_parser("bench", help="reduction statistics over a dataset")
    sp.add_argument("--input", "-i")
    sp.add_argument("--dataset-dir")
    sp.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    sp.add_argument("--p-values", type=int, nargs="+", default=[1])
    sp.add_argument("--timing", action="store_true", help="only time the reduction driver")
    _add_sampling(sp, required=False)
    _add_common(sp)
    sp.set_defaults(func=cmd_bench, random=None, grid=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    if args.command == "bench" and args.grid is None and args.random is None:
        args.random = 1024
    manifest = RunManifest(args)
    try:
        args.func(args, manifest)
    except (GraphError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
