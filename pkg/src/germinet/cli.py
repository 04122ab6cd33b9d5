"""Command-line client for the detection service.

Every subcommand builds the same request model the HTTP endpoint accepts
and, by default, executes it in-process; with --server it posts the request
to a running instance instead. Output is canonical JSON (sorted keys) or a
short text rendering with --format text.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import DataError, GerminetError
from .service import handlers
from .service import schemas as sc

ROUTES = {
    "gen": "/generate",
    "er": "/resistance",
    "germinate": "/germinate",
    "ppr": "/ppr",
    "detect": "/detect",
    "bench": "/bench",
    "eval": "/eval",
}


class Parser(argparse.ArgumentParser):
    # usage errors exit 1 (argparse defaults to 2, which we reserve for data)
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}")


def _read_int_file(path: str) -> list[int]:
    with open(path, "r", encoding="utf-8") as fh:
        return [int(tok) for tok in fh.read().split()]


GLOBAL_DEFAULTS = {
    "seed": 0,
    "threads": 1,
    "format": "json",
    "server": None,
    "timings": False,
}


def _global_flags() -> argparse.ArgumentParser:
    # Shared by the root parser and every subparser so the flags may appear
    # on either side of the subcommand; SUPPRESS keeps subparser defaults
    # from clobbering values parsed by the root.
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help="rng seed (default 0)")
    p.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                   help="worker threads for bench")
    p.add_argument("--format", choices=["json", "text"], default=argparse.SUPPRESS)
    p.add_argument("--server", default=argparse.SUPPRESS,
                   help="base URL of a running service; post instead of running in-process")
    p.add_argument("--timings", action="store_true", default=argparse.SUPPRESS,
                   help="include wall-clock timings (breaks byte-for-byte reproducibility)")
    return p


def build_parser() -> Parser:
    shared = _global_flags()
    parser = Parser(prog="germinet", description=__doc__, parents=[shared])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a benchmark graph", parents=[shared])
    gen_kind = gen.add_subparsers(dest="kind", required=True)
    hsbm = gen_kind.add_parser("hsbm", help="(hierarchical) stochastic block model", parents=[shared])
    hsbm.add_argument("--blocks", type=_int_list, help="comma-separated block sizes")
    hsbm.add_argument("--p-in", type=float, help="within-block edge probability")
    hsbm.add_argument("--p-out", type=float, help="between-block edge probability")
    hsbm.add_argument("--prob-matrix", help="JSON matrix of block-pair probabilities")
    hsbm.add_argument("--levels", type=int, help="hierarchy depth")
    hsbm.add_argument("--branching", type=int, help="hierarchy branching factor")
    hsbm.add_argument("--block-size", type=int, help="leaf block size (hierarchy form)")
    hsbm.add_argument("--p-levels", help="JSON list of per-level probabilities")
    lfr = gen_kind.add_parser("lfr", help="power-law benchmark with planted communities", parents=[shared])
    lfr.add_argument("--n", type=int, required=True)
    lfr.add_argument("--degree-exponent", type=float, default=2.5)
    lfr.add_argument("--community-exponent", type=float, default=1.5)
    lfr.add_argument("--mu", type=float, default=0.2, help="mixing fraction")
    lfr.add_argument("--avg-degree", type=float, default=10.0)
    lfr.add_argument("--max-degree", type=int, default=50)
    lfr.add_argument("--min-community", type=int, default=20)
    lfr.add_argument("--max-community", type=int, default=100)
    for p in (hsbm, lfr):
        p.add_argument("--out-edges", help="edge list output path")
        p.add_argument("--out-communities", help="community file output path")

    er = sub.add_parser("er", help="compute edge effective resistances", parents=[shared])
    er.add_argument("--graph", required=True, help="edge list path")
    er.add_argument("--backend", choices=["exact", "sampled", "auto"], default="auto")
    er.add_argument("--trees", type=int, default=2000, help="spanning tree sample size")
    er.add_argument("--out", help="write the map as TSV instead of inlining it")

    germ = sub.add_parser("germinate", help="grow a seed set by smallest resistance", parents=[shared])
    germ.add_argument("--graph", required=True)
    germ.add_argument("--seeds", type=_int_list, required=True)
    germ.add_argument("--rise", type=float, default=0.05, help="stopping rise threshold")
    germ.add_argument("--cap", type=int, help="growth step cap")
    germ.add_argument("--er-backend", choices=["exact", "sampled", "auto"], default="auto")
    germ.add_argument("--trees", type=int, default=2000)

    ppr = sub.add_parser("ppr", help="personalized PageRank scores and sweep cut", parents=[shared])
    ppr.add_argument("--graph", required=True)
    ppr.add_argument("--seeds", type=_int_list, required=True)
    ppr.add_argument("--alpha", type=float, default=0.15)
    ppr.add_argument("--backend", choices=["power", "push"], default="power")
    ppr.add_argument("--tol", type=float, default=1e-10)
    ppr.add_argument("--epsilon", type=float, default=1e-7)
    ppr.add_argument("--no-sweep", action="store_true", help="scores only, no cut")
    ppr.add_argument("--rise", type=float, default=0.20)
    ppr.add_argument("--sweep-mode", choices=["local", "global"], default="local")
    ppr.add_argument("--degree-normalized", action="store_true")

    det = sub.add_parser("detect", help="full community detection pipeline", parents=[shared])
    det.add_argument("--graph", required=True)
    det.add_argument("--seeds", type=_int_list, required=True)
    _add_detector_flags(det)

    bench = sub.add_parser("bench", help="repeated paired experiments", parents=[shared])
    bench.add_argument("--graph", help="edge list path (with --communities)")
    bench.add_argument("--communities", help="ground-truth community file")
    bench.add_argument("--generator-json", help="generator spec as JSON")
    bench.add_argument("--methods", default="ppr_only,germinate_then_ppr",
                       help="comma-separated detector methods to compare")
    bench.add_argument("--runs", type=int, default=10)
    bench.add_argument("--seeds-per-run", type=int, default=3)
    bench.add_argument("--min-community-size", type=int)
    bench.add_argument("--policy", choices=["uniform", "fixed"], default="uniform")
    bench.add_argument("--fixed-community", type=int, default=0)
    bench.add_argument("--curves", help="directory for per-run precision-recall CSVs")
    _add_detector_flags(bench)

    ev = sub.add_parser("eval", help="score a node list against ground truth", parents=[shared])
    ev.add_argument("--estimate", type=_int_list)
    ev.add_argument("--estimate-file")
    ev.add_argument("--truth", type=_int_list)
    ev.add_argument("--truth-file")
    ev.add_argument("--truth-index", type=int, default=0)

    serve = sub.add_parser("serve", help="run the HTTP service", parents=[shared])
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    return parser


def _add_detector_flags(p) -> None:
    p.add_argument("--method", choices=["ppr_only", "er_only", "germinate_then_ppr"],
                   default="germinate_then_ppr")
    p.add_argument("--er-backend", choices=["exact", "sampled", "auto"], default="auto")
    p.add_argument("--trees", type=int, default=2000)
    p.add_argument("--alpha", type=float, default=0.15)
    p.add_argument("--ppr-backend", choices=["power", "push"], default="power")
    p.add_argument("--germination-rise", type=float, default=0.05)
    p.add_argument("--sweep-rise", type=float, default=0.20)
    p.add_argument("--sweep-mode", choices=["local", "global"], default="local")
    p.add_argument("--degree-normalized", action="store_true")
    p.add_argument("--cap", type=int, help="germination step cap")


def _detector_model(args, method=None) -> sc.DetectorConfigModel:
    return sc.DetectorConfigModel(
        method=method or args.method,
        er_backend=args.er_backend,
        num_trees=args.trees,
        alpha=args.alpha,
        ppr_backend=args.ppr_backend,
        germination_rise=args.germination_rise,
        sweep_rise=args.sweep_rise,
        sweep_mode=args.sweep_mode,
        degree_normalized_rank=args.degree_normalized,
        step_cap=args.cap,
        rng_seed=args.seed,
        name=method,
    )


def _build_request(args):
    if args.command == "gen":
        if args.kind == "hsbm":
            spec = sc.HsbmSpec(
                block_sizes=args.blocks,
                prob_matrix=json.loads(args.prob_matrix) if args.prob_matrix else None,
                p_in=args.p_in,
                p_out=args.p_out,
                levels=args.levels,
                branching=args.branching,
                block_size=args.block_size,
                p_levels=json.loads(args.p_levels) if args.p_levels else None,
            )
        else:
            spec = sc.LfrSpec(
                n=args.n,
                degree_exponent=args.degree_exponent,
                community_exponent=args.community_exponent,
                mixing_mu=args.mu,
                avg_degree=args.avg_degree,
                max_degree=args.max_degree,
                min_community=args.min_community,
                max_community=args.max_community,
            )
        return sc.GenerateRequest(
            spec=spec, seed=args.seed,
            out_edges=args.out_edges, out_communities=args.out_communities,
        )
    if args.command == "er":
        return sc.ResistanceRequest(
            graph=sc.GraphSource(path=args.graph),
            backend=args.backend, num_trees=args.trees, seed=args.seed, out=args.out,
        )
    if args.command == "germinate":
        return sc.GerminateRequest(
            graph=sc.GraphSource(path=args.graph), seeds=args.seeds,
            rise_threshold=args.rise, step_cap=args.cap,
            er_backend=args.er_backend, num_trees=args.trees, er_seed=args.seed,
        )
    if args.command == "ppr":
        return sc.PprRequest(
            graph=sc.GraphSource(path=args.graph), seeds=args.seeds,
            alpha=args.alpha, backend=args.backend, tol=args.tol,
            epsilon=args.epsilon, sweep=not args.no_sweep,
            rise_threshold=args.rise, sweep_mode=args.sweep_mode,
            degree_normalized=args.degree_normalized,
        )
    if args.command == "detect":
        return sc.DetectRequest(
            graph=sc.GraphSource(path=args.graph), seeds=args.seeds,
            config=_detector_model(args), include_timings=args.timings,
        )
    if args.command == "bench":
        if args.generator_json:
            dataset = sc.BenchDataset(
                generator=json.loads(args.generator_json),
            )
        elif args.graph:
            dataset = sc.BenchDataset(path=args.graph, communities=args.communities)
        else:
            raise DataError("bench needs --graph/--communities or --generator-json")
        methods = [m.strip() for m in args.methods.split(",") if m.strip()]
        return sc.BenchRequest(
            dataset=dataset,
            detectors=[_detector_model(args, method=m) for m in methods],
            runs=args.runs, seeds_per_run=args.seeds_per_run,
            min_community_size=args.min_community_size,
            community_policy=args.policy, fixed_community=args.fixed_community,
            master_seed=args.seed, threads=args.threads,
            curves_dir=args.curves, include_timings=args.timings,
        )
    if args.command == "eval":
        estimate = args.estimate if args.estimate else (
            _read_int_file(args.estimate_file) if args.estimate_file else None
        )
        if estimate is None:
            raise DataError("eval needs --estimate or --estimate-file")
        return sc.EvalRequest(
            estimate=estimate, truth=args.truth,
            truth_path=args.truth_file, truth_index=args.truth_index,
        )
    raise DataError(f"unknown command {args.command!r}")


LOCAL_HANDLERS = {
    "gen": handlers.handle_generate,
    "er": handlers.handle_resistance,
    "germinate": handlers.handle_germinate,
    "ppr": handlers.handle_ppr,
    "detect": handlers.handle_detect,
    "bench": handlers.handle_bench,
    "eval": handlers.handle_eval,
}


def _render_text(command: str, payload: dict) -> str:
    if command == "bench":
        report = payload["report"]
        lines = ["Mean F1 per method"]
        for label, agg in report["aggregates"].items():
            lines.append(f"  {label}: {agg['mean_f1']:.3f} ({agg['sd_f1']:.3f})")
        for label, frac in report["improvement"].items():
            lines.append(f"  {label} beat {report['baseline']} in {frac * 100:.0f}% of runs")
        return "\n".join(lines)
    if command == "detect":
        return (
            f"method: {payload['method']}\n"
            f"estimate ({payload['estimate_size']} nodes): {payload['estimate']}\n"
            f"stage boundary: {payload['stage_boundary']}"
        )
    if command == "eval":
        return (
            f"precision {payload['precision']:.4f}  recall {payload['recall']:.4f}  "
            f"f1 {payload['f1']:.4f}"
        )
    return "\n".join(f"{k}: {v}" for k, v in payload.items())


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for key, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)

    if args.command == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    try:
        request = _build_request(args)
    except (DataError, ValueError) as exc:
        print(f"germinet: {exc}", file=sys.stderr)
        return 1

    try:
        if args.server:
            import httpx

            url = args.server.rstrip("/") + ROUTES[args.command]
            reply = httpx.post(url, json=request.model_dump(mode="json"), timeout=None)
            if reply.status_code == 400:
                print(f"germinet: {reply.json().get('detail')}", file=sys.stderr)
                return 2
            reply.raise_for_status()
            payload = reply.json()
        else:
            response = LOCAL_HANDLERS[args.command](request)
            payload = response.model_dump(mode="json")
    except DataError as exc:
        print(f"germinet: {exc}", file=sys.stderr)
        return 2
    except GerminetError as exc:
        print(f"germinet: internal failure: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - surfaced as exit code 3
        print(f"germinet: internal failure: {exc}", file=sys.stderr)
        return 3

    if args.format == "text":
        print(_render_text(args.command, payload))
    else:
        print(json.dumps(payload, sort_keys=True, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
