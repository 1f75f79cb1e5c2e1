"""Command line front end: instance generation, single runs, sweeps,
clairvoyant baselines, indicator evaluation, aggregation, and the service."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .decisions import DRankPathSource, parse_path
from .dynamics import auto_delta, run_demoa
from .emoa import EmoaConfig
from .harness import (aggregate, clairvoyant_front, evaluate_indicators, read_clairvoyant,
                      sweep, write_clairvoyant)
from .instances import (assign_request_times, generate_clustered, generate_uniform,
                        read_instance, write_instance)


def _emoa_config(args) -> EmoaConfig:
    return EmoaConfig(mu=args.mu, lambda_=getattr(args, "lambda_"),
                      generations=args.generations, seed=args.seed)


def _add_emoa_flags(p: argparse.ArgumentParser, generations: int = 2000,
                    mu: int = 50, lam: int = 50):
    p.add_argument("--generations", type=int, default=generations)
    p.add_argument("--mu", type=int, default=mu)
    p.add_argument("--lambda", dest="lambda_", type=int, default=lam)
    p.add_argument("--seed", type=int, default=0)


def _parse_d_set(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _load_instances(paths: list[str]):
    return {Path(p).stem: read_instance(p) for p in paths}


def cmd_gen_instance(args) -> int:
    if args.topology == "uniform":
        inst = generate_uniform(args.n_mandatory, args.n_dynamic, args.seed, side=args.side,
                                n_eras=args.eras)
    else:
        k = int(args.topology[2:])
        inst = generate_clustered(k, args.n_mandatory, args.n_dynamic, args.seed,
                                  side=args.side, n_eras=args.eras)
    if args.delta == "auto":
        delta = auto_delta(inst, args.eras, seed=args.seed)
    else:
        delta = float(args.delta)
    inst = assign_request_times(inst, args.eras, delta, args.seed)
    write_instance(inst, args.out)
    print(f"wrote {args.out}: N={inst.n} topology={inst.topology_label} "
          f"eras={inst.n_eras} delta={inst.delta:.3f}")
    return 0


def cmd_run(args) -> int:
    inst = read_instance(args.instance)
    n_eras = args.eras or inst.n_eras
    delta = args.delta or inst.delta
    path = parse_path(args.path)
    if len(path) != n_eras:
        print(f"error: path has {len(path)} entries but the run spans {n_eras} eras",
              file=sys.stderr)
        return 2
    trace = run_demoa(inst, n_eras, delta, DRankPathSource(path), _emoa_config(args))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trace.write_csv(out / "trace.csv")
    trace.write_tour(out / "tour.txt")
    final = trace.records[-1]
    obj = final.front.members[final.decision.index][1]
    print(f"final era {final.era_index}: tour_length={obj.tour_length:.3f} "
          f"unvisited={obj.unvisited} (upper bound {final.upper_bound})")
    print(f"wrote {out / 'trace.csv'} and {out / 'tour.txt'}")
    return 0


def cmd_sweep(args) -> int:
    instances = _load_instances(args.instances)
    config = _emoa_config(args)
    paths = [parse_path(t) for t in args.paths] if args.paths else None
    results, fronts = sweep(instances, _parse_d_set(args.d_set), args.eras, args.delta,
                            args.replicates, config, args.out_dir,
                            master_seed=args.seed, jobs=args.jobs, paths=paths)
    print(f"wrote {results} and {fronts}")
    return 0


def cmd_clairvoyant(args) -> int:
    instances = _load_instances(args.instances)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = _emoa_config(args)
    for name, inst in sorted(instances.items()):
        front = clairvoyant_front(inst, config, n_repeats=args.repeats)
        target = out / f"clairvoyant_{name}.csv"
        write_clairvoyant(front, target)
        print(f"wrote {target} ({len(front)} points)")
    return 0


def cmd_eval(args) -> int:
    cl_dir = Path(args.clairvoyant_dir)
    clairvoyant = {}
    for f in cl_dir.glob("clairvoyant_*.csv"):
        clairvoyant[f.stem.removeprefix("clairvoyant_")] = read_clairvoyant(f)
    df = evaluate_indicators(args.results, args.fronts, clairvoyant, args.out)
    print(df.to_string(index=False))
    if args.out:
        print(f"wrote {args.out}")
    return 0


def cmd_aggregate(args) -> int:
    df = aggregate(args.results, args.out)
    print(df.to_string(index=False))
    if args.out:
        print(f"wrote {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    port = args.port or int(os.environ.get("DYNROUTE_PORT", "8000"))
    max_sessions = args.max_sessions or int(os.environ.get("DYNROUTE_MAX_SESSIONS", "8"))
    frontend = args.frontend_dir
    if frontend is None:
        default = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        frontend = default if default.is_dir() else None
    app = create_app(max_sessions=max_sessions, frontend_dir=frontend)
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynroute",
                                     description="Dynamic bi-objective vehicle routing toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-instance", help="generate a problem instance file")
    p.add_argument("--topology", choices=["uniform", "cl2", "cl3"], required=True)
    p.add_argument("--n-mandatory", type=int, default=25,
                   help="mandatory customers including both depots")
    p.add_argument("--n-dynamic", type=int, default=75)
    p.add_argument("--eras", type=int, default=7)
    p.add_argument("--delta", default="auto", help="era length, or 'auto'")
    p.add_argument("--side", type=float, default=100.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_instance)

    p = sub.add_parser("run", help="one optimization run along a decision path")
    p.add_argument("--instance", required=True)
    p.add_argument("--path", required=True, help='decision path, e.g. "0.25,0.5,0.75"')
    p.add_argument("--eras", type=int, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--out-dir", default="runs")
    _add_emoa_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="exhaustive decision-path sweep")
    p.add_argument("--instances", nargs="+", required=True)
    p.add_argument("--d-set", default="0.25,0.5,0.75")
    p.add_argument("--paths", nargs="+", default=None,
                   help="explicit decision paths instead of the exhaustive enumeration")
    p.add_argument("--eras", type=int, default=7)
    p.add_argument("--delta", type=float, default=None, help="default: per-instance value")
    p.add_argument("--replicates", type=int, default=5)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", default="sweep")
    _add_emoa_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("clairvoyant", help="full-knowledge baseline fronts")
    p.add_argument("--instances", nargs="+", required=True)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--out-dir", default="sweep")
    _add_emoa_flags(p)
    p.set_defaults(func=cmd_clairvoyant)

    p = sub.add_parser("eval", help="hypervolume indicators vs the clairvoyant reference")
    p.add_argument("--results", required=True)
    p.add_argument("--fronts", required=True)
    p.add_argument("--clairvoyant-dir", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("aggregate", help="mean/std summary by topology and final decision")
    p.add_argument("--results", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("serve", help="interactive decision-support HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--max-sessions", type=int, default=None)
    p.add_argument("--frontend-dir", default=None)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
