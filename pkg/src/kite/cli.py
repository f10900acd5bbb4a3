"""Command-line surface: `select`, `gamma`, and `synth` subcommands.

Exit codes: 0 success, 2 argument errors, 3 file parse errors,
4 numerical degeneracy. Every error prints a single-line diagnostic
to stderr. Result payloads are emitted as JSON records that echo the
full effective configuration (defaults included) and the seed, so a
record is sufficient to reproduce its own payload.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .analysis import estimate_gamma_min
from .backend import backend_name
from .bank import load_bank
from .baselines import BaselineSpec, select_dense_topk, select_dpp_greedy, select_random
from .errors import InvalidArgumentError, NumericalDegeneracyError, ParseError
from .kernels import format_kernel_spec, parse_kernel_spec
from .selector import SelectionConfig, select
from .synthbench import METHODS, SynthConfig, run_sweep


def versions() -> dict:
    return {"kite": __version__, "numpy": np.__version__, "backend": backend_name}


@dataclass
class RunRecord:
    command: str
    config: dict
    result: dict
    seed: int | None = None
    wall_time: float = 0.0
    versions: dict = field(default_factory=versions)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": dict(self.config),
            "result": dict(self.result),
            "versions": dict(self.versions),
            "seed": self.seed,
            "wall_time": self.wall_time,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunRecord":
        return cls(
            command=data["command"],
            config=data["config"],
            result=data["result"],
            seed=data["seed"],
            wall_time=data["wall_time"],
            versions=data["versions"],
        )


def _csv_ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InvalidArgumentError(f"bad integer list {text!r}: {exc}") from exc


def _csv_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InvalidArgumentError(f"bad number list {text!r}: {exc}") from exc


def _emit(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_select(args) -> int:
    bank = load_bank(args.bank)
    queries = load_bank(args.query)
    if queries.dim != bank.dim:
        raise InvalidArgumentError(
            f"query dimension {queries.dim} != bank dimension {bank.dim}"
        )
    kernel = parse_kernel_spec(args.kernel)
    lines = []
    for qi in range(queries.n):
        z = queries.vectors[qi]
        t0 = time.perf_counter()
        if args.method == "kite":
            cfg = SelectionConfig(
                k=args.k,
                beta=args.beta,
                lam=getattr(args, "lambda"),
                kernel=kernel,
                raw_kernel_scores=args.raw_kernel_scores,
            )
            result = select(bank, z, cfg)
        elif args.method == "random":
            qseed = int(np.random.SeedSequence([args.seed, qi]).generate_state(1)[0])
            result = select_random(bank, args.k, qseed)
        elif args.method == "dense":
            result = select_dense_topk(bank, z, args.k, similarity=args.similarity)
        else:  # dpp
            spec = BaselineSpec(
                method="dpp_greedy",
                similarity=args.similarity,
                kernel=kernel,
                seed=args.seed,
            )
            result = select_dpp_greedy(bank, z, args.k, spec)
        config = dict(result.config)
        config.update(
            {
                "method": args.method,
                "bank": args.bank,
                "query": args.query,
                "query_index": qi,
                "query_id": queries.ids[qi],
                "k": args.k,
                "beta": args.beta,
                "lambda": getattr(args, "lambda"),
                "kernel": format_kernel_spec(kernel),
                "seed": args.seed,
            }
        )
        record = RunRecord(
            command="select",
            config=config,
            result=result.to_dict(),
            seed=args.seed,
            wall_time=time.perf_counter() - t0,
        )
        lines.append(json.dumps(record.to_dict()))
    _emit(lines, args.out)
    return 0


def cmd_gamma(args) -> int:
    t0 = time.perf_counter()
    demo = load_bank(args.demo_bank)
    queries = load_bank(args.query_bank)
    report = estimate_gamma_min(
        demo,
        queries,
        _csv_ints(args.k_grid),
        _csv_floats(args.beta_grid),
        trials=args.trials,
        seed=args.seed,
    )
    print(report.to_text())
    if args.out:
        record = RunRecord(
            command="gamma",
            config={
                "demo_bank": args.demo_bank,
                "query_bank": args.query_bank,
                "k_grid": _csv_ints(args.k_grid),
                "beta_grid": _csv_floats(args.beta_grid),
                "trials": args.trials,
                "seed": args.seed,
            },
            result=report.to_dict(),
            seed=args.seed,
            wall_time=time.perf_counter() - t0,
        )
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(record.to_dict()) + "\n")
    return 0


def cmd_synth(args) -> int:
    t0 = time.perf_counter()
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    config = SynthConfig(
        n=args.n,
        d=args.d,
        k=args.k,
        sigma=args.sigma,
        mu_train=args.mu_train,
        mu_test=args.mu_test,
        beta_fit=args.beta,
        runs=args.runs,
        n_test=args.n_test,
        methods=methods,
        lambda_grid=tuple(_csv_floats(args.lambda_grid)),
        seed=args.seed,
    )
    report = run_sweep(config)
    print(report.to_text())
    if args.out:
        record = RunRecord(
            command="synth",
            config=config.to_dict(),
            result=report.to_dict(),
            seed=args.seed,
            wall_time=time.perf_counter() - t0,
        )
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(record.to_dict()) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kite",
        description="Query-specific exemplar selection, submodularity analysis, "
        "and a synthetic linear-model benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="greedy exemplar selection for each query row")
    p.add_argument("--bank", required=True, help="candidate bank (csv or kitebin)")
    p.add_argument("--query", required=True, help="query file, one query per row")
    p.add_argument("--k", type=int, default=50)
    p.add_argument("--beta", type=float, default=0.02)
    p.add_argument("--lambda", type=float, default=0.5, dest="lambda")
    p.add_argument("--kernel", default="linear",
                   help="linear | poly:c=<real>,m=<int> | rbf:sigma=<real>")
    p.add_argument("--method", choices=("kite", "random", "dense", "dpp"), default="kite")
    p.add_argument("--similarity", choices=("cosine", "dot"), default="cosine",
                   help="similarity for the dense/dpp baselines")
    p.add_argument("--raw-kernel-scores", action="store_true",
                   help="score with the unnormalized residual-kernel forms")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("gamma", help="Monte-Carlo submodularity-ratio estimation")
    p.add_argument("--demo-bank", required=True)
    p.add_argument("--query-bank", required=True)
    p.add_argument("--k-grid", required=True, help="comma-separated ints")
    p.add_argument("--beta-grid", required=True, help="comma-separated reals")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("synth", help="synthetic linear-model benchmark cell")
    p.add_argument("--d", type=int, default=5)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--sigma", type=float, default=5.0)
    p.add_argument("--mu-train", type=float, default=0.0)
    p.add_argument("--mu-test", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.02)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--n-test", type=int, default=200)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--lambda-grid", default=",".join(str(v) for v in range(1, 11)))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_synth)

    return parser


def cli_dispatch(argv) -> int:
    """Parse argv and run the subcommand, mapping errors to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalDegeneracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
