"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 depth cap exceeded,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import backend
from .errors import DepthExceeded, SearchSpaceError, ShapeMismatch, UnknownFunction
from .harness import ExperimentConfig, count_command, run_experiment
from .search import SEARCHERS, RandomSearcher
from .serialization import log_to_json
from .spaces import SPACES, make_space, space_fn
from .traversal import ordered_hyperps, ordered_modules

EXIT_OK, EXIT_CONFIG, EXIT_DEPTH, EXIT_INTERNAL = 0, 2, 3, 4


class ConfigError(Exception):
    pass


def _space_name(name: str) -> str:
    if name not in SPACES:
        raise ConfigError(f"unknown space {name!r}; known: {', '.join(sorted(SPACES))}")
    return name


def _dims(text: str) -> tuple:
    try:
        dims = tuple(int(d) for d in text.replace("x", ",").split(",") if d.strip())
    except ValueError:
        raise ConfigError(f"bad shape {text!r}; expected comma-separated integers") from None
    if not dims or any(d <= 0 for d in dims):
        raise ConfigError(f"bad shape {text!r}; extents must be positive")
    return dims


def _input_shapes(specs, space) -> dict:
    """``--input-shape 2,8`` applies to every input; ``--input-shape x=2,8`` to one."""
    shapes = {}
    for spec in specs:
        if "=" in spec:
            name, dims = spec.split("=", 1)
            if name not in space.inputs:
                raise ConfigError(f"space has no input {name!r}; inputs: {sorted(space.inputs)}")
            shapes[name] = _dims(dims)
        else:
            for name in space.inputs:
                shapes[name] = _dims(spec)
    return shapes


def cmd_count(args) -> int:
    print(count_command(_space_name(args.space), args.depth_cap))
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.n < 0:
        raise ConfigError("--n must be non-negative")
    searcher = RandomSearcher(space_fn(_space_name(args.space)), seed=args.seed, depth_cap=args.depth_cap)
    for _ in range(args.n):
        print(json.dumps(log_to_json(searcher.sample().log)))
    return EXIT_OK


def _status(space, h) -> str:
    return f"value={space.values[h]!r}" if h in space.values else "unassigned"


def cmd_describe(args) -> int:
    """One line per module, then per hyperparameter: ``<id>\t<kind>\t<status>``."""
    space = make_space(_space_name(args.space))
    for mid in ordered_modules(space):
        m = space.modules[mid]
        kind = f"basic:{m.op}" if m.is_basic else f"substitution:{m.generator.fn}"
        hyps = ",".join(f"{k}={h}" for k, h in sorted(m.hyperps.items()))
        print(f"{mid}\t{kind}\thyperps[{hyps}]")
    for h in ordered_hyperps(space):
        hp = space.hyperps[h]
        if hp.is_independent:
            kind = f"independent:{list(hp.domain)}"
        else:
            parents = ",".join(f"{k}={p}" for k, p in sorted(hp.parents.items()))
            kind = f"dependent:{hp.fn.fn}({parents})"
        print(f"{h}\t{kind}\t{_status(space, h)}")
    return EXIT_OK


def cmd_forward(args) -> int:
    name = _space_name(args.space)
    result = RandomSearcher(space_fn(name), seed=args.seed, depth_cap=args.depth_cap).sample()
    space = result.space
    shapes = dict(SPACES[name].input_shapes)
    shapes.update(_input_shapes(args.input_shape or [], space))
    cg = backend.compile(space, shapes, seed=args.seed)
    out = backend.forward(cg, backend.random_inputs(cg, args.seed))
    print("assignment_log " + json.dumps(log_to_json(result.log)))
    for k in sorted(out):
        print(f"output {k} shape {list(out[k].shape)}")
    print(f"params {backend.param_count(cg)}")
    print(f"checksum {backend.format_checksum(backend.checksum(out))}")
    return EXIT_OK


def cmd_search(args) -> int:
    try:
        seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"bad --seeds {args.seeds!r}") from None
    config = ExperimentConfig(
        space=_space_name(args.space),
        searcher=args.algo,
        num_samples=args.num_samples,
        seeds=seeds,
        evaluator=args.evaluator,
        evaluator_seed=args.evaluator_seed,
        depth_cap=args.depth_cap,
        out_dir=args.out,
    )
    try:
        config.check()
    except (KeyError, ValueError) as e:
        raise ConfigError(str(e)) from None
    result = run_experiment(config)
    code = EXIT_OK
    for run in result.runs:
        best = "n/a" if run.best_score is None else f"{run.best_score:.6f}"
        status = run.failure or "ok"
        print(f"seed {run.seed}: best {best} at iteration {run.iterations_to_best} ({status})")
        if run.failure:
            code = EXIT_DEPTH
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="archspace", description="Search-space toolkit for architecture search.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", help="count distinct terminal architectures")
    c.add_argument("--space", required=True)
    c.add_argument("--depth-cap", type=int, default=64)
    c.set_defaults(run=cmd_count)

    s = sub.add_parser("sample", help="print random assignment logs as JSON")
    s.add_argument("--space", required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--depth-cap", type=int, default=64)
    s.set_defaults(run=cmd_sample)

    d = sub.add_parser("describe", help="list modules and hyperparameters in traversal order")
    d.add_argument("--space", required=True)
    d.set_defaults(run=cmd_describe)

    f = sub.add_parser("forward", help="sample an architecture, run it once, print shapes and a checksum")
    f.add_argument("--space", required=True)
    f.add_argument("--seed", type=int, required=True)
    f.add_argument("--input-shape", action="append", metavar="[NAME=]DIMS")
    f.add_argument("--depth-cap", type=int, default=64)
    f.set_defaults(run=cmd_forward)

    r = sub.add_parser("search", help="run a seeded search experiment")
    r.add_argument("--space", required=True)
    r.add_argument("--algo", required=True, choices=sorted(SEARCHERS))
    r.add_argument("--num-samples", type=int, default=256)
    r.add_argument("--seeds", default="0")
    r.add_argument("--evaluator", choices=["synthetic", "forward"], default="synthetic")
    r.add_argument("--evaluator-seed", type=int, default=0)
    r.add_argument("--depth-cap", type=int, default=64)
    r.add_argument("--out", required=True)
    r.set_defaults(run=cmd_search)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DepthExceeded as e:
        print(f"error: depth cap exceeded: {e}", file=sys.stderr)
        return EXIT_DEPTH
    except (ShapeMismatch, UnknownFunction) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except SearchSpaceError as e:
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
