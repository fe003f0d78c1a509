"""Command line entry point: ``prodperc <subcommand> ...``.

Exit codes: 0 success, 1 failed self-test, 2 configuration or parameter error, 3 guard violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .experiment import (
    ConfigError,
    config_from_mapping,
    execute,
    parse_config_text,
    rows_to_csv,
    rows_to_json,
    sweep,
    write_result,
)
from .expr import GraphExprError
from .graph import GuardError

EXIT_OK, EXIT_SELFTEST, EXIT_CONFIG, EXIT_GUARD = 0, 1, 2, 3

# subcommand -> op name in the config
OP_OF = {
    "giant": "giant",
    "iso": "isoperimetry",
    "expand": "expansion",
    "extract": "extract",
    "diameter": "diameter",
    "cycle": "cycle",
    "mixing": "mixing",
    "sprinkle": "sprinkle",
}


def _common(p: argparse.ArgumentParser, sampling=True):
    p.add_argument("--config", help="key = value config file; flags override it")
    p.add_argument("--graph", help="graph expression, e.g. 'Q16' or 'K3^2 x C5'")
    if sampling:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--eps", nargs="+", help="supercritical offsets; p = (1 + eps)/d")
        g.add_argument("--p", nargs="+", help="edge probabilities")
        p.add_argument("--seeds", type=int, help="replicates per probability")
        p.add_argument("--seed-base", type=int, help="first seed; replicate i uses seed-base + i")
        p.add_argument("--threads", type=int, help="worker threads (PRODPERC_THREADS overrides)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"], help="output format")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="prodperc", description="Bond percolation on Cartesian product graphs.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="build a product graph and print its parameters")
    p.add_argument("--graph", required=True)
    p.add_argument("--out", help="write the canonical edge list here")
    p.add_argument("--format", choices=["csv", "json"], default="json")

    p = sub.add_parser("percolate", help="draw one edge sample and save it")
    p.add_argument("--graph", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--eps", type=float)
    g.add_argument("--p", type=float)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--hex", action="store_true", help="write the portable hex text form")

    p = sub.add_parser("giant", help="giant component statistics per replicate")
    _common(p)
    p = sub.add_parser("iso", help="exact isoperimetric profile (n <= 24)")
    _common(p, sampling=False)
    p.add_argument("--k-max", type=int)
    p = sub.add_parser("expand", help="expansion audit of sampled subsets of the giant")
    _common(p)
    p.add_argument("--mode", choices=["connected", "arbitrary"])
    p.add_argument("--c", type=float)
    p.add_argument("--sizes", nargs="+", type=int)
    p.add_argument("--draws", type=int)
    p.add_argument("--small-lower", type=float, help="lower size cutoff of the connected small-set regime")
    p.add_argument("--detail", help="per-subset CSV")
    p = sub.add_parser("extract", help="peel poorly expanding sets off the giant")
    _common(p)
    p.add_argument("--c-target", type=float)
    p.add_argument("--probes", type=int)
    p.add_argument("--log", help="JSON-lines removal log")
    p = sub.add_parser("diameter", help="diameter of the giant")
    _common(p)
    p.add_argument("--diameter-mode", choices=["exact", "sampled"])
    p.add_argument("--sweeps", type=int, help="double-sweep starts in sampled mode")
    p = sub.add_parser("cycle", help="long cycle heuristic on the giant")
    _common(p)
    p.add_argument("--budget", type=int)
    p = sub.add_parser("mixing", help="exact mixing time and the conductance bound")
    _common(p)
    p.add_argument("--K", type=float)
    p.add_argument("--probes", type=int)
    p.add_argument("--cap", type=int)
    p = sub.add_parser("sprinkle", help="two-round exposure and decoration sizes")
    _common(p)
    p.add_argument("--delta", type=float, help="second-round weight (default eps^3)")

    p = sub.add_parser("sweep", help="run a parameter grid from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--threads", type=int)

    p = sub.add_parser("selftest", help="run the quick oracle suite")
    p.add_argument("--out")
    return ap


_FLAG_KEYS = {
    "graph": "graph",
    "eps": "eps",
    "p": "p",
    "seeds": "seeds",
    "seed_base": "seed_base",
    "threads": "threads",
    "out": "out",
    "format": "format",
    "k_max": "k_max",
    "mode": "mode",
    "c": "c",
    "sizes": "sizes",
    "draws": "draws",
    "small_lower": "small_lower",
    "detail": "detail",
    "c_target": "c_target",
    "probes": "probes",
    "log": "log",
    "diameter_mode": "diameter_mode",
    "sweeps": "sweeps",
    "budget": "budget",
    "K": "K",
    "cap": "cap",
    "delta": "delta",
}


def _mapping(args, op: str | None) -> dict[str, list[str]]:
    raw = parse_config_text(Path(args.config).read_text()) if getattr(args, "config", None) else {}
    for attr, key in _FLAG_KEYS.items():
        val = getattr(args, attr, None)
        if val is None:
            continue
        raw[key] = [str(v) for v in val] if isinstance(val, list) else [str(val)]
    if op is not None:
        raw["op"] = [op]
    return raw


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)


def _cmd_gen(args):
    from .graph import graph

    G = graph(args.graph)
    info = {"graph": G.spec, "n": G.n, "d": G.d, "C": G.C, "t": len(G.orders), "edge_count": G.edge_count}
    if args.out:
        e = G.edges
        with open(args.out, "w") as f:
            f.write("u,v,direction\n")
            for u, v, j in zip(e.src.tolist(), e.dst.tolist(), e.direction.tolist()):
                f.write(f"{u},{v},{j}\n")
    if args.format == "json":
        sys.stdout.write(json.dumps(info, sort_keys=True) + "\n")
    else:
        sys.stdout.write(rows_to_csv(list(info), [info]))
    return EXIT_OK


def _cmd_percolate(args):
    from .graph import graph
    from .percolation import eps_to_p, sample_percolation, sample_to_hex, save_sample

    G = graph(args.graph)
    if args.eps is not None:
        if G.d is None:
            raise ConfigError("eps needs a regular graph; give --p")
        p = eps_to_p(args.eps, G.d)
    else:
        p = args.p
    if not 0 <= p <= 1:
        raise ConfigError(f"p={p} outside [0, 1]")
    threads = int(os.environ.get("PRODPERC_THREADS", args.threads))
    s = sample_percolation(G, p, args.seed_base, threads=threads)
    if args.hex:
        Path(args.out).write_text(sample_to_hex(s))
    else:
        save_sample(args.out, s)
    sys.stdout.write(json.dumps({"graph": G.spec, "p": p, "seed": args.seed_base, "retained": s.retained_count}) + "\n")
    return EXIT_OK


def _cmd_experiment(args):
    cfg = config_from_mapping(_mapping(args, OP_OF[args.cmd]))
    partial = {}
    try:
        res = execute(cfg, on_partial=lambda r: partial.setdefault("r", r))
    except Exception:
        if cfg.out and "r" in partial:
            write_result(cfg, partial["r"])
        raise
    text = write_result(cfg, res)
    _emit(text, cfg.out)
    return EXIT_OK


def _cmd_sweep(args):
    raw = parse_config_text(Path(args.config).read_text())
    for key in ("out", "format", "threads"):
        val = getattr(args, key)
        if val is not None:
            raw[key] = [str(val)]
    cfg = config_from_mapping(raw)
    res = sweep(cfg)
    text = rows_to_json(res.columns, res.rows) if cfg.fmt == "json" else rows_to_csv(res.columns, res.rows)
    if cfg.out:
        Path(cfg.out).write_text(text)
        Path(cfg.summary or str(Path(cfg.out).with_suffix(".summary.json"))).write_text(
            json.dumps(res.summary, indent=1, sort_keys=True) + "\n"
        )
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_selftest(args):
    from .selftest import run_selftest, selftest_csv

    rows = run_selftest()
    text = selftest_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(r[3] for r in rows) else EXIT_SELFTEST


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"gen": _cmd_gen, "percolate": _cmd_percolate, "sweep": _cmd_sweep, "selftest": _cmd_selftest}
    handler = handlers.get(args.cmd, _cmd_experiment)
    try:
        return handler(args)
    except (ConfigError, GraphExprError) as e:
        print(f"prodperc: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as e:
        # parameters that are well-formed but unusable on this instance, e.g. an unreachable c_target
        print(f"prodperc: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except GuardError as e:
        print(f"prodperc: guard: {e}", file=sys.stderr)
        return EXIT_GUARD
    except OSError as e:
        print(f"prodperc: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
