"""Experiment configs, replicate runner and parameter sweeps.

Config files are flat ``key = value`` text; a repeated key makes a list and
``#`` starts a comment.  Keys ``grid.<name>`` declare sweep axes.  Epsilon is
converted to ``p = (1 + eps) / d`` once, in :func:`normalize`, so every
operation below sees only ``p``.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .expr import GraphExprError, parse_graph_expr
from .graph import GuardError, ProductGraph, build_product

OPS = ("giant", "isoperimetry", "expansion", "extract", "diameter", "cycle", "mixing", "sprinkle")
SCHEMA_VERSION = 1
DEFAULT_GRID_CAP = 10_000

# columns per op; bump SCHEMA_VERSION when any of these change
COLUMNS = {
    "giant": ["graph", "eps", "p", "seed", "n", "d", "retained", "giant_size", "fraction", "second_size", "giant_edges", "excess", "census"],
    "isoperimetry": ["k", "min_boundary", "i_k", "bound_regular", "bound_connected", "witness"],
    "expansion": ["graph", "eps", "p", "seed", "giant_size", "mode", "c", "draws", "in_range", "pass_rate"],
    "extract": ["graph", "eps", "p", "seed", "giant_size", "h_size", "h_fraction", "removals", "c_target"],
    "diameter": ["graph", "eps", "p", "seed", "giant_size", "diameter", "exact", "cycle", "budget"],
    "cycle": ["graph", "eps", "p", "seed", "giant_size", "diameter", "exact", "cycle", "budget"],
    "mixing": ["graph", "eps", "p", "seed", "giant_size", "t_mix", "fr_bound", "phi_levels"],
    "sprinkle": ["graph", "eps", "p", "seed", "p1", "p2", "early_giant", "giant_size", "decoration_max", "decoration_mean"],
}

# known op parameters and their defaults (strings, parsed on use)
PARAM_DEFAULTS = {
    "k_max": "",
    "mode": "connected",
    "c": "0.05",
    "sizes": "100",
    "draws": "100",
    "small_lower": "1",
    "c_target": "0.4",
    "probes": "20",
    "diameter_mode": "exact",
    "sweeps": "4",
    "budget": "50",
    "K": "1.0",
    "cap": "100000",
    "delta": "",
    "max_vertices": str(2**26),
    "log": "",
    "detail": "",
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    graph: str
    op: str
    eps: list[float] = field(default_factory=list)
    p: list[float] = field(default_factory=list)
    seeds: int = 1
    seed_base: int = 0
    threads: int = 1
    out: str | None = None
    summary: str | None = None
    fmt: str = "csv"
    params: dict[str, list[str]] = field(default_factory=dict)
    grid: dict[str, list[str]] = field(default_factory=dict)
    grid_cap: int = DEFAULT_GRID_CAP

    def param(self, key: str) -> str:
        vals = self.params.get(key)
        return vals[-1] if vals else PARAM_DEFAULTS[key]

    def param_list(self, key: str) -> list[str]:
        return self.params.get(key) or [PARAM_DEFAULTS[key]]


def parse_config_text(text: str) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (x.strip() for x in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out.setdefault(key, []).append(value)
    return out


def _one(raw, key, default=None):
    vals = raw.get(key)
    if not vals:
        return default
    if len(vals) > 1:
        raise ConfigError(f"{key} given {len(vals)} times; expected once")
    return vals[0]


def _num(key, text, kind=float):
    try:
        return kind(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as {kind.__name__}") from None


def config_from_mapping(raw: dict[str, list[str]]) -> ExperimentConfig:
    raw = {k: list(v) for k, v in raw.items()}
    known = {"graph", "op", "eps", "p", "seeds", "seed_base", "threads", "out", "summary", "format", "grid_cap"}
    params, grid = {}, {}
    for key in list(raw):
        if key.startswith("grid."):
            name = key[5:]
            if not name:
                raise ConfigError("grid key needs a parameter name")
            grid[name] = raw.pop(key)
        elif key not in known:
            if key not in PARAM_DEFAULTS:
                raise ConfigError(f"unknown key {key!r}")
            params[key] = raw.pop(key)
    graph = _one(raw, "graph")
    if graph is None and "graph" not in grid:
        raise ConfigError("missing key: graph")
    op = _one(raw, "op")
    if op not in OPS:
        raise ConfigError(f"op must be one of {', '.join(OPS)}; got {op!r}")
    cfg = ExperimentConfig(
        graph=graph or "",
        op=op,
        eps=[_num("eps", x) for x in raw.get("eps", [])],
        p=[_num("p", x) for x in raw.get("p", [])],
        seeds=_num("seeds", _one(raw, "seeds", "1"), int),
        seed_base=_num("seed_base", _one(raw, "seed_base", "0"), int),
        threads=_num("threads", _one(raw, "threads", "1"), int),
        out=_one(raw, "out"),
        summary=_one(raw, "summary"),
        fmt=_one(raw, "format", "csv"),
        params=params,
        grid=grid,
        grid_cap=_num("grid_cap", _one(raw, "grid_cap", str(DEFAULT_GRID_CAP)), int),
    )
    validate(cfg)
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    return config_from_mapping(parse_config_text(text))


def validate(cfg: ExperimentConfig) -> None:
    if cfg.op not in OPS:
        raise ConfigError(f"unknown op {cfg.op!r}")
    has_eps = bool(cfg.eps) or "eps" in cfg.grid
    has_p = bool(cfg.p) or "p" in cfg.grid
    if has_eps and has_p:
        raise ConfigError("give either eps or p values, not both")
    if cfg.op != "isoperimetry" and not (has_eps or has_p):
        raise ConfigError(f"op {cfg.op} needs eps or p values")
    if any(not e > 0 for e in cfg.eps):
        raise ConfigError("eps values must be positive")
    if any(not 0 <= p <= 1 for p in cfg.p):
        raise ConfigError("p values must lie in [0, 1]")
    if cfg.seeds < 1:
        raise ConfigError("seeds must be >= 1")
    if cfg.threads < 1:
        raise ConfigError("threads must be >= 1")
    if cfg.fmt not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    for key, vals in cfg.grid.items():
        if not vals:
            raise ConfigError(f"grid.{key} is empty")
        if key not in ("graph", "eps", "p") and key not in PARAM_DEFAULTS:
            raise ConfigError(f"unknown grid parameter {key!r}")
    if cfg.graph:
        try:
            parse_graph_expr(cfg.graph)
        except GraphExprError as e:
            raise ConfigError(f"graph: {e}") from None


def normalize(cfg: ExperimentConfig, G: ProductGraph) -> list[tuple[float | None, float]]:
    """``(eps, p)`` pairs; the single place where eps becomes p."""
    if cfg.eps:
        if G.d is None:
            raise ConfigError("eps needs a regular graph (d undefined); give p instead")
        from .percolation import eps_to_p

        out = [(e, eps_to_p(e, G.d)) for e in cfg.eps]
        if any(p > 1 for _, p in out):
            raise ConfigError("eps too large: p = (1 + eps)/d exceeds 1")
        return out
    return [(None, p) for p in cfg.p]


# running


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, np.integer):
        return str(int(x))
    return str(x)


def _replicate(cfg: ExperimentConfig, G: ProductGraph, eps, p: float, seed: int) -> list[dict]:
    from .components import attached_decorations, giant_stats, label_components
    from .percolation import high_degree_census, merge_samples, sample_percolation, two_round_split

    base = {"graph": cfg.graph, "eps": eps, "p": p, "seed": seed}
    op = cfg.op
    if op == "sprinkle":
        e = eps if eps is not None else G.d * p - 1
        delta = float(cfg.param("delta") or e**3)
        pair = two_round_split(p, delta / G.d)
        s1 = sample_percolation(G, pair.p1, seed)
        s2 = sample_percolation(G, pair.p2, seed + 1_000_003)
        merged = merge_samples(s1, s2)
        dec = attached_decorations(G, s1, merged)
        return [
            {
                **base,
                "p1": pair.p1,
                "p2": pair.p2,
                "early_giant": label_components(G, s1).giant_size,
                "giant_size": label_components(G, merged).giant_size,
                "decoration_max": dec.max,
                "decoration_mean": float(dec.sizes.mean()) if len(dec.sizes) else 0.0,
            }
        ]
    s = sample_percolation(G, p, seed)
    lab = label_components(G, s)
    if op == "giant":
        st = giant_stats(lab)
        return [
            {
                **base,
                "n": G.n,
                "d": G.d,
                "retained": s.retained_count,
                "giant_size": st.giant_size,
                "fraction": st.fraction,
                "second_size": st.second_size,
                "giant_edges": st.giant_edges,
                "excess": st.excess,
                "census": high_degree_census(G, s) if G.is_regular else None,
            }
        ]
    e = eps if eps is not None else (G.d * p - 1 if G.d else None)
    if op == "expansion":
        from .expansion import audit_expansion

        rep = audit_expansion(
            G,
            s,
            eps=e,
            c=float(cfg.param("c")),
            sizes=[int(x) for x in cfg.param_list("sizes")],
            draws=int(cfg.param("draws")),
            mode=cfg.param("mode"),
            seed=seed,
            small_lower=float(cfg.param("small_lower")),
            labeling=lab,
        )
        return [
            {
                **base,
                "giant_size": lab.giant_size,
                "mode": rep.mode,
                "c": rep.c,
                "draws": int(cfg.param("draws")),
                "in_range": len(rep.in_range()),
                "pass_rate": rep.pass_rate,
                "_detail": [(seed, r) for r in rep.rows],
            }
        ]
    if op == "extract":
        from .expansion import extract_expander

        c_target = float(cfg.param("c_target"))
        res = extract_expander(G, s, c_target, e, seed=seed, probes=int(cfg.param("probes")), labeling=lab)
        return [
            {
                **base,
                "giant_size": lab.giant_size,
                "h_size": res.size,
                "h_fraction": res.size / lab.giant_size,
                "removals": len(res.log),
                "c_target": c_target,
                "_log": [{"seed": seed, **entry} for entry in res.log],
            }
        ]
    from .view import component_view

    view = component_view(s, lab.giant_vertices())
    if op in ("diameter", "cycle"):
        from .longrange import diameter, longest_cycle

        row = {**base, "giant_size": view.size, "diameter": None, "exact": None, "cycle": None, "budget": None}
        if op == "diameter":
            mode = cfg.param("diameter_mode")
            dr = diameter(view, mode, k=int(cfg.param("sweeps")), seed=seed)
            row.update(diameter=dr.value, exact=dr.exact)
        else:
            budget = int(cfg.param("budget"))
            row.update(cycle=longest_cycle(view, budget, seed).length, budget=budget)
        return [row]
    if op == "mixing":
        from .walk import MIXING_MAX_VERTICES, fr_mixing_bound, mixing_time_exact, phi_profile

        if view.edge_count == 0:
            return [{**base, "giant_size": view.size, "t_mix": 0, "fr_bound": None, "phi_levels": "{}"}]
        t_mix = mixing_time_exact(view, int(cfg.param("cap"))) if view.size <= MIXING_MAX_VERTICES else -1
        rep = phi_profile(view, int(cfg.param("probes")), seed)
        return [
            {
                **base,
                "giant_size": view.size,
                "t_mix": t_mix,
                "fr_bound": fr_mixing_bound(rep, float(cfg.param("K"))),
                "phi_levels": rep.to_json(),
            }
        ]
    raise ConfigError(f"op {op} is not a per-replicate operation")


def _build(cfg: ExperimentConfig) -> ProductGraph:
    try:
        spec = parse_graph_expr(cfg.graph)
    except GraphExprError as e:
        raise ConfigError(f"graph: {e}") from None
    return build_product(spec, max_vertices=int(cfg.param("max_vertices")))


@dataclass
class RunResult:
    columns: list[str]
    rows: list[dict]
    summary: dict


def execute(cfg: ExperimentConfig, on_partial=None) -> RunResult:
    """Run all replicates of a (non-grid) config; rows in (p order, seed) order."""
    validate(cfg)
    G = _build(cfg)
    cols = COLUMNS[cfg.op]
    if cfg.op == "isoperimetry":
        from .isoperimetry import exact_iso_profile

        k_max = int(cfg.param("k_max")) if cfg.param("k_max") else None
        rows = exact_iso_profile(G, k_max).rows()
        return RunResult(cols, rows, summarize(cfg, cols, rows))
    jobs = [(e, p, cfg.seed_base + i) for e, p in normalize(cfg, G) for i in range(cfg.seeds)]
    threads = int(os.environ.get("PRODPERC_THREADS", cfg.threads))
    results: list[list[dict] | None] = [None] * len(jobs)

    def work(i):
        results[i] = _replicate(cfg, G, *jobs[i])

    try:
        if threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                list(pool.map(work, range(len(jobs))))
        else:
            for i in range(len(jobs)):
                work(i)
    except BaseException:
        if on_partial is not None:
            done = [r for chunk in results if chunk for r in chunk]
            on_partial(RunResult(cols, done, summarize(cfg, cols, done)))
        raise
    rows = [r for chunk in results for r in chunk]
    return RunResult(cols, rows, summarize(cfg, cols, rows))


def summarize(cfg: ExperimentConfig, cols: list[str], rows: list[dict]) -> dict:
    means, stderr = {}, {}
    for c in cols:
        if c in ("seed", "eps", "p"):
            continue
        vals = [r[c] for r in rows if isinstance(r.get(c), (int, float, np.integer, np.floating)) and not isinstance(r.get(c), bool)]
        vals = [float(v) for v in vals if not math.isnan(float(v))]
        if not vals or len(vals) != len(rows):
            continue
        means[c] = float(np.mean(vals))
        stderr[c] = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    out = {"schema": SCHEMA_VERSION, "op": cfg.op, "graph": cfg.graph, "rows": len(rows), "means": means, "stderr": stderr}
    if "pass_rate" in means:
        out["pass_rates"] = {"mean": means["pass_rate"]}
    return out


def rows_to_csv(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def rows_to_json(columns: list[str], rows: list[dict]) -> str:
    def conv(x):
        if isinstance(x, (np.integer,)):
            return int(x)
        if isinstance(x, (np.floating,)):
            return float(x)
        return x

    return json.dumps([{c: conv(r.get(c)) for c in columns} for r in rows], indent=1, sort_keys=False) + "\n"


def write_result(cfg: ExperimentConfig, res: RunResult, out=None) -> str:
    text = rows_to_json(res.columns, res.rows) if cfg.fmt == "json" else rows_to_csv(res.columns, res.rows)
    target = out if out is not None else cfg.out
    if target:
        Path(target).write_text(text)
        summary = cfg.summary or str(Path(target).with_suffix(".summary.json"))
        Path(summary).write_text(json.dumps(res.summary, indent=1, sort_keys=True) + "\n")
    if cfg.param("log"):
        entries = [e for r in res.rows for e in r.get("_log", [])]
        Path(cfg.param("log")).write_text("".join(json.dumps(e, sort_keys=True) + "\n" for e in entries))
    if cfg.param("detail"):
        from .expansion import EXPANSION_COLUMNS, ExpansionReport

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["seed"] + EXPANSION_COLUMNS)
        for r in res.rows:
            for seed, row in r.get("_detail", []):
                rep = ExpansionReport("", 0.0, 0.0, [row])
                w.writerow([seed] + rep.to_csv().splitlines()[1].split(","))
        Path(cfg.param("detail")).write_text(buf.getvalue())
    return text


def run_experiment(cfg: ExperimentConfig) -> int:
    """Execute and write outputs; returns the process exit code (0, 2 config, 3 guard)."""

    def flush(partial):
        if cfg.out:
            write_result(cfg, partial)

    try:
        res = execute(cfg, on_partial=flush)
    except (ConfigError, GraphExprError, ValueError):
        return 2
    except GuardError:
        return 3
    write_result(cfg, res)
    return 0


# sweeps


def _sort_key(v: str):
    try:
        return (0, float(v), v)
    except ValueError:
        return (1, 0.0, v)


def grid_cells(cfg: ExperimentConfig) -> list[dict[str, str]]:
    if not cfg.grid:
        raise ConfigError("sweep needs at least one grid.<param> key")
    keys = sorted(cfg.grid)
    axes = [sorted(dict.fromkeys(cfg.grid[k]), key=_sort_key) for k in keys]
    total = math.prod(len(a) for a in axes)
    if total > cfg.grid_cap:
        raise ConfigError(f"grid has {total} cells, over the cap of {cfg.grid_cap}")
    return [dict(zip(keys, combo)) for combo in itertools.product(*axes)]


def _cell_config(cfg: ExperimentConfig, cell: dict[str, str]) -> ExperimentConfig:
    params = {k: list(v) for k, v in cfg.params.items()}
    new = replace(cfg, grid={}, params=params)
    for k, v in cell.items():
        if k == "graph":
            new.graph = v
        elif k == "eps":
            new.eps = [_num("eps", v)]
        elif k == "p":
            new.p = [_num("p", v)]
        else:
            params[k] = [v]
    return new


def sweep(cfg: ExperimentConfig) -> RunResult:
    """Cross product of the grid, one consolidated table with ``grid_`` columns first."""
    cells = grid_cells(cfg)
    keys = sorted(cfg.grid)
    cols = [f"grid_{k}" for k in keys]
    rows = []
    base_cols = COLUMNS[cfg.op]
    for cell in cells:
        sub = _cell_config(cfg, cell)
        validate(sub)
        res = execute(sub)
        for r in res.rows:
            rows.append({**{f"grid_{k}": cell[k] for k in keys}, **r})
    columns = cols + base_cols
    return RunResult(columns, rows, summarize(cfg, base_cols, rows))
