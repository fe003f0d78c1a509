"""Lazy random walk on a component: stationary law, exact mixing time, conductance profile.

The walk stays put with probability 1/2 and otherwise moves to a uniform
neighbour.  ``Phi(S) = e(S, S^c) / (2 vol(S) pi(S^c))`` and the level
estimate ``Phi(rho)`` minimises over connected sets with
``rho/2 <= pi(S) <= rho``; a level with no such set is reported as 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .expansion import grow_connected
from .graph import GuardError
from .view import ComponentView, approx_fiedler

MIXING_MAX_VERTICES = 5000
EXHAUSTIVE_PHI_MAX = 20
CHAIN_TOL = 1e-12
WALK_COLUMNS = ["graph", "eps", "seed", "giant_size", "t_mix", "fr_bound", "phi_levels"]

__all__ = [
    "WalkDistribution",
    "ConductanceReport",
    "LevelEstimate",
    "stationary_distribution",
    "lazy_step",
    "tv_distance",
    "mixing_time_exact",
    "conductance",
    "phi_profile",
    "fr_mixing_bound",
    "WALK_COLUMNS",
]


@dataclass(frozen=True, eq=False)
class WalkDistribution:
    probs: np.ndarray

    def __post_init__(self):
        p = self.probs
        if np.any(p < 0) or abs(p.sum() - 1.0) > CHAIN_TOL * max(1, len(p)):
            raise ValueError("not a probability vector")

    def __len__(self):
        return len(self.probs)

    @classmethod
    def point(cls, n: int, v: int) -> "WalkDistribution":
        p = np.zeros(n)
        p[v] = 1.0
        return cls(p)


def _adjacency(view: ComponentView):
    n = view.size
    return sp.csr_matrix((np.ones(len(view.indices)), view.indices, view.indptr), shape=(n, n))


def stationary_distribution(view: ComponentView) -> WalkDistribution:
    if view.edge_count == 0:
        raise ValueError("view has no edges")
    deg = view.degrees.astype(float)
    return WalkDistribution(deg / (2.0 * view.edge_count))


def lazy_step(view: ComponentView, dist: WalkDistribution) -> WalkDistribution:
    p = dist.probs
    if len(p) != view.size:
        raise ValueError("distribution and view sizes differ")
    deg = view.degrees.astype(float)
    moved = np.divide(p, 2.0 * deg, out=np.zeros_like(p), where=deg > 0)
    out = 0.5 * p + _adjacency(view) @ moved
    # an isolated vertex keeps all of its mass
    out[deg == 0] += 0.5 * p[deg == 0]
    return WalkDistribution(out)


def tv_distance(a: WalkDistribution, b: WalkDistribution) -> float:
    if len(a) != len(b):
        raise ValueError("distributions have different supports")
    return 0.5 * float(np.abs(a.probs - b.probs).sum())


def mixing_time_exact(view: ComponentView, cap: int = 100_000, check: bool = True) -> int:
    """Least t with ``max_v d_TV(P^t(v, .), pi) <= 1/4``, evolving all start vertices together.

    With ``check`` the chain invariants are asserted along the way:
    stationarity of pi, conservation of mass, and non-increasing d(t).
    """
    n = view.size
    if n > MIXING_MAX_VERTICES:
        raise GuardError(f"exact mixing time limited to {MIXING_MAX_VERTICES} vertices, view has {n}")
    pi = stationary_distribution(view).probs
    deg = view.degrees.astype(float)
    A = _adjacency(view)
    if check:
        err = np.abs(lazy_step(view, WalkDistribution(pi)).probs - pi).max()
        if err > CHAIN_TOL:
            raise AssertionError(f"pi is not stationary (error {err:.3g})")
    X = np.eye(n)  # column v = distribution started at v
    inv = (0.5 / deg)[:, None]
    prev = 0.5 * np.abs(X - pi[:, None]).sum(axis=0).max()
    if prev <= 0.25:
        return 0
    for t in range(1, cap + 1):
        X = 0.5 * X + A @ (X * inv)
        d_t = 0.5 * np.abs(X - pi[:, None]).sum(axis=0).max()
        if check:
            mass = np.abs(X.sum(axis=0) - 1.0).max()
            if mass > CHAIN_TOL:
                raise AssertionError(f"mass not conserved at t={t} (error {mass:.3g})")
            if d_t > prev + CHAIN_TOL:
                raise AssertionError(f"d(t) increased at t={t}: {prev!r} -> {d_t!r}")
        if d_t <= 0.25:
            return t
        prev = d_t
    raise GuardError(f"mixing time exceeds cap={cap}")


def _as_mask(view: ComponentView, S) -> np.ndarray:
    S = np.asarray(S)
    if S.dtype == bool:
        if len(S) != view.size:
            raise ValueError("mask length differs from view size")
        return S
    m = np.zeros(view.size, dtype=bool)
    m[S.astype(np.int64)] = True
    return m


def conductance(view: ComponentView, S) -> tuple[float, float, float]:
    """``(Phi(S), pi(S), Q(S))`` for a set of local ids or a boolean mask."""
    m = _as_mask(view, S)
    k = int(m.sum())
    if k == 0 or k == view.size:
        raise ValueError("S must be a nonempty proper subset")
    src, dst = view.edge_list
    cut = int(np.count_nonzero(m[src] != m[dst]))
    vol_total = 2 * view.edge_count
    vol = int(view.degrees[m].sum())
    pi_s = vol / vol_total
    phi = cut / (2.0 * vol * (1.0 - pi_s))
    return phi, pi_s, cut / (2.0 * vol_total)


@dataclass
class LevelEstimate:
    j: int
    phi: float
    probed: int
    best: list[int] = field(default_factory=list)  # local ids of the minimising set


@dataclass
class ConductanceReport:
    levels: list[LevelEstimate]
    exact: bool
    pi_min: float

    def phis(self) -> list[float]:
        return [lv.phi for lv in self.levels]

    def to_json(self) -> str:
        return json.dumps({str(lv.j): lv.phi for lv in self.levels}, sort_keys=True)


def level_count(pi_min: float) -> int:
    return max(1, math.ceil(math.log2(1.0 / pi_min) - 1e-12))


def _levels_of(vol: int, vol_total: int, L: int):
    # all j in 1..L with 2^-(j+1) <= vol/vol_total <= 2^-j, in integers
    out = []
    for j in range(1, L + 1):
        if (vol << j) <= vol_total and (vol << (j + 1)) >= vol_total:
            out.append(j)
    return out


class _Tracker:
    def __init__(self, L):
        self.phi = [math.inf] * L
        self.probed = [0] * L
        self.best: list = [None] * L

    def offer(self, levels, phi, members_fn):
        for j in levels:
            self.probed[j - 1] += 1
            if phi < self.phi[j - 1]:
                self.phi[j - 1] = phi
                self.best[j - 1] = members_fn()


def _scan_prefixes(view: ComponentView, order, vol_total: int, L: int, tracker: _Tracker, connected_only: bool):
    indptr, indices = view.indptr, view.indices
    deg = view.degrees
    n = view.size
    inpre = np.zeros(n, dtype=bool)
    parent = list(range(n))
    comps = 0
    vol = cut = 0

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    order = [int(v) for v in order]
    for i, v in enumerate(order):
        inside = 0
        comps += 1
        for w in indices[indptr[v] : indptr[v + 1]].tolist():
            if inpre[w]:
                inside += 1
                a, b = find(v), find(w)
                if a != b:
                    parent[a] = b
                    comps -= 1
        inpre[v] = True
        vol += int(deg[v])
        cut += int(deg[v]) - 2 * inside
        if 2 * vol > vol_total:
            break
        if connected_only and comps != 1:
            continue
        levels = _levels_of(vol, vol_total, L)
        if levels:
            phi = cut / (2.0 * vol * (1.0 - vol / vol_total))
            tracker.offer(levels, phi, lambda i=i: sorted(order[: i + 1]))


def _neighbor_masks(view: ComponentView):
    masks = np.zeros(view.size, dtype=np.int64)
    for v in range(view.size):
        for w in view.neighbors(v):
            masks[v] |= 1 << int(w)
    return masks


def phi_profile(view: ComponentView, probes: int = 20, seed=0, sweeps: int = 2) -> ConductanceReport:
    """Estimate ``Phi(2^-j)`` for ``j = 1..ceil(log2 1/pi_min)``.

    Views of at most 20 vertices are enumerated exhaustively (exact).  Larger
    views are probed by ``probes`` randomly grown connected sets and by
    connected prefixes of approximate second-eigenvector sweeps, so each
    level value is an upper bound on the true minimum.
    """
    pi = stationary_distribution(view).probs
    pi_min = float(pi.min())
    L = level_count(pi_min)
    vol_total = 2 * view.edge_count
    if view.size <= EXHAUSTIVE_PHI_MAX:
        best, masks = _kernels.connected_set_conductance(_neighbor_masks(view), view.degrees.astype(np.int64), L)
        levels = []
        for j in range(1, L + 1):
            phi = float(best[j - 1])
            if math.isinf(phi):
                levels.append(LevelEstimate(j, 1.0, 0, []))
            else:
                m = int(masks[j - 1])
                levels.append(LevelEstimate(j, phi, 1, [v for v in range(view.size) if (m >> v) & 1]))
        return ConductanceReport(levels, True, pi_min)

    rng = np.random.default_rng(seed)
    tracker = _Tracker(L)
    for _ in range(probes):
        start = int(rng.integers(view.size))
        grown = grow_connected(view.indptr, view.indices, start, view.size, rng)
        _scan_prefixes(view, grown, vol_total, L, tracker, connected_only=False)
    for _ in range(sweeps):
        order = np.argsort(approx_fiedler(view, rng=rng), kind="stable")
        for o in (order, order[::-1]):
            _scan_prefixes(view, o, vol_total, L, tracker, connected_only=True)
    levels = []
    for j in range(1, L + 1):
        phi = tracker.phi[j - 1]
        if math.isinf(phi):
            levels.append(LevelEstimate(j, 1.0, 0, []))
        else:
            levels.append(LevelEstimate(j, phi, tracker.probed[j - 1], tracker.best[j - 1]))
    return ConductanceReport(levels, False, pi_min)


def fr_mixing_bound(report: ConductanceReport, K: float) -> float:
    """``K * sum_j Phi(2^-j)^-2`` over the report's levels."""
    if not report.levels:
        raise ValueError("empty conductance report")
    return K * sum(lv.phi**-2 for lv in report.levels)
