"""Exact maximum modularity by exhaustive set-partition enumeration, with
the structure predicates and robustness checks that lean on it.

Scores are compared as exact integers: a partition of an m-edge graph
scores (4m * sum_A e(A) - sum_A vol(A)^2) / (4 m^2), so the numerator
decides maxima and ties with no rounding.  Partitions are enumerated as
restricted-growth strings in lexicographic order, which fixes the order
in which tied maximizers are reported.

Isolated vertices are excluded from the enumeration (shuffling them
between parts never changes the score) and re-attached as singletons in
the reported maximizers.  Empty graphs take the q* = 0 convention.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import (EmptyGraphError, Graph, Partition, connected_components)
from .spectral import TooLargeError

__all__ = [
    "OracleResult",
    "RobustnessCheck",
    "COutOfRangeError",
    "DifferentMError",
    "exact_modularity",
    "exact_modularity_k",
    "resolution_limit_check",
    "optimal_connectivity_check",
    "robustness_delete_check",
    "robustness_rewire_check",
    "robustness_general_check",
    "solve_dual",
]

ORACLE_CAP = 10
_WARN_ABOVE = 10  # Bell(10) = 115975; beyond this the scan gets punishing


class COutOfRangeError(ValueError):
    """solve_dual needs c > 1."""


class DifferentMError(ValueError):
    """Rewire comparison needs equal edge counts."""


@dataclass(frozen=True)
class OracleResult:
    """Exact maximum score, every maximizer (isolated vertices appended as
    singletons), and how many partitions the scan visited."""

    q_star: Fraction
    optimal_partitions: tuple[Partition, ...]
    partitions_scanned: int

    @property
    def q_star_float(self) -> float:
        return float(self.q_star)


@dataclass(frozen=True)
class RobustnessCheck:
    delta: Fraction
    bound: Fraction
    ok: bool


def _adjacency_masks(g: Graph, vertices: np.ndarray) -> tuple[list[int], list[int]]:
    """Bitmask adjacency (and degrees) of the induced subgraph on
    `vertices`, indexed by position."""
    index = {int(v): i for i, v in enumerate(vertices)}
    masks = [0] * len(vertices)
    for u, v in zip(g.edge_u.tolist(), g.edge_v.tolist()):
        iu = index.get(u)
        iv = index.get(v)
        if iu is not None and iv is not None:
            masks[iu] |= 1 << iv
            masks[iv] |= 1 << iu
    degs = [int(g.deg[v]) for v in vertices]
    return masks, degs


def _scan_partitions(masks: list[int], degs: list[int], m: int,
                     max_parts: int) -> tuple[int, list[tuple[int, ...]], int]:
    """Exhaustive scan over restricted-growth strings with at most
    max_parts blocks; returns (best numerator, best assignments in
    lexicographic order, partitions scanned)."""
    nv = len(masks)
    four_m = 4 * m
    best_num = None
    best: list[tuple[int, ...]] = []
    scanned = 0
    assign = [0] * nv
    block_mask = [0] * (nv + 1)
    block_vol = [0] * (nv + 1)

    def rec(i: int, nblocks: int, e_in: int, ssq: int) -> None:
        nonlocal best_num, scanned
        if i == nv:
            scanned += 1
            num = four_m * e_in - ssq
            if best_num is None or num > best_num:
                best_num = num
                best.clear()
                best.append(tuple(assign))
            elif num == best_num:
                best.append(tuple(assign))
            return
        adj = masks[i]
        d = degs[i]
        for b in range(nblocks):
            de = (adj & block_mask[b]).bit_count()
            vol = block_vol[b]
            assign[i] = b
            block_mask[b] |= 1 << i
            block_vol[b] += d
            rec(i + 1, nblocks, e_in + de, ssq + 2 * vol * d + d * d)
            block_mask[b] &= ~(1 << i)
            block_vol[b] -= d
        if nblocks < max_parts:
            assign[i] = nblocks
            block_mask[nblocks] = 1 << i
            block_vol[nblocks] = d
            rec(i + 1, nblocks + 1, e_in, ssq + d * d)
            block_mask[nblocks] = 0
            block_vol[nblocks] = 0

    if nv == 0:
        return 0, [()], 1
    rec(0, 0, 0, 0)
    return best_num, best, scanned


def _oracle_pre(g: Graph, cap: int) -> np.ndarray:
    active = np.flatnonzero(g.deg > 0)
    if active.size > cap:
        raise TooLargeError(
            f"{active.size} non-isolated vertices exceed the oracle cap {cap}")
    if active.size > _WARN_ABOVE:
        warnings.warn(
            f"enumerating partitions of {active.size} vertices "
            f"(Bell numbers grow fast beyond {_WARN_ABOVE})", RuntimeWarning,
            stacklevel=3)
    return active


def _attach_isolated(g: Graph, active: np.ndarray,
                     assign: tuple[int, ...]) -> Partition:
    labels = np.full(g.n, -1, dtype=np.int64)
    labels[active] = assign
    next_id = (max(assign) + 1) if assign else 0
    for vtx in np.flatnonzero(labels == -1):
        labels[vtx] = next_id
        next_id += 1
    return Partition.from_labels(labels)


def exact_modularity(g: Graph, cap: int = ORACLE_CAP) -> OracleResult:
    """q*(G) with every maximizer, by exhaustive enumeration over the
    non-isolated vertices (at most `cap` of them)."""
    if g.n < 1:
        raise ValueError("graph needs at least one vertex")
    active = _oracle_pre(g, cap)
    if g.m == 0:
        return OracleResult(Fraction(0), (Partition.singletons(g.n),), 0)
    masks, degs = _adjacency_masks(g, active)
    best_num, best, scanned = _scan_partitions(masks, degs, g.m, max_parts=len(masks))
    parts = tuple(_attach_isolated(g, active, a) for a in best)
    return OracleResult(Fraction(best_num, 4 * g.m * g.m), parts, scanned)


def exact_modularity_k(g: Graph, k: int, cap: int = ORACLE_CAP) -> Fraction:
    """q_{<=k}(G): exact maximum over partitions with at most k parts."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if g.n < 1:
        raise ValueError("graph needs at least one vertex")
    active = _oracle_pre(g, cap)
    if g.m == 0:
        return Fraction(0)
    masks, degs = _adjacency_masks(g, active)
    best_num, _, _ = _scan_partitions(masks, degs, g.m, max_parts=k)
    return Fraction(best_num, 4 * g.m * g.m)


def resolution_limit_check(g: Graph, cap: int = ORACLE_CAP) -> bool:
    """True iff every component with fewer than sqrt(2m) edges sits inside
    one part of every optimal partition.  This is the resolution-limit
    property of optimal partitions, so it always holds; the predicate
    exists as an oracle cross-check."""
    if g.m == 0:
        raise EmptyGraphError("resolution limit needs at least one edge")
    result = exact_modularity(g, cap=cap)
    comps = connected_components(g)
    comp_edges = np.bincount(comps.assign[g.edge_u], minlength=comps.k)
    small = [np.flatnonzero(comps.assign == c)
             for c in range(comps.k)
             if int(comp_edges[c]) ** 2 < 2 * g.m]
    for part in result.optimal_partitions:
        for members in small:
            ids = part.assign[members]
            if ids.size and (ids != ids[0]).any():
                return False
    return True


def _induced_connected(members_mask: int, masks: list[int]) -> bool:
    start = members_mask & -members_mask
    seen = start
    frontier = start
    while frontier:
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= masks[low.bit_length() - 1]
            f ^= low
        nxt &= members_mask & ~seen
        seen |= nxt
        frontier = nxt
    return seen == members_mask


def optimal_connectivity_check(g: Graph, cap: int = ORACLE_CAP) -> bool:
    """True iff in every optimal partition each part induces a connected
    subgraph and has at least two vertices.  Both properties always hold
    for graphs without isolated vertices (splitting a disconnected part
    strictly lowers the degree tax), so the predicate is another oracle
    cross-check."""
    if g.m == 0:
        raise EmptyGraphError("connectivity check needs at least one edge")
    if g.has_isolated_vertices():
        raise ValueError("connectivity structure claims need no isolated vertices")
    result = exact_modularity(g, cap=cap)
    masks, _ = _adjacency_masks(g, np.arange(g.n))
    for part in result.optimal_partitions:
        for members in part.parts():
            if members.size < 2:
                return False
            members_mask = 0
            for vtx in members.tolist():
                members_mask |= 1 << vtx
            if not _induced_connected(members_mask, masks):
                return False
    return True


def _q_star(g: Graph, cap: int) -> Fraction:
    return exact_modularity(g, cap=cap).q_star


def robustness_delete_check(g: Graph, e0, cap: int = ORACLE_CAP) -> RobustnessCheck:
    """Delete the edges e0 from g and compare |q* - q*'| against the
    2 |E0| / |E| bound (strict)."""
    e0 = [(min(u, v), max(u, v)) for u, v in e0]
    if not e0:
        raise ValueError("e0 must be non-empty")
    edge_set = set(g.edge_list())
    if not set(e0) <= edge_set:
        raise ValueError("e0 must be a subset of the graph's edges")
    remaining = sorted(edge_set - set(e0))
    g2 = Graph(g.n, remaining)
    delta = abs(_q_star(g, cap) - _q_star(g2, cap))
    bound = Fraction(2 * len(set(e0)), g.m)
    return RobustnessCheck(delta, bound, delta < bound)


def robustness_rewire_check(g: Graph, g2: Graph, cap: int = ORACLE_CAP) -> RobustnessCheck:
    """Same vertex set and edge count: |q* - q*'| < |E symm-diff E'| / m."""
    if g.n != g2.n:
        raise ValueError("graphs must share the vertex set")
    if g.m != g2.m:
        raise DifferentMError(f"edge counts differ: {g.m} vs {g2.m}")
    if g.m == 0:
        raise EmptyGraphError("rewire bound needs m >= 1")
    sym = set(g.edge_list()) ^ set(g2.edge_list())
    if not sym:
        raise ValueError("graphs must differ")
    delta = abs(_q_star(g, cap) - _q_star(g2, cap))
    bound = Fraction(len(sym), g.m)
    return RobustnessCheck(delta, bound, delta < bound)


def robustness_general_check(g: Graph, g2: Graph, cap: int = ORACLE_CAP) -> RobustnessCheck:
    """|E| >= |E'|, any overlap: |q* - q*'| < 2 |E \\ E'| / |E|."""
    if g.n != g2.n:
        raise ValueError("graphs must share the vertex set")
    if g.m < g2.m:
        raise ValueError("expected |E| >= |E'|")
    if g.m == 0:
        raise EmptyGraphError("bound needs |E| >= 1")
    e1 = set(g.edge_list())
    e2 = set(g2.edge_list())
    if e1 == e2:
        raise ValueError("graphs must differ")
    delta = abs(_q_star(g, cap) - _q_star(g2, cap))
    bound = Fraction(2 * len(e1 - e2), g.m)
    return RobustnessCheck(delta, bound, delta < bound)


def solve_dual(c: float, tol: float = 1e-14) -> float:
    """The root x in (0, 1) of x e^{-x} = c e^{-c} for c > 1, by bisection
    on the increasing branch; residual <= 1e-12."""
    if not c > 1.0:
        raise COutOfRangeError("dual root needs c > 1")
    target = c * math.exp(-c)
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid * math.exp(-mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
