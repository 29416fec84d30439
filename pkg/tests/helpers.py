"""Shared generators and independent oracles for the test suite.

The oracles here deliberately avoid the library's own code paths: the cut
recount walks adjacency lists, the min-cut enumerator sums arc capacities
over explicit subsets, and the conductance enumerator is plain Python.
"""

from __future__ import annotations

import itertools

import numpy as np

from mucut import Graph, VertexMeasure
from mucut.flow import FlowNetwork, FlowSolution


def random_connected_graph(rng: np.random.Generator, n: int, extra: float = 1.0,
                           weighted: bool = False) -> Graph:
    """Random spanning tree plus a Binomial number of extra edges."""
    edges = {}
    for v in range(1, n):
        u = int(rng.integers(0, v))
        w = float(rng.uniform(0.5, 2.0)) if weighted else 1.0
        edges[(u, v)] = edges.get((u, v), 0.0) + w
    n_extra = int(rng.binomial(max(1, n * (n - 1) // 2), min(1.0, extra * 2.0 / max(1, n))))
    for _ in range(n_extra):
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        w = float(rng.uniform(0.5, 2.0)) if weighted else 1.0
        edges[key] = edges.get(key, 0.0) + w
    return Graph(n, [(u, v, w) for (u, v), w in sorted(edges.items())])


def random_measure(rng: np.random.Generator, n: int, zero_frac: float = 0.2) -> VertexMeasure:
    """Random O(1) values with roughly `zero_frac` zeros, at least two positives."""
    while True:
        vals = rng.uniform(0.2, 2.0, size=n)
        vals[rng.random(n) < zero_frac] = 0.0
        if (vals > 0).sum() >= 2:
            return VertexMeasure(vals)


def clique_edges(vertices) -> list:
    return [(u, v, 1.0) for u, v in itertools.combinations(sorted(vertices), 2)]


def dumbbell_graph(k: int = 8, bridges: int = 1) -> Graph:
    """Two k-cliques joined by `bridges` edges."""
    edges = clique_edges(range(k)) + clique_edges(range(k, 2 * k))
    for b in range(bridges):
        edges.append((b % k, k + (b % k), 1.0))
    return Graph(2 * k, edges)


def adjacency_recount_cut(g: Graph, side) -> float:
    """Independent cut recount: scan each member's incidence list."""
    side = set(side)
    total = 0.0
    for u in side:
        for v, w, _ in g.adjacency[u]:
            if v not in side:
                total += w
    return total


def enumerate_min_cut(net: FlowNetwork) -> float:
    """Exhaustive min s-t cut capacity over all 2^(n-2) vertex splits."""
    s, t = net.source, net.sink
    others = [v for v in range(net.node_count) if v not in (s, t)]
    arcs = net.arcs()
    best = None
    for r in range(len(others) + 1):
        for combo in itertools.combinations(others, r):
            side = {s, *combo}
            cap = sum(c for (u, v, c) in arcs if u in side and v not in side)
            if best is None or cap < best:
                best = cap
    return best


def assert_fair(net: FlowNetwork, sol: FlowSolution, tol: float = 1e-9):
    """Every arc leaving the min-cut source side must be saturated."""
    side = sol.min_cut_side
    arcs = net.arcs()
    for i, (u, v, c) in enumerate(arcs):
        if u in side and v not in side and c > 0:
            assert abs(sol.arc_flows[i] - c) <= tol * max(1.0, c), (
                f"cut arc {u}->{v} carries {sol.arc_flows[i]} of {c}")


def conductance_enumerator(g: Graph):
    """Independent minimum-conductance search: plain loops, volumes from degrees."""
    n = g.vertex_count
    deg = [0.0] * n
    for u, v, w in g.edges:
        deg[u] += w
        deg[v] += w
    vol_total = sum(deg)
    best = None
    for mask in range(1, 1 << (n - 1)):
        side = {v + 1 for v in range(n - 1) if (mask >> v) & 1}
        vol_s = sum(deg[v] for v in side)
        denom = min(vol_s, vol_total - vol_s)
        if denom <= 0:
            continue
        crossing = 0.0
        for u, v, w in g.edges:
            if (u in side) != (v in side):
                crossing += w
        value = crossing / denom
        if best is None or value < best:
            best = value
    return best


def conservation_errors(net: FlowNetwork, sol: FlowSolution) -> float:
    """Largest conservation violation at any interior node."""
    balance = [0.0] * net.node_count
    for i, (u, v, _) in enumerate(net.arcs()):
        f = sol.arc_flows[i]
        balance[u] -= f
        balance[v] += f
    worst = 0.0
    for v in range(net.node_count):
        if v in (net.source, net.sink):
            continue
        worst = max(worst, abs(balance[v]))
    return worst


def orthogonalized_projection(rng: np.random.Generator, mu: VertexMeasure,
                              quantize: bool = False) -> np.ndarray:
    """Random vector on the support with measure-weighted mean zero."""
    n = len(mu.values)
    u = rng.standard_normal(n)
    if quantize:
        u = np.round(u * 2.0) / 2.0
    u = np.where(mu.support_mask, u, 0.0)
    total = float(mu.values[mu.support_mask].sum())
    shift = float((mu.values * u).sum()) / total
    u = np.where(mu.support_mask, u - shift, 0.0)
    return u
