"""One matching-player round: route source mass or expose a sparse cut.

Builds the auxiliary flow problem on the active subgraph (super-source to
sources at their weights, targets to super-sink at theirs, every graph
edge at capacity c times its weight), solves it exactly, and either
reports full saturation (no cut) or returns the source side of the min
cut together with the surviving flow.  Path endpoints become the round's
matching, completed on the diagonal to be measure-stochastic.

All ids here are local to the active subgraph.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cutplayer import WeightedBipartition
from .errors import InvariantViolation
from .flow import FlowNetwork, PathDecomposition, decompose_paths, max_flow
from .graph import EPS, Graph, VertexMeasure, cut_weight
from .spectral import StochasticMatching


@dataclass(frozen=True)
class MatchingRoundResult:
    """Outcome of a single round on the active subgraph."""

    removed: frozenset
    matching: StochasticMatching
    cut_expansion: float | None
    paths: PathDecomposition
    matched_weight: float
    feasible: bool


def build_pi_problem(g_active: Graph, bip: WeightedBipartition, c: float,
                     mu: VertexMeasure | None = None) -> FlowNetwork:
    """Auxiliary network: source arcs at m_v, sink arcs at mbar_v, edges at c*w."""
    if c <= 0:
        raise ValueError("edge capacity factor c must be positive")
    if mu is not None:
        if bip.target_mass < mu.total / 2.0 - EPS * max(1.0, mu.total):
            raise ValueError("target mass below half the active measure")
        if bip.source_mass > mu.total / 8.0 + EPS * max(1.0, mu.total):
            raise ValueError("source mass above an eighth of the active measure")
    n = g_active.vertex_count
    net = FlowNetwork(n + 2, source=n, sink=n + 1)
    for v, m in bip.sources:
        net.add_arc(n, v, m)
    for v, mb in bip.targets:
        net.add_arc(v, n + 1, mb)
    for u, v, w in g_active.edges:
        net.add_undirected_edge(u, v, c * w)
    return net


def solve_matching_round(g_active: Graph, bip: WeightedBipartition, c: float,
                         mu: VertexMeasure, round_index: int = 0) -> MatchingRoundResult:
    """Solve the round's flow problem and assemble the stochastic matching.

    Exactly one of the two outcomes holds: every source arc is saturated
    (removed empty), or removed is nonempty with expansion at most 7/c and
    at least a third of the active measure surviving.
    """
    if not bip.sources:
        # nothing to route; the matching degenerates to the diagonal
        return MatchingRoundResult(
            removed=frozenset(),
            matching=StochasticMatching.from_pairs(mu.values, [], round_index),
            cut_expansion=None,
            paths=PathDecomposition(()),
            matched_weight=0.0,
            feasible=True,
        )

    net = build_pi_problem(g_active, bip, c, mu)
    sol = max_flow(net)
    source_total = bip.source_mass
    tol = EPS * max(1.0, source_total)
    feasible = sol.value >= source_total - tol

    if feasible:
        removed: frozenset = frozenset()
    else:
        removed = frozenset(v for v in sol.min_cut_side if v != net.source)
        if not removed:
            raise InvariantViolation("infeasible flow but the min cut is trivial")

    full_paths = decompose_paths(net, sol)
    kept = []
    for _, _, w, seq in full_paths:
        interior = seq[1:-1]
        if removed and interior[0] in removed:
            # path rooted in the cut side; with an exact max flow it never
            # leaves it, so the whole path is discarded
            continue
        if removed and any(v in removed for v in interior):
            raise InvariantViolation("a surviving path crosses back into the removed side")
        kept.append((interior[0], interior[-1], w, interior))

    source_weights = dict(bip.sources)
    target_set = {v for v, _ in bip.targets}
    sent: dict[int, float] = {}
    for a, b, w, _ in kept:
        if a not in source_weights:
            raise InvariantViolation(f"path starts at non-source vertex {a}")
        if b not in target_set:
            raise InvariantViolation(f"path ends at non-target vertex {b}")
        sent[a] = sent.get(a, 0.0) + w
    for v, m in bip.sources:
        if v in removed:
            continue
        got = sent.get(v, 0.0)
        if abs(got - m) > EPS * max(1.0, m):
            raise InvariantViolation(f"source {v} routed {got} instead of {m}")

    matched_weight = float(sum(w for _, _, w, _ in kept))
    matching = StochasticMatching.from_pairs(
        mu.values, [(a, b, w) for a, b, w, _ in kept], round_index)

    cut_expansion = None
    if removed:
        rest = [v for v in range(g_active.vertex_count) if v not in removed]
        crossing = cut_weight(g_active, removed)
        mu_rest = mu.of(rest)
        mu_removed = mu.of(removed)
        denom = min(mu_removed, mu_rest)
        if denom <= 0.0:
            raise InvariantViolation("cut side with zero measure returned by the flow step")
        cut_expansion = crossing / denom
        if cut_expansion > 7.0 / c + EPS * max(1.0, 7.0 / c):
            raise InvariantViolation(
                f"round cut expansion {cut_expansion} exceeds 7/c = {7.0 / c}")
        if mu_rest < mu.total / 3.0 - EPS * max(1.0, mu.total):
            raise InvariantViolation(
                f"surviving measure {mu_rest} below a third of {mu.total}")

    return MatchingRoundResult(
        removed=removed,
        matching=matching,
        cut_expansion=cut_expansion,
        paths=PathDecomposition(tuple(kept)),
        matched_weight=matched_weight,
        feasible=feasible,
    )
