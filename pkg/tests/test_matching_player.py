import numpy as np
import pytest

from mucut import Graph, VertexMeasure
from mucut.cutplayer import WeightedBipartition, rst_partition
from mucut.matching import build_pi_problem, solve_matching_round
from mucut.spectral import ActiveState
from mucut.verify import check_embedding_congestion

from helpers import clique_edges, orthogonalized_projection, random_connected_graph, random_measure


def manual_bip(sources, targets, eta=0.0, case_two=False):
    return WeightedBipartition(sources=tuple(sources), targets=tuple(targets),
                               eta=eta, case_two=case_two, flipped=False,
                               partial_vertex=None)


def test_build_pi_arc_arithmetic():
    g = Graph(4, clique_edges(range(4)))
    bip = manual_bip([(0, 0.5)], [(1, 1.0), (2, 1.0), (3, 1.0)])
    net = build_pi_problem(g, bip, c=1.0)
    capacity_arcs = [a for a in net.arcs() if a[2] > 0]
    assert len(capacity_arcs) == 1 + 3 + 2 * 6
    source_caps = [c for (u, v, c) in net.arcs() if u == net.source]
    assert sum(source_caps) == pytest.approx(bip.source_mass)


def test_build_pi_respects_mass_preconditions():
    g = Graph(4, clique_edges(range(4)))
    mu = VertexMeasure([1.0] * 4)
    light_targets = manual_bip([(0, 0.5)], [(1, 1.0)])
    with pytest.raises(ValueError):
        build_pi_problem(g, light_targets, c=1.0, mu=mu)
    heavy_sources = manual_bip([(0, 1.0)], [(1, 1.0), (2, 1.0), (3, 1.0)])
    with pytest.raises(ValueError):
        build_pi_problem(g, heavy_sources, c=1.0, mu=mu)


def test_empty_sources_round_is_trivially_feasible():
    g = Graph(4, clique_edges(range(4)))
    mu = VertexMeasure([1.0] * 4)
    bip = manual_bip([], [(v, 1.0) for v in range(4)])
    res = solve_matching_round(g, bip, c=2.0, mu=mu)
    assert res.feasible
    assert res.removed == frozenset()
    assert res.matched_weight == 0.0
    assert np.allclose(res.matching.row_sums(), mu.values)
    assert res.matching.off_diagonal == ()


def test_expander_round_fully_matches():
    g = Graph(8, clique_edges(range(8)))
    mu = VertexMeasure([1.0] * 8)
    bip = manual_bip([(0, 0.5), (1, 0.5)], [(v, 1.0) for v in range(2, 8)])
    res = solve_matching_round(g, bip, c=8.0, mu=mu)
    assert res.feasible and not res.removed
    assert res.matched_weight == pytest.approx(1.0)
    sent = {}
    for a, b, w, _ in res.paths:
        sent[a] = sent.get(a, 0.0) + w
    assert sent[0] == pytest.approx(0.5)
    assert sent[1] == pytest.approx(0.5)


def test_disconnected_sources_yield_zero_expansion_cut():
    # sources live in a component with no targets: the flow is infeasible
    # and the min cut is the empty-boundary component
    edges = clique_edges(range(3)) + clique_edges(range(3, 6))
    g = Graph(6, edges)
    mu = VertexMeasure([1.0] * 6)
    bip = manual_bip([(0, 0.4)], [(v, 1.0) for v in (3, 4, 5)])
    res = solve_matching_round(g, bip, c=1.0, mu=mu)
    assert not res.feasible
    assert res.removed
    assert res.cut_expansion == 0.0
    assert res.cut_expansion <= 7.0 / 1.0


def test_self_pairs_fold_into_the_diagonal():
    # a vertex that is both source and target may route to itself in place
    g = Graph(2, [(0, 1, 1.0)])
    mu = VertexMeasure([1.0, 1.0])
    bip = manual_bip([(0, 0.25)], [(0, 0.5), (1, 1.0)])
    res = solve_matching_round(g, bip, c=2.0, mu=mu)
    assert res.feasible
    assert np.allclose(res.matching.row_sums(), mu.values, atol=1e-9)


@pytest.mark.parametrize("seed", range(6))
def test_random_round_contract(seed):
    rng = np.random.default_rng(300 + seed)
    for _ in range(12):
        n = int(rng.integers(4, 13))
        g = random_connected_graph(rng, n, extra=float(rng.uniform(0.5, 3.0)))
        mu = random_measure(rng, n, zero_frac=0.2)
        state = ActiveState(range(n), mu)
        u = orthogonalized_projection(rng, mu)
        bip = rst_partition(state, u)
        if not bip.sources:
            continue
        c = float(rng.integers(1, 5))
        res = solve_matching_round(g, bip, c, mu)

        # feasibility dichotomy
        assert res.feasible == (len(res.removed) == 0)

        # stochastic completion: row sums equal the measure
        assert np.abs(res.matching.row_sums() - mu.values).max() < 1e-9

        # off-diagonal support within surviving sources x targets
        sources = {v for v, _ in bip.sources} - res.removed
        targets = {v for v, _ in bip.targets} - res.removed
        for a, b, w in res.matching.off_diagonal:
            assert (a in sources and b in targets) or (b in sources and a in targets)

        # per-source totals are exact for survivors
        sent = {}
        for a, b, w, _ in res.paths:
            sent[a] = sent.get(a, 0.0) + w
        for v, m in bip.sources:
            if v not in res.removed:
                assert sent.get(v, 0.0) == pytest.approx(m, abs=1e-9)

        # removed side: expansion and survivor-measure bounds
        if res.removed:
            assert res.cut_expansion <= 7.0 / c + 1e-9
            rest = [v for v in range(n) if v not in res.removed]
            assert mu.of(rest) >= mu.total / 3.0 - 1e-9

        # per-round embedding congestion at most c
        congestion = check_embedding_congestion(g, res.paths)
        assert congestion <= c * (1 + 1e-9)
