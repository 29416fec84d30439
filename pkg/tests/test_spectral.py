import numpy as np
import pytest

from mucut import Graph, VertexMeasure
from mucut.errors import InvariantViolation
from mucut.spectral import (ActiveState, StochasticMatching, WalkOperator,
                            apply_normalized_matching, apply_projection, default_delta,
                            dense_flow_matrix, dense_projection_matrix,
                            dense_walk_and_potential, is_power_of_two, projections,
                            sample_unit_vector)

from helpers import clique_edges, random_connected_graph, random_measure


def uniform_state(n, active=None):
    mu = VertexMeasure([1.0] * n)
    return ActiveState(range(n) if active is None else active, mu), mu


def synthetic_matchings(rng, mu, rounds=3, delta=1):
    """Random feasibly-weighted matchings among the terminals (no game)."""
    support = sorted(mu.support)
    out = []
    for t in range(rounds):
        pairs = []
        budget = {v: mu.values[v] for v in support}
        perm = rng.permutation(support)
        for i in range(0, len(perm) - 1, 2):
            u, v = int(perm[i]), int(perm[i + 1])
            w = min(budget[u], budget[v]) * rng.uniform(0.2, 0.9)
            if w > 1e-12:
                pairs.append((u, v, w))
                budget[u] -= w
                budget[v] -= w
        out.append(StochasticMatching.from_pairs(mu.values, pairs, t))
    return out


def test_default_delta_values():
    assert default_delta(1) == 1
    assert default_delta(16) == 1
    assert default_delta(400) == 2
    assert default_delta(20 ** 4) == 4
    assert is_power_of_two(default_delta(10 ** 6))


def test_sample_unit_vector_basics():
    rng = np.random.default_rng(0)
    v = sample_unit_vector(1, rng)
    assert abs(abs(v[0]) - 1.0) < 1e-12
    a = sample_unit_vector(7, np.random.default_rng(3))
    b = sample_unit_vector(7, np.random.default_rng(3))
    assert np.array_equal(a, b)
    with pytest.raises(ValueError):
        sample_unit_vector(0, rng)


def test_sample_unit_vector_sphere_statistics():
    # coordinate means vanish and mean squares sit near 1/n
    rng = np.random.default_rng(42)
    n, samples = 64, 100_000
    x = rng.standard_normal((samples, n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    means = x.mean(axis=0)
    sq = (x * x).mean(axis=0)
    assert np.abs(means).max() < 0.01
    assert np.all(np.abs(sq - 1.0 / n) < 0.1 / n)


def test_projection_kills_sqrt_mu_and_fixes_orthogonal():
    state, mu = uniform_state(6)
    z = apply_projection(state, state.sqrt_mu)
    assert np.abs(z).max() < 1e-12
    x = np.array([1.0, -1.0, 0.0, 0.0, 0.0, 0.0])
    assert np.allclose(apply_projection(state, x), x, atol=1e-12)


def test_projection_idempotent():
    rng = np.random.default_rng(1)
    g = random_connected_graph(rng, 10)
    mu = random_measure(rng, 10)
    state = ActiveState(range(10), mu)
    for _ in range(20):
        x = rng.standard_normal(10)
        once = apply_projection(state, x)
        twice = apply_projection(state, once)
        assert np.abs(once - twice).max() < 1e-9


def test_projection_errors_on_zero_measure():
    mu = VertexMeasure([0.0, 0.0, 1.0])
    state = ActiveState({0, 1}, mu)
    with pytest.raises(ValueError):
        apply_projection(state, np.ones(3))


def test_normalized_matching_diagonal_is_support_identity():
    mu = VertexMeasure([1.0, 2.0, 0.0, 0.5])
    m = StochasticMatching.from_pairs(mu.values, [], 0)
    x = np.array([1.0, -2.0, 3.0, 4.0])
    for delta in (1, 2, 4):
        y = apply_normalized_matching(m, mu, delta, x)
        assert np.allclose(y, np.where(mu.support_mask, x, 0.0), atol=1e-12)


def test_normalized_matching_fixes_sqrt_mu():
    rng = np.random.default_rng(7)
    mu = random_measure(rng, 12, zero_frac=0.25)
    for m in synthetic_matchings(rng, mu, rounds=4):
        y = apply_normalized_matching(m, mu, 2, mu.sqrt)
        assert np.allclose(y, mu.sqrt, atol=1e-9)


def test_normalized_matching_agrees_with_dense():
    rng = np.random.default_rng(8)
    mu = random_measure(rng, 9, zero_frac=0.2)
    s = np.diag(mu.inv_sqrt)
    for delta in (1, 2):
        for m in synthetic_matchings(rng, mu, rounds=3, delta=delta):
            nbar = (delta - 1.0) / delta * np.diag(mu.support_mask.astype(float)) \
                + s @ m.dense() @ s / delta
            for _ in range(5):
                x = rng.standard_normal(9)
                assert np.abs(apply_normalized_matching(m, mu, delta, x) - nbar @ x).max() < 1e-9


def test_matching_row_sums_equal_measure():
    rng = np.random.default_rng(11)
    mu = random_measure(rng, 14, zero_frac=0.3)
    for m in synthetic_matchings(rng, mu, rounds=5):
        assert np.abs(m.row_sums() - mu.values).max() < 1e-9


def test_matching_rejects_overfull_rows():
    mu = VertexMeasure([1.0, 1.0])
    with pytest.raises(InvariantViolation):
        StochasticMatching.from_pairs(mu.values, [(0, 1, 2.0)], 0)


def test_walk_t0_is_projection():
    state, mu = uniform_state(5)
    w = WalkOperator([], 1, state)
    rng = np.random.default_rng(2)
    for _ in range(5):
        x = rng.standard_normal(5)
        assert np.allclose(w.apply(x), apply_projection(state, x), atol=1e-12)


def test_walk_kills_sqrt_mu():
    rng = np.random.default_rng(3)
    mu = random_measure(rng, 8, zero_frac=0.0)
    state = ActiveState(range(8), mu)
    w = WalkOperator(synthetic_matchings(rng, mu, rounds=3), 2, state)
    assert np.abs(w.apply(state.sqrt_mu)).max() < 1e-9


def test_walk_agrees_with_dense_materialization():
    rng = np.random.default_rng(4)
    for trial in range(6):
        mu = random_measure(rng, 8, zero_frac=0.2)
        active = set(range(8)) - ({int(rng.integers(0, 8))} if trial % 2 else set())
        state = ActiveState(active, mu)
        if state.mu_active_total <= 0:
            continue
        delta = int(rng.choice([1, 2, 4]))
        w = WalkOperator(synthetic_matchings(rng, mu, rounds=3), delta, state)
        dense_w, _ = dense_walk_and_potential(w)
        for _ in range(4):
            x = rng.standard_normal(8)
            assert np.abs(w.apply(x) - dense_w @ x).max() < 1e-8


def test_walk_is_symmetric_operator():
    rng = np.random.default_rng(14)
    mu = random_measure(rng, 10, zero_frac=0.2)
    state = ActiveState(range(10), mu)
    w = WalkOperator(synthetic_matchings(rng, mu, rounds=4), 2, state)
    for _ in range(10):
        x = rng.standard_normal(10)
        y = rng.standard_normal(10)
        assert float(w.apply(x) @ y) == pytest.approx(float(x @ w.apply(y)), abs=1e-9)


def test_walk_spectral_norm_at_most_one():
    rng = np.random.default_rng(15)
    mu = random_measure(rng, 12, zero_frac=0.2)
    state = ActiveState(range(12), mu)
    for delta in (1, 2):
        w = WalkOperator(synthetic_matchings(rng, mu, rounds=4), delta, state)
        for _ in range(10):
            x = rng.standard_normal(12)
            assert np.linalg.norm(w.apply(x)) <= np.linalg.norm(x) * (1 + 1e-9)


def test_normalized_laplacian_range():
    # quadratic form of I_supp - Mbar stays within [0, 2]||v||^2
    rng = np.random.default_rng(16)
    mu = random_measure(rng, 10, zero_frac=0.2)
    s = np.diag(mu.inv_sqrt)
    i_supp = np.diag(mu.support_mask.astype(float))
    for m in synthetic_matchings(rng, mu, rounds=4):
        lap = i_supp - s @ m.dense() @ s
        for _ in range(10):
            v = rng.standard_normal(10)
            q = float(v @ lap @ v)
            assert q >= -1e-9
            assert q <= 2 * float(v @ v) + 1e-9


def test_projections_balance_and_zero_pattern():
    rng = np.random.default_rng(17)
    mu = random_measure(rng, 9, zero_frac=0.25)
    active = sorted(mu.support)[:-1] or sorted(mu.support)
    state = ActiveState(active, mu)
    w = WalkOperator(synthetic_matchings(rng, mu, rounds=2), 1, state)
    for _ in range(10):
        r = sample_unit_vector(9, rng)
        u = projections(w, r)
        assert abs(float((mu.values * u).sum())) <= 1e-7
        assert np.abs(np.where(state.mask, 0.0, u)).max() == 0.0


def test_projections_of_sqrt_mu_direction_vanish():
    state, mu = uniform_state(6)
    w = WalkOperator([], 1, state)
    r = mu.sqrt / np.linalg.norm(mu.sqrt)
    assert np.abs(projections(w, r)).max() < 1e-9


def test_psi_zero_round_identities():
    # all vertices terminal
    state, mu = uniform_state(9)
    _, psi = dense_walk_and_potential(WalkOperator([], 1, state))
    assert psi == pytest.approx(9 - 1, abs=1e-9)
    # restricted support
    vals = [1.0] * 4 + [0.0] * 5
    mu = VertexMeasure(vals)
    state = ActiveState(range(9), mu)
    _, psi = dense_walk_and_potential(WalkOperator([], 2, state))
    assert psi == pytest.approx(4 - 1, abs=1e-9)


def test_psi_drops_after_perfect_matching_round():
    # at delta=1 a perfect matching is an involution (F becomes the identity
    # again) and the potential merely stalls; laziness from delta>=2 makes
    # the drop strict
    mu = VertexMeasure([1.0] * 4)
    state = ActiveState(range(4), mu)
    m = StochasticMatching.from_pairs(mu.values, [(0, 1, 1.0), (2, 3, 1.0)], 0)
    _, psi0_lazy = dense_walk_and_potential(WalkOperator([], 2, state))
    _, psi1_lazy = dense_walk_and_potential(WalkOperator([m], 2, state))
    assert psi1_lazy < psi0_lazy
    _, psi0 = dense_walk_and_potential(WalkOperator([], 1, state))
    _, psi1 = dense_walk_and_potential(WalkOperator([m], 1, state))
    assert psi1 <= psi0 + 1e-12


def test_dense_oracle_rejects_large_instances():
    mu = VertexMeasure([1.0] * 70)
    state = ActiveState(range(70), mu)
    with pytest.raises(ValueError):
        dense_walk_and_potential(WalkOperator([], 1, state))


def test_dense_flow_matrix_properties():
    rng = np.random.default_rng(18)
    mu = random_measure(rng, 10, zero_frac=0.2)
    state = ActiveState(range(10), mu)
    w = WalkOperator(synthetic_matchings(rng, mu, rounds=4), 2, state)
    f = dense_flow_matrix(w)
    assert np.abs(f - f.T).max() < 1e-9
    assert np.abs(f.sum(axis=1) - mu.values).max() < 1e-8
    off_support = ~mu.support_mask
    blocked = f.copy()
    np.fill_diagonal(blocked, 0.0)
    assert np.abs(blocked[off_support, :]).max(initial=0.0) == 0.0
    assert np.abs(blocked[:, off_support]).max(initial=0.0) == 0.0


def test_walk_operator_requires_power_of_two_delta():
    state, _ = uniform_state(4)
    with pytest.raises(ValueError):
        WalkOperator([], 3, state)


def test_laplacian_quadratic_and_trace_identities():
    # for L = diag(row sums) - M: v'Lv sums w*(v_i - v_j)^2 over pairs, and
    # tr(A'LA) sums w*||A_i - A_j||^2 over pairs (diagonal terms cancel)
    rng = np.random.default_rng(21)
    mu = random_measure(rng, 8, zero_frac=0.2)
    for m in synthetic_matchings(rng, mu, rounds=3):
        dense = m.dense()
        lap = np.diag(dense.sum(axis=1)) - dense
        for _ in range(5):
            v = rng.standard_normal(8)
            direct = sum(w * (v[i] - v[j]) ** 2 for i, j, w in m.off_diagonal)
            assert float(v @ lap @ v) == pytest.approx(direct, abs=1e-9)
        a = rng.standard_normal((8, 8))
        direct = sum(w * float(((a[i] - a[j]) ** 2).sum()) for i, j, w in m.off_diagonal)
        assert float(np.trace(a.T @ lap @ a)) == pytest.approx(direct, abs=1e-8)


def test_mean_vector_norm_inequality():
    # k * ||mean||^2 <= sum ||v_i||^2
    rng = np.random.default_rng(22)
    for _ in range(20):
        k = int(rng.integers(1, 10))
        vs = rng.standard_normal((k, 6))
        mean = vs.mean(axis=0)
        assert k * float(mean @ mean) <= float((vs * vs).sum()) + 1e-12
