import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from johnforge.exceptions import GeometryError, ParameterError
from johnforge.john import (SquareGraph, _widest, certificate_epsilon, estimate_john_constant,
                            pixel_diagonal_slack)


def _threshold_oracle(n, edges, w, starts, target):
    """Largest weight t such that start and target connect using weights >= t."""
    best = -1.0
    for t in sorted(set(w.tolist()), reverse=True):
        g = nx.Graph()
        g.add_nodes_from(v for v in range(n) if w[v] >= t)
        g.add_edges_from((a, b) for a, b in edges if w[a] >= t and w[b] >= t)
        if target in g and any(s in g and nx.has_path(g, s, target) for s in starts):
            return t
    return best


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=3 * n),
    st.lists(st.floats(0.01, 10), min_size=n, max_size=n),
    st.sets(st.integers(0, n - 1), min_size=1, max_size=3))))
def test_widest_path_matches_threshold_search(case):
    n, edges, weights, starts = case
    edges = [(a, b) for a, b in edges if a != b]
    w = np.array(weights)
    g = SquareGraph(np.zeros((n, 2)), np.ones(n), np.array(edges, dtype=np.int64).reshape(-1, 2))
    is_start = np.zeros(n, dtype=np.bool_)
    is_start[list(starts)] = True
    value, path = _widest(g.indptr, g.indices, w, is_start, n - 1)
    expected = _threshold_oracle(n, edges, w, starts, n - 1)
    assert value == expected
    if value >= 0:
        assert is_start[path[0]] and path[-1] == n - 1
        assert min(w[path]) == value
        es = {tuple(sorted(e)) for e in edges}
        assert all(tuple(sorted((a, b))) in es for a, b in zip(path, path[1:]))


def test_certificates_recompute_from_scratch(whitney_of):
    w = whitney_of("disks:2", 8)
    est = estimate_john_constant(w, "inf", n_samples=24, seed=3)
    for cert in est.samples:
        again = certificate_epsilon(cert, w.mask)
        assert abs(again - cert.epsilon) <= pixel_diagonal_slack(cert, w.mask) + 1e-12
        assert cert.polyline[-1] == "inf"
    assert est.epsilon_lower == min(c.epsilon for c in est.samples)


def test_estimate_is_seed_deterministic(whitney_of):
    w = whitney_of("cantor:0.25:4", 8)
    a = estimate_john_constant(w, "inf", n_samples=16, seed=7)
    b = estimate_john_constant(w, "inf", n_samples=16, seed=7)
    assert a.to_dict() == b.to_dict()


def test_disk_interior_is_uniformly_john(whitney_of):
    w = whitney_of("circle:0.5", 8)
    est = estimate_john_constant(w, (0.0, 0.0), n_samples=None)
    assert est.epsilon_lower >= 0.4


def test_dilation_invariance(mask_of):
    from johnforge.geometry import whitney

    m = mask_of("disks:2", 7)
    a = estimate_john_constant(whitney(m), "inf", n_samples=16, seed=1)
    b = estimate_john_constant(whitney(m.scaled(5.0)), "inf", n_samples=16, seed=1)
    assert a.epsilon_lower == pytest.approx(b.epsilon_lower, rel=1e-12)


def test_all_samples_bounded_by_subset(whitney_of):
    w = whitney_of("cantor:0.25:4", 7)
    full = estimate_john_constant(w, "inf", n_samples=None)
    part = estimate_john_constant(w, "inf", n_samples=8, seed=2)
    assert full.epsilon_lower <= part.epsilon_lower


def test_bad_parameters(whitney_of):
    w = whitney_of("disk:0.5", 7)
    with pytest.raises(ParameterError):
        estimate_john_constant(w, "inf", n_samples=0)
    with pytest.raises(GeometryError):
        estimate_john_constant(w, (0.0, 0.0))
