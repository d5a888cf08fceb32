import numpy as np
import pytest

from isingscreen.topologies import build_model, edge_list, parse_theta


@pytest.mark.parametrize("kind,n,count", [("cycle", 8, 8), ("path", 5, 4), ("star", 6, 5), ("empty", 4, 0)])
def test_edge_counts(kind, n, count):
    edges = edge_list(kind, n)
    assert len(edges) == count
    assert all(0 <= i < j < n for i, j in edges)


def test_random_regular_degree():
    m = build_model("random-degree-4", 10, 0.3, seed=2)
    assert np.all((m.A != 0).sum(axis=1) == 4)
    assert m.lambda_width == pytest.approx(1.2)


@pytest.mark.parametrize("kind,n", [("random-degree-3", 7), ("random-degree-5", 5), ("cycle", 2), ("ring", 4)])
def test_illegal(kind, n):
    with pytest.raises(ValueError):
        edge_list(kind, n)


def test_parse_theta(rng):
    assert np.array_equal(parse_theta("0", 3, rng), np.zeros(3))
    assert np.array_equal(parse_theta("0.2", 2, rng), [0.2, 0.2])
    assert np.array_equal(parse_theta("1,-1", 2, rng), [1.0, -1.0])
    u = parse_theta("uniform:0.3", 100, rng)
    assert np.all(np.abs(u) <= 0.3) and u.std() > 0.05
    with pytest.raises(ValueError):
        parse_theta("1,2,3", 2, rng)
