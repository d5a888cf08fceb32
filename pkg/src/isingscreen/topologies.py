"""Standard interaction graphs for experiments."""

from __future__ import annotations

import re

import networkx as nx
import numpy as np

from .model import IsingModel, model_from_edges

KINDS = ("cycle", "path", "star", "random-degree-d", "empty")


def edge_list(kind: str, n: int, seed: int | None = None) -> list[tuple[int, int]]:
    """Unweighted edges ``(i, j)``, ``i < j``, for a named topology.

    ``random-degree-<d>`` gives a uniformly random d-regular graph and needs
    ``n * d`` even and ``d < n``.
    """
    if n < 1:
        raise ValueError("need at least one vertex")
    if kind == "empty":
        return []
    if kind == "path":
        return [(i, i + 1) for i in range(n - 1)]
    if kind == "cycle":
        if n < 3:
            raise ValueError("a cycle needs n >= 3")
        return [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    if kind == "star":
        return [(0, j) for j in range(1, n)]
    m = re.fullmatch(r"random-degree-(\d+)", kind)
    if m:
        d = int(m.group(1))
        if d >= n or (n * d) % 2:
            raise ValueError(f"no {d}-regular graph on {n} vertices")
        g = nx.random_regular_graph(d, n, seed=seed)
        return sorted((min(a, b), max(a, b)) for a, b in g.edges())
    raise ValueError(f"unknown topology {kind!r}; choose from {', '.join(KINDS)}")


def build_model(kind: str, n: int, weight: float, theta=None, seed: int | None = None) -> IsingModel:
    edges = [(i, j, weight) for i, j in edge_list(kind, n, seed)]
    return model_from_edges(n, edges, theta)


def parse_theta(text: str, n: int, rng: np.random.Generator) -> np.ndarray:
    """``"0"``, a constant, ``uniform:<a>`` for U[-a, a] draws, or a comma list."""
    text = text.strip()
    if text.startswith("uniform:"):
        a = float(text.split(":", 1)[1])
        return rng.uniform(-a, a, size=n)
    if "," in text:
        vals = np.array([float(s) for s in text.split(",")])
        if vals.size != n:
            raise ValueError(f"theta list has {vals.size} entries, expected {n}")
        return vals
    return np.full(n, float(text))
