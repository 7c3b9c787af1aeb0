"""Weighted undirected graphs, generators and initial emotion draws.

Graphs are stored in CSR form with neighbour lists sorted ascending, which
fixes every iteration order the simulator relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy import sparse


class WeightedGraph:
    """Immutable undirected graph with per-edge weights in (0, 1]."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]], weights: Iterable[float] | None = None):
        edge_arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if weights is None:
            w_arr = np.ones(len(edge_arr))
        else:
            w_arr = np.asarray(list(weights), dtype=np.float64)
        if len(w_arr) != len(edge_arr):
            raise ValueError("one weight per edge required")
        if len(edge_arr) and (edge_arr.min() < 0 or edge_arr.max() >= n):
            raise ValueError("edge endpoint outside node range")
        if np.any(edge_arr[:, 0] == edge_arr[:, 1]):
            raise ValueError("self-loops are not allowed")
        lo, hi = np.minimum(edge_arr[:, 0], edge_arr[:, 1]), np.maximum(edge_arr[:, 0], edge_arr[:, 1])
        order = np.lexsort((hi, lo))
        lo, hi, w_arr = lo[order], hi[order], w_arr[order]
        if len(lo) > 1 and np.any((lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])):
            raise ValueError("duplicate edges are not allowed")
        self.n = int(n)
        self._lo, self._hi, self._w = lo, hi, w_arr
        adj = sparse.coo_matrix(
            (np.concatenate([w_arr, w_arr]), (np.concatenate([lo, hi]), np.concatenate([hi, lo]))),
            shape=(self.n, self.n),
        ).tocsr()
        adj.sort_indices()
        self.adjacency = adj
        self.indptr = adj.indptr.astype(np.int64)
        self.indices = adj.indices.astype(np.int64)
        self.data = adj.data.astype(np.float64)
        for arr in (self._lo, self._hi, self._w, self.indptr, self.indices, self.data):
            arr.flags.writeable = False

    @property
    def num_edges(self) -> int:
        return len(self._lo)

    def edges(self) -> list[tuple[int, int, float]]:
        """Edges as ``(u, v, w)`` with ``u < v``, sorted by ``(u, v)``."""
        return list(zip(self._lo.tolist(), self._hi.tolist(), self._w.tolist()))

    def edge_array(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self._lo, self._hi, self._w

    def neighbors(self, node: int) -> np.ndarray:
        return self.indices[self.indptr[node]:self.indptr[node + 1]]

    def neighbor_weights(self, node: int) -> np.ndarray:
        return self.data[self.indptr[node]:self.indptr[node + 1]]

    def weight(self, u: int, v: int) -> float:
        nbrs = self.neighbors(u)
        k = np.searchsorted(nbrs, v)
        if k == len(nbrs) or nbrs[k] != v:
            raise KeyError((u, v))
        return float(self.neighbor_weights(u)[k])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def with_weights(self, weights: np.ndarray) -> "WeightedGraph":
        return WeightedGraph(self.n, np.column_stack([self._lo, self._hi]), weights)

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        ncomp, _ = sparse.csgraph.connected_components(self.adjacency, directed=False)
        return ncomp == 1

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, edges={self.num_edges})"


@dataclass(frozen=True)
class InitConfig:
    weight_mu: float = 0.5
    weight_sigma: float = 0.15
    etv_mu: float = 16.0
    etv_sigma: float = 4.0
    m: int = 32

    def __post_init__(self):
        if self.weight_sigma < 0 or self.etv_sigma < 0:
            raise ValueError("standard deviations must be non-negative")
        if not 0 <= self.etv_mu <= self.m:
            raise ValueError(f"etv_mu must lie in [0, {self.m}]")


def generate_ba(n: int, m_attach: int, rng: np.random.Generator) -> WeightedGraph:
    """Barabasi-Albert preferential attachment.

    Starts from a clique on ``m_attach + 1`` nodes; each later node attaches
    to ``m_attach`` distinct existing nodes chosen proportionally to degree.
    """
    return WeightedGraph(n, _ba_edges(n, m_attach, rng))


def _ba_edges(n: int, m_attach: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    if m_attach < 1 or n <= m_attach:
        raise ValueError(f"BA needs n > m_attach >= 1, got n={n}, m_attach={m_attach}")
    n0 = m_attach + 1
    edges = [(u, v) for u in range(n0) for v in range(u + 1, n0)]
    # each node appears once per incident edge, so uniform picks are degree-proportional
    pool = [x for e in edges for x in e]
    for new in range(n0, n):
        targets: set[int] = set()
        while len(targets) < m_attach:
            targets.add(pool[int(rng.integers(len(pool)))])
        for t in sorted(targets):
            edges.append((t, new))
            pool.extend((t, new))
    return edges


def generate_ws(n: int, k: int, p_rewire: float, rng: np.random.Generator) -> WeightedGraph:
    """Watts-Strogatz ring lattice with rewiring; keeps exactly ``n*k/2`` edges."""
    return WeightedGraph(n, _ws_edges(n, k, p_rewire, rng))


def _ws_edges(n: int, k: int, p_rewire: float, rng: np.random.Generator) -> list[tuple[int, int]]:
    if k < 2 or k % 2 or n <= k:
        raise ValueError(f"WS needs n > k >= 2 with k even, got n={n}, k={k}")
    if not 0.0 <= p_rewire <= 1.0:
        raise ValueError("p_rewire must lie in [0, 1]")
    adj = [set() for _ in range(n)]
    for u in range(n):
        for j in range(1, k // 2 + 1):
            v = (u + j) % n
            adj[u].add(v)
            adj[v].add(u)
    for j in range(1, k // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            if rng.random() >= p_rewire or v not in adj[u]:
                continue
            if len(adj[u]) >= n - 1:
                continue
            w = int(rng.integers(n))
            while w == u or w in adj[u]:
                w = int(rng.integers(n))
            adj[u].discard(v)
            adj[v].discard(u)
            adj[u].add(w)
            adj[w].add(u)
    return [(u, v) for u in range(n) for v in adj[u] if u < v]


def generate_hybrid(
    n: int,
    ba_fraction: float,
    m_attach: int,
    k: int,
    p_rewire: float,
    bridge_edges: int,
    rng: np.random.Generator,
    max_tries: int = 100,
) -> WeightedGraph:
    """Scale-free block plus small-world block joined by random bridges.

    Nodes ``0 .. floor(ba_fraction*n) - 1`` are wired by preferential
    attachment, the rest by ring rewiring (resampled until connected), and
    ``bridge_edges`` distinct uniform edges link the two blocks.
    """
    if not 0.0 <= ba_fraction <= 1.0:
        raise ValueError("ba_fraction must lie in [0, 1]")
    n_ba = int(np.floor(ba_fraction * n))
    n_ws = n - n_ba
    if n_ws == 0:
        return WeightedGraph(n, _ba_edges(n, m_attach, rng))
    if n_ba == 0:
        return WeightedGraph(n, _connected_ws(n, k, p_rewire, rng, max_tries))
    if bridge_edges < 1:
        raise ValueError("bridge_edges must be >= 1 when both blocks are non-empty")
    if bridge_edges > n_ba * n_ws:
        raise ValueError("more bridge edges requested than node pairs available")
    edges = _ba_edges(n_ba, m_attach, rng)
    edges += [(u + n_ba, v + n_ba) for u, v in _connected_ws(n_ws, k, p_rewire, rng, max_tries)]
    bridges: set[tuple[int, int]] = set()
    while len(bridges) < bridge_edges:
        bridges.add((int(rng.integers(n_ba)), n_ba + int(rng.integers(n_ws))))
    edges += sorted(bridges)
    return WeightedGraph(n, edges)


def _connected_ws(n, k, p_rewire, rng, max_tries):
    for _ in range(max_tries):
        edges = _ws_edges(n, k, p_rewire, rng)
        if WeightedGraph(n, edges).is_connected():
            return edges
    raise RuntimeError(f"no connected small-world graph after {max_tries} tries")


def assign_weights(graph: WeightedGraph, cfg: InitConfig, rng: np.random.Generator) -> WeightedGraph:
    """Draw each edge weight from N(mu, sigma^2); redraw non-positive, cap at 1."""
    n_edges = graph.num_edges
    w = rng.normal(cfg.weight_mu, cfg.weight_sigma, n_edges)
    bad = w <= 0
    tries = 0
    while bad.any():
        if tries > 1000:
            raise ValueError("weight distribution puts almost no mass above zero")
        w[bad] = rng.normal(cfg.weight_mu, cfg.weight_sigma, int(bad.sum()))
        bad = w <= 0
        tries += 1
    return graph.with_weights(np.minimum(w, 1.0))


def init_etvs(n: int, cfg: InitConfig, rng: np.random.Generator) -> np.ndarray:
    """Initial ETVs: normal draws rounded half-up and clipped to [0, m]."""
    raw = rng.normal(cfg.etv_mu, cfg.etv_sigma, n)
    return np.clip(np.floor(raw + 0.5), 0, cfg.m).astype(np.int64)


def write_edgelist(graph: WeightedGraph, path: str | Path) -> None:
    """One ``u v weight`` line per edge, sorted by ``(u, v)``; first line ``# n <N>``."""
    lines = [f"# n {graph.n}"]
    lines += [f"{u} {v} {w!r}" for u, v, w in graph.edges()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_edgelist(path: str | Path, n: int | None = None) -> WeightedGraph:
    edges, weights = [], []
    header_n = None
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "n":
                header_n = int(parts[1])
            continue
        u, v, *rest = line.split()
        edges.append((int(u), int(v)))
        weights.append(float(rest[0]) if rest else 1.0)
    if n is None:
        n = header_n if header_n is not None else 1 + max((max(e) for e in edges), default=-1)
    return WeightedGraph(n, edges, weights)
