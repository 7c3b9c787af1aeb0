"""Round-based ignorant/spreader simulation with emotion-code dynamics.

One round, computed from the round-start snapshot:

1. resolve the active fragment and its local round;
2. every spreader broadcasts to all neighbours; neighbour ``v`` accepts a
   contact with probability ``beta_v``. A node that accepts at least once
   becomes (or stays) a spreader and gets one crossover with the fragment
   code, window length ``floor(esef * m)``;
3. every spreader forgets (turns ignorant) with probability ``gamma_forget``
   without touching its code;
4. every code is mutated.

Random draws follow a fixed layout per round (see :func:`draw_round`) taken
from a stream keyed on ``(seed, round)``, which is what makes the compiled
and numpy kernels, and the test oracle, agree draw for draw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels, rng as rngs
from .config import SimConfig
from .dynamics import (
    FragmentSchedule,
    InfoFragment,
    active_fragment,
    esef_table,
    spread_rates,
)
from .emotion import EmotionCode, codes_with_etvs
from .network import (
    WeightedGraph,
    assign_weights,
    generate_ba,
    generate_hybrid,
    generate_ws,
    init_etvs,
)


class SeedingError(RuntimeError):
    pass


@dataclass
class AgentState:
    """Population state as parallel arrays: codes ``(N, m)`` uint8, spreader flags ``(N,)``."""

    codes: np.ndarray
    spreader: np.ndarray

    @property
    def etvs(self) -> np.ndarray:
        return self.codes.sum(axis=1, dtype=np.int64)

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    def counts(self) -> tuple[int, int]:
        spreaders = int(np.count_nonzero(self.spreader))
        return self.n - spreaders, spreaders

    def copy(self) -> "AgentState":
        return AgentState(self.codes.copy(), self.spreader.copy())


@dataclass(frozen=True)
class RoundRecord:
    t: int
    fragment: int
    t_local: int
    S: int
    I: int
    phi: float
    beta_mean: float
    etvs: np.ndarray = field(repr=False)


@dataclass
class SimulationTrace:
    """Initial record plus one record per round (``T + 1`` in total)."""

    records: list[RoundRecord]
    m: int
    graph: WeightedGraph | None = None
    schedule: FragmentSchedule | None = None
    config: SimConfig | None = None

    def __len__(self) -> int:
        return len(self.records)

    @property
    def n(self) -> int:
        return len(self.records[0].etvs)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    @property
    def phi(self) -> np.ndarray:
        return self.column("phi")

    @property
    def etv_matrix(self) -> np.ndarray:
        return np.stack([r.etvs for r in self.records])

    @property
    def final_etvs(self) -> np.ndarray:
        return self.records[-1].etvs


def build_graph(cfg: SimConfig) -> WeightedGraph:
    g, n = cfg.graph, cfg.num_all
    rng = rngs.stream(cfg.seed, rngs.GRAPH)
    if g.kind == "ba":
        graph = generate_ba(n, g.m_attach, rng)
    elif g.kind == "ws":
        graph = generate_ws(n, g.k, g.p_rewire, rng)
    else:
        graph = generate_hybrid(n, g.ba_fraction, g.m_attach, g.k, g.p_rewire, g.bridge_edges, rng)
    return assign_weights(graph, cfg.init, rngs.stream(cfg.seed, rngs.WEIGHTS))


def build_schedule(cfg: SimConfig) -> FragmentSchedule:
    rng = rngs.stream(cfg.seed, rngs.INFO_CODES)
    etvs = np.array([f.etv for f in cfg.fragments])
    rows = codes_with_etvs(etvs, cfg.m, rng)
    return FragmentSchedule(tuple(
        InfoFragment(EmotionCode(tuple(row.tolist())), f.duration)
        for row, f in zip(rows, cfg.fragments)
    ))


def initial_codes(cfg: SimConfig) -> np.ndarray:
    etvs = init_etvs(cfg.num_all, cfg.init, rngs.stream(cfg.seed, rngs.INIT_ETV))
    return codes_with_etvs(etvs, cfg.m, rngs.stream(cfg.seed, rngs.NODE_CODES))


def neighbor_couplings(graph: WeightedGraph, etvs: np.ndarray) -> np.ndarray:
    deg = graph.degrees()
    total = graph.adjacency @ etvs.astype(np.float64)
    return np.divide(total, deg, out=np.zeros(graph.n), where=deg > 0)


def rates(codes: np.ndarray, graph: WeightedGraph, e_info: int, t_local: int, cfg: SimConfig):
    """Per-node ``(esef, beta)`` for the given fragment ETV and local round."""
    etvs = codes.sum(axis=1, dtype=np.int64)
    gamma = esef_table(e_info, t_local, cfg.esef)[etvs]
    phi = int(etvs.sum()) / len(etvs)
    beta = spread_rates(gamma, neighbor_couplings(graph, etvs), phi, cfg.weights, cfg.m)
    return gamma, beta


def seed_initial(
    graph: WeightedGraph,
    codes: np.ndarray,
    schedule: FragmentSchedule,
    cfg: SimConfig,
    rng: np.random.Generator | None = None,
) -> AgentState:
    """Mark ``round(mean(beta_i) * N)`` uniformly chosen nodes as spreaders.

    ``beta_i`` is each node's spread rate against the first fragment at round 0.
    """
    if rng is None:
        rng = rngs.stream(cfg.seed, rngs.SEEDING)
    n = codes.shape[0]
    _, beta = rates(codes, graph, schedule[0].etv, 0, cfg)
    i0 = math.floor(math.fsum(beta.tolist()) + 0.5)
    if i0 == 0:
        raise SeedingError("no initial spreaders: mean spread rate rounds to zero")
    spreader = np.zeros(n, dtype=np.uint8)
    spreader[rng.choice(n, size=i0, replace=False)] = 1
    return AgentState(np.ascontiguousarray(codes, dtype=np.uint8), spreader)


def draw_round(rng: np.random.Generator, nnz: int, n: int, m: int) -> dict[str, np.ndarray]:
    """All randomness one round consumes, in fixed order."""
    return {
        "u_edge": rng.random(nnz),
        "u_start": rng.random(n),
        "u_forget": rng.random(n),
        "mut_len": rng.integers(0, m + 1, size=n, dtype=np.int64),
        "u_mut": rng.random((n, m)),
    }


def step(
    state: AgentState,
    graph: WeightedGraph,
    schedule: FragmentSchedule,
    cfg: SimConfig,
    t_global: int,
    rng: np.random.Generator | None = None,
    kernel: Callable | None = None,
) -> tuple[AgentState, RoundRecord]:
    """Advance one round; returns the new state and the record describing it."""
    if rng is None:
        rng = rngs.round_stream(cfg.seed, t_global)
    kernel = kernel or kernels.apply_round
    n_frag, t_local = active_fragment(t_global, schedule)
    frag = schedule[n_frag]
    m = cfg.m
    gamma, beta = rates(state.codes, graph, frag.etv, t_local, cfg)
    xlen = np.floor(gamma * m).astype(np.int64)
    draws = draw_round(rng, len(graph.indices), state.n, m)
    codes, spreader, _ = kernel(
        state.codes, state.spreader, graph.indptr, graph.indices, beta, xlen,
        frag.code.to_array(), draws["u_edge"], draws["u_start"], draws["u_forget"],
        draws["mut_len"], draws["u_mut"], float(cfg.gamma_forget), float(cfg.mutation.rate),
    )
    new = AgentState(codes, spreader)
    return new, _record(new, t_global + 1, n_frag, t_local, math.fsum(beta.tolist()) / new.n)


def _record(state: AgentState, t: int, fragment: int, t_local: int, beta_mean: float) -> RoundRecord:
    etvs = state.etvs
    s, i = state.counts()
    return RoundRecord(t, fragment, t_local, s, i, int(etvs.sum()) / len(etvs), beta_mean, etvs)


def run(cfg: SimConfig, rounds: int | None = None, kernel: Callable | None = None) -> SimulationTrace:
    """Build everything from ``cfg`` and iterate all rounds (or the first ``rounds``)."""
    T = cfg.total_rounds if rounds is None else rounds
    if not 0 <= T <= cfg.total_rounds:
        raise ValueError(f"rounds must lie in [0, {cfg.total_rounds}]")
    graph = build_graph(cfg)
    schedule = build_schedule(cfg)
    state = seed_initial(graph, initial_codes(cfg), schedule, cfg)
    _, beta0 = rates(state.codes, graph, schedule[0].etv, 0, cfg)
    records = [_record(state, 0, 0, 0, math.fsum(beta0.tolist()) / state.n)]
    for t in range(T):
        state, rec = step(state, graph, schedule, cfg, t, kernel=kernel)
        records.append(rec)
    return SimulationTrace(records, cfg.m, graph, schedule, cfg)
