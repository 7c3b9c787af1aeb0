"""Emotional similarity, affective coupling and the dynamic spread rate.

Also home of the fragment timeline: an event is a sequence of information
fragments, each active for a contiguous block of rounds.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Sequence

import numpy as np

from .emotion import EmotionCode


@dataclass(frozen=True)
class EsefParams:
    d: float = 0.67
    sigma: float = 15.7079
    theta_decay: float = 0.05
    m: int = 32

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError("d must be positive")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.theta_decay < 0:
            raise ValueError("theta_decay must be non-negative")
        if self.m <= 0 or self.m % 2:
            raise ValueError("m must be a positive even integer")


@dataclass(frozen=True)
class RateWeights:
    w_gamma: float = 1.0
    w_neighbor: float = 0.1
    w_global: float = 0.1

    def __post_init__(self):
        if min(self.w_gamma, self.w_neighbor, self.w_global) < 0:
            raise ValueError("rate weights must be non-negative")

    @classmethod
    def literal(cls, m: int) -> "RateWeights":
        """Weights that undo the division by ``m``: beta = clamp(esef + M + Phi)."""
        return cls(1.0, float(m), float(m))


@dataclass(frozen=True)
class InfoFragment:
    code: EmotionCode
    duration: int

    def __post_init__(self):
        if self.duration < 1:
            raise ValueError("fragment duration must be at least one round")

    @property
    def etv(self) -> int:
        return self.code.etv


@dataclass(frozen=True)
class FragmentSchedule:
    fragments: tuple[InfoFragment, ...]
    _starts: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        frags = tuple(self.fragments)
        if not frags:
            raise ValueError("a schedule needs at least one fragment")
        if len({f.code.m for f in frags}) != 1:
            raise ValueError("all fragment codes must share one length")
        object.__setattr__(self, "fragments", frags)
        starts = (0, *accumulate(f.duration for f in frags))
        object.__setattr__(self, "_starts", starts)

    @property
    def total_rounds(self) -> int:
        return self._starts[-1]

    @property
    def starts(self) -> tuple[int, ...]:
        """Global round at which each fragment enters (plus the end sentinel)."""
        return self._starts

    def __len__(self) -> int:
        return len(self.fragments)

    def __getitem__(self, n: int) -> InfoFragment:
        return self.fragments[n]


def esef(e_node: int, e_info: int, t_local: int, params: EsefParams) -> float:
    """Emotional similarity of a node ETV to a fragment ETV, in [0, d].

    Gaussian in the ETV gap, peaked at ``e_node == e_info`` and decaying
    linearly with the fragment-local round. Nodes on the opposite side of the
    neutral point m/2 get an extra ``exp(-|e_node - m/2|)`` penalty. A fragment
    sitting exactly at m/2 has no opposite side.
    """
    m = params.m
    if not (0 <= e_node <= m and 0 <= e_info <= m):
        raise ValueError(f"ETVs must lie in [0, {m}], got ({e_node}, {e_info})")
    if t_local < 0:
        raise ValueError("t_local must be non-negative")
    decay = 1.0 - params.theta_decay * t_local
    if decay <= 0.0:
        return 0.0
    half = m // 2
    value = params.d * math.exp(-((e_node - e_info) ** 2) / params.sigma) * decay
    if e_info < half and e_node > half:
        value *= math.exp(half - e_node)
    elif e_info > half and e_node < half:
        value *= math.exp(e_node - half)
    return max(value, 0.0)


def esef_table(e_info: int, t_local: int, params: EsefParams) -> np.ndarray:
    """``esef`` for every node ETV 0..m, as a float64 lookup array."""
    return np.array([esef(e, e_info, t_local, params) for e in range(params.m + 1)])


def neighbor_coupling(node: int, graph, etvs: Sequence[int] | np.ndarray) -> float:
    """Weighted sum of neighbour ETVs over the neighbour count (0 if isolated)."""
    nbrs, weights = graph.neighbors(node), graph.neighbor_weights(node)
    if len(nbrs) == 0:
        return 0.0
    total = 0.0
    for v, w in zip(nbrs.tolist(), weights.tolist()):
        total += etvs[v] * w
    return total / len(nbrs)


def global_coupling(etvs: Sequence[int] | np.ndarray) -> float:
    """Network-average ETV."""
    arr = np.asarray(etvs)
    if arr.size == 0:
        raise ValueError("global coupling of an empty network is undefined")
    return int(arr.astype(np.int64).sum()) / arr.size


def spread_rate(gamma_esef: float, M: float, Phi: float, weights: RateWeights, m: int) -> float:
    """Infection probability from similarity plus the two coupling terms.

    The coupling terms are divided by m to put them on the same [0, 1] scale
    as the similarity before mixing. The result is clamped to [0, 1].
    """
    beta = weights.w_gamma * gamma_esef + weights.w_neighbor * (M / m) + weights.w_global * (Phi / m)
    return min(max(beta, 0.0), 1.0)


def spread_rates(gamma: np.ndarray, M: np.ndarray, Phi: float, weights: RateWeights, m: int) -> np.ndarray:
    """Vectorised ``spread_rate``; same operation order, so bit-identical."""
    beta = weights.w_gamma * gamma + weights.w_neighbor * (M / m) + weights.w_global * (Phi / m)
    return np.minimum(np.maximum(beta, 0.0), 1.0)


def active_fragment(t_global: int, schedule: FragmentSchedule) -> tuple[int, int]:
    """Return ``(fragment index, t_local)`` for a global round; index is 0-based."""
    if not 0 <= t_global < schedule.total_rounds:
        raise ValueError(f"round {t_global} outside [0, {schedule.total_rounds})")
    n = bisect.bisect_right(schedule.starts, t_global) - 1
    return n, t_global - schedule.starts[n]
