"""Binary emotion codes and the two genetic operators acting on them.

A code is an m-bit vector (m even). Its emotional tendency value (ETV) is the
number of 1-bits: 0 is extreme opposition, m extreme support, m/2 neutral.

Both operators are pure. They take a code and a ``numpy.random.Generator``
and return a new code, leaving the input untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


def _check_m(m: int) -> None:
    if not isinstance(m, (int, np.integer)) or m <= 0 or m % 2:
        raise ValueError(f"code length m must be a positive even integer, got {m!r}")


@dataclass(frozen=True)
class EmotionCode:
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        _check_m(len(bits))
        if any(b not in (0, 1) for b in bits):
            raise ValueError("emotion code bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_iterable(cls, bits: Iterable[int]) -> "EmotionCode":
        return cls(tuple(bits))

    @classmethod
    def from_string(cls, s: str) -> "EmotionCode":
        return cls(tuple(int(c) for c in s.strip()))

    @property
    def m(self) -> int:
        return len(self.bits)

    @property
    def etv(self) -> int:
        return sum(self.bits)

    def to_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.uint8)

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


@dataclass(frozen=True)
class MutationParams:
    rate: float = 0.01

    def __post_init__(self):
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError(f"mutation rate must lie in [0, 1], got {self.rate}")


def etv(code: EmotionCode | Sequence[int] | np.ndarray) -> int:
    """Number of 1-bits in ``code``."""
    if isinstance(code, EmotionCode):
        return code.etv
    return int(np.count_nonzero(np.asarray(code)))


def codes_with_etvs(etvs: np.ndarray, m: int, rng: np.random.Generator) -> np.ndarray:
    """Build one code per entry of ``etvs`` as rows of a ``(len(etvs), m)`` uint8 array.

    The 1-bits of each row sit at a uniformly random subset of positions: every
    row ranks m uniform keys and sets the positions whose rank is below its ETV.
    """
    _check_m(m)
    etvs = np.asarray(etvs, dtype=np.int64)
    if etvs.size and (etvs.min() < 0 or etvs.max() > m):
        raise ValueError(f"ETVs must lie in [0, {m}]")
    keys = rng.random((etvs.size, m))
    ranks = np.argsort(np.argsort(keys, axis=1, kind="stable"), axis=1, kind="stable")
    return (ranks < etvs[:, None]).astype(np.uint8)


def code_with_etv(etv_value: int, m: int, rng: np.random.Generator) -> EmotionCode:
    """Random code of length ``m`` with exactly ``etv_value`` 1-bits."""
    _check_m(m)
    if not 0 <= etv_value <= m:
        raise ValueError(f"etv must lie in [0, {m}], got {etv_value}")
    row = codes_with_etvs(np.array([etv_value]), m, rng)[0]
    return EmotionCode(tuple(row.tolist()))


def mutate(code: EmotionCode, params: MutationParams, rng: np.random.Generator) -> EmotionCode:
    """Flip a random selection of bits inside a random prefix.

    A prefix length is drawn uniformly from {0, ..., m}; each index of the
    prefix is picked independently with probability ``params.rate`` and the
    picked bits are flipped.
    """
    m = code.m
    length = int(rng.integers(0, m + 1))
    picked = np.flatnonzero(rng.random(length) < params.rate)
    if picked.size == 0:
        return code
    bits = list(code.bits)
    for j in picked:
        bits[j] = 1 - bits[j]
    return EmotionCode(tuple(bits))


def crossover_segment(m: int, gamma: float, u: float) -> tuple[int, int]:
    """Half-open copy window ``[start, end)`` for similarity ``gamma``.

    ``u`` is a uniform draw in [0, 1) that places the window; start is uniform
    over {0, ..., m - len}.
    """
    length = int(np.floor(gamma * m))
    start = int(u * (m - length + 1))
    return start, start + length


def crossover(
    node_code: EmotionCode,
    info_code: EmotionCode,
    gamma: float,
    rng: np.random.Generator,
) -> EmotionCode:
    """Overwrite a window of the node's code with the information's bits.

    The window has length ``floor(gamma * m)`` and a uniformly random start.
    Only the node code changes; the copy is one-directional.
    """
    if node_code.m != info_code.m:
        raise ValueError(f"code lengths differ: {node_code.m} != {info_code.m}")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    start, end = crossover_segment(node_code.m, gamma, float(rng.random()))
    if node_code.bits[start:end] == info_code.bits[start:end]:
        return node_code
    bits = node_code.bits[:start] + info_code.bits[start:end] + node_code.bits[end:]
    return EmotionCode(bits)
