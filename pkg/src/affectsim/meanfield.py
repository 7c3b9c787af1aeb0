"""Mean-field ignorant/spreader equations integrated with fixed-step RK4.

    ds/dt = gamma*i - beta(t)*s*i
    di/dt = beta(t)*s*i - gamma*i

``beta`` is a scalar function of time: a constant, or the population-mean
spread rate recorded by an agent run (piecewise constant per round).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class MeanFieldState:
    t: float
    s: float
    i: float


def constant_beta(beta: float) -> Callable[[float], float]:
    return lambda t: beta


def piecewise_beta(series: Sequence[float]) -> Callable[[float], float]:
    """beta(t) = series[floor(t)], held at the last value past the end."""
    arr = np.asarray(series, dtype=float)
    if arr.size == 0:
        raise ValueError("empty beta series")
    last = arr.size - 1

    def beta(t: float) -> float:
        return float(arr[min(max(int(np.floor(t)), 0), last)])

    return beta


def _rhs(beta: float, gamma: float, s: float, i: float) -> tuple[float, float]:
    gain = beta * s * i
    loss = gamma * i
    return loss - gain, gain - loss


def integrate(
    beta_fn: Callable[[float], float],
    gamma: float,
    i0: float,
    horizon: float,
    dt: float = 0.01,
    tol: float = 1e-9,
) -> list[MeanFieldState]:
    """Integrate from ``(s, i) = (1 - i0, i0)`` over ``[0, horizon]``.

    Returns ``round(horizon / dt) + 1`` states including the initial one.
    Raises :class:`IntegrationError` if a step leaves ``[-tol, 1 + tol]``.
    """
    if not 0.0 < i0 < 1.0:
        raise ValueError(f"i0 must lie in (0, 1), got {i0}")
    if dt <= 0:
        raise ValueError("dt must be positive")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    n_steps = int(round(horizon / dt))
    s, i = 1.0 - i0, i0
    out = [MeanFieldState(0.0, s, i)]
    for k in range(n_steps):
        t = k * dt
        b0 = beta_fn(t)
        bh = beta_fn(t + dt / 2)
        b1 = beta_fn(t + dt)
        k1 = _rhs(b0, gamma, s, i)
        k2 = _rhs(bh, gamma, s + dt / 2 * k1[0], i + dt / 2 * k1[1])
        k3 = _rhs(bh, gamma, s + dt / 2 * k2[0], i + dt / 2 * k2[1])
        k4 = _rhs(b1, gamma, s + dt * k3[0], i + dt * k3[1])
        s = s + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        i = i + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if not (-tol <= s <= 1 + tol and -tol <= i <= 1 + tol):
            raise IntegrationError(f"state left [0, 1] at t={t + dt:.6g} (s={s}, i={i}); reduce dt")
        out.append(MeanFieldState((k + 1) * dt, s, i))
    return out
