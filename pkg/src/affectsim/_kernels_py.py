"""Pure-numpy round kernel; reference behaviour for the compiled kernel."""

from __future__ import annotations

import numpy as np


def apply_round(codes, spreader, indptr, indices, beta, xlen, info,
                u_edge, u_start, u_forget, mut_len, u_mut,
                gamma_forget, mut_rate):
    """Advance one synchronous round.

    All probabilities are precomputed and every random draw is supplied, so
    this function is deterministic. Returns ``(codes, spreader, received)``
    as fresh arrays; inputs are not modified.
    """
    n, m = codes.shape
    spreader = spreader.astype(bool)

    src = np.repeat(np.arange(n), np.diff(indptr))
    hit = spreader[src] & (u_edge < beta[indices])
    received = np.zeros(n, dtype=bool)
    received[indices[hit]] = True

    out = codes.copy()
    rows = np.flatnonzero(received)
    if rows.size:
        length = xlen[rows]
        start = (u_start[rows] * (m - length + 1)).astype(np.int64)
        cols = np.arange(m)
        window = (cols >= start[:, None]) & (cols < (start + length)[:, None])
        block = out[rows]
        out[rows] = np.where(window, info[None, :], block)

    alive = spreader | received
    alive &= ~(u_forget < gamma_forget)

    flips = (u_mut < mut_rate) & (np.arange(m)[None, :] < mut_len[:, None])
    out ^= flips.astype(np.uint8)
    return out, alive.astype(np.uint8), received.astype(np.uint8)
