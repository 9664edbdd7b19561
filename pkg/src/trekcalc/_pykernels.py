"""Pure-Python/numpy implementations of the hot kernels.

Same signatures and results as the compiled ``_ckernels`` module.
"""
from __future__ import annotations

import numpy as np

_CHUNK = 65536


def sided_free_assignments(offsets, targets, up_masks, down_masks) -> list[tuple[int, ...]]:
    """Choose one option per source so targets, up masks and down masks are pairwise disjoint.

    Options of source ``r`` are ``offsets[r]:offsets[r+1]``; returns the chosen
    option indices for every admissible choice, in lexicographic order.
    """
    k = len(offsets) - 1
    out: list[tuple[int, ...]] = []
    if k == 0:
        return [()]
    chosen = [0] * k

    def rec(r: int, used_t: int, used_u: int, used_d: int) -> None:
        for o in range(offsets[r], offsets[r + 1]):
            tb = 1 << targets[o]
            if used_t & tb or used_u & up_masks[o] or used_d & down_masks[o]:
                continue
            chosen[r] = o
            if r + 1 == k:
                out.append(tuple(chosen))
            else:
                rec(r + 1, used_t | tb, used_u | up_masks[o], used_d | down_masks[o])

    rec(0, 0, 0, 0)
    return out


def partial_corr_batch(samples, edge_src, edge_dst, n: int, rows, cols) -> np.ndarray:
    """Signed corr(rows[0], cols[0] | rest) with Omega = I for each row of ``samples``.

    ``samples[:, e]`` is the weight of edge ``edge_src[e] -> edge_dst[e]``
    (vertex positions); edges must be sorted so that targets appear in
    topological order.
    """
    samples = np.ascontiguousarray(samples, dtype=np.float64)
    rows = np.asarray(rows, dtype=np.intp)
    cols = np.asarray(cols, dtype=np.intp)
    out = np.empty(samples.shape[0])
    for start in range(0, samples.shape[0], _CHUNK):
        chunk = samples[start:start + _CHUNK]
        m = chunk.shape[0]
        b = np.zeros((m, n, n))
        b[:, np.arange(n), np.arange(n)] = 1.0
        for e in range(len(edge_src)):
            b[:, :, edge_dst[e]] += b[:, :, edge_src[e]] * chunk[:, e, None]
        br, bc = b[:, :, rows], b[:, :, cols]
        num = np.linalg.det(np.einsum("nmi,nmj->nij", br, bc))
        d1 = np.linalg.det(np.einsum("nmi,nmj->nij", br, br))
        d2 = np.linalg.det(np.einsum("nmi,nmj->nij", bc, bc))
        out[start:start + m] = num / np.sqrt(d1 * d2)
    return out
