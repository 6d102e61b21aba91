"""Pure-Python/numpy implementations of the hot kernels.

Signatures and results match ``_kernels.pyx`` exactly, including float
accumulation order and tie-breaking, so either backend can serve as the
other's reference.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 1 << 18


def smith_waterman(a: str, b: str, match: float, mismatch: float, gap: float) -> float:
    prev = [0.0] * (len(b) + 1)
    best = 0.0
    for i in range(1, len(a) + 1):
        cur = [0.0] * (len(b) + 1)
        ai = a[i - 1]
        for j in range(1, len(b) + 1):
            h = prev[j - 1] + (match if ai == b[j - 1] else mismatch)
            up = prev[j] + gap
            left = cur[j - 1] + gap
            if up > h:
                h = up
            if left > h:
                h = left
            if h < 0.0:
                h = 0.0
            cur[j] = h
            if h > best:
                best = h
        prev = cur
    return best


def es_vector(unary, pairw, allowed, cost, capacity, nonincreasing):
    """Enumerate every allowed vector in lexicographic order.

    Returns ``(best, value, enumerated, feasible)``; ``best`` is the first
    vector in lexicographic order attaining the maximum, or ``None``.
    """
    unary = np.ascontiguousarray(unary, dtype=np.float64)
    n, m = unary.shape
    syms = [np.flatnonzero(np.asarray(allowed[i], dtype=bool)) for i in range(n)]
    radix = np.array([len(s) for s in syms], dtype=np.int64)
    total = int(np.prod(radix)) if n else 0
    if total == 0:
        return None, float("-inf"), 0, 0
    # place values, most significant stage first
    place = np.ones(n, dtype=np.int64)
    for i in range(n - 2, -1, -1):
        place[i] = place[i + 1] * radix[i + 1]
    best_idx, best_val, n_feas = -1, float("-inf"), 0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        acc = np.zeros(len(idx))
        used = np.zeros(len(idx)) if cost is not None else None
        ok = np.ones(len(idx), dtype=bool)
        prev = None
        for i in range(n):
            s = syms[i][(idx // place[i]) % radix[i]]
            step = unary[i, s]
            if pairw is not None and i > 0:
                step = step + pairw[i, prev, s]
            acc = acc + step
            if used is not None:
                used = used + cost[i, s]
            if nonincreasing and i > 0:
                ok &= s <= prev
            prev = s
        if used is not None:
            ok &= used <= capacity
        n_feas += int(ok.sum())
        if ok.any():
            vals = np.where(ok, acc, -np.inf)
            k = int(np.argmax(vals))
            if vals[k] > best_val:
                best_val, best_idx = float(vals[k]), int(idx[k])
    if best_idx < 0:
        return None, float("-inf"), total, n_feas
    best = tuple(int(syms[i][(best_idx // place[i]) % radix[i]]) for i in range(n))
    return best, best_val, total, n_feas


def es_permutation(unary, pairw, allowed, n):
    """Enumerate the length-``n`` arrangements of distinct allowed symbols."""
    unary_rows = np.asarray(unary, dtype=np.float64).tolist()
    pair_rows = None if pairw is None else np.asarray(pairw, dtype=np.float64).tolist()
    allowed = np.asarray(allowed, dtype=bool)
    m = allowed.shape[1]
    syms = [[s for s in range(m) if allowed[i][s]] for i in range(n)]
    used = [False] * m
    x = [0] * n
    state = {"best": None, "val": float("-inf"), "count": 0}

    def rec(level, acc):
        row = unary_rows[level]
        prow = pair_rows[level][x[level - 1]] if (pair_rows is not None and level > 0) else None
        last = level == n - 1
        for s in syms[level]:
            if used[s]:
                continue
            step = row[s]
            if prow is not None:
                step = step + prow[s]
            total = acc + step
            x[level] = s
            if last:
                state["count"] += 1
                if total > state["val"]:
                    state["val"] = total
                    state["best"] = tuple(x)
            else:
                used[s] = True
                rec(level + 1, total)
                used[s] = False

    if n > 0:
        rec(0, 0.0)
    return state["best"], state["val"], state["count"], state["count"]
