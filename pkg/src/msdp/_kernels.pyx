# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: exhaustive enumeration and Smith-Waterman scoring.

Mirrors ``_fallback`` operation for operation. No fast-math: objective
values must match the Python accumulation bit for bit.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def smith_waterman(str a, str b, double match, double mismatch, double gap):
    cdef bytes ab = a.encode("ascii"), bb = b.encode("ascii")
    cdef const unsigned char[:] sa = ab
    cdef const unsigned char[:] sb = bb
    cdef Py_ssize_t la = len(ab), lb = len(bb), i, j
    cdef double[::1] prev = np.zeros(lb + 1)
    cdef double[::1] cur = np.zeros(lb + 1)
    cdef double[::1] tmp
    cdef double h, up, left, best = 0.0
    for i in range(1, la + 1):
        cur[0] = 0.0
        for j in range(1, lb + 1):
            h = prev[j - 1] + (match if sa[i - 1] == sb[j - 1] else mismatch)
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
        tmp = prev
        prev = cur
        cur = tmp
    return best


def es_vector(unary, pairw, allowed, cost, capacity, bint nonincreasing):
    cdef double[:, ::1] U = np.ascontiguousarray(unary, dtype=np.float64)
    cdef Py_ssize_t n = U.shape[0], m = U.shape[1]
    cdef bint has_pair = pairw is not None
    cdef bint has_cost = cost is not None
    cdef double[:, :, ::1] P = np.ascontiguousarray(pairw if has_pair else np.zeros((1, 1, 1)), dtype=np.float64)
    cdef double[:, ::1] C = np.ascontiguousarray(cost if has_cost else np.zeros((1, 1)), dtype=np.float64)
    cdef double cap = float(capacity) if has_cost else 0.0
    cdef cnp.uint8_t[:, ::1] A = np.ascontiguousarray(allowed, dtype=np.uint8)

    cdef Py_ssize_t[:, ::1] syms = np.zeros((n, m), dtype=np.intp)
    cdef Py_ssize_t[::1] nsyms = np.zeros(n, dtype=np.intp)
    cdef Py_ssize_t i, s, k
    for i in range(n):
        k = 0
        for s in range(m):
            if A[i, s]:
                syms[i, k] = s
                k += 1
        nsyms[i] = k
        if k == 0:
            return None, float("-inf"), 0, 0

    cdef Py_ssize_t[::1] pos = np.zeros(n, dtype=np.intp)
    cdef Py_ssize_t[::1] x = np.zeros(n, dtype=np.intp)
    cdef Py_ssize_t[::1] bestx = np.zeros(n, dtype=np.intp)
    cdef double[::1] acc = np.zeros(n + 1)
    cdef double[::1] used = np.zeros(n + 1)
    cdef cnp.uint8_t[::1] ordok = np.ones(n + 1, dtype=np.uint8)
    cdef long long enumerated = 0, feasible = 0
    cdef bint found = False, ok
    cdef double best = 0.0, step
    cdef Py_ssize_t level = 0

    while True:
        if pos[level] == nsyms[level]:
            if level == 0:
                break
            level -= 1
            pos[level] += 1
            continue
        s = syms[level, pos[level]]
        x[level] = s
        step = U[level, s]
        if has_pair and level > 0:
            step = step + P[level, x[level - 1], s]
        acc[level + 1] = acc[level] + step
        if has_cost:
            used[level + 1] = used[level] + C[level, s]
        if nonincreasing and level > 0:
            ordok[level + 1] = ordok[level] and s <= x[level - 1]
        else:
            ordok[level + 1] = ordok[level]
        if level == n - 1:
            enumerated += 1
            ok = ordok[n] and (not has_cost or used[n] <= cap)
            if ok:
                feasible += 1
                if not found or acc[n] > best:
                    found = True
                    best = acc[n]
                    for k in range(n):
                        bestx[k] = x[k]
            pos[level] += 1
        else:
            level += 1
            pos[level] = 0

    if not found:
        return None, float("-inf"), enumerated, feasible
    return tuple(int(bestx[k]) for k in range(n)), best, enumerated, feasible


def es_permutation(unary, pairw, allowed, Py_ssize_t n):
    cdef double[:, ::1] U = np.ascontiguousarray(unary, dtype=np.float64)
    cdef Py_ssize_t m = U.shape[1]
    cdef bint has_pair = pairw is not None
    cdef double[:, :, ::1] P = np.ascontiguousarray(pairw if has_pair else np.zeros((1, 1, 1)), dtype=np.float64)
    cdef cnp.uint8_t[:, ::1] A = np.ascontiguousarray(allowed, dtype=np.uint8)
    if n == 0:
        return None, float("-inf"), 0, 0

    cdef Py_ssize_t[::1] pos = np.zeros(n, dtype=np.intp)
    cdef Py_ssize_t[::1] x = np.zeros(n, dtype=np.intp)
    cdef Py_ssize_t[::1] bestx = np.zeros(n, dtype=np.intp)
    cdef cnp.uint8_t[::1] inuse = np.zeros(m, dtype=np.uint8)
    cdef double[::1] acc = np.zeros(n + 1)
    cdef long long count = 0
    cdef bint found = False
    cdef double best = 0.0, step
    cdef Py_ssize_t level = 0, s, k

    pos[0] = 0
    while True:
        if pos[level] == m:
            if level == 0:
                break
            level -= 1
            inuse[x[level]] = 0
            pos[level] += 1
            continue
        s = pos[level]
        if inuse[s] or not A[level, s]:
            pos[level] += 1
            continue
        x[level] = s
        step = U[level, s]
        if has_pair and level > 0:
            step = step + P[level, x[level - 1], s]
        acc[level + 1] = acc[level] + step
        if level == n - 1:
            count += 1
            if not found or acc[n] > best:
                found = True
                best = acc[n]
                for k in range(n):
                    bestx[k] = x[k]
            pos[level] += 1
        else:
            inuse[s] = 1
            level += 1
            pos[level] = 0

    if not found:
        return None, float("-inf"), count, count
    return tuple(int(bestx[k]) for k in range(n)), best, count, count
