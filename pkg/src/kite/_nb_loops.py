"""Numba-compiled twins of the hot loops in `_np_loops`.

Same contracts, same status codes; the scalar passes are fused so each
greedy step is one BLAS matvec plus a single sweep over candidates.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

OK = 0
DEGENERATE = 1

NEG_SLACK = 1e-9
LOG_FLOOR = 1e-300


@njit(cache=True)
def _row_sqnorms(X):
    n, d = X.shape
    sq = np.empty(n)
    for i in range(n):
        acc = 0.0
        for j in range(d):
            acc += X[i, j] * X[i, j]
        sq[i] = acc
    return sq


@njit(cache=True)
def _kernel_col(X, sq, v, vsq, kind, c, m, sigma):
    n = X.shape[0]
    col = np.dot(X, v)
    if kind == 0:
        return col
    if kind == 1:
        for i in range(n):
            col[i] = (col[i] + c) ** m
        return col
    inv2s2 = 1.0 / (2.0 * sigma * sigma)
    for i in range(n):
        d2 = sq[i] + vsq - 2.0 * col[i]
        if d2 < 0.0:
            d2 = 0.0
        col[i] = math.exp(-d2 * inv2s2)
    return col


@njit(cache=True)
def _kernel_diag(sq, kind, c, m):
    n = sq.shape[0]
    out = np.empty(n)
    for i in range(n):
        if kind == 0:
            out[i] = sq[i]
        elif kind == 1:
            out[i] = (sq[i] + c) ** m
        else:
            out[i] = 1.0
    return out


@njit(cache=True)
def lite_loop(X, z, k, beta, lam):
    n, d = X.shape
    Vinv = np.eye(d) / beta
    sq = _row_sqnorms(X)
    r = np.dot(X, z) / beta
    q = sq / beta
    idx = np.full(k, -1, np.int64)
    rel_out = np.zeros(k)
    div_out = np.zeros(k)
    tot_out = np.zeros(k)
    mask = np.zeros(n, np.bool_)
    for s in range(k):
        best = -np.inf
        j = -1
        brel = 0.0
        bdiv = 0.0
        for i in range(n):
            if mask[i]:
                continue
            qi = q[i]
            if qi < 0.0:
                if qi < -NEG_SLACK:
                    return idx, rel_out, div_out, tot_out, DEGENERATE
                qi = 0.0
                q[i] = 0.0
            rel = r[i] * r[i] / (1.0 + qi)
            div = math.log1p(qi)
            tot = rel + lam * div
            if not np.isfinite(tot):
                return idx, rel_out, div_out, tot_out, DEGENERATE
            if tot > best:
                best = tot
                j = i
                brel = rel
                bdiv = div
        if j < 0:
            return idx, rel_out, div_out, tot_out, DEGENERATE
        idx[s] = j
        rel_out[s] = brel
        div_out[s] = bdiv
        tot_out[s] = best
        mask[j] = True
        u = np.dot(Vinv, X[j])
        denom = 1.0 + np.dot(X[j], u)
        if not np.isfinite(denom) or denom <= 0.0:
            return idx, rel_out, div_out, tot_out, DEGENERATE
        w = np.dot(X, u)
        zu = np.dot(z, u)
        coef = zu / denom
        for i in range(n):
            q[i] -= w[i] * w[i] / denom
            r[i] -= w[i] * coef
        for a in range(d):
            ua = u[a] / denom
            for b in range(d):
                Vinv[a, b] -= ua * u[b]
        for a in range(d):
            for b in range(a + 1, d):
                avg = 0.5 * (Vinv[a, b] + Vinv[b, a])
                Vinv[a, b] = avg
                Vinv[b, a] = avg
    return idx, rel_out, div_out, tot_out, OK


@njit(cache=True)
def kite_loop(X, z, k, beta, lam, kind, c, m, sigma, lifted):
    n = X.shape[0]
    sq = _row_sqnorms(X)
    kdiag = _kernel_diag(sq, kind, c, m)
    zsq = np.dot(z, z)
    r = _kernel_col(X, sq, z, zsq, kind, c, m, sigma)
    dres = kdiag.copy()
    C = np.zeros((k, n))
    idx = np.full(k, -1, np.int64)
    rel_out = np.zeros(k)
    div_out = np.zeros(k)
    tot_out = np.zeros(k)
    mask = np.zeros(n, np.bool_)
    log_beta = math.log(beta)
    for s in range(k):
        best = -np.inf
        j = -1
        brel = 0.0
        bdiv = 0.0
        for i in range(n):
            if mask[i]:
                continue
            di = dres[i]
            if di < 0.0:
                if di < -NEG_SLACK:
                    return idx, rel_out, div_out, tot_out, DEGENERATE
                di = 0.0
                dres[i] = 0.0
            if lifted:
                rel = r[i] * r[i] / (beta * (beta + di))
                div = math.log1p(di / beta)
            else:
                rel = r[i] * r[i] / (beta + di)
                div = math.log(beta + di) if beta + di > 0.0 else -np.inf
            tot = rel + lam * div
            if not np.isfinite(tot):
                return idx, rel_out, div_out, tot_out, DEGENERATE
            if tot > best:
                best = tot
                j = i
                brel = rel
                bdiv = div
        if j < 0:
            return idx, rel_out, div_out, tot_out, DEGENERATE
        idx[s] = j
        rel_out[s] = brel
        div_out[s] = bdiv
        tot_out[s] = best
        mask[j] = True
        delta2 = dres[j] + beta
        if not np.isfinite(delta2) or delta2 <= 0.0:
            return idx, rel_out, div_out, tot_out, DEGENERATE
        delta = math.sqrt(delta2)
        col = _kernel_col(X, sq, X[j], sq[j], kind, c, m, sigma)
        tz = r[j] / delta
        for i in range(n):
            acc = col[i]
            for t in range(s):
                acc -= C[t, i] * C[t, j]
            ti = acc / delta
            C[s, i] = ti
            dres[i] -= ti * ti
            r[i] -= tz * ti
    return idx, rel_out, div_out, tot_out, OK


@njit(cache=True)
def dpp_loop(X, qual, k, kind, c, m, sigma):
    n = X.shape[0]
    sq = _row_sqnorms(X)
    kdiag = _kernel_diag(sq, kind, c, m)
    mvar = np.empty(n)
    for i in range(n):
        mvar[i] = qual[i] * qual[i] * kdiag[i]
    scale = 1.0
    for i in range(n):
        if mvar[i] > scale:
            scale = mvar[i]
    floor = 1e-12 * scale
    neg = -NEG_SLACK * scale
    C = np.zeros((k, n))
    idx = np.full(k, -1, np.int64)
    gains = np.zeros(k)
    mask = np.zeros(n, np.bool_)
    for s in range(k):
        best = -np.inf
        j = -1
        for i in range(n):
            if mask[i]:
                continue
            if not np.isfinite(mvar[i]):
                return idx, gains, DEGENERATE
            if mvar[i] > best:
                best = mvar[i]
                j = i
        if j < 0:
            return idx, gains, DEGENERATE
        if best < neg:
            return idx, gains, DEGENERATE
        if best <= floor:
            # rank exhausted: zero det either way, so fill deterministically
            # and record the representational floor as the increment
            t = s
            for i in range(n):
                if t >= k:
                    break
                if not mask[i]:
                    idx[t] = i
                    gains[t] = math.log(LOG_FLOOR)
                    mask[i] = True
                    t += 1
            return idx, gains, OK
        idx[s] = j
        gains[s] = math.log(mvar[j])
        mask[j] = True
        delta = math.sqrt(mvar[j])
        col = _kernel_col(X, sq, X[j], sq[j], kind, c, m, sigma)
        qj = qual[j]
        for i in range(n):
            acc = col[i] * qual[i] * qj
            for t in range(s):
                acc -= C[t, i] * C[t, j]
            ti = acc / delta
            C[s, i] = ti
            mvar[i] -= ti * ti
    return idx, gains, OK


@njit(cache=True)
def fps_loop(X, size, first):
    n, d = X.shape
    idx = np.empty(size, np.int64)
    idx[0] = first
    chosen = np.zeros(n, np.bool_)
    chosen[first] = True
    dmin = np.empty(n)
    for i in range(n):
        acc = 0.0
        for a in range(d):
            diff = X[i, a] - X[first, a]
            acc += diff * diff
        dmin[i] = acc
    for s in range(1, size):
        best = -np.inf
        j = -1
        for i in range(n):
            if not chosen[i] and dmin[i] > best:
                best = dmin[i]
                j = i
        idx[s] = j
        chosen[j] = True
        for i in range(n):
            acc = 0.0
            for a in range(d):
                diff = X[i, a] - X[j, a]
                acc += diff * diff
            if acc < dmin[i]:
                dmin[i] = acc
    return idx
