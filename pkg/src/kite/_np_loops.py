"""Pure-numpy implementations of the hot selection loops.

These are the fallback twins of the numba kernels in `_nb_loops`; both
backends must produce identical index sequences and matching scores.
Status codes: 0 = ok, 1 = numerical degeneracy.

All loops maintain per-candidate quantities incrementally so one greedy
step costs O(n*d) for the kernel/score columns plus O(n) bookkeeping:

  design path   z^T V^{-1} x_i and x_i^T V^{-1} x_i via Sherman-Morrison,
  kernel path   residual kernels via the same grow-by-one factor rows the
                reference KernelState keeps (t = k_S(x_i, x_j)/sqrt(...)),
  dpp path      conditional variances of the quality-scaled gram matrix.
"""

from __future__ import annotations

import numpy as np

OK = 0
DEGENERATE = 1

NEG_SLACK = 1e-9
LOG_FLOOR = 1e-300


def _kernel_diag(sq, kind, c, m):
    if kind == 0:
        return sq.copy()
    if kind == 1:
        return (sq + c) ** m
    return np.ones_like(sq)


def _kernel_col(X, sq, v, vsq, kind, c, m, sigma):
    dots = X @ v
    if kind == 0:
        return dots
    if kind == 1:
        return (dots + c) ** m
    d2 = np.maximum(sq + vsq - 2.0 * dots, 0.0)
    return np.exp(-d2 / (2.0 * sigma * sigma))


def _pick(tot, mask):
    """Lowest-index argmax over unselected; returns (-1, 0.0) when a score
    is non-finite (degeneracy) or everything is masked."""
    avail = ~mask
    vals = tot[avail]
    if vals.size == 0:
        return -1, 0.0
    if not np.all(np.isfinite(vals)):
        return -2, 0.0
    j = int(np.flatnonzero(avail)[int(np.argmax(vals))])
    return j, float(tot[j])


def lite_loop(X, z, k, beta, lam):
    """Greedy relevance+diversity selection in feature space (d x d inverse)."""
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return _lite_loop(X, z, k, beta, lam)


def _lite_loop(X, z, k, beta, lam):
    n, d = X.shape
    Vinv = np.eye(d) / beta
    sq = np.einsum("ij,ij->i", X, X)
    r = X @ z / beta
    q = sq / beta
    idx = np.full(k, -1, np.int64)
    rel_out = np.zeros(k)
    div_out = np.zeros(k)
    tot_out = np.zeros(k)
    mask = np.zeros(n, bool)
    for s in range(k):
        neg = q < 0.0
        if np.any(neg):
            if np.any(q[neg & ~mask] < -NEG_SLACK):
                return idx, rel_out, div_out, tot_out, DEGENERATE
            q[neg] = 0.0
        rel = r * r / (1.0 + q)
        div = np.log1p(q)
        tot = rel + lam * div
        j, _ = _pick(tot, mask)
        if j < 0:
            return idx, rel_out, div_out, tot_out, DEGENERATE
        idx[s] = j
        rel_out[s] = rel[j]
        div_out[s] = div[j]
        tot_out[s] = tot[j]
        mask[j] = True
        u = Vinv @ X[j]
        denom = 1.0 + float(X[j] @ u)
        if not np.isfinite(denom) or denom <= 0.0:
            return idx, rel_out, div_out, tot_out, DEGENERATE
        w = X @ u
        zu = float(z @ u)
        q -= w * w / denom
        r -= w * (zu / denom)
        Vinv -= np.outer(u, u / denom)
        Vinv += Vinv.T
        Vinv *= 0.5
    return idx, rel_out, div_out, tot_out, OK


def kite_loop(X, z, k, beta, lam, kind, c, m, sigma, lifted):
    """Greedy selection scored through the residual kernel.

    lifted=True scores with the feature-space-equivalent forms
    rel = k_S(z,x)^2 / (beta*(beta+k_S(x,x))), div = log(1 + k_S(x,x)/beta);
    lifted=False uses the unnormalized residual forms
    rel = k_S(z,x)^2 / (beta+k_S(x,x)),        div = log(beta + k_S(x,x)).
    """
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return _kite_loop(X, z, k, beta, lam, kind, c, m, sigma, lifted)


def _kite_loop(X, z, k, beta, lam, kind, c, m, sigma, lifted):
    n = X.shape[0]
    sq = np.einsum("ij,ij->i", X, X)
    kdiag = _kernel_diag(sq, kind, c, m)
    zsq = float(z @ z)
    r = _kernel_col(X, sq, z, zsq, kind, c, m, sigma)
    dres = kdiag.copy()
    C = np.zeros((k, n))
    idx = np.full(k, -1, np.int64)
    rel_out = np.zeros(k)
    div_out = np.zeros(k)
    tot_out = np.zeros(k)
    mask = np.zeros(n, bool)
    for s in range(k):
        neg = dres < 0.0
        if np.any(neg):
            if np.any(dres[neg & ~mask] < -NEG_SLACK):
                return idx, rel_out, div_out, tot_out, DEGENERATE
            dres[neg] = 0.0
        if lifted:
            rel = r * r / (beta * (beta + dres))
            div = np.log1p(dres / beta)
        else:
            rel = r * r / (beta + dres)
            div = np.log(beta + dres)
        tot = rel + lam * div
        j, _ = _pick(tot, mask)
        if j < 0:
            return idx, rel_out, div_out, tot_out, DEGENERATE
        idx[s] = j
        rel_out[s] = rel[j]
        div_out[s] = div[j]
        tot_out[s] = tot[j]
        mask[j] = True
        delta2 = dres[j] + beta
        if not np.isfinite(delta2) or delta2 <= 0.0:
            return idx, rel_out, div_out, tot_out, DEGENERATE
        delta = np.sqrt(delta2)
        col = _kernel_col(X, sq, X[j], sq[j], kind, c, m, sigma)
        t = (col - C[:s].T @ C[:s, j]) / delta
        tz = r[j] / delta
        C[s] = t
        dres -= t * t
        r -= tz * t
    return idx, rel_out, div_out, tot_out, OK


def dpp_loop(X, qual, k, kind, c, m, sigma):
    """Greedy MAP over L = diag(qual) * S * diag(qual), S from the kernel.

    Each step adds the candidate with the largest conditional variance
    (equivalently the largest log-det increment of L restricted to the
    selection). If every remaining conditional variance has collapsed to
    ~0 (rank exhausted), the remaining slots are filled in index order:
    any completion leaves the determinant at zero, so that is the
    deterministic tie-break.
    """
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return _dpp_loop(X, qual, k, kind, c, m, sigma)


def _dpp_loop(X, qual, k, kind, c, m, sigma):
    n = X.shape[0]
    sq = np.einsum("ij,ij->i", X, X)
    mvar = qual * qual * _kernel_diag(sq, kind, c, m)
    scale = max(1.0, float(np.max(mvar)))
    floor = 1e-12 * scale
    C = np.zeros((k, n))
    idx = np.full(k, -1, np.int64)
    gains = np.zeros(k)
    mask = np.zeros(n, bool)
    for s in range(k):
        j, best = _pick(mvar, mask)
        if j == -2 or (j >= 0 and best < -NEG_SLACK * scale):
            return idx, gains, DEGENERATE
        if j < 0:
            return idx, gains, DEGENERATE
        if best <= floor:
            # rank exhausted: zero det either way, so fill deterministically
            # and record the representational floor as the increment
            rest = np.flatnonzero(~mask)
            for t, jj in enumerate(rest[: k - s]):
                idx[s + t] = jj
                gains[s + t] = np.log(LOG_FLOOR)
            return idx, gains, OK
        idx[s] = j
        gains[s] = np.log(mvar[j])
        mask[j] = True
        delta = np.sqrt(mvar[j])
        col = qual * _kernel_col(X, sq, X[j], sq[j], kind, c, m, sigma) * qual[j]
        t = (col - C[:s].T @ C[:s, j]) / delta
        C[s] = t
        mvar -= t * t
    return idx, gains, OK


def fps_loop(X, size, first):
    """Farthest-point sampling from `first`; ties go to the lowest index."""
    n = X.shape[0]
    idx = np.empty(size, np.int64)
    idx[0] = first
    chosen = np.zeros(n, bool)
    chosen[first] = True
    diff = X - X[first]
    dmin = np.einsum("ij,ij->i", diff, diff)
    for s in range(1, size):
        cand = np.flatnonzero(~chosen)
        j = int(cand[int(np.argmax(dmin[cand]))])
        idx[s] = j
        chosen[j] = True
        diff = X - X[j]
        dmin = np.minimum(dmin, np.einsum("ij,ij->i", diff, diff))
    return idx
