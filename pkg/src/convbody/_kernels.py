"""Hot loops for overlap volumes, jitted when numba is available.

The central kernel clips a fixed subject polygon against a family of
halfspaces whose offsets depend affinely on a query point, and returns the
clipped area for a whole batch of query points.  Both the pairwise overlap
f(x) = |K cap (x - L)| in the plane and two-dimensional lifted overlap
polytopes reduce to this form.
"""

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


@njit(cache=True)
def clip_area_param(subj, N, c0, CX, X):
    """Areas of {y in R^2 : N y <= c0 - CX x} cap subj, for each row x of X.

    subj: (S, 2) counterclockwise subject polygon
    N:    (F, 2) plane normals
    c0:   (F,)   constant offsets
    CX:   (F, k) coefficient of the query point in each offset
    X:    (P, k) query points
    """
    P = X.shape[0]
    S = subj.shape[0]
    F = N.shape[0]
    k = CX.shape[1]
    out = np.empty(P)
    cap = S + F + 4
    buf_a = np.empty((cap, 2))
    buf_b = np.empty((cap, 2))
    for p in range(P):
        cnt = S
        for i in range(S):
            buf_a[i, 0] = subj[i, 0]
            buf_a[i, 1] = subj[i, 1]
        alive = True
        for j in range(F):
            n0 = N[j, 0]
            n1 = N[j, 1]
            c = c0[j]
            for t in range(k):
                c -= CX[j, t] * X[p, t]
            m = 0
            for i in range(cnt):
                nxt = i + 1
                if nxt == cnt:
                    nxt = 0
                px = buf_a[i, 0]
                py = buf_a[i, 1]
                qx = buf_a[nxt, 0]
                qy = buf_a[nxt, 1]
                dp = n0 * px + n1 * py - c
                dq = n0 * qx + n1 * qy - c
                if dp <= 0.0:
                    buf_b[m, 0] = px
                    buf_b[m, 1] = py
                    m += 1
                    if dq > 0.0:
                        s = dp / (dp - dq)
                        buf_b[m, 0] = px + s * (qx - px)
                        buf_b[m, 1] = py + s * (qy - py)
                        m += 1
                elif dq <= 0.0:
                    s = dp / (dp - dq)
                    buf_b[m, 0] = px + s * (qx - px)
                    buf_b[m, 1] = py + s * (qy - py)
                    m += 1
            if m < 3:
                alive = False
                break
            for i in range(m):
                buf_a[i, 0] = buf_b[i, 0]
                buf_a[i, 1] = buf_b[i, 1]
            cnt = m
        if not alive:
            out[p] = 0.0
            continue
        acc = 0.0
        for i in range(cnt):
            nxt = i + 1
            if nxt == cnt:
                nxt = 0
            acc += buf_a[i, 0] * buf_a[nxt, 1] - buf_a[nxt, 0] * buf_a[i, 1]
        out[p] = 0.5 * abs(acc)
    return out


def interval_length_param(N, c0, CX, X):
    """Lengths of {y in R : N y <= c0 - CX x} for each row x of X.

    One-dimensional counterpart of clip_area_param; plain numpy suffices.
    """
    offs = c0[None, :] - X @ CX.T
    n = N[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = offs / n[None, :]
    pos = n > 0
    neg = n < 0
    hi = np.min(np.where(pos[None, :], bound, np.inf), axis=1)
    lo = np.max(np.where(neg[None, :], bound, -np.inf), axis=1)
    return np.maximum(hi - lo, 0.0)


@njit(cache=True)
def count_ge_rows(G, C):
    """For each row c of C, count rows g of G with g >= c coordinatewise.

    Drives the sampled overlap evaluator: G holds facet dot products of the
    fixed sample cloud and C the per-query thresholds.  The inner loop bails
    on the first violated facet, which rejects most samples after one test.
    """
    P = C.shape[0]
    S = G.shape[0]
    F = G.shape[1]
    out = np.empty(P, dtype=np.int64)
    for p in range(P):
        cnt = 0
        for s in range(S):
            ok = True
            for f in range(F):
                if G[s, f] < C[p, f]:
                    ok = False
                    break
            if ok:
                cnt += 1
        out[p] = cnt
    return out


def count_ge_rows_numpy(G, C, block=32):
    """Blocked numpy fallback for count_ge_rows."""
    out = np.empty(len(C), dtype=np.int64)
    for i in range(0, len(C), block):
        j = min(i + block, len(C))
        out[i:j] = np.all(G[None, :, :] >= C[i:j, None, :], axis=2).sum(axis=1)
    return out
