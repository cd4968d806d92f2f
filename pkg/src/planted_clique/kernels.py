"""Hot inner loops, each in two interchangeable implementations.

Every kernel is a deterministic function of its array inputs (random draws
are made by the caller with numpy), so the numba and numpy variants return
identical results. ``KERNELS`` holds the active backend; ``BACKENDS`` holds
every available one for tests and benchmarks.
"""
from __future__ import annotations

from itertools import combinations
from types import SimpleNamespace

import numpy as np

from ._accel import BACKEND, HAVE_NUMBA, njit

# ---------------------------------------------------------------------------
# partial Fisher-Yates
# ---------------------------------------------------------------------------


def _partial_shuffle_loops(pool, swaps):
    n_trials, k = swaps.shape
    perm = pool.copy()
    out = np.empty((n_trials, k), dtype=pool.dtype)
    for t in range(n_trials):
        for i in range(k):
            j = swaps[t, i]
            tmp = perm[i]
            perm[i] = perm[j]
            perm[j] = tmp
        for i in range(k):
            out[t, i] = perm[i]
        # undo in reverse so the pool is pristine for the next trial: O(k), not O(|pool|)
        for i in range(k - 1, -1, -1):
            j = swaps[t, i]
            tmp = perm[i]
            perm[i] = perm[j]
            perm[j] = tmp
    return out


def partial_shuffle_numpy(pool: np.ndarray, swaps: np.ndarray) -> np.ndarray:
    """First ``k`` entries of ``pool`` after the swaps ``i <-> swaps[t, i]``.

    ``swaps[t, i]`` must lie in ``[i, len(pool))``.
    """
    n_trials, k = swaps.shape
    if n_trials < k or n_trials * pool.size > 1 << 24:
        out = np.empty((n_trials, k), dtype=pool.dtype)
        for t in range(n_trials):
            perm = pool.tolist()
            for i, j in enumerate(swaps[t].tolist()):
                perm[i], perm[j] = perm[j], perm[i]
            out[t] = perm[:k]
        return out
    perm = np.tile(pool, (n_trials, 1))
    rows = np.arange(n_trials)
    for i in range(k):
        j = swaps[:, i]
        a = perm[:, i].copy()
        perm[:, i] = perm[rows, j]
        perm[rows, j] = a
    return perm[:, :k].copy()


# ---------------------------------------------------------------------------
# Phi for sampled clique pairs
# ---------------------------------------------------------------------------


def _pair_phi_loops(x, xp, local, adj):
    n_trials, k = x.shape
    m = adj.shape[0]
    mark = np.zeros(m, dtype=np.uint8)
    z = np.empty(k, dtype=np.int64)
    out = np.zeros(n_trials, dtype=np.int64)
    for t in range(n_trials):
        for i in range(k):
            li = local[x[t, i]]
            if li >= 0:
                mark[li] = 1
        nz = 0
        for i in range(k):
            li = local[xp[t, i]]
            if li >= 0 and mark[li] == 1:
                z[nz] = li
                nz += 1
        phi = 0
        for a in range(nz):
            for b in range(a + 1, nz):
                phi += adj[z[a], z[b]]
        out[t] = phi
        for i in range(k):
            li = local[x[t, i]]
            if li >= 0:
                mark[li] = 0
    return out


def pair_phi_numpy(x, xp, local, adj):
    """Phi = number of mask edges inside X ∩ X' for each sampled pair.

    ``local`` maps a vertex to its index in ``adj`` (or -1 when the vertex
    touches no mask edge); ``adj`` is the symmetric 0/1 adjacency of those
    vertices.
    """
    n_trials = x.shape[0]
    m = adj.shape[0]
    ea, eb = np.nonzero(np.triu(adj, 1))
    out = np.zeros(n_trials, dtype=np.int64)
    if ea.size == 0 or n_trials == 0:
        return out
    step = max(1, (1 << 23) // max(m, ea.size, 1))
    for lo in range(0, n_trials, step):
        hi = min(n_trials, lo + step)
        rows = np.arange(hi - lo)[:, None]
        zx = np.zeros((hi - lo, m + 1), dtype=bool)
        zp = np.zeros((hi - lo, m + 1), dtype=bool)
        # index m is a sink column for vertices outside V(M)
        zx[rows, np.where(local[x[lo:hi]] >= 0, local[x[lo:hi]], m)] = True
        zp[rows, np.where(local[xp[lo:hi]] >= 0, local[xp[lo:hi]], m)] = True
        z = zx[:, :m] & zp[:, :m]
        out[lo:hi] = (z[:, ea] & z[:, eb]).sum(axis=1)
    return out


# ---------------------------------------------------------------------------
# exact enumeration
# ---------------------------------------------------------------------------


def _subset_phi_hist_loops(adj, wmax, phimax):
    m = adj.shape[0]
    hist = np.zeros((wmax + 1, phimax + 1), dtype=np.int64)
    hist[0, 0] = 1
    idx = np.empty(max(wmax, 1), dtype=np.int64)
    partial = np.zeros(max(wmax, 1) + 1, dtype=np.int64)
    for w in range(1, wmax + 1):
        if w > m:
            break
        for i in range(w):
            idx[i] = i
        # partial[p + 1] = Phi of the first p + 1 chosen vertices
        for p in range(w):
            s = partial[p]
            for q in range(p):
                s += adj[idx[q], idx[p]]
            partial[p + 1] = s
        while True:
            hist[w, partial[w]] += 1
            p = w - 1
            while p >= 0 and idx[p] == m - w + p:
                p -= 1
            if p < 0:
                break
            idx[p] += 1
            for q in range(p + 1, w):
                idx[q] = idx[q - 1] + 1
            for r in range(p, w):
                s = partial[r]
                for q in range(r):
                    s += adj[idx[q], idx[r]]
                partial[r + 1] = s
    return hist


def subset_phi_hist_numpy(adj, wmax, phimax):
    """``hist[w, phi]`` = number of ``w``-subsets of the mask vertices with Phi = phi."""
    m = adj.shape[0]
    hist = np.zeros((wmax + 1, phimax + 1), dtype=np.int64)
    hist[0, 0] = 1
    for w in range(1, min(wmax, m) + 1):
        combos = np.array(list(combinations(range(m), w)), dtype=np.int64)
        phi = np.zeros(combos.shape[0], dtype=np.int64)
        for a in range(w):
            for b in range(a + 1, w):
                phi += adj[combos[:, a], combos[:, b]]
        hist[w] += np.bincount(phi, minlength=phimax + 1)[: phimax + 1]
    return hist


def _raw_pair_phi_hist_loops(subsets, adj, phimax):
    n_sub, k = subsets.shape
    s = adj.shape[0]
    hist = np.zeros(phimax + 1, dtype=np.int64)
    mark = np.zeros(s, dtype=np.uint8)
    z = np.empty(k, dtype=np.int64)
    for a in range(n_sub):
        for i in range(k):
            mark[subsets[a, i]] = 1
        for b in range(n_sub):
            nz = 0
            for i in range(k):
                v = subsets[b, i]
                if mark[v] == 1:
                    z[nz] = v
                    nz += 1
            phi = 0
            for p in range(nz):
                for q in range(p + 1, nz):
                    phi += adj[z[p], z[q]]
            hist[phi] += 1
        for i in range(k):
            mark[subsets[a, i]] = 0
    return hist


def raw_pair_phi_hist_numpy(subsets, adj, phimax):
    """Histogram of Phi over every ordered pair of rows of ``subsets``."""
    n_sub, k = subsets.shape
    s = adj.shape[0]
    hist = np.zeros(phimax + 1, dtype=np.int64)
    ind = np.zeros((n_sub, s), dtype=bool)
    ind[np.arange(n_sub)[:, None], subsets] = True
    ea, eb = np.nonzero(np.triu(adj, 1))
    if ea.size == 0:
        hist[0] = n_sub * n_sub
        return hist
    for a in range(n_sub):
        z = ind[a] & ind
        phi = (z[:, ea] & z[:, eb]).sum(axis=1)
        hist += np.bincount(phi, minlength=phimax + 1)[: phimax + 1]
    return hist


# ---------------------------------------------------------------------------
# backend tables
# ---------------------------------------------------------------------------

BACKENDS = {
    "numpy": SimpleNamespace(
        name="numpy",
        partial_shuffle=partial_shuffle_numpy,
        pair_phi=pair_phi_numpy,
        subset_phi_hist=subset_phi_hist_numpy,
        raw_pair_phi_hist=raw_pair_phi_hist_numpy,
    )
}

if HAVE_NUMBA:
    _opts = dict(cache=True, nogil=True)
    BACKENDS["numba"] = SimpleNamespace(
        name="numba",
        partial_shuffle=njit(**_opts)(_partial_shuffle_loops),
        pair_phi=njit(**_opts)(_pair_phi_loops),
        subset_phi_hist=njit(**_opts)(_subset_phi_hist_loops),
        raw_pair_phi_hist=njit(**_opts)(_raw_pair_phi_hist_loops),
    )

KERNELS = BACKENDS[BACKEND]
