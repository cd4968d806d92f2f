"""Low-degree likelihood-ratio upper bounds: exact, Monte Carlo, analytic.

For two independent uniform k-subsets X, X' of S, let Z = X ∩ X' and
Phi = number of mask edges with both endpoints in Z. The quantity computed
here is ``1 + sum_{d=1}^{D} E[Phi^d] / d!``; with S = [n] it is the
unconditioned bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .core import (CliqueIndicator, Mask, ProblemParams, RngLike, RngStream, _subset_array,
                   as_generator, draw_k_subsets)
from .errors import InvalidParametersError, ResourceLimitError
from .kernels import KERNELS
from .mask_ops import restrict_mask, vertex_bound

DEFAULT_MAX_WORK = 10**8
MC_CHUNK = 1 << 16


@dataclass(frozen=True)
class CliquePairSample:
    X: CliqueIndicator
    X_prime: CliqueIndicator

    @property
    def Z(self) -> np.ndarray:
        """0/1 array of length n; entry ``i - 1`` is Z_i."""
        return (self.X.indicator() & self.X_prime.indicator())[1:].astype(np.int8)


@dataclass(frozen=True)
class LdubValue:
    value: Fraction | float
    mode: str  # "exact-rational" | "monte-carlo" | "analytic-bound"
    per_degree_terms: tuple = ()
    std_error: float = 0.0
    per_degree_std_errors: tuple = ()
    trials: int = 0

    def __float__(self) -> float:
        return float(self.value)

    def as_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "value": float(self.value),
            "per_degree_terms": [float(x) for x in self.per_degree_terms],
        }
        if isinstance(self.value, Fraction):
            out["value_exact"] = f"{self.value.numerator}/{self.value.denominator}"
        if self.mode == "monte-carlo":
            out["std_error"] = self.std_error
            out["per_degree_std_errors"] = list(self.per_degree_std_errors)
            out["trials"] = self.trials
        return out


def phi_value(M: Mask, Z) -> int:
    """Number of mask edges with both endpoints marked in the 0/1 vector Z (length n)."""
    z = np.asarray(Z).astype(bool).ravel()
    if z.size != M.n:
        raise InvalidParametersError(f"Z must have length n={M.n}, got {z.size}")
    if not len(M):
        return 0
    zz = np.concatenate(([False], z))
    return int((zz[M.edges[:, 0]] & zz[M.edges[:, 1]]).sum())


def _local_structure(M: Mask, S: np.ndarray):
    """Vertices of M inside S, their dense adjacency, and a vertex -> local index map."""
    _, M_S, phi = restrict_mask(M, S)
    verts = M_S.vertices
    m = verts.size
    local = np.full(M_S.n + 1, -1, dtype=np.int64)
    local[verts] = np.arange(m)
    adj = np.zeros((m, m), dtype=np.uint8)
    if len(M_S):
        a = local[M_S.edges[:, 0]]
        b = local[M_S.edges[:, 1]]
        adj[a, b] = 1
        adj[b, a] = 1
    return M_S, local, adj


def overlap_weights(s: int, m: int, k: int) -> list[int]:
    """c[w] = number of ordered pairs (X, X') of k-subsets of an s-set whose
    intersection with a fixed m-subset V is one given w-subset W."""
    out = []
    r = s - m
    top = min(k, m)
    for w in range(top + 1):
        c = 0
        for a in range(w, top + 1):
            left = math.comb(m - w, a - w) * math.comb(r, k - a)
            if left == 0:
                continue
            for a2 in range(w, top + 1):
                c += left * math.comb(m - a, a2 - w) * math.comb(r, k - a2)
        out.append(c)
    return out


def pattern_work(m: int, k: int) -> int:
    return sum(math.comb(m, w) for w in range(min(k, m) + 1))


def _terms_from_hist(phis: np.ndarray, counts: Sequence[int], total: int, D: int) -> list[Fraction]:
    terms = []
    for d in range(1, D + 1):
        num = sum(int(c) * int(p) ** d for p, c in zip(phis, counts) if c)
        terms.append(Fraction(num, total * math.factorial(d)))
    return terms


def ldub_exact(params: ProblemParams, M: Mask, S=None, *, max_work: int = DEFAULT_MAX_WORK,
               method: str = "auto") -> LdubValue:
    """Exact rational value by enumeration.

    ``method="pattern"`` enumerates the overlap W = X ∩ X' ∩ V(M) with
    closed-form multiplicities; ``method="pairs"`` enumerates every pair
    (X, X') directly. ``"auto"`` picks whichever needs less work.
    """
    if M.n != params.n:
        raise InvalidParametersError(f"mask ground set {M.n} != n={params.n}")
    S_arr = _subset_array(params.n, S)
    s, k, D = S_arr.size, params.k, params.D
    if k > s:
        raise InvalidParametersError(f"k={k} exceeds |S|={s}")
    M_S, local, adj = _local_structure(M, S_arr)
    m = adj.shape[0]
    n_sub = math.comb(s, k)
    total = n_sub * n_sub
    if len(M_S) == 0 or D == 0 or k < 2:
        terms = [Fraction(0)] * D
        return LdubValue(Fraction(1), "exact-rational", tuple(terms))

    pairs_work = total
    patt_work = pattern_work(m, k)
    if method == "auto":
        method = "pattern" if patt_work <= pairs_work else "pairs"
    work = patt_work if method == "pattern" else pairs_work
    if work > max_work:
        raise ResourceLimitError(
            f"exact enumeration needs {work:.3g} steps (cap {max_work:.3g}); use ldub_mc instead")

    wmax = min(k, m)
    phimax = min(len(M_S), wmax * (wmax - 1) // 2)
    if method == "pattern":
        hist = KERNELS.subset_phi_hist(adj, wmax, phimax)
        weights = overlap_weights(s, m, k)
        counts = [sum(int(hist[w, p]) * weights[w] for w in range(wmax + 1))
                  for p in range(phimax + 1)]
    elif method == "pairs":
        if s > 4096:
            raise ResourceLimitError("pair enumeration is limited to |S| <= 4096")
        subsets = np.array(list(combinations(range(s), k)), dtype=np.int64)
        full_adj = np.zeros((s, s), dtype=np.uint8)
        e = M_S.edges - 1
        full_adj[e[:, 0], e[:, 1]] = 1
        full_adj[e[:, 1], e[:, 0]] = 1
        counts = KERNELS.raw_pair_phi_hist(subsets, full_adj, phimax).tolist()
    else:
        raise InvalidParametersError(f"unknown method {method!r}")
    terms = _terms_from_hist(np.arange(phimax + 1), counts, total, D)
    return LdubValue(1 + sum(terms), "exact-rational", tuple(terms))


def sample_phi(params: ProblemParams, M: Mask, S=None, trials: int = 1,
               rng: RngLike = None) -> np.ndarray:
    """Phi for ``trials`` independent clique pairs drawn inside S."""
    S_arr = _subset_array(params.n, S)
    M_S, local, adj = _local_structure(M, S_arr)
    k = params.k
    if k > S_arr.size:
        raise InvalidParametersError(f"k={k} exceeds |S|={S_arr.size}")
    pool = np.arange(1, S_arr.size + 1, dtype=np.int64)
    out = np.empty(trials, dtype=np.int64)
    if isinstance(rng, RngStream):
        gens = (rng.generator(c) for c in range(0, trials, MC_CHUNK))
    else:
        g = as_generator(rng if rng is not None else np.random.default_rng())
        gens = (g for _ in range(0, trials, MC_CHUNK))
    for lo, gen in zip(range(0, trials, MC_CHUNK), gens):
        hi = min(trials, lo + MC_CHUNK)
        x = draw_k_subsets(gen, pool, k, hi - lo)
        xp = draw_k_subsets(gen, pool, k, hi - lo)
        out[lo:hi] = KERNELS.pair_phi(x, xp, local, adj)
    return out


def ldub_mc(params: ProblemParams, M: Mask, S=None, trials: int = 10**5,
            rng: RngLike = None) -> LdubValue:
    """Monte Carlo estimate with per-degree standard errors.

    With an ``RngStream`` each chunk of 65536 trials gets its own sub-stream,
    so results do not depend on how the work is split.
    """
    if trials < 2:
        raise InvalidParametersError("ldub_mc needs at least 2 trials")
    D = params.D
    if len(M) == 0 or D == 0:
        return LdubValue(1.0, "monte-carlo", (0.0,) * D, 0.0, (0.0,) * D, trials)
    phi = sample_phi(params, M, S, trials, rng)
    # all statistics come from the integer histogram, so summation order is fixed
    values, counts = np.unique(phi, return_counts=True)
    vals = values.astype(np.float64)
    cnt = counts.astype(np.float64)
    T = float(trials)
    terms, ses = [], []
    combined = np.zeros_like(vals)
    for d in range(1, D + 1):
        x = vals**d / math.factorial(d)
        combined += x
        mean = float((x * cnt).sum() / T)
        var = float((cnt * (x - mean) ** 2).sum() / (T - 1))
        terms.append(mean)
        ses.append(math.sqrt(var / T))
    mean_c = float((combined * cnt).sum() / T)
    se = math.sqrt(float((cnt * (combined - mean_c) ** 2).sum() / (T - 1)) / T)
    return LdubValue(1.0 + math.fsum(terms), "monte-carlo", tuple(terms), se, tuple(ses), trials)


def binomial_moment_bound(n: int, k: int, vertex_count: float, d: int) -> float:
    """(2d / ln(2d n^2 / (v k^2) + 1))^(2d): bound on E[H^(2d)], H ~ Bin(v, k^2/n^2)."""
    x = 2 * d * n * n / (vertex_count * k * k) + 1
    return math.exp(2 * d * math.log(2 * d / math.log(x)))


def analytic_vertex_bound(params: ProblemParams, vertex_count: float, n: int | None = None) -> LdubValue:
    """Closed-form upper bound for any mask touching at most ``vertex_count`` vertices.

    ``n`` overrides the ground-set size (used after restricting to a subset).
    """
    if vertex_count <= 0:
        raise InvalidParametersError("vertex_count must be positive")
    n = params.n if n is None else n
    terms = []
    for d in range(1, params.D + 1):
        log_x = math.log(2 * d * n * n / (vertex_count * params.k * params.k) + 1)
        log_term = 2 * d * math.log(2 * d / log_x) - math.lgamma(d + 1)
        terms.append(math.exp(log_term) if log_term < 709 else math.inf)
    return LdubValue(1.0 + math.fsum(terms), "analytic-bound", tuple(terms))


@dataclass(frozen=True)
class HardnessCertificate:
    t: int
    S: np.ndarray = field(repr=False)
    prob_bound: float
    v_max: float
    cond_bound: float
    grow: float
    n_prime: int = 0
    restricted_edges: int = 0
    mask_edges: int = 0
    t_min: int = 0

    def as_dict(self) -> dict:
        return {
            "t": self.t,
            "t_min": self.t_min,
            "grow": self.grow,
            "n_prime": self.n_prime,
            "mask_edges": self.mask_edges,
            "restricted_edges": self.restricted_edges,
            "v_max": self.v_max,
            "prob_bound": self.prob_bound,
            "cond_bound": self.cond_bound,
        }


def certify_hardness(params: ProblemParams, M: Mask) -> HardnessCertificate:
    """Numeric hardness certificate for mask M.

    Conditions on the clique avoiding vertices of degree > 2t, restricts the
    mask to the rest, and bounds the conditional quantity via the few-vertex
    bound at v_max = 2t + 2 + 2|M_S|/t. The smallest admissible t is
    ceil(|M| (k/n) ln n); larger t only raise the probability bound, so the t
    minimising v_max among admissible values is used.
    """
    n, k = params.n, params.k
    grow = math.log(n) if n > 1 else 1.0
    m = len(M)
    if m == 0:
        S = np.arange(1, n + 1, dtype=np.int64)
        return HardnessCertificate(1, S, 1.0, 4.0, 1.0, grow, n, 0, 0, 1)

    t_min = max(1, math.ceil(m * (k / n) * grow))
    deg = M.degree
    a, b = deg[M.edges[:, 0]], deg[M.edges[:, 1]]

    def restricted_count(t):
        return int(((a <= 2 * t) & (b <= 2 * t)).sum())

    best_t, best_v = t_min, vertex_bound(restricted_count(t_min), t_min)
    t = t_min + 1
    while 2 * t + 2 < best_v:
        v = vertex_bound(restricted_count(t), t)
        if v < best_v:
            best_t, best_v = t, v
        t += 1

    t = best_t
    S = np.flatnonzero(deg[1:] <= 2 * t) + 1
    n_prime, M_S, _ = restrict_mask(M, S)
    v_max = vertex_bound(len(M_S), t)
    if n_prime < k:
        return HardnessCertificate(t, S, 0.0, v_max, math.inf, grow, n_prime, len(M_S), m, t_min)
    prob_bound = max(0.0, 1.0 - min(1.0, (m / t) * (k / n)))
    if len(M_S) == 0:
        cond = 1.0
    else:
        cond = analytic_vertex_bound(params, v_max, n=n_prime).value
    return HardnessCertificate(t, S, prob_bound, v_max, float(max(1.0, cond)), grow, n_prime,
                               len(M_S), m, t_min)
