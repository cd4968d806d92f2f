"""Sublinear degree-counting detector built from a rectangular query mask.

Rows V_L = {1..L} are tested against columns V_R = {n-R+1..n}; each row's
normalised degree estimate g_i is pushed through the threshold polynomial
tau and the results are summed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .core import Mask, MaskedGraph, ProblemParams
from .errors import InvalidParametersError, ResourceLimitError

MAX_ELL = 60
# guards ceil() against float noise such as 3/0.15 + 4 = 23.999999999999996
_CEIL_SLACK = 1e-9


def _ceil(x: float) -> int:
    return math.ceil(x - _CEIL_SLACK)


@dataclass(frozen=True)
class ThresholdPolynomial:
    """tau(y) = (2l+1) C(2l,l) ∫_0^y t^l (1-t)^l dt with exact monomial coefficients.

    ``coefficients[p]`` is the coefficient of y**p.
    """

    ell: int
    coefficients: tuple[Fraction, ...] = field(repr=False)

    @property
    def degree(self) -> int:
        return 2 * self.ell + 1

    def exact(self, y) -> Fraction:
        y = Fraction(y)
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * y + c
        return acc

    @cached_property
    def _negative_series(self) -> np.ndarray:
        # for s >= 0: |tau(-s)| = c * sum_j C(l,j) s^(l+j+1)/(l+j+1), all terms positive
        l = self.ell
        scale = (2 * l + 1) * math.comb(2 * l, l)
        return np.array([float(Fraction(scale * math.comb(l, j), l + j + 1)) for j in range(l + 1)])

    def _eval_negative(self, s: np.ndarray) -> np.ndarray:
        acc = np.zeros_like(s)
        for c in self._negative_series[::-1]:
            acc = acc * s + c
        sign = -1.0 if self.ell % 2 == 0 else 1.0
        return sign * acc * s ** (self.ell + 1)

    def _eval_unit(self, y: np.ndarray) -> np.ndarray:
        # Bernstein form on [0, 1]: P(Binomial(2l+1, y) >= l+1)
        N = 2 * self.ell + 1
        out = np.zeros_like(y)
        q = 1.0 - y
        for j in range(self.ell + 1, N + 1):
            out += math.comb(N, j) * y**j * q ** (N - j)
        return out

    def __call__(self, y):
        y = np.asarray(y, dtype=np.float64)
        flat = y.ravel()
        out = np.empty_like(flat)
        neg = flat < 0
        big = flat > 1
        mid = ~(neg | big)
        out[mid] = self._eval_unit(flat[mid])
        out[neg] = self._eval_negative(-flat[neg])
        # tau(y) = 1 - tau(1 - y)
        out[big] = 1.0 - self._eval_negative(flat[big] - 1.0)
        out = out.reshape(y.shape)
        return float(out) if out.ndim == 0 else out

    def horner(self, y):
        """Plain monomial Horner in double precision (loses accuracy for large ell)."""
        y = np.asarray(y, dtype=np.float64)
        acc = np.zeros_like(y)
        for c in reversed(self.coefficients):
            acc = acc * y + float(c)
        return acc

    def reflected(self) -> tuple[Fraction, ...]:
        """Coefficients of tau(1 - y)."""
        N = len(self.coefficients) - 1
        out = [Fraction(0)] * (N + 1)
        for p, c in enumerate(self.coefficients):
            if not c:
                continue
            for r in range(p + 1):
                out[r] += c * math.comb(p, r) * (-1) ** r
        return tuple(out)


def tau_poly(ell: int) -> ThresholdPolynomial:
    if ell < 0:
        raise InvalidParametersError(f"ell must be non-negative, got {ell}")
    if ell > MAX_ELL:
        raise ResourceLimitError(f"ell={ell} exceeds the supported maximum {MAX_ELL}")
    scale = (2 * ell + 1) * math.comb(2 * ell, ell)
    coeffs = [Fraction(0)] * (2 * ell + 2)
    for m in range(ell + 1):
        coeffs[ell + m + 1] = Fraction(scale * math.comb(ell, m) * (-1) ** m, ell + m + 1)
    return ThresholdPolynomial(ell, tuple(coeffs))


@dataclass(frozen=True)
class RectMaskParams:
    """Geometry of a (possibly truncated) rectangular mask V_L x V_R.

    ``edge_count`` is R * L for the full rectangle; a truncated rectangle keeps
    the first ``edge_count`` entries in row-major order.
    """

    n: int
    epsilon: float
    R: int
    L: int
    ell: int
    edge_count: int

    @property
    def V_L(self) -> range:
        return range(1, self.L + 1)

    @property
    def V_R(self) -> range:
        return range(self.n - self.R + 1, self.n + 1)

    @property
    def truncated(self) -> bool:
        return self.edge_count != self.R * self.L

    @cached_property
    def row_counts(self) -> np.ndarray:
        counts = np.full(self.L, self.R, dtype=np.int64)
        short = self.R * self.L - self.edge_count
        if short:
            counts[-1] -= short
        return counts

    def build_mask(self) -> Mask:
        rows = np.repeat(np.arange(1, self.L + 1, dtype=np.int64), self.R)
        cols = np.tile(np.arange(self.n - self.R + 1, self.n + 1, dtype=np.int64), self.L)
        edges = np.column_stack((rows, cols))[: self.edge_count]
        return Mask(self.n, edges)


def analytic_ell(epsilon: float, delta: float) -> int:
    return _ceil(3 / epsilon + 1 / delta)


def default_ell(params: ProblemParams) -> int:
    """params.ell if set; else ceil(3/eps + 1/delta) above the transition and ceil(1/delta) below."""
    if params.ell is not None:
        return params.ell
    if params.delta is None or params.delta <= 0:
        raise InvalidParametersError("a default ell needs delta > 0")
    eps = params.epsilon
    return analytic_ell(eps, params.delta) if eps > 0 else _ceil(1 / params.delta)


def rect_mask(params: ProblemParams, ell: int | None = None) -> tuple[RectMaskParams, Mask]:
    """Full rectangle with R = min(ceil((n/k)^2 n^(2 eps/3)), ceil(n/2)) and L = ceil(sqrt R)."""
    n, k = params.n, params.k
    if params.gamma is None or params.delta is None:
        raise InvalidParametersError("rect_mask needs both delta and gamma")
    eps = params.epsilon
    if eps <= 0:
        raise InvalidParametersError(
            f"gamma={params.gamma:g} is below the phase transition 3(1/2 - delta)={params.boundary_gamma:g}")
    if params.delta <= 0:
        raise InvalidParametersError("delta must be positive")
    R = min(_ceil((n / k) ** 2 * n ** (2 * eps / 3)), math.ceil(n / 2))
    L = math.isqrt(R - 1) + 1
    if L + R > n:
        raise InvalidParametersError(f"L + R = {L + R} exceeds n = {n}")
    if ell is None:
        ell = default_ell(params)
    rp = RectMaskParams(n, eps, R, L, ell, R * L)
    return rp, rp.build_mask()


def truncated_rect_mask(params: ProblemParams, budget: int,
                        ell: int | None = None) -> tuple[RectMaskParams, Mask]:
    """Rectangle with exactly ``budget`` edges and R ≈ L^2.

    L = ceil(budget^(1/3)), R = ceil(budget / L); the last row is cut short.
    """
    n = params.n
    if budget < 1:
        raise InvalidParametersError("budget must be positive")
    L = max(1, _ceil(budget ** (1 / 3)))
    R = -(-budget // L)
    L = -(-budget // R)
    if L + R > n:
        raise InvalidParametersError(f"L + R = {L + R} exceeds n = {n}")
    eps = params.epsilon
    if ell is None:
        ell = default_ell(params)
    rp = RectMaskParams(n, eps, R, L, ell, budget)
    return rp, rp.build_mask()


def detector_mask(params: ProblemParams, ell: int | None = None) -> tuple[RectMaskParams, Mask]:
    """Full rectangle above the transition, budget-matched truncated rectangle below."""
    if params.epsilon > 0:
        return rect_mask(params, ell)
    return truncated_rect_mask(params, params.mask_budget, ell)


@dataclass(frozen=True)
class DetectionOutcome:
    statistic: float
    threshold: float
    verdict: str
    per_vertex_g: np.ndarray = field(repr=False)

    def as_dict(self) -> dict:
        return {"statistic": self.statistic, "threshold": self.threshold, "verdict": self.verdict,
                "per_vertex_g": [float(x) for x in self.per_vertex_g]}


@dataclass(frozen=True)
class RowLayout:
    """Groups mask edges by their smaller endpoint ("row").

    For a rectangle V_L x V_R the rows are exactly V_L; for any other mask
    this gives the natural generalisation of the row-sum statistic.
    """

    rows: np.ndarray
    starts: np.ndarray
    counts: np.ndarray
    edge_count: int

    @property
    def L(self) -> int:
        return int(self.rows.size)

    @classmethod
    def from_mask(cls, M: Mask) -> "RowLayout":
        if not len(M):
            empty = np.empty(0, dtype=np.int64)
            return cls(empty, empty, empty, 0)
        rows, starts, counts = np.unique(M.edges[:, 0], return_index=True, return_counts=True)
        return cls(rows, starts, counts, len(M))

    def g_values(self, values: np.ndarray, n: int, k: int) -> np.ndarray:
        """g_i = (n/k) * mean of the row's observations; ``values`` may be batched (T, |M|)."""
        v = np.asarray(values, dtype=np.float64)
        if self.L == 0:
            return np.zeros(v.shape[:-1] + (0,))
        if np.all(self.counts == self.counts[0]):
            sums = v.reshape(v.shape[:-1] + (self.L, int(self.counts[0]))).sum(axis=-1)
        else:
            sums = np.add.reduceat(v, self.starts, axis=-1)
        return (n / k) * sums / self.counts


def rect_layout(rp: RectMaskParams) -> RowLayout:
    counts = rp.row_counts
    starts = np.concatenate(([0], np.cumsum(counts)[:-1])).astype(np.int64)
    return RowLayout(np.arange(1, rp.L + 1, dtype=np.int64), starts, counts, rp.edge_count)


def g_values(values: np.ndarray, rp: RectMaskParams, params: ProblemParams) -> np.ndarray:
    """g_i = (n/k) * (1/R) * sum_j Y_ij for each row; ``values`` may be batched (T, |M|)."""
    return rect_layout(rp).g_values(values, params.n, params.k)


def f_batch(values: np.ndarray, layout: "RowLayout | RectMaskParams", tau: ThresholdPolynomial,
            params: ProblemParams) -> np.ndarray:
    """Statistic f = sum_i tau(g_i) for a batch of observation vectors."""
    if isinstance(layout, RectMaskParams):
        layout = rect_layout(layout)
    g = layout.g_values(values, params.n, params.k)
    return np.asarray(tau(g)).sum(axis=-1)


def midpoint_threshold(rp: "RowLayout | RectMaskParams", params: ProblemParams) -> float:
    """L k / (2n): halfway between the null mean (about 0) and the planted mean (about L k / n)."""
    return rp.L * params.k / (2 * params.n)


def _check_mask(Y: MaskedGraph, rp: RectMaskParams) -> None:
    if Y.mask.n != rp.n or len(Y.mask) != rp.edge_count or not np.array_equal(
            Y.mask.edges, rp.build_mask().edges):
        raise InvalidParametersError("observation mask does not match the rectangle")


def f_stat(Y: MaskedGraph, rp: RectMaskParams, tau: ThresholdPolynomial,
           params: ProblemParams, threshold: float | None = None) -> DetectionOutcome:
    """f(Y) = sum over rows of tau(g_i(Y))."""
    _check_mask(Y, rp)
    g = g_values(Y.values, rp, params)
    stat = float(np.asarray(tau(g)).sum())
    thr = midpoint_threshold(rp, params) if threshold is None else threshold
    return DetectionOutcome(stat, thr, "planted" if stat > thr else "null", g)


def detect(Y: MaskedGraph, rp: RectMaskParams, tau: ThresholdPolynomial,
           params: ProblemParams, threshold: float | None = None) -> DetectionOutcome:
    """Planted iff f(Y) > threshold (default L k / (2n))."""
    return f_stat(Y, rp, tau, params, threshold)


BASELINE_MAX_N = 6000


def baseline_degree_count(G: np.ndarray, params: ProblemParams, c: float = 1.0,
                          max_n: int = BASELINE_MAX_N) -> DetectionOutcome:
    """Max-degree test on a fully observed ±1 adjacency matrix.

    Planted iff the largest degree exceeds n/2 + c sqrt(n ln n).
    """
    n = params.n
    if n > max_n:
        raise ResourceLimitError(f"baseline needs the full graph; n={n} exceeds cap {max_n}")
    A = np.asarray(G)
    if A.shape != (n, n):
        raise InvalidParametersError(f"adjacency must be {n}x{n}")
    deg = (A == 1).sum(axis=1)
    stat = float(deg.max()) if n else 0.0
    thr = n / 2 + c * math.sqrt(n * math.log(n)) if n > 1 else 0.0
    return DetectionOutcome(stat, thr, "planted" if stat > thr else "null", deg.astype(np.float64))
