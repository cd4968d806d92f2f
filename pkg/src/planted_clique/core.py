"""Problem parameters, masks, and exact samplers for the null and planted models.

Vertices are 1-based throughout (``1..n``). Edges are stored canonically as
``(min, max)`` rows of an int64 array sorted lexicographically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import InvalidParametersError
from .kernels import KERNELS


def boundary_gamma(delta: float) -> float:
    """3(1/2 - delta), rounded to 12 places so grid points such as (0.2, 0.9) land on it exactly."""
    return round(3 * (0.5 - delta), 12)


def default_degree(n: int) -> int:
    """ceil((ln n)^2 / ln ln n), a concrete o(log^2 n) degree; 1 when n < 3."""
    if n < 3:
        return 1
    return math.ceil(math.log(n) ** 2 / math.log(math.log(n)))


@dataclass(frozen=True)
class ProblemParams:
    n: int
    k: int
    delta: float | None = None
    gamma: float | None = None
    D: int | None = None
    ell: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParametersError(f"n must be positive, got {self.n}")
        if not 1 <= self.k <= self.n:
            raise InvalidParametersError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if self.D is not None and self.D < 0:
            raise InvalidParametersError(f"D must be non-negative, got {self.D}")
        if self.ell is not None and self.ell < 0:
            raise InvalidParametersError(f"ell must be non-negative, got {self.ell}")
        if self.delta is None and self.n > 1:
            object.__setattr__(self, "delta", math.log(self.k) / math.log(self.n) - 0.5)
        if self.D is None:
            object.__setattr__(self, "D", default_degree(self.n))

    @classmethod
    def from_exponents(cls, n: int, delta: float, gamma: float, D: int | None = None,
                       ell: int | None = None) -> "ProblemParams":
        """k = round(n^(1/2 + delta)); the mask budget is round(n^gamma)."""
        k = max(1, min(n, round(n ** (0.5 + delta))))
        return cls(n=n, k=k, delta=delta, gamma=gamma, D=D, ell=ell)

    @property
    def mask_budget(self) -> int:
        if self.gamma is None:
            raise InvalidParametersError("gamma is not set")
        return round(self.n ** self.gamma)

    @property
    def boundary_gamma(self) -> float:
        return boundary_gamma(self.delta)

    @property
    def epsilon(self) -> float:
        """gamma - 3(1/2 - delta); NaN when gamma is unset."""
        if self.gamma is None:
            return math.nan
        return round(self.gamma - self.boundary_gamma, 12)

    def replace(self, **changes) -> "ProblemParams":
        values = dict(n=self.n, k=self.k, delta=self.delta, gamma=self.gamma, D=self.D, ell=self.ell)
        values.update(changes)
        return ProblemParams(**values)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Mask:
    """A set of unordered vertex pairs over the ground set ``1..n``."""

    n: int
    edges: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            if (e < 1).any() or (e > self.n).any():
                raise InvalidParametersError(f"edge endpoint outside [1, {self.n}]")
            if (e[:, 0] == e[:, 1]).any():
                raise InvalidParametersError("self-loops are not allowed")
            e = np.sort(e, axis=1)
            e = e[np.lexsort((e[:, 1], e[:, 0]))]
            if (np.diff(e, axis=0) == 0).all(axis=1).any():
                raise InvalidParametersError("duplicate edge")
        object.__setattr__(self, "edges", _frozen(np.ascontiguousarray(e)))

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Sequence[int]]) -> "Mask":
        return cls(n, np.array(list(pairs), dtype=np.int64).reshape(-1, 2))

    @classmethod
    def empty(cls, n: int) -> "Mask":
        return cls(n, np.empty((0, 2), dtype=np.int64))

    def __len__(self) -> int:
        return self.edges.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mask):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))

    def __repr__(self) -> str:
        return f"Mask(n={self.n}, edges={len(self)})"

    @cached_property
    def degree(self) -> np.ndarray:
        """Length ``n + 1`` array; ``degree[v]`` is the mask degree of v (index 0 unused)."""
        return _frozen(np.bincount(self.edges.ravel(), minlength=self.n + 1).astype(np.int64))

    @cached_property
    def vertices(self) -> np.ndarray:
        """V(M): sorted vertices of positive degree."""
        return _frozen(np.flatnonzero(self.degree))

    @property
    def max_degree(self) -> int:
        return int(self.degree.max()) if len(self) else 0

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in self.edges}

    def neighbors(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {}
        for a, b in self.edges.tolist():
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        return adj


@dataclass(frozen=True, eq=False)
class CliqueIndicator:
    n: int
    members: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.sort(np.asarray(self.members, dtype=np.int64).ravel())
        object.__setattr__(self, "members", _frozen(m))

    @property
    def k(self) -> int:
        return self.members.size

    def indicator(self) -> np.ndarray:
        """Boolean array of length ``n + 1``; entry ``v`` is True for clique vertices."""
        ind = np.zeros(self.n + 1, dtype=bool)
        ind[self.members] = True
        return ind

    def __eq__(self, other) -> bool:
        if not isinstance(other, CliqueIndicator):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.members, other.members)

    def __repr__(self) -> str:
        return f"CliqueIndicator(n={self.n}, members={self.members.tolist()})"


@dataclass(frozen=True, eq=False)
class MaskedGraph:
    """±1 observations aligned with ``mask.edges``."""

    mask: Mask
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.int8).ravel()
        if v.size != len(self.mask):
            raise InvalidParametersError("one value per mask edge is required")
        if v.size and not np.isin(v, (-1, 1)).all():
            raise InvalidParametersError("observations must be +1 or -1")
        object.__setattr__(self, "values", _frozen(v))

    def as_dict(self) -> dict[tuple[int, int], int]:
        return {(int(a), int(b)): int(x) for (a, b), x in zip(self.mask.edges, self.values)}


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream (Philox) keyed by ``(master_seed, stream_index)``.

    ``generator()`` always restarts the stream, so a sampler handed an
    ``RngStream`` is a pure function of it.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if self.stream_index < 0:
            raise InvalidParametersError("stream_index must be non-negative")

    def generator(self, *sub: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed & (2**64 - 1),
                                    spawn_key=(self.stream_index, *sub))
        return np.random.Generator(np.random.Philox(ss))


RngLike = Union[RngStream, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


def _subset_array(n: int, S) -> np.ndarray:
    if S is None:
        return np.arange(1, n + 1, dtype=np.int64)
    s = np.unique(np.asarray(list(S) if not isinstance(S, np.ndarray) else S, dtype=np.int64))
    if s.size and (s[0] < 1 or s[-1] > n):
        raise InvalidParametersError(f"subset has vertices outside [1, {n}]")
    return s


def draw_k_subsets(gen: np.random.Generator, pool: np.ndarray, k: int, trials: int) -> np.ndarray:
    """``trials`` independent uniform k-subsets of ``pool`` (rows, unsorted)."""
    s = pool.size
    if k > s:
        raise InvalidParametersError(f"k={k} exceeds subset size {s}")
    if k == 0:
        return np.empty((trials, 0), dtype=np.int64)
    swaps = gen.integers(np.arange(k, dtype=np.int64), s, size=(trials, k), dtype=np.int64)
    return KERNELS.partial_shuffle(pool, swaps)


def sample_clique(n: int, k: int, S=None, rng: RngLike = None) -> CliqueIndicator:
    """Uniform k-subset of S (default ``1..n``) by partial Fisher-Yates."""
    pool = _subset_array(n, S)
    if k < 0 or k > pool.size:
        raise InvalidParametersError(f"k={k} must satisfy 0 <= k <= |S|={pool.size}")
    gen = as_generator(rng if rng is not None else np.random.default_rng())
    return CliqueIndicator(n, draw_k_subsets(gen, pool, k, 1)[0])


def _coin_values(gen: np.random.Generator, size) -> np.ndarray:
    return (gen.integers(0, 2, size=size, dtype=np.int8) * 2 - 1).astype(np.int8)


def sample_null(M: Mask, rng: RngLike) -> MaskedGraph:
    """One draw of G(n, M): independent fair ±1 per mask edge."""
    gen = as_generator(rng)
    return MaskedGraph(M, _coin_values(gen, len(M)))


def plant(values: np.ndarray, M: Mask, K: CliqueIndicator) -> np.ndarray:
    """Overwrite with +1 every edge whose endpoints are both in K."""
    ind = K.indicator()
    out = np.array(values, dtype=np.int8, copy=True)
    if len(M):
        out[ind[M.edges[:, 0]] & ind[M.edges[:, 1]]] = 1
    return out


def sample_planted(params: ProblemParams, M: Mask, S=None,
                   rng: RngLike = None) -> tuple[MaskedGraph, CliqueIndicator]:
    """One draw of G(n, k, M), with the clique optionally confined to S."""
    if M.n != params.n:
        raise InvalidParametersError(f"mask ground set {M.n} != n={params.n}")
    gen = as_generator(rng if rng is not None else np.random.default_rng())
    K = sample_clique(params.n, params.k, S, gen)
    values = plant(_coin_values(gen, len(M)), M, K)
    return MaskedGraph(M, values), K


def full_mask(n: int) -> Mask:
    i, j = np.triu_indices(n, 1)
    return Mask(n, np.column_stack((i + 1, j + 1)))


def sample_adjacency(params: ProblemParams, planted: bool, rng: RngLike) -> np.ndarray:
    """Full ±1 symmetric adjacency matrix (zero diagonal) of G(n,1/2) or G(n,1/2,k)."""
    gen = as_generator(rng)
    n = params.n
    upper = np.triu(_coin_values(gen, (n, n)), 1)
    if planted:
        K = sample_clique(n, params.k, None, gen)
        idx = K.members - 1
        upper[np.ix_(idx, idx)] = np.triu(np.ones((idx.size, idx.size), dtype=np.int8), 1)
    return upper + upper.T
