"""Separation experiments, phase-diagram sweeps, and their CSV/JSON/SVG reports.

Every trial draws from its own ``RngStream(master_seed, j)``: even j are null
draws and odd j are planted draws. Results are therefore a pure function of
the configuration and seed, independent of how trials are split across
worker threads.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .core import Mask, ProblemParams, boundary_gamma, RngStream, plant, sample_clique, sample_null
from .detector import RowLayout, default_ell, detector_mask, f_batch, midpoint_threshold, tau_poly
from .errors import InvalidParametersError, PlantedCliqueError
from .ldub import certify_hardness
from .maskio import load_mask

CSV_COLUMNS = ("delta", "gamma", "n", "k", "mask_edges", "trials", "mean_null", "mean_planted",
               "var_null", "var_planted", "sep_ratio", "accuracy", "boundary_gamma", "cond_bound",
               "prob_bound", "error")

CALIBRATION_SAMPLES = 1000
# sub-stream keys; trials use the bare stream
_MASK_KEY = 1
_CALIBRATION_KEY = 2


@dataclass(frozen=True)
class ExperimentConfig:
    """``mask_source`` is "rectangular", "random", or a path to a mask file.

    ``threshold_mode`` is "midpoint" (L k / 2n) or "null-quantile", which uses
    the empirical (1 - alpha) quantile of f over a null calibration run.
    """

    params: ProblemParams
    mask_source: str = "rectangular"
    trials: int = 100
    master_seed: int = 0
    threshold_mode: str = "midpoint"
    alpha: float = 0.05
    ell: int | None = None
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidParametersError(f"trials must be at least 1, got {self.trials}")
        if self.threshold_mode not in ("midpoint", "null-quantile"):
            raise InvalidParametersError(f"unknown threshold mode {self.threshold_mode!r}")
        if not 0 < self.alpha < 1:
            raise InvalidParametersError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.workers < 1:
            raise InvalidParametersError(f"workers must be at least 1, got {self.workers}")
        if not 0 <= self.master_seed < 2**64:
            raise InvalidParametersError("master_seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class SeparationReport:
    delta: float | None
    gamma: float | None
    n: int
    k: int | None
    mask_edges: int | None
    trials: int
    mean_null: float | None = None
    mean_planted: float | None = None
    var_null: float | None = None
    var_planted: float | None = None
    sep_ratio: float | None = None
    accuracy: float | None = None
    boundary_gamma: float | None = None
    cond_bound: float | None = None
    prob_bound: float | None = None
    error: str = ""
    threshold: float | None = field(default=None, compare=False)
    f_null: np.ndarray | None = field(default=None, repr=False, compare=False)
    f_planted: np.ndarray | None = field(default=None, repr=False, compare=False)

    def row(self) -> dict:
        return {c: getattr(self, c) for c in CSV_COLUMNS}


def random_mask(n: int, m: int, rng) -> Mask:
    """m distinct pairs drawn uniformly from all C(n, 2) pairs."""
    total = n * (n - 1) // 2
    if not 0 <= m <= total:
        raise InvalidParametersError(f"cannot place {m} edges on {n} vertices")
    gen = rng.generator(_MASK_KEY) if isinstance(rng, RngStream) else rng
    idx = np.sort(gen.choice(total, size=m, replace=False)).astype(np.int64)
    # row i (0-based) owns pair indices [offset[i], offset[i] + n - 1 - i)
    rows = np.arange(n, dtype=np.int64)
    offset = rows * n - rows * (rows + 1) // 2
    i = np.searchsorted(offset, idx, side="right") - 1
    j = idx - offset[i] + i + 1
    return Mask(n, np.column_stack((i + 1, j + 1)))


def build_mask(cfg: ExperimentConfig) -> tuple[Mask, RowLayout, int]:
    """Mask, its row layout, and the threshold-polynomial degree used with it."""
    p = cfg.params
    if cfg.mask_source == "rectangular":
        rp, M = detector_mask(p, cfg.ell)
        return M, RowLayout.from_mask(M), rp.ell
    if cfg.mask_source == "random":
        M = random_mask(p.n, p.mask_budget, RngStream(cfg.master_seed, 0))
    else:
        M = load_mask(cfg.mask_source)
        if M.n != p.n:
            raise InvalidParametersError(f"mask file declares n={M.n}, config has n={p.n}")
    ell = cfg.ell if cfg.ell is not None else default_ell(p)
    return M, RowLayout.from_mask(M), ell


def _draw_values(M: Mask, params: ProblemParams, stream: RngStream, planted: bool):
    if not planted:
        return sample_null(M, stream).values, None
    gen = stream.generator()
    K = sample_clique(params.n, params.k, None, gen)
    coins = sample_null(M, gen).values
    return plant(coins, M, K), K


def _blocks(count: int, workers: int) -> list[range]:
    size = max(1, -(-count // workers))
    return [range(a, min(a + size, count)) for a in range(0, count, size)]


def _parallel_map(fn, count: int, workers: int) -> np.ndarray:
    """fn(range) -> array, evaluated on contiguous blocks and concatenated in order."""
    blocks = _blocks(count, workers)
    if workers == 1 or len(blocks) == 1:
        parts = [fn(b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fn, blocks))
    return np.concatenate(parts) if parts else np.empty(0)


def _trial_statistics(cfg: ExperimentConfig, M: Mask, layout: RowLayout, tau) -> np.ndarray:
    p = cfg.params

    def block(js: range) -> np.ndarray:
        vals = np.empty((len(js), len(M)), dtype=np.int8)
        for r, j in enumerate(js):
            vals[r], _ = _draw_values(M, p, RngStream(cfg.master_seed, j), planted=j % 2 == 1)
        return f_batch(vals, layout, tau, p)

    return _parallel_map(block, 2 * cfg.trials, cfg.workers)


def calibrate_threshold(cfg: ExperimentConfig, M: Mask, layout: RowLayout, tau) -> float:
    p = cfg.params

    def block(js: range) -> np.ndarray:
        vals = np.empty((len(js), len(M)), dtype=np.int8)
        for r, j in enumerate(js):
            vals[r] = sample_null(M, RngStream(cfg.master_seed, j).generator(_CALIBRATION_KEY)).values
        return f_batch(vals, layout, tau, p)

    f = _parallel_map(block, CALIBRATION_SAMPLES, cfg.workers)
    return float(np.quantile(f, 1 - cfg.alpha))


def separation_ratio(mean_null: float, mean_planted: float, var_null: float, var_planted: float) -> float:
    gap = abs(mean_planted - mean_null)
    spread = max(var_null, var_planted)
    if spread > 0:
        return gap / math.sqrt(spread)
    return 0.0 if gap == 0 else math.inf


def run_experiment(cfg: ExperimentConfig) -> SeparationReport:
    """Monte Carlo estimate of the detector's separation on G(n, M) versus G(n, k, M)."""
    p = cfg.params
    M, layout, ell = build_mask(cfg)
    tau = tau_poly(ell)
    f = _trial_statistics(cfg, M, layout, tau)
    f_null, f_planted = f[0::2], f[1::2]
    if cfg.threshold_mode == "midpoint":
        thr = midpoint_threshold(layout, p)
    else:
        thr = calibrate_threshold(cfg, M, layout, tau)
    ddof = 1 if cfg.trials > 1 else 0
    mean_null, mean_planted = float(f_null.mean()), float(f_planted.mean())
    var_null, var_planted = float(f_null.var(ddof=ddof)), float(f_planted.var(ddof=ddof))
    correct = int((f_planted > thr).sum()) + int((f_null <= thr).sum())
    cond = prob = None
    if p.delta is not None and p.epsilon < 0:
        cert = certify_hardness(p, M)
        cond, prob = cert.cond_bound, cert.prob_bound
    return SeparationReport(
        delta=p.delta, gamma=p.gamma, n=p.n, k=p.k, mask_edges=len(M), trials=cfg.trials,
        mean_null=mean_null, mean_planted=mean_planted, var_null=var_null, var_planted=var_planted,
        sep_ratio=separation_ratio(mean_null, mean_planted, var_null, var_planted),
        accuracy=correct / (2 * cfg.trials),
        boundary_gamma=p.boundary_gamma if p.delta is not None else None,
        cond_bound=cond, prob_bound=prob, threshold=thr, f_null=f_null, f_planted=f_planted)


def row_moments(cfg: ExperimentConfig) -> dict:
    """Second moments of the first row's term: E_Q[tau(g_1)^2] and E_P[(tau(g_1) - K_1)^2].

    Uses the same trial streams as ``run_experiment``; K_1 indicates whether
    the first row vertex lies in the planted clique.
    """
    p = cfg.params
    M, layout, ell = build_mask(cfg)
    if layout.L == 0:
        raise InvalidParametersError("mask has no rows")
    tau = tau_poly(ell)
    row = int(layout.rows[0])
    first = slice(int(layout.starts[0]), int(layout.starts[0] + layout.counts[0]))
    head = RowLayout(layout.rows[:1], np.zeros(1, dtype=np.int64), layout.counts[:1],
                     int(layout.counts[0]))

    def block(js: range) -> np.ndarray:
        out = np.empty(len(js))
        for r, j in enumerate(js):
            planted = j % 2 == 1
            vals, K = _draw_values(M, p, RngStream(cfg.master_seed, j), planted)
            t = float(tau(head.g_values(vals[first], p.n, p.k))[0])
            target = float(K.indicator()[row]) if planted else 0.0
            out[r] = (t - target) ** 2
        return out

    sq = _parallel_map(block, 2 * cfg.trials, cfg.workers)
    return {"null": float(sq[0::2].mean()), "planted": float(sq[1::2].mean()),
            "scale": (p.k / p.n) ** 2, "ell": ell, "row": row, "row_edges": int(layout.counts[0])}


def sweep_params(base: ProblemParams, delta: float, gamma: float) -> ProblemParams:
    return ProblemParams.from_exponents(base.n, delta, gamma, D=base.D, ell=base.ell)


def phase_sweep(grid: Sequence[tuple[float, float]], base_cfg: ExperimentConfig) -> list[SeparationReport]:
    """One report per (delta, gamma) grid point, in grid order; failures land in ``error``."""
    if not grid:
        raise InvalidParametersError("grid must be nonempty")
    reports = []
    for delta, gamma in grid:
        try:
            params = sweep_params(base_cfg.params, delta, gamma)
            reports.append(run_experiment(replace(base_cfg, params=params)))
        except PlantedCliqueError as exc:
            reports.append(SeparationReport(
                delta=delta, gamma=gamma, n=base_cfg.params.n, k=None, mask_edges=None,
                trials=base_cfg.trials, boundary_gamma=boundary_gamma(delta),
                error=f"{type(exc).__name__}: {exc}"))
    return reports


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def reports_to_csv(reports: Iterable[SeparationReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow([_cell(v) for v in r.row().values()])
    return buf.getvalue()


def _json_value(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def reports_to_json(reports: Iterable[SeparationReport]) -> str:
    rows = [{c: _json_value(v) for c, v in r.row().items()} for r in reports]
    return json.dumps(rows, indent=2) + "\n"


def _color(acc: float | None) -> str:
    # 0.5 (chance) -> white, 1.0 -> dark blue; errors grey
    if acc is None or not math.isfinite(acc):
        return "#bbbbbb"
    a = min(1.0, max(0.0, (acc - 0.5) * 2))
    r = round(255 - a * (255 - 33))
    g = round(255 - a * (255 - 102))
    b = round(255 - a * (255 - 172))
    return f"#{r:02x}{g:02x}{b:02x}"


def render_svg(reports: Sequence[SeparationReport], width: int = 480, height: int = 360) -> str:
    """Heat map of accuracy over (gamma, delta) with the line gamma = 3(1/2 - delta)."""
    gammas = sorted({r.gamma for r in reports})
    deltas = sorted({r.delta for r in reports})
    pad = 50
    pw, ph = width - 2 * pad, height - 2 * pad

    def span(vals):
        lo, hi = vals[0], vals[-1]
        step = min((b - a for a, b in zip(vals, vals[1:])), default=1.0)
        return lo - step / 2, hi + step / 2, step

    g0, g1, gs = span(gammas)
    d0, d1, ds = span(deltas)

    def x(g):
        return pad + (g - g0) / (g1 - g0) * pw

    def y(d):
        return pad + ph - (d - d0) / (d1 - d0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>']
    for r in reports:
        cx, cy = x(r.gamma - gs / 2), y(r.delta + ds / 2)
        out.append(f'<rect x="{cx:.2f}" y="{cy:.2f}" width="{pw * gs / (g1 - g0):.2f}" '
                   f'height="{ph * ds / (d1 - d0):.2f}" fill="{_color(r.accuracy)}">'
                   f'<title>delta={r.delta:g} gamma={r.gamma:g} accuracy={_cell(r.accuracy)}</title></rect>')
    # boundary gamma = 3(1/2 - delta), clipped to the plotted delta range
    pts = [(boundary_gamma(d), d) for d in (d0, d1)]
    out.append(f'<line x1="{x(pts[0][0]):.2f}" y1="{y(pts[0][1]):.2f}" x2="{x(pts[1][0]):.2f}" '
               f'y2="{y(pts[1][1]):.2f}" stroke="#c0392b" stroke-width="2" '
               f'clip-path="url(#plot)"/>')
    out.insert(2, f'<defs><clipPath id="plot"><rect x="{pad}" y="{pad}" width="{pw}" '
                  f'height="{ph}"/></clipPath></defs>')
    out.append(f'<rect x="{pad}" y="{pad}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for g in gammas:
        out.append(f'<text x="{x(g):.2f}" y="{pad + ph + 16}" font-size="11" '
                   f'text-anchor="middle">{g:g}</text>')
    for d in deltas:
        out.append(f'<text x="{pad - 6}" y="{y(d) + 4:.2f}" font-size="11" '
                   f'text-anchor="end">{d:g}</text>')
    out.append(f'<text x="{pad + pw / 2:.2f}" y="{height - 10}" font-size="12" '
               f'text-anchor="middle">gamma</text>')
    out.append(f'<text x="14" y="{pad + ph / 2:.2f}" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 14 {pad + ph / 2:.2f})">delta</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_text(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(os.fspath(path), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
