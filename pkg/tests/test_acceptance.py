"""Acceptance criteria 1-10.

Each test prints one ``[PASS]`` or ``[FAIL]`` line (collected into the
terminal summary by conftest) and then asserts. Run directly with
``python tests/test_acceptance.py`` to get just the lines.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from planted_clique.cli import main as cli_main
from planted_clique.core import Mask, ProblemParams, RngStream
from planted_clique.detector import rect_mask, tau_poly
from planted_clique.harness import ExperimentConfig, random_mask, row_moments, run_experiment
from planted_clique.ldub import analytic_vertex_bound, certify_hardness, ldub_exact, ldub_mc
from planted_clique.mask_ops import donate, reduce_mask, vertex_bound

RESULTS: list[str] = []


def verdict(number, ok: bool, summary: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {summary}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def rand_mask(rng, n, density):
    i, j = np.triu_indices(n, 1)
    keep = rng.random(i.size) < density
    return Mask(n, np.column_stack((i[keep] + 1, j[keep] + 1)))


def tiny_instances(seed, count, min_edges=1):
    """(params, mask) pairs with n <= 8, k in {2, 3}, D in 1..3 and a nonempty mask."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(3, 9))
        M = rand_mask(rng, n, rng.uniform(0.1, 0.8))
        if len(M) < min_edges:
            continue
        k = int(rng.integers(2, 4))
        if k > n:
            continue
        out.append((ProblemParams(n, k, D=int(rng.integers(1, 4))), M))
    return out


def capped_mask(rng, t):
    """Random sparse mask with max degree <= 2t, usually large enough to need reduction."""
    m = int(rng.integers(6, 16))
    n = int(rng.integers(2 * m, 2 * m + 10))
    perm = rng.permutation(n) + 1
    edges = {tuple(sorted(perm[2 * i: 2 * i + 2].tolist())) for i in range(m)}
    deg = np.zeros(n + 1, dtype=int)
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    for _ in range(int(rng.integers(0, m // 2 + 1))):
        a, b = (int(x) for x in rng.integers(1, n + 1, 2))
        e = (min(a, b), max(a, b))
        if a != b and e not in edges and deg[a] < 2 * t and deg[b] < 2 * t:
            edges.add(e)
            deg[a] += 1
            deg[b] += 1
    return Mask.from_pairs(n, sorted(edges))


def test_criterion_01_donation_conservation():
    rng = np.random.default_rng(1)
    cases = []
    while len(cases) < 1000:
        n = int(rng.integers(3, 51))
        M = rand_mask(rng, n, rng.uniform(0.02, 0.5))
        if M.vertices.size < 2:
            continue
        v, u = (int(x) for x in rng.choice(M.vertices, 2, replace=False))
        cases.append((M, v, u))
    start = time.perf_counter()
    bad = 0
    for M, v, u in cases:
        out = donate(M, v, u)
        before, after = set(M.vertices.tolist()), set(out.vertices.tolist())
        bad += len(out) != len(M) or after not in (before, before - {v})
    elapsed = time.perf_counter() - start
    verdict(1, bad == 0 and elapsed < 1.0,
            f"{1000 - bad}/1000 donations conserve edges and vertices, {elapsed:.2f}s (limit 1s)")


def test_criterion_02_donation_monotonicity():
    rng = np.random.default_rng(2)
    start = time.perf_counter()
    violations = checked = 0
    for p, M in tiny_instances(2, 200, min_edges=2):
        if M.vertices.size < 2:
            continue
        v, u = (int(x) for x in rng.choice(M.vertices, 2, replace=False))
        before = ldub_exact(p, M).value
        after = ldub_exact(p, donate(M, v, u)).value
        assert isinstance(before, Fraction)
        violations += before > after
        checked += 1
    elapsed = time.perf_counter() - start
    verdict(2, violations == 0 and checked == 200 and elapsed < 60,
            f"{checked - violations}/{checked} exact comparisons LDUB(M) <= LDUB(Donate(M)), "
            f"{elapsed:.1f}s (limit 60s)")


def test_criterion_03_reduction_contract():
    rng = np.random.default_rng(3)
    start = time.perf_counter()
    failures = stepped = 0
    for _ in range(100):
        t = int(rng.integers(2, 4))
        M = capped_mask(rng, t)
        out, trace = reduce_mask(M, t)
        ok = (out.max_degree <= 2 * t and len(out) == len(M)
              and out.vertices.size <= vertex_bound(len(M), t))
        # instances are tiny in k and D, so exact LDUB stays cheap even with ~30 vertices
        p = ProblemParams(M.n, int(rng.integers(2, 4)), D=int(rng.integers(1, 4)))
        ok = ok and ldub_exact(p, M).value <= ldub_exact(p, out).value
        stepped += bool(trace.steps)
        failures += not ok
    elapsed = time.perf_counter() - start
    verdict(3, failures == 0 and elapsed < 60,
            f"{100 - failures}/100 reductions meet the contract ({stepped} needed at least one "
            f"removal), exact LDUB never decreased, {elapsed:.1f}s (limit 60s)")


def test_criterion_04_exact_mc_agreement():
    start = time.perf_counter()
    within = 0
    for idx, (p, M) in enumerate(tiny_instances(4, 50)):
        exact = float(ldub_exact(p, M).value)
        mc = ldub_mc(p, M, trials=10**6, rng=RngStream(4, idx))
        within += abs(mc.value - exact) <= 3 * mc.std_error
    elapsed = time.perf_counter() - start
    verdict(4, within >= 47 and elapsed < 120,
            f"{within}/50 MC estimates (10^6 trials) within 3 std errors of exact (need 47), "
            f"{elapsed:.1f}s (limit 120s)")


def test_criterion_05_analytic_dominance():
    start = time.perf_counter()
    worst = -math.inf
    instances = tiny_instances(5, 200)
    for p, M in instances:
        exact = float(ldub_exact(p, M).value)
        bound = analytic_vertex_bound(p, M.vertices.size).value
        worst = max(worst, exact - bound)
    spot = analytic_vertex_bound(ProblemParams(10**4, 100, D=1), 100).value
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and abs(spot - 1.14222) <= 1e-5 and elapsed < 60
    verdict(5, ok, f"max(exact - bound) = {worst:.3g} over {len(instances)} instances; "
                   f"spot value {spot:.6f} (want 1.14222 +- 1e-5), {elapsed:.1f}s")


def test_criterion_06_certificate():
    start = time.perf_counter()
    p = ProblemParams(10**6, 3162, D=6)
    full = random_mask(p.n, 1000, RngStream(6))
    order = RngStream(6, 1).generator().permutation(len(full))
    cert = certify_hardness(p, full)
    conds = []
    for m in (1000, 700, 500, 300, 100, 30, 10, 1):
        conds.append(certify_hardness(p, Mask(p.n, full.edges[np.sort(order[:m])])).cond_bound)
    elapsed = time.perf_counter() - start
    monotone = all(a >= b for a, b in zip(conds, conds[1:]))
    ok = (cert.prob_bound >= 1 - 1 / math.log(1e6) and 1.0 <= cert.cond_bound <= 1.35
          and monotone and elapsed < 1.0)
    verdict(6, ok, f"prob_bound {cert.prob_bound:.4f} (>= 0.9276), cond_bound {cert.cond_bound:.4f} "
                   f"(in [1, 1.35]), cond over |M| = 1000..1: "
                   f"{', '.join(f'{c:.4f}' for c in conds)}, {elapsed:.2f}s (limit 1s)")


def test_criterion_07_tau():
    start = time.perf_counter()
    identities = True
    for ell in range(31):
        tau = tau_poly(ell)
        total = [a + b for a, b in zip(tau.coefficients, tau.reflected())]
        identities &= (tau.exact(0) == 0 and tau.exact(1) == 1
                       and total == [1] + [0] * (2 * ell + 1))
    worst = -math.inf
    for ell in range(31):
        tau = tau_poly(ell)
        for b in (0, 1):
            for i in range(1, 11):
                D = 0.05 * i
                ys = np.linspace(b - D, b + D, 101)
                err = np.abs(np.asarray(tau(ys)) - b)
                worst = max(worst, float((err - (ell + 0.5) * (6 * D) ** ell).max()))
    elapsed = time.perf_counter() - start
    verdict(7, identities and worst <= 1e-10 and elapsed < 10,
            f"coefficient identities {'hold' if identities else 'FAIL'} for ell <= 30; "
            f"max(|tau(y) - b| - bound) = {worst:.3g} (tolerance 1e-10), {elapsed:.1f}s")


def _row_mmse(n, k, R):
    """Bayes-optimal E_P[(h(row sum) - K_1)^2] over all functions h of row 1's observations."""
    pi = k / n
    f0 = np.zeros(2 * R + 1)
    f1 = np.zeros(2 * R + 1)
    f0[2 * np.arange(R + 1)] = stats.binom.pmf(np.arange(R + 1), R, 0.5)
    clique_cols = stats.hypergeom(n - 1, k - 1, R)
    for c in range(R + 1):
        w = clique_cols.pmf(c)
        if w < 1e-300:
            continue
        m = R - c
        f1[c + 2 * np.arange(m + 1) - m + R] += w * stats.binom.pmf(np.arange(m + 1), m, 0.5)
    mix = pi * f1 + (1 - pi) * f0
    post = np.divide(pi * f1, mix, out=np.zeros_like(mix), where=mix > 0)
    return float((mix * post * (1 - post)).sum())


def test_criterion_08_second_moments():
    start = time.perf_counter()
    p = ProblemParams.from_exponents(2**16, 0.3, 0.8)
    mom = row_moments(ExperimentConfig(p, trials=10**4, master_seed=8, workers=4))
    target = 0.1 * mom["scale"]
    rp, _ = rect_mask(p)
    floor = _row_mmse(p.n, p.k, rp.R)
    elapsed = time.perf_counter() - start
    ok = mom["null"] <= target and mom["planted"] <= target and elapsed < 300
    verdict(8, ok, f"E_Q[tau(g1)^2] = {mom['null']:.4g}, E_P[(tau(g1)-K1)^2] = {mom['planted']:.4g}, "
                   f"target 0.1(k/n)^2 = {target:.4g} (ell={mom['ell']}, R={rp.R}); no function of "
                   f"row 1 can get E_P below the Bayes MSE {floor:.4g}, {elapsed:.1f}s")


def _oracle_ceiling(L, pi):
    """sep and midpoint accuracy of the ideal statistic sum_i K_i that f is built to emulate."""
    sep = L * pi / math.sqrt(L * pi * (1 - pi))
    acc = 0.5 * (1 + stats.binom.sf(math.floor(L * pi / 2), L, pi))
    return sep, acc


def test_criterion_09a_phase_transition_easy_side():
    start = time.perf_counter()
    p = ProblemParams.from_exponents(2**16, 0.3, 0.8)
    rep = run_experiment(ExperimentConfig(p, trials=200, master_seed=9, workers=4))
    rp, _ = rect_mask(p)
    sep_c, acc_c = _oracle_ceiling(rp.L, p.k / p.n)
    elapsed = time.perf_counter() - start
    ok = rep.accuracy >= 0.95 and rep.sep_ratio >= 3 and elapsed < 600
    verdict("9 (gamma=0.8)", ok,
            f"accuracy {rep.accuracy:.3f} (need >= 0.95), sep_ratio {rep.sep_ratio:.3g} (need >= 3) "
            f"with L={rp.L}, R={rp.R}, ell={rp.ell}; even exact clique indicators give sep "
            f"{sep_c:.2f}, accuracy {acc_c:.3f}, {elapsed:.1f}s")


def test_criterion_09b_phase_transition_hard_side():
    start = time.perf_counter()
    p = ProblemParams.from_exponents(2**16, 0.3, 0.4)
    rep = run_experiment(ExperimentConfig(p, trials=200, master_seed=9, workers=4))
    elapsed = time.perf_counter() - start
    ok = rep.accuracy <= 0.65 and rep.sep_ratio <= 1 and elapsed < 600
    verdict("9 (gamma=0.4)", ok,
            f"budget-matched truncated rectangle with {rep.mask_edges} edges: accuracy "
            f"{rep.accuracy:.3f} (need <= 0.65), sep_ratio {rep.sep_ratio:.3g} (need <= 1), "
            f"{elapsed:.1f}s")


def test_criterion_10_reproducibility(tmp_path, capsys):
    start = time.perf_counter()
    commands = {
        "run": ["run", "--n", "10000", "--delta", "0.25", "--gamma", "0.9", "--trials", "200"],
        "run-random": ["run", "--n", "10000", "--delta", "0.25", "--gamma", "0.6", "--trials", "200",
                       "--mask-source", "random", "--threshold-mode", "null-quantile"],
        "sweep": ["sweep", "--n", "4000", "--deltas", "0.15,0.3", "--gammas", "0.5,0.9,1.2",
                  "--trials", "50"],
    }
    identical = True
    for name, argv in commands.items():
        outputs = set()
        for threads in (1, 2, 3, 8):
            path = tmp_path / f"{name}-{threads}.csv"
            assert cli_main(["--seed", "2024", "--threads", str(threads), "--out", str(path), *argv]) == 0
            outputs.add(path.read_bytes())
        identical &= len(outputs) == 1
    capsys.readouterr()
    elapsed = time.perf_counter() - start
    verdict(10, identical and elapsed < 60,
            f"run, random-mask run and sweep CSVs byte-identical across --threads 1/2/3/8, "
            f"{elapsed:.1f}s (limit 60s)")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
