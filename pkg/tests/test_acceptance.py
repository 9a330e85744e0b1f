"""Acceptance gate: one test per criterion, each logging a PASS/FAIL line.

The lines are printed in the ``acceptance criteria`` section of the pytest
terminal summary.
"""

import time

import numpy as np
import pytest

import oracles
from hardylab.functionals import (
    WeightPair,
    improved_hardy_radial_pair,
    kernel_hardy_pair,
    uncertainty_pair,
    weighted_1d_hardy_pair,
)
from hardylab.functions import indicator_profile, make_family, random_smooth, tent
from hardylab.radial import RadialGrid, RadialProfile, build_log_grid, decreasing_rearrangement, weighted_integral
from hardylab.verify import (
    DEFAULT_ANGULAR,
    DEFAULT_GRID,
    TolerancePolicy,
    build_function,
    check,
    evaluate_functional,
    run_battery,
    sharpness_sweep,
)

TAU = 1e-3
CLOSED = oracles.tent_closed_form_n1_p2()


def verdict(log, k, checks):
    """Log ``criterion k`` and assert every ``(ok, description)`` in ``checks``."""
    failed = [desc for ok, desc in checks if not ok]
    status = "FAIL" if failed else "PASS"
    detail = "; ".join(failed if failed else [desc for _, desc in checks])
    log.append(f"criterion {k}: {status} {detail}")
    assert not failed, detail


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.fixture(scope="module")
def battery():
    start = time.perf_counter()
    reports = run_battery(policy=TolerancePolicy(tau_rel=TAU, refinement_check=True))
    return reports, time.perf_counter() - start


@pytest.fixture(scope="module")
def tensor_battery():
    """100 seeded random tensors at N in {2, 3}; every fifth one is radial."""
    grid = build_log_grid(*DEFAULT_GRID)
    cases = []
    for seed in range(100):
        N = 2 + seed % 2
        p = N + (0.5, 1.0, N + 1.0)[seed % 3]
        radial = seed % 5 == 0
        u = build_function(random_smooth(seed, N, p, radial), grid, DEFAULT_ANGULAR[N], True)
        cases.append((seed, N, p, radial, u))
    return cases


def test_criterion_1_layer_cake(acceptance_log):
    rng = np.random.default_rng(1)
    profiles = []
    for _ in range(1000):
        n = int(rng.integers(2, 65))
        profiles.append((rng.normal(size=n) * rng.exponential(), float(rng.choice([1.0, 1.5, 2.0, 3.0]))))
    worst, unsorted = 0.0, 0
    start = time.perf_counter()
    for values, p in profiles:
        f = RadialProfile(RadialGrid(np.arange(1.0, len(values) + 1)), values, "constant")
        fs = decreasing_rearrangement(f, m=len(values))
        unsorted += not np.array_equal(fs.values, np.sort(np.abs(values))[::-1])
        a = weighted_integral(f.with_values(np.abs(values) ** p), 0)
        b = weighted_integral(fs.with_values(fs.values**p), 0)
        worst = max(worst, rel(b, a))
    elapsed = time.perf_counter() - start
    verdict(acceptance_log, 1, [
        (worst <= 1e-12, f"max rel norm error {worst:.2e} (<= 1e-12)"),
        (unsorted == 0, f"{unsorted} of 1000 not the descending sort"),
        (elapsed < 1.0, f"runtime {elapsed:.2f}s (< 1s)"),
    ])


def test_criterion_2_kernel_lemma(acceptance_log):
    rng = np.random.default_rng(2)
    triples = []
    for _ in range(500):
        n = int(rng.integers(2, 257))
        nodes = np.cumsum(rng.uniform(0.05, 1.0, n))
        # h = r q with q a cumulative sum of nonnegative increments, so h and h/r never decrease
        q = np.cumsum(rng.exponential(1.0, n) * (rng.random(n) < 0.5)) + rng.uniform(0.1, 1.0)
        g = RadialGrid(nodes)
        weights = WeightPair(RadialProfile(g, rng.uniform(0, 2, n)), RadialProfile(g, nodes * q))
        f = RadialProfile(g, rng.normal(size=n), "constant")
        triples.append((f, weights, float(rng.uniform(1.2, 4.0))))
    start = time.perf_counter()
    pairs = [kernel_hardy_pair(f, w, p) for f, w, p in triples]
    elapsed = time.perf_counter() - start
    violations, worst = 0, 0.0
    for (f, w, p), pair in zip(triples, pairs):
        violations += not TolerancePolicy(tau_rel=TAU).accepts(pair.lhs, pair.rhs)
        F = np.cumsum(f.values * np.diff(f.grid.edges))
        K = oracles.kernel_exhaustive(F, w.h.values)
        lhs = oracles.trapezoid_loop(f.nodes.tolist(), (w.g.values * K**p).tolist())
        worst = max(worst, rel(pair.lhs, lhs) if lhs else abs(pair.lhs))
    verdict(acceptance_log, 2, [
        (violations == 0, f"{violations} of 500 violate lhs <= rhs (tau_rel 1e-3)"),
        (worst <= 1e-12, f"max rel deviation from exhaustive oracle {worst:.2e} (<= 1e-12)"),
        (elapsed < 10.0, f"runtime {elapsed:.2f}s (< 10s)"),
    ])


def test_criterion_3_weighted_indicator(acceptance_log):
    start = time.perf_counter()
    pair = weighted_1d_hardy_pair(indicator_profile(build_log_grid(*DEFAULT_GRID), 1.0), 1, 2)
    elapsed = time.perf_counter() - start
    verdict(acceptance_log, 3, [
        (rel(pair.lhs, 2.0) <= 1e-2, f"lhs {pair.lhs:.6f} (2 +/- 1%)"),
        (abs(pair.rhs - 4.0) <= 1e-6, f"rhs {pair.rhs:.9f} (4 +/- 1e-6)"),
        (elapsed < 1.0, f"runtime {elapsed:.2f}s (< 1s)"),
    ])


def test_criterion_4_tent_improved(acceptance_log):
    start = time.perf_counter()
    u = make_family(tent(1, 3, 1, 2), build_log_grid(*DEFAULT_GRID))
    res = improved_hardy_radial_pair(u, 1, 2)
    report = check(res.as_pair())
    elapsed = time.perf_counter() - start
    verdict(acceptance_log, 4, [
        (rel(res.improved_lhs, CLOSED["improved"]) <= 1e-2,
         f"improved_lhs {res.improved_lhs:.5f} vs {CLOSED['improved']:.5f}"),
        (rel(res.classical_lhs, CLOSED["classical"]) <= 1e-2,
         f"classical_lhs {res.classical_lhs:.5f} vs {CLOSED['classical']:.5f}"),
        (rel(res.rhs, 16.0) <= 1e-2, f"rhs {res.rhs:.5f} vs 16"),
        (report.verdict == "pass" and report.margin > 0.9, f"{report.verdict}, margin {report.margin:.4f} (> 0.9)"),
        (elapsed < 1.0, f"runtime {elapsed:.2f}s (< 1s)"),
    ])


def test_criterion_5_improvement_over_battery(acceptance_log, battery):
    reports, _ = battery
    improved = {k: r for k, r in reports.items() if k.split("/")[0] in ("improved", "improved-radial")}
    dominated = [k for k, r in improved.items() if not r.pair.details["classical_lhs"] <= r.pair.lhs]
    bounded = [k for k, r in improved.items() if not TolerancePolicy(tau_rel=TAU).accepts(r.pair.lhs, r.pair.rhs)]
    verdict(acceptance_log, 5, [
        (len(improved) > 0, f"{len(improved)} improved-Hardy jobs"),
        (not dominated, f"classical > improved in {dominated[:3]}"),
        (not bounded, f"improved > rhs (tau_rel 1e-3) in {bounded[:3]}"),
    ])


def test_criterion_6_sharpness(acceptance_log):
    eps = [0.2, 0.1, 0.05, 0.01]
    grid = (1e-6, 1e6, 8192)
    start = time.perf_counter()
    one = sharpness_sweep(1, 2, eps, grid)
    two = sharpness_sweep(2, 4, eps, grid)
    elapsed = time.perf_counter() - start
    checks = []
    for e, q in zip(eps, one.quotients):
        target = 4 / (1 + 4 * e**2)
        checks.append((rel(q, target) <= 1e-2, f"N=1 eps={e:g}: quotient {q:.4f} vs {target:.4f} (1%)"))
    checks += [
        (one.quotients[-1] > 3.95, f"N=1 eps=0.01 quotient {one.quotients[-1]:.4f} (> 3.95)"),
        (one.sup_quotient <= 4 * (1 + TAU), f"N=1 sup quotient {one.sup_quotient:.4f} (<= 4.004)"),
        (two.sup_quotient <= 16 * (1 + TAU), f"N=2 p=4 sup quotient {two.sup_quotient:.4f} (<= 16.016)"),
        (all(np.diff(two.quotients) > 0),
         "N=2 p=4 quotients " + ", ".join(f"{q:.3f}" for q in two.quotients) + " (increasing as eps decreases)"),
        (elapsed < 30.0, f"runtime {elapsed:.2f}s (< 30s)"),
    ]
    verdict(acceptance_log, 6, checks)


def test_criterion_7_radialisation_contraction(acceptance_log, tensor_battery):
    start = time.perf_counter()
    failures, worst_radial = [], 0.0
    for seed, N, p, radial, u in tensor_battery:
        pair = evaluate_functional("radialise-contraction", u, N, p)
        if check(pair, TolerancePolicy(tau_rel=TAU)).verdict != "pass":
            failures.append(seed)
        if radial:
            worst_radial = max(worst_radial, rel(pair.lhs, pair.rhs))
    elapsed = time.perf_counter() - start
    verdict(acceptance_log, 7, [
        (not failures, f"{len(failures)} of 100 fail (tau_rel 1e-3)"),
        (worst_radial <= 1e-6, f"radial inputs max |lhs-rhs|/rhs {worst_radial:.2e} (<= 1e-6)"),
        (elapsed < 30.0, f"runtime {elapsed:.2f}s (< 30s)"),
    ])


def test_criterion_8_sup_exchange(acceptance_log, tensor_battery):
    failures, worst_radial = [], 0.0
    for seed, N, p, radial, u in tensor_battery:
        pair = evaluate_functional("sup-exchange", u, N, p)
        if check(pair, TolerancePolicy(tau_rel=TAU)).verdict != "pass":
            failures.append(seed)
        if radial:
            worst_radial = max(worst_radial, rel(pair.lhs, pair.rhs))
    verdict(acceptance_log, 8, [
        (not failures, f"{len(failures)} of 100 fail (tau_rel 1e-3)"),
        (worst_radial <= 1e-6, f"radial inputs max |lhs-rhs|/rhs {worst_radial:.2e} (<= 1e-6)"),
    ])


def test_criterion_9_uncertainty(acceptance_log, battery):
    reports, _ = battery
    start = time.perf_counter()
    u = make_family(tent(1, 3, 1, 2), build_log_grid(*DEFAULT_GRID))
    suffix = uncertainty_pair(u, 1, 2, "radial", "suffix")
    prefix = uncertainty_pair(u, 1, 2, "radial", "prefix")
    elapsed = time.perf_counter() - start
    prefix_reports = {k: r for k, r in reports.items() if ":prefix/" in k}
    bounded = [k for k, r in prefix_reports.items() if r.verdict != "unbounded-branch"]
    verdict(acceptance_log, 9, [
        (rel(suffix.lhs, 14 / 3) <= 1e-2, f"suffix lhs {suffix.lhs:.4f} vs 4.6667"),
        (rel(suffix.rhs, 17.618) <= 1e-2, f"suffix rhs {suffix.rhs:.4f} vs 17.618"),
        (prefix.unbounded, "tent prefix branch unbounded"),
        (len(prefix_reports) > 0 and not bounded,
         f"{len(prefix_reports) - len(bounded)} of {len(prefix_reports)} battery prefix branches unbounded"),
        (elapsed < 1.0, f"runtime {elapsed:.2f}s (< 1s)"),
    ])


def test_criterion_10_refinement(acceptance_log, battery):
    reports, elapsed = battery
    passes = {k: r for k, r in reports.items() if r.verdict == "pass"}
    unstable = [k for k, r in passes.items() if not abs(r.refined_margin - r.margin) < TAU]
    failed = [k for k, r in reports.items() if r.verdict == "fail"]
    unbounded = sum(r.verdict == "unbounded-branch" for r in reports.values())
    verdict(acceptance_log, 10, [
        (not failed, f"{len(passes)} pass, {unbounded} unbounded-branch, {len(failed)} fail of {len(reports)}"),
        (not unstable, f"{len(unstable)} passes move by >= tau_rel under doubling {unstable[:3]}"),
        (True, f"battery runtime {elapsed:.1f}s"),
    ])
