"""Acceptance criteria 1-10, each at its stated tolerance and runtime budget."""
import csv
import math
import shutil
import subprocess
import sys
import time
from pathlib import Path

import mpmath
import numpy as np
import pytest

from infofriction.bounds import (
    erasure_block_error_lb, decoding_bm_lb, encoding_bm_lb, friction_constant, golden_section,
    near_capacity_bm_lb, optimal_transmit_power,
)
from infofriction.channel import (
    estimate_block_error, q_function, transmit_bec_then_fill, transmit_bsc, wilson_interval,
)
from infofriction.codes import Hamming74Coder, RepetitionCoder
from infofriction.computation import bitmeters_in_region, bitmeters_of_trace
from infofriction.geometry import Rect, assign_to_regions
from infofriction.stencil import best_origin, mean_grid_coverage

from conftest import ACCEPTANCE, random_circuit, random_trace

ROOT = Path(__file__).resolve().parent.parent
GOLDEN_FRAC = (math.sqrt(5) - 1) / 2


def record(n: int, ok: bool, detail: str):
    ACCEPTANCE[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    assert ok, ACCEPTANCE[n]


def test_c1_stencil_coverage():
    t0 = time.perf_counter()
    floor_bad, mean_bad, worst = 0, 0, 0.0
    for i in range(100):
        rng = np.random.default_rng([1, i])
        k = int(rng.integers(10, 501))
        eta = (0.1, 0.25, 0.4)[i % 3]
        # sparse nodes on a large lattice and a side with a badly approximable
        # fractional part, so lattice phases modulo a spread evenly
        side = 8 * math.ceil(math.sqrt(k))
        c = random_circuit(rng, side, {"output": k, "input": k // 2})
        a = float(rng.integers(3, 12)) + GOLDEN_FRAC
        floor = k * (1 - 2 * eta) ** 2
        _, covered = best_origin(c, a, eta)
        floor_bad += covered < floor
        if k >= 100:
            rel = abs(mean_grid_coverage(c, a, eta, m=64) / floor - 1)
            worst = max(worst, rel)
            mean_bad += rel > 0.01
    dt = time.perf_counter() - t0
    record(1, floor_bad == 0 and mean_bad == 0 and dt < 30,
           f"floor violations {floor_bad}/100, grid-mean off by >1% {mean_bad} (worst {worst:.4%}), {dt:.1f}s")


def test_c2_disjointness():
    t0 = time.perf_counter()
    worst = -math.inf
    for i in range(200):
        rng = np.random.default_rng([2, i])
        side = int(rng.integers(8, 40))
        c = random_circuit(rng, side, {"input": int(rng.integers(2, 20)), "output": int(rng.integers(2, 20)),
                                       "helper": int(rng.integers(0, 10))})
        tr = random_trace(rng, len(c.nodes), int(rng.integers(1, 80)))
        nx, ny = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        xs = [0, *sorted(rng.uniform(0, side, nx - 1)), side]
        ys = [0, *sorted(rng.uniform(0, side, ny - 1)), side]
        rects = [Rect(x0, y0, x1, y1) for x0, x1 in zip(xs, xs[1:]) for y0, y1 in zip(ys, ys[1:])]
        total = bitmeters_of_trace(c, tr)
        parts = math.fsum(bitmeters_in_region(c, tr, r) for r in assign_to_regions(c, rects))
        worst = max(worst, (parts - total) / total)
    dt = time.perf_counter() - t0
    record(2, worst <= 1e-9 and dt < 10, f"max (sum regions - total)/total = {worst:.3e}, {dt:.1f}s")


def test_c3_channel_identities():
    t0 = time.perf_counter()
    q1 = abs(q_function(1.0) - 0.158655253931)
    xs = np.linspace(0.1, 8, 791)
    phi = np.exp(-xs ** 2 / 2) / math.sqrt(2 * math.pi)
    q = q_function(xs)
    sandwich = bool(np.all(xs / (1 + xs ** 2) * phi <= q) and np.all(q <= 0.5 * np.exp(-xs ** 2 / 2)))
    n = 10 ** 6
    zs = []
    for j, p in enumerate((0.05, 0.1, 0.25)):
        a = transmit_bsc(np.zeros(n, np.uint8), p, seed=[3, j, 0]).mean()
        b = transmit_bec_then_fill(np.zeros(n, np.uint8), p, seed=[3, j, 1])[0].mean()
        pooled = (a + b) / 2
        zs.append((a - b) / math.sqrt(pooled * (1 - pooled) * 2 / n))
    dt = time.perf_counter() - t0
    ok = q1 <= 1e-9 and sandwich and max(map(abs, zs)) < 4 and dt < 20
    record(3, ok, f"|Q(1) - ref| = {q1:.1e}, sandwich {sandwich}, z = "
                  f"{', '.join(f'{z:+.2f}' for z in zs)}, {dt:.1f}s")


def test_c4_analytic_block_error():
    t0 = time.perf_counter()
    out = []
    for coder, p, truth, seed in ((RepetitionCoder(1, 3), 0.1, 0.028, 41),
                                  (Hamming74Coder(), 0.05, 1 - 0.95 ** 7 - 7 * 0.05 * 0.95 ** 6, 42)):
        est = estimate_block_error(coder, p, 100_000, seed=seed)
        lo, hi = est.wilson
        sigma = (hi - lo) / 2 / 1.959963984540054
        out.append((coder.family, est.eps_hat, truth, abs(est.eps_hat - truth) / sigma))
        if coder.family == "hamming74":
            # the quoted reference 0.044379 and the formula (0.0443805...) differ in the 6th place
            literal = abs(est.eps_hat - 0.044379) / sigma
    dt = time.perf_counter() - t0
    ok = all(z <= 3 for *_, z in out) and literal <= 3 and dt < 60
    record(4, ok, "; ".join(f"{f} eps_hat {e:.5f} vs {t:.6f} ({z:.2f} sigma)" for f, e, t, z in out)
           + f", {dt:.1f}s")


def test_c5_bound_evaluators():
    with mpmath.workdps(50):
        oracle = (mpmath.mpf(1000) / (48 * mpmath.sqrt(2))
                  * mpmath.sqrt(mpmath.log(1 / (10 * mpmath.mpf("1e-9"))) / mpmath.log(1 / (2 * mpmath.mpf("0.4"))))
                  * mpmath.mpf("1e-6"))
    got = decoding_bm_lb(1000, 1e-9, 0.4, 1e-6).bound_value
    rel = abs(got - float(oracle)) / float(oracle)
    rng = np.random.default_rng(5)
    same = 0
    for _ in range(50):
        k = int(rng.integers(1, 10 ** 5))
        eps = 10 ** rng.uniform(-300, -2)
        p = rng.uniform(0.3, 0.5)
        lam = 10 ** rng.uniform(-9, 0)
        d, e = decoding_bm_lb(k, eps, p, lam), encoding_bm_lb(k, eps, p, lam)
        same += d.bound_value == e.bound_value and d.condition_ok == e.condition_ok
    ratios = []
    for log2n in (20, 40, 80, 200):
        a = near_capacity_bm_lb(1000, 2.0 ** log2n, 0.45, 1.0).bound_value
        b = near_capacity_bm_lb(1000, 2.0 ** (2 * log2n), 0.45, 1.0).bound_value
        ratios.append(abs(b / a - math.sqrt(2)) / math.sqrt(2))
    ok = rel <= 1e-9 and same == 50 and max(ratios) <= 1e-12
    record(5, ok, f"oracle rel err {rel:.1e}, decoding==encoding on {same}/50, sqrt-ratio err {max(ratios):.1e}")


def test_c6_optimizer():
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(50):
        eps, beta = 10 ** rng.uniform(-15, -2), 10 ** rng.uniform(-2, 2)
        mu, R, W = 10 ** rng.uniform(-15, -6), rng.uniform(0.05, 1), 10 ** rng.uniform(0, 9)
        c = friction_constant(beta, mu)
        L = math.log2(1 / (10 * eps))
        closed = (c / 2 * math.sqrt(L) * R * W) ** (2 / 3)
        with mpmath.workdps(50):
            g = lambda u: mpmath.exp(u) / (R * W) + c * mpmath.sqrt(L / mpmath.exp(u))
            golden = float(mpmath.exp(golden_section(g, mpmath.mpf(-300), mpmath.mpf(300))))
        lib = optimal_transmit_power(eps, beta, mu, R, W).P_T
        assert lib == pytest.approx(closed, rel=1e-14)
        worst = max(worst, abs(lib - golden) / golden)
    eps = 1e-9
    L = math.log2(1 / (10 * eps))
    mu = 2 / math.sqrt(L) * 48 * math.sqrt(2)
    unit = optimal_transmit_power(eps, 1.0, mu, 1.0, 1.0)
    ok = worst <= 1e-9 and abs(unit.P_T - 1) <= 1e-12 and abs(unit.value - 3) <= 3e-12
    record(6, ok, f"closed vs golden worst rel {worst:.1e}; unit case ({unit.P_T!r}, {unit.value!r})")


def test_c7_scaling_exponents():
    from infofriction.bounds import default_beta, fit_loglog_slope
    eps = np.logspace(-5, -15, 11)
    L = np.log2(1 / (10 * eps))
    dec = fit_loglog_slope(L, [decoding_bm_lb(1000, e, 0.45, 1e-6).bound_value for e in eps]).slope
    beta = default_beta()
    cor = fit_loglog_slope(L, [optimal_transmit_power(e, beta, 1e-12, 0.5, 1e6).value for e in eps]).slope
    ns = 2.0 ** np.arange(20, 61, 5)
    nc = fit_loglog_slope(np.log2(ns), [near_capacity_bm_lb(1000, n, 0.45, 1e-6).bound_value for n in ns]).slope
    ok = abs(dec - 0.5) <= 0.02 and abs(cor - 1 / 3) <= 0.02 and abs(nc - 0.5) <= 0.02
    record(7, ok, f"slopes: decoding {dec:.6f}, energy {cor:.6f}, near-capacity {nc:.6f}")


# -- criteria 8 and 10 run the shipped configs through the real CLI -----------------

SUBCOMMANDS = ("bounds", "simulate", "stencil", "optimize", "scaling")


def run_cli(workdir: Path, sub: str) -> dict[str, bytes]:
    out = workdir / "out"
    if out.exists():
        shutil.rmtree(out)
    proc = subprocess.run([sys.executable, "-m", "infofriction.cli", sub, str(workdir / "configs" / f"{sub}.ini")],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return {str(p.relative_to(out)): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()}


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    w = tmp_path_factory.mktemp("shipped")
    shutil.copytree(ROOT / "configs", w / "configs")
    return w


@pytest.fixture(scope="module")
def first_runs(workdir):
    runs, times = {}, {}
    for sub in SUBCOMMANDS:
        t0 = time.perf_counter()
        runs[sub] = run_cli(workdir, sub)
        times[sub] = time.perf_counter() - t0
    return runs, times


def test_c8_bound_vs_simulation(first_runs):
    runs, times = first_runs
    rows = list(csv.DictReader(runs["simulate"]["simulate.csv"].decode().splitlines()))
    checked = [r for r in rows if r["condition_ok"] == "true"]
    violations = [r for r in checked
                  if float(r["measured_decoder_bitmeters"]) < float(r["bound_decoding_bitmeters"])]
    placements = {r["placement"] for r in rows}
    ok = not violations and checked and placements == {"row", "grid", "local_search"} and times["simulate"] < 300
    record(8, bool(ok), f"{len(rows)} coder/placement rows, {len(checked)} with condition true, "
                        f"{len(violations)} violations, {times['simulate']:.1f}s")


def test_c9_erasure_bound():
    with mpmath.workdps(80):
        n, R, p = mpmath.mpf(2) ** 20, mpmath.mpf("0.5"), mpmath.mpf("0.45")
        li = mpmath.log(1 / (2 * p))
        nbar = mpmath.log(n) / (2 * li)
        oracle = float(1 - (1 - (2 * p) ** nbar / 9) ** (n * R * li / (4 * mpmath.log(n))))
    v20 = erasure_block_error_lb(2.0 ** 20, 0.5, 0.45)
    v60 = erasure_block_error_lb(2.0 ** 60, 0.5, 0.45)
    ok = abs(v20 - oracle) <= 1e-6 and v60 > 0.999
    record(9, ok, f"n=2^20: {v20:.10f} (oracle {oracle:.10f}); n=2^60: {v60:.10f}")


def test_c10_reproducibility(workdir, first_runs):
    runs, _ = first_runs
    differing = []
    for sub in SUBCOMMANDS:
        again = run_cli(workdir, sub)
        if again != runs[sub]:
            differing.append(sub)
    files = sum(len(v) for v in runs.values())
    record(10, not differing, f"{files} output files across {len(SUBCOMMANDS)} subcommands, "
                              f"differing: {differing or 'none'}")
