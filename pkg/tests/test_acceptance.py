"""Acceptance criteria, one test per criterion.

Each test records a ``PASS`` or ``FAIL`` line with the measured numbers; the
lines are printed in the pytest terminal summary and by running this file
directly.  Tolerances are the published budgets, never loosened here.
"""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from johnforge.geometry import Box, rasterize, whitney
from johnforge.john import estimate_john_constant
from johnforge.potential.beurling import verify_beurling
from johnforge.potential.capacity import capacity_estimate
from johnforge.potential.harmonic import HarmonicField, disk_grid, normalize_energy, oscillation_capacity
from johnforge.potential.measure import harmonic_measure_wos, poisson_arc_measure
from johnforge.removability import nonremovability_witness, removability_report
from johnforge.shapes import cardioid_interior_point
from johnforge.simplify import build_graph, cut_slits, verify_simplified

SUITE = ["disk:0.5", "segment:1", "disks:2", "cantor:0.25:6", "fat_cantor:0.1", "julia:0:1"]
RESULTS = {}


def record(n, ok, detail):
    line = f"C{n:<2} {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def test_c01_whitney_soundness():
    t0 = time.perf_counter()
    bad = {}
    for spec in SUITE:
        w = whitney(rasterize(spec, 9))
        viol = len(w.check_sandwich())
        covered = np.array_equal(w.labels >= 0, ~w.mask.bits)
        if viol or not covered:
            bad[spec] = {"sandwich_violations": viol, "coverage": covered}
    dt = time.perf_counter() - t0
    record(1, not bad and dt < 30, f"Whitney sandwich+coverage on 6 shapes at level 9; "
                                   f"failures={bad or 'none'}; runtime {dt:.1f}s (< 30s)")


def test_c02_capacity_closed_forms():
    disk = capacity_estimate(rasterize("disk:0.5", 9), "energy").value
    seg = capacity_estimate(rasterize("segment:4", 9), "energy").value
    spread = {}
    for spec in SUITE:
        m = rasterize(spec, 9)
        e = capacity_estimate(m, "energy").value
        f = capacity_estimate(m, "fekete").value
        spread[spec] = abs(f - e) / e
    ok = abs(disk - 0.5) <= 0.01 and abs(seg - 1.0) <= 0.02 and max(spread.values()) <= 0.05
    worst = max(spread, key=spread.get)
    record(2, ok, f"Cap(disk r=0.5)={disk:.4f} (0.5+-2%), Cap(segment 4)={seg:.4f} (1.0+-2%), "
                  f"max fekete/energy gap {spread[worst]:.3%} on {worst} (<= 5%)")


def _random_harmonic(rng, X, Y, degree=8):
    z = X + 1j * Y
    c = rng.normal(size=degree) + 1j * rng.normal(size=degree)
    return np.real(sum(c[k] * z ** (k + 1) for k in range(degree)))


def test_c03_oscillation_bound():
    X, Y, inside, ring, h = disk_grid(8)
    c = X.shape[0] // 2
    ok_count, worst = 0, (0.0, None)
    for seed in range(100):
        rng = np.random.default_rng(seed)
        H = _random_harmonic(rng, X, Y)
        f = HarmonicField(np.where(inside | ring, H, np.nan), inside, ring, h)
        f = normalize_energy(f, inside)
        good = True
        for lam in (0.5, 1.0, 1.5):
            cap = oscillation_capacity(f, (c, c), lam, ring, (X, Y), seed=seed).value
            ratio = cap / (10 * np.exp(-np.pi * lam ** 2))
            if ratio > worst[0]:
                worst = (ratio, (seed, lam))
            good &= ratio <= 1
        ok_count += good
    record(3, ok_count == 100, f"{ok_count}/100 unit-energy harmonic polynomials satisfy "
                               f"Cap <= 10 exp(-pi lam^2); worst Cap/bound {worst[0]:.3f} at (seed, lam)={worst[1]}")


def test_c04_distortion_sweep():
    rep = verify_beurling("koebe")
    ok = rep["min_ratio"] >= 0.05 and rep["max_cap_sqrt_lambda"] <= 20
    record(4, ok, f"Koebe sweep: min Cap(f(E))/Cap(E)^2 = {rep['min_ratio']:.4f} (>= 0.05, witness width "
                  f"{rep['min_ratio_witness']['width']:.3f}); max Cap*sqrt(lam) = "
                  f"{rep['max_cap_sqrt_lambda']:.4f} (<= 20, at lam={rep['max_witness']['lambda']})")


def test_c05_simplification():
    lines, ok = [], True
    for spec in ["disks:1", "disks:2", "disks:5", "cantor:0.25:6", "julia:0:1"]:
        t0 = time.perf_counter()
        w = whitney(rasterize(spec, 9))
        g = build_graph(w, A=8.0)
        rep = verify_simplified(cut_slits(w, g, 0.1))
        dt = time.perf_counter() - t0
        eps_hat = rep["john"]["epsilon_omega_hat"]
        good = (rep["connected"]["ok"] and rep["simply_connected"]["ok"]
                and rep["boundary_contained"]["ok"] and rep["graph"]["ok"] and eps_hat > 0 and dt < 120)
        ok &= good
        lines.append(f"{spec}:{'ok' if good else 'FAIL'}(eps^={eps_hat:.4f},{dt:.1f}s)")
    record(5, ok, "Omega^ connected, simply connected, boundary kept, graph invariants, eps^>0, <2min: "
                  + " ".join(lines))


def test_c06_john_estimator():
    disk = estimate_john_constant(whitney(rasterize("circle:0.5", 9)), (0.0, 0.0), n_samples=None)
    ext = {L: estimate_john_constant(whitney(rasterize("cardioid", L)), "inf", n_samples=None).epsilon_lower
           for L in (9, 10)}
    p = cardioid_interior_point(0.5)
    inn = {L: estimate_john_constant(whitney(rasterize("cardioid", L)), p, n_samples=None).epsilon_lower
           for L in (9, 10)}
    change = abs(inn[10] - inn[9]) / inn[9]
    ok = disk.epsilon_lower >= 0.4 and ext[10] <= 0.6 * ext[9] and change < 0.2
    record(6, ok, f"disk interior eps^={disk.epsilon_lower:.4f} (>= 0.4); cardioid exterior "
                  f"L10/L9 = {ext[10]:.4f}/{ext[9]:.4f} = {ext[10] / ext[9]:.3f} (<= 0.6); "
                  f"cardioid interior change {change:.2%} (< 20%)")


def test_c07_removability_experiment():
    circle = removability_report(rasterize("circle:0.5", 10), "fourier", (4, 8, 16, 32), seed=0)
    fat = removability_report(rasterize("fat_cantor:0.1", 10), "fourier", (4, 8, 16, 32), seed=0)
    g = circle.verdict_gap
    mono = all(b <= a for a, b in zip(g, g[1:]))
    ok = mono and g[-1] <= 0.02 and fat.verdict_gap[-1] >= 5 * g[-1]
    record(7, ok, f"circle gaps {np.round(g, 4).tolist()} (monotone={mono}, n=32 gap {g[-1]:.4f} <= 0.02); "
                  f"fat Cantor n=32 gap {fat.verdict_gap[-1]:.4f} (>= 5x circle = {5 * g[-1]:.4f})")


def test_c08_witness():
    rep = nonremovability_witness(rasterize("fat_cantor:0.1", 10), (4, 8, 16, 32))
    exact = all(d == pytest.approx(rep.area, rel=1e-12) for d in rep.dbar_energies)
    sup_ok = rep.sup_norms[-1] <= 0.5 * rep.sup_norms[0]
    offs = rep.offK_gradient_energies
    dec = all(b < a for a, b in zip(offs, offs[1:]))
    record(8, exact and sup_ok and dec,
           f"dbar energy == area {rep.area:.6f} for all n: {exact}; sup n=32/n=4 = "
           f"{rep.sup_norms[-1] / rep.sup_norms[0]:.3f} (<= 0.5); off-K energies "
           f"{np.round(offs, 4).tolist()} strictly decreasing: {dec}")


def test_c09_harmonic_measure():
    L = 9
    X, Y, inside, ring, h = disk_grid(L)
    box = Box((0.0, 0.0), 1.25)
    half = harmonic_measure_wos(inside, ring & (Y > 0), (0.0, 0.0), box, L, n_walks=100_000, seed=1)
    th = np.arctan2(Y, X)
    rng = np.random.default_rng(5)
    zs = []
    for k in range(20):
        r, phi = 0.7 * np.sqrt(rng.random()), rng.random() * 2 * np.pi
        z = (r * np.cos(phi), r * np.sin(phi))
        a, width = rng.random() * 2 * np.pi - np.pi, rng.random() * np.pi + 0.2
        target = ring & (np.mod(th - a, 2 * np.pi) <= width)
        est = harmonic_measure_wos(inside, target, z, box, L, n_walks=10_000, seed=1000 * k)
        zs.append((est.value - poisson_arc_measure(z, a, a + width)) / est.stderr)
    inside3 = sum(abs(v) <= 3 for v in zs)
    ok = abs(half.value - 0.5) <= 0.01 and inside3 == 20
    record(9, ok, f"omega(0, upper half circle) = {half.value:.4f} +- {half.stderr:.4f} (0.500 +- 0.010); "
                  f"{inside3}/20 Poisson configurations within 3 SE (max |z| = {max(map(abs, zs)):.2f})")


CLI_RUNS = [
    ["rasterize", "--shape", "julia:0:1", "--level", "8", "--out", "{d}/r.json"],
    ["whitney", "--shape", "disks:2", "--level", "8", "--out", "{d}/w.json"],
    ["john-estimate", "--in", "{d}/w.json", "--samples", "16", "--out", "{d}/j.json"],
    ["simplify", "--in", "{d}/w.json", "--A", "8", "--delta", "0.1", "--out", "{d}/s.json"],
    ["verify", "--in", "{d}/s.json", "--samples", "8", "--out", "{d}/v.json"],
    ["capacity", "--shape", "segment:4", "--level", "8", "--method", "fekete", "--out", "{d}/c.json"],
    ["harmonic", "--shape", "circle:0.5", "--level", "7", "--out", "{d}/h.json"],
    ["measure", "--shape", "circle:0.5", "--level", "8", "--walks", "2000", "--out", "{d}/m.json"],
    ["removability", "--shape", "circle:0.5", "--level", "8", "--n-list", "4,8", "--out", "{d}/rm.json"],
    ["witness", "--shape", "fat_cantor:0.1", "--level", "8", "--out", "{d}/wt.json"],
    ["beurling", "--map", "koebe", "--theta-samples", "256", "--out", "{d}/b.json"],
]


def test_c10_determinism(tmp_path):
    differ = []
    for argv in CLI_RUNS:
        args = [a.replace("{d}", str(tmp_path)) for a in argv] + ["--seed", "11"]
        out = Path(args[args.index("--out") + 1])
        payloads = []
        for _ in range(2):
            r = subprocess.run([sys.executable, "-m", "johnforge.cli", *args], capture_output=True)
            if r.returncode != 0:
                differ.append(f"{argv[0]}(exit {r.returncode})")
                break
            payloads.append(out.read_bytes())
        if len(payloads) == 2 and payloads[0] != payloads[1]:
            differ.append(argv[0])
    record(10, not differ, f"{len(CLI_RUNS)} subcommands run twice with identical argv and --seed 11; "
                           f"non-identical payloads: {differ or 'none'}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
