"""End-to-end acceptance criteria, one PASS/FAIL line each in the terminal summary."""
import time

import mpmath
import numpy as np
import pytest

from tridispec.applications import (FailureSpec, advdiff_build, advdiff_spectrum, exceeds_two,
                                    in_failure_region, leading_eigenvalue, pbc_failure)
from tridispec.experiments import (ErrorScalingConfig, TimingConfig, error_scaling, fit_slopes,
                                   loglog_slope, oracle_check, random_params, timing)
from tridispec.kernel import BoundaryParams, classify_roots
from tridispec.oracle import assemble_conjugated, assemble_dense, dense_eigenvalues_of
from tridispec.regular import SolverOptions, solve_regular
from tridispec.spectrum import solve_spectrum
from tridispec.transform import GeneralTridiagonal, solve_general, to_canonical

SEED = 0


def test_c01_oracle_equivalence_real(record_criterion):
    t0 = time.perf_counter()
    rows = oracle_check("real", draws=50, n=100, seed=SEED)
    elapsed = time.perf_counter() - t0
    worst = max(r[1] for r in rows)
    ok = worst < 1e-9 and elapsed < 10
    record_criterion("C01 oracle equivalence (real)", ok, f"max={worst:.2e} time={elapsed:.2f}s")
    assert ok


def test_c02_oracle_equivalence_complex(record_criterion):
    rows = oracle_check("complex", draws=50, n=100, seed=SEED, M=4)
    worst = max(r[1] for r in rows)
    ok = worst < 1e-6
    record_criterion("C02 oracle equivalence (complex, M=4)", ok, f"max={worst:.2e}")
    assert ok


def test_c03_error_scaling(record_criterion):
    t0 = time.perf_counter()
    rows = error_scaling(ErrorScalingConfig())
    elapsed = time.perf_counter() - t0
    slopes = fit_slopes(rows)
    ok = all(abs(s + (M + 1)) <= 0.4 for M, s in slopes.items()) and elapsed < 300
    detail = " ".join(f"M={M}:{s:.2f}" for M, s in slopes.items())
    record_criterion("C03 error-scaling slopes -(M+1)", ok,
                     f"{detail} ordering(M4<M1)={slopes[4] < slopes[1]} time={elapsed:.1f}s")
    assert ok, detail


def test_c04_root_count_law(record_criterion):
    rng = np.random.default_rng(SEED)
    bad = []
    for i in range(200):
        n = int(rng.integers(20, 120))
        p = random_params(rng, n, "real" if i % 2 == 0 else "complex")
        Q = classify_roots(p).Q
        reg = solve_regular(p, SolverOptions())
        res = solve_spectrum(p)
        if len(reg.t) != 2 * n + 4 - 2 * Q or res.kinds.count("special") != Q:
            bad.append((i, len(reg.t), res.kinds.count("special"), Q))
    ok = not bad
    record_criterion("C04 root-count law", ok, f"{200 - len(bad)}/200 draws")
    assert ok, bad[:5]


def test_c05_special_exponential_accuracy(record_criterion):
    errs = []
    with mpmath.workdps(60):
        for n in (20, 30, 40, 50):
            p = BoundaryParams(-1.5, -1, 0, 0, n=n)
            sp = solve_spectrum(p).of_kind("special")
            assert len(sp) == 1
            ev = dense_eigenvalues_of(p, precision="mp", dps=60, raw=True)
            s = mpmath.mpc(complex(sp[0]))
            errs.append(min(abs(x - s) for x in ev))
    ok = all(b <= a / 2 for a, b in zip(errs, errs[1:])) and errs[-1] < 1e-10
    record_criterion("C05 special eigenvalue exponential accuracy", ok,
                     " ".join(mpmath.nstr(e, 3) for e in errs))
    assert ok


def test_c06_eigenvector_residuals(record_criterion):
    rng = np.random.default_rng(SEED)
    opts = SolverOptions(vectors=True, refine_special=True)
    worst = 0.0
    for _ in range(20):
        res = solve_spectrum(random_params(rng, 100, "real"), opts)
        mask = np.array([k in ("regular", "special") for k in res.kinds])
        worst = max(worst, float(np.max(res.residuals[mask])))
    ok = worst < 1e-8
    record_criterion("C06 eigenvector residuals", ok, f"max={worst:.2e}")
    assert ok


def test_c07_advdiff_bound_suite(record_criterion):
    cases = [(K, "dirichlet") for K in (-4, -1, 0, 1, 4)] + [(K, "mixed") for K in (-4, -1, 0)]
    fails = []
    for K, bc in cases:
        for n in (20, 60):
            nu = advdiff_spectrum(advdiff_build(K, n, bc), check_bound=False)
            real = np.all(np.abs(nu.imag) <= 1e-9 * np.maximum(1, np.abs(nu)))
            if not (real and np.all(nu.real < -K * K + 1e-6)):
                fails.append((K, bc, n))
    ok = not fails
    record_criterion("C07 advection-diffusion real and below -K^2", ok, f"{len(cases) * 2 - len(fails)}/16")
    assert ok, fails


def test_c08_leading_eigenvalue(record_criterion):
    K = 5.0
    closed = -4 * K * K / (np.exp(2 * K) + 1)
    mixed = leading_eigenvalue(advdiff_build(K, 400, "mixed"))
    limit = -K * K - np.pi ** 2
    ns = [50, 100, 200, 400]
    lead = [leading_eigenvalue(advdiff_build(K, n, "dirichlet")) for n in ns]
    slope = loglog_slope(ns, [abs(v - limit) for v in lead])
    ok = abs(mixed / closed - 1) < 0.1 and abs(lead[-1] - limit) < 1e-2 and abs(slope + 2) <= 0.3
    record_criterion("C08 leading eigenvalue asymptotics", ok,
                     f"mixed={mixed:.4e} closed={closed:.4e} dirichlet={lead[-1]:.5f} slope={slope:.2f}")
    assert ok


def test_c09_pbc_demonstrator(record_criterion):
    rep = pbc_failure(FailureSpec(0.5, -2, n=100), verify=True)
    rng = np.random.default_rng(SEED)
    r1 = np.sqrt(rng.uniform(0, 1, 10_000)) * np.exp(2j * np.pi * rng.uniform(0, 1, 10_000))
    mismatches = int(np.sum(in_failure_region(r1.real, r1.imag) != exceeds_two(r1)))
    ok = rep.region and rep.verify_error < 1e-6 and abs(rep.solver_value - 2.5) < 1e-6 and mismatches == 0
    record_criterion("C09 periodic boundary failure", ok,
                     f"oracle err={rep.verify_error:.1e} mismatches={mismatches}")
    assert ok


@pytest.mark.slow
def test_c10_performance(record_criterion):
    rows = timing(TimingConfig(ns=(1000, 10_000, 100_000), reps=3, threads=1))
    slope = loglog_slope(*zip(*rows))
    biggest = rows[-1][1] / 1e3
    ok = abs(slope - 1) <= 0.3 and biggest < 60
    record_criterion("C10 linear-time scaling", ok,
                     " ".join(f"n={n}:{t:.0f}ms" for n, t in rows) + f" slope={slope:.2f}")
    assert ok


def test_c11_transform_round_trip(record_criterion):
    rng = np.random.default_rng(SEED)
    worst_entry, worst_res = 0.0, 0.0
    for _ in range(20):
        n = int(rng.integers(2, 51))
        alphas = rng.uniform(0.8, 1.25, n) * np.exp(1j * rng.uniform(-np.pi, np.pi, n))
        v = rng.uniform(-1, 1, 4) + 1j * rng.uniform(-1, 1, 4)
        q = rng.uniform(0.5, 2) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        B = GeneralTridiagonal(q, complex(rng.normal(), rng.normal()), alphas, BoundaryParams(*v, n=n))
        dense = assemble_dense(B).entries
        params, conj = to_canonical(B)
        conjugated = assemble_conjugated(params, conj).entries
        worst_entry = max(worst_entry, float(np.max(np.abs(conjugated - dense)) / np.max(np.abs(dense))))
        pairs, _ = solve_general(B, SolverOptions(vectors=True, refine_special=True))
        for p in pairs:
            x = p.value
            worst_res = max(worst_res, float(np.max(np.abs(dense @ x - p.lam * x)) / np.max(np.abs(x))))
    ok = worst_entry < 1e-12 and worst_res < 1e-6
    record_criterion("C11 transform round trip", ok, f"entry={worst_entry:.1e} residual={worst_res:.1e}")
    assert ok
