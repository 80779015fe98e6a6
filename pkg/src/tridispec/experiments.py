"""Reproducibility experiments: contraction error vs n, and wall time vs n."""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .kernel import BoundaryParams
from .oracle import dense_eigenvalues_of, match_spectra
from .regular import SolverOptions
from .spectrum import solve_spectrum

DEFAULT_COMPLEX = (0.7 + 0.2j, -0.3, 0.4 - 0.1j, 0.25)  # (b0, b1, c0, cm1)


@dataclass(frozen=True)
class ErrorScalingConfig:
    params: tuple = DEFAULT_COMPLEX
    ns: tuple = (50, 150, 250, 350, 450, 550)
    Ms: tuple = (1, 2, 3, 4)
    threads: int = 1


def regular_error(params: BoundaryParams, M: int, oracle=None, threads: int = 1) -> float:
    """Largest distance from a regular eigenvalue after M contraction steps to
    its matched oracle eigenvalue."""
    if oracle is None:
        oracle = dense_eigenvalues_of(params)
    res = solve_spectrum(params, SolverOptions(fixed_iterations=M, threads=threads))
    _, _, perm = match_spectra(res.eigenvalues, oracle)
    dist = np.abs(res.eigenvalues - oracle[perm])
    mask = np.array([k == "regular" for k in res.kinds])
    return float(dist[mask].max()) if mask.any() else 0.0


def error_scaling(cfg: ErrorScalingConfig = ErrorScalingConfig()) -> list:
    """Rows ``(n, M, max_error)``."""
    rows = []
    b0, b1, c0, cm1 = cfg.params
    for n in cfg.ns:
        p = BoundaryParams(b0, b1, c0, cm1, n)
        oracle = dense_eigenvalues_of(p)
        for M in cfg.Ms:
            rows.append((int(n), int(M), regular_error(p, M, oracle, cfg.threads)))
    return rows


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def fit_slopes(rows) -> dict:
    out = {}
    for M in sorted({r[1] for r in rows}):
        sel = [(n, e) for n, m, e in rows if m == M and e > 0]
        out[M] = loglog_slope(*zip(*sel)) if len(sel) >= 2 else float("nan")
    return out


@dataclass(frozen=True)
class TimingConfig:
    params: tuple = DEFAULT_COMPLEX
    ns: tuple = (1000, 10000, 100000)
    reps: int = 3
    threads: int = 1
    opts: SolverOptions = field(default_factory=SolverOptions)


def timing(cfg: TimingConfig = TimingConfig()) -> list:
    """Rows ``(n, median_wall_time_ms)`` for eigenvalue-only solves."""
    b0, b1, c0, cm1 = cfg.params
    opts = replace(cfg.opts, threads=cfg.threads, vectors=False)
    solve_spectrum(BoundaryParams(b0, b1, c0, cm1, 50), opts)  # warm caches
    rows = []
    for n in cfg.ns:
        p = BoundaryParams(b0, b1, c0, cm1, int(n))
        times = []
        for _ in range(max(1, cfg.reps)):
            t0 = time.perf_counter()
            solve_spectrum(p, opts)
            times.append(1e3 * (time.perf_counter() - t0))
        rows.append((int(n), float(np.median(times))))
    return rows


# -- random parameter draws -----------------------------------------------

CIRCLE_MARGIN = 0.1


def random_params(rng: np.random.Generator, n: int, kind: str = "real",
                  margin: float = CIRCLE_MARGIN) -> BoundaryParams:
    """Boundary entries of modulus at most 2: uniform on [-2, 2] for real draws
    and uniform on the radius-2 disc for complex ones.  Draws with a boundary
    root inside the annulus ``||u| - 1| < margin`` are rejected."""
    from .kernel import classify_roots

    while True:
        if kind == "real":
            v = rng.uniform(-2, 2, 4)
        elif kind == "complex":
            v = 2 * np.sqrt(rng.uniform(0, 1, 4)) * np.exp(2j * np.pi * rng.uniform(0, 1, 4))
        else:
            raise ValueError(f"kind must be 'real' or 'complex', not {kind!r}")
        p = BoundaryParams(*v, n=n)
        if all(abs(abs(u) - 1) >= margin for u in classify_roots(p).roots):
            return p


def oracle_check(kind: str = "real", draws: int = 10, n: int = 100, seed: int = 0,
                 M=None, refine_special: bool = True) -> list:
    """Solver vs dense oracle on random draws; rows ``(draw, max_dist, mean_dist)``."""
    rng = np.random.default_rng(seed)
    opts = SolverOptions(fixed_iterations=M, refine_special=refine_special)
    rows = []
    for i in range(draws):
        p = random_params(rng, n, kind)
        lam = solve_spectrum(p, opts).eigenvalues
        mx, mean, _ = match_spectra(lam, dense_eigenvalues_of(p))
        rows.append((i, mx, mean))
    return rows
