"""Regular roots of H near the unit circle.

Phase roots of ``k(t) = Arg(e^{2int} / g(e^{it}))`` are bracketed on a grid of
``N >= 6n`` points, bisected, and then refined by iterating the branch of
``z -> (g(z))^{1/2n}`` anchored at each phase root.  All brackets are processed
as numpy arrays; chunks of fixed size may be farmed out to threads without
changing a single bit of the result.
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BracketCountMismatch, DegenerateCircleRoot
from .kernel import (
    CIRCLE_TOL,
    POLE_TOL,
    AuxiliaryFunction,
    BoundaryParams,
    RootClassification,
    classify_roots,
)

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class SolverOptions:
    eps_t: float = 1e-14
    eps: float = 1e-15
    max_iter: int = 60
    n_multiplier: int = 6
    # run exactly this many contraction steps instead of iterating to convergence
    fixed_iterations: Optional[int] = None
    refine_special: bool = False
    vectors: bool = False
    threads: Optional[int] = None
    circle_tol: float = CIRCLE_TOL
    unit_tol: float = 1e-8
    # |k_lo - k_hi| below this keeps a sign change as a bracket
    retention: float = np.pi
    pm2_tol: float = 1e-8
    chunk: int = 16384

    def grid_size(self, n: int, classification: Optional[RootClassification] = None) -> int:
        # the mean phase step is (2n+4) 2pi/N; n+2 keeps it at 2pi/3 for small n too
        N = max(self.n_multiplier, 6) * (n + 2)
        if classification is None:
            return N
        # roots of g close to the circle make the phase locally faster than 2n
        fine = int(math.ceil(max(self.n_multiplier, 6) / 2 * phase_speed_bound(classification, n)))
        return min(max(N, fine), GRID_CAP * N)


GRID_CAP = 64


def phase_speed_bound(classification: RootClassification, n: int) -> float:
    """Upper bound on ``|d/dt (2nt - arg g(e^{it}))|``.

    Each factor ``(1 - uz)/(z - u)`` turns at rate ``(1 - |u|^2)/|z - u|^2``,
    at most ``(1 + |u|)/|1 - |u||`` in modulus.  Unit-modulus roots cancel.
    """
    speed = 2.0 * n
    for u in classification.roots:
        gap = abs(1 - abs(u))
        if gap > classification.tol:
            speed += (1 + abs(u)) / gap
    return speed


@dataclass(frozen=True)
class Bracket:
    t_lo: float
    t_hi: float
    k_lo: float
    k_hi: float


@dataclass(frozen=True)
class RegularRoot:
    t: float
    z: complex
    iterations: int
    residual: float
    is_exact: bool = False
    converged: bool = True
    history: tuple = ()


@dataclass
class RegularRootSet:
    """Array form of the regular roots, sorted by ``t``."""

    t: np.ndarray
    z: np.ndarray
    iterations: np.ndarray
    residual: np.ndarray
    converged: np.ndarray
    is_exact: bool
    trivial: np.ndarray  # roots within unit_tol of +-1
    diagnostics: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    def to_list(self, include_trivial=False):
        keep = np.ones(len(self.t), bool) if include_trivial else ~self.trivial
        return [
            RegularRoot(float(t), complex(z), int(i), float(r), self.is_exact, bool(c))
            for t, z, i, r, c in zip(self.t[keep], self.z[keep], self.iterations[keep],
                                      self.residual[keep], self.converged[keep])
        ]


def _gfun(params, classification=None):
    classification = classification or classify_roots(params)
    return AuxiliaryFunction(classification), classification


def _phase(g, n2, t):
    t = np.asarray(t, dtype=float)
    return np.angle(np.exp(1j * (n2 * t)) * np.conj(g(np.exp(1j * t))))


def phase_function(params: BoundaryParams, t, classification=None):
    """Principal argument of ``e^{2int} / g(e^{it})``, in ``(-pi, pi]``."""
    g, _ = _gfun(params, classification)
    return _phase(g, 2 * params.n, t)


def _scan(g, n, N):
    ell = np.arange(N)
    t = TWO_PI * ell / N
    z = np.exp(1j * t)
    with np.errstate(all="ignore"):
        gv = g(z)
    bad = ~np.isfinite(gv) | (g.pole_distance(z) <= POLE_TOL)
    # exact phase of e^{2int} on the grid: 2n*l mod N is an integer
    phase = TWO_PI * ((2 * n * ell) % N) / N
    if bad.any():
        t = t.copy()
        t[bad] += TWO_PI / (4 * N)
        z[bad] = np.exp(1j * t[bad])
        with np.errstate(all="ignore"):
            gv[bad] = g(z[bad])
        phase[bad] = 2 * n * t[bad]
        again = ~np.isfinite(gv[bad]) | (g.pole_distance(z[bad]) <= POLE_TOL)
        if again.any():
            raise DegenerateCircleRoot("pole of g on the bracket grid after nudge")
    k = np.angle(np.exp(1j * phase) * np.conj(gv))
    return t, k


def _select(t, k, retention):
    k_next = np.roll(k, -1)
    t_next = np.roll(t, -1)
    t_next[-1] += TWO_PI
    pos = k >= 0
    keep = (pos != np.roll(pos, -1)) & (np.abs(k - k_next) < retention)
    return t[keep], t_next[keep], k[keep], k_next[keep]


def find_brackets(params: BoundaryParams, N: Optional[int] = None, *, retention: float = np.pi,
                  classification: Optional[RootClassification] = None, strict: bool = True):
    n = params.n
    g, cls = _gfun(params, classification)
    N = SolverOptions().grid_size(n, cls) if N is None else int(N)
    if N < 6 * n:
        raise ValueError(f"grid size N={N} below the 6n={6 * n} floor")
    t, k = _scan(g, n, N)
    lo, hi, klo, khi = _select(t, k, retention)
    expected = cls.expected_phase_roots(n)
    if strict and len(lo) != expected:
        raise BracketCountMismatch(len(lo), expected, {"N": N, "Q": cls.Q, "n": n})
    return [Bracket(float(a), float(b), float(c), float(d)) for a, b, c, d in zip(lo, hi, klo, khi)]


def bisection_steps(width: float, eps_t: float) -> int:
    if width <= eps_t:
        return 0
    return min(64, int(math.ceil(math.log2(width / eps_t))))


def _bisect(g, n2, lo, hi, klo, khi, steps):
    lo = lo.copy()
    hi = hi.copy()
    klo = klo.copy()
    khi = khi.copy()
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        km = _phase(g, n2, mid)
        same = (km >= 0) == (klo >= 0)
        lo = np.where(same, mid, lo)
        klo = np.where(same, km, klo)
        hi = np.where(same, hi, mid)
        khi = np.where(same, khi, km)
    # final secant step inside the bracket
    den = khi - klo
    with np.errstate(all="ignore"):
        ts = lo - klo * (hi - lo) / den
    ok = (den != 0) & (ts >= lo) & (ts <= hi)
    t = np.where(ok, ts, 0.5 * (lo + hi))
    return np.mod(t, TWO_PI)


def bisect_phase_root(params: BoundaryParams, bracket: Bracket, eps_t: float = 1e-14,
                      classification=None) -> float:
    g, _ = _gfun(params, classification)
    steps = bisection_steps(bracket.t_hi - bracket.t_lo, eps_t)
    t = _bisect(g, 2 * params.n, np.array([bracket.t_lo]), np.array([bracket.t_hi]),
                np.array([bracket.k_lo]), np.array([bracket.k_hi]), steps)
    return float(t[0])


def inverse_branch(t_k, n: int, w):
    """Branch of ``w -> w^{1/2n}`` that maps ``e^{2 i n t_k}`` back to ``e^{i t_k}``."""
    t_k = np.asarray(t_k, dtype=float)
    w = np.asarray(w, dtype=complex)
    n2 = 2 * n
    theta = np.angle(w)
    m = np.ceil((n2 * t_k - theta - np.pi) / TWO_PI)
    out = np.exp(np.log(np.abs(w)) / n2 + 1j * (theta + TWO_PI * m) / n2)
    return out if out.ndim else complex(out)


def _residual(g, n2, z):
    with np.errstate(all="ignore"):
        gz = g(z)
        zp = np.exp(n2 * np.log(z))
        return np.abs(zp - gz) / np.maximum(np.abs(gz), 1e-300)


def _contract(g, n, t, eps, max_iter, fixed=None, record=False):
    n2 = 2 * n
    z = np.exp(1j * t)
    iters = np.zeros(len(t), dtype=np.int64)
    done = np.zeros(len(t), dtype=bool)
    prev = np.full(len(t), np.inf)
    history = [_residual(g, n2, z)] if record else None
    steps = max_iter if fixed is None else fixed
    for _ in range(steps):
        idx = np.flatnonzero(~done)
        if idx.size == 0:
            break
        zi = z[idx]
        zn = inverse_branch(t[idx], n, g(zi))
        step = np.abs(zn - zi)
        z[idx] = zn
        iters[idx] += 1
        if record:
            history.append(_residual(g, n2, z))
        if fixed is not None:
            continue
        tol = eps * np.maximum(1.0, np.abs(zn))
        # a step that stops shrinking at the roundoff floor also counts
        stalled = (step >= prev[idx]) & (step < 64 * tol)
        done[idx] = (step <= tol) | stalled
        prev[idx] = step
    converged = np.ones(len(t), bool) if fixed is not None else done
    return z, iters, converged, history


def contraction_refine(params: BoundaryParams, t_k: float, eps: float = 1e-15, max_iter: int = 60,
                       *, fixed: Optional[int] = None, record: bool = False,
                       classification=None) -> RegularRoot:
    g, _ = _gfun(params, classification)
    n2 = 2 * params.n
    t = np.array([float(t_k)])
    if params.is_real and fixed is None:
        z = np.exp(1j * t)
        res = _residual(g, n2, z)
        hist = (float(res[0]),) if record else ()
        return RegularRoot(float(t_k), complex(z[0]), 0, float(res[0]), True, True, hist)
    z, iters, conv, hist = _contract(g, params.n, t, eps, max_iter, fixed, record)
    res = _residual(g, n2, z)
    history = tuple(float(h[0]) for h in hist) if record else ()
    return RegularRoot(float(t_k), complex(z[0]), int(iters[0]), float(res[0]), False,
                       bool(conv[0]), history)


def _process(g, n, lo, hi, klo, khi, steps, opts, exact):
    t = _bisect(g, 2 * n, lo, hi, klo, khi, steps)
    if exact:
        z = np.exp(1j * t)
        iters = np.zeros(len(t), np.int64)
        conv = np.ones(len(t), bool)
    else:
        z, iters, conv, _ = _contract(g, n, t, opts.eps, opts.max_iter, opts.fixed_iterations)
    return t, z, iters, conv


def solve_regular(params: BoundaryParams, opts: SolverOptions = SolverOptions(),
                  classification: Optional[RootClassification] = None,
                  extra_counts: tuple = ()) -> RegularRootSet:
    """``extra_counts`` lists further accepted bracket counts (a +-2 eigenvalue
    turns a simple root of H at +-1 into a triple one and hides two brackets)."""
    n = params.n
    cls = classification or classify_roots(params, opts.circle_tol)
    if cls.degenerate and not params.is_real:
        raise DegenerateCircleRoot(f"g has a zero/pole on the unit circle: {cls.on_circle}")
    g = AuxiliaryFunction(cls)
    timings = {}
    t0 = time.perf_counter()
    N = opts.grid_size(n, cls)
    tg, kg = _scan(g, n, N)
    lo, hi, klo, khi = _select(tg, kg, opts.retention)
    expected = cls.expected_phase_roots(n)
    timings["brackets"] = time.perf_counter() - t0
    if len(lo) != expected and len(lo) not in extra_counts:
        raise BracketCountMismatch(len(lo), expected, {"N": N, "Q": cls.Q, "n": n})
    steps = bisection_steps(TWO_PI / N, opts.eps_t)
    exact = params.is_real and opts.fixed_iterations is None
    t1 = time.perf_counter()
    chunks = [slice(i, i + opts.chunk) for i in range(0, len(lo), opts.chunk)]
    threads = opts.threads or os.cpu_count() or 1
    work = lambda s: _process(g, n, lo[s], hi[s], klo[s], khi[s], steps, opts, exact)
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(s) for s in chunks]
    t = np.concatenate([p[0] for p in parts])
    z = np.concatenate([p[1] for p in parts])
    iters = np.concatenate([p[2] for p in parts])
    conv = np.concatenate([p[3] for p in parts])
    order = np.argsort(t, kind="stable")
    t, z, iters, conv = t[order], z[order], iters[order], conv[order]
    res = _residual(g, 2 * n, z)
    timings["roots"] = time.perf_counter() - t1
    trivial = (np.abs(z - 1) < opts.unit_tol) | (np.abs(z + 1) < opts.unit_tol)
    diag = {
        "N": N,
        "brackets": int(len(lo)),
        "bisection_steps": steps,
        "max_iterations": int(iters.max()) if len(iters) else 0,
        "mean_iterations": float(iters.mean()) if len(iters) else 0.0,
        "nonconverged": int((~conv).sum()),
        "timings": timings,
    }
    return RegularRootSet(t, z, iters, res, conv, exact, trivial, diag)


def regular_roots(params: BoundaryParams, opts: SolverOptions = SolverOptions(),
                  classification=None) -> list:
    """Regular roots with the trivial +-1 roots set aside, sorted by ``t``."""
    return solve_regular(params, opts, classification).to_list()
