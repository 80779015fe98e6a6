"""Desk-scale dense verification.

The eigenvalue oracle is a shifted complex QR iteration on the upper
Hessenberg form (a tridiagonal matrix already is one).  It shares nothing with
the fast solver.  The same routine runs compiled on complex128 and, through
its pure-Python body, on object arrays of mpmath numbers when double precision
cannot resolve the quantity under test.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np
from numba import njit

from .errors import LengthMismatch, OracleNonConvergence, SizeCap
from .kernel import BoundaryParams

SIZE_CAP = 2000


@dataclass(frozen=True)
class DenseMatrix:
    size: int
    entries: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.max(np.sum(np.abs(self.entries.astype(complex)), axis=1)))


def assemble_dense(obj, cap: int = SIZE_CAP) -> DenseMatrix:
    """Dense canonical matrix of ``BoundaryParams`` or dense B of a B-form."""
    from .transform import GeneralTridiagonal

    if isinstance(obj, GeneralTridiagonal):
        p, q, d, a = obj.boundary, obj.q, obj.d, obj.alphas
    elif isinstance(obj, BoundaryParams):
        p, q, d, a = obj, 1.0, 0.0, np.ones(obj.n, dtype=complex)
    else:
        raise TypeError(f"cannot assemble {type(obj).__name__}")
    m = p.n + 1
    if m > cap:
        raise SizeCap(f"size {m} exceeds the dense cap {cap}")
    M = np.zeros((m, m), dtype=complex)
    i = np.arange(m - 1)
    M[i + 1, i] = q * a
    M[i, i + 1] = q / a
    M[i, i] = q * d
    M[m - 1, m - 1] = q * d
    M[0, 0] = q * (d - p.b0)
    M[0, 1] *= 1 - p.b1
    M[m - 1, m - 2] *= 1 - p.cm1
    M[m - 1, m - 1] = q * (d - p.c0)
    return DenseMatrix(m, M)


def assemble_conjugated(params: BoundaryParams, conj) -> DenseMatrix:
    """``q (D A D^{-1} + d I)`` formed from the dense canonical matrix."""
    A = assemble_dense(params).entries
    eps = np.exp(conj.log_eps)
    M = conj.q * (eps[:, None] * A / eps[None, :] + conj.d * np.eye(len(eps)))
    return DenseMatrix(len(eps), M)


def _hqr(H, ev, eps, maxit):
    """Eigenvalues of the upper Hessenberg H (overwritten) into ev.

    Returns the number of eigenvalues left unconverged (0 on success); the
    converged ones occupy ``ev[k:]`` for the returned k.
    """
    n = H.shape[0]
    anorm = abs(H[0, 0]) * 0
    for i in range(n):
        for j in range(n):
            anorm += abs(H[i, j])
    if anorm == 0:
        for i in range(n):
            ev[i] = H[i, i]
        return 0
    cs = [H[0, 0] for _ in range(n)]
    ss = [H[0, 0] for _ in range(n)]
    hi = n - 1
    its = 0
    total = 0
    while hi >= 0:
        if hi == 0:
            ev[0] = H[0, 0]
            hi -= 1
            break
        l = hi
        while l > 0:
            s = abs(H[l - 1, l - 1]) + abs(H[l, l])
            if s == 0:
                s = anorm
            if abs(H[l, l - 1]) <= eps * s:
                H[l, l - 1] = H[l, l - 1] * 0
                break
            l -= 1
        if l == hi:
            ev[hi] = H[hi, hi]
            hi -= 1
            its = 0
            continue
        if l == hi - 1:
            a = H[hi - 1, hi - 1]
            b = H[hi - 1, hi]
            c = H[hi, hi - 1]
            d = H[hi, hi]
            half = (a - d) * 0.5
            disc = (half * half + b * c) ** 0.5
            mean = (a + d) * 0.5
            ev[hi - 1] = mean + disc
            ev[hi] = mean - disc
            hi -= 2
            its = 0
            continue
        its += 1
        total += 1
        if total > maxit * n:
            return hi + 1
        if its % 11 == 10:
            mu = H[hi, hi] + abs(H[hi, hi - 1]) * 0.75 + abs(H[hi - 1, hi - 2]) * 0.5
        else:
            a = H[hi - 1, hi - 1]
            b = H[hi - 1, hi]
            c = H[hi, hi - 1]
            d = H[hi, hi]
            half = (a - d) * 0.5
            disc = (half * half + b * c) ** 0.5
            mean = (a + d) * 0.5
            mu1 = mean + disc
            mu2 = mean - disc
            mu = mu1 if abs(mu1 - d) < abs(mu2 - d) else mu2
        for k in range(l, hi + 1):
            H[k, k] = H[k, k] - mu
        # H - mu I = Q R by Givens rotations on the active block
        for k in range(l, hi):
            x = H[k, k]
            y = H[k + 1, k]
            sc = abs(x) + abs(y)
            if sc == 0:
                cs[k] = x * 0 + 1
                ss[k] = x * 0
                continue
            xs = x / sc
            ys = y / sc
            r = sc * (abs(xs) * abs(xs) + abs(ys) * abs(ys)) ** 0.5
            c = x / r
            s = y / r
            cs[k] = c
            ss[k] = s
            cc = c.conjugate()
            sb = s.conjugate()
            for j in range(k, hi + 1):
                u = H[k, j]
                v = H[k + 1, j]
                H[k, j] = cc * u + sb * v
                H[k + 1, j] = c * v - s * u
        # R Q + mu I
        for k in range(l, hi):
            c = cs[k]
            s = ss[k]
            cc = c.conjugate()
            sb = s.conjugate()
            top = k + 2 if k + 2 < hi + 1 else hi + 1
            for i in range(l, top):
                u = H[i, k]
                v = H[i, k + 1]
                H[i, k] = u * c + v * s
                H[i, k + 1] = v * cc - u * sb
        for k in range(l, hi + 1):
            H[k, k] = H[k, k] + mu
    return 0


_hqr_compiled = njit(cache=True)(_hqr)


def dense_eigenvalues(M, *, precision: str = "double", dps: int = 50, maxit: int = 40,
                      cap: int = SIZE_CAP, raw: bool = False) -> np.ndarray:
    """All eigenvalues of a (Hessenberg) dense matrix.

    ``precision="mp"`` runs the same iteration in mpmath at ``dps`` digits and
    rounds the result to complex128, or with ``raw=True`` returns the mpc
    values as an object array.
    """
    entries = M.entries if isinstance(M, DenseMatrix) else np.asarray(M)
    m = entries.shape[0]
    if m > cap:
        raise SizeCap(f"size {m} exceeds the dense cap {cap}")
    if np.any(np.abs(np.tril(entries.astype(complex), -2)) > 0):
        raise ValueError("oracle expects an upper Hessenberg matrix")
    if precision == "double":
        H = np.array(entries, dtype=np.complex128)
        ev = np.zeros(m, dtype=np.complex128)
        left = _hqr_compiled(H, ev, 2.0 ** -52, maxit)
        out = ev
    elif precision == "mp":
        with mpmath.workdps(dps):
            H = np.empty((m, m), dtype=object)
            for i in range(m):
                for j in range(m):
                    H[i, j] = mpmath.mpc(entries[i, j])
            ev = np.empty(m, dtype=object)
            ev[:] = mpmath.mpc(0)
            left = _hqr(H, ev, mpmath.mpf(2) ** (-int(dps * 3.33)), maxit)
            out = ev if raw else np.array([complex(e) for e in ev], dtype=complex)
    else:
        raise ValueError(f"unknown precision {precision!r}")
    if left:
        raise OracleNonConvergence(f"{left} eigenvalues did not converge", out[left:])
    return out


def dense_eigenvalues_of(obj, **kw) -> np.ndarray:
    return dense_eigenvalues(assemble_dense(obj, kw.pop("cap", SIZE_CAP)), **kw)


def match_spectra(a, b):
    """Greedy nearest-neighbour matching.  ``perm[i]`` indexes b for ``a[i]``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if len(a) != len(b):
        raise LengthMismatch(f"{len(a)} vs {len(b)} eigenvalues")
    if len(a) == 0:
        return 0.0, 0.0, np.zeros(0, dtype=np.int64)
    perm = np.full(len(a), -1, dtype=np.int64)
    dist = np.zeros(len(a))
    free = np.ones(len(b), dtype=bool)
    for i in np.argsort(-np.abs(a), kind="stable"):
        d = np.where(free, np.abs(b - a[i]), np.inf)
        j = int(np.argmin(d))
        perm[i] = j
        dist[i] = d[j]
        free[j] = False
    return float(dist.max()), float(dist.mean()), perm


def inverse_iteration_residual(M, lam: complex, steps: int = 3, seed: int = 0) -> float:
    """Backward-error check ``||M x - lam x|| / (||M|| ||x||)`` for an eigenvalue."""
    E = M.entries if isinstance(M, DenseMatrix) else np.asarray(M, dtype=complex)
    m = E.shape[0]
    nrm = float(np.max(np.sum(np.abs(E), axis=1))) or 1.0
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    shifted = E - (lam + nrm * 1e-13) * np.eye(m)
    for _ in range(steps):
        x = np.linalg.solve(shifted, x)
        x /= np.max(np.abs(x))
    return float(np.max(np.abs(E @ x - lam * x)) / nrm)
