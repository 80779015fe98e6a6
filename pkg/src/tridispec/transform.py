"""General tridiagonal B-form ``B = q (D A D^{-1} + d I)`` and its reduction
to the canonical matrix A.

``B`` has diagonal ``q(d - b0), q d, ..., q d, q(d - c0)``, sub-diagonal
``q alpha_k`` (the last one times ``1 - cm1``) and super-diagonal
``q / alpha_k`` (the first one times ``1 - b1``).  ``D`` carries the
cumulative products of the alphas, which may grow exponentially, so it is kept
as complex logarithms.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .kernel import BoundaryParams
from .regular import SolverOptions
from .spectrum import Eigenpair, SpectrumResult, solve_spectrum

COND_WARN_LOG = 30.0  # warn once max |log eps| exceeds this (|eps| ~ 1e13)


@dataclass(frozen=True)
class GeneralTridiagonal:
    q: complex
    d: complex
    alphas: np.ndarray
    boundary: BoundaryParams

    def __post_init__(self):
        object.__setattr__(self, "q", complex(self.q))
        object.__setattr__(self, "d", complex(self.d))
        a = np.asarray(self.alphas, dtype=complex).copy()
        a.setflags(write=False)
        object.__setattr__(self, "alphas", a)
        if self.q == 0:
            raise ValueError("q must be nonzero")
        if len(a) != self.boundary.n:
            raise ValueError(f"need {self.boundary.n} alphas, got {len(a)}")
        if np.any(a == 0):
            raise ValueError("alphas must be nonzero")

    @property
    def n(self) -> int:
        return self.boundary.n

    @property
    def size(self) -> int:
        return self.boundary.n + 1


@dataclass(frozen=True)
class ConjugationData:
    q: complex
    d: complex
    log_eps: np.ndarray  # complex log of D's diagonal, log_eps[0] = 0

    @property
    def max_log_magnitude(self) -> float:
        return float(np.max(np.abs(self.log_eps.real)))

    @property
    def ill_conditioned(self) -> bool:
        return self.max_log_magnitude > COND_WARN_LOG

    @property
    def eps(self) -> np.ndarray:
        return np.exp(self.log_eps)


@dataclass(frozen=True)
class MappedEigenpair:
    """Eigenpair of B; the vector is ``value * exp(log_scale)``."""

    lam: complex
    kind: str
    value: Optional[np.ndarray] = None
    log_scale: float = 0.0
    warnings: tuple = ()

    @property
    def vector(self) -> Optional[np.ndarray]:
        if self.value is None:
            return None
        with np.errstate(over="ignore"):
            return self.value * np.exp(self.log_scale)


def to_canonical(B: GeneralTridiagonal):
    log_eps = np.concatenate([[0j], np.cumsum(np.log(B.alphas))])
    return B.boundary, ConjugationData(B.q, B.d, log_eps)


def map_eigenvalue(conj: ConjugationData, lam):
    return conj.q * (np.asarray(lam) + conj.d)


def map_eigenpair(conj: ConjugationData, pair: Eigenpair) -> MappedEigenpair:
    lam = complex(conj.q * (pair.lam + conj.d))
    warns = ()
    if conj.ill_conditioned:
        warns = (f"D spans e^{conj.max_log_magnitude:.1f}; eigenvector of B is ill conditioned",)
    if pair.vector is None:
        return MappedEigenpair(lam, pair.kind, None, 0.0, warns)
    with np.errstate(divide="ignore"):
        logv = conj.log_eps + np.log(np.asarray(pair.vector, dtype=complex))
    top = float(np.max(logv.real))
    return MappedEigenpair(lam, pair.kind, np.exp(logv - top), top, warns)


def solve_general(B: GeneralTridiagonal, opts: SolverOptions = SolverOptions()):
    """Spectrum of B via the canonical problem; returns ``(eigenpairs, result)``."""
    params, conj = to_canonical(B)
    res: SpectrumResult = solve_spectrum(params, opts)
    return [map_eigenpair(conj, p) for p in res.eigenpairs], res


def toeplitz(sigma, tau, delta, n: int) -> GeneralTridiagonal:
    """Tridiagonal Toeplitz: sub ``sigma``, super ``tau``, diagonal ``delta``."""
    q = np.sqrt(complex(sigma) * complex(tau))
    return GeneralTridiagonal(q, delta / q, np.full(n, sigma / q), BoundaryParams(n=n))


def flocking_matrix(psi, sigma, tau, phi, theta, n: int) -> GeneralTridiagonal:
    """Consensus matrix: first row ``(psi, 0, ...)``, interior sub ``sigma`` and
    super ``tau``, last row ``(..., sigma + phi, theta)``."""
    if sigma == 0 or tau == 0:
        raise ValueError("sigma and tau must be nonzero")
    q = np.sqrt(complex(sigma) * complex(tau))
    params = BoundaryParams(b0=-psi / q, b1=1, c0=-theta / q, cm1=-phi / sigma, n=n)
    return GeneralTridiagonal(q, 0, np.full(n, sigma / q), params)
