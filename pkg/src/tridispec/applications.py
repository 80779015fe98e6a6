"""Two applications: finite-difference advection-diffusion spectra and the
failure of periodic boundary conditions as a stability proxy."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import HypothesisViolation, NoRootInInterval, SpectrumBoundViolation
from .kernel import DEFLATE_TOL, BoundaryParams
from .regular import SolverOptions
from .spectrum import solve_spectrum
from .transform import GeneralTridiagonal, to_canonical

BCS = ("dirichlet", "mixed")


# -- advection-diffusion --------------------------------------------------

@dataclass(frozen=True)
class AdvDiffSystem:
    """``u_t = u_xx + 2K u_x`` on ``[0, 1]`` with ``n`` grid intervals.

    ``B`` is the difference matrix without the ``n^2`` factor: size ``n - 1``
    for Dirichlet ends, size ``n`` when the right end is Neumann.
    """

    K: float
    n: int
    bc: str
    B: GeneralTridiagonal

    @property
    def scale(self) -> float:
        return float(self.n) ** 2

    @property
    def size(self) -> int:
        return self.B.size

    def dense(self) -> np.ndarray:
        """``n^2 B`` assembled straight from the difference stencil."""
        m = self.size
        K, n = self.K, self.n
        M = np.diag(np.full(m, -2.0)) + np.diag(np.full(m - 1, 1 + K / n), 1) \
            + np.diag(np.full(m - 1, 1 - K / n), -1)
        if self.bc == "mixed":
            M[-1, -2] = 2.0
        return self.scale * M


def advdiff_build(K: float, n: int, bc: str = "dirichlet") -> AdvDiffSystem:
    K = float(K)
    n = int(n)
    if bc not in BCS:
        raise ValueError(f"bc must be one of {BCS}")
    if n < 3:
        raise ValueError("need n >= 3")
    if n <= abs(K):
        raise HypothesisViolation(f"n={n} must exceed |K|={abs(K)}")
    x = K / n
    alpha = np.sqrt((1 - x) / (1 + x))
    q = np.sqrt(1 - x * x)
    d = -2 / q
    if bc == "dirichlet":
        params = BoundaryParams(n=n - 2)
    else:
        params = BoundaryParams(cm1=1 - 2 / (1 - x), n=n - 1)
    B = GeneralTridiagonal(q, d, np.full(params.n, alpha), params)
    return AdvDiffSystem(K, n, bc, B)


ADVDIFF_OPTIONS = SolverOptions(refine_special=True)


def advdiff_spectrum(sys: AdvDiffSystem, opts: SolverOptions = ADVDIFF_OPTIONS,
                     check_bound: bool = True, bound_tol: float = 1e-6) -> np.ndarray:
    """Eigenvalues ``nu = n^2 q (lambda + d)`` of ``n^2 B``, largest real part first.

    For Dirichlet ends, and for mixed ends with ``K <= 0``, every eigenvalue is
    real and below ``-K^2``; a violation raises.
    """
    params, conj = to_canonical(sys.B)
    lam = solve_spectrum(params, opts).eigenvalues
    nu = sys.scale * conj.q * (lam + conj.d)
    nu = nu[np.argsort(-nu.real, kind="stable")]
    if check_bound and (sys.bc == "dirichlet" or sys.K <= 0):
        bound = -sys.K ** 2 + bound_tol
        tol_im = 1e-9 * np.maximum(1.0, np.abs(nu))
        if np.any(np.abs(nu.imag) > tol_im) or np.any(nu.real >= bound):
            raise SpectrumBoundViolation(
                f"K={sys.K}, n={sys.n}, {sys.bc}: max Re nu={nu.real.max():.6g}, "
                f"max |Im nu|={np.abs(nu.imag).max():.3g}")
    return nu


def leading_eigenvalue(sys: AdvDiffSystem, opts: SolverOptions = ADVDIFF_OPTIONS) -> float:
    return float(advdiff_spectrum(sys, opts, check_bound=False)[0].real)


@dataclass(frozen=True)
class LeadingAsymptotic:
    nu: float  # from the transcendental equation for zeta
    nu_closed: float  # -4K^2 / (e^{2K} + 1)
    zeta: float


def leading_eigenvalue_asymptotic(K: float) -> LeadingAsymptotic:
    """Large-n leading eigenvalue for mixed ends and ``K > 0``.

    Solves ``ln(zeta) (zeta + 1) = 2K (zeta - 1)`` on ``(0, 1)`` in the variable
    ``x = ln(zeta)``, which keeps ``zeta ~ e^{-2K}`` representable for large K.
    """
    K = float(K)
    if K <= 0:
        raise ValueError("K must be positive")
    nu_closed = -4 * K * K / (np.exp(2 * K) + 1)

    def phi(x):
        return x * (np.exp(x) + 1) - 2 * K * np.expm1(x)

    lo = max(-4 * K, np.log(1e-300))
    hi = -1e-12
    if not phi(lo) < 0 < phi(hi):
        raise NoRootInInterval(f"no root of the zeta equation for K={K}")
    x = brentq(phi, lo, hi, xtol=1e-15, maxiter=200)
    return LeadingAsymptotic(-K * K + (x / 2) ** 2, float(nu_closed), float(np.exp(x)))


# -- periodic boundary failure --------------------------------------------

SIDES = ("left", "right", "both")


@dataclass(frozen=True)
class FailureSpec:
    r1: complex
    r2: complex
    side: str = "left"
    n: int = 100

    def __post_init__(self):
        object.__setattr__(self, "r1", complex(self.r1))
        object.__setattr__(self, "r2", complex(self.r2))
        if self.side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}")
        if self.r1 == 0 or self.r2 == 0:
            raise ValueError("r1 and r2 must be nonzero")

    @property
    def params(self) -> BoundaryParams:
        s = -(1 / self.r1 + 1 / self.r2)
        p = 1 / (self.r1 * self.r2)
        kw = {}
        if self.side in ("left", "both"):
            kw.update(b0=s, b1=p)
        if self.side in ("right", "both"):
            kw.update(c0=s, cm1=p)
        return BoundaryParams(n=self.n, **kw)


def in_failure_region(a, b):
    """``0 < a < 1`` and ``|b| < sqrt(a/(2-a) - a^2)`` for ``r1 = a + ib``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        rhs = a / (2 - a) - a * a
        out = (a > 0) & (a < 1) & (rhs > 0) & (np.abs(b) < np.sqrt(np.where(rhs > 0, rhs, 0)))
    return out if out.ndim else bool(out)


def exceeds_two(r1):
    """``Re(r1 + 1/r1) = a + a/(a^2+b^2) > 2``."""
    r1 = np.asarray(r1, dtype=complex)
    a, b = r1.real, r1.imag
    with np.errstate(invalid="ignore", divide="ignore"):
        out = a + a / (a * a + b * b) > 2
    return out if out.ndim else bool(out)


@dataclass
class PBCReport:
    spec: FailureSpec
    params: BoundaryParams
    region: bool
    predicted: complex
    unstable: bool
    notes: list = field(default_factory=list)
    verified: Optional[complex] = None  # nearest dense-oracle eigenvalue
    verify_error: Optional[float] = None
    solver_value: Optional[complex] = None  # nearest fast-solver eigenvalue

    def to_dict(self) -> dict:
        p = self.params
        c = lambda z: [float(np.real(z)), float(np.imag(z))]
        d = {
            "r1": c(self.spec.r1), "r2": c(self.spec.r2), "side": self.spec.side,
            "params": {"b0": c(p.b0), "b1": c(p.b1), "c0": c(p.c0), "cm1": c(p.cm1), "n": p.n},
            "region": self.region, "predicted": c(self.predicted), "unstable": self.unstable,
            "notes": self.notes,
        }
        if self.verified is not None:
            d["verified"] = c(self.verified)
            d["verify_error"] = self.verify_error
        if self.solver_value is not None:
            d["solver_value"] = c(self.solver_value)
        return d


def pbc_failure(spec: FailureSpec, verify: bool = False, opts: SolverOptions = SolverOptions()) -> PBCReport:
    """Boundary rows built from ``(r1, r2)`` and the eigenvalue ``r1 + 1/r1`` they
    produce when ``|r1| < 1 < |r2|``.  A real part above 2 means the shifted
    system ``A - 2I`` is unstable while its periodic counterpart is not."""
    params = spec.params
    r1 = spec.r1
    predicted = r1 + 1 / r1
    notes = []
    if abs(params.b1 - 1) <= DEFLATE_TOL or abs(params.cm1 - 1) <= DEFLATE_TOL:
        notes.append("r1 r2 = 1: the boundary row deflates")
    if not (abs(r1) < 1 < abs(spec.r2)):
        notes.append("prediction assumes |r1| < 1 < |r2|")
    rep = PBCReport(spec, params, bool(exceeds_two(r1)) and abs(r1) < 1, complex(predicted),
                    bool(predicted.real > 2), notes)
    if verify:
        from .oracle import dense_eigenvalues_of

        ev = dense_eigenvalues_of(params)
        j = int(np.argmin(np.abs(ev - predicted)))
        rep.verified = complex(ev[j])
        rep.verify_error = float(abs(ev[j] - predicted))
        lam = solve_spectrum(params, opts).eigenvalues
        rep.solver_value = complex(lam[int(np.argmin(np.abs(lam - predicted)))])
    return rep


def failure_region_samples(a_min=-0.2, a_max=1.2, b_min=-0.6, b_max=0.6, na=141, nb=121):
    if na < 2 or nb < 2:
        raise ValueError("grid resolution must be at least 2")
    A, Bg = np.meshgrid(np.linspace(a_min, a_max, na), np.linspace(b_min, b_max, nb), indexing="ij")
    member = in_failure_region(A.ravel(), Bg.ravel())
    return list(zip(A.ravel().tolist(), Bg.ravel().tolist(), member.astype(int).tolist()))


def region_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["a", "b", "member"])
    for a, b, m in rows:
        w.writerow([repr(float(a)), repr(float(b)), int(m)])
    return buf.getvalue()
