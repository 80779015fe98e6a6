"""Canonical problem representation, the associated polynomial H and the
auxiliary function g, plus classification of the two boundary quadratics.

The canonical (n+1)x(n+1) matrix has unit sub/super-diagonals, zero interior
diagonal, first row ``(-b0, 1-b1)`` and last row ``(1-cm1, -c0)``.  Every
quartic object is kept as a product of the two boundary quadratics

    L(z) = z^2 + b0 z + b1        l(z) = b1 z^2 + b0 z + 1
    R(z) = z^2 + c0 z + cm1       r(z) = cm1 z^2 + c0 z + 1

so that ``p = l r``, ``z^4 p(1/z) = L R`` and ``H(z) = z^{2n} L R - l r``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionTooSmall, PoleAtZ

CIRCLE_TOL = 1e-9
DEFLATE_TOL = 1e-14
POLE_TOL = 1e-14


@dataclass(frozen=True)
class BoundaryParams:
    """Boundary entries of the canonical matrix; ``n`` is the last row index,
    so the matrix has ``n + 1`` rows."""

    b0: complex = 0j
    b1: complex = 0j
    c0: complex = 0j
    cm1: complex = 0j
    n: int = 2

    def __post_init__(self):
        for name in ("b0", "b1", "c0", "cm1"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        object.__setattr__(self, "n", int(self.n))
        if self.n < 2:
            raise DimensionTooSmall(f"n={self.n} < 2")

    @property
    def size(self) -> int:
        return self.n + 1

    @property
    def is_real(self) -> bool:
        return all(v.imag == 0 for v in (self.b0, self.b1, self.c0, self.cm1))

    def mirrored(self) -> "BoundaryParams":
        """Parameters of the index-reversed matrix (same spectrum)."""
        return BoundaryParams(b0=self.c0, b1=self.cm1, c0=self.b0, cm1=self.b1, n=self.n)

    def with_n(self, n: int) -> "BoundaryParams":
        return BoundaryParams(b0=self.b0, b1=self.b1, c0=self.c0, cm1=self.cm1, n=n)


def reduce_degenerate(params: BoundaryParams, tol: float = DEFLATE_TOL):
    """Deflate ``b1 == 1`` / ``cm1 == 1``.

    With ``b1 = 1`` the first row is ``(-b0, 0, ...)`` so ``-b0`` splits off and
    the remaining block is the canonical matrix of size ``n`` with a clean left
    boundary.  Same on the right.  Returns ``(params, detached)``.
    """
    detached = []
    b0, b1, c0, cm1, n = params.b0, params.b1, params.c0, params.cm1, params.n
    while True:
        if abs(b1 - 1) <= tol:
            detached.append(-b0)
            b0, b1, n = 0j, 0j, n - 1
        elif abs(cm1 - 1) <= tol:
            detached.append(-c0)
            c0, cm1, n = 0j, 0j, n - 1
        else:
            break
        if n < 2:
            raise DimensionTooSmall(f"deflation left n={n} < 2")
    return BoundaryParams(b0=b0, b1=b1, c0=c0, cm1=cm1, n=n), detached


def deflation_offsets(params: BoundaryParams, tol: float = DEFLATE_TOL):
    """Number of rows removed by :func:`reduce_degenerate` on each side."""
    return int(abs(params.b1 - 1) <= tol), int(abs(params.cm1 - 1) <= tol)


def quadratic_roots(b: complex, c: complex):
    """Roots of the monic ``z^2 + b z + c`` without cancellation: the larger
    root from the sign-consistent square root, the other from Vieta."""
    b = complex(b)
    c = complex(c)
    s = np.sqrt(b * b - 4 * c)
    if (b.conjugate() * s).real < 0:
        s = -s
    q = -(b + s) / 2
    if q == 0:
        return 0j, 0j
    return complex(q), complex(c / q)


@dataclass(frozen=True)
class RootClassification:
    left_roots: tuple
    right_roots: tuple
    Q: int
    w: int
    on_circle: tuple = ()
    unit_roots: tuple = ()  # roots within tol of +-1; each cancels 1-uz against z-u
    tol: float = CIRCLE_TOL

    @property
    def roots(self) -> tuple:
        return tuple(self.left_roots) + tuple(self.right_roots)

    @property
    def degenerate(self) -> bool:
        """A zero/pole of g on the unit circle that does not cancel."""
        return len(self.on_circle) > len(self.unit_roots)

    def expected_phase_roots(self, n: int) -> int:
        return 2 * n + 4 - 2 * self.Q - len(self.unit_roots)


def classify_roots(params: BoundaryParams, tol: float = CIRCLE_TOL) -> RootClassification:
    left = quadratic_roots(params.b0, params.b1)
    right = quadratic_roots(params.c0, params.cm1)
    roots = left + right
    on_circle = tuple(u for u in roots if abs(abs(u) - 1) < tol)
    unit = tuple(u for u in on_circle if min(abs(u - 1), abs(u + 1)) < tol)
    Q = sum(1 for u in roots if abs(u) > 1 and u not in on_circle)
    return RootClassification(
        left_roots=left, right_roots=right, Q=Q, w=2 * Q - 4,
        on_circle=on_circle, unit_roots=unit, tol=tol,
    )


class AuxiliaryFunction:
    """Vectorised ``g(z) = prod_u (1 - u z) / (z - u)`` over the four roots of
    the monic boundary quadratics.

    Roots at +-1 make ``1 - uz`` and ``z - u`` proportional; those factors are
    replaced by the constant ``-u`` so g stays finite on the circle.
    """

    def __init__(self, classification: RootClassification):
        self.classification = classification
        const = 1.0 + 0j
        active = []
        for u in classification.roots:
            if u in classification.unit_roots:
                const *= -(1.0 if u.real > 0 else -1.0)
            else:
                active.append(u)
        self.const = const
        self.active = np.array(active, dtype=complex)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.const, dtype=complex)
        for u in self.active:
            if u == 0:
                out = out / z
            else:
                out = out * (1 - u * z) / (z - u)
        return out

    def pole_distance(self, z):
        z = np.asarray(z, dtype=complex)
        if self.active.size == 0:
            return np.full(z.shape, np.inf)
        return np.min(np.abs(z[..., None] - self.active), axis=-1)


def _boundary_factors(params: BoundaryParams, z):
    L = (z + params.b0) * z + params.b1
    R = (z + params.c0) * z + params.cm1
    l = (params.b1 * z + params.b0) * z + 1
    r = (params.cm1 * z + params.c0) * z + 1
    return L, R, l, r


def eval_g(params: BoundaryParams, z: complex, tol: float = POLE_TOL) -> complex:
    z = complex(z)
    if z == 0:
        raise PoleAtZ("g evaluated at z=0")
    L, R, l, r = _boundary_factors(params, z)
    den = L * R
    if abs(den) <= tol * (1 + abs(z)) ** 4:
        raise PoleAtZ(f"denominator |{den}| vanishes at z={z}")
    return complex(l * r / den)


@dataclass(frozen=True)
class PolyEval:
    value: complex
    log_scale: float = 0.0

    @property
    def reconstructed(self) -> complex:
        with np.errstate(over="ignore", invalid="ignore"):
            return complex(self.value * np.exp(self.log_scale))

    def __abs__(self):
        return float(abs(self.value) * np.exp(self.log_scale))


def _zpow(z, n2):
    return np.exp(n2 * np.log(z))


def eval_H(params: BoundaryParams, z: complex) -> PolyEval:
    """``H(z)`` with ``|z|^{2n}`` absorbed into ``log_scale`` when ``|z| > 1``."""
    z = complex(z)
    n2 = 2 * params.n
    L, R, l, r = _boundary_factors(params, z)
    if abs(z) > 1:
        log_scale = n2 * np.log(abs(z))
        phase = np.exp(1j * n2 * np.angle(z))
        return PolyEval(complex(phase * L * R - l * r * np.exp(-log_scale)), float(log_scale))
    return PolyEval(complex(_zpow(z, n2) * L * R - l * r), 0.0)


def eval_H_scale(params: BoundaryParams, z: complex) -> float:
    """Magnitude of the two terms of H at ``z``; the roundoff yardstick."""
    z = complex(z)
    L, R, l, r = _boundary_factors(params, z)
    return float(abs(z) ** (2 * params.n) * abs(L * R) + abs(l * r))


def H_and_derivative(params: BoundaryParams, z: complex):
    """``(H(z), H'(z))`` for ``|z| <= 1`` (no scaling needed there)."""
    z = complex(z)
    n2 = 2 * params.n
    L, R, l, r = _boundary_factors(params, z)
    dL = 2 * z + params.b0
    dR = 2 * z + params.c0
    dl = 2 * params.b1 * z + params.b0
    dr = 2 * params.cm1 * z + params.c0
    zp = _zpow(z, n2) if z != 0 else 0j
    P = L * R
    dP = dL * R + L * dR
    H = zp * P - l * r
    dH = (n2 * zp / z * P if z != 0 else 0j) + zp * dP - (dl * r + l * dr)
    return complex(H), complex(dH)


def H_prime_at_unit(params: BoundaryParams, s: int):
    """``H'(s)`` for ``s = +-1`` and the magnitude of its terms."""
    n2 = 2 * params.n
    L, R, l, r = _boundary_factors(params, complex(s))
    dL = 2 * s + params.b0
    dR = 2 * s + params.c0
    dl = 2 * params.b1 * s + params.b0
    dr = 2 * params.cm1 * s + params.c0
    zp = float(s) ** n2
    terms = (n2 * zp / s * L * R, zp * (dL * R + L * dR), -(dl * r + l * dr))
    return complex(sum(terms)), float(sum(abs(t) for t in terms))


def tridiag_matvec(params: BoundaryParams, v) -> np.ndarray:
    """``A v`` in O(n) for the canonical matrix."""
    v = np.asarray(v, dtype=complex)
    out = np.zeros_like(v)
    out[1:-1] = v[:-2] + v[2:]
    out[0] = -params.b0 * v[0] + (1 - params.b1) * v[1]
    out[-1] = (1 - params.cm1) * v[-2] - params.c0 * v[-1]
    return out


def residual_norm(params: BoundaryParams, lam: complex, v) -> float:
    """``||A v - lam v||_inf / ||v||_inf``."""
    v = np.asarray(v, dtype=complex)
    scale = np.max(np.abs(v))
    if scale == 0:
        return float("inf")
    return float(np.max(np.abs(tridiag_matvec(params, v) - lam * v)) / scale)
