"""Full spectrum assembly: pairing of regular roots, special eigenvalues, the
+-2 detector, deflated eigenvalues and eigenvectors."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from .errors import CountMismatch, DegenerateCircleRoot, ZeroVector
from .kernel import (
    DEFLATE_TOL,
    BoundaryParams,
    H_prime_at_unit,
    _boundary_factors,
    classify_roots,
    residual_norm,
)
from .regular import SolverOptions, solve_regular
from .special import refine_on_H, special_eigenvalues, special_roots

SCHEMA = "tridiag/1"
KINDS = ("regular", "special", "pm2", "detached")


@dataclass(frozen=True)
class Eigenpair:
    lam: complex
    kind: str
    root: Optional[complex] = None
    t: Optional[float] = None
    vector: Optional[np.ndarray] = None
    residual: Optional[float] = None


@dataclass
class SpectrumResult:
    """Eigenvalues in the order regular (by t), special, +-2, detached."""

    n: int
    Q: int
    w: int
    eigenvalues: np.ndarray
    kinds: list
    roots: np.ndarray  # nan where absent
    t: np.ndarray  # nan where absent
    residuals: np.ndarray  # nan unless vectors were built
    vectors: Optional[list] = None
    diagnostics: dict = field(default_factory=dict)
    wall_time_ms: float = 0.0

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def eigenpairs(self) -> list:
        out = []
        for i, lam in enumerate(self.eigenvalues):
            r = self.roots[i]
            ti = self.t[i]
            res = self.residuals[i]
            out.append(Eigenpair(
                complex(lam), self.kinds[i],
                None if np.isnan(r) else complex(r),
                None if np.isnan(ti) else float(ti),
                None if self.vectors is None else self.vectors[i],
                None if np.isnan(res) else float(res),
            ))
        return out

    def of_kind(self, kind: str) -> np.ndarray:
        return self.eigenvalues[np.array([k == kind for k in self.kinds], dtype=bool)]

    def to_dict(self, include_vectors: bool = True) -> dict:
        eig = []
        for i, lam in enumerate(self.eigenvalues):
            e = {"re": float(lam.real), "im": float(lam.imag), "kind": self.kinds[i]}
            if not np.isnan(self.roots[i]):
                e["root"] = [float(self.roots[i].real), float(self.roots[i].imag)]
            if not np.isnan(self.t[i]):
                e["t"] = float(self.t[i])
            if not np.isnan(self.residuals[i]):
                e["residual"] = float(self.residuals[i])
            if include_vectors and self.vectors is not None and self.vectors[i] is not None:
                v = self.vectors[i]
                e["vector"] = np.column_stack([v.real, v.imag]).tolist()
            eig.append(e)
        return {
            "schema": SCHEMA, "n": self.n, "Q": self.Q, "w": self.w,
            "eigenvalues": eig, "diagnostics": self.diagnostics,
            "wall_time_ms": float(self.wall_time_ms),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectrumResult":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unknown schema {d.get('schema')!r}")
        eig = d["eigenvalues"]
        nan = complex(np.nan, np.nan)
        lam = np.array([complex(e["re"], e["im"]) for e in eig], dtype=complex)
        roots = np.array([complex(*e["root"]) if "root" in e else nan for e in eig], dtype=complex)
        t = np.array([e.get("t", np.nan) for e in eig], dtype=float)
        res = np.array([e.get("residual", np.nan) for e in eig], dtype=float)
        vectors = None
        if any("vector" in e for e in eig):
            vectors = [None if "vector" not in e else
                       np.array([complex(a, b) for a, b in e["vector"]]) for e in eig]
        return cls(int(d["n"]), int(d["Q"]), int(d["w"]), lam, [e["kind"] for e in eig],
                   roots, t, res, vectors, d.get("diagnostics", {}), float(d.get("wall_time_ms", 0.0)))


# -- eigenvectors ---------------------------------------------------------

def eigenvector(params: BoundaryParams, z: complex) -> np.ndarray:
    """``v_k = L(z) z^k - l(z) z^{-k}``, k = 0..n, scaled to unit max modulus."""
    z = complex(z)
    if z == 0 or z == 1 or z == -1:
        raise ValueError("eigenvector needs z outside {0, 1, -1}")
    L, R, l, r = _boundary_factors(params, z)
    cp, cm = complex(L), complex(-l)
    if abs(z) < 1 - 1 / params.n:
        # inside the circle the z^{-k} coefficient is exponentially small and
        # l(z) only resolves it to roundoff; on a root of H it equals
        # z^{2n} L R / r, which is exact.  Right-localised roots go through the
        # mirror image.
        if abs(r) < abs(l):
            return eigenvector(params.mirrored(), z)[::-1].copy()
        if r != 0:
            cm = complex(-np.exp(2 * params.n * np.log(z)) * L * R / r)
    if cp == 0 and cm == 0:
        raise ZeroVector(f"both coefficients vanish at z={z}")
    k = np.arange(params.n + 1)
    lz = np.log(z)
    with np.errstate(divide="ignore"):
        a = np.log(cp) + k * lz if cp != 0 else np.full(k.shape, -np.inf + 0j)
        b = np.log(cm) - k * lz if cm != 0 else np.full(k.shape, -np.inf + 0j)
    top = max(np.max(a.real), np.max(b.real))
    v = np.exp(a - top) + np.exp(b - top)
    scale = np.max(np.abs(v))
    if scale == 0 or not np.isfinite(scale):
        raise ZeroVector(f"degenerate eigenvector at z={z}")
    return v / scale


def _pm2_vector(params: BoundaryParams, s: int) -> np.ndarray:
    k = np.arange(params.n + 1)
    alpha = 1 - params.b1
    beta = 1 + s * params.b0 + params.b1
    v = (alpha + beta * k) * (float(s) ** k)
    return v / np.max(np.abs(v))


def detect_pm2(params: BoundaryParams, tol: float = 1e-8, vectors: bool = True) -> list:
    """Eigenvalues +-2: double zeros of ``h = H / (z^2 - 1)`` at ``z = +-1``."""
    out = []
    for s in (1, -1):
        dH, scale = H_prime_at_unit(params, s)
        h = s * dH / 2
        if abs(h) < tol * max(1.0, scale / 2):
            v = _pm2_vector(params, s)
            out.append(Eigenpair(complex(2 * s), "pm2", vector=v if vectors else None,
                                 residual=residual_norm(params, 2 * s, v)))
    return out


# -- deflation ------------------------------------------------------------

def _deflation_chain(params: BoundaryParams, tol: float = DEFLATE_TOL):
    """Steps ``(side, eigenvalue, params_before)`` in deflation order."""
    chain = []
    p = params
    while True:
        if abs(p.b1 - 1) <= tol:
            chain.append(("left", -p.b0, p))
            p = BoundaryParams(0, 0, p.c0, p.cm1, p.n - 1)
        elif abs(p.cm1 - 1) <= tol:
            chain.append(("right", -p.c0, p))
            p = BoundaryParams(p.b0, p.b1, 0, 0, p.n - 1)
        else:
            return chain, p


def _embed(side: str, v: np.ndarray) -> np.ndarray:
    return np.concatenate([[0], v]) if side == "left" else np.concatenate([v, [0]])


def _shifted_solve(params: BoundaryParams, shift: complex, rhs: np.ndarray) -> np.ndarray:
    """Solve ``(A + shift I) w = rhs`` for the canonical tridiagonal A."""
    m = params.n + 1
    ab = np.zeros((3, m), dtype=complex)
    ab[0, 1:] = 1
    ab[2, :-1] = 1
    ab[1, :] = shift
    ab[0, 1] = 1 - params.b1
    ab[2, m - 2] = 1 - params.cm1
    ab[1, 0] = shift - params.b0
    ab[1, m - 1] = shift - params.c0
    return solve_banded((1, 1), ab, rhs)


def _detached_vector(side, lam, before: BoundaryParams):
    inner = BoundaryParams(0, 0, before.c0, before.cm1, before.n - 1) if side == "left" \
        else BoundaryParams(before.b0, before.b1, 0, 0, before.n - 1)
    m = inner.n + 1
    rhs = np.zeros(m, dtype=complex)
    if side == "left":
        rhs[0] = -1
        w = _shifted_solve(inner, -lam, rhs)
        v = np.concatenate([[1], w])
    else:
        rhs[-1] = -1
        w = _shifted_solve(inner, -lam, rhs)
        v = np.concatenate([w, [1]])
    if not np.all(np.isfinite(v)):
        raise ZeroVector("singular shifted block for a detached eigenvalue")
    return v / np.max(np.abs(v))


# -- pairing --------------------------------------------------------------

def pair_inverse(z: np.ndarray) -> np.ndarray:
    """Partner index of each root under ``z -> 1/z`` (nearest-inverse match)."""
    m = len(z)
    if m == 0:
        return np.zeros(0, dtype=np.int64)
    a = np.mod(np.angle(z), 2 * np.pi)
    order = np.argsort(a, kind="stable")
    a_sorted = a[order]
    inv = 1 / z
    target = np.mod(-a, 2 * np.pi)
    pos = np.searchsorted(a_sorted, target)
    best = np.full(m, -1, dtype=np.int64)
    bestd = np.full(m, np.inf)
    for off in (-2, -1, 0, 1, 2):
        cand = order[np.mod(pos + off, m)]
        d = np.abs(z[cand] - inv)
        d[cand == np.arange(m)] = np.inf
        better = d < bestd
        best[better] = cand[better]
        bestd[better] = d[better]
    idx = np.arange(m)
    if m % 2 == 0 and np.all(best[best] == idx) and np.all(best != idx):
        return best
    return _pair_greedy(z)


def _pair_greedy(z: np.ndarray) -> np.ndarray:
    m = len(z)
    d = np.abs(z[None, :] - 1 / z[:, None])
    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, np.inf)
    iu = np.triu_indices(m, 1)
    order = np.argsort(d[iu], kind="stable")
    partner = np.full(m, -1, dtype=np.int64)
    for o in order:
        i, j = iu[0][o], iu[1][o]
        if partner[i] < 0 and partner[j] < 0:
            partner[i], partner[j] = j, i
    return partner


# -- driver ---------------------------------------------------------------

def solve_spectrum(params: BoundaryParams, opts: SolverOptions = SolverOptions()) -> SpectrumResult:
    t_start = time.perf_counter()
    warnings = []
    chain, core = _deflation_chain(params)
    cls = classify_roots(core, opts.circle_tol)
    if cls.degenerate and not core.is_real:
        raise DegenerateCircleRoot(f"g has a zero/pole on the unit circle: {cls.on_circle}")
    if cls.on_circle:
        warnings.append(f"boundary roots on the unit circle: {[complex(u) for u in cls.on_circle]}")

    pm2 = detect_pm2(core, opts.pm2_tol, vectors=opts.vectors)
    reg = solve_regular(core, opts, cls, extra_counts=tuple(
        cls.expected_phase_roots(core.n) - 2 * j for j in range(1, len(pm2) + 1)))
    if int((~reg.converged).sum()):
        warnings.append(f"{int((~reg.converged).sum())} regular roots hit max_iter")

    keep = ~reg.trivial
    zt, tt = reg.z[keep], reg.t[keep]
    partner = pair_inverse(zt)
    lone = np.flatnonzero(partner < 0)
    for i in lone:
        # a +-2 eigenvalue makes +-1 a triple root of H; its split copies stay unpaired
        if not any(abs(zt[i] - p.lam.real / 2) < 1e-3 for p in pm2):
            raise CountMismatch(f"regular root {complex(zt[i])} has no inverse partner")
    if len(lone):
        warnings.append(f"discarded {len(lone)} unpaired roots next to +-1")
    first = np.flatnonzero(np.arange(len(zt)) < partner)
    z_reg, t_reg = zt[first], tt[first]
    if reg.is_exact:
        lam_reg = (2 * np.cos(t_reg)).astype(complex)
    else:
        lam_reg = z_reg + 1 / z_reg
    root_res = reg.residual[np.flatnonzero(keep)[first]]

    sroots = special_roots(cls, allow_unit=True)
    if opts.refine_special:
        sroots = [refine_on_H(core, r) for r in sroots]
    lam_sp = np.array(special_eigenvalues(sroots), dtype=complex)
    y_sp = np.array([r.y for r in sroots for _ in range(r.multiplicity)], dtype=complex)

    # each +-2 eigenvalue replaces the candidate that collapsed onto it
    target = core.n + 1
    for p in pm2:
        if len(lam_reg) + len(lam_sp) + len(pm2) <= target:
            break
        dr = np.abs(lam_reg - p.lam)
        ds = np.abs(lam_sp - p.lam)
        if len(ds) and (not len(dr) or ds.min() < dr.min()):
            j = int(np.argmin(ds))
            warnings.append(f"special value {complex(lam_sp[j])} absorbed by {p.lam.real:+.0f}")
            lam_sp, y_sp = np.delete(lam_sp, j), np.delete(y_sp, j)
        else:
            j = int(np.argmin(dr))
            warnings.append(f"regular value {complex(lam_reg[j])} absorbed by {p.lam.real:+.0f}")
            lam_reg, z_reg = np.delete(lam_reg, j), np.delete(z_reg, j)
            t_reg, root_res = np.delete(t_reg, j), np.delete(root_res, j)
    n_core = len(lam_reg) + len(lam_sp) + len(pm2)
    if n_core != target:
        raise CountMismatch(f"assembled {n_core} eigenvalues for a core of size {target}")

    detached = [lam for _, lam, _ in chain]
    lam = np.concatenate([lam_reg, lam_sp, [p.lam for p in pm2], np.array(detached, dtype=complex)])
    kinds = (["regular"] * len(lam_reg) + ["special"] * len(lam_sp)
             + ["pm2"] * len(pm2) + ["detached"] * len(detached))
    nan = complex(np.nan, np.nan)
    roots = np.concatenate([z_reg, y_sp, np.full(len(pm2) + len(detached), nan)])
    t = np.concatenate([t_reg, np.full(len(lam) - len(t_reg), np.nan)])
    residuals = np.full(len(lam), np.nan)

    vectors = None
    if opts.vectors:
        vectors = []
        for i in range(len(lam_reg) + len(lam_sp)):
            vectors.append(eigenvector(core, roots[i]))
        vectors.extend(p.vector for p in pm2)
        # lift core vectors through the deflation steps, innermost first
        lifted = []
        for side, lam_j, before in reversed(chain):
            vectors = [_embed(side, v) if v is not None else None for v in vectors]
            lifted = [_embed(side, v) if v is not None else None for v in lifted]
            try:
                lifted.insert(0, _detached_vector(side, lam_j, before))
            except (ZeroVector, ValueError, np.linalg.LinAlgError):
                warnings.append(f"no eigenvector for detached eigenvalue {complex(lam_j)}")
                lifted.insert(0, None)
        vectors = vectors + lifted
        for i, v in enumerate(vectors):
            if v is not None:
                residuals[i] = residual_norm(params, lam[i], v)

    diag = {
        "warnings": warnings,
        "regular": {k: v for k, v in reg.diagnostics.items() if k != "timings"},
        "wall_time_stages_ms": {k: 1e3 * v for k, v in reg.diagnostics["timings"].items()},
        "max_root_residual": float(root_res.max()) if len(root_res) else 0.0,
        "special": [{"y": [r.y.real, r.y.imag], "multiplicity": r.multiplicity,
                     "refined": r.refined, "refine_delta": r.refine_delta} for r in sroots],
        "deflated": len(chain),
        "exact": bool(reg.is_exact),
    }
    wall = 1e3 * (time.perf_counter() - t_start)
    return SpectrumResult(params.n, cls.Q, cls.w, lam, kinds, roots, t, residuals, vectors, diag, wall)
