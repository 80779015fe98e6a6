"""Special roots: reciprocals of the boundary-quadratic roots outside the circle.

Each such root y gives an eigenvalue ``y + 1/y`` that is exponentially accurate
in n.  An optional Newton pass on H removes the remaining ``O(|y|^{2n})`` error
at the given n.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCircleRoot
from .kernel import BoundaryParams, H_and_derivative, RootClassification

MERGE_TOL = 1e-8


@dataclass(frozen=True)
class SpecialRoot:
    y: complex
    multiplicity: int = 1
    refined: bool = False
    refine_delta: float = 0.0

    @property
    def eigenvalue(self) -> complex:
        return self.y + 1 / self.y


def special_roots(classification: RootClassification, *, allow_unit: bool = False) -> list:
    """One inside-circle representative ``y = 1/w`` per root ``|w| > 1``.

    ``allow_unit`` tolerates circle roots at +-1, which cancel out of g.
    """
    c = classification
    bad = c.on_circle if not allow_unit else tuple(u for u in c.on_circle if u not in c.unit_roots)
    if bad:
        raise DegenerateCircleRoot(f"boundary roots on the unit circle: {bad}")
    ys = [1 / u for u in c.roots if abs(u) > 1 and u not in c.on_circle]
    merged: list = []
    for y in ys:
        for i, (y0, m) in enumerate(merged):
            if abs(y - y0) < MERGE_TOL:
                merged[i] = (y0, m + 1)
                break
        else:
            merged.append((y, 1))
    return [SpecialRoot(complex(y), m) for y, m in merged]


def refine_on_H(params: BoundaryParams, root, *, tol: float = 1e-9, max_iter: int = 50) -> SpecialRoot:
    """Newton on H from the closed-form root; best effort."""
    if not isinstance(root, SpecialRoot):
        root = SpecialRoot(complex(root))
    if root.multiplicity > 1:
        return root
    y0 = root.y
    z = y0
    H0, _ = H_and_derivative(params, z)
    h_best = abs(H0)
    if h_best == 0:
        return SpecialRoot(y0, 1, True, 0.0)
    for _ in range(max_iter):
        H, dH = H_and_derivative(params, z)
        if dH == 0 or not np.isfinite(dH):
            break
        step = H / dH
        z = z - step
        if abs(step) <= 4e-16 * max(abs(z), 1e-300):
            break
    if not np.isfinite(z) or abs(z) >= 1 - tol:
        return root
    H1, _ = H_and_derivative(params, z)
    if abs(H1) > h_best:
        return root
    return SpecialRoot(complex(z), 1, True, float(abs(z - y0)))


def special_eigenvalues(roots) -> list:
    """``y + 1/y`` per root, repeated by multiplicity."""
    out = []
    for r in roots:
        out.extend([complex(r.y + 1 / r.y)] * r.multiplicity)
    return out
