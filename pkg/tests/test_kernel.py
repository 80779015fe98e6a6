import numpy as np
import pytest
from hypothesis import given, strategies as st

from tridispec.errors import DimensionTooSmall, PoleAtZ
from tridispec.kernel import (
    AuxiliaryFunction,
    BoundaryParams,
    H_and_derivative,
    PolyEval,
    classify_roots,
    eval_g,
    eval_H,
    eval_H_scale,
    quadratic_roots,
    reduce_degenerate,
    residual_norm,
)
from conftest import dense_canonical

coef = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)


def random_draws(count, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        v = 2 * np.sqrt(rng.uniform(0, 1, 4)) * np.exp(2j * np.pi * rng.uniform(0, 1, 4))
        yield BoundaryParams(*v, n=int(rng.integers(2, 60)))


def test_params_coerce_and_validate():
    p = BoundaryParams(1, 2, 3, 4, n=5)
    assert p.b0 == 1 + 0j and isinstance(p.cm1, complex)
    assert p.size == 6 and p.is_real
    with pytest.raises(DimensionTooSmall):
        BoundaryParams(n=1)


def test_mirrored_has_same_spectrum():
    p = BoundaryParams(0.3 + 0.1j, -0.4, 1.2, 0.2j, n=7)
    a = np.sort_complex(np.linalg.eigvals(dense_canonical(p)))
    b = np.sort_complex(np.linalg.eigvals(dense_canonical(p.mirrored())))
    assert np.allclose(a, b, atol=1e-12)


class TestReduceDegenerate:
    def test_left(self):
        p, det = reduce_degenerate(BoundaryParams(3, 1, 0, 0, n=10))
        assert p == BoundaryParams(0, 0, 0, 0, n=9)
        assert det == [-3]

    def test_nothing_to_do(self):
        p0 = BoundaryParams(n=10)
        p, det = reduce_degenerate(p0)
        assert p == p0 and det == []

    def test_both_sides(self):
        p, det = reduce_degenerate(BoundaryParams(2, 1, 5, 1, n=10))
        assert p == BoundaryParams(n=8)
        assert sorted(v.real for v in det) == [-5, -2]
        ev = np.linalg.eigvals(dense_canonical(BoundaryParams(2, 1, 5, 1, n=10)))
        for v in (-2, -5):
            assert np.min(np.abs(ev - v)) < 1e-10

    def test_too_small(self):
        with pytest.raises(DimensionTooSmall):
            reduce_degenerate(BoundaryParams(1, 1, 1, 1, n=2))


class TestQuadraticRoots:
    def test_vieta(self):
        r1, r2 = quadratic_roots(-1.5, -1)
        assert {round(r1.real, 12), round(r2.real, 12)} == {2.0, -0.5}

    def test_no_cancellation(self):
        r1, r2 = quadratic_roots(1e8, 1)
        assert abs(r2 - (-1e-8)) < 1e-22

    @given(coef, coef)
    def test_residuals(self, b, c):
        for u in quadratic_roots(b, c):
            assert abs(u * u + b * u + c) <= 1e-12 * (1 + abs(u)) ** 2


class TestClassify:
    def test_free(self):
        c = classify_roots(BoundaryParams(n=4))
        assert c.roots == (0, 0, 0, 0) and c.Q == 0 and c.w == -4

    def test_one_outside(self):
        c = classify_roots(BoundaryParams(-1.5, -1, 0, 0, n=4))
        assert sorted(u.real for u in c.left_roots) == pytest.approx([-0.5, 2.0])
        assert c.Q == 1 and c.w == -2

    def test_advdiff_mixed(self):
        K, n = 5.0, 100
        alpha = np.sqrt((1 - K / n) / (1 + K / n))
        c = classify_roots(BoundaryParams(cm1=-alpha ** -2, n=n))
        assert c.Q == 2
        assert sorted(u.real for u in c.right_roots) == pytest.approx([-1 / alpha, 1 / alpha])

    def test_unit_roots_flagged(self):
        c = classify_roots(BoundaryParams(cm1=-1, n=5))
        assert len(c.on_circle) == 2 and len(c.unit_roots) == 2 and not c.degenerate
        assert c.expected_phase_roots(5) == 12

    @given(coef, coef, coef, coef)
    def test_swap_invariance_and_winding(self, b0, b1, c0, cm1):
        p = BoundaryParams(b0, b1, c0, cm1, n=5)
        c = classify_roots(p)
        assert c.w == 2 * c.Q - 4
        assert classify_roots(p.mirrored()).Q == c.Q
        for u in c.left_roots:
            assert abs(u * u + p.b0 * u + p.b1) <= 1e-9 * (1 + abs(u)) ** 2
        for u in c.right_roots:
            assert abs(u * u + p.c0 * u + p.cm1) <= 1e-9 * (1 + abs(u)) ** 2


class TestG:
    def test_free_values(self):
        p = BoundaryParams(n=4)
        assert eval_g(p, 1j) == pytest.approx(1)
        assert eval_g(p, np.exp(1j * np.pi / 4)) == pytest.approx(-1)

    def test_g_at_one(self):
        assert eval_g(BoundaryParams(-1.5, -1, 0, 0, n=4), 1) == pytest.approx(1)

    def test_poles(self):
        with pytest.raises(PoleAtZ):
            eval_g(BoundaryParams(n=4), 0)
        with pytest.raises(PoleAtZ):
            eval_g(BoundaryParams(-1.5, -1, 0, 0, n=4), 2.0)

    @given(coef, coef, coef, coef, st.floats(0, 2 * np.pi))
    def test_factored_matches_quadratics(self, b0, b1, c0, cm1, t):
        p = BoundaryParams(b0, b1, c0, cm1, n=5)
        cls = classify_roots(p)
        z = np.exp(1j * t)
        g = AuxiliaryFunction(cls)
        if g.pole_distance(z) < 1e-3:
            return
        assert abs(g(z) - eval_g(p, z)) <= 1e-8 * max(1, abs(g(z)))


class TestH:
    def test_free_closed_form(self):
        p = BoundaryParams(n=6)
        for z in (0.3 + 0.2j, 1.7 - 0.4j, np.exp(0.7j)):
            assert eval_H(p, z).reconstructed == pytest.approx(z ** 16 - 1, rel=1e-12)

    def test_advdiff_k0_mixed(self):
        N = 9
        p = BoundaryParams(cm1=-1, n=N)
        for z in (0.5 + 0.5j, 1.1, np.exp(0.3j)):
            ref = (z ** (2 * N + 2) + 1) * (z * z - 1)
            assert eval_H(p, z).reconstructed == pytest.approx(ref, rel=1e-12, abs=1e-12)

    def test_scaled_far_out(self):
        p = BoundaryParams(0.2, 0.1, -0.3, 0.4, n=2000)
        h = eval_H(p, 1.5)
        assert np.isfinite(h.value) and h.log_scale > 700
        assert not np.isfinite(h.reconstructed) or abs(h) > 0

    def test_polyeval(self):
        assert PolyEval(2 + 1j, np.log(3.0)).reconstructed == pytest.approx(6 + 3j)
        assert abs(PolyEval(3 + 4j, 0.0)) == pytest.approx(5)

    def test_vanishes_at_pm1_for_random_draws(self):
        for p in random_draws(1000):
            for s in (1, -1):
                assert abs(eval_H(p, s)) <= 1e-10 * max(1.0, eval_H_scale(p, s))

    def test_inversion_symmetry_of_roots(self):
        p = BoundaryParams(0.3 + 0.2j, 0.2, -0.4 - 0.1j, 0.25, n=12)
        coeffs = np.polymul(np.polymul([1, p.b0, p.b1], [1, p.c0, p.cm1]), np.r_[1, np.zeros(2 * p.n)])
        low = np.polymul([p.b1, p.b0, 1], [p.cm1, p.c0, 1])
        coeffs[-5:] -= low
        for z in np.roots(coeffs):
            assert abs(eval_H(p, 1 / z)) <= 1e-8 * eval_H_scale(p, 1 / z)

    def test_derivative(self):
        p = BoundaryParams(0.3 + 0.2j, 0.2, -0.4 - 0.1j, 0.25, n=7)
        z, h = 0.6 + 0.2j, 1e-6
        _, dH = H_and_derivative(p, z)
        fd = (eval_H(p, z + h).reconstructed - eval_H(p, z - h).reconstructed) / (2 * h)
        assert abs(dH - fd) < 1e-7 * max(1, abs(dH))


def test_residual_norm_matches_dense():
    p = BoundaryParams(0.3, -0.4, 0.1, 0.2, n=20)
    A = dense_canonical(p)
    w, V = np.linalg.eig(A)
    assert residual_norm(p, w[3], V[:, 3]) < 1e-12
    v = np.arange(21.0)
    assert residual_norm(p, 0.5, v) == pytest.approx(np.max(np.abs(A @ v - 0.5 * v)) / 20)
