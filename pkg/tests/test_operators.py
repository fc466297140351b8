import numpy as np
import pytest

from tracereg.errors import ImageMismatch, StencilTooSmall
from tracereg.func1d import (UNIT, CurveComposite, GridFunction, Interval,
                             derivative, norm, second_derivative)
from tracereg.intervals import intersect_images
from tracereg.operators import (RegularizedSecondDiff, WProjection, apply_L,
                                apply_T1, apply_T2alpha, apply_T3,
                                apply_T3eps_pinv, extend_by_zero, project_W)


def gf(fn, n=2001, interval=UNIT):
    return GridFunction.from_callable(interval, fn, n)


# ------------------------------------------------------------ T1

def test_t1_zero():
    out = apply_T1(gf(lambda x: 0.0 * x))
    assert np.abs(out.values).max() == 0.0


def test_t1_constant_and_sandwich_instance():
    w = gf(lambda x: np.ones_like(x))
    t1w = apply_T1(w)
    assert np.abs(t1w.values - t1w.nodes).max() < 1e-12
    # norm sandwich instance: 1 <= ||x||_H1 = sqrt(4/3) <= 2
    assert norm(w, "L2") <= norm(t1w, "H1") * (1 + 1e-9)
    assert norm(t1w, "H1") <= 2.0 * norm(w, "L2")


def test_t1_linear_integrand():
    out = apply_T1(gf(lambda t: 1.0 - t))
    x = out.nodes
    assert np.abs(out.values - (x - x**2 / 2)).max() < 1e-10


# ------------------------------------------------------------ T2^alpha

def test_t2alpha_constant():
    op = RegularizedSecondDiff(0.1, UNIT)
    w = gf(lambda x: np.ones_like(x))
    assert np.abs(apply_T2alpha(op, w).values - 1.0).max() < 1e-9


def test_t2alpha_quadratic():
    op = RegularizedSecondDiff(0.1, UNIT)
    w = gf(lambda x: x**2)
    out = apply_T2alpha(op, w)
    assert np.abs(out.values - (w.nodes**2 - 0.2)).max() < 1e-7


def test_t2alpha_annihilates_null_space():
    alpha = 0.25
    proj = WProjection(UNIT)
    x = gf(lambda t: 1.0 + 0.5 * t)
    lx = apply_L(proj, alpha, x)
    out = apply_T2alpha(RegularizedSecondDiff(alpha, UNIT), lx)
    assert norm(out, "Linf") <= 1e-5 * max(norm(lx, "Linf"), 1.0)


def test_t2alpha_norm_bound():
    # the tight chain is ||w - a w''|| <= ||w|| + a ||w''||; against the
    # Hilbertian H2 norm this costs the l1->l2 factor sqrt(1 + a^2)
    rng = np.random.default_rng(0)
    for alpha in (0.5, 0.05):
        op = RegularizedSecondDiff(alpha, UNIT)
        for _ in range(20):
            coef = rng.normal(size=3)
            w = gf(lambda x: coef[0] + coef[1] * np.sin(3 * x) + coef[2] * x**2)
            out = norm(apply_T2alpha(op, w), "L2")
            tight = norm(w, "L2") + alpha * norm(second_derivative(w), "L2")
            assert out <= tight * (1 + 1e-6)
            assert out <= np.sqrt(1 + alpha**2) * norm(w, "H2") * (1 + 1e-6)


def test_t2alpha_guards():
    with pytest.raises(ValueError):
        RegularizedSecondDiff(1.5, UNIT)
    op = RegularizedSecondDiff(0.1, UNIT)
    with pytest.raises(StencilTooSmall):
        apply_T2alpha(op, GridFunction(UNIT, np.array([0.0, 1.0, 2.0, 1.0])))


# ------------------------------------------------------------ L and id - L

def test_L_vanishes_on_constrained_functions():
    proj = WProjection(UNIT)
    # w(0) = 0 and w'(1) = 0
    w = gf(lambda t: np.sin(np.pi * t / 2.0))
    lw = apply_L(proj, 0.25, w)
    assert norm(lw, "Linf") <= 1e-6


def test_L_constant_input_matches_hyperbolic_oracle():
    proj = WProjection(UNIT)
    x = gf(lambda t: np.ones_like(t))
    lx = apply_L(proj, 0.25, x)
    t = x.nodes
    oracle = np.cosh(2.0 * (t - 1.0)) / np.cosh(2.0)
    assert np.abs(lx.values - oracle).max() < 1e-6


def test_L_null_space_identity():
    proj = WProjection(UNIT)
    rng = np.random.default_rng(1)
    for alpha in (0.25, 0.04):
        coef = rng.normal(size=3)
        x = gf(lambda t: coef[0] + coef[1] * t + coef[2] * np.sin(2 * t))
        lx = apply_L(proj, alpha, x)
        res = alpha * second_derivative(lx).values - lx.values
        scale = max(norm(lx, "Linf"), 1e-12)
        h = x.spacing
        assert np.abs(res[1:-1]).max() <= 10.0 * h**2 * scale / alpha


def test_projection_boundary_values():
    proj = WProjection(UNIT)
    x = gf(lambda t: 2.0 + np.cos(3.0 * t))
    w = project_W(proj, 0.1, x)
    assert abs(w.values[0]) < 1e-12
    assert abs(derivative(w).values[-1]) < 1e-10 * norm(x, "H2")


def test_projection_idempotent():
    proj = WProjection(UNIT)
    x = gf(lambda t: 1.0 - t + np.sin(4.0 * t))
    w = project_W(proj, 0.07, x)
    w2 = project_W(proj, 0.07, w)
    assert norm(w2 - w, "Linf") <= 1e-10 * max(1.0, norm(w, "Linf"))


def test_projection_norm_estimate():
    # empirical bound for ||id - L|| in H2; grows as alpha shrinks since
    # the hyperbolic layers steepen, and never drops below 1 (the
    # projection fixes the constrained space)
    from tracereg.operators import estimate_projection_norm
    c_small = estimate_projection_norm(UNIT, alpha=0.25, n=401, samples=24)
    c_large = estimate_projection_norm(UNIT, alpha=0.01, n=401, samples=24)
    assert c_small >= 1.0 - 1e-9
    assert c_large > c_small


def test_projection_fixes_constrained_functions():
    proj = WProjection(UNIT)
    w = gf(lambda t: np.sin(np.pi * t / 2.0))
    out = project_W(proj, 0.25, w)
    assert norm(out - w, "Linf") <= 1e-6


# ------------------------------------------------------------ T3

def identity_composite(n=2001):
    return CurveComposite(gf(lambda s: s, n), 1.0, 1.0)


def test_t3_constant():
    out = apply_T3(identity_composite(), gf(lambda z: np.ones_like(z)))
    assert np.abs(out.values - 1.0).max() < 1e-12


def test_t3_identity_composite():
    out = apply_T3(identity_composite(), gf(lambda z: z**2))
    assert np.abs(out.values - out.nodes**2).max() < 1e-10


def test_t3_curved_composite_matches_composition():
    c = CurveComposite(gf(lambda s: (s + 0.3 * s**2) / 1.3, 2001),
                       1.0 / 1.3, 1.6 / 1.3)
    zeta = gf(lambda z: np.sin(2.0 * z))
    out = apply_T3(c, zeta)
    oracle = np.sin(2.0 * c.forward.values)
    assert np.abs(out.values - oracle).max() < 1e-6


def test_t3_image_mismatch():
    c = CurveComposite(gf(lambda s: 2.0 * s, 101), 2.0, 2.0)
    with pytest.raises(ImageMismatch):
        apply_T3(c, gf(lambda z: z, 101))


# ------------------------------------------------------------ T3 pinv

def test_pinv_zero_data():
    c = identity_composite()
    inter = intersect_images(c, c, eta=0.0)
    out = apply_T3eps_pinv(c, inter, gf(lambda s: 0.0 * s))
    assert np.abs(out.values).max() == 0.0


def test_pinv_identity_composite():
    c = identity_composite()
    inter = intersect_images(c, c, eta=0.0)
    f = gf(lambda s: s - s**2 / 2)
    out = apply_T3eps_pinv(c, inter, f)
    z = out.nodes
    assert np.abs(out.values - (z - z**2 / 2)).max() < 1e-10


def test_pinv_curved_composite():
    c = CurveComposite(gf(lambda s: s * (s + 0.2) / 1.2, 4001),
                       0.2 / 1.2, 2.2 / 1.2)
    inter = intersect_images(c, c, eta=0.0)
    # data generated by composing a known zeta with the composite
    zeta_true = lambda z: np.cos(1.5 * z)
    f = GridFunction(UNIT, zeta_true(c.forward.values))
    out = apply_T3eps_pinv(c, inter, f)
    assert np.abs(out.values - zeta_true(out.nodes)).max() < 1e-6


def test_pinv_norm_bound():
    c = CurveComposite(gf(lambda s: (s + 0.3 * s**2) / 1.3, 2001),
                       1.0 / 1.3, 1.6 / 1.3)
    inter = intersect_images(c, c, eta=0.0)
    f = gf(lambda s: np.sin(3.0 * s) + 0.2)
    out = apply_T3eps_pinv(c, inter, f)
    c_hi = 1.6 / 1.3    # C'_g C'_gamma of this composite
    assert norm(out, "L2") <= np.sqrt(2.0 * c_hi) * norm(f, "L2") * (1 + 1e-6)


# ------------------------------------------------------------ extension

def test_extend_identity():
    z = gf(lambda x: np.sin(x), 501)
    out = extend_by_zero(z, UNIT)
    assert np.abs(out.values - z.values).max() < 1e-12


def test_extend_indicator_mass():
    src = Interval(0.1, 0.9)
    z = GridFunction.from_callable(src, lambda x: np.ones_like(x), 401)
    out = extend_by_zero(z, UNIT, n=2001)
    assert norm(out, "L2") ** 2 == pytest.approx(0.8, abs=5e-3)
    assert out.values[0] == 0.0 and out.values[-1] == 0.0


def test_extend_mismatch():
    z = GridFunction.from_callable(Interval(-0.5, 0.5), lambda x: x, 101)
    with pytest.raises(ImageMismatch):
        extend_by_zero(z, UNIT)


def test_extend_converges_as_source_grows():
    # as the cut interval approaches the target, the extension converges
    prev = np.inf
    target_fn = lambda x: np.cos(x)
    full = GridFunction.from_callable(UNIT, target_fn, 1001)
    for margin in (0.05, 0.02, 0.01, 0.005):
        src = Interval(margin, 1.0 - margin)
        z = GridFunction.from_callable(src, target_fn, 1001)
        out = extend_by_zero(z, UNIT, n=1001)
        gap = norm(out - full, "L2")
        assert gap < prev
        prev = gap
