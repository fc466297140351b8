import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tracereg.errors import MonotonicityViolation, OutOfRange, StencilTooSmall
from tracereg.func1d import (UNIT, CurveComposite, GridFunction, Interval,
                             cumulative_integral, derivative, integrate,
                             invert_monotone, norm, second_derivative,
                             sup_bound_check)


def gf(fn, n=101, interval=UNIT):
    return GridFunction.from_callable(interval, fn, n)


# ------------------------------------------------------------ types

def test_interval_rejects_degenerate():
    with pytest.raises(ValueError):
        Interval(1.0, 1.0)
    with pytest.raises(ValueError):
        Interval(2.0, 1.0)


def test_gridfunction_invariants():
    with pytest.raises(ValueError):
        GridFunction(UNIT, np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        GridFunction(UNIT, np.array([0.0, np.nan, 1.0]))
    f = gf(lambda x: x, 11)
    assert f.spacing == pytest.approx(0.1)
    assert not f.values.flags.writeable


def test_composite_requires_monotone_samples():
    vals = np.array([0.0, 0.5, 0.4, 0.8, 1.0])
    with pytest.raises(MonotonicityViolation):
        CurveComposite(GridFunction(UNIT, vals), 0.1, 2.0)


def test_composite_bracket_checked():
    f = gf(lambda s: s, 101)
    with pytest.raises(MonotonicityViolation):
        CurveComposite(f, deriv_lo=1.5, deriv_hi=2.0)
    c = CurveComposite(f, deriv_lo=1.0, deriv_hi=1.0)
    assert c.increasing
    assert c.image() == Interval(0.0, 1.0)


# ------------------------------------------------------------ integrate

def test_integrate_zero():
    assert integrate(gf(lambda x: 0.0 * x)) == 0.0


def test_integrate_linear_exact():
    assert integrate(gf(lambda x: x)) == pytest.approx(0.5, abs=1e-12)


def test_integrate_quadratic_exact():
    # Simpson is exact on quadratics; oracle is the antiderivative x^3/3
    assert integrate(gf(lambda x: x**2)) == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_integrate_even_node_count():
    # Simpson body plus trapezoid tail; exact for linear integrands
    f = gf(lambda x: 2.0 * x, n=100)
    assert integrate(f) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3),
       st.integers(2, 80))
def test_integrate_exact_on_quadratics(a, b, c, half_n):
    n = 2 * half_n + 1   # odd node counts
    f = gf(lambda x: a * x**2 + b * x + c, n=n)
    exact = a / 3.0 + b / 2.0 + c
    assert integrate(f) == pytest.approx(exact, abs=1e-12 * max(1.0, abs(exact)))


# ------------------------------------------------------------ norms

def test_norm_constant():
    f = gf(lambda x: np.ones_like(x))
    assert norm(f, "L2") == pytest.approx(1.0, abs=1e-12)
    assert norm(f, "H1") == pytest.approx(1.0, abs=1e-10)
    assert norm(f, "Linf") == 1.0


def test_norm_linear():
    f = gf(lambda x: x)
    assert norm(f, "L2") == pytest.approx(1.0 / np.sqrt(3.0), abs=1e-8)
    assert norm(f, "H1") == pytest.approx(np.sqrt(4.0 / 3.0), abs=1e-8)


def test_norm_sine():
    f = gf(lambda x: np.sin(np.pi * x), n=401)
    assert norm(f, "L2") == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-6)


def test_norm_stencil_guard():
    f = GridFunction(UNIT, np.array([0.0, 1.0, 0.5, 0.2]))
    with pytest.raises(StencilTooSmall):
        norm(f, "H1")
    with pytest.raises(ValueError):
        norm(gf(lambda x: x), "H7")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_norm_monotonicity(seed):
    rng = np.random.default_rng(seed)
    coef = rng.normal(size=4)
    f = gf(lambda x: coef[0] + coef[1] * x + coef[2] * np.sin(3 * x)
           + coef[3] * np.cos(5 * x), n=201)
    l2, h1, h2 = norm(f, "L2"), norm(f, "H1"), norm(f, "H2")
    assert l2 <= h1 <= h2


# ------------------------------------------------------------ cumulative

def test_cumulative_zero():
    F = cumulative_integral(gf(lambda x: 0.0 * x))
    assert np.abs(F.values).max() == 0.0


def test_cumulative_constant():
    F = cumulative_integral(gf(lambda x: np.ones_like(x)))
    assert np.abs(F.values - F.nodes).max() < 1e-12


def test_cumulative_linear():
    F = cumulative_integral(gf(lambda t: 1.0 - t))
    x = F.nodes
    assert np.abs(F.values - (x - x**2 / 2)).max() < 1e-10
    assert F.values[0] == 0.0


def test_cumulative_roundtrip():
    f = gf(lambda x: np.sin(2.0 * x) + x, n=401)
    back = derivative(cumulative_integral(f))
    h = f.spacing
    assert np.abs(back.values[2:-2] - f.values[2:-2]).max() <= 10.0 * h**2


# ------------------------------------------------------------ inversion

def test_invert_identity():
    c = CurveComposite(gf(lambda s: s), 1.0, 1.0)
    assert invert_monotone(c, 0.25) == pytest.approx(0.25, abs=1e-12)


def test_invert_quadratic_like():
    # strictly monotone quadratic map; algebraic root as oracle
    c = CurveComposite(gf(lambda s: s * (s + 0.2) / 1.2, n=2001),
                       deriv_lo=0.2 / 1.2, deriv_hi=2.2 / 1.2)
    z = 0.25
    oracle = (-0.2 + np.sqrt(0.04 + 4 * 1.2 * z)) / 2.0
    s = invert_monotone(c, z)
    assert s == pytest.approx(oracle, abs=1e-6)   # pwl extension is authoritative
    assert np.interp(s, c.forward.nodes, c.forward.values) == pytest.approx(
        z, abs=1e-12)


def test_invert_out_of_range():
    c = CurveComposite(gf(lambda s: s), 1.0, 1.0)
    with pytest.raises(OutOfRange):
        invert_monotone(c, 1.5)


def test_invert_roundtrip_on_nodes():
    c = CurveComposite(gf(lambda s: 0.3 + 0.5 * (s + 0.25 * s**2) / 1.25, n=301),
                       deriv_lo=0.5 / 1.25, deriv_hi=0.5 * 1.5 / 1.25)
    s_nodes = c.forward.nodes[1:-1]
    back = invert_monotone(c, c.forward.values[1:-1])
    assert np.abs(back - s_nodes).max() < 1e-10


def test_invert_decreasing_and_monotone_in_z():
    c = CurveComposite(gf(lambda s: 1.0 - s), 1.0, 1.0)
    z = np.linspace(0.05, 0.95, 41)
    s = invert_monotone(c, z)
    assert np.all(np.diff(s) < 0)
    assert np.abs((1.0 - s) - z).max() < 1e-12


# ------------------------------------------------------------ sup bound

def test_sup_bound_constant():
    lhs, rhs = sup_bound_check(gf(lambda x: np.ones_like(x)))
    assert lhs == 1.0
    assert rhs == pytest.approx(2.0 * 3.0 * 1.0, rel=1e-9)
    assert lhs <= rhs


def test_sup_bound_linear():
    lhs, rhs = sup_bound_check(gf(lambda x: x))
    assert lhs == 1.0
    assert rhs == pytest.approx(2.0 * 3.0 * np.sqrt(4.0 / 3.0), rel=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_sup_bound_randomized(seed):
    rng = np.random.default_rng(seed)
    length = rng.uniform(0.1, 10.0)
    lo = rng.uniform(-5.0, 5.0)
    coef = rng.normal(size=3)
    k = rng.integers(1, 9)
    f = GridFunction.from_callable(
        Interval(lo, lo + length),
        lambda x: coef[0] + coef[1] * (x - lo) + coef[2] * np.sin(k * (x - lo)),
        n=401)
    lhs, rhs = sup_bound_check(f)
    assert lhs <= rhs


def test_second_derivative_endpoints():
    f = gf(lambda x: x**2, n=51)
    d2 = second_derivative(f)
    assert np.abs(d2.values - 2.0).max() < 1e-8
