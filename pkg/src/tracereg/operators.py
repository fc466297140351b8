"""The operator chain and its perturbed variants.

T1 integrates from the left endpoint, the damped-second-derivative
operator w - alpha*w'' replaces the ill-posed identity link, and T3
composes with the (possibly perturbed) boundary composite.  The
hyperbolic operator L spans the null space of the damped operator; id - L
projects onto the constrained space W = {w : w(g0) = 0, w'(g1) = 0}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ImageMismatch, StencilTooSmall
from .func1d import (UNIT, CurveComposite, GridFunction, Interval,
                     cumulative_integral, derivative, invert_monotone,
                     second_derivative)
from .intervals import IntersectionResult

_FP_SLACK = 1e-12


def apply_T1(w: GridFunction) -> GridFunction:
    """Cumulative integration from the left endpoint."""
    return cumulative_integral(w)


@dataclass(frozen=True)
class RegularizedSecondDiff:
    """Damped identity w -> w - alpha*w'' on an interval, 0 < alpha < 1."""

    alpha: float
    interval: Interval

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")


def apply_T2alpha(op: RegularizedSecondDiff, w: GridFunction) -> GridFunction:
    if w.interval != op.interval:
        raise ValueError("operator and argument intervals differ")
    if w.n < 5:
        raise StencilTooSmall("w - alpha*w'' needs at least 5 nodes")
    return w - op.alpha * second_derivative(w)


@dataclass(frozen=True)
class WProjection:
    """Oblique projection machinery onto W on a fixed interval."""

    interval: Interval


def _exp_ratio_sinh(a: np.ndarray, b: float) -> np.ndarray:
    # sinh(a)/cosh(b) evaluated without overflow for |a| <= b, b large
    return (np.exp(a - b) - np.exp(-a - b)) / (1.0 + np.exp(-2.0 * b))


def _exp_ratio_cosh(a: np.ndarray, b: float) -> np.ndarray:
    # cosh(a)/cosh(b) without overflow for |a| <= b
    aa = np.abs(a)
    return (np.exp(aa - b) + np.exp(-aa - b)) / (1.0 + np.exp(-2.0 * b))


def _deriv_right(x: GridFunction) -> float:
    v, h = x.values, x.spacing
    return float((3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h))


def apply_L(proj: WProjection, alpha: float, x: GridFunction) -> GridFunction:
    """Evaluate the hyperbolic null-space interpolant of x.

    L x matches x(g0) and x'(g1) and satisfies alpha * (Lx)'' = Lx, so it
    spans the kernel of the damped operator.  x'(g1) is taken with the
    3-point one-sided second-order stencil; the basis coefficients are
    solved against the discrete boundary functionals (not the continuum
    ones, an O(h^2) tweak) so that id - L annihilates them exactly and
    the projection is idempotent to rounding.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if x.n < 5:
        raise StencilTooSmall("L needs at least 5 nodes for x'(g1)")
    if x.interval != proj.interval:
        raise ValueError("projection and argument intervals differ")
    g0, g1 = x.interval.lo, x.interval.hi
    ra = np.sqrt(alpha)
    t = x.nodes
    b = (g1 - g0) / ra
    s_vals = ra * _exp_ratio_sinh((t - g0) / ra, b)      # S(g0) = 0, S'(g1) = 1
    c_vals = _exp_ratio_cosh((t - g1) / ra, b)           # C(g0) = 1, C'(g1) = 0
    basis = x.with_values
    c2 = x.values[0]
    c1 = ((_deriv_right(x) - c2 * _deriv_right(basis(c_vals)))
          / _deriv_right(basis(s_vals)))
    return basis(c1 * s_vals + c2 * c_vals)


def project_W(proj: WProjection, alpha: float, x: GridFunction) -> GridFunction:
    """x - Lx: vanishes at g0, flat at g1, idempotent."""
    return x - apply_L(proj, alpha, x)


def apply_T3(c: CurveComposite, zeta: GridFunction) -> GridFunction:
    """Compose zeta with the boundary composite, monotone-cubic interpolated.

    Result lives on the composite's parameter grid over [0, 1].
    """
    im = c.image()
    tol = _FP_SLACK * max(1.0, abs(im.lo), abs(im.hi))
    if not zeta.interval.contains(im, tol=tol):
        raise ImageMismatch(
            f"composite image [{im.lo:.6g}, {im.hi:.6g}] is not contained in "
            f"[{zeta.interval.lo:.6g}, {zeta.interval.hi:.6g}]")
    interp = PchipInterpolator(zeta.nodes, zeta.values, extrapolate=True)
    vals = interp(np.clip(c.forward.values, zeta.interval.lo, zeta.interval.hi))
    return GridFunction(UNIT, vals)


def apply_T3eps_pinv(c_eps: CurveComposite, common: IntersectionResult,
                     f: GridFunction, n: int | None = None) -> GridFunction:
    """Solve the perturbed composition equation in closed form.

    The generalized inverse of composition-with-c_eps applied to trace
    data f is f evaluated at the inverse of the composite; it is returned
    on a uniform grid over the common interval.  ``f`` must live on
    [0, 1]; interpolation of f is monotone cubic, inversion goes through
    the piecewise-linear extension of the composite.
    """
    if f.interval != UNIT:
        raise ValueError("trace data must live on [0, 1]")
    m = f.n if n is None else n
    z = common.common.grid(m)
    s = invert_monotone(c_eps, z)
    interp = PchipInterpolator(f.nodes, f.values, extrapolate=True)
    vals = interp(np.clip(s, 0.0, 1.0))
    return GridFunction(common.common, vals)


def extend_by_zero(zeta_tilde: GridFunction, target: Interval,
                   n: int | None = None) -> GridFunction:
    """Resample onto the target interval's grid, zero outside the source.

    The source interval must be contained in the target.  Inside it the
    values are monotone-cubic resampled; outside they are zero.  Nodes
    whose dual cell straddles a source edge are weighted by the covered
    fraction of the cell, so the mass removed by the cut matches the
    continuum extension no matter where the edge falls relative to the
    grid (naive nodewise zeroing would widen a sub-cell cut to a full
    cell and overdrive the downstream boundary value solve).
    """
    src = zeta_tilde.interval
    tol = _FP_SLACK * max(1.0, abs(target.lo), abs(target.hi))
    if not target.contains(src, tol=tol):
        raise ImageMismatch(
            f"source [{src.lo:.6g}, {src.hi:.6g}] not contained in target "
            f"[{target.lo:.6g}, {target.hi:.6g}]")
    m = zeta_tilde.n if n is None else n
    x = target.grid(m)
    h = (target.hi - target.lo) / (m - 1)
    cell_lo = np.maximum(x - 0.5 * h, target.lo)
    cell_hi = np.minimum(x + 0.5 * h, target.hi)
    covered = np.clip(np.minimum(cell_hi, src.hi) - np.maximum(cell_lo, src.lo),
                      0.0, None)
    weight = covered / (cell_hi - cell_lo)
    interp = PchipInterpolator(zeta_tilde.nodes, zeta_tilde.values, extrapolate=True)
    vals = weight * interp(np.clip(x, src.lo, src.hi))
    return GridFunction(target, vals)


def estimate_projection_norm(interval: Interval, alpha: float, n: int = 801,
                             samples: int = 64, seed: int = 0) -> float:
    """Empirical bound for the H2 operator norm of id - L at a given alpha,
    maximized over a random smooth family.  Feeds rate-margin reporting."""
    from .func1d import norm as _norm  # local to avoid cycle at import time
    rng = np.random.default_rng(seed)
    proj = WProjection(interval)
    t = interval.grid(n)
    u = (t - interval.lo) / interval.length()
    worst = 0.0
    for _ in range(samples):
        coef = rng.normal(size=4)
        freq = rng.integers(1, 6, size=2)
        vals = (coef[0] + coef[1] * u + coef[2] * np.sin(freq[0] * np.pi * u)
                + coef[3] * np.cos(freq[1] * np.pi * u))
        x = GridFunction(interval, vals)
        den = _norm(x, "H2")
        if den < 1e-12:
            continue
        w = project_W(proj, alpha, x)
        worst = max(worst, _norm(w, "H2") / den)
    return worst
