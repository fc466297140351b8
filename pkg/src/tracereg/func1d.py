"""Grid functions on a closed interval.

Everything downstream acts on uniformly sampled functions: quadrature,
Sobolev norms, differentiation, cumulative integration, and inversion of
monotone sampled maps. All types are immutable after construction and all
operations are pure, so values can be shared freely between sweep workers.

The piecewise-linear interpolant of a sampled function is the authoritative
continuous extension wherever one is needed (images, inversion); smoother
interpolation is used only where explicitly documented.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import MonotonicityViolation, OutOfRange, StencilTooSmall

#: Calibrated absolute constant of the sup-norm embedding inequality
#: ||y||_inf <= C * max(3, 2|J|+1) * ||y||_H1(J).  The explicit factor
#: max(3, 2|J|+1) is kept separate; C = 2 dominates the sharp embedding
#: constant sqrt(coth|J|) for every |J| >= 0.1 (sqrt(coth 0.1) ~ 3.17 < 6).
SUP_EMBED_C = 2.0

INVERT_TOL = 1e-12


@dataclass(frozen=True)
class Interval:
    """Closed non-degenerate interval [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ValueError("interval endpoints must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"degenerate interval [{self.lo}, {self.hi}]")

    def length(self) -> float:
        return self.hi - self.lo

    def grid(self, n: int) -> np.ndarray:
        return np.linspace(self.lo, self.hi, n)

    def contains(self, other: "Interval", tol: float = 0.0) -> bool:
        return self.lo - tol <= other.lo and other.hi <= self.hi + tol


UNIT = Interval(0.0, 1.0)


def _freeze(values: np.ndarray) -> np.ndarray:
    out = np.asarray(values, dtype=float).copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class GridFunction:
    """Real function sampled at n >= 3 uniform nodes of an interval."""

    interval: Interval
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _freeze(self.values))
        if self.values.ndim != 1 or self.values.size < 3:
            raise ValueError("need a 1-d sample with at least 3 nodes")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def spacing(self) -> float:
        return self.interval.length() / (self.n - 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.interval.grid(self.n)

    @classmethod
    def from_callable(cls, interval: Interval, fn: Callable[[np.ndarray], np.ndarray],
                      n: int) -> "GridFunction":
        return cls(interval, np.asarray(fn(interval.grid(n)), dtype=float))

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.interval, values)

    # Small pointwise algebra; operands must share the grid.
    def _check_same_grid(self, other: "GridFunction") -> None:
        if other.interval != self.interval or other.n != self.n:
            raise ValueError("grid mismatch")

    def __add__(self, other):
        if isinstance(other, GridFunction):
            self._check_same_grid(other)
            return self.with_values(self.values + other.values)
        return self.with_values(self.values + float(other))

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            self._check_same_grid(other)
            return self.with_values(self.values - other.values)
        return self.with_values(self.values - float(other))

    def __mul__(self, scalar: float):
        return self.with_values(self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)


@dataclass(frozen=True)
class CurveComposite:
    """Strictly monotone C1 map of [0, 1], sampled, with derivative bracket.

    ``forward`` holds the samples of the boundary-curve composite; the
    bracket ``deriv_lo <= |d forward/ds| <= deriv_hi`` is the constructor
    contract, checked with second-order numerical derivatives at the nodes.
    """

    forward: GridFunction
    deriv_lo: float
    deriv_hi: float
    # slack covers the O(h^2) gap between stencil and true derivative
    bracket_rtol: float = field(default=1e-6, repr=False)

    def __post_init__(self) -> None:
        if self.forward.interval != UNIT:
            raise ValueError("composite must be parametrized over [0, 1]")
        if not (0.0 < self.deriv_lo <= self.deriv_hi):
            raise ValueError("need 0 < deriv_lo <= deriv_hi")
        diffs = np.diff(self.forward.values)
        if not (np.all(diffs > 0.0) or np.all(diffs < 0.0)):
            raise MonotonicityViolation("sampled composite is not strictly monotone")
        d = np.abs(derivative(self.forward).values)
        slack = self.bracket_rtol * self.deriv_hi
        if d.min() < self.deriv_lo - slack or d.max() > self.deriv_hi + slack:
            raise MonotonicityViolation(
                "numerical derivative leaves the declared bracket "
                f"[{self.deriv_lo}, {self.deriv_hi}]: observed "
                f"[{d.min():.6g}, {d.max():.6g}]")

    @property
    def increasing(self) -> bool:
        return bool(self.forward.values[-1] > self.forward.values[0])

    def image(self) -> Interval:
        v = self.forward.values
        return Interval(float(v.min()), float(v.max()))

    def __call__(self, s: np.ndarray) -> np.ndarray:
        """Evaluate the piecewise-linear extension of the samples."""
        return np.interp(s, self.forward.nodes, self.forward.values)


def integrate(f: GridFunction) -> float:
    """Quadrature of the samples: composite Simpson when the node count is
    odd, Simpson plus a trapezoid tail cell when it is even.

    Exact (up to rounding) for polynomials of degree <= 2 sampled on an
    odd-n grid.
    """
    v, h = f.values, f.spacing
    if f.n % 2 == 1:
        return _simpson_odd(v, h)
    tail = 0.5 * h * (v[-2] + v[-1])
    return _simpson_odd(v[:-1], h) + tail


def _simpson_odd(v: np.ndarray, h: float) -> float:
    return float(h / 3.0 * (v[0] + v[-1] + 4.0 * v[1:-1:2].sum() + 2.0 * v[2:-2:2].sum()))


def derivative(f: GridFunction) -> GridFunction:
    """Second-order first derivative: central interior, one-sided at ends."""
    v, h = f.values, f.spacing
    d = np.empty_like(v)
    d[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
    d[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    return f.with_values(d)


def second_derivative(f: GridFunction) -> GridFunction:
    """Second-order second derivative; 4-point one-sided stencils at ends."""
    if f.n < 5:
        raise StencilTooSmall("second derivative needs at least 5 nodes")
    v, h = f.values, f.spacing
    d = np.empty_like(v)
    d[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / h**2
    d[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h**2
    d[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / h**2
    return f.with_values(d)


def norm(f: GridFunction, kind: str) -> float:
    """Discrete Sobolev norms.

    L2 = sqrt(int f^2); H1, H2 stack derivative L2 norms in the Hilbertian
    (sum of squares) convention; Linf is the nodal max.  H1/H2 require
    n >= 5 for the endpoint stencils.
    """
    if kind == "Linf":
        return float(np.abs(f.values).max())
    if kind == "L2":
        return float(np.sqrt(max(integrate(f.with_values(f.values**2)), 0.0)))
    if kind in ("H1", "H2"):
        if f.n < 5:
            raise StencilTooSmall(f"{kind} norm needs at least 5 nodes")
        total = integrate(f.with_values(f.values**2))
        df = derivative(f)
        total += integrate(f.with_values(df.values**2))
        if kind == "H2":
            d2f = second_derivative(f)
            total += integrate(f.with_values(d2f.values**2))
        return float(np.sqrt(max(total, 0.0)))
    raise ValueError(f"unknown norm kind {kind!r}")


def cumulative_integral(f: GridFunction) -> GridFunction:
    """Running integral from the left endpoint, local-quadratic rule.

    The result vanishes at the left endpoint and differentiating it
    recovers the integrand to second order away from the endpoints.
    Exact for quadratic integrands up to rounding.
    """
    F = cumulative_simpson(f.values, dx=f.spacing, initial=0.0)
    return f.with_values(F)


def invert_monotone(c: CurveComposite, z) -> np.ndarray | float:
    """Invert the piecewise-linear extension of a monotone composite.

    Locates the bracketing cell of each query and solves the linear piece
    exactly (the limit of bisection plus local refinement on the
    interpolant), so |forward(s) - z| <= 1e-12 * max(1, |z|).  Monotone in
    z.  Raises OutOfRange for queries outside the sampled image beyond the
    same tolerance; in-tolerance overshoot is clamped.
    """
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    v = c.forward.values
    s_nodes = c.forward.nodes
    if not c.increasing:
        v = v[::-1].copy()
        s_nodes = s_nodes[::-1].copy()
    tol = INVERT_TOL * np.maximum(1.0, np.abs(z_arr))
    if np.any(z_arr < v[0] - tol) or np.any(z_arr > v[-1] + tol):
        raise OutOfRange(
            f"query outside sampled image [{v[0]:.6g}, {v[-1]:.6g}]; "
            "intersect intervals before inverting")
    zc = np.clip(z_arr, v[0], v[-1])
    idx = np.clip(np.searchsorted(v, zc, side="right") - 1, 0, v.size - 2)
    frac = (zc - v[idx]) / (v[idx + 1] - v[idx])
    s = s_nodes[idx] + frac * (s_nodes[idx + 1] - s_nodes[idx])
    if np.isscalar(z) or np.asarray(z).ndim == 0:
        return float(s[0])
    return s


def sup_bound_check(f: GridFunction) -> tuple[float, float]:
    """Return (sup norm, C * max(3, 2|J|+1) * H1 norm) for the embedding
    inequality check; the contract is lhs <= rhs."""
    if f.n < 5:
        raise StencilTooSmall("sup bound check needs at least 5 nodes")
    length = f.interval.length()
    c_j = SUP_EMBED_C * max(3.0, 2.0 * length + 1.0)
    return norm(f, "Linf"), c_j * norm(f, "H1")
