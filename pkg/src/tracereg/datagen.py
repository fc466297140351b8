"""Manufactured problems and noise injection.

A problem instance is built backwards from a chosen exact coefficient:
its antiderivative supplies the trace data through composition with the
boundary-curve map, so no forward PDE solve is needed and every
reconstruction error is measurable exactly.

Noise models: smooth C1 perturbations of the composite (sup gaps of value
and derivative both within eps), rough square-integrable perturbations
(nodewise uniform, scaled to the weighted L2 budget), and smooth trace
noise of prescribed L2 size on the flux data.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ConfigError
from .func1d import (UNIT, CurveComposite, GridFunction, Interval,
                     derivative, norm)
from .intervals import admissible_eps
from .operators import apply_T1

# keeps the trace noise broadband relative to every boundary-layer width
# 1/sqrt(alpha) the rate presets reach (alpha >= 1e-6)
_FLUX_MODES = 400


@dataclass(frozen=True)
class A0Formula:
    fn: Callable[[np.ndarray], np.ndarray]
    smoothness_class: str
    end_value: float


def _pw_quad(u: np.ndarray) -> np.ndarray:
    # C1 piecewise quadratic, curvature jump at 1/2; value 0 and mean 0 on [0,1]
    left = 1.0 - 5.0 * u**2
    v = u - 0.5
    right = -0.25 - 5.0 * v + 11.0 * v**2
    return np.where(u <= 0.5, left, right)


#: Exact-coefficient formulas on the normalized coordinate u in [0, 1].
A0_FORMULAS: dict[str, A0Formula] = {
    "zero": A0Formula(lambda u: np.zeros_like(u), "H3", 0.0),
    "linear": A0Formula(lambda u: 1.0 - u, "H1", 0.0),
    "linear_plus2": A0Formula(lambda u: 3.0 - u, "H1", 2.0),
    "pw_quad": A0Formula(_pw_quad, "H2", 0.0),
    "cosine": A0Formula(
        lambda u: np.cos(1.5 * np.pi * u) + np.cos(0.5 * np.pi * u) / 3.0,
        "H3", 0.0),
}


@dataclass(frozen=True)
class CompositeFormula:
    """Base curve onto [0, 1], strictly increasing, with analytic
    derivatives up to fourth order (stacked difference stencils are too
    noisy for the H4 norm the mesh gate consumes)."""

    fn: Callable[[np.ndarray], np.ndarray]
    derivs: tuple[Callable[[np.ndarray], np.ndarray], ...]
    deriv_lo: float
    deriv_hi: float


_PI = np.pi

COMPOSITE_FORMULAS: dict[str, CompositeFormula] = {
    "identity": CompositeFormula(
        lambda s: s,
        (lambda s: np.ones_like(s), lambda s: np.zeros_like(s),
         lambda s: np.zeros_like(s), lambda s: np.zeros_like(s)),
        1.0, 1.0),
    "quadratic": CompositeFormula(
        lambda s: (s + 0.3 * s**2) / 1.3,
        (lambda s: (1.0 + 0.6 * s) / 1.3, lambda s: np.full_like(s, 0.6 / 1.3),
         lambda s: np.zeros_like(s), lambda s: np.zeros_like(s)),
        1.0 / 1.3, 1.6 / 1.3),
    "sine_bend": CompositeFormula(
        lambda s: s + 0.1 * np.sin(_PI * s),
        (lambda s: 1.0 + 0.1 * _PI * np.cos(_PI * s),
         lambda s: -0.1 * _PI**2 * np.sin(_PI * s),
         lambda s: -0.1 * _PI**3 * np.cos(_PI * s),
         lambda s: 0.1 * _PI**4 * np.sin(_PI * s)),
        1.0 - 0.1 * _PI, 1.0 + 0.1 * _PI),
    # cubic bend: curvature grows toward the right endpoint while the
    # fourth derivative vanishes, so the mesh admissibility gate stays easy
    "cubic": CompositeFormula(
        lambda s: (s + 0.5 * s**3) / 1.5,
        (lambda s: (1.0 + 1.5 * s**2) / 1.5, lambda s: 2.0 * s,
         lambda s: np.full_like(s, 2.0), lambda s: np.zeros_like(s)),
        1.0 / 1.5, 5.0 / 3.0),
    "cubic_steep": CompositeFormula(
        lambda s: (s + s**3) / 2.0,
        (lambda s: (1.0 + 3.0 * s**2) / 2.0, lambda s: 3.0 * s,
         lambda s: np.full_like(s, 3.0), lambda s: np.zeros_like(s)),
        0.5, 2.0),
}


@dataclass(frozen=True)
class ProblemSpec:
    """Recipe for a manufactured instance."""

    a0: str = "linear"
    composite: str = "identity"
    lo: float = 0.0
    hi: float = 1.0
    n: int = 2001
    c_end: float = 0.0


@dataclass(frozen=True)
class ProblemInstance:
    """Exact triple (a0, b0, f) plus the geometry constants.

    ``composite_derivs`` holds the analytic first to fourth derivative
    samples of the composite on the parameter grid; the mesh gate needs
    cellwise H4 norms that stacked difference stencils cannot deliver.
    """

    interval: Interval
    a0: GridFunction
    b0: GridFunction
    composite: CurveComposite
    f: GridFunction
    smoothness_class: str
    c_end: float
    c_g: float
    c_g_prime: float
    c_gamma: float
    c_gamma_prime: float
    g_norm_h4: float
    composite_derivs: tuple[np.ndarray, ...] = ()

    def g_h4_cell_sup(self, n_cells: int) -> float:
        """Largest per-cell H4 norm of the composite on a uniform mesh."""
        if not self.composite_derivs:
            return self.g_norm_h4
        s = self.composite.forward.nodes
        breaks = np.linspace(0.0, 1.0, n_cells + 1)
        total = np.zeros(n_cells)
        for arr in (self.composite.forward.values,) + self.composite_derivs:
            sq = arr**2
            cum = np.concatenate(([0.0], np.cumsum(
                0.5 * (sq[1:] + sq[:-1]) * np.diff(s))))
            at_breaks = np.interp(breaks, s, cum)
            total += np.diff(at_breaks)
        return float(np.sqrt(total.max()))


@dataclass(frozen=True)
class NoisyData:
    """Perturbed data pair with its noise budgets.

    ``g_perturbed`` is a CurveComposite for C1 noise and a raw grid sample
    for L2 noise (rough; must be projected before use).
    """

    kind: str                       # "C1" or "L2"
    g_perturbed: CurveComposite | GridFunction
    f_perturbed: GridFunction
    eps: float
    delta: float
    seed: int


def _h4_norm(fwd: GridFunction, comp: CompositeFormula, length: float) -> float:
    s = fwd.nodes
    total = norm(fwd, "L2") ** 2
    for dfn in comp.derivs:
        total += norm(GridFunction(UNIT, length * dfn(s)), "L2") ** 2
    return float(np.sqrt(total))


def make_problem(spec: ProblemSpec) -> ProblemInstance:
    """Synthesize the exact data for a chosen coefficient and composite."""
    if spec.a0 not in A0_FORMULAS:
        raise ConfigError(f"unknown a0 formula {spec.a0!r}")
    if spec.composite not in COMPOSITE_FORMULAS:
        raise ConfigError(f"unknown composite formula {spec.composite!r}")
    interval = Interval(spec.lo, spec.hi)
    form = A0_FORMULAS[spec.a0]
    if abs(form.end_value - spec.c_end) > 1e-12 * max(1.0, abs(form.end_value)):
        raise ConfigError(
            f"a0 formula {spec.a0!r} has end value {form.end_value}, "
            f"spec declares c_end={spec.c_end}")

    length = interval.length()
    t = interval.grid(spec.n)
    a0 = GridFunction(interval, form.fn((t - interval.lo) / length))

    # b0 = integral of a0 from the left endpoint; the constant part is
    # integrated exactly so a nonzero end value costs no quadrature error.
    b0 = apply_T1(a0 - spec.c_end) + spec.c_end * GridFunction(interval, t - interval.lo)

    comp_form = COMPOSITE_FORMULAS[spec.composite]
    s = UNIT.grid(spec.n)
    fwd = GridFunction(UNIT, interval.lo + length * comp_form.fn(s))
    composite = CurveComposite(fwd, deriv_lo=length * comp_form.deriv_lo,
                               deriv_hi=length * comp_form.deriv_hi)

    if spec.composite == "identity":
        f_vals = b0.values
    else:
        f_vals = PchipInterpolator(b0.nodes, b0.values)(fwd.values)
    f = GridFunction(UNIT, f_vals)

    return ProblemInstance(
        interval=interval, a0=a0, b0=b0, composite=composite, f=f,
        smoothness_class=form.smoothness_class, c_end=spec.c_end,
        c_g=length * comp_form.deriv_lo, c_g_prime=length * comp_form.deriv_hi,
        c_gamma=1.0, c_gamma_prime=1.0,
        g_norm_h4=_h4_norm(fwd, comp_form, length),
        composite_derivs=tuple(length * dfn(s) for dfn in comp_form.derivs))


def perturb_C1(problem: ProblemInstance, eps: float, seed: int) -> NoisyData:
    """Smooth perturbation of the composite with W^{1,inf} budget eps.

    The bump is a seeded low-frequency sine combination normalized so both
    the value gap and the derivative gap stay within eps; sine modes pin
    the perturbation at the parameter endpoints.
    """
    if eps < 0.0:
        raise ValueError("eps must be nonnegative")
    if eps >= admissible_eps(problem):
        raise ValueError(
            f"eps={eps:.3e} must stay below min{{(g1-g0)/4, C_g/2}}"
            f"={admissible_eps(problem):.3e}")
    fwd = problem.composite.forward
    if eps == 0.0:
        return NoisyData("C1", problem.composite, problem.f, 0.0, 0.0, seed)
    rng = np.random.default_rng([seed, 0])
    coef = rng.normal(size=3)
    s = fwd.nodes
    phi = np.zeros_like(s)
    for k, c in enumerate(coef, start=1):
        phi += c * np.sin(k * np.pi * s)
    # normalize with the same stencil the composite constructor checks,
    # so the declared bracket [lo - eps, hi + eps] holds nodewise
    dphi = derivative(GridFunction(UNIT, phi)).values
    amp = max(np.abs(phi).max(), np.abs(dphi).max())
    phi /= amp
    perturbed = GridFunction(UNIT, fwd.values + eps * phi)
    comp = CurveComposite(perturbed,
                          deriv_lo=problem.composite.deriv_lo - eps,
                          deriv_hi=problem.composite.deriv_hi + eps)
    return NoisyData("C1", comp, problem.f, eps, 0.0, seed)


def perturb_L2(problem: ProblemInstance, eps: float, seed: int) -> NoisyData:
    """Rough perturbation: nodewise uniform noise scaled so the weighted
    L2 budget ||g_eps - g||_L2 = eps / C_gamma holds (by the package's own
    quadrature).  No smoothness is guaranteed; project before use."""
    if eps < 0.0:
        raise ValueError("eps must be nonnegative")
    fwd = problem.composite.forward
    if eps == 0.0:
        return NoisyData("L2", GridFunction(UNIT, fwd.values.copy()),
                         problem.f, 0.0, 0.0, seed)
    rng = np.random.default_rng([seed, 1])
    raw = rng.uniform(-1.0, 1.0, size=fwd.n)
    measured = norm(GridFunction(UNIT, raw), "L2")
    scale = (eps / problem.c_gamma) / measured
    return NoisyData("L2", GridFunction(UNIT, fwd.values + scale * raw),
                     problem.f, eps, 0.0, seed)


def perturb_flux(problem: ProblemInstance, delta: float, seed: int) -> GridFunction:
    """Smooth trace noise of L2 size delta on the data f.

    A seeded random sine series with a 1/sqrt(k) amplitude profile spreads
    the budget over many scales, then the whole draw is rescaled so the
    measured L2 gap equals delta.
    """
    if delta < 0.0:
        raise ValueError("delta must be nonnegative")
    if delta == 0.0:
        return problem.f
    rng = np.random.default_rng([seed, 2])
    s = problem.f.nodes
    xi = rng.normal(size=_FLUX_MODES)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=_FLUX_MODES)
    k = np.arange(1, _FLUX_MODES + 1)
    raw = (xi / np.sqrt(k)) @ np.sin(np.outer(k, np.pi * s) + theta[:, None])
    measured = norm(GridFunction(UNIT, raw), "L2")
    return problem.f + GridFunction(UNIT, (delta / measured) * raw)


def make_noisy(problem: ProblemInstance, kind: str, eps: float, delta: float,
               seed: int) -> NoisyData:
    """Compose a composite perturbation with flux noise, one seed each."""
    if kind == "C1":
        base = perturb_C1(problem, eps, seed)
    elif kind == "L2":
        base = perturb_L2(problem, eps, seed)
    else:
        raise ConfigError(f"unknown noise kind {kind!r}")
    return replace(base, f_perturbed=perturb_flux(problem, delta, seed),
                   delta=delta)
