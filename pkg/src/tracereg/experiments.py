"""Sweep engine and experiment configuration.

Runs reconstructions over (delta, seed) grids with a-priori parameter
rules alpha(delta) and h(delta), fits log-log convergence slopes, and
writes CSV reports plus gnuplot-friendly mirrors.  Identical configs and
seeds reproduce bit-identical outputs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .datagen import (A0_FORMULAS, COMPOSITE_FORMULAS, ProblemSpec,
                      make_noisy, make_problem)
from .errors import ConfigError, InsufficientData, TracregError
from .func1d import norm
from .intervals import admissible_eps
from .pwl import MeshConstants
from .regularizer import Mode, RegularizationParams, reconstruct_noisy

ALPHA_RULES = ("fixed", "sqrt_delta", "delta", "delta_23")
EPS_RULES = ("equal_delta", "fixed")
H_RULES = ("sqrt_delta", "fixed")


@dataclass(frozen=True)
class ExperimentConfig:
    problem: ProblemSpec = ProblemSpec()
    mode: Mode = Mode.NOISY_C1
    alpha_rule: str = "delta"
    alpha_value: float = 0.0
    delta_list: tuple[float, ...] = (1e-2, 1e-3, 1e-4, 1e-5)
    eps_rule: str = "equal_delta"
    eps_value: float = 0.0
    h_rule: str = "sqrt_delta"
    h_value: float = 0.0
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    shift_c: float = 0.0
    exclude_saturated: bool = True
    output_dir: str = "out"

    def __post_init__(self) -> None:
        if self.alpha_rule not in ALPHA_RULES:
            raise ConfigError(f"alpha_rule must be one of {ALPHA_RULES}")
        if self.eps_rule not in EPS_RULES:
            raise ConfigError(f"eps_rule must be one of {EPS_RULES}")
        if self.h_rule not in H_RULES:
            raise ConfigError(f"h_rule must be one of {H_RULES}")
        if self.mode is Mode.EXACT:
            raise ConfigError("sweeps need a noisy mode")
        d = self.delta_list
        if len(d) < 1 or any(x <= 0 for x in d) or any(
                d[i + 1] >= d[i] for i in range(len(d) - 1)):
            raise ConfigError("delta_list must be positive, strictly decreasing")
        if not self.seeds:
            raise ConfigError("need at least one seed")

    def alpha_for(self, delta: float) -> float:
        if self.alpha_rule == "fixed":
            return self.alpha_value
        if self.alpha_rule == "sqrt_delta":
            return float(np.sqrt(delta))
        if self.alpha_rule == "delta":
            return delta
        return float(delta ** (2.0 / 3.0))

    def eps_for(self, delta: float) -> float:
        return delta if self.eps_rule == "equal_delta" else self.eps_value

    def h_for(self, delta: float) -> float:
        if self.h_rule == "fixed":
            return self.h_value
        return 1.0 / snap_cells(self.problem.n, 1.0 / np.sqrt(delta))


def snap_cells(n: int, target: float) -> int:
    """Cell count closest to target (log scale) among divisors of n-1,
    keeping at least 5 grid nodes per cell so loads stay well resolved."""
    divs = [d for d in range(2, (n - 1) // 5 + 1) if (n - 1) % d == 0]
    if not divs:
        raise ConfigError(f"grid size {n} admits no usable projection mesh")
    return min(divs, key=lambda d: abs(np.log(d / target)))


@dataclass(frozen=True)
class RateRow:
    delta: float
    seed: int
    alpha: float
    eps: float
    h: float
    err_l2: float
    err_h1: float
    failure: str = ""


@dataclass(frozen=True)
class RateReport:
    rows: tuple[RateRow, ...]
    fitted_slope_l2: float
    fitted_slope_h1: float
    r_squared: float
    excluded_deltas: tuple[float, ...] = ()


def fit_rate(pairs: list[tuple[float, float]]) -> tuple[float, float]:
    """Least squares on (log delta, log err); returns (slope, r^2)."""
    if len(pairs) < 3:
        raise InsufficientData(f"need >= 3 pairs for a rate fit, got {len(pairs)}")
    if any(d <= 0 or e <= 0 for d, e in pairs):
        raise InsufficientData("rate fit needs positive deltas and errors")
    x = np.log([d for d, _ in pairs])
    y = np.log([e for _, e in pairs])
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), r2


def run_sweep(config: ExperimentConfig,
              constants: MeshConstants = MeshConstants()) -> RateReport:
    """Reconstruct over the (delta, seed) grid and fit rates.

    Failed cells are recorded with the violated hypothesis and skipped by
    the fit; if the largest delta saturates (its decay toward the next
    delta is less than half the asymptotic slope) it is dropped from the
    fit and recorded in the report.
    """
    problem = make_problem(config.problem)
    kind = "C1" if config.mode is Mode.NOISY_C1 else "L2"
    eps_bound = admissible_eps(problem)
    rows: list[RateRow] = []
    for delta in config.delta_list:
        eps = config.eps_for(delta)
        if eps >= eps_bound:
            raise ConfigError(
                f"eps={eps:.3e} at delta={delta:.3e} reaches the admissible "
                f"bound {eps_bound:.3e}")
        alpha = config.alpha_for(delta)
        h = config.h_for(delta) if config.mode is Mode.NOISY_L2 else 0.0
        for seed in config.seeds:
            params = RegularizationParams(
                alpha=alpha, mode=config.mode, shift_c=config.shift_c,
                mesh_h=h if config.mode is Mode.NOISY_L2 else None)
            try:
                noisy = make_noisy(problem, kind, eps, delta, seed)
                rec = reconstruct_noisy(problem, noisy, params, constants)
                diff = problem.a0 - rec.a_alpha
                rows.append(RateRow(delta, seed, alpha, eps, h,
                                    norm(diff, "L2"), norm(diff, "H1")))
            except TracregError as exc:
                rows.append(RateRow(delta, seed, alpha, eps, h,
                                    float("nan"), float("nan"),
                                    failure=f"{type(exc).__name__}: {exc}"))
    return _assemble_report(rows, config)


def _mean_errors(rows: list[RateRow]) -> list[tuple[float, float, float]]:
    out = []
    for delta in sorted({r.delta for r in rows}, reverse=True):
        ok = [r for r in rows if r.delta == delta and not r.failure]
        if ok:
            out.append((delta, float(np.mean([r.err_l2 for r in ok])),
                        float(np.mean([r.err_h1 for r in ok]))))
    return out


def _assemble_report(rows: list[RateRow], config: ExperimentConfig) -> RateReport:
    means = _mean_errors(rows)
    excluded: tuple[float, ...] = ()
    if config.exclude_saturated and len(means) >= 4:
        head_slope = (np.log(means[0][1] / means[1][1])
                      / np.log(means[0][0] / means[1][0]))
        rest_slope, _ = fit_rate([(d, e) for d, e, _ in means[1:]])
        if head_slope < 0.5 * rest_slope:
            excluded = (means[0][0],)
            means = means[1:]
    slope_l2, r2 = fit_rate([(d, e) for d, e, _ in means])
    slope_h1, _ = fit_rate([(d, e) for d, _, e in means])
    return RateReport(rows=tuple(rows), fitted_slope_l2=slope_l2,
                      fitted_slope_h1=slope_h1, r_squared=r2,
                      excluded_deltas=excluded)


# ---------------------------------------------------------------- output

def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_rates(report: RateReport, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    header = "delta,seed,alpha,eps,h,err_l2,err_h1"
    lines = [header]
    for r in report.rows:
        lines.append(",".join([_fmt(r.delta), str(r.seed), _fmt(r.alpha),
                               _fmt(r.eps), _fmt(r.h), _fmt(r.err_l2),
                               _fmt(r.err_h1)]))
    _write(os.path.join(out_dir, "rates.csv"), lines)
    _write(os.path.join(out_dir, "rates.dat"),
           ["# " + header.replace(",", " ")]
           + [ln.replace(",", " ") for ln in lines[1:]])

    failures = [r for r in report.rows if r.failure]
    if failures:
        flines = ["delta,seed,reason"]
        flines += [f"{_fmt(r.delta)},{r.seed},\"{r.failure}\"" for r in failures]
        _write(os.path.join(out_dir, "failures.csv"), flines)
        _write(os.path.join(out_dir, "failures.dat"),
               ["# delta seed reason"]
               + [ln.replace(",", " ", 2) for ln in flines[1:]])

    sheader = "slope_l2,slope_h1,r_squared,rows_ok,rows_failed,excluded_deltas"
    srow = ",".join([_fmt(report.fitted_slope_l2), _fmt(report.fitted_slope_h1),
                     _fmt(report.r_squared),
                     str(sum(1 for r in report.rows if not r.failure)),
                     str(len(failures)),
                     ";".join(_fmt(d) for d in report.excluded_deltas) or "none"])
    _write(os.path.join(out_dir, "summary.csv"), [sheader, srow])
    _write(os.path.join(out_dir, "summary.dat"),
           ["# " + sheader.replace(",", " "), srow.replace(",", " ")])


def write_solution(x: np.ndarray, a0: np.ndarray, a_alpha: np.ndarray,
                   out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    lines = ["x,a0,a_alpha"]
    lines += [f"{_fmt(xx)},{_fmt(v0)},{_fmt(va)}"
              for xx, v0, va in zip(x, a0, a_alpha)]
    _write(os.path.join(out_dir, "a_alpha.csv"), lines)
    _write(os.path.join(out_dir, "a_alpha.dat"),
           ["# x a0 a_alpha"] + [ln.replace(",", " ") for ln in lines[1:]])


def _write(path: str, lines: list[str]) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------- config io

_CONFIG_KEYS = {
    "mode", "a0", "composite", "lo", "hi", "n", "c_end", "shift_c",
    "alpha_rule", "alpha_value", "delta_list", "eps_rule", "eps_value",
    "h_rule", "h_value", "seeds", "output_dir", "exclude_saturated",
}


def parse_config(path: str) -> ExperimentConfig:
    """Read a flat key = value config file (# comments allowed)."""
    raw: dict[str, str] = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key = value")
                key, val = (part.strip() for part in line.split("=", 1))
                if key not in _CONFIG_KEYS:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                raw[key] = val
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(raw)


def config_from_dict(raw: dict[str, str]) -> ExperimentConfig:
    def fget(key: str, default: float) -> float:
        try:
            return float(raw.get(key, default))
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: not a number: {raw[key]!r}") from exc

    mode_txt = raw.get("mode", "noisy_c1")
    try:
        mode = Mode(mode_txt)
    except ValueError as exc:
        raise ConfigError(f"unknown mode {mode_txt!r}") from exc
    a0 = raw.get("a0", "linear")
    composite = raw.get("composite", "identity")
    if a0 not in A0_FORMULAS:
        raise ConfigError(f"unknown a0 formula {a0!r} "
                          f"(choices: {sorted(A0_FORMULAS)})")
    if composite not in COMPOSITE_FORMULAS:
        raise ConfigError(f"unknown composite {composite!r} "
                          f"(choices: {sorted(COMPOSITE_FORMULAS)})")
    try:
        deltas = tuple(float(tok) for tok in
                       raw.get("delta_list", "1e-2,1e-3,1e-4,1e-5").split(","))
        seeds = tuple(int(tok) for tok in raw.get("seeds", "0,1,2,3,4").split(","))
    except ValueError as exc:
        raise ConfigError(f"malformed list: {exc}") from exc
    spec = ProblemSpec(a0=a0, composite=composite, lo=fget("lo", 0.0),
                       hi=fget("hi", 1.0), n=int(fget("n", 2001)),
                       c_end=fget("c_end", 0.0))
    return ExperimentConfig(
        problem=spec, mode=mode,
        alpha_rule=raw.get("alpha_rule", "delta"),
        alpha_value=fget("alpha_value", 0.0),
        delta_list=deltas,
        eps_rule=raw.get("eps_rule", "equal_delta"),
        eps_value=fget("eps_value", 0.0),
        h_rule=raw.get("h_rule", "sqrt_delta"),
        h_value=fget("h_value", 0.0),
        seeds=seeds, shift_c=fget("shift_c", 0.0),
        exclude_saturated=raw.get("exclude_saturated", "true").lower()
        not in ("false", "0", "no"),
        output_dir=raw.get("output_dir", "out"))


# ---------------------------------------------------------------- presets

def preset(name: str) -> ExperimentConfig:
    """Named sweep configurations used by the rate studies."""
    half = 10.0 ** -0.5
    presets = {
        "rate_c1_h1": ExperimentConfig(
            problem=ProblemSpec(a0="linear"), mode=Mode.NOISY_C1,
            alpha_rule="delta", delta_list=(1e-2, 1e-3, 1e-4, 1e-5)),
        "rate_c1_h3_l2": ExperimentConfig(
            problem=ProblemSpec(a0="cosine"), mode=Mode.NOISY_C1,
            alpha_rule="delta_23", delta_list=(1e-3, 1e-4, 1e-5, 1e-6)),
        "rate_c1_h3_h1": ExperimentConfig(
            problem=ProblemSpec(a0="cosine"), mode=Mode.NOISY_C1,
            alpha_rule="sqrt_delta", delta_list=(1e-4, 1e-5, 1e-6, 1e-7)),
        "rate_c1_shift": ExperimentConfig(
            problem=ProblemSpec(a0="linear_plus2", c_end=2.0),
            mode=Mode.NOISY_C1, alpha_rule="delta", shift_c=2.0,
            delta_list=(1e-2, 1e-3, 1e-4, 1e-5)),
        "rate_l2_h1": ExperimentConfig(
            problem=ProblemSpec(a0="linear", composite="cubic", n=64001),
            mode=Mode.NOISY_L2, alpha_rule="delta",
            delta_list=(1e-3 * half, 1e-4, 1e-4 * half, 1e-5, 1e-5 * half)),
        "rate_l2_h2": ExperimentConfig(
            problem=ProblemSpec(a0="pw_quad"), mode=Mode.NOISY_L2,
            alpha_rule="delta",
            delta_list=(1e-3 * half, 1e-4, 1e-4 * half, 1e-5, 1e-5 * half)),
        "rate_l2_h3": ExperimentConfig(
            problem=ProblemSpec(a0="cosine"), mode=Mode.NOISY_L2,
            alpha_rule="delta_23",
            delta_list=(1e-3, 1e-3 * half, 1e-4, 1e-4 * half, 1e-5)),
    }
    if name not in presets:
        raise ConfigError(f"unknown preset {name!r} (choices: {sorted(presets)})")
    return presets[name]
