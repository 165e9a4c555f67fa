"""
Sweeps, transparency thresholds, optima and iso-gain contours of the scaled
amplification index alpha' = alpha / (n_g sigma0).

A sweep varies one of p_g, p_m, q_g, q_m or pop_ratio (= n_m/n_g); other
quantities may be tied to it through couplings such as p_m = 4 p_g, which is
how the fixed dipole-moment ratios of the reference figures are expressed.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from . import __version__
from .errors import (
    AWIError,
    DecoupledUpperStateError,
    InvalidArgument,
    NoRootError,
    SweepEvaluationError,
)
from .gain import GainScenario, ProbeGeometry, gain_general, probe_moment
from .orientation import AlignmentParams

VARIABLES = ("p_g", "p_m", "q_g", "q_m", "pop_ratio")
_DEFAULTS = {"p_g": 0.0, "p_m": 0.0, "q_g": 0.0, "q_m": 0.0, "pop_ratio": 1.0}

SCAN_SAMPLES = 256
OPTIMUM_GRID = 512
ROOT_ATOL = 1e-12
ROOT_MAXITER = 200
GOLDEN_XTOL = 1e-8

FIGURE_RANGE = (0.0, 10.0, 401)
CONTOUR_LEVELS = (-0.05, 0.0, 0.05, 0.10, 0.15)
FIGURE_POP_RATIO = 0.8
DIPOLE_RATIO = 4.0


def _check_variable(name):
    if name not in VARIABLES:
        raise InvalidArgument(f"unknown variable {name!r}; expected one of {', '.join(VARIABLES)}")


def _check_couplings(variable, couplings):
    for target, multiplier in couplings:
        _check_variable(target)
        if target == variable:
            raise InvalidArgument(f"{variable} cannot be coupled to itself")
        if not multiplier > 0:
            raise InvalidArgument(f"coupling multiplier must be positive, got {multiplier}")


def _scenario_values(variable, x, couplings, fixed):
    values = dict(_DEFAULTS)
    values.update(fixed)
    values[variable] = x
    for target, multiplier in couplings:
        values[target] = multiplier * x
    return values


def _levels(values):
    return (
        AlignmentParams(values["p_m"], values["q_m"]),
        AlignmentParams(values["p_g"], values["q_g"]),
    )


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    count: int
    couplings: Tuple[Tuple[str, float], ...] = ()
    fixed: Dict[str, float] = field(default_factory=dict)
    geometry: ProbeGeometry = ProbeGeometry()

    def __post_init__(self):
        _check_variable(self.variable)
        if not self.start < self.stop:
            raise InvalidArgument(f"sweep needs start < stop, got {self.start} >= {self.stop}")
        if self.count < 2:
            raise InvalidArgument(f"sweep needs at least 2 points, got {self.count}")
        object.__setattr__(self, "couplings", tuple((t, float(m)) for t, m in self.couplings))
        _check_couplings(self.variable, self.couplings)
        for key in self.fixed:
            _check_variable(key)
        nonnegative = {"p_g", "p_m", "pop_ratio"}
        driven = {self.variable} | {t for t, _ in self.couplings}
        if driven & nonnegative and self.start < 0:
            raise InvalidArgument(f"{self.variable} range must start at >= 0 here, got {self.start}")
        for key, value in self.fixed.items():
            if key in nonnegative and key not in driven and value < 0:
                raise InvalidArgument(f"{key} must be >= 0, got {value}")

    def scenario(self, x):
        values = _scenario_values(self.variable, x, self.couplings, self.fixed)
        align_m, align_g = _levels(values)
        return GainScenario.scaled(values["pop_ratio"], align_m, align_g)

    def alpha_scaled(self, x):
        return gain_general(self.scenario(x), self.geometry).alpha_scaled

    def grid(self):
        return np.linspace(self.start, self.stop, self.count)

    def describe(self):
        """Flat, ordered description used for output metadata."""
        fixed = {k: v for k, v in sorted(self.fixed.items()) if k != self.variable}
        return {
            "variable": self.variable,
            "range": f"{self.start:.9g},{self.stop:.9g},{self.count}",
            "couplings": ";".join(f"{t}={m:.9g}*{self.variable}" for t, m in self.couplings) or "none",
            "fixed": ";".join(f"{k}={v:.9g}" for k, v in fixed.items()) or "none",
            "geometry": self.geometry.label,
        }


@dataclass(frozen=True)
class SweepResult:
    points: List[Tuple[float, float]]
    metadata: Dict[str, str]


@dataclass(frozen=True)
class ContourResult:
    level: float
    points: List[Tuple[float, float]]
    omitted: int = 0


@dataclass(frozen=True)
class OptimumResult:
    x: float
    alpha: float
    boundary: bool = False


def _metadata(described):
    meta = {"version": __version__}
    meta.update(described)
    meta["generated"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return meta


def _evaluate(spec, x):
    try:
        value = spec.alpha_scaled(float(x))
    except AWIError as exc:
        raise SweepEvaluationError(f"evaluation failed at x={x:.9g}: {exc}", x) from exc
    if value is None or not math.isfinite(value):
        raise SweepEvaluationError(f"non-finite alpha' at x={x:.9g}", x)
    return value


def run_sweep(spec, workers=1):
    """Evaluate alpha' on ``spec.count`` evenly spaced points.

    With workers > 1 the points are evaluated on a thread pool; results are
    collected in grid order either way.
    """
    xs = [float(x) for x in spec.grid()]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            alphas = list(pool.map(lambda x: _evaluate(spec, x), xs))
    else:
        alphas = [_evaluate(spec, x) for x in xs]
    return SweepResult(points=list(zip(xs, alphas)), metadata=_metadata(spec.describe()))


def _check_bracket(bracket):
    low, high = map(float, bracket)
    if not low < high:
        raise InvalidArgument(f"bracket needs low < high, got ({low}, {high})")
    return low, high


def find_transparency_threshold(spec, bracket):
    """x at which alpha' crosses zero inside ``bracket``.

    If the bracket ends do not straddle a sign change, the first sign change
    on a 256-point scan is used.
    """
    low, high = _check_bracket(bracket)
    f = spec.alpha_scaled
    f_low, f_high = f(low), f(high)
    if f_low == 0:
        return low
    if f_high == 0:
        return high
    if f_low * f_high > 0:
        xs = np.linspace(low, high, SCAN_SAMPLES)
        values = [f(float(x)) for x in xs]
        for i in range(len(xs) - 1):
            if values[i] == 0:
                return float(xs[i])
            if values[i] * values[i + 1] < 0:
                low, high = float(xs[i]), float(xs[i + 1])
                break
        else:
            raise NoRootError(
                f"alpha' does not change sign on [{bracket[0]:.9g}, {bracket[1]:.9g}]; "
                f"observed range [{min(values):.9g}, {max(values):.9g}]",
                interval=(float(bracket[0]), float(bracket[1])),
                alpha_min=min(values),
                alpha_max=max(values),
            )
    root = brentq(f, low, high, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=ROOT_MAXITER)
    if abs(f(root)) > ROOT_ATOL:
        raise NoRootError(f"root search stalled at x={root:.9g} with alpha'={f(root):.3g}")
    return float(root)


def golden_section_max(f, low, high, xtol=GOLDEN_XTOL, maxiter=200):
    """Maximize a unimodal f on [low, high]; returns (x, f(x))."""
    ratio = (math.sqrt(5) - 1) / 2
    a, b = low, high
    c = b - ratio * (b - a)
    d = a + ratio * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if b - a <= xtol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - ratio * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + ratio * (b - a)
            fd = f(d)
    x = c if fc >= fd else d
    return x, max(fc, fd)


def find_optimal_alignment(spec, bracket):
    """Maximum of alpha' over ``bracket``.

    A 512-point scan picks the best cell, then golden-section search refines
    inside the neighbouring cells.  A maximum on either end of the bracket is
    flagged as a boundary result.
    """
    low, high = _check_bracket(bracket)
    f = spec.alpha_scaled
    xs = np.linspace(low, high, OPTIMUM_GRID)
    values = np.array([f(float(x)) for x in xs])
    i = int(np.argmax(values))
    a = float(xs[max(i - 1, 0)])
    b = float(xs[min(i + 1, len(xs) - 1)])
    x, value = golden_section_max(f, a, b)
    best_grid = float(values[i])
    if best_grid > value:
        x, value = float(xs[i]), best_grid
    for edge in (low, high):
        if abs(x - edge) <= GOLDEN_XTOL and f(edge) >= value:
            return OptimumResult(x=edge, alpha=f(edge), boundary=True)
    return OptimumResult(x=float(x), alpha=float(value), boundary=False)


def population_threshold(align_m, align_g, geometry):
    """n_m/n_g at which alpha' vanishes for fixed alignment of both levels."""
    m_m = probe_moment(align_m, geometry)
    if m_m == 0:
        raise DecoupledUpperStateError("upper level is decoupled from the probe")
    return probe_moment(align_g, geometry) / m_m


def iso_gain_contour(level, p_range, geometry, couplings=(), variable="p_g", fixed=None):
    """Points (x, n_m/n_g) on which alpha' equals ``level``.

    alpha' is affine in the population ratio, so every grid point is solved
    exactly: ratio = (level + M_g) / M_m.  Points without a positive finite
    ratio are dropped and counted in ``omitted``.
    """
    if not math.isfinite(level):
        raise InvalidArgument(f"contour level must be finite, got {level}")
    _check_variable(variable)
    if variable == "pop_ratio":
        raise InvalidArgument("contours are traced over an alignment parameter")
    couplings = tuple((t, float(m)) for t, m in couplings)
    _check_couplings(variable, couplings)
    fixed = dict(fixed or {})
    start, stop, count = p_range
    points = []
    omitted = 0
    for x in np.linspace(start, stop, int(count)):
        align_m, align_g = _levels(_scenario_values(variable, float(x), couplings, fixed))
        m_m = probe_moment(align_m, geometry)
        m_g = probe_moment(align_g, geometry)
        if m_m == 0:
            omitted += 1
            continue
        ratio = (level + m_g) / m_m
        if ratio > 0 and math.isfinite(ratio):
            points.append((float(x), ratio))
        else:
            omitted += 1
    return ContourResult(level=float(level), points=points, omitted=omitted)


def figure_sweep_spec(figure_id, count=FIGURE_RANGE[2]):
    """SweepSpec behind the gain-vs-alignment figures (1: parallel, 3: perpendicular)."""
    start, stop, _ = FIGURE_RANGE
    if figure_id == 1:
        return SweepSpec(
            "p_g", start, stop, count,
            couplings=(("p_m", DIPOLE_RATIO),),
            fixed={"pop_ratio": FIGURE_POP_RATIO},
            geometry=ProbeGeometry.parallel(),
        )
    if figure_id == 3:
        return SweepSpec(
            "p_m", start, stop, count,
            couplings=(("p_g", DIPOLE_RATIO),),
            fixed={"pop_ratio": FIGURE_POP_RATIO},
            geometry=ProbeGeometry.perpendicular(),
        )
    raise InvalidArgument(f"figure {figure_id} is not a sweep figure")


def figure_contour_setup(figure_id):
    """(variable, couplings, geometry) for the iso-gain figures 2 and 4."""
    if figure_id == 2:
        return "p_g", (("p_m", DIPOLE_RATIO),), ProbeGeometry.parallel()
    if figure_id == 4:
        return "p_m", (("p_g", DIPOLE_RATIO),), ProbeGeometry.perpendicular()
    raise InvalidArgument(f"figure {figure_id} is not a contour figure")


def figure_contours(figure_id, levels=CONTOUR_LEVELS, p_range=FIGURE_RANGE):
    variable, couplings, geometry = figure_contour_setup(figure_id)
    return [
        iso_gain_contour(level, p_range, geometry, couplings, variable=variable)
        for level in levels
    ]


def contour_metadata(figure_id=None, variable="p_g", couplings=(), geometry=None,
                     p_range=FIGURE_RANGE, levels=CONTOUR_LEVELS):
    described = {}
    if figure_id is not None:
        described["figure"] = str(figure_id)
    described.update({
        "variable": variable,
        "range": f"{p_range[0]:.9g},{p_range[1]:.9g},{int(p_range[2])}",
        "couplings": ";".join(f"{t}={m:.9g}*{variable}" for t, m in couplings) or "none",
        "geometry": (geometry or ProbeGeometry()).label,
        "levels": ",".join(f"{lv:.9g}" for lv in levels),
    })
    return _metadata(described)


def sweep_metadata(spec: SweepSpec, figure_id: Optional[int] = None):
    described = {"figure": str(figure_id)} if figure_id is not None else {}
    described.update(spec.describe())
    return _metadata(described)
