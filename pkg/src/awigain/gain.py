"""
Amplification index of a linearly polarized probe in an aligned molecular
ensemble.

For one level with axis moments c2 = <cos^2 theta0> and s2h = <sin^2 theta0>/2,
the probe sees

    M(psi) = c2 cos^2(psi) + s2h sin^2(psi)

where psi is the angle between the probe polarization and the control
field.  The gain is alpha = sigma0 (n_m M_m - n_g M_g), and the scaled
index used throughout is alpha' = alpha / (n_g sigma0).
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import HBAR, SPEED_OF_LIGHT
from .errors import InvalidArgument, QuadratureError
from .orientation import AlignmentParams, _exponent_max, axis_moments
from .quadrature import gauss_legendre, node_schedule

NUMERIC_RTOL = 1e-10
_PHI_NODES_START = 8
_PHI_NODES_CAP = 64


@dataclass(frozen=True)
class GainScenario:
    """Populations and per-level alignment of the upper (m) and lower (g) states.

    With sigma0 left as None every absolute result is in units of sigma0.
    """

    n_m: float
    n_g: float
    align_m: AlignmentParams = AlignmentParams()
    align_g: AlignmentParams = AlignmentParams()
    sigma0: Optional[float] = None

    def __post_init__(self):
        if self.n_m < 0 or self.n_g < 0:
            raise InvalidArgument("populations must be non-negative")
        if self.n_m == 0 and self.n_g == 0:
            raise InvalidArgument("at least one population must be positive")
        if self.sigma0 is not None and not self.sigma0 > 0:
            raise InvalidArgument(f"sigma0 must be positive, got {self.sigma0}")

    @classmethod
    def scaled(cls, pop_ratio, align_m=AlignmentParams(), align_g=AlignmentParams()):
        """Scenario with n_g = 1 and sigma0 = 1, so alpha equals alpha'."""
        return cls(n_m=pop_ratio, n_g=1.0, align_m=align_m, align_g=align_g)

    @property
    def cross_section(self):
        return 1.0 if self.sigma0 is None else self.sigma0


@dataclass(frozen=True)
class ProbeGeometry:
    """Angle psi in [0, pi/2] between probe polarization and control field."""

    psi: float = 0.0

    def __post_init__(self):
        if not 0 <= self.psi <= math.pi / 2:
            raise InvalidArgument(f"psi must lie in [0, pi/2], got {self.psi}")

    @classmethod
    def parallel(cls):
        return cls(0.0)

    @classmethod
    def perpendicular(cls):
        return cls(math.pi / 2)

    @classmethod
    def from_degrees(cls, degrees):
        if degrees == 90:
            return cls.perpendicular()
        return cls(math.radians(degrees))

    @property
    def label(self):
        if self.psi == 0:
            return "parallel"
        if self.psi == math.pi / 2:
            return "perpendicular"
        return f"angle:{math.degrees(self.psi):.9g}"


@dataclass(frozen=True)
class TransitionSpec:
    d_mg: float
    omega: float
    form_factor: float

    def __post_init__(self):
        if self.d_mg < 0 or self.form_factor < 0:
            raise InvalidArgument("transition dipole and form factor must be non-negative")
        if not self.omega > 0:
            raise InvalidArgument(f"omega must be positive, got {self.omega}")


@dataclass(frozen=True)
class GainResult:
    """alpha in 1/cm (or units of sigma0), alpha' = alpha/(n_g sigma0).

    mean_cos2_m and mean_cos2_g are the orientation averages of cos^2 of the
    angle between the transition dipole and the probe polarization.
    alpha_scaled is None when n_g = 0.
    """

    alpha: float
    alpha_scaled: Optional[float]
    mean_cos2_m: float
    mean_cos2_g: float

    @property
    def scaled_defined(self):
        return self.alpha_scaled is not None


def transition_probability(spec, field_amplitude, theta):
    """Induced transition rate W = B |E|^2 F(omega), B = 8 pi |d cos(theta)|^2 / hbar^2."""
    if field_amplitude < 0:
        raise InvalidArgument(f"field amplitude must be >= 0, got {field_amplitude}")
    projection = spec.d_mg * math.cos(theta)
    einstein_b = 8 * math.pi * projection * projection / HBAR**2
    return einstein_b * field_amplitude**2 * spec.form_factor


def sigma0_from_transition(spec):
    """Cross-section 8 pi |d|^2 omega F(omega) / (c hbar) in cm^2."""
    return 8 * math.pi * spec.d_mg**2 * spec.omega * spec.form_factor / (SPEED_OF_LIGHT * HBAR)


def _result(scenario, m_m, m_g):
    sigma = scenario.cross_section
    alpha = sigma * (scenario.n_m * m_m - scenario.n_g * m_g)
    scaled = alpha / (scenario.n_g * sigma) if scenario.n_g > 0 else None
    return GainResult(alpha=alpha, alpha_scaled=scaled, mean_cos2_m=m_m, mean_cos2_g=m_g)


def probe_moment(params, geometry):
    """<cos^2 theta> between transition dipole and probe for one level."""
    c2, s2h = axis_moments(params)
    if geometry.psi == 0:
        return c2
    cos_psi = math.cos(geometry.psi)
    sin_psi = math.sin(geometry.psi)
    return c2 * cos_psi * cos_psi + s2h * sin_psi * sin_psi


def gain_parallel(scenario):
    """Probe polarized along the control field."""
    return _result(scenario, axis_moments(scenario.align_m)[0], axis_moments(scenario.align_g)[0])


def gain_perpendicular(scenario):
    """Probe polarized across the control field; reduces to L(p)/p moments when q = 0."""
    return _result(scenario, axis_moments(scenario.align_m)[1], axis_moments(scenario.align_g)[1])


def gain_general(scenario, geometry):
    return _result(
        scenario,
        probe_moment(scenario.align_m, geometry),
        probe_moment(scenario.align_g, geometry),
    )


def _numeric_moment(params, geometry, n_x, n_phi):
    x, w = gauss_legendre(n_x)
    g = params.p * x + params.q * x * x - _exponent_max(params.p, params.q)
    density = w * np.exp(g)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    sin_theta0 = np.sqrt((1.0 - x) * (1.0 + x))
    cos_theta = (
        np.outer(x, np.full(n_phi, math.cos(geometry.psi)))
        + np.outer(sin_theta0, np.cos(phi)) * math.sin(geometry.psi)
    )
    # trapezoid in phi: uniform weights 2 pi / n_phi
    inner = (cos_theta * cos_theta).sum(axis=1) * (2 * np.pi / n_phi)
    return float(density @ inner) / (2 * np.pi * float(density.sum()))


def gain_numeric(scenario, geometry):
    """Gain by direct solid-angle quadrature of the orientation integral.

    Tensor rule: Gauss-Legendre in cos(theta0) times the periodic trapezoid
    rule in phi, both refined by doubling until each level's moment is
    stable to 1e-10 relative.  Independent of the closed-form averages and
    meant as a cross-check of gain_general.
    """
    prev = None
    history = []
    n_phi = _PHI_NODES_START
    for n_x in node_schedule(16):
        current = (
            _numeric_moment(scenario.align_m, geometry, n_x, n_phi),
            _numeric_moment(scenario.align_g, geometry, n_x, n_phi),
        )
        history.append(_result(scenario, *current).alpha)
        if prev is not None and all(
            abs(a - b) <= NUMERIC_RTOL * abs(a) for a, b in zip(current, prev)
        ):
            return _result(scenario, *current)
        prev = current
        n_phi = min(2 * n_phi, _PHI_NODES_CAP)
    raise QuadratureError(
        "solid-angle quadrature did not converge at the node cap",
        estimates=history[-2:],
    )


def decoupled_limit(n_m, sigma0=1.0):
    """Gain when the lower level is fully decoupled and the upper one isotropic."""
    if n_m < 0:
        raise InvalidArgument(f"population must be >= 0, got {n_m}")
    return sigma0 * n_m / 3.0


def propagate_intensity(I0, alpha, z):
    """Intensity after a path z through a medium with amplification index alpha."""
    if I0 < 0 or z < 0:
        raise InvalidArgument("intensity and path length must be non-negative")
    return I0 * math.exp(alpha * z)
