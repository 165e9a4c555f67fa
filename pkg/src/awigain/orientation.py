"""
Orientation statistics of an axially symmetric molecule in a control field.

The molecular axis makes an angle theta0 with the control field.  With
x = cos(theta0) the equilibrium distribution per unit solid angle is

    f(x) = A exp(p x + q x^2)

where p is the permanent-dipole parameter and q the signed
polarizability-anisotropy parameter.  All exponentials are evaluated
relative to the maximum of the exponent on [-1, 1] so that p or q in the
hundreds never overflow.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import BOLTZMANN
from .errors import InvalidArgument, QuadratureError
from .quadrature import gauss_legendre, node_schedule

SERIES_THRESHOLD = 1e-2
CONTINUED_FRACTION_LIMIT = 1.0
_CF_DEPTH = 24

QUAD_RTOL = 1e-12


@dataclass(frozen=True)
class AlignmentParams:
    """Dimensionless orientation parameters of one electronic level.

    Attributes
    ----------
    p : float
        Permanent-dipole parameter mu E0 / kT, non-negative.
    q : float
        Induced-dipole parameter (b33 - b11) E0^2 / 2kT, signed.
    """

    p: float = 0.0
    q: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.p) and math.isfinite(self.q)):
            raise InvalidArgument(f"alignment parameters must be finite, got p={self.p}, q={self.q}")
        if self.p < 0:
            raise InvalidArgument(f"p must be >= 0, got {self.p}")

    @property
    def isotropic(self):
        return self.p == 0 and self.q == 0


@dataclass(frozen=True)
class OrientationAngle:
    theta0: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0 <= self.theta0 <= math.pi:
            raise InvalidArgument(f"theta0 must lie in [0, pi], got {self.theta0}")
        if not 0 <= self.phi < 2 * math.pi:
            raise InvalidArgument(f"phi must lie in [0, 2pi), got {self.phi}")


def _check_finite(p):
    if not math.isfinite(p):
        raise InvalidArgument(f"argument must be finite, got {p}")


def _cf_langevin_over_p(p):
    # Lambert: coth p - 1/p = p / (3 + p^2 / (5 + p^2 / (7 + ...)))
    p2 = p * p
    t = 2 * _CF_DEPTH + 3.0
    for k in range(_CF_DEPTH, 0, -1):
        t = (2 * k + 1) + p2 / t
    return 1.0 / t


def langevin(p):
    """Langevin function L(p) = coth(p) - 1/p.

    Three branches keep the relative error near machine precision: a
    fifth-order series for |p| < 1e-2, a continued fraction up to |p| = 1
    (where the closed form still cancels a few digits away), and the
    closed form beyond.
    """
    p = float(p)
    _check_finite(p)
    a = abs(p)
    if a < SERIES_THRESHOLD:
        p2 = p * p
        return p * (1 / 3 - p2 / 45 + 2 * p2 * p2 / 945)
    if a < CONTINUED_FRACTION_LIMIT:
        return p * _cf_langevin_over_p(p)
    return 1.0 / math.tanh(p) - 1.0 / p


def langevin_over_p(p):
    """L(p)/p, finite at p = 0 where it equals 1/3."""
    p = float(p)
    _check_finite(p)
    a = abs(p)
    if a < SERIES_THRESHOLD:
        p2 = p * p
        return 1 / 3 - p2 / 45 + 2 * p2 * p2 / 945
    if a < CONTINUED_FRACTION_LIMIT:
        return _cf_langevin_over_p(p)
    return (1.0 / math.tanh(p) - 1.0 / p) / p


def interaction_energy(mu, delta_b, E0, theta0):
    """Energy of an axial molecule in a static field, in erg.

    U = -mu E0 cos(theta0) - (delta_b / 2) E0^2 cos^2(theta0), so that
    exp(-U/kT) = exp(p cos(theta0) + q cos^2(theta0)).
    """
    if E0 < 0:
        raise InvalidArgument(f"field amplitude must be >= 0, got {E0}")
    c = math.cos(theta0)
    return -mu * E0 * c - 0.5 * delta_b * E0 * E0 * c * c


def boltzmann_weight(mu, delta_b, E0, theta0, temperature):
    return math.exp(-interaction_energy(mu, delta_b, E0, theta0) / (BOLTZMANN * temperature))


def _exponent_max(p, q):
    """max of p x + q x^2 over x in [-1, 1]."""
    candidates = [p + q, -p + q]
    if q < 0:
        vertex = -p / (2 * q)
        if -1 < vertex < 1:
            candidates.append(p * vertex + q * vertex * vertex)
    return max(candidates)


def _adaptive_ratio(params, numerator):
    """<numerator(x)> under exp(p x + q x^2) on [-1, 1], plus log of the partition integral.

    The node count doubles until successive ratio estimates agree to
    QUAD_RTOL; the partition integral is returned as (log-scale shift,
    shifted integral) so callers can normalize without overflow.
    """
    p, q = params.p, params.q
    gmax = _exponent_max(p, q)
    prev = prev_z = prev_prev = None
    for n in node_schedule(16):
        x, w = gauss_legendre(n)
        weight = w * np.exp(p * x + q * x * x - gmax)
        z = float(weight.sum())
        if z == 0.0:
            # the peak is narrower than the node spacing; refine further
            continue
        est = float(weight @ numerator(x)) / z
        if (
            prev is not None
            and abs(est - prev) <= QUAD_RTOL * abs(est)
            and abs(z - prev_z) <= QUAD_RTOL * z
        ):
            return est, gmax, z
        prev_prev, prev, prev_z = prev, est, z
    raise QuadratureError(
        f"orientation average did not converge for p={p}, q={q}",
        estimates=(prev_prev, prev),
    )


def _partition(params):
    """(shift, Z) with 2 pi Z exp(shift) = integral of exp(p x + q x^2) over the sphere."""
    p, q = params.p, params.q
    if q == 0:
        # int_{-1}^{1} e^{p x} dx = 2 sinh(p)/p; shifted by p this is (1 - e^{-2p})/p
        if p < SERIES_THRESHOLD:
            return 0.0, 2.0 * (1 + p * p / 6 + p**4 / 120)
        return p, -math.expm1(-2 * p) / p
    _, gmax, z = _adaptive_ratio(params, np.ones_like)
    return gmax, z


def orientation_pdf(params, theta0):
    """Normalized orientation density per steradian at axis angle theta0."""
    if not 0 <= theta0 <= math.pi:
        raise InvalidArgument(f"theta0 must lie in [0, pi], got {theta0}")
    if params.isotropic:
        return 1.0 / (4 * math.pi)
    shift, z = _partition(params)
    x = math.cos(theta0)
    return math.exp(params.p * x + params.q * x * x - shift) / (2 * math.pi * z)


def orientation_pdf_grid(params, theta0):
    """Vectorized orientation_pdf over an array of angles."""
    theta0 = np.asarray(theta0, dtype=float)
    if np.any((theta0 < 0) | (theta0 > math.pi)):
        raise InvalidArgument("theta0 must lie in [0, pi]")
    shift, z = _partition(params)
    x = np.cos(theta0)
    return np.exp(params.p * x + params.q * x * x - shift) / (2 * math.pi * z)


def axis_moments(params):
    """Return (<cos^2 theta0>, <sin^2 theta0>/2) for one level.

    The second entry is computed on its own rather than as (1 - first)/2,
    which keeps the perpendicular moment accurate when the axis is almost
    fully aligned.
    """
    if params.q == 0:
        s = langevin_over_p(params.p)
        return 1.0 - 2.0 * s, s
    c2, _, _ = _adaptive_ratio(params, lambda x: x * x)
    s2h, _, _ = _adaptive_ratio(params, lambda x: 0.5 * (1.0 - x) * (1.0 + x))
    return c2, s2h


def mean_cos2_axis(params):
    """<cos^2 theta0> of the molecular axis relative to the control field.

    Uses 1 - 2 L(p)/p when q = 0 and adaptive Gauss-Legendre quadrature in
    cos(theta0) otherwise.

    Examples
    --------
    >>> round(mean_cos2_axis(AlignmentParams(0.0, 0.0)), 12)
    0.333333333333
    >>> round(mean_cos2_axis(AlignmentParams(4.0, 0.0)), 7)
    0.6246644
    """
    return axis_moments(params)[0]


def mean_cos2_axis_quadrature(params):
    """Quadrature path of mean_cos2_axis, used even when q = 0."""
    return _adaptive_ratio(params, lambda x: x * x)[0]
