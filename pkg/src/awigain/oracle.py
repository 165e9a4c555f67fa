"""
Brute-force reference evaluations of the orientation averages.

Nothing here reuses the library's quadrature: the dense rule is built from
scipy's Gauss-Legendre nodes in the polar angle itself (not its cosine), and
the Monte Carlo estimator samples orientations by rejection from the uniform
sphere.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

from .errors import EnvelopeError, InvalidArgument

MIN_ACCEPTANCE = 1e-6
_PHI_NODES = 32
_BATCH = 65536


@dataclass(frozen=True)
class OracleConfig:
    """Settings for the reference evaluations.

    The shard count is part of the configuration's identity: the merged
    Monte Carlo estimate is reproducible only for a fixed number of shards.
    """

    sample_count: int = 1_000_000
    seed: int = 0
    quadrature_nodes: int = 2048
    shards: int = 1

    def __post_init__(self):
        if self.sample_count < 1:
            raise InvalidArgument("sample_count must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgument("seed must be a 64-bit unsigned integer")
        if self.quadrature_nodes < 1:
            raise InvalidArgument("quadrature_nodes must be >= 1")
        if self.shards < 1:
            raise InvalidArgument("shards must be >= 1")


def _log_envelope(p, q):
    # exponent p x + q x^2 is maximal at an endpoint or at the interior vertex
    best = max(p + q, q - p)
    if q < 0 and abs(p) < -2 * q:
        best = max(best, -p * p / (4 * q))
    return best


def _probe_cos2(x, phi, psi):
    sin_theta0 = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    c = x * math.cos(psi) + sin_theta0 * np.cos(phi) * math.sin(psi)
    return c * c


def _sample_shard(params, psi, count, seed):
    rng = np.random.default_rng(seed)
    shift = _log_envelope(params.p, params.q)
    chunks = []
    accepted = proposed = 0
    while accepted < count:
        x = rng.uniform(-1.0, 1.0, _BATCH)
        phi = rng.uniform(0.0, 2 * math.pi, _BATCH)
        u = rng.uniform(0.0, 1.0, _BATCH)
        keep = u < np.exp(params.p * x + params.q * x * x - shift)
        proposed += _BATCH
        accepted += int(keep.sum())
        chunks.append(_probe_cos2(x[keep], phi[keep], psi))
        if proposed >= 1_000_000 and accepted / proposed < MIN_ACCEPTANCE:
            raise EnvelopeError(
                f"rejection acceptance {accepted / proposed:.2e} is below {MIN_ACCEPTANCE:g}; "
                "use dense_gain for this alignment"
            )
    return np.concatenate(chunks)[:count]


def mc_mean_cos2(params, geometry, config=OracleConfig()):
    """Monte Carlo estimate of <cos^2 theta> between axis and probe.

    Returns (estimate, standard error).  Orientations are drawn uniformly on
    the sphere and accepted with probability exp(g - max g), where g is the
    Boltzmann exponent.  Shard k uses seed + k.
    """
    counts = [config.sample_count // config.shards] * config.shards
    for k in range(config.sample_count % config.shards):
        counts[k] += 1
    values = np.concatenate([
        _sample_shard(params, geometry.psi, n, (config.seed + k) % 2**64)
        for k, n in enumerate(counts) if n > 0
    ])
    n = values.size
    estimate = float(values.mean())
    std_error = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else math.inf
    return estimate, std_error


@lru_cache(maxsize=8)
def _tensor_rule(n_theta):
    t, wt = roots_legendre(n_theta)
    u, wu = roots_legendre(_PHI_NODES)
    return 0.5 * math.pi * (t + 1.0), 0.5 * math.pi * wt, math.pi * (u + 1.0), math.pi * wu


@lru_cache(maxsize=4096)
def _dense_moment(p, q, psi, n_theta):
    theta, w_theta, phi, w_phi = _tensor_rule(n_theta)
    c = np.cos(theta)
    g = p * c + q * c * c
    density = w_theta * np.sin(theta) * np.exp(g - g.max())
    probe = (
        np.outer(c, np.full(phi.size, math.cos(psi)))
        + np.outer(np.sin(theta), np.cos(phi)) * math.sin(psi)
    )
    inner = (probe * probe) @ w_phi
    return float(density @ inner) / (float(density.sum()) * float(w_phi.sum()))


def dense_gain(scenario, geometry, config=OracleConfig()):
    """alpha' from a single fixed-order tensor Gauss rule over (theta0, phi).

    Requires n_g > 0.  Per-level moments are memoized on (p, q, psi, nodes).
    """
    n = config.quadrature_nodes
    m_m = _dense_moment(scenario.align_m.p, scenario.align_m.q, geometry.psi, n)
    m_g = _dense_moment(scenario.align_g.p, scenario.align_g.q, geometry.psi, n)
    return (scenario.n_m * m_m - scenario.n_g * m_g) / scenario.n_g
