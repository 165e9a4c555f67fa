"""Gauss-Legendre rules built by Newton iteration on the Legendre recurrence."""

from functools import lru_cache

import numpy as np

MAX_NODES = 4096


def _legendre_pair(n, x):
    """P_n(x) and P_{n-1}(x) by the three-term recurrence."""
    p_prev = np.ones_like(x)
    p = x.copy()
    for j in range(2, n + 1):
        p_prev, p = p, ((2 * j - 1) * x * p - (j - 1) * p_prev) / j
    return p, p_prev


@lru_cache(maxsize=32)
def gauss_legendre(n):
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].

    Returned arrays are read-only and sorted by increasing node.
    """
    if n < 1:
        raise ValueError("need at least one node")
    if n == 1:
        x, w = np.array([0.0]), np.array([2.0])
    else:
        k = np.arange(n, 0, -1)
        # Newton in the angle so that 1 - x^2 = sin^2(theta) keeps full
        # precision near the endpoints.
        theta = np.pi * (k - 0.25) / (n + 0.5)
        for _ in range(100):
            x = np.cos(theta)
            s = np.sin(theta)
            p, p_prev = _legendre_pair(n, x)
            # dP_n/dtheta = -n (P_{n-1} - x P_n) / sin(theta)
            step = -p * s / (n * (p_prev - x * p))
            theta = theta - step
            # quadratic convergence: the next step would be far below rounding
            if np.max(np.abs(step)) < 1e-12:
                break
        x = np.cos(theta)
        s = np.sin(theta)
        p, p_prev = _legendre_pair(n, x)
        w = 2.0 * s * s / (n * (p_prev - x * p)) ** 2
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def node_schedule(start=16, cap=MAX_NODES):
    """Doubling sequence of rule orders, ending at the cap."""
    n = start
    while n < cap:
        yield n
        n *= 2
    yield cap
