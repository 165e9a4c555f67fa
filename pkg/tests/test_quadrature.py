import math

import numpy as np
import pytest

from awigain.quadrature import gauss_legendre, node_schedule


@pytest.mark.parametrize("n", [1, 2, 3, 7, 16, 64, 257])
def test_exact_for_polynomials_up_to_degree_2n_minus_1(n):
    x, w = gauss_legendre(n)
    for k in range(2 * n):
        exact = 0.0 if k % 2 else 2.0 / (k + 1)
        assert w @ x**k == pytest.approx(exact, abs=1e-13)


def test_nodes_sorted_symmetric_and_read_only():
    x, w = gauss_legendre(33)
    assert np.all(np.diff(x) > 0)
    np.testing.assert_allclose(x, -x[::-1], atol=1e-15)
    np.testing.assert_allclose(w, w[::-1], rtol=1e-13)
    with pytest.raises(ValueError):
        x[0] = 0.0


def test_matches_numpy_rule():
    x, w = gauss_legendre(100)
    ref_x, ref_w = np.polynomial.legendre.leggauss(100)
    np.testing.assert_allclose(x, ref_x, atol=1e-15)
    np.testing.assert_allclose(w, ref_w, rtol=0, atol=1e-14)


def test_sharp_endpoint_peak_at_cap():
    # int_{-1}^{1} exp(600 (x - 1)) dx = (1 - exp(-1200)) / 600
    x, w = gauss_legendre(4096)
    assert w @ np.exp(600 * (x - 1)) == pytest.approx(1 / 600, rel=1e-13)


def test_schedule_doubles_to_cap():
    assert list(node_schedule(16, 100)) == [16, 32, 64, 100]
    assert list(node_schedule(16))[-1] == 4096


def test_rejects_empty_rule():
    with pytest.raises(ValueError):
        gauss_legendre(0)
    assert math.isclose(gauss_legendre(1)[1][0], 2.0)
