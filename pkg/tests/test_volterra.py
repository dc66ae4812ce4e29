import math

import numpy as np
import pytest

from atomlaser import volterra


def exponential_kernel_solution(k, beta, t):
    # u' = -int k e^{-beta tau} u(t - tau) dtau  <=>  u'' + beta u' + k u = 0,
    # u(0) = 1, u'(0) = 0
    disc = np.sqrt(complex(beta * beta - 4 * k))
    r1, r2 = (-beta + disc) / 2, (-beta - disc) / 2
    a = r2 / (r2 - r1)
    b = -r1 / (r2 - r1)
    return a * np.exp(r1 * t) + b * np.exp(r2 * t)


@pytest.mark.parametrize("k,beta", [(4e6, 1e3), (1e6, 5e3), (2.5e5, 1e3 + 2e3j)])
def test_smooth_kernel_against_ode_solution(k, beta):
    t_max, n = 5e-3, 4000
    u, _ = volterra.solve(lambda tau: k * np.exp(-beta * tau), t_max, n, singular=False)
    t = np.linspace(0, t_max, n + 1)
    assert np.max(np.abs(u - exponential_kernel_solution(k, beta, t))) < 1e-4


def test_second_order_convergence():
    k, beta = 4e6, 1e3
    errs = []
    for n in (500, 1000, 2000):
        u, _ = volterra.solve(lambda tau: k * np.exp(-beta * tau), 5e-3, n, singular=False)
        t = np.linspace(0, 5e-3, n + 1)
        errs.append(np.max(np.abs(u - exponential_kernel_solution(k, beta, t))))
    order = math.log2(errs[0] / errs[1]), math.log2(errs[1] / errs[2])
    assert min(order) > 1.8


def test_hat_moments_exact_for_constant_kernel():
    left, right = volterra.hat_moments(lambda tau: np.full(np.shape(tau), 3.0 + 0j), 0.1, 4)
    assert np.allclose(left, 0.15)
    assert np.allclose(right, 0.15)


def test_singular_first_interval():
    # int_0^h tau^-1/2 (h - tau)/h = 4/3 sqrt(h);  int_0^h tau^-1/2 tau/h = 2/3 sqrt(h)
    h = 1e-4
    left, right = volterra.hat_moments(lambda tau: 1 / np.sqrt(tau), h, 3, singular=True)
    assert left[0] == pytest.approx(4 / 3 * math.sqrt(h), rel=1e-13)
    assert right[0] == pytest.approx(2 / 3 * math.sqrt(h), rel=1e-13)


def test_backends_agree():
    if volterra.BACKEND != "cython":
        pytest.skip("compiled extension not built")
    h, n = 1e-6, 3001
    left, right = volterra.hat_moments(
        lambda tau: 1e6 * np.exp(1j * 772.8 * tau) / np.sqrt(1 + 2.1e3j * tau), h, n)
    c = volterra.convolution_weights(left, right)
    a = volterra.march(c, right, 0.3j, h, 1.0, n, backend="numpy")
    b = volterra.march(c, right, 0.3j, h, 1.0, n, backend="cython")
    assert np.max(np.abs(a[0] - b[0])) < 1e-12
    assert np.max(np.abs(a[1] - b[1])) < 1e-6 * np.max(np.abs(a[1]))


def test_march_rejects_short_weights_and_unknown_backend():
    with pytest.raises(ValueError):
        volterra.march(np.ones(3), np.ones(3), 0, 0.1, 1, 5)
    with pytest.raises(ValueError):
        volterra.march(np.ones(5), np.ones(5), 0, 0.1, 1, 5, backend="fortran")
