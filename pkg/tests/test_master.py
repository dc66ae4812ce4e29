import numpy as np
import pytest

from atomlaser.errors import VariantMismatchError
from atomlaser.exact import TimeGrid, expected_adag, solve_amplitude
from atomlaser.master import (
    MarkovConstant,
    born_adag_direct,
    born_adag_nonmarkov,
    born_markov_adag,
    born_markov_number,
    born_nonmarkov_solution,
    born_number_nonmarkov,
    markov_constant,
)
from atomlaser.model import Gaussian, KernelSpec, SystemParams


def test_markov_constant_variants(gaussian_kernel, broadband_kernel, delta_kernel):
    assert markov_constant(gaussian_kernel).decay_rate == pytest.approx(1924.754, abs=1e-2)
    assert markov_constant(broadband_kernel).c.imag == pytest.approx(0, abs=1e-9)
    assert markov_constant(delta_kernel).c == 750.0
    with pytest.raises(ValueError):
        MarkovConstant(-1.0 + 0j)


def test_born_markov_number_is_exponential(gaussian_kernel):
    mc = markov_constant(gaussian_kernel)
    t = np.linspace(0, 5e-3, 11)
    n = born_markov_number(3.0, mc, t)
    assert np.allclose(n, 3.0 * np.exp(-2 * mc.c.real * t), rtol=1e-14)
    # initial slope -(c + c*) n0
    h = 1e-9
    assert (born_markov_number(1.0, mc, h) - 1.0) / h == pytest.approx(-mc.decay_rate, rel=1e-5)
    with pytest.raises(ValueError):
        born_markov_number(1.0, mc, -1.0)


def test_born_markov_adag(gaussian_kernel, system):
    mc = markov_constant(gaussian_kernel)
    a = born_markov_adag(0.5 + 0.5j, mc, system, np.array([0.0, 1e-3]))
    assert a[0] == 0.5 - 0.5j
    assert abs(a[1]) == pytest.approx(abs(a[0]) * np.exp(-mc.c.real * 1e-3))


def test_delta_kernel_markov_is_exact(delta_kernel):
    grid = TimeGrid(5e-3, 500)
    exact = solve_amplitude(delta_kernel, grid).population
    mc = markov_constant(delta_kernel)
    assert np.allclose(born_markov_number(1.0, mc, grid.times), exact, rtol=1e-13)


def test_born_only_population_is_real_and_wrong(gaussian_kernel, broadband_kernel):
    grid = TimeGrid(5e-3, 5000)
    for k in (gaussian_kernel, broadband_kernel):
        w, dw = born_nonmarkov_solution(k, grid)
        assert w.dtype == float and dw[0] == 0
        exact = solve_amplitude(k, grid).population
        # the Born-only number drops below zero, the exact one never does
        assert w.min() < 0
        assert np.max(np.abs(w - exact)) > 0.1
    series = born_number_nonmarkov(broadband_kernel, 2.0, grid)
    assert series.value[0] == 2.0


def test_born_only_adag_equals_exact(gaussian_kernel, broadband_kernel):
    grid = TimeGrid(5e-3, 5000)
    for k in (gaussian_kernel, broadband_kernel):
        traj = solve_amplitude(k, grid)
        system = SystemParams(k.system.omega0, k.system.mass, n0=1.0, a0=1.0)
        direct = born_adag_direct(k, 1.0, grid)
        assert np.max(np.abs(direct - expected_adag(traj, system))) < 1e-6
        assert np.array_equal(born_adag_nonmarkov(k, 1.0, grid, traj),
                              expected_adag(traj, system))


def test_born_only_rejects_delta_kernel(delta_kernel):
    with pytest.raises(VariantMismatchError):
        born_nonmarkov_solution(delta_kernel, TimeGrid(1e-3, 10))


def test_born_only_uncoupled(system):
    k = KernelSpec(system, Gaussian(0.0, 1e6))
    grid = TimeGrid(1e-3, 10)
    w, _ = born_nonmarkov_solution(k, grid)
    assert np.all(w == 1)
    a = born_adag_direct(k, 1.0, grid)
    assert np.allclose(a, np.exp(1j * system.omega0 * grid.times))
