import math

import numpy as np
import pytest

from atomlaser.errors import ConfigError, DomainEscapeError, VariantMismatchError
from atomlaser.exact import TimeGrid, solve_amplitude
from atomlaser.model import Broadband, Gaussian, KernelSpec, SystemParams
from atomlaser.spatial import (
    HybridState,
    PropagationConfig,
    SpatialGrid,
    cavity_population,
    centroid_acceleration,
    coupling_from_momentum,
    coupling_in_position,
    kinetic_phase_per_step,
    norm_check,
    propagate,
)

from conftest import MASS, W0

HBAR = 1.054571817e-34


def test_grid_validation():
    with pytest.raises(ConfigError):
        SpatialGrid(n_points=1000)
    with pytest.raises(ConfigError):
        SpatialGrid(n_points=128)
    with pytest.raises(ConfigError):
        SpatialGrid(1e-6, -1e-6, 256)
    g = SpatialGrid()
    assert g.dx == pytest.approx(300e-6 / 8192)
    assert np.max(np.abs(g.k)) == pytest.approx(math.pi / g.dx)


def test_coupling_profile(gaussian_kernel):
    grid = SpatialGrid()
    g = coupling_in_position(gaussian_kernel, grid)
    x = grid.x
    i0 = int(np.argmin(np.abs(x)))
    assert x[i0] == 0
    near = np.abs(x) < 20e-6  # beyond this both sides underflow to subnormals
    assert np.allclose(np.abs(g[near]) / abs(g[i0]), np.exp(-(1e6 * x[near]) ** 2),
                       rtol=1e-12, atol=0)
    # 1/e point at x = 1/sigma_k = 1 um (a grid point when dx = 31.25 nm)
    fine = SpatialGrid(-128e-6, 128e-6, 8192)
    gf = coupling_in_position(gaussian_kernel, fine)
    assert abs(gf[4096 + 32] / gf[4096]) == pytest.approx(math.exp(-1), rel=1e-12)
    # even profile: compare x_j with -x_j
    assert np.allclose(g[i0 + 1:i0 + 500], g[i0 - 1:i0 - 500:-1], rtol=1e-14)
    # ||g|| / hbar = sqrt(Gamma)
    assert math.sqrt(np.sum(np.abs(g) ** 2) * grid.dx) / HBAR == pytest.approx(1e3, rel=1e-12)


def test_coupling_matches_transform_of_momentum_profile(gaussian_kernel):
    grid = SpatialGrid()
    analytic = coupling_in_position(gaussian_kernel, grid)
    discrete = coupling_from_momentum(gaussian_kernel, grid)
    assert np.max(np.abs(discrete - analytic)) <= 1e-8 * np.max(np.abs(analytic))


def test_coupling_errors(system):
    k = KernelSpec(system, Gaussian(1e6, 1e6))
    with pytest.raises(ConfigError):
        coupling_in_position(k, SpatialGrid(-4e-6, 4e-6, 256))
    with pytest.raises(VariantMismatchError):
        coupling_in_position(KernelSpec(system, Broadband(1.0)), SpatialGrid())


def test_norm_check():
    grid = SpatialGrid(n_points=256)
    assert norm_check(HybridState.initial(grid), grid) == 1.0
    assert norm_check(HybridState(0j, np.zeros(256, complex)), grid) == 0.0


def test_uncoupled_cavity_only_rotates(system):
    k = KernelSpec(system, Gaussian(0.0, 1e6))
    tr = propagate(HybridState.initial(SpatialGrid()), k,
                   PropagationConfig(n_steps=2000, record_every=200))
    assert np.allclose(tr.population, 1.0, atol=1e-14)
    assert np.allclose(tr.c_a, np.exp(-1j * W0 * tr.t), atol=1e-12)


def test_norm_conserved_over_ten_thousand_steps(gaussian_kernel):
    tr = propagate(HybridState.initial(SpatialGrid()), gaussian_kernel,
                   PropagationConfig(n_steps=10_000, record_every=1000, gravity_on=True))
    assert np.max(np.abs(tr.norm - 1)) < 1e-6
    assert abs(norm_check(tr.final_state, SpatialGrid()) - 1) < 1e-6


def test_short_run_matches_exact_dynamics(gaussian_kernel):
    cfg = PropagationConfig(n_steps=10_000, record_every=50)
    tr = propagate(HybridState.initial(SpatialGrid()), gaussian_kernel, cfg)
    exact = solve_amplitude(gaussian_kernel, TimeGrid(1e-3, 2000))
    ref = np.interp(tr.t, exact.times, exact.population)
    assert np.max(np.abs(tr.population - ref)) < 1e-4
    pop = cavity_population(tr, n0=2.0)
    assert pop.value[0] == 2.0 and np.all(pop.value <= 2.0)


def test_halving_time_step(gaussian_kernel):
    coarse = propagate(HybridState.initial(SpatialGrid()), gaussian_kernel,
                       PropagationConfig(dt=2e-7, n_steps=5000, record_every=50,
                                         gravity_on=True))
    fine = propagate(HybridState.initial(SpatialGrid()), gaussian_kernel,
                     PropagationConfig(dt=1e-7, n_steps=10_000, record_every=100,
                                       gravity_on=True))
    assert np.max(np.abs(coarse.population - fine.population)) < 1e-3


def test_domain_escape_is_loud(gaussian_kernel):
    grid = SpatialGrid(-20e-6, 20e-6, 1024)
    with pytest.raises(DomainEscapeError):
        propagate(HybridState.initial(grid), gaussian_kernel,
                  PropagationConfig(n_steps=30_000, record_every=100, gravity_on=True), grid)


def test_large_step_warns(gaussian_kernel):
    grid = SpatialGrid()
    cfg = PropagationConfig(dt=1e-6, n_steps=2)
    assert kinetic_phase_per_step(grid, cfg, MASS, HBAR) > 1
    with pytest.warns(RuntimeWarning):
        propagate(HybridState.initial(grid), gaussian_kernel, cfg, grid)


def test_config_validation():
    with pytest.raises(ConfigError):
        PropagationConfig(dt=0.0)
    with pytest.raises(ConfigError):
        PropagationConfig(n_steps=0)
    assert PropagationConfig(U0=1.0).nonlinearity == 0.0
    assert PropagationConfig(U0=2.0, N_atoms=3.0, interactions_on=True).nonlinearity == 6.0


def test_initial_state_must_be_normalised(gaussian_kernel):
    grid = SpatialGrid(n_points=256)
    with pytest.raises(ConfigError):
        propagate(HybridState(0.5 + 0j, np.zeros(256, complex)), gaussian_kernel,
                  PropagationConfig(n_steps=1), grid)


@pytest.mark.slow
def test_second_parameter_set_matches_exact_dynamics():
    k = KernelSpec(SystemParams(2 * math.pi * 200, MASS), Gaussian(2e6, 1.5e6))
    tr = propagate(HybridState.initial(SpatialGrid()), k,
                   PropagationConfig(n_steps=30_000, record_every=100))
    exact = solve_amplitude(k, TimeGrid(3e-3, 3000))
    ref = np.interp(tr.t, exact.times, exact.population)
    assert math.sqrt(np.mean((tr.population - ref) ** 2)) < 0.02


@pytest.mark.slow
def test_centroid_falls_with_gravity(gaussian_kernel):
    # long horizon on a grid extended downhill; the fit uses the final 4 ms,
    # when well over 90% of the norm is in the continuum
    grid = SpatialGrid(-450e-6, 150e-6, 8192)
    tr = propagate(HybridState.initial(grid), gaussian_kernel,
                   PropagationConfig(n_steps=160_000, record_every=100, gravity_on=True),
                   grid)
    acc = centroid_acceleration(tr, min_continuum=0.9, window=4e-3)
    g_eff = 9.8 * math.sin(math.pi / 20)
    # the potential m g sin(theta) x pushes toward negative x
    assert acc == pytest.approx(-g_eff, rel=0.1)


@pytest.mark.slow
def test_gravity_and_interactions_end_below_interaction_free_plateau(gaussian_kernel):
    # N U0 gives a mean-field energy of hbar w0 at the peak continuum density
    # of the interaction-free run (2.74e5 / m)
    nu0 = HBAR * W0 / 2.74e5
    tr = propagate(HybridState.initial(SpatialGrid()), gaussian_kernel,
                   PropagationConfig(n_steps=50_000, gravity_on=True, interactions_on=True,
                                     U0=nu0))
    late = tr.t >= 0.75 * tr.t[-1]
    # long-time |u|^2 of the exact gravity-free model, from the bound-state pole
    assert np.mean(tr.population[late]) < 0.115153
