import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from atomlaser.errors import VariantMismatchError
from atomlaser.model import (
    INFINITY,
    Broadband,
    Dispersion,
    Gaussian,
    KernelSpec,
    PhotonDelta,
    SystemParams,
    alpha,
    hermiticity_check,
    kernel_eval,
    kernel_integral,
    kernel_integral_quadrature,
    reservoir_correlation,
)

from conftest import MASS, W0


def test_parameter_validation():
    with pytest.raises(ValueError):
        SystemParams(0.0, MASS)
    with pytest.raises(ValueError):
        SystemParams(W0, -1.0)
    with pytest.raises(ValueError):
        SystemParams(W0, MASS, n0=1.0, a0=2.0)
    with pytest.raises(ValueError):
        Gaussian(1e6, 0.0)
    with pytest.raises(ValueError):
        Gaussian(-1.0, 1e6)
    with pytest.raises(ValueError):
        Broadband(-1.0)
    Gaussian(0.0, 1e6)  # uncoupled reference is allowed


def test_dispersion_must_match_coupling(system):
    with pytest.raises(VariantMismatchError):
        KernelSpec(system, PhotonDelta(1.0), dispersion=Dispersion.ATOMIC)
    with pytest.raises(VariantMismatchError):
        KernelSpec(system, Gaussian(1e6, 1e6), dispersion=Dispersion.PHOTONIC)
    assert KernelSpec(system, PhotonDelta(1.0)).dispersion is Dispersion.PHOTONIC


def test_gaussian_kernel_at_origin_and_modulus(gaussian_kernel):
    assert kernel_eval(gaussian_kernel, 0.0) == pytest.approx(1e6)
    a = alpha(gaussian_kernel)
    tau = math.sqrt(15) / a  # |f| falls to half at sqrt(15)/alpha
    assert abs(kernel_eval(gaussian_kernel, tau)) == pytest.approx(0.5e6, rel=1e-12)


def test_kernel_eval_errors(gaussian_kernel, broadband_kernel, delta_kernel):
    with pytest.raises(ValueError):
        kernel_eval(gaussian_kernel, -1e-3)
    with pytest.raises(ValueError):
        kernel_eval(broadband_kernel, 0.0)
    with pytest.raises(VariantMismatchError):
        kernel_eval(delta_kernel, 1e-3)


def test_broadband_kernel_matches_gaussian_tail(system):
    # the Gaussian kernel approaches the broadband one for alpha tau >> 1
    g = KernelSpec(system, Gaussian(1e9, 1e9))
    b = KernelSpec(system, Broadband.from_gaussian(1e9, 1e9))
    tau = np.array([1e-3, 2e-3])
    assert np.allclose(kernel_eval(g, tau), kernel_eval(b, tau), rtol=1e-6)


def test_reservoir_correlation_hermitian(gaussian_kernel):
    assert hermiticity_check(gaussian_kernel, np.linspace(0, 1e-2, 101))
    f = reservoir_correlation(gaussian_kernel, 3e-4)
    assert reservoir_correlation(gaussian_kernel, -3e-4) == pytest.approx(np.conj(f))


def test_markov_constant_reference_values(gaussian_kernel, broadband_kernel):
    c = kernel_integral(gaussian_kernel, INFINITY)
    assert c.real == pytest.approx(962.377, abs=2e-3)
    assert c.imag == pytest.approx(747.281, abs=2e-3)
    cb = kernel_integral(broadband_kernel, INFINITY)
    # sqrt(2) pi |kappa0|^2 sqrt(m / (hbar w0)), real
    ref = math.sqrt(2) * math.pi / math.sqrt(2 * math.pi) * math.sqrt(MASS / (1.054571817e-34 * W0))
    assert cb.real == pytest.approx(ref, rel=1e-12)
    assert abs(cb.imag) < 1e-9 * abs(cb)
    assert cb.real == pytest.approx(1388.287, abs=2e-3)


def test_closed_form_against_quadrature(gaussian_kernel, broadband_kernel):
    for k in (gaussian_kernel, broadband_kernel):
        c = kernel_integral(k, INFINITY)
        q = kernel_integral_quadrature(k, INFINITY)
        assert abs(c - q) <= 1e-9 * abs(c)


@pytest.mark.parametrize("T", [1e-5, 3e-4, 2e-3, 7e-3])
def test_finite_horizon_integral(broadband_kernel, T):
    closed = kernel_integral(broadband_kernel, T)
    brute = kernel_integral_quadrature(broadband_kernel, T)
    assert abs(closed - brute) <= 1e-9 * abs(brute)


def test_finite_gaussian_integral_tends_to_c(gaussian_kernel):
    c = kernel_integral(gaussian_kernel, INFINITY)
    # the tail beyond T decays like T^-1/2: large T is close but not equal
    assert abs(kernel_integral(gaussian_kernel, 1.0) - c) < 0.05 * abs(c)
    assert kernel_integral(gaussian_kernel, 0.0) == 0
    with pytest.raises(ValueError):
        kernel_integral(gaussian_kernel, -1.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(1e4, 1e8), st.floats(1e5, 1e8), st.floats(50.0, 5e4))
def test_markov_constant_has_nonnegative_real_part(gamma, sigma_k, w0):
    k = KernelSpec(SystemParams(w0, MASS), Gaussian(gamma, sigma_k))
    c = kernel_integral(k, INFINITY)
    assert c.real >= 0
    assert abs(c - kernel_integral_quadrature(k, INFINITY)) <= 1e-6 * abs(c)


def test_kernel_replace(gaussian_kernel):
    k2 = gaussian_kernel.replace(coupling=Gaussian(2e6, 1e6))
    assert kernel_eval(k2, 0.0) == pytest.approx(2e6)
    assert k2.system == gaussian_kernel.system
