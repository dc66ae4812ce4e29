"""Physical parameters, coupling shapes and the reservoir correlation kernel.

The kernel ``f'(tau)`` is the memory function of the cavity amplitude::

    du/dt = -int_0^t f'(tau) u(t - tau) dtau

For Gaussian coupling of width ``sigma_k`` it is
``Gamma * exp(i w0 tau) / sqrt(1 + i alpha tau)`` with ``alpha = hbar sigma_k^2 / m``;
the flat (broadband) limit keeps ``|kappa(k0)|^2 = Gamma / (sqrt(2 pi) sigma_k)``
fixed and behaves as ``tau**-0.5``.  All quantities are SI.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import integrate

from .errors import AccuracyError, VariantMismatchError
from .special import complex_erf, erfcx

HBAR = 1.054571817e-34
C_LIGHT = 2.99792458e8

#: Distinguished upper limit for :func:`kernel_integral`.
INFINITY = math.inf

_QUAD_RTOL = 1e-8


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = HBAR
    c_light: float = C_LIGHT

    def __post_init__(self):
        if not (self.hbar > 0 and self.c_light > 0):
            raise ValueError("physical constants must be strictly positive")


@dataclass(frozen=True)
class SystemParams:
    """Cavity mode: trap frequency, atomic mass and initial state."""

    omega0: float
    mass: float
    n0: float = 1.0
    a0: complex = 1.0

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be > 0, got {self.omega0}")
        if not self.mass > 0:
            raise ValueError(f"mass must be > 0, got {self.mass}")
        if self.n0 < 0:
            raise ValueError(f"n0 must be >= 0, got {self.n0}")
        if abs(self.a0) ** 2 > self.n0 * (1 + 1e-12):
            raise ValueError("|a0|^2 cannot exceed the mean atom number n0")


@dataclass(frozen=True)
class Gaussian:
    """Gaussian coupling in momentum space; ``gamma`` in s^-2, ``sigma_k`` in 1/m."""

    gamma: float
    sigma_k: float

    def __post_init__(self):
        _positive(sigma_k=self.sigma_k)
        _nonnegative(gamma=self.gamma)


@dataclass(frozen=True)
class Broadband:
    """Flat coupling; ``kappa0_sq`` is ``|kappa(k0)|^2`` in m s^-2."""

    kappa0_sq: float

    def __post_init__(self):
        _nonnegative(kappa0_sq=self.kappa0_sq)

    @classmethod
    def from_gaussian(cls, gamma: float, sigma_k: float) -> "Broadband":
        return cls(gamma / (math.sqrt(2 * math.pi) * sigma_k))


@dataclass(frozen=True)
class PhotonDelta:
    """Optical delta-correlated reservoir with real damping constant ``rate_c``."""

    rate_c: float

    def __post_init__(self):
        _nonnegative(rate_c=self.rate_c)


CouplingSpec = Union[Gaussian, Broadband, PhotonDelta]


class Dispersion(enum.Enum):
    ATOMIC = "atomic"
    PHOTONIC = "photonic"


def _positive(**values):
    for name, v in values.items():
        if not v > 0:
            raise ValueError(f"{name} must be > 0, got {v}")


# a zero coupling strength is allowed: it is the uncoupled reference model
def _nonnegative(**values):
    for name, v in values.items():
        if not v >= 0:
            raise ValueError(f"{name} must be >= 0, got {v}")


@dataclass(frozen=True)
class KernelSpec:
    system: SystemParams
    coupling: CouplingSpec
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    dispersion: Dispersion = None

    def __post_init__(self):
        if self.dispersion is None:
            default = (Dispersion.PHOTONIC if isinstance(self.coupling, PhotonDelta)
                       else Dispersion.ATOMIC)
            object.__setattr__(self, "dispersion", default)
        photonic = self.dispersion is Dispersion.PHOTONIC
        if isinstance(self.coupling, PhotonDelta) != photonic:
            raise VariantMismatchError(
                f"{type(self.coupling).__name__} coupling is incompatible with "
                f"{self.dispersion.value} dispersion"
            )

    @property
    def omega0(self) -> float:
        return self.system.omega0

    def replace(self, **changes) -> "KernelSpec":
        import dataclasses

        return dataclasses.replace(self, **changes)


def _require(kernel: KernelSpec, *kinds):
    if not isinstance(kernel.coupling, kinds):
        names = " or ".join(k.__name__ for k in kinds)
        raise VariantMismatchError(
            f"operation needs {names} coupling, got {type(kernel.coupling).__name__}"
        )


def alpha(kernel: KernelSpec) -> float:
    """Spreading rate ``hbar sigma_k^2 / m`` of the Gaussian kernel (1/s)."""
    _require(kernel, Gaussian)
    return kernel.constants.hbar * kernel.coupling.sigma_k**2 / kernel.system.mass


def broadband_prefactor(kernel: KernelSpec) -> complex:
    """``K0`` such that the broadband kernel is ``K0 exp(i w0 tau) / sqrt(tau)``."""
    _require(kernel, Broadband)
    hbar, m = kernel.constants.hbar, kernel.system.mass
    return kernel.coupling.kappa0_sq * math.sqrt(m * math.pi / hbar) * (1 - 1j)


def kernel_eval(kernel: KernelSpec, tau):
    """Evaluate ``f'(tau)`` for ``tau >= 0`` (scalar or array)."""
    if isinstance(kernel.coupling, PhotonDelta):
        raise VariantMismatchError(
            "the photonic delta kernel has no pointwise value; use the analytic "
            "limits (markov_constant, solve_amplitude)"
        )
    t = np.asarray(tau, dtype=float)
    if np.any(t < 0):
        raise ValueError("kernel_eval requires tau >= 0")
    w0 = kernel.omega0
    if isinstance(kernel.coupling, Gaussian):
        val = kernel.coupling.gamma * np.exp(1j * w0 * t) / np.sqrt(1 + 1j * alpha(kernel) * t)
    else:
        if np.any(t == 0):
            raise ValueError("broadband kernel diverges at tau = 0")
        val = broadband_prefactor(kernel) * np.exp(1j * w0 * t) / np.sqrt(t)
    return val[()] if val.ndim == 0 else val


def reservoir_correlation(kernel: KernelSpec, tau):
    """``f(tau) = f'(tau) exp(-i w0 tau)`` for Gaussian coupling, any real tau."""
    _require(kernel, Gaussian)
    t = np.asarray(tau, dtype=float)
    val = kernel.coupling.gamma / np.sqrt(1 + 1j * alpha(kernel) * t)
    return val[()] if val.ndim == 0 else val


def hermiticity_check(kernel: KernelSpec, taus, rtol: float = 1e-12) -> bool:
    """True iff ``f(-tau) == conj(f(tau))`` at every ``tau`` within ``rtol``."""
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    fwd = reservoir_correlation(kernel, taus)
    back = reservoir_correlation(kernel, -taus)
    return bool(np.all(np.abs(np.conj(fwd) - back) <= rtol * np.abs(fwd)))


def _gaussian_c_closed(kernel: KernelSpec) -> complex:
    # Gamma sqrt(2 pi) / sqrt(2 w0 alpha) * exp(-r) (1 + erf(i sqrt r)), r = w0 / alpha,
    # with exp(-r) (1 + erf(i sqrt r)) = erfcx(-i sqrt r) to avoid overflow
    g = kernel.coupling.gamma
    w0 = kernel.omega0
    a = alpha(kernel)
    r = w0 / a
    return complex(g * math.sqrt(2 * math.pi) / math.sqrt(2 * w0 * a)
                   * erfcx(-1j * math.sqrt(r)))


def _broadband_c(kernel: KernelSpec) -> complex:
    w0 = kernel.omega0
    return broadband_prefactor(kernel) * np.sqrt(np.pi / (-1j * w0))


def _quad_complex(f, a, b):
    """Adaptive quadrature of a complex integrand; returns (value, error estimate)."""
    # absolute floor from a coarse pass over |f|, so that a vanishing real or
    # imaginary part does not demand an unreachable relative tolerance
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        scale = integrate.quad(lambda x: float(abs(f(x))), a, b, limit=200, epsrel=1e-3)[0]
        floor = 1e-14 * scale
        re, e1 = integrate.quad(lambda x: float(np.real(f(x))), a, b, limit=500,
                                epsabs=floor, epsrel=1e-12)
        im, e2 = integrate.quad(lambda x: float(np.imag(f(x))), a, b, limit=500,
                                epsabs=floor, epsrel=1e-12)
    return complex(re, im), e1 + e2


_ROT = np.exp(1j * np.pi / 4)


def kernel_integral_quadrature(kernel: KernelSpec, T: float = INFINITY) -> complex:
    """Brute-force ``int_0^T f'`` by adaptive quadrature, independent of any closed form.

    Finite ``T`` is integrated along the real axis.  For ``T = inf`` the path is
    rotated onto the ray ``arg tau = pi/4``: ``f'`` is analytic in the open first
    quadrant (the branch cut of ``sqrt(1 + i alpha tau)`` lies on the positive
    imaginary axis) and ``exp(i w0 tau)`` decays there, so the arc at infinity
    drops out.  The broadband ``tau**-0.5`` endpoint is removed by ``tau = v**2``.
    """
    if T < 0:
        raise ValueError("upper limit must be >= 0")
    if T == 0:
        return 0j
    w0 = kernel.omega0
    if isinstance(kernel.coupling, Gaussian):
        g, a = kernel.coupling.gamma, alpha(kernel)
        amp = lambda z: g * np.exp(1j * w0 * z) / np.sqrt(1 + 1j * a * z)
        if math.isinf(T):
            # geometric panels resolve both the 1/alpha and 1/w0 scales; the
            # integrand has decayed by exp(-40) at the start of the open tail
            ray = lambda s: _ROT * amp(_ROT * s)
            end = 40 * math.sqrt(2) / w0
            start = 0.1 * min(1 / a, 1 / w0)
            n_geo = max(1, int(math.ceil(math.log2(end / start))))
            edges = np.concatenate([[0.0], start * 2.0 ** np.arange(n_geo), [end]])
            edges = np.unique(edges[edges <= end])
            val, err = _quad_complex(ray, end, np.inf)
            for lo, hi in zip(edges[:-1], edges[1:]):
                v, e = _quad_complex(ray, lo, hi)
                val, err = val + v, err + e
        else:
            # break the oscillation into ~cycle-sized panels
            n = max(1, int(math.ceil(w0 * T / (2 * np.pi))))
            edges = np.linspace(0.0, T, n + 1)
            val, err = 0j, 0.0
            for lo, hi in zip(edges[:-1], edges[1:]):
                v, e = _quad_complex(amp, lo, hi)
                val, err = val + v, err + e
    elif isinstance(kernel.coupling, Broadband):
        k0 = broadband_prefactor(kernel)
        if math.isinf(T):
            # tau = e^{i pi/4} v^2  ->  dtau / sqrt(tau) = 2 e^{i pi/8} dv
            rot = np.exp(1j * np.pi / 8)
            core, err = _quad_complex(lambda v: 2 * rot * np.exp(1j * w0 * _ROT * v * v),
                                      0, np.inf)
        else:
            core, err = _quad_complex(lambda v: 2 * np.exp(1j * w0 * v * v), 0, math.sqrt(T))
        val, err = k0 * core, abs(k0) * err
    else:
        raise VariantMismatchError("photonic delta kernel integrals are analytic only")
    if err > _QUAD_RTOL * max(abs(val), 1e-300):
        raise AccuracyError(f"quadrature error estimate {err:.3g} for value {val:.6g}",
                            estimate=val)
    return complex(val)


def kernel_integral(kernel: KernelSpec, T: float = INFINITY) -> complex:
    """``int_0^T f'(tau) dtau``; ``T`` may be :data:`INFINITY`.

    Closed forms are used for the broadband kernel (any ``T``) and for the
    Gaussian kernel at ``T = inf``; finite-``T`` Gaussian integrals fall back to
    adaptive quadrature.
    """
    if T < 0:
        raise ValueError("upper limit must be >= 0")
    if isinstance(kernel.coupling, PhotonDelta):
        raise VariantMismatchError("photonic delta kernel integrals are analytic only")
    if T == 0:
        return 0j
    if isinstance(kernel.coupling, Broadband):
        c = _broadband_c(kernel)
        if math.isinf(T):
            return complex(c)
        return complex(c * complex_erf(np.sqrt(-1j * kernel.omega0 * T)))
    if math.isinf(T):
        return complex(_gaussian_c_closed(kernel))
    return kernel_integral_quadrature(kernel, T)
