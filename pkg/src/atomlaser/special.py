"""Complex error function and a depressed-cubic root finder.

The error function is evaluated with its Maclaurin series in the strip
``|Re z| < 2`` and with the Laplace continued fraction for ``erfc`` outside
it.  Inside the strip the series loses at most ``exp(2 Re(z)^2)`` in relative
precision, which stays above 1e-12 for double arithmetic.
"""
from __future__ import annotations

import numpy as np

from .errors import RangeError

_SQRT_PI = np.sqrt(np.pi)
_STRIP = 2.0
# exp(x) overflows doubles a little above x = 709
_MAX_EXPONENT = 700.0
_CF_TERMS = 120
# beyond this modulus the continued fraction converges on Re z = 0 as well
_CF_RADIUS = 6.0


def _erf_series(z):
    # erf(z) = 2/sqrt(pi) * sum_n (-1)^n z^(2n+1) / (n! (2n+1))
    z2 = z * z
    term = z.copy()
    total = z.copy()
    nmax = int(2.0 * float(np.max(np.abs(z2), initial=0.0))) + 60
    for n in range(1, nmax):
        term = term * (-z2) / n
        total = total + term / (2 * n + 1)
    return 2.0 / _SQRT_PI * total


def _erfcx_cf(z):
    """exp(z^2) erfc(z) for Re z > 0 by the Laplace continued fraction.

    Evaluated bottom-up:  sqrt(pi) * erfcx(z) = 1/(z + (1/2)/(z + 1/(z + ...)))
    """
    tail = np.zeros_like(z)
    for k in range(_CF_TERMS, 0, -1):
        tail = (k / 2.0) / (z + tail)
    return 1.0 / (_SQRT_PI * (z + tail))


def _as_complex_array(z):
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise ValueError("error function requires finite arguments")
    return arr


def _check_exponent(growth, what):
    if np.any(growth > _MAX_EXPONENT):
        raise RangeError(f"{what} overflows: exponent {float(np.max(growth)):.4g}")


def complex_erf(z):
    """Error function of a complex argument (scalar or array).

    Relative accuracy is better than 1e-10 for ``|z| <= 10``.  Raises
    :class:`RangeError` when ``Im(z)^2 - Re(z)^2`` is so large that the
    result overflows.
    """
    arr = _as_complex_array(z)
    _check_exponent(arr.imag**2 - arr.real**2, "erf")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)

    inner = np.abs(arr.real) < _STRIP
    if np.any(inner):
        out[inner] = _erf_series(arr[inner])
    outer = ~inner
    if np.any(outer):
        zo = arr[outer]
        sign = np.where(zo.real < 0, -1.0, 1.0)
        zp = zo * sign
        out[outer] = sign * (1.0 - np.exp(-zp * zp) * _erfcx_cf(zp))
    return out[0] if scalar else out


def erfcx(z):
    """Scaled complementary error function ``exp(z^2) * erfc(z)``.

    Stays finite where ``exp(z^2)`` and ``erfc(z)`` separately over- or
    underflow, e.g. ``z = 5``, ``z = -5 + 5j`` or ``z = -30j``.
    """
    arr = _as_complex_array(z)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)

    # continued fraction in the right half plane away from the origin,
    # reflection erfcx(z) = 2 exp(z^2) - erfcx(-z) in the left one
    far = np.abs(arr) >= _CF_RADIUS
    right = (arr.real >= _STRIP) | (far & (arr.real >= 0))
    left = (arr.real <= -_STRIP) | (far & (arr.real < 0))
    mid = ~(right | left)
    re2 = arr.real**2 - arr.imag**2
    growth = np.where(right, 0.0, np.where(left, re2, np.abs(re2)))
    _check_exponent(growth, "erfcx")
    if np.any(right):
        out[right] = _erfcx_cf(arr[right])
    if np.any(left):
        zl = arr[left]
        out[left] = 2.0 * np.exp(zl * zl) - _erfcx_cf(-zl)
    if np.any(mid):
        zm = arr[mid]
        out[mid] = np.exp(zm * zm) * (1.0 - _erf_series(zm))
    return out[0] if scalar else out


def cubic_roots(p: complex, q: complex) -> np.ndarray:
    """Roots of the depressed cubic ``z**3 + p*z + q``.

    Cardano's formula gives starting values which are then polished with a
    few Newton steps on the original polynomial.  Returned as a length-3
    complex array sorted by (real, imag) so that the ordering is stable.
    """
    p = complex(p)
    q = complex(q)
    # z = scale * y gives y^3 + (p / scale^2) y + q / scale^3 with O(1)
    # coefficients, so tiny or huge inputs neither underflow nor overflow
    scale = max(np.sqrt(abs(p)), np.cbrt(abs(q)))
    if scale == 0:
        return np.zeros(3, dtype=complex)
    return scale * _unit_cubic_roots(p / scale / scale, q / scale / scale / scale)


def _unit_cubic_roots(p: complex, q: complex) -> np.ndarray:

    disc = np.sqrt(q * q / 4 + p**3 / 27 + 0j)
    # larger-modulus branch avoids cancellation; w == 0 only when p == q == 0
    w = -q / 2 + disc if abs(-q / 2 + disc) >= abs(-q / 2 - disc) else -q / 2 - disc
    u = w ** (1.0 / 3.0)
    omega = complex(-0.5, np.sqrt(3.0) / 2)
    roots = [u * omega**k - p / (3 * u * omega**k) for k in range(3)]

    polished = []
    for z in roots:
        for _ in range(8):
            f = z**3 + p * z + q
            df = 3 * z * z + p
            if df == 0:
                break
            step = f / df
            z = z - step
            if abs(step) <= 1e-16 * max(1.0, abs(z)):
                break
        polished.append(z)
    out = np.array(polished, dtype=complex)
    return out[np.lexsort((out.imag, out.real))]
