"""Product-integration solver for convolution Volterra integro-differential equations.

Solves::

    u'(t) = lam * u(t) - int_0^t K(tau) u(t - tau) dtau,    u(0) = u0

on a uniform grid.  ``u`` is taken piecewise linear between grid points and the
kernel is integrated *exactly* against the resulting hat functions, so an
integrable ``tau**-0.5`` singularity at the origin costs no accuracy.  The
outer ODE is advanced with the trapezoidal rule; the one implicit term is
scalar and linear, so each step is explicit after a division.

The O(n^2) history sum is the hot loop.  It runs in the compiled
``_volterra_ext`` module when that extension is built and falls back to a
numpy implementation otherwise; :data:`BACKEND` names the one in use.
"""
from __future__ import annotations

import numpy as np

try:  # pragma: no cover - exercised indirectly through BACKEND
    from ._volterra_ext import march as _march_ext
except ImportError:  # pragma: no cover
    _march_ext = None

__all__ = ["BACKEND", "hat_moments", "convolution_weights", "march", "solve"]

BACKEND = "cython" if _march_ext is not None else "numpy"

# Gauss-Legendre rule used on every grid interval
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def hat_moments(kernel, h: float, n: int, singular: bool = True):
    """Exact-moment weights of ``kernel`` on ``[j h, (j+1) h]``, ``j < n``.

    Returns ``(left, right)`` with::

        left[j]  = int K(tau) ((j+1) h - tau) / h dtau
        right[j] = int K(tau) (tau - j h) / h dtau

    ``kernel`` must accept a 2-D float array.  With ``singular`` the first
    interval is integrated in ``v = sqrt(tau)``, which turns a ``tau**-0.5``
    endpoint singularity into a smooth integrand.
    """
    x = 0.5 * (_GL_NODES + 1.0)  # nodes on [0, 1]
    wq = 0.5 * _GL_WEIGHTS
    j = np.arange(n, dtype=float)[:, None]
    tau = (j + x[None, :]) * h
    vals = kernel(tau)
    left = h * (vals * (1.0 - x)[None, :]) @ wq
    right = h * (vals * x[None, :]) @ wq
    if singular:
        # tau = h s^2, dtau = 2 h s ds, s in [0, 1]
        s = x
        k0 = kernel(h * s * s)
        left[0] = h * np.sum(wq * 2 * s * k0 * (1.0 - s * s))
        right[0] = h * np.sum(wq * 2 * s * k0 * s * s)
    return left, right


def convolution_weights(left, right):
    """Interior weights ``C[j] = right[j-1] + left[j]`` (``C[0] = left[0]``)."""
    c = np.array(left, dtype=complex, copy=True)
    c[1:] += right[:-1]
    return c


def _march_numpy(c, right, lam, h, u0, n):
    u = np.empty(n + 1, dtype=complex)
    memory = np.zeros(n + 1, dtype=complex)
    u[0] = u0
    a0 = c[0]
    denom = 1.0 - 0.5 * h * lam + 0.5 * h * a0
    growth = 1.0 + 0.5 * h * lam
    hist_prev = 0j  # I_n, the memory integral at the current step
    for m in range(n):
        # I_{m+1} = c[0] u_{m+1} + sum_{j=1}^{m} c[j] u_{m+1-j} + right[m] u_0
        tail = np.dot(c[1:m + 1], u[m:0:-1]) + right[m] * u[0]
        u[m + 1] = (growth * u[m] - 0.5 * h * (hist_prev + tail)) / denom
        hist_prev = a0 * u[m + 1] + tail
        memory[m + 1] = hist_prev
    return u, memory


def march(c, right, lam: complex, h: float, u0: complex, n: int, backend: str | None = None):
    """Advance ``n`` trapezoidal steps given precomputed weights.

    ``c`` are the interior convolution weights and ``right`` the end-point
    weights from :func:`hat_moments`; both need at least ``n`` entries.
    Returns ``(u, memory)`` where ``memory[m]`` is the discrete memory
    integral at step ``m``, so that ``u' = lam * u - memory``.
    """
    c = np.ascontiguousarray(c, dtype=complex)
    right = np.ascontiguousarray(right, dtype=complex)
    if len(c) < n or len(right) < n:
        raise ValueError("weight arrays shorter than the number of steps")
    use = backend or BACKEND
    if use == "cython":
        if _march_ext is None:
            raise RuntimeError("compiled Volterra extension is not available")
        u, memory = _march_ext(c, right, complex(lam), float(h), complex(u0), int(n))
        return np.asarray(u), np.asarray(memory)
    if use != "numpy":
        raise ValueError(f"unknown backend {use!r}")
    return _march_numpy(c, right, complex(lam), float(h), complex(u0), int(n))


def solve(kernel, t_max: float, n: int, lam: complex = 0.0, u0: complex = 1.0,
          singular: bool = True, backend: str | None = None):
    """Solve on ``n`` uniform steps of ``[0, t_max]``.

    Returns ``(u, memory)`` sampled at the ``n + 1`` grid points.
    """
    h = t_max / n
    left, right = hat_moments(kernel, h, n, singular=singular)
    return march(convolution_weights(left, right), right, lam, h, u0, n, backend=backend)
