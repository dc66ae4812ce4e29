# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled trapezoidal march for the product-integration Volterra solver.

Mirrors ``atomlaser.volterra._march_numpy`` operation for operation.
"""
import numpy as np


def march(const double complex[::1] c, const double complex[::1] right,
          double complex lam, double h, double complex u0, Py_ssize_t n):
    cdef double complex[::1] u = np.empty(n + 1, dtype=np.complex128)
    cdef double complex[::1] memory = np.zeros(n + 1, dtype=np.complex128)
    cdef double complex a0 = c[0]
    cdef double complex denom = 1.0 - 0.5 * h * lam + 0.5 * h * a0
    cdef double complex growth = 1.0 + 0.5 * h * lam
    cdef double complex hist_prev = 0.0
    cdef double tr, ti, tr2, ti2, cr, ci, ur, ui
    cdef double complex tail
    cdef Py_ssize_t m, j
    u[0] = u0
    for m in range(n):
        # split real/imag sums over two interleaved lanes; one complex
        # accumulator serialises on add latency
        tr = 0.0
        ti = 0.0
        tr2 = 0.0
        ti2 = 0.0
        j = 1
        while j + 1 <= m:
            cr = c[j].real
            ci = c[j].imag
            ur = u[m + 1 - j].real
            ui = u[m + 1 - j].imag
            tr += cr * ur - ci * ui
            ti += cr * ui + ci * ur
            cr = c[j + 1].real
            ci = c[j + 1].imag
            ur = u[m - j].real
            ui = u[m - j].imag
            tr2 += cr * ur - ci * ui
            ti2 += cr * ui + ci * ur
            j += 2
        if j == m:
            tr += c[j].real * u[1].real - c[j].imag * u[1].imag
            ti += c[j].real * u[1].imag + c[j].imag * u[1].real
        tr += tr2
        ti += ti2
        tail = tr + 1j * ti + right[m] * u[0]
        u[m + 1] = (growth * u[m] - 0.5 * h * (hist_prev + tail)) / denom
        hist_prev = a0 * u[m + 1] + tail
        memory[m + 1] = hist_prev
    return np.asarray(u), np.asarray(memory)
