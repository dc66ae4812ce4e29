"""Exact cavity dynamics from the memory-kernel equation of motion.

The decay amplitude ``u(t)`` (the inverse Laplace transform of
``1 / (s + L{f'}(s))``) obeys ``u' = -int_0^t f'(tau) u(t - tau) dtau`` with
``u(0) = 1``.  The mean field is ``<a^dag(t)> = conj(a0) exp(i w0 t) conj(u(t))``
and the cavity population is ``n0 |u(t)|^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import volterra
from .errors import ConvergenceError, DegenerateRootsError
from .model import (
    Broadband,
    Gaussian,
    KernelSpec,
    PhotonDelta,
    SystemParams,
    _require,
    kernel_eval,
)
from .series import SeriesTable
from .special import cubic_roots, erfcx

SELF_CONVERGENCE_TOL = 1e-3


@dataclass(frozen=True)
class TimeGrid:
    t_max: float
    n_steps: int

    def __post_init__(self):
        if not self.t_max > 0:
            raise ValueError(f"t_max must be > 0, got {self.t_max}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 2:
            raise ValueError(f"n_steps must be an integer >= 2, got {self.n_steps}")

    @property
    def dt(self) -> float:
        return self.t_max / self.n_steps

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt


@dataclass(frozen=True, eq=False)
class AmplitudeTrajectory:
    """Decay amplitude ``u`` on ``grid``; ``rate`` holds ``du/dt`` from the equation of motion."""

    grid: TimeGrid
    u: np.ndarray
    rate: np.ndarray

    def __post_init__(self):
        if len(self.u) != self.grid.n_steps + 1:
            raise ValueError("amplitude length does not match the grid")
        if self.u[0] != 1:
            raise ValueError("u(0) must equal 1")
        if np.max(np.abs(self.u)) > 1 + 1e-9:
            raise ValueError("|u| exceeds 1: population larger than the initial norm")

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @property
    def population(self) -> np.ndarray:
        """``|u|^2``, the cavity population per initial atom."""
        return np.abs(self.u) ** 2


def _kernel_fn(kernel):
    return lambda tau: kernel_eval(kernel, tau)


def _solve_volterra(kernel_fn, grid: TimeGrid, singular: bool, lam=0.0):
    u, memory = volterra.solve(kernel_fn, grid.t_max, grid.n_steps, lam=lam,
                               singular=singular)
    return u, lam * u - memory


def _uncoupled(kernel: KernelSpec) -> bool:
    c = kernel.coupling
    return (isinstance(c, Gaussian) and c.gamma == 0) or (
        isinstance(c, Broadband) and c.kappa0_sq == 0)


def check_self_convergence(coarse: np.ndarray, fine: np.ndarray, tol=SELF_CONVERGENCE_TOL):
    """Max-norm change between a solution and its 2x refinement (shared points)."""
    diff = float(np.max(np.abs(fine[::2] - coarse)))
    if diff > tol:
        raise ConvergenceError(f"halving dt changed the solution by {diff:.3g} (> {tol:g})")
    return diff


def solve_amplitude(kernel: KernelSpec, grid: TimeGrid, verify: bool = False) -> AmplitudeTrajectory:
    """Exact decay amplitude on ``grid``.

    Gaussian and broadband kernels go through the product-integration
    Volterra solver.  The photonic delta kernel has the analytic solution
    ``u = exp(-C t)``.  With ``verify`` the solve is repeated at twice the
    resolution and :class:`ConvergenceError` is raised if the two differ by
    more than 1e-3 in max-norm.
    """
    t = grid.times
    if isinstance(kernel.coupling, PhotonDelta):
        rate_c = kernel.coupling.rate_c
        u = np.exp(-rate_c * t).astype(complex)
        return AmplitudeTrajectory(grid, u, -rate_c * u)
    if _uncoupled(kernel):
        u = np.ones_like(t, dtype=complex)
        return AmplitudeTrajectory(grid, u, np.zeros_like(u))

    singular = isinstance(kernel.coupling, Broadband)
    u, rate = _solve_volterra(_kernel_fn(kernel), grid, singular)
    if verify:
        fine = TimeGrid(grid.t_max, 2 * grid.n_steps)
        u_fine, _ = _solve_volterra(_kernel_fn(kernel), fine, singular)
        check_self_convergence(u, u_fine)
    return AmplitudeTrajectory(grid, u, rate)


def expected_adag(traj: AmplitudeTrajectory, system: SystemParams, t_index=None):
    """``<a^dag(t)>`` at ``t_index`` (or on the whole grid when ``None``)."""
    if t_index is None:
        t, u = traj.times, traj.u
    else:
        n = traj.grid.n_steps
        if not -n - 1 <= t_index <= n:
            raise IndexError(f"t_index {t_index} outside grid of {n + 1} points")
        t, u = traj.times[t_index], traj.u[t_index]
    if system.a0 == 0:
        return np.zeros_like(u) if t_index is None else 0j
    return np.conj(system.a0) * np.exp(1j * system.omega0 * t) * np.conj(u)


def atom_number_exact(traj: AmplitudeTrajectory, n0: float, label="exact") -> SeriesTable:
    """Cavity population ``n0 |u(t)|^2``."""
    if n0 < 0:
        raise ValueError("n0 must be >= 0")
    return SeriesTable(label, traj.times, n0 * traj.population)


# --- broadband closed form -------------------------------------------------

def broadband_cubic_constant(kernel: KernelSpec) -> complex:
    """Constant term ``K`` of ``z^3 + i w0 z + K`` for the broadband kernel.

    From ``L{f'}(s) = K / sqrt(s - i w0)`` with
    ``K = (Gamma / sigma_k) sqrt(pi m / hbar) exp(-i pi / 4)``.
    """
    _require(kernel, Broadband)
    strength = kernel.coupling.kappa0_sq * math.sqrt(2 * math.pi)  # Gamma / sigma_k
    hbar = kernel.constants.hbar
    return strength * math.sqrt(math.pi * kernel.system.mass / hbar) * np.exp(-0.25j * np.pi)


def broadband_roots(kernel: KernelSpec) -> np.ndarray:
    roots = cubic_roots(1j * kernel.omega0, broadband_cubic_constant(kernel))
    scale = float(np.max(np.abs(roots)))
    for i in range(3):
        for j in range(i + 1, 3):
            if abs(roots[i] - roots[j]) < 1e-12 * scale:
                raise DegenerateRootsError(f"repeated roots {roots[i]} and {roots[j]}")
    return roots


def broadband_closed_form(kernel: KernelSpec, t):
    """Error-function solution ``u(t)`` for broadband coupling (scalar or array).

    Sums ``a^2 exp(a^2 t) erfc(-a sqrt t) / ((a - b)(a - c))`` over the three
    roots of the cubic; the scaled complementary error function keeps each
    term finite when ``exp(a^2 t)`` alone would overflow.
    """
    _require(kernel, Broadband)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("t must be >= 0")
    if kernel.coupling.kappa0_sq == 0:
        out = np.ones_like(t_arr, dtype=complex)
        return out[()] if out.ndim == 0 else out
    a, b, c = broadband_roots(kernel)
    rt = np.sqrt(t_arr)
    total = np.zeros_like(t_arr, dtype=complex)
    for r, p, q in ((a, b, c), (b, a, c), (c, a, b)):
        total = total + r * r * erfcx(-r * rt) / ((r - p) * (r - q))
    out = np.exp(1j * kernel.omega0 * t_arr) * total
    return out[()] if out.ndim == 0 else out


def broadband_plateau(kernel: KernelSpec) -> float:
    """Long-time ``|u|^2`` for broadband coupling.

    Only roots with ``Re a > 0`` survive at long times, through
    ``2 a^2 exp(a^2 t) / ((a - b)(a - c))``; the bound state is the one with
    ``a^2`` purely imaginary.  Roots with ``Re a^2 < 0`` decay.
    """
    roots = broadband_roots(kernel)
    amp = 0j
    for i, r in enumerate(roots):
        others = [roots[j] for j in range(3) if j != i]
        if r.real > 0 and abs((r * r).real) <= 1e-8 * abs(r) ** 2:
            amp += 2 * r * r / ((r - others[0]) * (r - others[1]))
    return float(abs(amp) ** 2)


def plateau_statistics(series: SeriesTable, fraction: float = 0.1):
    """Mean and relative slope of a series over its final ``fraction``.

    The relative slope is the least-squares slope times the window length,
    divided by the window mean: the fractional drift across the window.
    """
    n = len(series.t)
    m = max(2, int(round(fraction * (n - 1))) + 1)
    tw = series.t[-m:]
    vw = np.real(series.value[-m:])
    mean = float(np.mean(vw))
    slope = float(np.polyfit(tw - tw[0], vw, 1)[0])
    span = float(tw[-1] - tw[0])
    rel = abs(slope) * span / abs(mean) if mean != 0 else math.inf
    return mean, rel


__all__ = [
    "TimeGrid",
    "AmplitudeTrajectory",
    "solve_amplitude",
    "expected_adag",
    "atom_number_exact",
    "broadband_closed_form",
    "broadband_cubic_constant",
    "broadband_roots",
    "broadband_plateau",
    "plateau_statistics",
    "check_self_convergence",
]
