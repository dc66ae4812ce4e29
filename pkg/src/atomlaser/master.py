"""Moment dynamics of the Born-Markov and Born-only master equations."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import volterra
from .errors import ConsistencyError, VariantMismatchError
from .exact import AmplitudeTrajectory, TimeGrid, _uncoupled, expected_adag
from .model import (
    INFINITY,
    Broadband,
    Gaussian,
    KernelSpec,
    PhotonDelta,
    SystemParams,
    kernel_eval,
    kernel_integral,
    kernel_integral_quadrature,
)
from .series import SeriesTable

MARKOV_CROSSCHECK_RTOL = 1e-6
# Born-only <a^dag> is recomputed from its own equation of motion in a
# different frame; the two discretisations agree far below this.
ADAG_EQUIVALENCE_TOL = 1e-6


@dataclass(frozen=True)
class MarkovConstant:
    """``c = int_0^inf f'(tau) dtau``; the population decays at ``c + c*``."""

    c: complex

    def __post_init__(self):
        if self.c.real < -1e-12 * abs(self.c):
            raise ValueError(f"Re c < 0 would describe gain, got c = {self.c}")

    @property
    def decay_rate(self) -> float:
        return 2.0 * self.c.real


def markov_constant(kernel: KernelSpec, crosscheck: bool = True) -> MarkovConstant:
    """Markov constant from the closed form, checked against direct quadrature."""
    if isinstance(kernel.coupling, PhotonDelta):
        return MarkovConstant(complex(kernel.coupling.rate_c))
    if not isinstance(kernel.coupling, (Gaussian, Broadband)):
        raise VariantMismatchError(f"unsupported coupling {type(kernel.coupling).__name__}")
    c = kernel_integral(kernel, INFINITY)
    if crosscheck and c != 0:
        brute = kernel_integral_quadrature(kernel, INFINITY)
        rel = abs(c - brute) / abs(c)
        if rel > MARKOV_CROSSCHECK_RTOL:
            raise ConsistencyError(
                f"closed-form c = {c} and quadrature {brute} differ by {rel:.3g} relative"
            )
    return MarkovConstant(c)


def born_markov_number(n0: float, mc: MarkovConstant, t):
    """``n0 exp(-(c + c*) t)``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    out = n0 * np.exp(-mc.decay_rate * t)
    return out[()] if out.ndim == 0 else out


def born_markov_adag(a0: complex, mc: MarkovConstant, system: SystemParams, t):
    """``conj(a0) exp((i w0 - c*) t)``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    out = np.conj(a0) * np.exp((1j * system.omega0 - np.conj(mc.c)) * t)
    return out[()] if out.ndim == 0 else out


def _singular(kernel):
    return isinstance(kernel.coupling, Broadband)


def _check_volterra_kernel(kernel):
    if isinstance(kernel.coupling, PhotonDelta):
        raise VariantMismatchError("the Born-only equations need a Gaussian or broadband kernel")


def born_nonmarkov_solution(kernel: KernelSpec, grid: TimeGrid):
    """``(w, dw/dt)`` for ``w' = -int_0^t 2 Re f'(tau) w(t - tau) dtau``, ``w(0) = 1``."""
    _check_volterra_kernel(kernel)
    if _uncoupled(kernel):
        return np.ones(grid.n_steps + 1), np.zeros(grid.n_steps + 1)
    w, memory = volterra.solve(lambda tau: 2.0 * np.real(kernel_eval(kernel, tau)),
                               grid.t_max, grid.n_steps, singular=_singular(kernel))
    # real kernel and real start: the imaginary part is identically zero
    assert not np.any(w.imag), "Born-only population picked up an imaginary part"
    return w.real, -memory.real


def born_number_nonmarkov(kernel: KernelSpec, n0: float, grid: TimeGrid,
                          label="born") -> SeriesTable:
    """Cavity population predicted by the Born-only (non-Markovian) master equation."""
    w, _ = born_nonmarkov_solution(kernel, grid)
    return SeriesTable(label, grid.times, n0 * w)


def born_adag_direct(kernel: KernelSpec, a0: complex, grid: TimeGrid) -> np.ndarray:
    """Integrate the Born-only equation for ``<a^dag>`` directly.

    ``A' = i w0 A - int_0^t conj(f'(tau)) exp(i w0 tau) A(t - tau) dtau``,
    solved in the laboratory frame, i.e. without the rotating-frame
    shortcut used by the exact solution.
    """
    _check_volterra_kernel(kernel)
    w0 = kernel.omega0
    if _uncoupled(kernel):
        return np.conj(a0) * np.exp(1j * w0 * grid.times)
    a, _ = volterra.solve(
        lambda tau: np.conj(kernel_eval(kernel, tau)) * np.exp(1j * w0 * tau),
        grid.t_max, grid.n_steps, lam=1j * w0, u0=np.conj(a0), singular=_singular(kernel),
    )
    return a


def born_adag_nonmarkov(kernel: KernelSpec, a0: complex, grid: TimeGrid,
                        traj: AmplitudeTrajectory = None,
                        tol: float = ADAG_EQUIVALENCE_TOL) -> np.ndarray:
    """Born-only ``<a^dag(t)>``, identical to the exact mean field.

    The value returned is the exact one (``traj`` is solved if not given);
    the Born-only equation is integrated independently as a residual check
    and :class:`ConsistencyError` is raised if the two differ by more than
    ``tol * |a0|``.  Both routes carry O(dt^2) error, so coarse grids need a
    looser ``tol``.
    """
    from .exact import solve_amplitude

    if traj is None:
        traj = solve_amplitude(kernel, grid)
    system = SystemParams(kernel.system.omega0, kernel.system.mass,
                          n0=max(kernel.system.n0, abs(a0) ** 2), a0=a0)
    exact = expected_adag(traj, system)
    if a0 == 0:
        return exact
    direct = born_adag_direct(kernel, a0, grid)
    gap = float(np.max(np.abs(direct - exact)))
    if gap > tol * abs(a0):
        raise ConsistencyError(
            f"Born-only <a^dag> deviates from the exact mean field by {gap:.3g}"
        )
    return exact
