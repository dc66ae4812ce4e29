"""Position-space model: one cavity level coupled to a 1-D continuum wavefunction.

The cavity amplitude ``c_a`` and continuum field ``psi(x)`` obey

    i hbar dc_a/dt   = hbar w0 c_a + int g*(x) psi(x) dx
    i hbar dpsi/dt   = (P^2/2m + m g sin(theta) x + N U0 |psi|^2) psi + g(x) c_a

and are advanced by Strang splitting.  The position-diagonal part (gravity
and mean field) is applied as a phase, the kinetic part through the FFT, and
the cavity-field exchange exactly: it only mixes ``c_a`` with the projection
of ``psi`` on the normalised profile ``g / ||g||``, which is a 2x2 problem.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft

from .errors import ConfigError, DomainEscapeError, StabilityError
from .model import Gaussian, KernelSpec, _require
from .series import SeriesTable

NORM_DRIFT_LIMIT = 1e-4
#: probability allowed inside the 10 dx bands at either edge
EDGE_PROBABILITY_LIMIT = 1e-8
EDGE_BAND_POINTS = 10
#: support of g(x) that must lie inside the grid, in units of 1 / sigma_k
SUPPORT_WIDTHS = 6.0


@dataclass(frozen=True)
class SpatialGrid:
    """Periodic grid ``x_j = x_min + j dx`` on ``[x_min, x_max)``."""

    x_min: float = -150e-6
    x_max: float = 150e-6
    n_points: int = 8192

    def __post_init__(self):
        n = self.n_points
        if int(n) != n or n < 256 or n & (n - 1):
            raise ConfigError(f"n_points must be a power of two >= 256, got {n}")
        if not self.x_max > self.x_min:
            raise ConfigError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def k(self) -> np.ndarray:
        return 2 * np.pi * sfft.fftfreq(self.n_points, self.dx)

    def contains(self, half_width: float) -> bool:
        return self.x_min <= -half_width and self.x_max >= half_width


@dataclass(eq=False)
class HybridState:
    c_a: complex
    psi: np.ndarray

    @classmethod
    def initial(cls, grid: SpatialGrid) -> "HybridState":
        """All atoms in the cavity, empty continuum."""
        return cls(1.0 + 0j, np.zeros(grid.n_points, dtype=complex))


def norm_check(state: HybridState, grid: SpatialGrid) -> float:
    """``|c_a|^2 + int |psi|^2 dx``."""
    return float(abs(state.c_a) ** 2 + np.sum(np.abs(state.psi) ** 2) * grid.dx)


@dataclass(frozen=True)
class PropagationConfig:
    dt: float = 1e-7
    n_steps: int = 50_000
    gravity_on: bool = False
    g_accel: float = 9.8
    theta: float = math.pi / 20
    interactions_on: bool = False
    N_atoms: float = 1.0
    U0: float = 0.0
    record_every: int = 100
    #: optional absorbing edge mask for long runs (breaks norm conservation)
    absorb: bool = False
    #: store |psi|^2 every this many records; 0 disables snapshots
    snapshot_every: int = 0

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ConfigError(f"n_steps must be a positive integer, got {self.n_steps}")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ConfigError("record_every must be a positive integer")
        if self.snapshot_every < 0:
            raise ConfigError("snapshot_every must be >= 0")

    @property
    def nonlinearity(self) -> float:
        """``N U0`` in J m, zero when interactions are off."""
        return self.N_atoms * self.U0 if self.interactions_on else 0.0

    @property
    def t_max(self) -> float:
        return self.dt * self.n_steps


def kinetic_phase_per_step(grid: SpatialGrid, cfg: PropagationConfig, mass: float,
                           hbar: float) -> float:
    """Largest kinetic phase ``dt max|k|^2 hbar / 2m`` accumulated in one step."""
    kmax = math.pi / grid.dx
    return cfg.dt * kmax * kmax * hbar / (2 * mass)


def _gaussian_profile_prefactor(kernel: KernelSpec) -> float:
    cp = kernel.coupling
    hbar = kernel.constants.hbar
    return hbar * math.sqrt(cp.gamma) * (2 * math.pi * cp.sigma_k**2) ** -0.25 \
        * cp.sigma_k * math.sqrt(2.0)


def coupling_in_position(kernel: KernelSpec, grid: SpatialGrid) -> np.ndarray:
    """Position-space coupling ``g(x) = int dk i hbar conj(kappa(k)) e^{ikx} / sqrt(2 pi)``.

    For ``kappa(k) = i sqrt(Gamma) (2 pi sigma_k^2)^(-1/4) exp(-k^2 / 4 sigma_k^2)``
    this is ``hbar sqrt(Gamma) (2 pi sigma_k^2)^(-1/4) sqrt(2) sigma_k exp(-sigma_k^2 x^2)``,
    real and even, with ``||g|| / hbar = sqrt(Gamma)``.
    """
    _require(kernel, Gaussian)
    sk = kernel.coupling.sigma_k
    if not grid.contains(SUPPORT_WIDTHS / sk):
        raise ConfigError(
            f"grid [{grid.x_min:g}, {grid.x_max:g}) does not contain the coupling "
            f"support +-{SUPPORT_WIDTHS / sk:g} m"
        )
    x = grid.x
    return (_gaussian_profile_prefactor(kernel) * np.exp(-(sk * x) ** 2)).astype(complex)


def coupling_from_momentum(kernel: KernelSpec, grid: SpatialGrid) -> np.ndarray:
    """``g(x)`` by discrete Fourier transform of ``kappa`` sampled on ``grid.k``."""
    _require(kernel, Gaussian)
    cp = kernel.coupling
    k = grid.k
    kappa = 1j * math.sqrt(cp.gamma) * (2 * math.pi * cp.sigma_k**2) ** -0.25 \
        * np.exp(-k * k / (4 * cp.sigma_k**2))
    spec = 1j * kernel.constants.hbar * np.conj(kappa)
    # g(x_m) = sum_j spec(k_j) exp(i k_j x_m) dk / sqrt(2 pi), x_m = x_min + m dx
    n = grid.n_points
    dk = 2 * np.pi / (n * grid.dx)
    return sfft.ifft(spec * np.exp(1j * k * grid.x_min)) * (n * dk / math.sqrt(2 * np.pi))


@dataclass(frozen=True, eq=False)
class SpatialTrajectory:
    t: np.ndarray
    c_a: np.ndarray
    norm: np.ndarray
    #: mean position of the continuum probability
    centroid: np.ndarray
    continuum_weight: np.ndarray
    peak_density: float
    final_state: HybridState
    snapshots: list = field(default_factory=list)

    @property
    def population(self) -> np.ndarray:
        return np.abs(self.c_a) ** 2


def _absorbing_mask(grid: SpatialGrid, dt: float) -> np.ndarray:
    x = grid.x
    half = 0.5 * (grid.x_max - grid.x_min)
    mid = 0.5 * (grid.x_max + grid.x_min)
    r = np.abs(x - mid)
    inner = 0.7 * half
    mask = np.ones(grid.n_points)
    edge = r > inner
    mask[edge] = np.exp(-((r[edge] - inner) / (0.3 * half)) ** 2 * dt * 2e4)
    return mask


def propagate(state0: HybridState, kernel: KernelSpec, cfg: PropagationConfig,
              grid: SpatialGrid = None) -> SpatialTrajectory:
    """Advance ``state0`` by ``cfg.n_steps`` Strang steps of length ``cfg.dt``.

    Records ``t, c_a``, the total norm and the continuum centroid every
    ``cfg.record_every`` steps.  Raises :class:`StabilityError` when the norm
    drifts by more than 1e-4 and :class:`DomainEscapeError` when probability
    reaches the edge bands (both checked at record points).
    """
    grid = grid or SpatialGrid()
    if len(state0.psi) != grid.n_points:
        raise ConfigError("state does not live on this grid")
    n0 = norm_check(state0, grid)
    if abs(n0 - 1) > 1e-12:
        raise ConfigError(f"initial state must be normalised, norm = {n0}")

    hbar = kernel.constants.hbar
    mass = kernel.system.mass
    w0 = kernel.omega0
    dt = cfg.dt
    dx = grid.dx
    x = grid.x
    k = grid.k

    phase = kinetic_phase_per_step(grid, cfg, mass, hbar)
    if phase > 1.0:
        warnings.warn(f"kinetic phase per step {phase:.3g} rad exceeds 1; "
                      "accuracy (not stability) may suffer", RuntimeWarning, stacklevel=2)

    # coupling restricted to where it is numerically nonzero
    if isinstance(kernel.coupling, Gaussian) and kernel.coupling.gamma > 0:
        g = coupling_in_position(kernel, grid)
        sl = np.flatnonzero(np.abs(g) > 1e-17 * np.max(np.abs(g)))
        sl = slice(int(sl[0]), int(sl[-1]) + 1)
        g_w = g[sl]
        g_norm = math.sqrt(float(np.sum(np.abs(g_w) ** 2)) * dx)
        g_hat = g_w / g_norm
        rate = g_norm / hbar
        evals, evecs = np.linalg.eigh(np.array([[w0, rate], [rate, 0.0]]))
        exchange = (evecs * np.exp(-0.5j * evals * dt)) @ evecs.T
    else:
        _require(kernel, Gaussian)
        sl = None
        exchange = np.diag([np.exp(-0.5j * w0 * dt), 1.0])

    kinetic = np.exp(-1j * hbar * k * k / (2 * mass) * dt)
    v_lin = mass * cfg.g_accel * math.sin(cfg.theta) * x if cfg.gravity_on else np.zeros_like(x)
    half_lin = np.exp(-0.5j * v_lin * dt / hbar)
    full_lin = half_lin * half_lin
    nl = cfg.nonlinearity
    mask = _absorbing_mask(grid, dt) if cfg.absorb else None
    edge = np.r_[0:EDGE_BAND_POINTS, grid.n_points - EDGE_BAND_POINTS:grid.n_points]

    e00, e01, e10, e11 = exchange[0, 0], exchange[0, 1], exchange[1, 0], exchange[1, 1]
    ca = complex(state0.c_a)
    psi = np.array(state0.psi, dtype=complex)

    def exchange_step(ca, psi):
        if sl is None:
            return e00 * ca, psi
        seg = psi[sl]
        p = np.vdot(g_hat, seg) * dx
        ca_new = e00 * ca + e01 * p
        p_new = e10 * ca + e11 * p
        psi[sl] = seg + (p_new - p) * g_hat
        return ca_new, psi

    def position_phase(psi, full):
        lin = full_lin if full else half_lin
        if nl:
            s = dt if full else 0.5 * dt
            return psi * lin * np.exp(-1j * nl * s / hbar * (psi.real**2 + psi.imag**2))
        if cfg.gravity_on:
            return psi * lin
        return psi

    n_rec = cfg.n_steps // cfg.record_every + 1
    ts = np.empty(n_rec)
    cas = np.empty(n_rec, dtype=complex)
    norms = np.empty(n_rec)
    cents = np.empty(n_rec)
    cweights = np.empty(n_rec)
    snaps = []
    peak = 0.0

    def record(i, step, ca, psi):
        nonlocal peak
        dens = psi.real**2 + psi.imag**2
        w = float(np.sum(dens)) * dx
        ts[i] = step * dt
        cas[i] = ca
        norms[i] = abs(ca) ** 2 + w
        cweights[i] = w
        cents[i] = float(np.sum(x * dens)) * dx / w if w > 0 else 0.0
        peak = max(peak, float(np.max(dens)))
        if cfg.snapshot_every and i % cfg.snapshot_every == 0:
            snaps.append((step * dt, dens.copy()))
        if not cfg.absorb:
            drift = abs(norms[i] - n0)
            if drift > NORM_DRIFT_LIMIT:
                raise StabilityError(f"norm drifted by {drift:.3g} at t = {step * dt:.6g} s")
            p_edge = float(np.sum(dens[edge])) * dx
            if p_edge > EDGE_PROBABILITY_LIMIT:
                raise DomainEscapeError(
                    f"probability {p_edge:.3g} within {EDGE_BAND_POINTS} dx of the "
                    f"boundary at t = {step * dt:.6g} s; enlarge the grid"
                )

    record(0, 0, ca, psi)
    rec = 1
    psi = position_phase(psi, full=False)
    for step in range(1, cfg.n_steps + 1):
        ca, psi = exchange_step(ca, psi)
        psi = sfft.ifft(kinetic * sfft.fft(psi))
        if mask is not None:
            psi *= mask
        ca, psi = exchange_step(ca, psi)
        if step % cfg.record_every == 0 or step == cfg.n_steps:
            # close the step with a half phase so the recorded state is synchronous
            psi = position_phase(psi, full=False)
            if step % cfg.record_every == 0:
                record(rec, step, ca, psi)
                rec += 1
            if step < cfg.n_steps:
                psi = position_phase(psi, full=False)
        else:
            # two adjacent half phases merge: |psi| is unchanged by either
            psi = position_phase(psi, full=True)
    n_used = rec
    return SpatialTrajectory(
        t=ts[:n_used], c_a=cas[:n_used], norm=norms[:n_used], centroid=cents[:n_used],
        continuum_weight=cweights[:n_used], peak_density=peak,
        final_state=HybridState(ca, psi), snapshots=snaps,
    )


def cavity_population(traj: SpatialTrajectory, n0: float = 1.0, label="spatial") -> SeriesTable:
    """``n0 |c_a(t)|^2`` as a series."""
    return SeriesTable(label, traj.t, n0 * traj.population)


def interaction_for_peak_density(peak_density: float, omega0: float,
                                 hbar: float) -> float:
    """``N U0`` that makes the mean-field energy ``hbar w0`` at ``peak_density``."""
    if not peak_density > 0:
        raise ConfigError("peak density must be positive")
    return hbar * omega0 / peak_density


def centroid_acceleration(traj: SpatialTrajectory, min_continuum: float = 0.9,
                          window: float = None) -> float:
    """Acceleration of the continuum centroid from a quadratic least-squares fit.

    Only records where more than ``min_continuum`` of the norm sits in the
    continuum are used, restricted to the final ``window`` seconds when
    given.  Returns ``nan`` when fewer than three records qualify.
    """
    keep = traj.continuum_weight > min_continuum * traj.norm
    if window is not None:
        keep &= traj.t >= traj.t[-1] - window
    sel = np.flatnonzero(keep)
    if len(sel) < 3:
        return math.nan
    t = traj.t[sel]
    coef = np.polyfit(t - t[0], traj.centroid[sel], 2)
    return float(2.0 * coef[0])


__all__ = [
    "SpatialGrid",
    "HybridState",
    "PropagationConfig",
    "SpatialTrajectory",
    "coupling_in_position",
    "coupling_from_momentum",
    "propagate",
    "cavity_population",
    "norm_check",
    "interaction_for_peak_density",
    "centroid_acceleration",
    "kinetic_phase_per_step",
]
