"""Reservoir, system, response and decay timescales and the Markov validity test."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import InfiniteDecayTimeError, SearchError, VariantMismatchError
from .master import markov_constant
from .model import (
    INFINITY,
    Broadband,
    Gaussian,
    KernelSpec,
    SystemParams,
    _require,
    alpha,
    kernel_integral,
)

#: default verdict thresholds on the validity inequality's left-hand side
INVALID_BELOW = 2.0
VALID_ABOVE = 10.0

MARKOV_VALID = "markov_valid"
MARGINAL = "marginal"
MARKOV_INVALID = "markov_invalid"


def reservoir_correlation_time(kernel: KernelSpec):
    """Half width at half maximum of ``|f(tau)|``: ``sqrt(15) / alpha``.

    Returns ``(t_R, is_zero_limit)``; the broadband kernel has no finite
    width and gives ``(0.0, True)``.
    """
    if isinstance(kernel.coupling, Broadband):
        return 0.0, True
    _require(kernel, Gaussian)
    return math.sqrt(15.0) / alpha(kernel), False


def system_time(system: SystemParams) -> float:
    return 1.0 / system.omega0


def coupling_ratio(kernel: KernelSpec) -> float:
    """``sigma_k / Gamma`` (broadband: ``1 / (sqrt(2 pi) |kappa0|^2)``)."""
    cp = kernel.coupling
    if isinstance(cp, Gaussian):
        return cp.sigma_k / cp.gamma if cp.gamma else math.inf
    if isinstance(cp, Broadband):
        return 1.0 / (math.sqrt(2 * math.pi) * cp.kappa0_sq) if cp.kappa0_sq else math.inf
    raise VariantMismatchError(f"no coupling ratio for {type(cp).__name__}")


def response_halfwidth_time(kernel: KernelSpec, rtol: float = 1e-4) -> float:
    """Smallest ``t`` with ``|int_0^t f'| >= |int_0^inf f'| / 2``.

    The first crossing is bracketed by stepping the cumulative integral in
    increments of a twentieth of ``min(1/w0, t_R)``, then refined by
    bisection to ``rtol``.
    """
    _require(kernel, Gaussian, Broadband)
    target = 0.5 * abs(kernel_integral(kernel, INFINITY))
    if target == 0:
        raise SearchError("kernel integral vanishes; no half-width time")
    scale = 1.0 / kernel.omega0
    t_r, _ = reservoir_correlation_time(kernel)
    if t_r > 0:
        scale = min(scale, t_r)
    step = scale / 20.0
    horizon = 1e3 * max(1.0 / kernel.omega0, t_r)
    lo, hi = 0.0, None
    best = 0.0
    t = step
    while t <= horizon:
        val = abs(kernel_integral(kernel, t))
        best = max(best, val)
        if val >= target:
            hi = t
            break
        lo = t
        t += step
    if hi is None:
        raise SearchError(
            f"|cumulative integral| peaked at {best:.6g} below half the asymptote {target:.6g}"
        )
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if abs(kernel_integral(kernel, mid)) >= target:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class DecayTime:
    t_D: float
    #: closed-form broadband estimate ``2 sqrt(w0 hbar / (m pi)) sigma_k / Gamma``
    t_D_formula: float


def decay_time(kernel: KernelSpec) -> DecayTime:
    mc = markov_constant(kernel)
    if mc.decay_rate <= 0:
        raise InfiniteDecayTimeError("Re c = 0: the Born-Markov population never decays")
    hbar, m, w0 = kernel.constants.hbar, kernel.system.mass, kernel.omega0
    formula = 2.0 * math.sqrt(w0 * hbar / (m * math.pi)) * coupling_ratio(kernel)
    return DecayTime(1.0 / mc.decay_rate, formula)


def validity_lhs(kernel: KernelSpec) -> float:
    """``w0^(3/2) sqrt(hbar / (m pi)) sigma_k / Gamma``; Born-Markov needs this >> 1."""
    hbar, m, w0 = kernel.constants.hbar, kernel.system.mass, kernel.omega0
    return w0**1.5 * math.sqrt(hbar / (m * math.pi)) * coupling_ratio(kernel)


def classify(lhs: float, invalid_below: float = INVALID_BELOW,
             valid_above: float = VALID_ABOVE) -> str:
    if lhs >= valid_above:
        return MARKOV_VALID
    if lhs <= invalid_below:
        return MARKOV_INVALID
    return MARGINAL


@dataclass(frozen=True)
class TimescaleReport:
    t_R: float
    t_R_zero_limit: bool
    t_s: float
    t_rs: float
    t_D: float
    t_D_formula: float
    inequality_lhs: float
    verdict: str

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_text(self) -> str:
        return "".join(f"{k}={_fmt(v)}\n" for k, v in self.as_dict().items())

    def csv_header(self) -> str:
        return ",".join(self.as_dict()) + "\n"

    def csv_row(self) -> str:
        return ",".join(_fmt(v) for v in self.as_dict().values()) + "\n"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.11e}" if math.isfinite(v) else ("inf" if v > 0 else "nan")
    return str(v)


def validity_report(kernel: KernelSpec, invalid_below: float = INVALID_BELOW,
                    valid_above: float = VALID_ABOVE) -> TimescaleReport:
    lhs = validity_lhs(kernel)
    t_r, zero_limit = reservoir_correlation_time(kernel)
    if math.isinf(lhs):
        # no coupling: nothing decays, nothing to compare
        t_rs, dt = math.nan, DecayTime(math.inf, math.inf)
    else:
        t_rs = response_halfwidth_time(kernel)
        dt = decay_time(kernel)
    return TimescaleReport(
        t_R=t_r,
        t_R_zero_limit=zero_limit,
        t_s=system_time(kernel.system),
        t_rs=t_rs,
        t_D=dt.t_D,
        t_D_formula=dt.t_D_formula,
        inequality_lhs=lhs,
        verdict=classify(lhs, invalid_below, valid_above),
    )


__all__ = [
    "TimescaleReport",
    "DecayTime",
    "reservoir_correlation_time",
    "system_time",
    "response_halfwidth_time",
    "decay_time",
    "validity_lhs",
    "validity_report",
    "classify",
    "coupling_ratio",
    "MARKOV_VALID",
    "MARGINAL",
    "MARKOV_INVALID",
]
