"""First-order probe response: OMIT transmission and group delay."""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache

from .errors import NonConverged, SingularDenominator
from .params import SystemConfig, drive_amplitudes
from .steady import SteadyState, solve_steady_state

SINGULAR_RTOL = 1e-30
DEFAULT_DELAY_STEP = 1e3
DELAY_RTOL = 1e-3


@dataclass(frozen=True)
class FirstOrderCoeffs:
    mu_plus: complex
    mu_minus: complex
    nu_plus: complex
    nu_minus: complex
    A1: complex
    A2: complex
    K: complex


@dataclass(frozen=True)
class LinearResponse:
    dx_plus: complex
    da1_plus: complex
    t_P: complex
    T_P: float
    eps_P: float


@lru_cache(maxsize=4096)
def steady_state_for(cfg: SystemConfig) -> SteadyState:
    """Memoized :func:`solve_steady_state`; configs are immutable and hashable."""
    return solve_steady_state(cfg)


def sideband_coeffs(cfg: SystemConfig, ss: SteadyState, omega: float):
    """``mu_pm, nu_pm, A1, A2, K`` at sideband frequency ``omega`` (epsilon or 2 epsilon)."""
    DL = cfg.pump_detuning
    base_mu = 1j * DL + cfg.gamma2_total
    base_nu = 1j * DL + cfg.gamma1 - 1j * ss.beta
    mu_p = base_mu + 1j * omega
    mu_m = base_mu - 1j * omega
    nu_p = base_nu + 1j * omega
    nu_m = base_nu - 1j * omega
    A1 = mu_p.conjugate() * nu_p.conjugate() + cfg.J**2
    A2 = mu_m * nu_m + cfg.J**2
    K = cfg.m * (-(omega**2) - 1j * omega * cfg.Gamma_m + cfg.omega_m**2)
    return mu_p, mu_m, nu_p, nu_m, A1, A2, K


def first_order_coeffs(cfg: SystemConfig, ss: SteadyState, epsilon: float) -> FirstOrderCoeffs:
    return FirstOrderCoeffs(*sideband_coeffs(cfg, ss, epsilon))


def optomechanical_strength(cfg: SystemConfig, ss: SteadyState) -> float:
    """``hbar g^2 |a1_s|^2``, the combination every COM correction carries."""
    g = cfg.coupling
    return cfg.hbar * g * g * ss.photons


def _check_denominator(value: complex, *terms: complex):
    scale = sum(abs(t) for t in terms)
    if scale == 0 or abs(value) < SINGULAR_RTOL * scale:
        raise SingularDenominator(f"response denominator {value!r} vanishes (scale {scale:.3g})")


def linear_response(cfg: SystemConfig, ss: SteadyState, epsilon: float, eps_P: float | None = None) -> LinearResponse:
    """Probe-frequency fluctuation amplitudes and the transmitted probe.

    ``eps_P`` defaults to the configured probe amplitude.
    """
    if eps_P is None:
        eps_P = drive_amplitudes(cfg)[1]
    c = first_order_coeffs(cfg, ss, epsilon)
    n = optomechanical_strength(cfg, ss)
    g = cfg.coupling
    mu_p_c = c.mu_plus.conjugate()
    t1 = c.K * c.A1 * c.A2
    t2 = 1j * n * (mu_p_c * c.A2 - c.mu_minus * c.A1)
    denom = t1 + t2
    _check_denominator(denom, t1, t2)
    dx = cfg.hbar * g * eps_P * ss.a1_s.conjugate() * c.mu_minus * c.A1 / denom
    da1 = eps_P * c.mu_minus * (c.K * c.A1 + 1j * n * mu_p_c) / denom
    if eps_P == 0:
        t_P = complex("nan")
    else:
        t_P = 1.0 - 2.0 * cfg.gamma1 * da1 / eps_P
    return LinearResponse(dx_plus=dx, da1_plus=da1, t_P=t_P, T_P=abs(t_P) ** 2, eps_P=eps_P)


def probe_transmission(cfg: SystemConfig, Delta_P: float) -> tuple[complex, float]:
    """``(t_P, T_P)`` for a probe detuned by ``Delta_P`` from the cavity."""
    ss = steady_state_for(cfg)
    lr = linear_response(cfg, ss, Delta_P + cfg.pump_detuning)
    return lr.t_P, lr.T_P


def _phase_slope(cfg, ss, Delta_P, h):
    eps0 = Delta_P + cfg.pump_detuning
    up = linear_response(cfg, ss, eps0 + h).t_P
    down = linear_response(cfg, ss, eps0 - h).t_P
    # the ratio's phase is the unwrapped difference as long as it stays below pi
    return cmath.phase(up / down) / (2.0 * h)


def group_delay(cfg: SystemConfig, Delta_P: float, step: float = DEFAULT_DELAY_STEP) -> float:
    """Group delay ``d arg(t_P) / d Delta_P`` in seconds.

    Central differences at ``step`` and ``step/2`` are combined by Richardson
    extrapolation; :class:`NonConverged` is raised if they disagree by more
    than 1e-3 relative (or 1e-3 of the cavity lifetime ``1/gamma1`` near zero).
    """
    if step <= 0:
        raise ValueError("step must be > 0")
    ss = steady_state_for(cfg)
    coarse = _phase_slope(cfg, ss, Delta_P, step)
    fine = _phase_slope(cfg, ss, Delta_P, step / 2)
    # absolute slack of 1e-3 cavity lifetimes where the delay itself passes through zero
    if abs(fine - coarse) > DELAY_RTOL * (abs(fine) + 1.0 / cfg.gamma1):
        raise NonConverged(
            f"group delay not converged at Delta_P={Delta_P:g}: {coarse:.6g} vs {fine:.6g}"
        )
    return (4.0 * fine - coarse) / 3.0
