"""Second-order sideband at twice the probe-pump detuning."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .omit import (
    _check_denominator,
    linear_response,
    optomechanical_strength,
    sideband_coeffs,
    steady_state_for,
)
from .params import SystemConfig
from .steady import SteadyState


@dataclass(frozen=True)
class SecondOrderCoeffs:
    mu2_plus: complex
    mu2_minus: complex
    nu2_plus: complex
    nu2_minus: complex
    A1_2: complex
    A2_2: complex
    K2: complex
    lam: complex


@dataclass(frozen=True)
class SecondOrderResponse:
    da1_plus_2: complex
    eta: float
    eps_P: float


def second_order_coeffs(cfg: SystemConfig, ss: SteadyState, epsilon: float) -> SecondOrderCoeffs:
    mu_p, _, _, _, A1, _, _ = sideband_coeffs(cfg, ss, epsilon)
    mu2_p, mu2_m, nu2_p, nu2_m, A1_2, A2_2, K2 = sideband_coeffs(cfg, ss, 2.0 * epsilon)
    g = cfg.coupling
    n = optomechanical_strength(cfg, ss)
    lam = 1j * g * mu2_m * K2 * A1 * A1_2 - g * n * mu2_m * (A1 * mu2_p.conjugate() - mu_p.conjugate() * A1_2)
    return SecondOrderCoeffs(mu2_p, mu2_m, nu2_p, nu2_m, A1_2, A2_2, K2, lam)


def _pieces(cfg, ss, lr, epsilon):
    mu_p, _, _, _, A1, _, _ = sideband_coeffs(cfg, ss, epsilon)
    c2 = second_order_coeffs(cfg, ss, epsilon)
    n = optomechanical_strength(cfg, ss)
    return mu_p, A1, c2, n


def second_order_amplitude(cfg: SystemConfig, ss: SteadyState, lr, epsilon: float) -> SecondOrderResponse:
    """Amplitude of the ``e^{-2 i eps t}`` component of the left field and its efficiency."""
    if lr.eps_P == 0:
        return SecondOrderResponse(da1_plus_2=0j, eta=0.0, eps_P=0.0)
    mu_p, A1, c2, n = _pieces(cfg, ss, lr, epsilon)
    g = cfg.coupling
    a1 = ss.a1_s
    dx, da = lr.dx_plus, lr.da1_plus
    numer = (
        -1j * cfg.hbar * g**4 * a1 * ss.photons * mu_p.conjugate() * c2.mu2_plus.conjugate() * c2.mu2_minus * dx**2
        + c2.lam * dx * da
    )
    t1 = c2.K2 * c2.A1_2 * c2.A2_2
    t2 = 1j * n * (c2.A2_2 * c2.mu2_plus.conjugate() - c2.A1_2 * c2.mu2_minus)
    _check_denominator(t1 + t2, t1, t2)
    da2 = numer / (A1 * (t1 + t2))
    return SecondOrderResponse(da1_plus_2=da2, eta=abs(2.0 * cfg.gamma1 * da2 / lr.eps_P), eps_P=lr.eps_P)


def second_order_factored(cfg: SystemConfig, ss: SteadyState, lr, epsilon: float) -> complex:
    """Same amplitude with ``g * mu2_minus`` pulled out of lambda; a consistency cross-check."""
    mu_p, A1, c2, n = _pieces(cfg, ss, lr, epsilon)
    g = cfg.coupling
    dx, da = lr.dx_plus, lr.da1_plus
    inner = 1j * c2.K2 * A1 * c2.A1_2 - n * (A1 * c2.mu2_plus.conjugate() - mu_p.conjugate() * c2.A1_2)
    bracket = c2.K2 * c2.A1_2 * c2.A2_2 + 1j * n * (c2.A2_2 * c2.mu2_plus.conjugate() - c2.A1_2 * c2.mu2_minus)
    first = -1j * n * g * ss.a1_s * mu_p.conjugate() * c2.mu2_plus.conjugate() * dx / A1
    return g * c2.mu2_minus * dx * (first + inner * da / A1) / bracket


def sideband_efficiency(cfg: SystemConfig, Delta_P: float) -> SecondOrderResponse:
    ss = steady_state_for(cfg)
    epsilon = Delta_P + cfg.pump_detuning
    lr = linear_response(cfg, ss, epsilon)
    return second_order_amplitude(cfg, ss, lr, epsilon)


def sideband_spectrum(cfg: SystemConfig, Delta_P_grid: Iterable[float]) -> list[tuple[float, float]]:
    """``(Delta_P, eta)`` pairs in grid order."""
    grid = list(Delta_P_grid)
    if not grid:
        raise ValueError("Delta_P grid is empty")
    return [(float(d), sideband_efficiency(cfg, d).eta) for d in grid]
