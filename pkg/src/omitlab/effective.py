"""Effective detuning and damping seen by the probe and its second sideband.

Eliminating the mechanics from the fluctuation equations leaves the left
resonator with a complex self-energy (``C1`` at first order, ``C2`` at
second order).  Its real part shifts the resonance the probe sees, which
is why loss-induced transparency moves away from ``Delta_P = 0`` once the
mechanics is switched on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .omit import _check_denominator, optomechanical_strength, sideband_coeffs, steady_state_for
from .params import SystemConfig
from .steady import SteadyState


@dataclass(frozen=True)
class EffectiveLinear:
    C1: complex
    Delta_prime: float
    gamma1_prime: float
    shift: float


@dataclass(frozen=True)
class EffectiveSecond:
    C2: complex
    Delta_dprime: float
    gamma1_dprime: float
    B: complex
    shift2: float


@dataclass(frozen=True)
class ShiftReport:
    """Frequency-shift diagnostics for one configuration.

    ``shift`` is ``g x_s + Re(C1)`` at the red-side LIT detuning, i.e. where
    the probe detuning cancels the shift.  ``shift2`` is ``|Re(C2) - Re(C1)|``
    with the probe on cavity resonance (``epsilon = Delta_L``).  The values at
    the other reference point are kept for comparison.
    """

    shift: float
    shift2: float
    lit_detunings: tuple[float, ...]
    shift_resonant: float
    shift2_at_lit: float
    reference: dict = field(default_factory=dict)


def _c1(cfg, ss, epsilon):
    mu_p, _, _, _, A1, _, K = sideband_coeffs(cfg, ss, epsilon)
    n = optomechanical_strength(cfg, ss)
    t1 = A1 * K
    t2 = 1j * n * mu_p.conjugate()
    _check_denominator(t1 + t2, t1, t2)
    return A1 * n / (t1 + t2)


def _c2(cfg, ss, epsilon):
    _, _, _, _, A1, _, _ = sideband_coeffs(cfg, ss, epsilon)
    mu2_p, _, _, _, A1_2, _, K2 = sideband_coeffs(cfg, ss, 2.0 * epsilon)
    n = optomechanical_strength(cfg, ss)
    t1 = A1_2 * A1 * K2
    t2 = 1j * n * A1 * mu2_p.conjugate()
    _check_denominator(t1 + t2, t1, t2)
    return n * A1_2 * A1 / (t1 + t2), t1 + t2


def effective_linear(cfg: SystemConfig, ss: SteadyState, epsilon: float) -> EffectiveLinear:
    C1 = _c1(cfg, ss, epsilon)
    return EffectiveLinear(
        C1=C1,
        Delta_prime=cfg.pump_detuning - ss.beta - C1.real,
        gamma1_prime=cfg.gamma1 + C1.imag,
        shift=ss.beta + C1.real,
    )


def effective_second(cfg: SystemConfig, ss: SteadyState, lr, epsilon: float) -> EffectiveSecond:
    """Second-sideband self-energy ``C2`` and the source term ``B``."""
    C1 = _c1(cfg, ss, epsilon)
    C2, denom = _c2(cfg, ss, epsilon)
    mu_p, _, _, _, A1, _, _ = sideband_coeffs(cfg, ss, epsilon)
    mu2_p, _, _, _, A1_2, _, _ = sideband_coeffs(cfg, ss, 2.0 * epsilon)
    g = cfg.coupling
    a1 = ss.a1_s
    dx, da = lr.dx_plus, lr.da1_plus
    bracket = (
        -(g**2) * ss.photons * mu2_p.conjugate() * mu_p.conjugate() * dx**2
        - 1j * g * A1_2 * a1.conjugate() * mu_p.conjugate() * dx * da
    )
    B = 1j * cfg.hbar * g**2 * a1 * bracket / denom + 1j * g * dx * da
    return EffectiveSecond(
        C2=C2,
        Delta_dprime=cfg.pump_detuning - ss.beta - C2.real,
        gamma1_dprime=cfg.gamma1 + C2.imag,
        B=B,
        shift2=abs(C2.real - C1.real),
    )


def _lit_roots(cfg, ss, half_width, n_grid=4001):
    """Detunings where ``Delta_P + g x_s + Re C1(Delta_P) = 0``."""
    DL = cfg.pump_detuning

    def f(d):
        return d + ss.beta + _c1(cfg, ss, DL + d).real

    grid = np.linspace(-half_width, half_width, n_grid)
    values = np.array([f(d) for d in grid])
    roots = []
    for i in range(n_grid - 1):
        if values[i] == 0.0:
            roots.append(float(grid[i]))
        elif values[i] * values[i + 1] < 0:
            roots.append(optimize.brentq(f, grid[i], grid[i + 1], xtol=1e-6, rtol=1e-14))
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def lit_shift_report(cfg: SystemConfig) -> ShiftReport:
    """Predict where loss-induced transparency appears in the OMIT spectrum.

    Without mechanics the probe sees the cavity at ``Delta_P``; with it, at
    ``Delta_P + g x_s + Re C1``.  LIT sits where that effective detuning
    vanishes, so the outermost roots on each side are reported.
    """
    ss = steady_state_for(cfg)
    DL = cfg.pump_detuning
    half_width = max(2.0 * cfg.J, 4.0 * cfg.gamma1)
    roots = _lit_roots(cfg, ss, half_width) if optomechanical_strength(cfg, ss) > 0 else [0.0]
    if not roots:
        roots = [float("nan")]
    red, blue = min(roots), max(roots)
    lit = (red,) if red == blue else (red, blue)

    res_lin = effective_linear(cfg, ss, DL)
    res_c2, _ = _c2(cfg, ss, DL)
    shift2_res = abs(res_c2.real - res_lin.C1.real)

    if np.isfinite(red):
        lin_red = effective_linear(cfg, ss, DL + red)
        shift = lin_red.shift
        c2_red, _ = _c2(cfg, ss, DL + red)
        shift2_lit = abs(c2_red.real - lin_red.C1.real)
    else:
        shift = shift2_lit = float("nan")

    return ShiftReport(
        shift=shift,
        shift2=shift2_res,
        lit_detunings=lit,
        shift_resonant=res_lin.shift,
        shift2_at_lit=shift2_lit,
        reference={
            "shift": "epsilon = Delta_L + Delta_P at the red-side LIT root",
            "shift2": "epsilon = Delta_L (probe on cavity resonance)",
            "all_roots": list(roots),
        },
    )
