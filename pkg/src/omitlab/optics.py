"""Purely optical response of the coupled resonators (no mechanics)."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize

from .errors import DetunedModes, NoInteriorMinimum
from .params import SystemConfig

#: |Im(gamma_tp)| / gamma_c above which the closed-form turning point is only indicative.
TP_IMAG_TOL = 1e-2


@dataclass(frozen=True)
class ModeSpectrum:
    omega_plus: complex
    omega_minus: complex

    @property
    def splitting(self) -> float:
        return abs(self.omega_plus - self.omega_minus)


@dataclass(frozen=True)
class TurningPoint:
    gamma_tp_complex: complex
    gamma_tp: float
    physical: bool
    approximate: bool


def _gamma2_total(cfg, gamma_tip):
    return cfg.gamma2 + (cfg.gamma_tip if gamma_tip is None else gamma_tip)


def transmission_amplitude(cfg: SystemConfig, Delta1, Delta2, gamma_tip=None):
    """Complex transmission ``t`` of the waveguide coupled to the left resonator.

    Works elementwise on numpy arrays.  ``gamma_tip`` overrides the config
    value, which is convenient for scans.
    """
    g2 = _gamma2_total(cfg, gamma_tip)
    right = 1j * np.asarray(Delta2) + g2
    left = 1j * np.asarray(Delta1) + cfg.gamma1
    t = 1.0 - 2.0 * cfg.gamma1 * right / (left * right + cfg.J**2)
    return t if np.ndim(t) else complex(t)


def optical_transmission(cfg: SystemConfig, Delta1, Delta2, gamma_tip=None):
    """Transmission rate ``T = |t|^2``; returns ``(T, t)``."""
    t = transmission_amplitude(cfg, Delta1, Delta2, gamma_tip)
    T = np.abs(t) ** 2
    return (T if np.ndim(T) else float(T)), t


def turning_point(cfg: SystemConfig, Delta1: float, Delta2: float) -> TurningPoint:
    """Tip loss at which transmission stops falling and starts to recover.

    The closed form is complex off resonance; its real part is reported and
    ``approximate`` is set once the imaginary part exceeds 1% of gamma_c.
    """
    left = 1j * Delta1 + cfg.gamma1
    value = -(1j * Delta2 + cfg.gamma2) + left * cfg.J**2 / (Delta1**2 + cfg.gamma1**2)
    gamma_tp = value.real
    return TurningPoint(
        gamma_tp_complex=complex(value),
        gamma_tp=gamma_tp,
        physical=gamma_tp >= 0,
        approximate=abs(value.imag) / cfg.gamma_c > TP_IMAG_TOL,
    )


def supermode_frequencies(cfg: SystemConfig, omega1: float, omega2: float, gamma_tip=None) -> ModeSpectrum:
    """Complex eigenfrequencies of the coupled lossy resonators (principal root)."""
    g2 = _gamma2_total(cfg, gamma_tip)
    centre = 0.5 * ((omega1 + omega2) - 1j * (cfg.gamma1 + g2))
    radicand = ((omega1 - omega2) + 1j * (g2 - cfg.gamma1)) ** 2 + 4.0 * cfg.J**2
    half = 0.5 * cmath.sqrt(radicand)
    return ModeSpectrum(omega_plus=centre + half, omega_minus=centre - half)


def track_supermodes(cfg: SystemConfig, omega1: float, omega2: float, gamma_tips: Sequence[float]):
    """Eigenfrequency branches along a tip-loss sweep without branch jumps.

    Each step assigns the new pair to the previous pair by nearest
    neighbour; returns two complex arrays ``(plus, minus)``.
    """
    plus = np.empty(len(gamma_tips), dtype=complex)
    minus = np.empty(len(gamma_tips), dtype=complex)
    for i, gt in enumerate(gamma_tips):
        spec = supermode_frequencies(cfg, omega1, omega2, gamma_tip=gt)
        a, b = spec.omega_plus, spec.omega_minus
        if i > 0:
            keep = abs(a - plus[i - 1]) + abs(b - minus[i - 1])
            swap = abs(b - plus[i - 1]) + abs(a - minus[i - 1])
            if swap < keep:
                a, b = b, a
        plus[i], minus[i] = a, b
    return plus, minus


def exceptional_point(cfg: SystemConfig, omega1: float | None = None, omega2: float | None = None) -> float:
    """Tip loss at which the two supermodes coalesce (degenerate resonators only)."""
    if omega1 is not None and omega2 is not None and omega1 != omega2:
        raise DetunedModes("closed-form EP needs omega1 == omega2; scan the splitting instead")
    return cfg.gamma1 - cfg.gamma2 + 2.0 * cfg.J


def numeric_tp_scan(cfg: SystemConfig, Delta1: float, Delta2: float, gamma_tip_range, n_points: int = 201):
    """Locate the transmission minimum over tip loss numerically.

    A grid scan brackets the minimum, then golden-section search refines it.
    Returns ``(gamma_at_min, T_min)``; raises :class:`NoInteriorMinimum` when the
    smallest grid value sits on the boundary.
    """
    lo, hi = gamma_tip_range
    if n_points < 3:
        raise ValueError("n_points must be >= 3")
    if not (0 <= lo < hi):
        raise ValueError("gamma_tip_range must be non-negative and increasing")
    grid = np.linspace(lo, hi, n_points)
    T, _ = optical_transmission(cfg, Delta1, Delta2, gamma_tip=grid)
    i = int(np.argmin(T))
    if i == 0 or i == n_points - 1:
        raise NoInteriorMinimum(f"transmission is monotonic over [{lo:g}, {hi:g}]")

    def f(gt):
        return optical_transmission(cfg, Delta1, Delta2, gamma_tip=gt)[0]

    scale = cfg.gamma_c
    # search in units of gamma_c so the tolerance is relative
    xmin = optimize.golden(
        lambda u: f(u * scale), brack=(grid[i - 1] / scale, grid[i] / scale, grid[i + 1] / scale), tol=1e-10
    )
    gamma_min = float(xmin * scale)
    return gamma_min, float(f(gamma_min))


def zero_transmission_detuning(cfg: SystemConfig) -> float:
    """Detuning of the absorption zeros without tip loss, ``sqrt(J^2 - gamma^2)``.

    Only defined for equal intrinsic losses; ``nan`` otherwise or when the
    resonators are under-coupled (``J < gamma1``).
    """
    if cfg.gamma1 != cfg.gamma2:
        return math.nan
    d = cfg.J**2 - cfg.gamma1**2
    return math.sqrt(d) if d >= 0 else math.nan
