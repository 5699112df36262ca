"""Self-consistent steady state of the pumped compound system.

The radiation-pressure displacement enters the cavity detuning through
``beta = g * x_s`` while ``x_s`` itself is proportional to the intracavity
photon number.  Eliminating ``|a1_s|^2`` leaves a real cubic in ``beta``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import Bistable, BistableWarning, NoPhysicalRoot
from .params import SystemConfig, drive_amplitudes

RESIDUAL_FLOOR = 1e-30
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class SteadyState:
    x_s: float
    a1_s: complex
    a2_s: complex
    beta: float
    residual: float
    bistable: bool = False
    roots: tuple[float, ...] = ()

    @property
    def photons(self) -> float:
        return abs(self.a1_s) ** 2


def _spring_constant(cfg: SystemConfig) -> float:
    # beta = k * |a1_s|^2
    g = cfg.coupling
    return cfg.hbar * g * g / (cfg.m * cfg.omega_m**2)


def _mu0(cfg: SystemConfig) -> complex:
    return 1j * cfg.pump_detuning + cfg.gamma2_total


def _d0(cfg: SystemConfig) -> complex:
    return (1j * cfg.pump_detuning + cfg.gamma1) * _mu0(cfg) + cfg.J**2


def cavity_amplitudes(cfg: SystemConfig, beta: float, eps_L: float) -> tuple[complex, complex]:
    """Steady intracavity fields for a given mechanical frequency shift ``beta``."""
    mu0 = _mu0(cfg)
    denom = (1j * cfg.pump_detuning + cfg.gamma1 - 1j * beta) * mu0 + cfg.J**2
    a1 = eps_L * mu0 / denom
    a2 = 1j * cfg.J * eps_L / denom
    return a1, a2


def steady_state_cubic(cfg: SystemConfig, eps_L: float) -> np.ndarray:
    """Coefficients ``[c0, c1, c2, c3]`` of ``sum c_k beta^k = 0``.

    Obtained from ``beta * |D0 - i beta mu0|^2 = k eps_L^2 |mu0|^2`` with
    ``D0`` the zero-displacement denominator.
    """
    mu0 = _mu0(cfg)
    d0 = _d0(cfg)
    k = _spring_constant(cfg)
    c3 = abs(mu0) ** 2
    c2 = -2.0 * (d0 * mu0.conjugate()).imag
    c1 = abs(d0) ** 2
    c0 = -k * eps_L**2 * abs(mu0) ** 2
    return np.array([c0, c1, c2, c3], dtype=float)


def _real_nonnegative_roots(coeffs: np.ndarray) -> list[float]:
    c0, c1, c2, c3 = coeffs
    if c0 == 0.0:
        # beta = 0 is exact; the remaining quadratic |D0 - i beta mu0|^2 has no real zero
        return [0.0]
    # rescale beta by the linear-term scale to keep np.roots well conditioned
    scale = abs(c1 / c2) if c2 != 0 else 1.0
    scale = max(scale, abs(c0 / c1) if c1 != 0 else 1.0)
    scaled = [c3 * scale**3, c2 * scale**2, c1 * scale, c0]
    roots = np.roots(scaled) * scale
    cubic = np.polynomial.Polynomial(coeffs)
    deriv = cubic.deriv()
    found = []
    for r in roots:
        if abs(r.imag) > 1e-7 * max(abs(r.real), 1.0):
            continue
        x = float(r.real)
        for _ in range(50):
            d = deriv(x)
            if d == 0:
                break
            step = cubic(x) / d
            x -= step
            if abs(step) <= 1e-15 * max(abs(x), 1.0):
                break
        if x >= 0:
            found.append(x)
    found.sort()
    unique = []
    for x in found:
        if not unique or abs(x - unique[-1]) > 1e-9 * max(abs(x), 1.0):
            unique.append(x)
    return unique


def solve_steady_state(cfg: SystemConfig, strict: bool = False) -> SteadyState:
    """Physical steady state: the smallest non-negative root of the cubic.

    When three non-negative roots exist the state is flagged bistable and a
    :class:`BistableWarning` is emitted (or :class:`Bistable` raised with
    ``strict=True``); the lowest branch is returned either way.
    """
    eps_L, _ = drive_amplitudes(cfg)
    coeffs = steady_state_cubic(cfg, eps_L)
    roots = _real_nonnegative_roots(coeffs)
    if not roots:
        raise NoPhysicalRoot(f"no real non-negative steady state (cubic {coeffs.tolist()})")
    bistable = len(roots) >= 3
    if bistable:
        msg = f"three steady states at beta = {roots}; returning the lowest branch"
        if strict:
            raise Bistable(msg)
        warnings.warn(msg, BistableWarning, stacklevel=2)
    beta = float(roots[0])
    a1, a2 = cavity_amplitudes(cfg, beta, eps_L)
    k = _spring_constant(cfg)
    residual = float(abs(beta - k * abs(a1) ** 2) / max(beta, RESIDUAL_FLOOR))
    g = cfg.coupling
    x_s = beta / g if g > 0 else 0.0
    return SteadyState(
        x_s=x_s, a1_s=a1, a2_s=a2, beta=beta, residual=residual, bistable=bistable, roots=tuple(float(r) for r in roots)
    )
