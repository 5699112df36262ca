"""Time-domain check of the perturbative formulas.

The full nonlinear mean-field equations of motion are integrated with a
fixed-step classical Runge-Kutta scheme, starting from an empty cavity and
a resting mirror.  Once transients have died out, the left-resonator field
is demodulated at the probe-pump beat ``epsilon`` and its second harmonic.
Nothing here uses the linearization, so agreement with :mod:`omitlab.omit`
and :mod:`omitlab.sideband` is a genuine cross-check.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import Diverged, NonConverged, StepTooLarge, WindowTooShort
from .params import SystemConfig, drive_amplitudes
from .steady import solve_steady_state

WINDOW_RTOL = 1e-4
MIN_PERIODS = 10
DT_FACTOR = 0.05
DIVERGENCE_FACTOR = 1e12
HARMONIC2_FLOOR = 1e-10


@dataclass
class TdTrace:
    t: np.ndarray
    x: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    converged: bool = False
    transient_end: float = 0.0

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        if self.t.ndim != 1 or len(self.t) < 2:
            raise ValueError("time grid needs at least two samples")
        steps = np.diff(self.t)
        if np.any(steps <= 0):
            raise ValueError("time grid must be strictly increasing")
        if np.ptp(steps) > 1e-9 * steps.mean():
            raise ValueError("time grid must be uniform")

    @property
    def dt(self) -> float:
        return float((self.t[-1] - self.t[0]) / (len(self.t) - 1))

    def to_csv(self, path) -> None:
        """Write columns ``t, x, Re a1, Im a1, Re a2, Im a2``."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x", "re_a1", "im_a1", "re_a2", "im_a2"])
            for row in zip(self.t, self.x, self.a1.real, self.a1.imag, self.a2.real, self.a2.imag):
                w.writerow([repr(float(v)) for v in row])


@numba.njit(cache=True)
def _integrate_kernel(x, v, a1, a2, t0, dt, nsteps, stride, Gm, wm2, hg_m, g, DL, g1, g2t, J, eL, eP, eps,
                      out_x, out_a1, out_a2, x_lim, a_lim):
    """Advance ``nsteps`` RK4 steps, storing every ``stride``-th state (starting with the initial one).

    Returns the final state, the number of stored samples and a divergence flag.
    """
    k = 0
    diverged = False
    for i in range(nsteps):
        if i % stride == 0:
            out_x[k] = x
            out_a1[k] = a1
            out_a2[k] = a2
            k += 1
        t = t0 + i * dt
        # stage 1
        p1 = eP * np.exp(-1j * eps * t)
        k1x = v
        k1v = -Gm * v - wm2 * x + hg_m * (a1.real * a1.real + a1.imag * a1.imag)
        k1a = (-1j * DL - g1 + 1j * g * x) * a1 + 1j * J * a2 + eL + p1
        k1b = (-1j * DL - g2t) * a2 + 1j * J * a1
        # stage 2
        th = t + 0.5 * dt
        ph = eP * np.exp(-1j * eps * th)
        x2 = x + 0.5 * dt * k1x
        v2 = v + 0.5 * dt * k1v
        a12 = a1 + 0.5 * dt * k1a
        a22 = a2 + 0.5 * dt * k1b
        k2x = v2
        k2v = -Gm * v2 - wm2 * x2 + hg_m * (a12.real * a12.real + a12.imag * a12.imag)
        k2a = (-1j * DL - g1 + 1j * g * x2) * a12 + 1j * J * a22 + eL + ph
        k2b = (-1j * DL - g2t) * a22 + 1j * J * a12
        # stage 3
        x3 = x + 0.5 * dt * k2x
        v3 = v + 0.5 * dt * k2v
        a13 = a1 + 0.5 * dt * k2a
        a23 = a2 + 0.5 * dt * k2b
        k3x = v3
        k3v = -Gm * v3 - wm2 * x3 + hg_m * (a13.real * a13.real + a13.imag * a13.imag)
        k3a = (-1j * DL - g1 + 1j * g * x3) * a13 + 1j * J * a23 + eL + ph
        k3b = (-1j * DL - g2t) * a23 + 1j * J * a13
        # stage 4
        p4 = eP * np.exp(-1j * eps * (t + dt))
        x4 = x + dt * k3x
        v4 = v + dt * k3v
        a14 = a1 + dt * k3a
        a24 = a2 + dt * k3b
        k4x = v4
        k4v = -Gm * v4 - wm2 * x4 + hg_m * (a14.real * a14.real + a14.imag * a14.imag)
        k4a = (-1j * DL - g1 + 1j * g * x4) * a14 + 1j * J * a24 + eL + p4
        k4b = (-1j * DL - g2t) * a24 + 1j * J * a14

        x = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        a1 = a1 + dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        a2 = a2 + dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        if not (abs(x) < x_lim and abs(a1) < a_lim and abs(a2) < a_lim):
            diverged = True
            break
    if not diverged and nsteps % stride == 0:
        out_x[k] = x
        out_a1[k] = a1
        out_a2[k] = a2
        k += 1
    return x, v, a1, a2, k, diverged


def max_step(cfg: SystemConfig, epsilon: float) -> float:
    """Largest admissible step, 5% of the fastest oscillation period scale."""
    DL = abs(cfg.pump_detuning)
    return DT_FACTOR / max(DL, cfg.omega_m, abs(epsilon) + DL)


def commensurate_step(cfg: SystemConfig, epsilon: float) -> float:
    """Largest admissible step that divides the beat period ``2 pi / epsilon`` exactly."""
    dt_max = max_step(cfg, epsilon)
    if epsilon == 0:
        return dt_max
    period = 2.0 * math.pi / abs(epsilon)
    return period / math.ceil(period / dt_max)


class _Integrator:
    """Resumable RK4 integration of the mean-field equations."""

    def __init__(self, cfg: SystemConfig, epsilon: float, dt: float, eps_P: float | None = None):
        eps_L, default_P = drive_amplitudes(cfg)
        self.eps_P = default_P if eps_P is None else eps_P
        self.eps_L = eps_L
        self.cfg = cfg
        self.epsilon = epsilon
        self.dt = dt
        g = cfg.coupling
        self.params = (
            cfg.Gamma_m,
            cfg.omega_m**2,
            cfg.hbar * g / cfg.m,
            g,
            cfg.pump_detuning,
            cfg.gamma1,
            cfg.gamma2_total,
            cfg.J,
            eps_L,
            self.eps_P,
            epsilon,
        )
        drive = max(eps_L + self.eps_P, 1e-300)
        a_scale = drive / min(cfg.gamma1, cfg.gamma2_total if cfg.gamma2_total > 0 else cfg.gamma1)
        x_scale = max(cfg.hbar * g * a_scale**2 / (cfg.m * cfg.omega_m**2), 1e-30)
        self.x_lim = DIVERGENCE_FACTOR * x_scale
        self.a_lim = DIVERGENCE_FACTOR * a_scale
        self.state = (0.0, 0.0, 0j, 0j)
        self.step_index = 0

    @property
    def time(self) -> float:
        return self.step_index * self.dt

    def advance(self, nsteps: int, stride: int = 1):
        n_out = nsteps // stride + 1
        out_x = np.empty(n_out)
        out_a1 = np.empty(n_out, dtype=np.complex128)
        out_a2 = np.empty(n_out, dtype=np.complex128)
        x, v, a1, a2 = self.state
        t0 = self.time
        x, v, a1, a2, k, diverged = _integrate_kernel(
            x, v, a1, a2, t0, self.dt, nsteps, stride, *self.params, out_x, out_a1, out_a2, self.x_lim, self.a_lim
        )
        if diverged:
            raise Diverged(f"state left the physical range after t = {t0:.3e} s")
        self.state = (x, v, a1, a2)
        t = t0 + self.dt * stride * np.arange(k)
        self.step_index += nsteps
        return t, out_x[:k], out_a1[:k], out_a2[:k]


def _check_step(cfg, epsilon, dt):
    limit = max_step(cfg, epsilon)
    if dt > limit * (1 + 1e-12):
        raise StepTooLarge(f"dt = {dt:.3e} s exceeds the resolution limit {limit:.3e} s")


def integrate(cfg: SystemConfig, epsilon: float, t_final: float, dt: float | None = None,
              eps_P: float | None = None, window_periods: int | None = None) -> TdTrace:
    """Integrate from rest up to ``t_final`` with fixed step ``dt``.

    ``dt`` defaults to :func:`commensurate_step`.  The returned trace is
    marked converged when its last two demodulation windows agree to 1e-4.
    """
    if dt is None:
        dt = commensurate_step(cfg, epsilon)
    _check_step(cfg, epsilon, dt)
    if t_final <= 0:
        raise ValueError("t_final must be positive")
    integ = _Integrator(cfg, epsilon, dt, eps_P)
    nsteps = int(round(t_final / dt))
    t, x, a1, a2 = integ.advance(nsteps)
    trace = TdTrace(t=t, x=x, a1=a1, a2=a2)
    trace.transient_end, trace.converged = _find_transient_end(trace, cfg, epsilon, window_periods)
    return trace


def _window_len(dt, epsilon, periods):
    return int(round(periods * 2.0 * math.pi / abs(epsilon) / dt))


def _default_window_periods(cfg: SystemConfig, epsilon: float) -> int:
    # about a microsecond, and never fewer than MIN_PERIODS beat periods
    return max(MIN_PERIODS, int(math.ceil(1e-6 * abs(epsilon) / (2.0 * math.pi))))


def _project(t, signal, epsilon, harmonic):
    return np.mean(signal * np.exp(1j * harmonic * epsilon * t))


def _agree(a, b, rtol, atol=0.0):
    return abs(a - b) <= rtol * max(abs(a), abs(b)) + atol


def _find_transient_end(trace: TdTrace, cfg: SystemConfig, epsilon: float, window_periods=None):
    if epsilon == 0:
        return float(trace.t[-1]), False
    periods = window_periods or _default_window_periods(cfg, epsilon)
    n = _window_len(trace.dt, epsilon, periods)
    n_windows = len(trace.t) // n
    if n_windows < 2:
        return float(trace.t[-1]), False
    floor = 10.0 / cfg.Gamma_m
    start = len(trace.t) - n_windows * n
    values = []
    for w in range(n_windows):
        sl = slice(start + w * n, start + (w + 1) * n)
        values.append(_project(trace.t[sl], trace.a1[sl], epsilon, 1))
    converged = _agree(values[-1], values[-2], WINDOW_RTOL)
    end = None
    for w in range(n_windows - 1, 0, -1):
        if not _agree(values[w], values[w - 1], WINDOW_RTOL):
            break
        end = trace.t[start + (w - 1) * n]
    if end is None:
        end = trace.t[start + (n_windows - 1) * n]
    return float(max(end, min(floor, trace.t[-1]))), converged


def demodulate(trace: TdTrace, epsilon: float, harmonic: int = 1, n_periods: int | None = None) -> complex:
    """Coefficient of ``exp(-i * harmonic * epsilon * t)`` in ``a1(t)``.

    Uses the longest whole number of beat periods (or ``n_periods``) that
    fits after ``trace.transient_end``, aligned to the end of the trace.
    """
    if epsilon == 0:
        raise ValueError("epsilon must be non-zero to demodulate")
    period = 2.0 * math.pi / abs(epsilon)
    available = trace.t[-1] - trace.transient_end + trace.dt
    max_periods = int(math.floor(available / period + 1e-9))
    periods = max_periods if n_periods is None else min(n_periods, max_periods)
    if periods < MIN_PERIODS:
        raise WindowTooShort(f"only {periods} beat periods after the transient (need {MIN_PERIODS})")
    n = _window_len(trace.dt, epsilon, periods)
    sl = slice(len(trace.t) - n, len(trace.t))
    return complex(_project(trace.t[sl], trace.a1[sl], epsilon, harmonic))


def settle(cfg: SystemConfig, epsilon: float, eps_P: float | None = None, dt: float | None = None,
           window_periods: int | None = None, max_time: float | None = None, rtol: float = WINDOW_RTOL):
    """Integrate window by window until both harmonics settle.

    Returns ``(A1, A2, x_mean, t_end, eps_P)`` with ``A_n`` the demodulated
    harmonics of the last window.  At least ``10 / Gamma_m`` is integrated.
    """
    if dt is None:
        dt = commensurate_step(cfg, epsilon)
    _check_step(cfg, epsilon, dt)
    integ = _Integrator(cfg, epsilon, dt, eps_P)
    periods = window_periods or _default_window_periods(cfg, epsilon)
    n = _window_len(dt, epsilon, periods)
    floor = 10.0 / cfg.Gamma_m
    if max_time is None:
        max_time = 200.0 / cfg.Gamma_m
    warm = int(math.ceil(floor / (n * dt))) * n
    integ.advance(max(warm - n, 0), stride=max(warm, 1))
    prev = None
    while True:
        t, x, a1, _ = integ.advance(n)
        t, x, a1 = t[:-1], x[:-1], a1[:-1]
        current = (_project(t, a1, epsilon, 1), _project(t, a1, epsilon, 2), float(np.mean(x)))
        # the second harmonic is pure roundoff without mechanics, hence the floor
        floor2 = HARMONIC2_FLOOR * abs(current[0])
        if prev is not None and _agree(current[0], prev[0], rtol) and _agree(current[1], prev[1], rtol, floor2):
            return current[0], current[1], current[2], integ.time, integ.eps_P
        if integ.time > max_time:
            raise NonConverged(f"harmonics still drifting after {integ.time:.3e} s")
        prev = current


def oracle_observables(cfg: SystemConfig, Delta_P: float, **kwargs) -> tuple[float, float]:
    """Probe transmission and second-sideband efficiency from the time-domain run."""
    epsilon = Delta_P + cfg.pump_detuning
    A1, A2, _, _, eps_P = settle(cfg, epsilon, **kwargs)
    T_P = abs(1.0 - 2.0 * cfg.gamma1 * A1 / eps_P) ** 2
    eta = abs(2.0 * cfg.gamma1 * A2 / eps_P)
    return T_P, eta


def steady_state_check(cfg: SystemConfig, t_final: float | None = None) -> tuple[float, float]:
    """Time-averaged final displacement versus the analytic ``x_s`` (probe off)."""
    if t_final is None:
        t_final = 50.0 / cfg.Gamma_m
    epsilon = cfg.pump_detuning
    dt = commensurate_step(cfg, epsilon)
    integ = _Integrator(cfg, epsilon, dt, eps_P=0.0)
    nsteps = int(round(t_final / dt))
    n = _window_len(dt, epsilon, _default_window_periods(cfg, epsilon))
    integ.advance(nsteps - n, stride=nsteps)
    _, x, _, _ = integ.advance(n)
    return float(np.mean(x[:-1])), solve_steady_state(cfg).x_s
