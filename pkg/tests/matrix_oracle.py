"""Direct linear-algebra solution of the first- and second-order sideband equations.

Unknowns are ``[d1+, conj(d1-), d2+, conj(d2-), X+]``; the second-order
system is the same matrix at ``2 eps`` driven by products of first-order
amplitudes.
"""

import numpy as np

from omitlab.params import drive_amplitudes


def _matrix(cfg, ss, w):
    g, J, a = cfg.coupling, cfg.J, ss.a1_s
    D = cfg.pump_detuning
    nu = 1j * D + cfg.gamma1 - 1j * ss.beta
    mu = 1j * D + cfg.gamma2_total
    K = cfg.m * (cfg.omega_m**2 - w**2 - 1j * w * cfg.Gamma_m)
    return np.array(
        [
            [nu - 1j * w, 0, -1j * J, 0, -1j * g * a],
            [0, np.conj(nu + 1j * w), 0, 1j * J, 1j * g * np.conj(a)],
            [-1j * J, 0, mu - 1j * w, 0, 0],
            [0, 1j * J, 0, np.conj(mu + 1j * w), 0],
            [-cfg.hbar * g * np.conj(a), -cfg.hbar * g * a, 0, 0, K],
        ],
        dtype=complex,
    )


def first_order(cfg, ss, eps, eps_P=None):
    if eps_P is None:
        eps_P = drive_amplitudes(cfg)[1]
    return np.linalg.solve(_matrix(cfg, ss, eps), [eps_P, 0, 0, 0, 0])


def second_order(cfg, ss, eps, eps_P=None):
    u = first_order(cfg, ss, eps, eps_P)
    g = cfg.coupling
    p1, q1, X = u[0], u[1], u[4]
    rhs = [1j * g * X * p1, -1j * g * X * q1, 0, 0, cfg.hbar * g * p1 * q1]
    return np.linalg.solve(_matrix(cfg, ss, 2 * eps), rhs)


def random_configs(n, seed=7):
    from omitlab.params import SystemConfig

    rng = np.random.default_rng(seed)
    for _ in range(n):
        yield SystemConfig(
            gamma1=rng.uniform(3e6, 12e6),
            gamma2=rng.uniform(3e6, 12e6),
            gamma_tip=rng.uniform(0, 60e6),
            J=rng.uniform(5e6, 20e6),
            P_L=10 ** rng.uniform(-5, -3),
            Gamma_m=rng.uniform(0.1e6, 1e6),
        ), rng.uniform(-20e6, 20e6)
