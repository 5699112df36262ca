import math

import numpy as np
import pytest

from omitlab.errors import DetunedModes, NoInteriorMinimum
from omitlab.optics import (
    exceptional_point,
    numeric_tp_scan,
    optical_transmission,
    supermode_frequencies,
    track_supermodes,
    turning_point,
    zero_transmission_detuning,
)
from omitlab.params import SystemConfig

from conftest import GAMMA_C, J


def test_zero_at_turning_point_on_resonance(cfg):
    T, _ = optical_transmission(cfg.replace(gamma_tip=3 * GAMMA_C), 0.0, 0.0)
    assert T == pytest.approx(0.0, abs=1e-20)


def test_resonant_transmission_without_tip(cfg):
    # t = 1 - 2 g1 g2 / (g1 g2 + J^2) = 1 - 2/5 with J = 2 gamma
    T, t = optical_transmission(cfg, 0.0, 0.0)
    assert t == pytest.approx(0.6, rel=1e-14)
    assert T == pytest.approx(0.36, rel=1e-14)


def test_absorption_zeros_without_tip(cfg):
    d = math.sqrt(J**2 - GAMMA_C**2)
    assert d == pytest.approx(11.137e6, rel=1e-4)
    assert zero_transmission_detuning(cfg) == pytest.approx(d, rel=1e-15)
    for s in (1, -1):
        T, _ = optical_transmission(cfg, s * d, s * d)
        assert T <= 1e-8


def test_transmission_bounded_and_symmetric(cfg):
    delta = np.linspace(-60e6, 60e6, 2001)
    for gt in (0.0, 10e6, 25.72e6, 80e6):
        T, _ = optical_transmission(cfg, delta, delta, gamma_tip=gt)
        assert np.all(T >= 0) and np.all(T <= 1 + 1e-15)
        assert np.allclose(T, T[::-1], rtol=0, atol=1e-14)


def test_vectorised_matches_scalar(cfg):
    delta = np.array([-5e6, 0.0, 7e6])
    T, _ = optical_transmission(cfg, delta, delta)
    for d, v in zip(delta, T):
        assert optical_transmission(cfg, d, d)[0] == pytest.approx(v, rel=1e-15)


def test_turning_point_closed_form(cfg):
    tp = turning_point(cfg, 0.0, 0.0)
    assert tp.gamma_tp == pytest.approx(3 * GAMMA_C, rel=1e-15)
    assert tp.physical and not tp.approximate
    assert tp.gamma_tp_complex.imag == 0
    off = turning_point(cfg, 3e6, 3e6)
    assert off.approximate


def test_numeric_scan_agrees_with_closed_form(cfg):
    g, T = numeric_tp_scan(cfg, 0.0, 0.0, (0.0, 8 * GAMMA_C))
    assert g == pytest.approx(3 * GAMMA_C, rel=1e-4)
    assert T <= 1e-8


def test_numeric_scan_boundary_minimum(cfg):
    with pytest.raises(NoInteriorMinimum):
        numeric_tp_scan(cfg, 0.0, 0.0, (4 * GAMMA_C, 8 * GAMMA_C))


def test_exceptional_point(cfg):
    ep = exceptional_point(cfg)
    assert ep == 4 * GAMMA_C == 25.72e6
    assert supermode_frequencies(cfg, 0.0, 0.0, gamma_tip=ep).splitting <= 1e-8 * GAMMA_C
    with pytest.raises(DetunedModes):
        exceptional_point(cfg, 0.0, 1e6)
    assert exceptional_point(cfg, 5e6, 5e6) == ep


def test_splitting_above_ep(cfg):
    # splitting = sqrt(gt^2 - 4J^2) for equal intrinsic losses; 2J*sqrt(3) at gt = 4J
    s = supermode_frequencies(cfg, 0.0, 0.0, gamma_tip=4 * J)
    assert s.splitting == pytest.approx(2 * J * math.sqrt(3), rel=1e-12)


def test_eigenvalue_sum_rule(cfg):
    for gt in (0.0, 12e6, 25.72e6, 40e6):
        s = supermode_frequencies(cfg, 1e6, 2e6, gamma_tip=gt)
        total = 3e6 - 1j * (cfg.gamma1 + cfg.gamma2 + gt)
        assert s.omega_plus + s.omega_minus == pytest.approx(total, rel=1e-14)


def test_tracking_keeps_branches_continuous(cfg):
    tips = np.linspace(0, 8 * GAMMA_C, 321)
    plus, minus = track_supermodes(cfg, 0.0, 0.0, tips)
    assert np.max(np.abs(np.diff(plus))) < 5 * GAMMA_C
    assert np.max(np.abs(np.diff(minus))) < 5 * GAMMA_C
    assert plus[0].real > 0 > minus[0].real


def test_zero_detuning_undefined_for_unequal_losses():
    assert math.isnan(zero_transmission_detuning(SystemConfig(gamma2=3e6)))
