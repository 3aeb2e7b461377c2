import math

import numpy as np
import pytest

from laserising.standing_wave import (SPEED_OF_LIGHT, CavityGeometry, phase_order_trace,
                                      resonant_length, select_frequency, sweep_path_length)

G = CavityGeometry()
L_EVEN = resonant_length(G.path_length, G, parity=0)


def _ulp_shift(length):
    # one floating ulp of the loop count, expressed as a frequency
    return SPEED_OF_LIGHT / (2 * length) * np.spacing(2 * length / G.wavelength)


def test_resonances():
    s = select_frequency(L_EVEN, G)
    assert abs(s.frequency_shift) <= 2 * _ulp_shift(L_EVEN)
    assert s.phase_order == 0.0 and s.loop_count % 2 == 0
    s = select_frequency(L_EVEN + G.period, G)
    assert abs(s.frequency_shift) <= 2 * _ulp_shift(L_EVEN) and s.phase_order == math.pi


def test_excursion_and_period_at_reference_length():
    # straddle one rounding boundary tightly: the extremes sit on either side of it
    boundary = L_EVEN + G.period / 2
    curve = sweep_path_length(boundary - 1e-6 * G.period, boundary + 1e-6 * G.period, 101, G)
    fsr = SPEED_OF_LIGHT / (2 * G.path_length)
    assert curve.peak_to_peak() == pytest.approx(fsr, rel=1e-5)
    assert curve.peak_to_peak() == pytest.approx(96.8e6, rel=1e-3)
    assert G.period == pytest.approx(1577.5e-9 / 2, rel=1e-15)


def test_periodicity():
    for offset in np.linspace(0.05, 0.45, 9) * G.period:
        a = select_frequency(L_EVEN + offset, G)
        b = select_frequency(L_EVEN + offset + G.period, G)
        assert b.frequency_shift == pytest.approx(a.frequency_shift, rel=1e-6)
        assert b.phase_order != a.phase_order


def test_excursion_bound_and_parity_consistency():
    curve = sweep_path_length(L_EVEN - 0.3 * G.period, L_EVEN + 3.3 * G.period, 5001, G)
    bound = SPEED_OF_LIGHT / (4 * curve.path_length) * (1 + 1e-12)
    assert np.all(np.abs(curve.frequency_shift) <= bound)
    assert np.array_equal(curve.phase_order == math.pi, curve.loop_count % 2 == 1)


def test_twenty_one_periods():
    steps = 21 * 400 + 1
    start = L_EVEN + G.period / 4
    curve = sweep_path_length(start, start + 21 * G.period, steps, G)
    flips = curve.parity_flips()
    assert len(curve.resets()) == 21 and len(flips) == 21
    orders = curve.phase_order[np.r_[0, flips]]
    assert np.all(orders[::2] == orders[0]) and np.all(orders[1::2] != orders[0])


def test_mirror_mode_period():
    curve = sweep_path_length(0.0, 10 * G.wavelength / 4, 4001, G, mirror_double_pass=True)
    flips = curve.coordinate[curve.parity_flips()]
    assert np.diff(flips).mean() == pytest.approx(394.4e-9, rel=1e-3)
    assert G.wavelength / 4 == pytest.approx(394.4e-9, rel=1e-3)


def test_pulled_excursion():
    g = CavityGeometry(pull_factor=0.31)
    boundary = L_EVEN + g.period / 2
    curve = sweep_path_length(boundary - 1e-6 * g.period, boundary + 1e-6 * g.period, 11, g)
    assert curve.peak_to_peak() == pytest.approx(30e6, rel=0.05)


def test_phase_order_trace():
    curve = sweep_path_length(L_EVEN, L_EVEN + G.period, 1001, G)
    x, order = phase_order_trace(curve)
    assert order[0] == 0.0
    changes = np.flatnonzero(np.diff(order))
    assert len(changes) == 1 and order[-1] == math.pi


def test_geometry_validation():
    with pytest.raises(ValueError):
        CavityGeometry(pull_factor=0.0)
    with pytest.raises(ValueError):
        CavityGeometry(path_length=1e-6)
    with pytest.raises(ValueError):
        sweep_path_length(1.0, 0.9, 10, G)


def test_csv(tmp_path):
    curve = sweep_path_length(L_EVEN, L_EVEN + G.period, 11, G)
    text = curve.to_csv(tmp_path / "s.csv")
    assert text.splitlines()[0] == "coordinate_m,freq_shift_hz,loop_count,phase_order"
    assert len(text.splitlines()) == 12
