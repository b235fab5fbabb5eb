import numpy as np
import pytest

from zwrlab import units
from zwrlab.pulsecraft import (Pulse, PulseError, build_pulse, read_pulse_csv, schedule, survival,
                               width_samples)


def test_single_point_is_plain_sine_squared():
    ramp = units.fs_to_au(100.0)
    pulse = build_pulse([(550.0, 1e8)], ramp, 0.0, 2.0)
    assert np.all(pulse.wavelength == 550.0)
    assert pulse.intensity.max() == pytest.approx(1e8, rel=1e-6)
    t = pulse.t
    expected = 1e8 * np.sin(0.5 * np.pi * np.clip(t / ramp, 0, 1)) ** 2 * \
        np.sin(0.5 * np.pi * np.clip((2 * ramp - t) / ramp, 0, 1)) ** 2
    assert np.allclose(pulse.intensity[1:-1], expected[1:-1], rtol=1e-12, atol=1e-3)


def test_plateau_follows_path_linearly_in_wavelength():
    path = [(549.2, 1.69e8), (549.0, 1.47e8), (549.1, 1.59e8)]  # unsorted on purpose
    env, lam, tau = schedule([a for a, _ in path], [b for _, b in path], 10.0, 100.0)
    assert tau == 120.0
    assert lam(np.array(10.0)) == pytest.approx(549.0)
    assert lam(np.array(60.0)) == pytest.approx(549.1)
    assert lam(np.array(110.0)) == pytest.approx(549.2)
    assert env(np.array(60.0)) == pytest.approx(1.59e8)
    assert env(np.array(35.0)) == pytest.approx(0.5 * (1.47e8 + 1.59e8))
    assert env(np.array(0.0)) == 0.0


def test_phase_accumulates_instantaneous_frequency():
    pulse = build_pulse([(549.0, 1e8), (551.0, 1.2e8)], 500.0, 5000.0, 1.0)
    w = np.gradient(pulse.phase, pulse.t)
    assert np.allclose(w[1:-1], pulse.omega[1:-1], rtol=1e-6)
    assert pulse.field_at(0.0) == 0.0


def test_dt_must_resolve_period():
    with pytest.raises(PulseError):
        build_pulse([(550.0, 1e8)], 1000.0, 0.0, 10.0)
    with pytest.raises(PulseError):
        build_pulse([], 1000.0, 0.0, 1.0)


def test_csv_round_trip(tmp_path):
    pulse = build_pulse([(549.0, 1e8), (549.5, 1.3e8)], 300.0, 600.0, 2.0)
    f = tmp_path / "pulse.csv"
    pulse.write_csv(f)
    assert f.read_text().splitlines()[0] == "t_au,intensity_wcm2,lambda_nm,field_au"
    back = read_pulse_csv(f)
    assert np.allclose(back.intensity, pulse.intensity, rtol=1e-11)
    assert np.allclose(back.field, pulse.field, rtol=1e-9, atol=1e-15)


def test_survival_exponential():
    t = np.linspace(0, 100, 11)
    g = np.vstack([np.zeros_like(t), np.full_like(t, 0.01), np.full_like(t, -1e-9)])
    est = survival(t, g, (0, 1, 2))
    assert est.final[0] == 1.0
    assert est.final[1] == pytest.approx(np.exp(-1.0), rel=1e-12)
    assert est.final[2] == 1.0  # negative noise is not growth
    with pytest.raises(ValueError):
        survival(t, g[:2], (0, 1, 2))
    g[1, 3] = np.nan
    with pytest.raises(ValueError):
        survival(t, g, (0, 1, 2))


def test_width_samples_cover_pulse():
    pulse = build_pulse([(549.0, 1e8)], 300.0, 600.0, 2.0)
    t, i, lam = width_samples(pulse, 50)
    assert t[0] == 0.0 and t[-1] == pulse.duration and len(t) == 50
    assert isinstance(pulse, Pulse)
