import numpy as np
import pytest

from zwrlab import units


def test_omega_at_552nm():
    # 45.563352529 / 552 computed by hand
    assert units.wavelength_to_omega(552.0) == pytest.approx(0.0825423, abs=2e-7)


def test_omega_scaling_and_definition():
    assert units.wavelength_to_omega(1100.0) == pytest.approx(units.wavelength_to_omega(550.0) / 2, rel=1e-15)
    assert units.wavelength_to_omega(45.563352529) == pytest.approx(1.0, rel=1e-12)


def test_omega_factor_from_codata():
    # 2*pi*c*a0: c in au = 137.035999084, a0 = 0.0529177210903 nm
    assert units.OMEGA_NM == pytest.approx(2 * np.pi * 137.035999084 * 0.0529177210903, rel=1e-9)


def test_intensity_reference():
    # I = eps0 c E^2 / 2 with E_au = 5.14220674763e11 V/m, in W/cm^2
    eps0, c = 8.8541878128e-12, 299792458.0
    i_ref = 0.5 * eps0 * c * 5.14220674763e11**2 / 1e4
    # the tabulated reference predates CODATA 2018 by a few 1e-7
    assert units.INTENSITY_AU == pytest.approx(i_ref, rel=1e-6)
    assert units.intensity_to_field(units.INTENSITY_AU) == pytest.approx(1.0, rel=1e-14)
    assert units.intensity_to_field(0.0) == 0.0


def test_field_at_reference_point():
    assert units.intensity_to_field(0.468e9) == pytest.approx(1.1548e-4, rel=1e-3)


def test_field_quadruple_intensity():
    i = 3.7e8
    assert units.intensity_to_field(4 * i) == 2 * units.intensity_to_field(i)


def test_wavenumbers():
    assert units.energy_to_wavenumber(1.0) == pytest.approx(219474.631, abs=1e-3)
    assert units.energy_to_wavenumber(0.0) == 0.0
    assert units.wavenumber_to_energy(1e-3) == pytest.approx(4.556e-9, rel=1e-3)


@pytest.mark.parametrize("fwd,inv,x", [
    (units.wavelength_to_omega, units.omega_to_wavelength, 551.37),
    (units.intensity_to_field, units.field_to_intensity, 2.3e8),
    (units.energy_to_wavenumber, units.wavenumber_to_energy, 3.1e-5),
    (units.fs_to_au, units.au_to_fs, 512.0),
])
def test_round_trip(fwd, inv, x):
    assert inv(fwd(x)) == pytest.approx(x, rel=1e-12)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        units.wavelength_to_omega(0.0)
    with pytest.raises(ValueError):
        units.wavelength_to_omega(-5.0)
    with pytest.raises(ValueError):
        units.intensity_to_field(-1.0)


def test_constants_positive():
    assert all(v > 0 for v in units.UNIT_TABLE.values())
