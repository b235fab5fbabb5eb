"""Conversions between laboratory units and atomic units.

Every solver in the package works in atomic units (hbar = m_e = e = 1).
Laboratory units (nm, W/cm^2, cm^-1, fs) only appear at the I/O boundary.
"""

import math

import numpy as np

# CODATA 2018
HARTREE_TO_CM1 = 219474.6313632
# 2*pi*c*a0 expressed in nm: omega[au] * lambda[nm]
OMEGA_NM = 45.563352529
# intensity (W/cm^2) of a field with amplitude 1 au, I = eps0*c*E^2/2
INTENSITY_AU = 3.50944758e16
FS_PER_AU = 2.4188843265857e-2

UNIT_TABLE = {
    "omega_nm": OMEGA_NM,
    "intensity_au_wcm2": INTENSITY_AU,
    "hartree_cm1": HARTREE_TO_CM1,
    "fs_per_au": FS_PER_AU,
}


def _positive(x, name):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError(f"{name} must be strictly positive, got {x!r}")
    return arr


def wavelength_to_omega(wavelength_nm):
    """Photon angular frequency (au) for a wavelength in nm."""
    lam = _positive(wavelength_nm, "wavelength")
    out = OMEGA_NM / lam
    return float(out) if out.ndim == 0 else out


def omega_to_wavelength(omega):
    """Inverse of :func:`wavelength_to_omega`."""
    w = _positive(omega, "omega")
    out = OMEGA_NM / w
    return float(out) if out.ndim == 0 else out


def intensity_to_field(intensity_wcm2):
    """Peak field amplitude (au) for a cycle-averaged intensity in W/cm^2."""
    inten = np.asarray(intensity_wcm2, dtype=float)
    if np.any(inten < 0) or np.any(np.isnan(inten)):
        raise ValueError(f"intensity must be non-negative, got {intensity_wcm2!r}")
    out = np.sqrt(inten / INTENSITY_AU)
    return float(out) if out.ndim == 0 else out


def field_to_intensity(field):
    e = np.asarray(field, dtype=float)
    if np.any(e < 0):
        raise ValueError("field amplitude must be non-negative")
    out = e * e * INTENSITY_AU
    return float(out) if out.ndim == 0 else out


def energy_to_wavenumber(energy):
    """Hartree -> cm^-1."""
    out = np.asarray(energy) * HARTREE_TO_CM1
    return float(out) if np.ndim(out) == 0 else out


def wavenumber_to_energy(wavenumber):
    """cm^-1 -> hartree."""
    out = np.asarray(wavenumber) / HARTREE_TO_CM1
    return float(out) if np.ndim(out) == 0 else out


def au_to_fs(t):
    out = np.asarray(t) * FS_PER_AU
    return float(out) if np.ndim(out) == 0 else out


def fs_to_au(t):
    out = np.asarray(t) / FS_PER_AU
    return float(out) if np.ndim(out) == 0 else out


def gw_to_wcm2(intensity_gw):
    """GW/cm^2 -> W/cm^2; intensities in the CLI are given in GW/cm^2."""
    return intensity_gw * 1e9


assert all(v > 0 and math.isfinite(v) for v in UNIT_TABLE.values())
