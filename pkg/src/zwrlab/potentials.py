"""Two-state diatomic model: diabatic curves, transition dipole, field dressing.

Channel 1 is the bound state V1 (dressed by one photon, V1 + omega), channel 2
the repulsive state V2.  The dressed pair is coupled by -E*mu12/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from . import units

CURVE_HEADER = "# na2-curves v1"
C0_TOLERANCE = 0.01  # bohr; |Rc - Re| below this is a c0 crossing

NA2_REDUCED_MASS = 20963.2195
NA2_RE = 9.79
LAMBDA0_NM = 552.0


class DomainError(ValueError):
    """Evaluation requested outside the tabulated radial domain."""


class NoCrossingError(ValueError):
    """The dressed diabatic curves do not cross inside the domain."""


class CurveFileError(ValueError):
    """Malformed curve file."""


@dataclass(frozen=True)
class ModelParameters:
    """Constants of the calibrated analytic model (atomic units).

    V1(R) = De*[(1 - exp(-alpha*(R - Re)))**2 - 1]
    V2(R) = A*exp(-beta*(R - Re)) + V2inf,  V2inf fixed by V2(Re) - V1(Re) = omega(lambda0)
    mu12(R) = mu0 + mu_bump*exp(-((R - mu_center)/mu_width)**2)
    """

    mass: float = NA2_REDUCED_MASS
    r_e: float = NA2_RE
    lambda0_nm: float = LAMBDA0_NM
    well_depth: float = 1.5e-3
    morse_alpha: float = 0.26
    v2_amplitude: float = 3.0e-3
    v2_beta: float = 0.12
    mu0: float = 4.0
    mu_bump: float = 0.0
    mu_center: float = 9.0
    mu_width: float = 2.0
    r_min: float = 4.0
    r_max: float = 200.0

    @property
    def v2_asymptote(self) -> float:
        omega0 = units.wavelength_to_omega(self.lambda0_nm)
        return omega0 - self.well_depth - self.v2_amplitude


def _checked(r, lo, hi):
    arr = np.asarray(r, dtype=float)
    if np.any(arr < lo - 1e-12) or np.any(arr > hi + 1e-12):
        raise DomainError(f"R outside domain [{lo}, {hi}]")
    return arr


@dataclass(frozen=True)
class PotentialSet:
    """Diabatic curves, dipole and their first derivatives on [r_min, r_max].

    The callables accept scalars or arrays and must not be called outside the
    domain; use :meth:`v1`, :meth:`v2`, :meth:`mu12` which enforce it.
    """

    mass: float
    r_e: float
    r_min: float
    r_max: float
    _v1: Callable = field(repr=False)
    _v2: Callable = field(repr=False)
    _mu12: Callable = field(repr=False)
    _dv1: Callable = field(repr=False)
    _dv2: Callable = field(repr=False)
    v1_asymptote: float = 0.0
    v2_asymptote: float = 0.0
    name: str = "custom"

    def v1(self, r):
        return self._v1(_checked(r, self.r_min, self.r_max))

    def v2(self, r):
        return self._v2(_checked(r, self.r_min, self.r_max))

    def mu12(self, r):
        return self._mu12(_checked(r, self.r_min, self.r_max))

    def dv1(self, r):
        return self._dv1(_checked(r, self.r_min, self.r_max))

    def dv2(self, r):
        return self._dv2(_checked(r, self.r_min, self.r_max))

    def v1_min(self) -> float:
        return float(self.v1(self.r_e))

    def check(self, n: int = 4001) -> None:
        """Verify the structural invariants on a dense grid; raise ValueError."""
        if not self.mass > 0:
            raise ValueError("reduced mass must be positive")
        r = np.linspace(self.r_min, self.r_max, n)
        v1, v2, mu = self.v1(r), self.v2(r), self.mu12(r)
        if not self.r_min < self.r_e < self.r_max:
            raise ValueError("R_e outside domain")
        imin = int(np.argmin(v1))
        if imin in (0, n - 1):
            raise ValueError("V1 has no interior minimum")
        if abs(r[imin] - self.r_e) > 2 * (r[1] - r[0]):
            raise ValueError(f"V1 minimum at {r[imin]:.4f}, expected R_e = {self.r_e}")
        bad = np.nonzero(np.diff(v2) >= 0)[0]
        if bad.size:
            raise ValueError(f"V2 not repulsive near R = {r[bad[0]]:.4f}")
        bad = np.nonzero(mu <= 0)[0]
        if bad.size:
            raise ValueError(f"mu12 not positive near R = {r[bad[0]]:.4f}")


def default_parameters() -> ModelParameters:
    return ModelParameters()


def analytic_model(params: ModelParameters | None = None) -> PotentialSet:
    """Morse well + exponential repulsive curve built from ``params``."""
    p = params or ModelParameters()
    de, a, re = p.well_depth, p.morse_alpha, p.r_e
    amp, beta, v2inf = p.v2_amplitude, p.v2_beta, p.v2_asymptote

    def v1(r):
        y = np.exp(-a * (r - re))
        return de * ((1.0 - y) ** 2 - 1.0)

    def dv1(r):
        y = np.exp(-a * (r - re))
        return 2.0 * de * a * (1.0 - y) * y

    def v2(r):
        return amp * np.exp(-beta * (r - re)) + v2inf

    def dv2(r):
        return -beta * amp * np.exp(-beta * (r - re))

    def mu12(r):
        return p.mu0 + p.mu_bump * np.exp(-(((r - p.mu_center) / p.mu_width) ** 2))

    return PotentialSet(
        mass=p.mass, r_e=re, r_min=p.r_min, r_max=p.r_max,
        _v1=v1, _v2=v2, _mu12=mu12, _dv1=dv1, _dv2=dv2,
        v1_asymptote=0.0, v2_asymptote=v2inf, name="default",
    )


def default_model() -> PotentialSet:
    """The calibrated model every acceptance test is written against."""
    return analytic_model(ModelParameters())


@dataclass(frozen=True)
class FieldPoint:
    """A cw laser condition in lab units with derived atomic-unit values."""

    intensity: float  # W/cm^2
    wavelength: float  # nm

    def __post_init__(self):
        units.intensity_to_field(self.intensity)
        units.wavelength_to_omega(self.wavelength)

    @property
    def field(self) -> float:
        return units.intensity_to_field(self.intensity)

    @property
    def omega(self) -> float:
        return units.wavelength_to_omega(self.wavelength)

    def with_intensity(self, intensity: float) -> "FieldPoint":
        return FieldPoint(intensity, self.wavelength)


def dressed_diabatic(p: PotentialSet, fp: FieldPoint, r):
    """(V1 + omega, V2) at ``r``."""
    return p.v1(r) + fp.omega, p.v2(r)


def adiabatic_potentials(p: PotentialSet, fp: FieldPoint, r):
    """Eigenvalues (V-, V+) of [[V1 + w, -E mu/2], [-E mu/2, V2]]."""
    a, b = dressed_diabatic(p, fp, r)
    coupling = fp.field * p.mu12(r)
    mean = 0.5 * (a + b)
    gap = np.sqrt((a - b) ** 2 + coupling**2)
    return mean - 0.5 * gap, mean + 0.5 * gap


@dataclass(frozen=True)
class CrossingGeometry:
    r_c: float
    kind: str  # "c-", "c0" or "c+"
    slope_difference: float
    gap: float
    energy: float  # diabatic energy V2(R_c)


def _diabatic_difference(p, omega):
    return lambda r: p.v1(r) + omega - p.v2(r)


def find_crossing(p: PotentialSet, fp: FieldPoint, n_scan: int = 20000) -> CrossingGeometry:
    """Crossing where V1 + omega rises through V2, nearest to R_e.

    The dressed well also meets V2 on its inner repulsive wall; that root
    (V1 + omega falling through V2) is not the dissociative crossing and is
    skipped.  Raises NoCrossingError when no rising sign change exists.
    """
    f = _diabatic_difference(p, fp.omega)
    r_hi = min(p.r_max, p.r_e + 60.0)
    r = np.linspace(p.r_min, r_hi, n_scan)
    d = f(r)
    roots = []
    for i in np.nonzero((d[:-1] <= 0) & (d[1:] > 0))[0]:
        roots.append(r[i] if d[i] == 0.0 else _bisect(f, r[i], r[i + 1]))
    if not roots:
        raise NoCrossingError(f"no crossing in domain at {fp.wavelength} nm")
    roots = np.asarray(roots)
    rc = float(roots[np.argmin(np.abs(roots - p.r_e))])
    if abs(rc - p.r_e) < C0_TOLERANCE:
        kind = "c0"
    elif rc < p.r_e:
        kind = "c-"
    else:
        kind = "c+"
    df = abs(float(p.dv1(rc) - p.dv2(rc)))
    return CrossingGeometry(rc, kind, df, fp.field * float(p.mu12(rc)), float(p.v2(rc)))


def _bisect(f, a, b, tol=1e-12):
    fa = f(a)
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0 or b - a < tol:
            return m
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def write_curve_file(path, r, v1, v2, mu12) -> None:
    data = np.column_stack([r, v1, v2, mu12])
    with open(path, "w") as fh:
        fh.write(CURVE_HEADER + "\n")
        fh.write("# R V1 V2 mu12 (atomic units)\n")
        np.savetxt(fh, data, fmt="%.17e")


def load_tabulated(path, mass: float = NA2_REDUCED_MASS, r_e: float | None = None,
                   name: str | None = None) -> PotentialSet:
    """Read a "# na2-curves v1" file and spline it (natural end conditions)."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != CURVE_HEADER:
        raise CurveFileError(f"{path}: first line must be '{CURVE_HEADER}'")
    rows = []
    for lineno, line in enumerate(lines, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        cols = body.split()
        if len(cols) < 4:
            raise CurveFileError(f"{path}:{lineno}: missing column (need R V1 V2 mu12)")
        try:
            rows.append((lineno, [float(c) for c in cols[:4]]))
        except ValueError as exc:
            raise CurveFileError(f"{path}:{lineno}: {exc}") from None
    if len(rows) < 10:
        raise CurveFileError(f"{path}: domain too small ({len(rows)} rows, need >= 10)")
    linenos = [n for n, _ in rows]
    data = np.array([vals for _, vals in rows])
    r = data[:, 0]
    bad = np.nonzero(np.diff(r) <= 0)[0]
    if bad.size:
        raise CurveFileError(f"{path}:{linenos[bad[0] + 1]}: R not strictly increasing")
    bad = np.nonzero(data[:, 3] <= 0)[0]
    if bad.size:
        raise CurveFileError(f"{path}:{linenos[bad[0]]}: mu12 must be positive")
    bad = np.nonzero(np.diff(data[:, 2]) >= 0)[0]
    if bad.size:
        raise CurveFileError(f"{path}:{linenos[bad[0] + 1]}: V2 is not repulsive")
    s1 = CubicSpline(r, data[:, 1], bc_type="natural", extrapolate=False)
    s2 = CubicSpline(r, data[:, 2], bc_type="natural", extrapolate=False)
    smu = CubicSpline(r, data[:, 3], bc_type="natural", extrapolate=False)
    d1, d2 = s1.derivative(), s2.derivative()
    if r_e is None:
        i = int(np.argmin(data[:, 1]))
        if i in (0, len(r) - 1):
            raise CurveFileError(f"{path}: V1 has no interior minimum")
        from scipy.optimize import brentq

        r_e = float(brentq(d1, r[i - 1], r[i + 1])) if d1(r[i - 1]) * d1(r[i + 1]) < 0 else float(r[i])
    ps = PotentialSet(
        mass=mass, r_e=float(r_e), r_min=float(r[0]), r_max=float(r[-1]),
        _v1=s1, _v2=s2, _mu12=smu, _dv1=d1, _dv2=d2,
        v1_asymptote=float(data[-1, 1]), v2_asymptote=float(data[-1, 2]),
        name=name or path.stem,
    )
    try:
        ps.check()
    except ValueError as exc:
        raise CurveFileError(f"{path}: {exc}") from None
    return ps
