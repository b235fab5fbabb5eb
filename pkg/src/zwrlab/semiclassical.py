"""Two-channel phase-integral model of zero-width resonances.

Two Bohr-Sommerfeld conditions must hold at the same energy for the
outgoing amplitude in the lower adiabatic channel to vanish:

* the modified diabatic well W(R) = V-(R) for R <= Rc, V+(R) beyond,
  quantized as  int k dR = (n + 1/2) pi                  -> eps_tilde(n)
* the upper adiabatic well V+,  int k+ dR + chi = (n+ + 1/2) pi  -> eps_plus(n+)

The width estimate combines their mismatch with the Landau-Zener parameter
nu and the local level spacings of both wells.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import units
from ._quadrature import mapped_nodes
from .boundstates import Curve, local_spacing, turning_points
from .potentials import (CrossingGeometry, FieldPoint, NoCrossingError, PotentialSet,
                         adiabatic_potentials, find_crossing)

CHI_WEAK = -0.25 * np.pi
ENERGY_XTOL = 1e-12
PHASE_TOL = 1e-6
QUAD_ORDER = 96


class SemiclassicalError(ValueError):
    """Requested level or geometry not supported by the semiclassical model."""


@dataclass(frozen=True)
class SemiclassicalGeometry:
    r_minus: float  # left turning point of V-
    r_plus: float  # left turning point of V+
    r_c: float
    r_t: float  # right turning point of V+
    crossing_reached: bool
    valid: bool


@dataclass(frozen=True)
class CoincidencePair:
    eps_tilde: float
    eps_plus: float
    v_tilde: int
    v_plus: int
    chi: float

    @property
    def mismatch(self) -> float:
        return self.eps_tilde - self.eps_plus


@dataclass(frozen=True)
class SemiclassicalWidth:
    gamma: float
    nu: float
    omega_d: float
    omega_plus: float
    mismatch: float
    pair: CoincidencePair | None = None

    @property
    def gamma_cm1(self) -> float:
        return units.energy_to_wavenumber(self.gamma)


def phase_integral(k, a: float, b: float, order: int = QUAD_ORDER) -> float:
    """int_a^b k(R) dR for a wavenumber function with sqrt zeros at the ends.

    ``k`` returns k^2 < 0 as NaN-free negative input is not allowed: pass a
    function returning the squared wavenumber via :func:`wavenumber` or any
    callable returning k >= 0.  Interior forbidden points raise.
    """
    if b < a:
        raise ValueError("phase_integral needs a <= b")
    if b == a:
        return 0.0
    r, w = mapped_nodes(a, b, order)
    vals = k(r)
    if np.any(np.isnan(vals)):
        raise SemiclassicalError("classically forbidden point inside the interval")
    return float(np.dot(w, vals))


def wavenumber(curve, energy: float, mass: float, slack: float = 1e-9):
    """k(R) = sqrt(2m(energy - V(R))); tiny negative kinetic energy is clipped,
    anything below -slack*|scale| is reported as forbidden (NaN)."""

    def k(r):
        kin = energy - curve(r)
        scale = max(abs(energy), 1e-3)
        bad = kin < -slack * scale
        out = np.sqrt(2.0 * mass * np.clip(kin, 0.0, None))
        return np.where(bad, np.nan, out)

    return k


class DressedCurves:
    """V-, V+ and the modified diabatic curve at one field point."""

    def __init__(self, p: PotentialSet, fp: FieldPoint, crossing: CrossingGeometry | None = None):
        self.p = p
        self.fp = fp
        self.crossing = crossing or find_crossing(p, fp)
        rc = self.crossing.r_c
        self.r_c = rc
        lo, hi = p.r_min, min(p.r_max, p.r_e + 40.0)

        def vminus(r):
            return adiabatic_potentials(p, fp, r)[0]

        def vplus(r):
            return adiabatic_potentials(p, fp, r)[1]

        def vtilde(r):
            lower, upper = adiabatic_potentials(p, fp, r)
            return np.where(np.asarray(r) <= rc, lower, upper)

        self.v_minus = Curve(vminus, lo, hi, asymptote=float(p.v2_asymptote))
        self.v_plus = Curve(vplus, lo, hi)
        self.v_tilde = Curve(vtilde, lo, hi)
        self.mass = p.mass

    # -- actions -----------------------------------------------------------------
    def tilde_action(self, energy: float) -> float:
        """Action of the modified diabatic well, split at R_c."""
        return self._well_action(self.v_tilde, energy)

    def plus_action(self, energy: float) -> float:
        return self._well_action(self.v_plus, energy)

    def _well_action(self, curve, energy):
        a, b = turning_points(curve, energy)
        if b is None:
            raise SemiclassicalError("energy above the well")
        # kinetic energy clipped at zero: a blocked jump at Rc contributes nothing
        k = wavenumber(curve, energy, self.mass, slack=np.inf)
        if a < self.r_c < b:
            return phase_integral(k, a, self.r_c) + phase_integral(k, self.r_c, b)
        return phase_integral(k, a, b)

    def _solve(self, action, curve, target: float) -> float:
        _, emin = curve.minimum()
        top = self._well_top(curve)
        f = lambda e: action(e) - target  # noqa: E731
        lo = emin + 1e-14 * max(1.0, abs(emin))
        # walk up from the bottom so the bracket stays inside the well
        grid = emin + (top - emin) * (1.0 - np.geomspace(1.0, 1e-6, 32))
        grid[0] = lo
        prev = f(grid[0])
        for a, b in zip(grid[:-1], grid[1:]):
            cur = f(b)
            if prev <= 0.0 <= cur:
                e = float(brentq(f, a, b, xtol=ENERGY_XTOL, rtol=1e-15))
                # the action jumps where the turning point hops across Rc;
                # a sign change there is not a level
                if abs(f(e)) > PHASE_TOL:
                    raise SemiclassicalError("quantization falls on the jump at Rc")
                return e
            prev = cur
        raise SemiclassicalError("level not supported by the well")

    def _well_top(self, curve) -> float:
        """Lowest energy at which the well stops confining on the right."""
        r0, _ = curve.minimum()
        r = np.linspace(r0, curve.r_max, 4000)
        v = curve(r)
        return float(np.max(v))

    def tilde_level(self, v_tilde: int) -> float:
        return self._solve(self.tilde_action, self.v_tilde, (v_tilde + 0.5) * np.pi)

    def plus_level(self, v_plus: int, chi: float = CHI_WEAK) -> float:
        return self._solve(self.plus_action, self.v_plus, (v_plus + 0.5) * np.pi - chi)


def _curves(p, fp):
    try:
        return DressedCurves(p, fp)
    except NoCrossingError as exc:
        raise SemiclassicalError(str(exc)) from None


def solve_tilde_level(p: PotentialSet, fp: FieldPoint, v_tilde: int) -> float:
    """Energy of level ``v_tilde`` of the modified diabatic well."""
    return _curves(p, fp).tilde_level(v_tilde)


def solve_plus_level(p: PotentialSet, fp: FieldPoint, v_plus: int, chi: float = CHI_WEAK) -> float:
    """Energy of level ``v_plus`` of V+ with the extra phase ``chi``."""
    return _curves(p, fp).plus_level(v_plus, chi)


def coincidence_pair(p, fp, v: int, v_plus: int, chi: float = CHI_WEAK,
                     curves: DressedCurves | None = None) -> CoincidencePair:
    c = curves or _curves(p, fp)
    return CoincidencePair(c.tilde_level(v), c.plus_level(v_plus, chi), v, v_plus, chi)


def landau_zener_nu(p: PotentialSet, fp: FieldPoint, energy: float,
                    crossing: CrossingGeometry | None = None) -> float:
    """nu = mu12(Rc)^2 E^2 / (hbar vbar |dF|) with vbar the classical speed at Rc."""
    cr = crossing or find_crossing(p, fp)
    kin = energy - cr.energy
    if kin <= 0:
        raise SemiclassicalError("crossing not classically reached at this energy")
    vbar = np.sqrt(2.0 * kin / p.mass)
    mu = float(p.mu12(cr.r_c))
    return mu * mu * fp.field**2 / (vbar * cr.slope_difference)


def width_formula(nu, omega_d, omega_plus, mismatch):
    x = np.expm1(2.0 * np.pi * nu)
    return 2.0 * np.pi * np.exp(2.0 * np.pi * nu) * x * omega_d * omega_plus \
        / (omega_plus + x * omega_d) ** 3 * mismatch**2


def width(p: PotentialSet, fp: FieldPoint, v: int, v_plus: int, chi: float = CHI_WEAK,
          spacing_at: str = "own") -> SemiclassicalWidth:
    """Semiclassical resonance width from the level mismatch.

    ``spacing_at="own"`` evaluates each local spacing at its own level,
    ``"midpoint"`` evaluates both at the mean of the two energies.
    """
    c = _curves(p, fp)
    pair = coincidence_pair(p, fp, v, v_plus, chi, curves=c)
    if spacing_at == "own":
        ed, ep = pair.eps_tilde, pair.eps_plus
    elif spacing_at == "midpoint":
        ed = ep = 0.5 * (pair.eps_tilde + pair.eps_plus)
    else:
        raise ValueError(f"unknown spacing_at={spacing_at!r}")
    omega_d = local_spacing(c.v_tilde, ed, p.mass)
    omega_p = local_spacing(c.v_plus, ep, p.mass)
    if fp.field == 0.0:
        nu = 0.0
    else:
        nu = landau_zener_nu(p, fp, pair.eps_tilde, c.crossing)
    g = width_formula(nu, omega_d, omega_p, pair.mismatch)
    return SemiclassicalWidth(float(g), float(nu), omega_d, omega_p, pair.mismatch, pair)


def validity(p: PotentialSet, fp: FieldPoint, energy: float) -> SemiclassicalGeometry:
    """Turning-point ordering R- < R+ < Rc < Rt and classical reach of Rc."""
    c = _curves(p, fp)
    rc = c.r_c
    nan = float("nan")
    try:
        r_minus = turning_points(_left_branch(c.v_minus, rc), energy)[0]
    except ValueError:
        r_minus = nan
    try:
        r_plus, r_t = turning_points(c.v_plus, energy)
    except ValueError:
        r_plus, r_t = nan, nan
    r_t = nan if r_t is None else r_t
    reached = bool(energy > c.crossing.energy)
    ordered = bool(r_minus < r_plus < rc < r_t)
    return SemiclassicalGeometry(r_minus, r_plus, rc, r_t, reached, ordered and reached)


def _left_branch(curve: Curve, rc: float) -> Curve:
    """V- restricted to R <= Rc (its well side); beyond Rc it is held flat."""
    vc = float(curve(rc))

    def f(r):
        r = np.asarray(r)
        return np.where(r <= rc, curve(np.minimum(r, rc)), vc + (r - rc) * 1e-3)

    return Curve(f, curve.r_min, curve.r_max)


def mismatch(p, fp, v, v_plus, chi=CHI_WEAK) -> float:
    return coincidence_pair(p, fp, v, v_plus, chi).mismatch


def predict_zwr(p: PotentialSet, v: int, v_plus: int, wavelengths, i_max: float = 2e9,
                i_min: float = 1e6, n_bracket: int = 40, chi: float = CHI_WEAK):
    """Intensities where eps_tilde(v) = eps_plus(v_plus), per wavelength.

    Returns a list of (wavelength_nm, intensity_wcm2) in input order; an
    empty list when no coincidence exists in the window.
    """
    out = []
    grid = np.geomspace(i_min, i_max, n_bracket)
    for lam in wavelengths:
        vals = []
        for inten in grid:
            try:
                vals.append(mismatch(p, FieldPoint(inten, lam), v, v_plus, chi))
            except SemiclassicalError:
                vals.append(np.nan)
        vals = np.array(vals)
        for i in range(len(grid) - 1):
            a, b = vals[i], vals[i + 1]
            if np.isfinite(a) and np.isfinite(b) and a * b < 0:
                f = lambda x: mismatch(p, FieldPoint(np.exp(x), lam), v, v_plus, chi)  # noqa: E731
                try:
                    x = brentq(f, np.log(grid[i]), np.log(grid[i + 1]), xtol=1e-12)
                except (SemiclassicalError, ValueError):
                    continue
                out.append((float(lam), float(np.exp(x))))
    return out
