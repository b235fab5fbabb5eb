"""Width scans, dip refinement and ZWR path continuation in the (I, lambda) plane."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import units
from .boundstates import RadialGrid
from .floquet import SiegertError, continue_along, dressed_levels, numerov_grid
from .potentials import FieldPoint, NoCrossingError, PotentialSet, find_crossing

log = logging.getLogger(__name__)

ZWR_THRESHOLD_CM1 = 1e-4
REFINE_RTOL = 1e-6
MAX_FAIL_FRACTION = 0.1
MIN_LAMBDA_STEP = 0.01
GOLDEN = 0.5 * (np.sqrt(5.0) - 1.0)


class ScanError(RuntimeError):
    """Too many unconverged samples in a width scan."""


class ShallowDipError(RuntimeError):
    """The refined minimum stays above the ZWR threshold."""

    def __init__(self, point: "ZwrPoint"):
        super().__init__(f"shallow dip at I = {point.intensity:.6g} W/cm2: "
                         f"Gamma = {point.gamma_cm1:.3g} cm-1")
        self.point = point


@dataclass(frozen=True)
class WidthScan:
    wavelength: float
    label: int
    intensities: np.ndarray
    energies: np.ndarray  # complex, NaN where the solve failed

    def __post_init__(self):
        if np.any(np.diff(self.intensities) <= 0):
            raise ValueError("scan intensities must increase strictly")

    @property
    def converged(self) -> np.ndarray:
        return np.isfinite(self.energies)

    @property
    def gamma_cm1(self) -> np.ndarray:
        return units.energy_to_wavenumber(-2.0 * self.energies.imag)

    def rows(self):
        """(lambda_nm, intensity_wcm2, gamma_cm1, reE_au, converged) per sample."""
        g = self.gamma_cm1
        for i, e in enumerate(self.energies):
            yield self.wavelength, self.intensities[i], g[i], e.real, bool(np.isfinite(e))


@dataclass(frozen=True)
class Bracket:
    """Three intensities around a width minimum plus the resonance energies there."""

    i_left: float
    i_min: float
    i_right: float
    energies: tuple = field(default=(), compare=False, repr=False)

    def __iter__(self):
        return iter((self.i_left, self.i_min, self.i_right))


@dataclass(frozen=True)
class ZwrPoint:
    wavelength: float
    intensity: float
    gamma_cm1: float
    label: int
    energy: complex
    v_plus: int | None = None  # None = unassigned
    crossing: str = "none"

    @property
    def assignment(self) -> str:
        return "unassigned" if self.v_plus is None else str(self.v_plus)


@dataclass
class ZwrPath:
    label: int
    points: list = field(default_factory=list)
    dead_ends: list = field(default_factory=list)

    def sorted(self) -> "ZwrPath":
        return ZwrPath(self.label, sorted(self.points, key=lambda q: q.wavelength), self.dead_ends)

    @property
    def wavelengths(self) -> np.ndarray:
        return np.array([q.wavelength for q in self.points])

    @property
    def intensities(self) -> np.ndarray:
        return np.array([q.intensity for q in self.points])

    def slopes(self) -> np.ndarray:
        """dI/dlambda per consecutive segment (W/cm2 per nm), in lambda order."""
        s = self.sorted()
        return np.diff(s.intensities) / np.diff(s.wavelengths)

    def slope_signs(self) -> list[int]:
        return [int(np.sign(x)) for x in self.slopes()]

    def __len__(self):
        return len(self.points)


# -- scans ---------------------------------------------------------------------------

def sample_intensities(i_range, n_samples: int, spacing: str = "log") -> np.ndarray:
    lo, hi = map(float, i_range)
    if not (0.0 <= lo < hi):
        raise ValueError(f"empty intensity range {i_range}")
    if n_samples < 20:
        raise ValueError("a width scan needs at least 20 samples")
    if spacing == "log":
        lo = lo if lo > 0 else hi * 1e-3
        return np.geomspace(lo, hi, n_samples)
    if spacing == "linear":
        return np.linspace(lo, hi, n_samples + 1)[1:] if lo == 0 else np.linspace(lo, hi, n_samples)
    raise ValueError(f"unknown spacing {spacing!r}")


def scan_intensity(p: PotentialSet, wavelength: float, i_range, v: int, n_samples: int = 60,
                   spacing: str = "log", grid: RadialGrid | None = None) -> WidthScan:
    """Gamma(I) of the resonance born from level ``v``, warm-started from I = 0."""
    grid = grid or numerov_grid(p)
    intens = sample_intensities(i_range, n_samples, spacing)
    e0 = dressed_levels(p, FieldPoint(0.0, wavelength), v + 1)[v]
    energies = np.full(len(intens), np.nan + 0j)
    start, e_cur = FieldPoint(0.0, wavelength), complex(e0)
    fails = 0
    for i, inten in enumerate(intens):
        fp = FieldPoint(float(inten), wavelength)
        try:
            res = continue_along(p, [fp], e_cur, start, grid=grid, label=v)[0]
        except SiegertError as exc:
            fails += 1
            log.debug("scan sample failed at %s: %s", fp, exc)
            if fails > MAX_FAIL_FRACTION * len(intens):
                raise ScanError(f"more than {MAX_FAIL_FRACTION:.0%} of samples failed "
                                f"at lambda = {wavelength} nm") from exc
            continue
        energies[i] = res.energy
        start, e_cur = fp, res.energy
    return WidthScan(float(wavelength), v, intens, energies)


def find_dips(scan: WidthScan) -> list[Bracket]:
    """Interior local minima of log Gamma over converged samples."""
    ok = np.nonzero(scan.converged)[0]
    if ok.size < 3:
        return []
    g = np.log(np.maximum(np.abs(scan.gamma_cm1[ok]), 1e-300))
    out = []
    for j in range(1, ok.size - 1):
        if g[j] < g[j - 1] and g[j] < g[j + 1]:
            a, b, c = ok[j - 1], ok[j], ok[j + 1]
            out.append(Bracket(float(scan.intensities[a]), float(scan.intensities[b]),
                               float(scan.intensities[c]),
                               (scan.energies[a], scan.energies[b], scan.energies[c])))
    return out


# -- refinement ----------------------------------------------------------------------

class _WidthFunction:
    """Gamma(I) at fixed wavelength, warm-started from the nearest solved point."""

    def __init__(self, p, wavelength, anchors, grid):
        self.p, self.wavelength, self.grid = p, wavelength, grid
        self.known = dict(anchors)  # intensity -> complex energy

    def energy(self, inten: float) -> complex:
        keys = np.array(sorted(self.known))
        j = int(np.argmin(np.abs(np.log(keys / inten))))
        start = FieldPoint(float(keys[j]), self.wavelength)
        res = continue_along(self.p, [FieldPoint(inten, self.wavelength)], self.known[keys[j]],
                             start, grid=self.grid, max_halvings=14)[0]
        self.known[inten] = res.energy
        return res.energy

    def __call__(self, inten: float) -> float:
        return abs(-2.0 * self.energy(inten).imag)


def golden_minimize(f, a: float, b: float, rtol: float = REFINE_RTOL):
    """Golden-section minimum of ``f`` on [a, b]; returns (x, f(x))."""
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > rtol * 0.5 * (a + b):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def refine_zwr(p: PotentialSet, wavelength: float, bracket: Bracket, v: int,
               threshold_cm1: float = ZWR_THRESHOLD_CM1, grid: RadialGrid | None = None,
               assign: bool = False) -> ZwrPoint:
    """Golden-section minimum of Gamma(I) inside ``bracket``.

    Raises :class:`ShallowDipError` (carrying the achieved minimum) when the
    minimum stays above ``threshold_cm1``.
    """
    grid = grid or numerov_grid(p)
    anchors = [(float(i), complex(e)) for i, e in zip(bracket, bracket.energies) if np.isfinite(e)]
    if not anchors:
        e0 = dressed_levels(p, FieldPoint(0.0, wavelength), v + 1)[v]
        anchors = [(float(bracket.i_min),
                    continue_along(p, [FieldPoint(bracket.i_min, wavelength)], e0,
                                   FieldPoint(0.0, wavelength), grid=grid)[0].energy)]
    width = _WidthFunction(p, wavelength, anchors, grid)
    x, g = golden_minimize(width, bracket.i_left, bracket.i_right)
    e = width.energy(x)
    point = ZwrPoint(float(wavelength), float(x), units.energy_to_wavenumber(g), v, e,
                     crossing=crossing_tag(p, FieldPoint(x, wavelength)))
    if assign:
        point = assign_v_plus(p, point)
    if not point.gamma_cm1 < threshold_cm1:
        raise ShallowDipError(point)
    return point


def crossing_tag(p: PotentialSet, fp: FieldPoint) -> str:
    try:
        return find_crossing(p, fp).kind
    except NoCrossingError:
        return "none"


def assign_v_plus(p: PotentialSet, point: ZwrPoint, max_v_plus: int | None = None) -> ZwrPoint:
    """Attach the V+ level nearest the modified diabatic level, when valid."""
    from dataclasses import replace

    from . import semiclassical as sc

    fp = FieldPoint(point.intensity, point.wavelength)
    try:
        curves = sc.DressedCurves(p, fp)
        eps = curves.tilde_level(point.label)
        if not sc.validity(p, fp, eps).valid:
            return point
        best, gap = None, np.inf
        for vp in range(0, (point.label if max_v_plus is None else max_v_plus) + 1):
            try:
                d = abs(curves.plus_level(vp) - eps)
            except sc.SemiclassicalError:
                break
            if d < gap:
                best, gap = vp, d
        return replace(point, v_plus=best)
    except (sc.SemiclassicalError, NoCrossingError, ValueError):
        return point


# -- path continuation ---------------------------------------------------------------

def locate_minimum(p: PotentialSet, wavelength: float, i_guess: float, e_guess: complex,
                   e_from: FieldPoint, v: int, grid: RadialGrid, rel: float = 0.05,
                   max_expand: int = 5, threshold_cm1: float = ZWR_THRESHOLD_CM1) -> ZwrPoint:
    """Refine the ZWR nearest ``i_guess`` at a new wavelength.

    The resonance is first carried from ``e_from`` to (i_guess, wavelength);
    a three-point bracket around i_guess is widened until its middle value is
    the smallest.
    """
    res = continue_along(p, [FieldPoint(i_guess, wavelength)], e_guess, e_from, grid=grid,
                         max_halvings=14, label=v)[0]
    width = _WidthFunction(p, wavelength, [(i_guess, res.energy)], grid)
    lo, mid, hi = i_guess * (1 - rel), i_guess, i_guess * (1 + rel)
    glo, gmid, ghi = width(lo), width(mid), width(hi)
    for _ in range(max_expand):
        if gmid <= glo and gmid <= ghi:
            break
        step = hi - lo
        if glo < gmid:
            hi, ghi, mid, gmid = mid, gmid, lo, glo
            lo = max(mid - step, 0.5 * mid)
            glo = width(lo)
        else:
            lo, glo, mid, gmid = mid, gmid, hi, ghi
            hi = mid + step
            ghi = width(hi)
    else:
        raise ShallowDipError(ZwrPoint(wavelength, mid, units.energy_to_wavenumber(gmid), v,
                                       width.energy(mid)))
    x, g = golden_minimize(width, lo, hi)
    point = ZwrPoint(float(wavelength), float(x), units.energy_to_wavenumber(g), v, width.energy(x),
                     crossing=crossing_tag(p, FieldPoint(x, wavelength)))
    if not point.gamma_cm1 < threshold_cm1:
        raise ShallowDipError(point)
    return point


def trace_path(p: PotentialSet, seed: ZwrPoint, lambda_step: float, lambda_limits, v: int | None = None,
               grid: RadialGrid | None = None, assign: bool = False,
               max_jump: float = 0.5) -> ZwrPath:
    """Continue a ZWR from ``seed`` toward both wavelength limits.

    The step is halved after a failed refinement (down to 0.01 nm); a branch
    ends at the limit or after two consecutive failures at the minimum step.
    Consecutive points may differ by at most ``max_jump`` in relative intensity.
    """
    if not seed.gamma_cm1 < ZWR_THRESHOLD_CM1:
        raise ValueError("seed is not an accepted ZWR")
    v = seed.label if v is None else v
    grid = grid or numerov_grid(p)
    lo_lim, hi_lim = sorted(map(float, lambda_limits))
    path = ZwrPath(v, [seed])
    for direction, limit in ((+1, hi_lim), (-1, lo_lim)):
        cur, prev = seed, None
        step = float(lambda_step)
        fails = 0
        while direction * (limit - cur.wavelength) > 1e-9:
            lam = cur.wavelength + direction * min(step, abs(limit - cur.wavelength))
            i_guess = cur.intensity
            if prev is not None:
                slope = (cur.intensity - prev.intensity) / (cur.wavelength - prev.wavelength)
                i_guess = max(cur.intensity + slope * (lam - cur.wavelength), 0.5 * cur.intensity)
            try:
                nxt = locate_minimum(p, lam, i_guess, cur.energy,
                                     FieldPoint(cur.intensity, cur.wavelength), v, grid)
                if abs(nxt.intensity - cur.intensity) > max_jump * cur.intensity:
                    raise ShallowDipError(nxt)
            except (SiegertError, ShallowDipError) as exc:
                log.debug("path step to %.4f nm failed: %s", lam, exc)
                if step <= MIN_LAMBDA_STEP + 1e-12:
                    fails += 1
                    if fails >= 2:
                        path.dead_ends.append(cur)
                        break
                step = max(0.5 * step, MIN_LAMBDA_STEP)
                continue
            fails = 0
            if assign:
                nxt = assign_v_plus(p, nxt)
            path.points.append(nxt)
            prev, cur = cur, nxt
            step = float(lambda_step)
    return path.sorted()
