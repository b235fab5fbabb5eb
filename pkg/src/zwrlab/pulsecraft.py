"""Chirped pulses that ride a ZWR path, and the adiabatic survival estimate.

The envelope rises with a sine-squared ramp at the path's first wavelength,
walks the path linearly in wavelength during the plateau and falls with a
mirrored ramp.  The carrier phase accumulates the instantaneous frequency,
so the field is sqrt(I(t)) cos(phi(t)) with phi' = omega(lambda(t)).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import units

POINTS_PER_PERIOD = 20
WIDTH_SAMPLES = 200


class PulseError(ValueError):
    pass


@dataclass(frozen=True)
class Pulse:
    t: np.ndarray  # au
    intensity: np.ndarray  # W/cm2
    wavelength: np.ndarray  # nm
    phase: np.ndarray  # rad

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def duration(self) -> float:
        return float(self.t[-1])

    @property
    def amplitude(self) -> np.ndarray:
        return units.intensity_to_field(self.intensity)

    @property
    def field(self) -> np.ndarray:
        return self.amplitude * np.cos(self.phase)

    @property
    def omega(self) -> np.ndarray:
        return units.wavelength_to_omega(self.wavelength)

    def field_at(self, t: float) -> float:
        return float(np.interp(t, self.t, self.field))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t_au", "intensity_wcm2", "lambda_nm", "field_au"])
            for row in zip(self.t, self.intensity, self.wavelength, self.field):
                w.writerow([f"{x:.12e}" for x in row])


def schedule(path_lambdas, path_intensities, ramp: float, plateau: float):
    """Envelope and wavelength as functions of time (vectorized callables)."""
    lam = np.asarray(path_lambdas, float)
    inten = np.asarray(path_intensities, float)
    if lam.size == 0:
        raise PulseError("empty ZWR path")
    order = np.argsort(lam)
    lam, inten = lam[order], inten[order]
    lam_a, lam_b = lam[0], lam[-1]
    tau = 2.0 * ramp + plateau

    def wavelength(t):
        t = np.asarray(t, float)
        if plateau <= 0 or lam.size == 1:
            return np.full_like(t, lam_a)
        s = np.clip((t - ramp) / plateau, 0.0, 1.0)
        return lam_a + s * (lam_b - lam_a)

    def envelope(t):
        t = np.asarray(t, float)
        on_path = np.interp(wavelength(t), lam, inten) if lam.size > 1 else np.full_like(t, inten[0])
        rise = np.sin(0.5 * np.pi * np.clip(t / ramp, 0.0, 1.0)) ** 2 if ramp > 0 else 1.0
        fall = np.sin(0.5 * np.pi * np.clip((tau - t) / ramp, 0.0, 1.0)) ** 2 if ramp > 0 else 1.0
        return on_path * rise * fall

    return envelope, wavelength, tau


def build_pulse(path, ramp: float, plateau: float, dt: float) -> Pulse:
    """Pulse following ``path`` (a ZwrPath or a sequence of (lambda, I) pairs).

    ``ramp``, ``plateau`` and ``dt`` are in atomic time units.
    """
    pts = _path_pairs(path)
    envelope, wavelength, tau = schedule([a for a, _ in pts], [b for _, b in pts], ramp, plateau)
    period = 2.0 * np.pi / units.wavelength_to_omega(min(a for a, _ in pts))
    if dt <= 0 or dt > period / POINTS_PER_PERIOD:
        raise PulseError(f"dt = {dt} au does not resolve the optical period ({period:.4g} au) "
                         f"with {POINTS_PER_PERIOD} points")
    if tau <= 0:
        raise PulseError("pulse has zero duration")
    n = int(np.ceil(tau / dt))
    t = np.linspace(0.0, tau, n + 1)
    lam = wavelength(t)
    inten = envelope(t)
    inten[0] = inten[-1] = 0.0
    phase = cumulative_trapezoid(units.wavelength_to_omega(lam), t, initial=0.0)
    return Pulse(t, inten, lam, phase)


def _path_pairs(path):
    if hasattr(path, "points"):
        return [(q.wavelength, q.intensity) for q in path.points]
    return [(float(a), float(b)) for a, b in path]


# -- survival ------------------------------------------------------------------------

@dataclass(frozen=True)
class SurvivalEstimate:
    t: np.ndarray
    labels: tuple
    curves: np.ndarray  # shape (len(labels), len(t))

    @property
    def final(self) -> dict:
        return {v: float(c[-1]) for v, c in zip(self.labels, self.curves)}


def survival(t_samples, widths, labels, t_eval=None) -> SurvivalEstimate:
    """P_v(t) = exp(-int_0^t Gamma_v dt') from sampled widths (au).

    ``widths`` has one row per label, sampled at ``t_samples``; the result is
    interpolated linearly onto ``t_eval`` (defaults to the samples).
    """
    ts = np.asarray(t_samples, float)
    g = np.atleast_2d(np.asarray(widths, float))
    if g.shape != (len(labels), ts.size):
        raise ValueError("widths must have shape (n_labels, n_samples)")
    if not np.all(np.isfinite(g)):
        raise ValueError("unconverged width samples")
    te = ts if t_eval is None else np.asarray(t_eval, float)
    gi = np.array([np.interp(te, ts, row) for row in g])
    # decay only: tiny negative solver noise must not produce growth
    expo = cumulative_trapezoid(np.clip(gi, 0.0, None), te, axis=1, initial=0.0)
    return SurvivalEstimate(te, tuple(labels), np.exp(-expo))


def width_samples(pulse: Pulse, n: int = WIDTH_SAMPLES):
    """Decimated (t, I, lambda) at which to evaluate the Floquet widths."""
    t = np.linspace(pulse.t[0], pulse.t[-1], n)
    return t, np.interp(t, pulse.t, pulse.intensity), np.interp(t, pulse.t, pulse.wavelength)


def sample_widths(p, pulse: Pulse, labels, n: int = WIDTH_SAMPLES, grid=None):
    """Gamma_v (au) along the pulse schedule, one row per label.

    Each resonance is continued from its decoupled position at the first
    sample through the decimated (I, lambda) sequence.
    """
    from .floquet import continue_along, dressed_levels, numerov_grid
    from .potentials import FieldPoint

    grid = grid or numerov_grid(p)
    t, inten, lam = width_samples(pulse, n)
    points = [FieldPoint(float(i), float(w)) for i, w in zip(inten, lam)]
    rows = []
    start = FieldPoint(0.0, float(lam[0]))
    levels = dressed_levels(p, start, max(labels) + 1)
    for v in labels:
        track = continue_along(p, points, levels[v], start, grid=grid, label=v)
        rows.append([-2.0 * r.energy.imag for r in track])
    return t, np.array(rows)


def read_pulse_csv(path) -> Pulse:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    t, inten, lam = data[:, 0], data[:, 1], data[:, 2]
    phase = cumulative_trapezoid(units.wavelength_to_omega(lam), t, initial=0.0)
    return Pulse(t, inten, lam, phase)
