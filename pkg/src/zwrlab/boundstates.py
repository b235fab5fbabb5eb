"""Field-free vibrational levels, turning points and local level spacings."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import brentq

from ._quadrature import mapped_nodes

TURNING_XTOL = 1e-10


class BoundStateError(ValueError):
    pass


@dataclass(frozen=True)
class RadialGrid:
    r_min: float
    r_max: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("a radial grid needs at least two points")
        if not self.r_max > self.r_min:
            raise ValueError("r_max must exceed r_min")

    @classmethod
    def power_of_two(cls, r_min, r_max, exponent):
        return cls(r_min, r_max, 2**exponent)

    @property
    def h(self) -> float:
        return (self.r_max - self.r_min) / (self.n - 1)

    @property
    def r(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.n)

    def momenta(self) -> np.ndarray:
        """FFT-ordered wavenumbers conjugate to :attr:`r`."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.h)


DEFAULT_GRID = RadialGrid(4.0, 40.0, 1024)


@dataclass(frozen=True)
class VibrationalState:
    v: int
    energy: float
    grid: RadialGrid
    psi: np.ndarray = field(repr=False)

    def norm(self) -> float:
        return float(np.sum(self.psi**2) * self.grid.h)


@dataclass(frozen=True)
class Curve:
    """A one-dimensional potential on a finite domain.

    ``asymptote`` is the limit for R -> infinity when the curve opens to the
    right (None for a closed well).
    """

    func: Callable
    r_min: float
    r_max: float
    asymptote: float | None = None

    def __call__(self, r):
        return self.func(r)

    def minimum(self, n=8001) -> tuple[float, float]:
        r = np.linspace(self.r_min, self.r_max, n)
        v = self.func(r)
        i = int(np.argmin(v))
        lo, hi = r[max(i - 1, 0)], r[min(i + 1, n - 1)]
        from scipy.optimize import minimize_scalar

        res = minimize_scalar(self.func, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        return float(res.x), float(res.fun)


def fgh_kinetic(grid: RadialGrid, mass: float) -> np.ndarray:
    """Fourier-grid (sinc) kinetic energy matrix."""
    idx = np.arange(grid.n)
    d = idx[:, None] - idx[None, :]
    k = np.pi / grid.h
    with np.errstate(divide="ignore"):
        t = 2.0 * k**2 / np.pi**2 * (-1.0) ** d / np.where(d == 0, 1, d) ** 2
    np.fill_diagonal(t, k**2 / 3.0)
    return t / (2.0 * mass)


def _sign_changes(psi, cut=1e-6):
    big = np.abs(psi) > cut * np.max(np.abs(psi))
    s = np.sign(psi[big])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def eigenstates(curve, grid: RadialGrid = DEFAULT_GRID, n_states: int = 6,
                mass: float | None = None) -> list[VibrationalState]:
    """Lowest ``n_states`` bound levels of ``curve`` by Fourier-grid diagonalization.

    ``curve`` may be a :class:`Curve`, any callable (then ``mass`` is
    required) or anything with ``mass`` and ``v1`` attributes (a
    PotentialSet, whose bound curve V1 is used).
    """
    if mass is None:
        mass = getattr(curve, "mass", None)
        if mass is None:
            raise ValueError("mass is required for a bare curve")
    func = curve.v1 if hasattr(curve, "v1") else curve
    asym = getattr(curve, "v1_asymptote", getattr(curve, "asymptote", None))
    r = grid.r
    h = fgh_kinetic(grid, mass) + np.diag(func(r))
    energies, vecs = eigh(h, subset_by_index=[0, n_states - 1])
    if asym is not None and energies[-1] >= asym:
        n_bound = int(np.count_nonzero(energies < asym))
        raise BoundStateError(f"only {n_bound} bound states below the asymptote")
    states = []
    for v in range(n_states):
        psi = vecs[:, v] / np.sqrt(grid.h)
        # fix the sign: positive first lobe
        i0 = int(np.argmax(np.abs(psi) > 1e-3 * np.max(np.abs(psi))))
        if psi[i0] < 0:
            psi = -psi
        if _sign_changes(psi) != v:
            raise BoundStateError(f"node count check failed for v={v}; grid too coarse")
        states.append(VibrationalState(v, float(energies[v]), grid, psi))
    return states


def _as_curve(curve) -> Curve:
    if isinstance(curve, Curve):
        return curve
    raise TypeError("expected a Curve")


def turning_points(curve: Curve, energy: float) -> tuple[float, float | None]:
    """Left and right classical turning points around the curve minimum.

    The right point is None when ``energy`` lies above the curve's right
    asymptote (open channel) or the curve stays below ``energy`` up to the
    domain edge.
    """
    c = _as_curve(curve)
    r0, vmin = c.minimum()
    if energy < vmin:
        raise ValueError(f"energy {energy} below potential minimum {vmin}")
    if energy == vmin:
        return r0, r0
    f = lambda x: c(x) - energy  # noqa: E731
    left = _bracket_root(f, r0, c.r_min, -1)
    if c.asymptote is not None and energy >= c.asymptote:
        right = None
    else:
        right = _bracket_root(f, r0, c.r_max, +1)
    if left is None:
        raise ValueError("no left turning point inside the domain")
    return left, right


def _bracket_root(f, start, stop, direction, n=4000):
    xs = np.linspace(start, stop, n)
    vals = f(xs)
    hits = np.nonzero(vals > 0)[0]
    if hits.size == 0:
        return None
    i = hits[0]
    if i == 0:
        return float(start)
    a, b = sorted((xs[i - 1], xs[i]))
    return float(brentq(f, a, b, xtol=TURNING_XTOL, rtol=4 * np.finfo(float).eps))


def action(curve: Curve, energy: float, mass: float, a: float | None = None,
           b: float | None = None, order: int = 96) -> float:
    """int_a^b sqrt(2m(energy - V)) dR, turning points by default."""
    if a is None or b is None:
        ta, tb = turning_points(curve, energy)
        a = ta if a is None else a
        b = tb if b is None else b
    r, w = mapped_nodes(a, b, order)
    kin = np.clip(energy - curve(r), 0.0, None)
    return float(np.dot(w, np.sqrt(2.0 * mass * kin)))


def classical_period(curve: Curve, energy: float, mass: float, order: int = 96) -> float:
    a, b = turning_points(curve, energy)
    if b is None:
        raise ValueError("energy not in the bound region")
    r, w = mapped_nodes(a, b, order)
    kin = energy - curve(r)
    # the mapped rule never samples the endpoints, so kin > 0 at the nodes
    kin = np.where(kin > 0, kin, np.finfo(float).tiny)
    return float(2.0 * mass * np.dot(w, 1.0 / np.sqrt(2.0 * mass * kin)))


def local_spacing(curve: Curve, energy: float, mass: float, order: int = 96) -> float:
    """Semiclassical level spacing d(energy)/dv = 2*pi*hbar / period."""
    c = _as_curve(curve)
    _, vmin = c.minimum()
    if energy <= vmin:
        raise ValueError("energy not in the bound region")
    return 2.0 * np.pi / classical_period(c, energy, mass, order)
