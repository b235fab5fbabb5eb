"""Two-channel Floquet resonances (photon blocks n = 0, 1).

Channel 1 carries V1 + omega, channel 2 carries V2, the coupling is
-E mu12 / 2.  Resonances are Siegert states: regular at R_min, decaying in
the closed and outgoing in the open asymptotic channel.  The primary solver
shoots with the renormalized Numerov method and drives the matching
determinant to zero by complex secant iteration; :func:`cap_solve` is an
independent grid diagonalization with a complex absorbing potential.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from . import units
from ._numerov import inward_ratio, outward_ratio
from .boundstates import RadialGrid, eigenstates, fgh_kinetic
from .potentials import FieldPoint, PotentialSet

log = logging.getLogger(__name__)

MAX_ITER = 60
E_TOL = 1e-12
GAMMA_TOL = 1e-12  # tolerated positive Im E (au)


class SiegertError(RuntimeError):
    """The secant iteration did not converge."""


class BranchError(SiegertError):
    """Converged, but not on the branch that was asked for."""


class LabelAmbiguityError(RuntimeError):
    pass


@dataclass(frozen=True)
class Resonance:
    energy: complex
    label: int | None
    field_point: FieldPoint
    iterations: int = 0
    residual: float = 0.0

    @property
    def width(self) -> float:
        return -2.0 * self.energy.imag

    @property
    def width_cm1(self) -> float:
        return units.energy_to_wavenumber(self.width)

    @property
    def field_free_energy(self) -> float:
        """Re E - omega, comparable with the field-free levels."""
        return self.energy.real - self.field_point.omega


ASYMPTOTIC_TOL = 1e-8
RESIDUAL_PROBE = 1e-7
RESIDUAL_RATIO = 1e-2
TAIL_REFLECTION = 4e-9  # measured from comb spacing and depth on the default model


def asymptotic_radius(p: PotentialSet, tol: float = ASYMPTOTIC_TOL, margin: float = 5.0) -> float:
    """Smallest R beyond which both curves sit within ``tol`` of their limits.

    Longer grids only hurt: for broad resonances the outgoing wave grows like
    exp(|Im k| R) and the matching determinant drowns in round-off.
    """
    r = np.linspace(p.r_e, p.r_max, 4000)
    dev = np.maximum(np.abs(p.v1(r) - p.v1_asymptote), np.abs(p.v2(r) - p.v2_asymptote))
    bad = np.nonzero(dev >= tol)[0]
    r_out = r[bad[-1]] + margin if bad.size else p.r_e + margin
    return float(min(r_out, p.r_max))


def numerov_grid(p: PotentialSet, step: float = 0.01, r_max: float | None = None) -> RadialGrid:
    r_max = asymptotic_radius(p) if r_max is None else min(r_max, p.r_max)
    n = int(round((r_max - p.r_min) / step)) + 1
    return RadialGrid(p.r_min, r_max, n)


class CoupledChannelProblem:
    """The close-coupled equations at one field point, sampled on a grid."""

    def __init__(self, potentials: PotentialSet, field_point: FieldPoint,
                 grid: RadialGrid | None = None, match_at: float | None = None):
        self.potentials = potentials
        self.field_point = field_point
        self.grid = grid or numerov_grid(potentials)
        r = self.grid.r
        self.v11 = potentials.v1(r) + field_point.omega
        self.v22 = potentials.v2(r)
        self.v12 = -0.5 * field_point.field * potentials.mu12(r)
        self.two_m = 2.0 * potentials.mass
        rm = potentials.r_e if match_at is None else match_at
        self.imatch = int(np.clip(np.searchsorted(r, rm), 2, self.grid.n - 3))
        # asymptotic eigenchannels at the last grid point
        vend = np.array([[self.v11[-1], self.v12[-1]], [self.v12[-1], self.v22[-1]]])
        self._w_end, self._u_end = np.linalg.eigh(vend)

    @property
    def threshold(self) -> float:
        """Lowest asymptotic channel energy (the open channel)."""
        return float(self._w_end[0])

    def decay_limit(self, e: complex) -> float:
        """Largest |Im E| this grid can resolve at Re E.

        A residual reflection r from the potential tail at R_max produces a
        comb of spurious poles at Im k = ln(1/r) / (2L); resonances decaying
        that fast are indistinguishable from it. Half that depth is accepted.
        """
        k = np.sqrt(max(self.two_m * (complex(e).real - self.threshold), 0.0))
        length = self.grid.r_max - self.grid.r_min
        return 0.5 * k * np.log(1.0 / TAIL_REFLECTION) / (self.two_m * length)

    def coupling(self) -> np.ndarray:
        return self.v12

    def _boundary_ratio(self, e: complex) -> np.ndarray:
        h = self.grid.h
        k2 = self.two_m * (e - self._w_end)
        q = np.where(k2.real > 0, np.sqrt(k2 + 0j), 1j * np.sqrt(-k2 + 0j))
        # phase per step of the discrete Numerov plane wave, so the boundary
        # is reflectionless for the difference equation, not just the ODE
        t = -h * h / 12.0 * k2
        theta = np.arccos((1.0 + 5.0 * t) / (1.0 - t) + 0j)
        theta = np.where(np.abs(theta - q * h) <= np.abs(theta + q * h), theta, -theta)
        u = self._u_end
        prop = u @ np.diag(np.exp(-1j * theta)) @ u.T
        c = h * h / 12.0 * self.two_m

        def one_minus_t(n):
            return np.eye(2) - c * (np.array([[self.v11[n], self.v12[n]],
                                              [self.v12[n], self.v22[n]]]) - e * np.eye(2))

        return one_minus_t(-2) @ prop @ np.linalg.inv(one_minus_t(-1))

    def matching(self, e: complex) -> complex:
        """det(R_m - S_{m+1}^-1); zero at a Siegert eigenvalue."""
        e = complex(e)
        ro = outward_ratio(self.v11, self.v12, self.v22, e, self.two_m, self.grid.h, self.imatch)
        si = inward_ratio(self.v11, self.v12, self.v22, e, self.two_m, self.grid.h,
                          self.imatch, self._boundary_ratio(e))
        return complex(np.linalg.det(ro - np.linalg.inv(si)))


def siegert_solve(prob: CoupledChannelProblem, guess: complex, label: int | None = None,
                  max_iter: int = MAX_ITER, tol: float = E_TOL,
                  max_shift: float | None = None) -> Resonance:
    """Converge the Siegert eigenvalue nearest ``guess`` by complex secant.

    ``max_shift`` bounds |E - guess|; a larger move is reported as a branch
    jump rather than returned.
    """
    guess = complex(guess)
    if guess.real <= prob.threshold:
        raise ValueError("guess below the open-channel threshold")
    e0 = guess
    e1 = guess + complex(1e-7, -1e-9) * max(abs(guess.real - prob.threshold), 1e-4)
    d0, d1 = prob.matching(e0), prob.matching(e1)
    for it in range(1, max_iter + 1):
        denom = d1 - d0
        if denom == 0:
            break
        e2 = e1 - d1 * (e1 - e0) / denom
        e0, d0 = e1, d1
        e1, d1 = e2, prob.matching(e2)
        if not np.isfinite(e1):
            break
        if abs(e1 - e0) < tol:
            if e1.imag > GAMMA_TOL:
                raise SiegertError(f"converged to a growing state E = {e1}")
            if max_shift is not None and abs(e1 - guess) > max_shift:
                raise BranchError(f"branch jump: guess {guess}, converged {e1}")
            # a true simple root is small relative to a nearby probe; round-off
            # plateaus (broad states, long grids) are not
            probe = abs(prob.matching(e1 + RESIDUAL_PROBE))
            if not abs(d1) < RESIDUAL_RATIO * probe:
                raise SiegertError(f"secant stalled on a noise plateau at E = {e1}")
            return Resonance(e1, label, prob.field_point, it, abs(d1))
    raise SiegertError(f"no convergence from guess {guess} at {prob.field_point}")


def dressed_levels(p: PotentialSet, field_point: FieldPoint, n: int,
                   grid: RadialGrid | None = None) -> np.ndarray:
    """e_v + omega for v < n: the decoupled resonance positions."""
    states = eigenstates(p, grid or _bound_grid(p), n)
    return np.array([s.energy for s in states]) + field_point.omega


def _bound_grid(p: PotentialSet) -> RadialGrid:
    return RadialGrid(p.r_min, min(p.r_max, p.r_e + 30.0), 1024)


def continue_resonance(p: PotentialSet, wavelength_nm: float, intensities, e_start: complex,
                       i_start: float = 0.0, grid: RadialGrid | None = None,
                       max_halvings: int = 12, label: int | None = None) -> list[Resonance]:
    """Follow one resonance through a sequence of intensities at fixed wavelength."""
    points = [FieldPoint(i, wavelength_nm) for i in intensities]
    return continue_along(p, points, e_start, FieldPoint(i_start, wavelength_nm),
                          grid=grid, max_halvings=max_halvings, label=label)


def continue_along(p: PotentialSet, points, e_start: complex, start: FieldPoint,
                   grid: RadialGrid | None = None, max_halvings: int = 12,
                   label: int | None = None) -> list[Resonance]:
    """Follow one resonance through a sequence of field points.

    Guesses are extrapolated linearly from the last two converged points and
    each solve may move at most four times the predicted step; a rejected
    step is bisected in (I, lambda) up to ``max_halvings`` times.
    """
    grid = grid or numerov_grid(p)
    out = []
    cur, cur_e = (start.intensity, start.wavelength), complex(e_start)
    prev = prev_e = None
    for fp in points:
        pending = _ladder(cur, (float(fp.intensity), float(fp.wavelength)))
        halvings = 0
        while pending:
            tgt = pending[-1]
            guess = cur_e
            if prev is not None:
                # extrapolate along the dominant coordinate of the last step
                d_prev = np.subtract(cur, prev)
                d_next = np.subtract(tgt, cur)
                j = int(np.argmax(np.abs(d_prev) / np.maximum(np.abs(cur), 1e-30)))
                if d_prev[j] != 0:
                    guess = cur_e + (cur_e - prev_e) * d_next[j] / d_prev[j]
            prob = CoupledChannelProblem(p, FieldPoint(*tgt), grid)
            last = abs(cur_e - prev_e) if prev is not None else 0.0
            shift = max(4.0 * abs(guess - cur_e), 2.0 * last, 2e-7, abs(cur_e.imag))
            try:
                res = siegert_solve(prob, guess, label=label, max_shift=shift)
            except SiegertError:
                if halvings >= max_halvings:
                    raise
                halvings += 1
                pending.append(_midpoint(cur, tgt))
                continue
            halvings = 0
            prev, prev_e = cur, cur_e
            cur, cur_e = tgt, res.energy
            pending.pop()
        out.append(res)
    return out


MAX_INTENSITY_RATIO = 1.2


def _ladder(cur, tgt):
    """Pending targets (last = next) from ``cur`` to ``tgt`` with bounded
    intensity ratio; widths change over decades of I."""
    (ia, la), (ib, lb) = cur, tgt
    lo, hi = min(ia, ib), max(ia, ib)
    if hi == 0.0 or (lo > 0.0 and hi / lo <= MAX_INTENSITY_RATIO):
        return [tgt]
    lo_eff = lo if lo > 0.0 else hi * 1e-3
    n = int(np.ceil(np.log(hi / lo_eff) / np.log(MAX_INTENSITY_RATIO)))
    rungs = list(np.geomspace(lo_eff, hi, n + 1))
    if ib < ia:
        rungs = rungs[::-1]
    # the current point is never a rung; zero field is always the last one
    if ia > 0.0:
        rungs = rungs[1:]
    if ib == 0.0:
        rungs.append(0.0)
    lams = np.linspace(la, lb, len(rungs) + 1)[1:]
    steps = [(float(i), float(w)) for i, w in zip(rungs, lams)]
    steps[-1] = (float(ib), float(lb))
    return steps[::-1]


def _midpoint(a, b):
    """Bisect in (I, lambda); intensity is split geometrically when it spans
    decades, and from zero field the first probe sits at an eighth."""
    (ia, la), (ib, lb) = a, b
    lo, hi = min(ia, ib), max(ia, ib)
    if lo == 0.0:
        mid_i = hi / 8.0
    elif hi / lo > 4.0:
        mid_i = np.sqrt(lo * hi)
    else:
        mid_i = 0.5 * (ia + ib)
    return (float(mid_i), 0.5 * (la + lb))


def label_resonance(res: Resonance, p: PotentialSet, n_steps: int = 20,
                    n_levels: int = 8, tol: float = 1e-7,
                    grid: RadialGrid | None = None) -> int:
    """Parent vibrational level of ``res`` by continuation to zero field.

    The intensity is walked geometrically from the resonance's own value down
    to 1e-6 of it in ``n_steps`` steps and then switched off; the decoupled
    eigenvalue reached must sit within ``tol`` of exactly one e_v + omega.
    """
    fp = res.field_point
    levels = dressed_levels(p, fp, n_levels)
    if fp.intensity == 0.0:
        return _nearest_level(res.energy, levels, tol)
    path = list(fp.intensity * np.geomspace(1.0, 1e-6, n_steps)[1:]) + [0.0]
    try:
        track = continue_resonance(p, fp.wavelength, path, res.energy,
                                   i_start=fp.intensity, grid=grid)
    except SiegertError as exc:
        raise LabelAmbiguityError(f"continuation to zero field failed: {exc}") from None
    return _nearest_level(track[-1].energy, levels, tol)


def _nearest_level(e: complex, levels: np.ndarray, tol: float) -> int:
    d = np.abs(levels - e.real)
    close = np.nonzero(d < tol)[0]
    if close.size != 1:
        raise LabelAmbiguityError(f"E = {e} matches {close.size} decoupled levels")
    return int(close[0])


# -- complex absorbing potential oracle ---------------------------------------------

CAP_FRACTION = 0.2
DEFAULT_ETAS = tuple(np.geomspace(1e-4, 3e-2, 14))


@dataclass(frozen=True)
class CapTrajectory:
    etas: np.ndarray
    energies: np.ndarray
    best: int

    @property
    def energy(self) -> complex:
        return complex(self.energies[self.best])


def cap_grid(p: PotentialSet, r_max: float = 60.0, step: float = 0.06) -> RadialGrid:
    n = int(round((r_max - p.r_min) / step)) + 1
    return RadialGrid(p.r_min, r_max, n)


def cap_hamiltonian(prob: CoupledChannelProblem, grid: RadialGrid, eta: float) -> np.ndarray:
    """Two-channel sinc-DVR Hamiltonian with a cubic absorber on both channels."""
    p, fp = prob.potentials, prob.field_point
    r = grid.r
    t = fgh_kinetic(grid, p.mass)
    start = grid.r_max - CAP_FRACTION * (grid.r_max - grid.r_min)
    w = -1j * eta * np.clip((r - start) / (grid.r_max - start), 0.0, None) ** 3
    n = grid.n
    h = np.zeros((2 * n, 2 * n), complex)
    h[:n, :n] = t + np.diag(p.v1(r) + fp.omega + w)
    h[n:, n:] = t + np.diag(p.v2(r) + w)
    c = np.diag(-0.5 * fp.field * p.mu12(r))
    h[:n, n:] = c
    h[n:, :n] = c
    return h


def cap_trajectory(prob: CoupledChannelProblem, guess: complex, grid: RadialGrid | None = None,
                   etas=DEFAULT_ETAS) -> CapTrajectory:
    """Follow the eigenvalue nearest ``guess`` through the absorber strengths
    and pick the most stationary point, min |eta dE/deta| / |Im E|.

    Relative to the width, because box states have Im E proportional to eta
    and look stationary in absolute terms at weak absorption.
    """
    grid = grid or cap_grid(prob.potentials)
    etas = np.asarray(etas, float)
    energies = np.empty(len(etas), complex)
    target = complex(guess)
    for i, eta in enumerate(etas):
        h = cap_hamiltonian(prob, grid, eta)
        lu = scipy.linalg.lu_factor(h - target * np.eye(h.shape[0]))
        op = scipy.sparse.linalg.LinearOperator(h.shape, matvec=lambda x: scipy.linalg.lu_solve(lu, x),
                                                dtype=complex)
        vals = scipy.sparse.linalg.eigs(op, k=3, which="LM", v0=np.ones(h.shape[0], complex),
                                        return_eigenvectors=False, tol=1e-13)
        vals = target + 1.0 / vals
        energies[i] = vals[np.argmin(np.abs(vals - target))]
        target = energies[i]
    if len(etas) < 3:
        return CapTrajectory(etas, energies, len(etas) - 1)
    speed = np.abs(np.gradient(energies, np.log(etas))) / np.maximum(np.abs(energies.imag), 1e-14)
    inner = speed[1:-1]
    return CapTrajectory(etas, energies, int(np.argmin(inner)) + 1)


def cap_solve(prob: CoupledChannelProblem, n_res: int = 1, guesses=None,
              grid: RadialGrid | None = None, etas=DEFAULT_ETAS) -> list[Resonance]:
    """Resonances from absorber-stabilized grid diagonalization.

    Without ``guesses`` the n_res lowest decoupled positions e_v + omega seed
    the search.
    """
    grid = grid or cap_grid(prob.potentials)
    if grid.r_max - grid.r_min < 5.0 / CAP_FRACTION:
        raise ValueError("grid too short for a 5 au absorber")
    seeded = guesses is None
    if seeded:
        guesses = dressed_levels(prob.potentials, prob.field_point, n_res)
    out = []
    for v, g in enumerate(list(guesses)[:n_res]):
        traj = cap_trajectory(prob, g, grid, etas)
        speed = abs(traj.energies[min(traj.best + 1, len(traj.etas) - 1)] - traj.energies[traj.best - 1])
        if not np.isfinite(traj.energy) or speed > max(abs(traj.energy.imag), 1e-9) * 10:
            raise SiegertError(f"no stabilized CAP eigenvalue near {g}")
        out.append(Resonance(traj.energy, v if seeded else None, prob.field_point, 0, speed))
    return out
