import numpy as np
import pytest

from zwrlab import floquet
from zwrlab.boundstates import RadialGrid, eigenstates
from zwrlab.potentials import FieldPoint, PotentialSet


# single-channel barrier problem: a well behind a x^2 exp(-x) barrier, with a
# far-away closed channel so the coupled machinery is exercised unchanged
WELL_CENTER = 2.5


def _barrier(r):
    x = r - WELL_CENTER
    return 7.5 * x * x * np.exp(-x)


def _barrier_slope(r):
    x = r - WELL_CENTER
    return 7.5 * (2.0 * x - x * x) * np.exp(-x)


@pytest.fixture(scope="module")
def barrier():
    return PotentialSet(mass=1.0, r_e=WELL_CENTER, r_min=0.0, r_max=80.0,
                        _v1=_barrier, _v2=lambda r: 50.0 + np.exp(-r),
                        _mu12=lambda r: np.ones_like(r), _dv1=_barrier_slope,
                        _dv2=lambda r: -np.exp(-r), v1_asymptote=0.0,
                        v2_asymptote=50.0, name="barrier")


def test_shape_resonance_matches_cap(barrier):
    fp = FieldPoint(0.0, 1e6)
    prob = floquet.CoupledChannelProblem(barrier, fp, floquet.numerov_grid(barrier, step=0.005),
                                         match_at=WELL_CENTER)
    res = floquet.siegert_solve(prob, 1.768 + fp.omega - 1e-3j)
    # real-energy phase-shift scan gives the same pole (checked once, offline)
    assert res.field_free_energy == pytest.approx(1.76815, abs=1e-5)
    assert 1e-6 < res.width < 1e-5
    cap = floquet.cap_solve(prob, 1, [res.energy], grid=floquet.cap_grid(barrier, r_max=40.0, step=0.1),
                            etas=np.geomspace(1e-3, 30.0, 21))[0]
    assert abs(cap.energy - res.energy) < 0.01 * res.width


def test_decoupled_limit(model, grid):
    fp = FieldPoint(0.0, 550.0)
    levels = floquet.dressed_levels(model, fp, 3)
    prob = floquet.CoupledChannelProblem(model, fp, grid)
    for e in levels:
        res = floquet.siegert_solve(prob, e + 1e-7)
        assert abs(res.energy.imag) < 1e-12
        assert abs(res.energy.real - e) < 1e-7


def test_cap_zero_absorber_is_real(model):
    fp = FieldPoint(0.0, 550.0)
    prob = floquet.CoupledChannelProblem(model, fp)
    g = floquet.cap_grid(model)
    h = floquet.cap_hamiltonian(prob, g, 0.0)
    w = np.linalg.eigvals(h)
    assert np.max(np.abs(w.imag)) < 1e-10


def test_cap_decoupled_levels(model):
    fp = FieldPoint(0.0, 550.0)
    prob = floquet.CoupledChannelProblem(model, fp)
    levels = floquet.dressed_levels(model, fp, 2)
    res = floquet.cap_solve(prob, 2)
    for r, e in zip(res, levels):
        assert abs(r.energy - e) < 1e-8
    assert [r.label for r in res] == [0, 1]


def test_widths_decay_not_grow(model, grid):
    lv = floquet.dressed_levels(model, FieldPoint(0.0, 550.0), 2)
    track = floquet.continue_resonance(model, 550.0, [1e7, 1e8, 5e8], lv[1], grid=grid)
    assert all(r.energy.imag <= floquet.GAMMA_TOL for r in track)
    assert all(r.width > 0 for r in track)


def test_weak_field_golden_rule(model, grid):
    lv = floquet.dressed_levels(model, FieldPoint(0.0, 550.0), 1)
    ints = [1e4, 1e5]
    track = floquet.continue_resonance(model, 550.0, ints, lv[0], grid=grid)
    # exponent in field amplitude: Gamma ~ E^2 = I
    slope = np.log(track[1].width / track[0].width) / np.log(ints[1] / ints[0])
    assert 2.0 * slope == pytest.approx(2.0, abs=0.05)


def test_grid_invariance(model):
    fp = FieldPoint(3e8, 550.0)
    base = floquet.numerov_grid(model)
    finer = RadialGrid(base.r_min, base.r_max, 2 * base.n - 1)
    longer = floquet.numerov_grid(model, r_max=base.r_max + 10.0)
    lv = floquet.dressed_levels(model, fp, 1)
    e0 = floquet.continue_resonance(model, 550.0, [fp.intensity], lv[0], grid=base)[0].energy
    for g in (finer, longer):
        e = floquet.siegert_solve(floquet.CoupledChannelProblem(model, fp, g), e0).energy
        assert abs(e - e0) < 1e-9


def test_label_zero_field(model):
    fp = FieldPoint(0.0, 551.0)
    lv = floquet.dressed_levels(model, fp, 3)
    res = floquet.Resonance(complex(lv[2]), None, fp)
    assert floquet.label_resonance(res, model) == 2


def test_label_follows_parent(model, grid):
    lv = floquet.dressed_levels(model, FieldPoint(0.0, 551.0), 3)
    res = floquet.continue_resonance(model, 551.0, [4e8], lv[1], grid=grid)[0]
    assert floquet.label_resonance(res, model, grid=grid) == 1


def test_label_ambiguity_reported():
    with pytest.raises(floquet.LabelAmbiguityError):
        floquet._nearest_level(1.0 + 0j, np.array([1.0, 1.0 + 1e-9]), 1e-7)


def test_guess_below_threshold(model, grid):
    prob = floquet.CoupledChannelProblem(model, FieldPoint(1e8, 550.0), grid)
    with pytest.raises(ValueError):
        floquet.siegert_solve(prob, prob.threshold - 1e-4)


def test_branch_jump_detected(model, grid):
    fp = FieldPoint(5e8, 550.0)
    lv = floquet.dressed_levels(model, fp, 2)
    prob = floquet.CoupledChannelProblem(model, fp, grid)
    # halfway between two levels with a tiny allowed shift
    with pytest.raises(floquet.SiegertError):
        floquet.siegert_solve(prob, 0.5 * (lv[0] + lv[1]) - 1e-7j, max_shift=1e-9)


def test_ladder_bounds_ratio():
    steps = floquet._ladder((1e6, 550.0), (1e9, 551.0))[::-1]
    i = [1e6] + [s[0] for s in steps]
    assert max(b / a for a, b in zip(i, i[1:])) <= floquet.MAX_INTENSITY_RATIO + 1e-12
    assert steps[-1] == (1e9, 551.0)
    down = floquet._ladder((1e8, 550.0), (0.0, 550.0))[::-1]
    assert down[-1] == (0.0, 550.0) and down[0][0] < 1e8


def test_zero_field_bound_levels_agree(model):
    # the dressed positions are the field-free levels shifted by omega
    fp = FieldPoint(0.0, 550.0)
    e = np.array([s.energy for s in eigenstates(model, floquet._bound_grid(model), 3)])
    assert np.allclose(floquet.dressed_levels(model, fp, 3) - fp.omega, e, atol=1e-14)
