"""Acceptance criteria on the calibrated default model.

Each test prints one ``CRITERION n: PASS|FAIL`` line with the measured
numbers, then asserts. Runtime is dominated by criterion 9 (three wavepacket
propagations of about 3 minutes each on one core).
"""

import numpy as np
import pytest

from zwrlab import boundstates, cli, floquet, pulsecraft, semiclassical as sc, tdse, units, zwrmap
from zwrlab.boundstates import Curve, RadialGrid
from zwrlab.potentials import FieldPoint

pytestmark = pytest.mark.slow

LAMBDA0 = 552.0
MASS = 20963.2195
DE, ALPHA, RE = 1.5e-3, 0.26, 9.79


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {n}: {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, detail
    return emit


def _morse(r):
    return DE * ((1 - np.exp(-ALPHA * (r - RE))) ** 2 - 1)


def _morse_levels(n):
    we = ALPHA * np.sqrt(2 * DE / MASS)
    v = np.arange(n) + 0.5
    return -DE + we * v - we**2 / (4 * DE) * v**2


def _zwrs(p, grid, lam, v, i_max=2e9):
    scan = zwrmap.scan_intensity(p, lam, (0.0, i_max), v, n_samples=60, grid=grid)
    found, shallow = [], []
    for br in zwrmap.find_dips(scan):
        try:
            found.append(zwrmap.refine_zwr(p, lam, br, v, grid=grid))
        except zwrmap.ShallowDipError as exc:
            shallow.append(exc.point)
    return scan, found, shallow


def test_c1_bound_state_oracle(report):
    states = boundstates.eigenstates(Curve(_morse, 3, 60, 0.0), RadialGrid(3.0, 60.0, 1024), 10, mass=MASS)
    err = np.max(np.abs(np.array([s.energy for s in states]) - _morse_levels(10)))
    report(1, err < 1e-8, f"max |E_grid - E_Morse| over 10 levels = {err:.2e} au (tol 1e-8)")


def test_c2_phase_integral(report):
    curve = Curve(_morse, 3.0, 60.0, 0.0)
    errs = [abs(boundstates.action(curve, e, MASS) - (n + 0.5) * np.pi)
            for n, e in enumerate(_morse_levels(10))]
    k = 1e-3
    harm = Curve(lambda r: 0.5 * k * (r - 10.0) ** 2, 5.0, 15.0)
    w = np.sqrt(k / MASS)
    errs += [abs(boundstates.action(harm, (n + 0.5) * w, MASS) - (n + 0.5) * np.pi) for n in range(5)]
    report(2, max(errs) < 1e-6, f"max |action - (n+1/2)pi| = {max(errs):.2e} rad (tol 1e-6)")


def test_c3_solver_equivalence(model, grid, report):
    rng = np.random.default_rng(7)
    lines, ok, redrawn = [], True, 0
    while len(lines) < 10:
        lam, inten, v = rng.uniform(548, 556), 10 ** rng.uniform(7, 9.3), int(rng.integers(0, 3))
        lv = floquet.dressed_levels(model, FieldPoint(0.0, lam), 3)
        es = floquet.continue_resonance(model, lam, [inten], lv[v], grid=grid, label=v)[-1].energy
        prob = floquet.CoupledChannelProblem(model, FieldPoint(inten, lam), grid)
        if abs(es.imag) > prob.decay_limit(es):
            redrawn += 1
            continue
        ec = floquet.cap_solve(prob, 1, [es])[0].energy
        d, tol = abs(ec - es), max(1e-9, 0.02 * (-2.0 * es.imag))
        ok &= d < tol
        lines.append(f"{lam:.2f}nm/{inten:.2e}/v{v}: dE={d:.1e} tol={tol:.1e}")
    report(3, ok, f"10 points agree ({redrawn} draws beyond the resolvable width redrawn); " + "; ".join(lines))


def test_c4_decoupled_limit(model, grid, report):
    worst = 0.0
    for lam in (549.0, 552.0, 556.0):
        fp = FieldPoint(0.0, lam)
        prob = floquet.CoupledChannelProblem(model, fp, grid)
        for e in floquet.dressed_levels(model, fp, 3):
            res = floquet.siegert_solve(prob, e + 1e-7)
            worst = max(worst, abs(res.energy.imag), abs(res.energy.real - e))
    report(4, worst < 1e-12, f"max deviation from e_v + omega (Re and Im) = {worst:.1e} au")


def test_c5_dip_morphology(model, grid, report):
    ok, parts = True, []
    for lam in (549.5, 550.0, 550.5):
        scan, found, _ = _zwrs(model, grid, lam, 1)
        g = scan.gamma_cm1
        peaks = [g[j] for j in range(1, len(g) - 1) if g[j] > g[j - 1] and g[j] > g[j + 1]]
        smooth = bool(scan.converged.all())
        decreasing = len(peaks) > 1 and bool(np.all(np.diff(peaks) < 0))
        deep = [q for q in found if q.gamma_cm1 < 1e-4]
        ok &= smooth and decreasing and len(deep) >= 1
        parts.append(f"{lam}nm: {len(deep)} ZWRs at " + ",".join(f"{q.intensity / 1e9:.3f}" for q in deep)
                     + f" GW/cm2 (min Gamma {min(q.gamma_cm1 for q in deep):.0e} cm-1), "
                     + f"background maxima {'decreasing' if decreasing else 'NOT decreasing'}")
    report(5, ok, "; ".join(parts))


def test_c6_slope_signs(model, grid, report):
    scan, found, _ = _zwrs(model, grid, 549.5, 1)
    seed = min(found, key=lambda q: q.intensity)
    path = zwrmap.trace_path(model, seed, 0.25, (549.0, 556.0), grid=grid)
    lam, slopes = path.wavelengths, path.slopes()
    mid = 0.5 * (lam[1:] + lam[:-1])
    c_plus = slopes[mid > LAMBDA0]
    c_minus = slopes[mid < LAMBDA0]
    pos = mid[(mid < LAMBDA0) & (slopes > 0)]
    neg = mid[(mid < LAMBDA0) & (slopes <= 0)]
    ok_plus = c_plus.size > 0 and bool(np.all(c_plus < 0))
    ok_minus = c_minus.size > 0 and bool(np.all(c_minus > 0))
    report(6, ok_plus and ok_minus,
           f"path {lam.min():.2f}-{lam.max():.2f} nm from seed {seed.intensity / 1e9:.3f} GW/cm2; "
           f"lambda > lambda0: {c_plus.size} segments, all negative = {ok_plus}; "
           f"c- window: positive over {pos.min() if pos.size else 0:.2f}-{pos.max() if pos.size else 0:.2f} nm, "
           f"negative over {neg.min() if neg.size else 0:.2f}-{neg.max() if neg.size else 0:.2f} nm "
           f"(the path turns over where the crossing first appears)")


def test_c7_v0_exceptionality(model, grid, report):
    parts, ok = [], True
    for lam in (552.5, 553.0, 556.0):
        _, found, shallow = _zwrs(model, grid, lam, 0)
        ok &= not found
        parts.append(f"{lam}nm: {len(found)} accepted, {len(shallow)} shallow")
    inside = []
    for lam in (550.5, 551.0, 551.5):
        inside += _zwrs(model, grid, lam, 0)[1]
    ok &= len(inside) >= 1
    parts.append(f"550-552 nm window: {len(inside)} accepted")
    report(7, ok, "; ".join(parts))


def test_c8_semiclassical_consistency(model, grid, report):
    lams = list(np.arange(550.0, 553.01, 0.25))
    cands = sc.predict_zwr(model, 1, 0, lams)
    ok, parts = bool(cands), []
    for lam, inten in cands:
        fp = FieldPoint(inten, lam)
        if not sc.validity(model, fp, sc.solve_tilde_level(model, fp, 1)).valid:
            continue
        _, found, _ = _zwrs(model, grid, lam, 1)
        if not found:
            ok = False
            parts.append(f"{lam:.2f}nm: {inten / 1e9:.4f} vs none")
            continue
        near = min(found, key=lambda q: abs(q.intensity - inten))
        rel = inten / near.intensity - 1.0
        ok &= abs(rel) < 0.2
        parts.append(f"{lam:.2f}nm: {inten / 1e9:.4f} vs {near.intensity / 1e9:.4f} GW/cm2 ({rel:+.0%})")
    report(8, ok, "; ".join(parts) + " (tol 20%)")


@pytest.fixture(scope="module")
def filtration(model, grid):
    pts, guess = [], 0.147e9
    for lam in (549.0, 549.1, 549.2):
        e0 = floquet.dressed_levels(model, FieldPoint(0.0, lam), 1)[0]
        q = zwrmap.locate_minimum(model, lam, guess, e0, FieldPoint(0.0, lam), 0, grid)
        pts.append(q)
        guess = q.intensity
    pulse = pulsecraft.build_pulse([(q.wavelength, q.intensity) for q in pts],
                                   units.fs_to_au(5000.0), units.fs_to_au(160000.0), 3.0)
    g = tdse.tdse_grid(model)
    basis = boundstates.eigenstates(model, g, 3)
    final = {}
    for v0 in (0, 1, 2):
        rec = tdse.propagate(model, pulse, basis[v0], record_every=5000, basis=basis)
        final[v0] = rec.final[v0]
    t, widths = pulsecraft.sample_widths(model, pulse, (0, 1, 2), grid=grid)
    est = pulsecraft.survival(t, widths, (0, 1, 2)).final
    return pts, final, est


def test_c9_filtration_ordering(filtration, report):
    pts, p, _ = filtration
    ok = p[0] >= 0.8 and p[2] < 0.1 and p[0] > p[1] > p[2]
    report(9, ok, f"v=0 ZWR path {pts[0].wavelength}-{pts[-1].wavelength} nm, 5 ps ramps, 160 ps plateau: "
                  f"P0 = {p[0]:.3f}, P1 = {p[1]:.3f}, P2 = {p[2]:.3f}")


def test_c10_tdse_floquet_consistency(filtration, report):
    _, p, est = filtration
    rel = abs(p[0] - est[0]) / est[0]
    others = ", ".join(f"v={v}: TDSE {p[v]:.3f} vs {est[v]:.3f}" for v in (1, 2))
    report(10, rel < 0.1, f"tracked v=0: TDSE {p[0]:.4f} vs exponential estimate {est[0]:.4f} "
                          f"({rel:.1%}, tol 10%); untracked {others}")


def _scan_args(out, workers):
    return ["scan", "--out", str(out), "--workers", str(workers),
            "--set", "scan.v=1", "--set", "scan.wavelengths_nm=[549.5, 550.5, 551.5]",
            "--set", "scan.samples=40"]


def test_c11_determinism(tmp_path, report):
    runs = [(tmp_path / "a", 1), (tmp_path / "b", 1), (tmp_path / "c", 3)]
    for out, w in runs:
        assert cli.main(_scan_args(out, w)) == cli.EXIT_OK
    ref = (runs[0][0] / "scan.csv").read_bytes()
    same = all((out / "scan.csv").read_bytes() == ref for out, _ in runs[1:])
    report(11, same, f"scan.csv from 1, 1 and 3 workers byte-identical = {same} ({len(ref)} bytes)")
