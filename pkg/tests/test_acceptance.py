"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line with the measured figure; run with
``pytest tests/test_acceptance.py -v`` to see them next to the test names.
"""
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qedfields.amplitudes import DEFAULT_COUPLING, com_config, sigma, sigma_nonrelativistic
from qedfields.dirac import anticommutator, build_spinor, current
from qedfields.emergent import (ChargeSource, SourceEnsemble, gauss_flux, potential_closed_form,
                                potential_fourier_oracle, residual_convergence)
from qedfields.grid import GridSpec
from qedfields.interference import (DoubleSlitGeometry, IdealSolenoid, Path as Loop,
                                    SourceArraySolenoid, fringe_shift, interference_pattern,
                                    line_integral_A, path_phase, wrap_phase)
from qedfields.kinematics import METRIC, BoostParameters, FourVector, boost
from qedfields.modes import (FreeFieldMode, ModeComponent, boost_events, boost_mode_set,
                             femf_maxwell_residuals, femf_mode_fields, phase_velocity,
                             sample_field)

pytestmark = pytest.mark.acceptance

E = DEFAULT_COUPLING
ROOT = Path(__file__).resolve().parents[1]
KINDS = ["spinor", "amplitude", "field-grid", "gauss-flux", "ab-pattern", "boost-modes"]


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
        assert ok, detail
    return emit


def test_criterion_01_spinor_identities(report):
    rng = np.random.default_rng(1)
    dirs = rng.normal(size=(1000, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    ks = dirs * 10.0 * rng.uniform(0, 1, (1000, 1)) ** (1 / 3)
    norm_err = cur_err = 0.0
    for k in ks:
        u = build_spinor(k, 1.0)
        w2 = 2 * u.energy
        norm_err = max(norm_err, abs(np.vdot(u.components, u.components).real - w2) / w2)
        target = 2 * np.concatenate([[u.energy], k])
        cur_err = max(cur_err, float(np.abs(current(u, u) - target).max()) / w2)
    cliff = max(float(np.abs(anticommutator(m, n) - 2 * METRIC[m, n] * np.eye(4)).max())
                for m in range(4) for n in range(4))
    ok = norm_err <= 1e-10 and cur_err <= 1e-10 and cliff <= 1e-14
    report(1, "spinor identities", ok,
           f"max norm err {norm_err:.2e}, max current err {cur_err:.2e}, Clifford {cliff:.1e}")


def test_criterion_02_coulomb_limit(report):
    worst = 0.0
    for p in (1e-4, 1e-3, 5e-3, 1e-2):
        for angle in np.linspace(0.1, math.pi - 0.1, 9):
            cfg = com_config(p, angle)
            worst = max(worst, abs(sigma(cfg).value / sigma_nonrelativistic(cfg).value - 1))
    report(2, "Coulomb limit", worst <= 1e-3, f"max |ratio - 1| = {worst:.2e} (tol 1e-3)")


def test_criterion_03_fourier_oracle(report):
    rng = np.random.default_rng(3)
    src = ChargeSource((0, 0, 0), (0.2, -0.1, 0.3))
    ens = SourceEnsemble([src])
    dirs = rng.normal(size=(20, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = np.concatenate([[0.5, 5.0], rng.uniform(0.5, 5.0, 18)])
    cutoffs = (100.0, 200.0, 400.0, 800.0)
    worst, monotone = 0.0, True
    for d, r in zip(dirs, radii):
        x = src.center + r * d
        exact = potential_closed_form(ens, x).phi
        errs = [abs(potential_fourier_oracle(src, x, L).phi / exact - 1) for L in cutoffs]
        worst = max(worst, errs[0])
        monotone &= all(b < a for a, b in zip(errs, errs[1:]))
    report(3, "potential oracle", worst <= 0.02 and monotone,
           f"max rel err {worst:.2e} at cutoff 100 (tol 2e-2), monotone={monotone}")


def test_criterion_04_gauss_law(report):
    ens = SourceEnsemble([ChargeSource(momentum=(0, 0, 0), center=(0, 0, 0)),
                          ChargeSource(momentum=(2.5, 0.4, -0.2), center=(0.8, 0.3, 0)),
                          ChargeSource(momentum=(0, 6, 0), center=(-1.5, 0.2, 0.4))])
    cases = [((0, 0, 0), 0.5, 1), ((0.5, 0.2, 0), 1.2, 2), ((-0.2, 0.2, 0.1), 2.5, 3),
             ((0, 5, 0), 1.5, 0), ((4, 0, 0), 2.0, 0)]
    worst = 0.0
    for c, R, n in cases:
        assert (np.linalg.norm(ens.centers - np.array(c), axis=1) < R).sum() == n
        flux = gauss_flux(ens, c, R)
        err = abs(flux + n * E) / (n * E) if n else abs(flux) / E
        worst = max(worst, err)
    report(4, "Gauss law", worst <= 1e-3, f"max error {worst:.2e} in units of n e (tol 1e-3)")


def test_criterion_05_maxwell_convergence(report):
    grid = GridSpec.cube(1.5, 0.1)
    worst, ratios = math.inf, []
    for k in [(0, 0, 0), (0.3, -0.4, 0.5)]:
        ens = SourceEnsemble([ChargeSource(k, (0.03, -0.02, 0.01))])
        coarse, _, ratio = residual_convergence(ens, grid, r_min=1.0)
        live = coarse > 1e-12
        ratios.append(ratio[live])
        worst = min(worst, float(ratio[live].min()))
    detail = "; ".join(", ".join(f"{v:.2f}" for v in r) for r in ratios)
    report(5, "Maxwell residual convergence", worst >= 3.0,
           f"halving ratios [{detail}], min {worst:.2f} (need >= 3.0)")


def test_criterion_06_ab_phase(report):
    geo = DoubleSlitGeometry()
    sol_kw = dict(radius=0.1, axis_point=(2.0, 0.0, 0.0))
    rng = np.random.default_rng(6)
    phase_err = 0.0
    for flux in rng.uniform(-40, 40, 10):
        sol = IdealSolenoid(flux, **sol_kw)
        for y in (-60.0, 0.0, 25.0):
            p1, p2 = geo.paths(y)
            d = path_phase(sol, p1, E, None) - path_phase(sol, p2, E, None)
            phase_err = max(phase_err, abs(wrap_phase(d - E * flux)))
    base = interference_pattern(geo)
    quantum = interference_pattern(geo, IdealSolenoid(2 * math.pi / E, **sol_kw), E)
    periodic = float(np.abs(base.intensity - quantum.intensity).max())
    fluxes = np.linspace(-2.0, 2.0, 9)
    shifts = [fringe_shift(geo, IdealSolenoid(f, **sol_kw), E, base) for f in fluxes]
    slope = np.polyfit(fluxes, shifts, 1)[0]
    slope_err = abs(slope / (E / (2 * math.pi)) - 1)
    ok = phase_err <= 1e-4 and periodic <= 1e-9 and slope_err <= 5e-3
    report(6, "AB phase", ok, f"phase err {phase_err:.1e} rad, 2pi/e pattern diff {periodic:.1e}, "
                              f"slope rel err {slope_err:.2e}")


def test_criterion_07_source_array_solenoid(report):
    sol = SourceArraySolenoid()
    loop = Loop.circle((0, 0, 0), 0.5, 64)
    circ = line_integral_A(sol, loop, 8)
    flux = sol.flux_through_disk(0.5)
    rel = abs(circ / flux - 1)
    r = np.geomspace(20, 80, 6)
    pts = np.column_stack([r, np.zeros_like(r), np.zeros_like(r)])
    B = np.linalg.norm(sol.magnetic_field(pts), axis=1)
    exponent = np.polyfit(np.log(r), np.log(B), 1)[0]
    report(7, "source-array solenoid", rel <= 0.02 and exponent <= -2.5,
           f"loop {circ:.5f} vs flux {flux:.5f} (rel {rel:.1e}), far-field exponent {exponent:.3f}")


def test_criterion_08_boost_properties(report):
    rng = np.random.default_rng(8)
    norm_err = 0.0
    for _ in range(1000):
        params = BoostParameters(rng.uniform(-0.99, 0.99), int(rng.integers(3)))
        a = FourVector(rng.normal() * 5, rng.normal(size=3) * 5)
        b = boost(params, a)
        scale = max(1.0, float(a.as_array() @ a.as_array()))
        norm_err = max(norm_err, abs(b.norm2() - a.norm2()) / scale)
    v = 0.6
    modes = [ModeComponent(0, rng.normal(size=3), complex(*rng.normal(size=2))) for _ in range(8)]
    modes.append(ModeComponent(0, (0, 0, 1.3), 0.4j))
    boosted = boost_mode_set(modes, v)
    t, x = rng.uniform(-10, 10, 100), rng.uniform(-10, 10, (100, 3))
    t2, x2 = boost_events(v, t, x)
    invariance = float(np.abs(sample_field(modes, x, t) - sample_field(boosted, x2, t2)).max())
    speeds = np.array([phase_velocity(m) for m in boosted])
    transverse = np.array([math.hypot(m.k[0], m.k[1]) for m in modes])
    bound_ok = np.all(speeds <= v + 1e-12)
    equality_ok = np.all((np.abs(speeds - v) <= 1e-12) == (transverse == 0))
    ok = norm_err <= 1e-10 and invariance <= 1e-10 and bound_ok and equality_ok
    report(8, "boost properties", ok,
           f"norm err {norm_err:.1e}, invariance err {invariance:.1e}, max u' {speeds.max():.12f} "
           f"(v = {v}), equality only at zero transverse k: {bool(equality_ok)}")


def test_criterion_09_free_field_modes(report):
    rng = np.random.default_rng(9)
    dots, ratios = 0.0, []
    for lam in (1, 2):
        for _ in range(20):
            mode = FreeFieldMode(rng.normal(size=3) * 3, lam, complex(*rng.normal(size=2)))
            Ef, Bf = femf_mode_fields(mode, rng.normal(size=(50, 3)), rng.normal())
            k = np.asarray(mode.k)
            dots = max(dots, float(np.abs(Ef @ k).max()), float(np.abs(Bf @ k).max()),
                       float(np.abs(np.einsum("nc,nc->n", Ef, Bf)).max()))
        pts = rng.normal(size=(100, 3))
        res = [femf_maxwell_residuals(mode, pts, 0.4, h) for h in (0.04, 0.02, 0.01)]
        for coarse, fine in zip(res, res[1:]):
            ratios.extend(c / f for c, f in zip(coarse, fine))
    ok = dots < 1e-12 and all(3.5 < r < 4.5 for r in ratios)
    report(9, "free-field mode structure", ok,
           f"max transversality dot {dots:.1e}, residual halving ratios "
           f"{min(ratios):.3f}..{max(ratios):.3f}")


def _cli(*args, env=None):
    return subprocess.run([sys.executable, "-m", "qedfields", *args], capture_output=True,
                          text=True, env=env)


def test_criterion_10_cli_determinism(report, tmp_path):
    mismatched = []
    for kind in KINDS:
        outs = []
        for run in ("a", "b"):
            out = tmp_path / kind / run
            cp = _cli(kind, "--config", str(ROOT / "configs" / f"{kind}.ini"), "--out", str(out))
            assert cp.returncode == 0, cp.stderr
            outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        if outs[0] != outs[1]:
            mismatched.append(kind)
    bad_key = tmp_path / "bad.ini"
    bad_key.write_text("[boost]\nspeed = 0.5\n")
    coarse = tmp_path / "coarse.ini"
    coarse.write_text("[source.a]\ncenter = 0.3, 0, 0\n[sphere.s]\nradius = 1\n"
                      "[quadrature]\nn_theta = 4\nn_phi = 8\n")
    lightspeed = tmp_path / "c.ini"
    lightspeed.write_text("[boost]\nvelocity = 1.0\n[mode.a]\nk = 0, 0, 1\n")
    codes = {
        "unknown key": (_cli("boost-modes", "--config", str(bad_key)).returncode, 1),
        "precision": (_cli("gauss-flux", "--config", str(coarse), "--out",
                           str(tmp_path / "p")).returncode, 2),
        "validate |v|=1": (_cli("boost-modes", "--config", str(lightspeed),
                                "--validate").returncode, 1),
        "validate ok": (_cli("spinor", "--config", str(ROOT / "configs" / "spinor.ini"),
                             "--validate").returncode, 0),
        "missing file": (_cli("spinor", "--config", str(tmp_path / "none.ini")).returncode, 1),
    }
    wrong = {k: v for k, v in codes.items() if v[0] != v[1]}
    ok = not mismatched and not wrong
    report(10, "CLI determinism", ok,
           f"{len(KINDS) - len(mismatched)}/{len(KINDS)} configs byte-identical, "
           f"exit codes {'all as documented' if not wrong else wrong}")
