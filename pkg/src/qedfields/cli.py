"""Scenario-driven command line front end.

    qedfields <kind> --config <file> [--out <dir>] [--validate]

Exit codes: 0 success, 1 configuration error, 2 a numerical tolerance was
not met (the achieved error is printed and written to summary.txt).
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .amplitudes import ScatteringConfig, photon_virtuality, sigma, sigma_nonrelativistic
from .config import KINDS, ConfigError, ScenarioConfig
from .dirac import anticommutator, build_spinor, current
from .emergent import (ChargeSource, SourceEnsemble, current_density, field_grid, gauss_flux,
                       maxwell_residual, residual_convergence)
from .errors import DomainError, PrecisionError, ResolutionError
from .grid import FLOAT_FMT, GridSpec, write_rows
from .interference import (DoubleSlitGeometry, IdealSolenoid, SourceArraySolenoid,
                           interference_pattern, locate_maximum, wrap_phase)
from .kinematics import METRIC, BoostParameters
from .modes import (ModeComponent, boost_events, boost_mode_set, phase_velocity, sample_field,
                    write_modes_csv)

EXIT_OK, EXIT_CONFIG, EXIT_PRECISION = 0, 1, 2
PHASE_VELOCITY_SLACK = 1e-12


class Diagnostics:
    """Collects invariant violations as '<label>: <message>' lines."""

    def __init__(self):
        self.lines = []

    def attempt(self, label, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (DomainError, ResolutionError, ValueError) as exc:
            self.lines.append(f"{label}: {exc}")
            return None

    def require(self, ok, label, message):
        if not ok:
            self.lines.append(f"{label}: {message}")
        return ok


class Summary:
    """Ordered ``key = value`` report plus tolerance checks."""

    def __init__(self, kind):
        self.items = [("kind", kind)]
        self.failures = []

    def add(self, key, value):
        self.items.append((key, value))

    def check(self, name, achieved, tolerance, passed=None):
        ok = bool(achieved <= tolerance) if passed is None else bool(passed)
        self.add(f"{name}.achieved", achieved)
        self.add(f"{name}.tolerance", tolerance)
        self.add(f"{name}.status", "pass" if ok else "fail")
        if not ok:
            self.failures.append((name, achieved, tolerance))

    @staticmethod
    def _fmt(value):
        if isinstance(value, (bool, np.bool_)):
            return "true" if value else "false"
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        if isinstance(value, (float, np.floating)):
            return FLOAT_FMT % value
        if isinstance(value, (tuple, list, np.ndarray)):
            return ", ".join(Summary._fmt(v) for v in value)
        return str(value)

    def write(self, path):
        with open(path, "w") as fh:
            for key, value in self.items:
                fh.write(f"{key} = {self._fmt(value)}\n")


# --------------------------------------------------------------------------
# building domain objects (shared by run and --validate)

def _sources(cfg: ScenarioConfig, diag: Diagnostics):
    items = cfg.repeated("source")
    if not diag.require(items, "SourceEnsemble", "no [source.<name>] section given"):
        return None
    sources = [diag.attempt(f"ChargeSource [{name}]", ChargeSource, s["momentum"], s["center"],
                            cfg.mass, cfg.coupling) for name, s in items]
    if any(s is None for s in sources):
        return None
    return diag.attempt("SourceEnsemble", SourceEnsemble, sources)


def _physics(cfg, diag):
    diag.require(cfg.mass > 0, "physics.mass", "mass must be positive")
    diag.require(cfg.coupling > 0, "physics.coupling", "coupling must be positive")


def _build_spinor(cfg, diag):
    return {"momentum": np.array(cfg.section("spinor")["momentum"])}


def _build_amplitude(cfg, diag):
    s = cfg.section("amplitude")
    sc = diag.attempt("ScatteringConfig", ScatteringConfig, s["p"], s["p_out"], s["k"], s["k_out"],
                      cfg.coupling, cfg.mass, s["conservation_tol"])
    if sc is not None:
        diag.attempt("Amplitude", photon_virtuality, sc)
    return {"scattering": sc, "rtol": s["coulomb_rtol"]}


def _build_grid(cfg, diag):
    ens = _sources(cfg, diag)
    g = cfg.section("grid")
    grid = diag.attempt("GridSpec", GridSpec, g["origin"], g["spacing"], g["dims"])
    width = g["width"] if g["width"] > 0 else None
    if grid is not None and width is not None:
        diag.require(width >= 2.0 * grid.spacing, "grid.width",
                     f"regularisation width {width} is below 2h = {2 * grid.spacing}")
    diag.require(g["exclusion"] >= 0, "grid.exclusion", "must be non-negative")
    diag.require(g["convergence_radius"] >= 0, "grid.convergence_radius", "must be non-negative")
    return {"ensemble": ens, "grid": grid, "width": width, "g": g}


def _build_gauss(cfg, diag):
    ens = _sources(cfg, diag)
    q = cfg.section("quadrature")
    diag.require(q["n_theta"] > 0 and q["n_phi"] > 0, "quadrature.n_theta",
                 "sphere quadrature needs positive n_theta and n_phi")
    spheres = cfg.repeated("sphere")
    diag.require(spheres, "sphere", "no [sphere.<name>] section given")
    for name, s in spheres:
        if not diag.require(s["radius"] > 0, f"{name}.radius", "radius must be positive"):
            continue
        if ens is not None:
            d = np.linalg.norm(ens.centers - np.array(s["center"]), axis=1)
            diag.require(np.all(np.abs(d - s["radius"]) > 1e-6 * s["radius"]), f"{name}.radius",
                         "a source lies on the sphere surface")
    return {"ensemble": ens, "spheres": spheres, "q": q}


def _build_ab(cfg, diag):
    s = cfg.section("solenoid")
    geo = cfg.section("geometry")
    q = cfg.section("quadrature")
    if s["variant"] == "ideal_infinite":
        model = diag.attempt("IdealSolenoid", IdealSolenoid, s["flux"], s["radius"], s["center"])
    else:
        model = diag.attempt("SourceArraySolenoid", SourceArraySolenoid, s["n_rings"],
                             s["per_ring"], s["radius"], s["pitch"], s["speed"], cfg.mass,
                             cfg.coupling, s["center"])
    diag.require(geo["n_samples"] >= 3, "geometry.n_samples", "need at least three samples")
    diag.require(geo["y_max"] > geo["y_min"], "geometry.y_max", "must exceed geometry.y_min")
    diag.require(q["steps_per_segment"] >= 0, "quadrature.steps_per_segment",
                 "must be non-negative (0 selects the default rule)")
    geometry = None
    if geo["n_samples"] >= 3:
        geometry = diag.attempt(
            "DoubleSlitGeometry", DoubleSlitGeometry, geo["slit1"], geo["slit2"], geo["source"],
            geo["screen_x"], np.linspace(geo["y_min"], geo["y_max"], geo["n_samples"]),
            geo["wavevector"])
    if model is not None and geometry is not None:
        src = np.array(geometry.source)
        ends = np.column_stack([np.full(2, geometry.screen_x), [geo["y_min"], geo["y_max"]],
                                np.zeros(2)])
        clear = math.inf
        axis_p = np.array(model.axis_point)
        for slit in (np.array(geometry.slit1), np.array(geometry.slit2)):
            for a, b in [(src, slit)] + [(slit, e) for e in ends]:
                clear = min(clear, _clearance(axis_p, a, b))
            if _in_triangle(axis_p, slit, *ends):
                clear = 0.0
        diag.require(clear > model.radius, "solenoid.radius",
                     f"electron paths come within {clear:.4g} of the axis, inside the solenoid")
    return {"model": model, "geometry": geometry, "s": s, "geo": geo, "q": q}


def _clearance(axis_point, a, b):
    """Distance in the xy plane from a z-directed axis to the segment a-b."""
    p, a2, b2 = axis_point[:2], a[:2], b[:2]
    d = b2 - a2
    t = 0.0 if not d.any() else float(np.clip((p - a2) @ d / (d @ d), 0.0, 1.0))
    return float(np.linalg.norm(a2 + t * d - p))


def _in_triangle(p, a, b, c):
    """Whether p lies in the xy-projected triangle swept by slit-to-screen paths."""
    def side(u, v, w):
        return (v[0] - u[0]) * (w[1] - u[1]) - (v[1] - u[1]) * (w[0] - u[0])
    s = [side(a, b, p), side(b, c, p), side(c, a, p)]
    return min(s) >= 0 or max(s) <= 0


def _build_boost(cfg, diag):
    b = cfg.section("boost")
    params = diag.attempt("BoostParameters", BoostParameters, b["velocity"], b["axis"])
    modes = []
    items = cfg.repeated("mode")
    diag.require(items, "ModeComponent", "no [mode.<name>] section given")
    for name, m in items:
        mode = diag.attempt(f"ModeComponent [{name}]", ModeComponent, m["omega"], m["k"],
                            complex(*m["amplitude"]))
        if mode is not None:
            diag.require(mode.is_static, f"ModeComponent [{name}]",
                         f"omega = {mode.omega} but a static mode set needs omega = 0")
            diag.require(np.linalg.norm(mode.k) > 0, f"ModeComponent [{name}]",
                         "k = 0 has no phase velocity")
            modes.append(mode)
    diag.require(b["n_events"] > 0, "boost.n_events", "must be positive")
    return {"params": params, "modes": modes, "b": b}


BUILDERS = {
    "spinor": _build_spinor,
    "amplitude": _build_amplitude,
    "field-grid": _build_grid,
    "gauss-flux": _build_gauss,
    "ab-pattern": _build_ab,
    "boost-modes": _build_boost,
}


def build(cfg: ScenarioConfig):
    diag = Diagnostics()
    _physics(cfg, diag)
    objects = BUILDERS[cfg.kind](cfg, diag)
    return objects, diag.lines


# --------------------------------------------------------------------------
# runners

def _run_spinor(cfg, obj, out, summary):
    k = obj["momentum"]
    u = build_spinor(k, cfg.mass)
    w = u.energy
    J = current(u, u).real
    rows = np.column_stack([np.arange(4), u.components.real, u.components.imag])
    write_rows(out / "spinor.csv", ("index", "re", "im"), rows)
    write_rows(out / "current.csv", ("mu", "value"), np.column_stack([np.arange(4), J]))
    target = 2.0 * np.concatenate([[w], k])
    norm_err = abs(float(np.vdot(u.components, u.components).real) - 2 * w) / (2 * w)
    cur_err = float(np.abs(J - target).max()) / (2 * w)
    cliff = max(float(np.abs(anticommutator(m, n) - 2 * METRIC[m, n] * np.eye(4)).max())
                for m in range(4) for n in range(4))
    summary.add("energy", w)
    summary.add("current", J)
    summary.check("norm_rel_error", norm_err, 1e-10)
    summary.check("current_rel_error", cur_err, 1e-10)
    summary.check("clifford_error", cliff, 1e-14)


def _run_amplitude(cfg, obj, out, summary):
    sc = obj["scattering"]
    amp = sigma(sc)
    nr = sigma_nonrelativistic(sc)
    write_rows(out / "amplitude.csv",
               ("q2", "re_sigma", "im_sigma", "re_sigma_nr", "im_sigma_nr"),
               [[amp.photon_virtuality, amp.value.real, amp.value.imag,
                 nr.value.real, nr.value.imag]])
    dev = abs(amp.value / nr.value - 1.0)
    summary.add("photon_virtuality", amp.photon_virtuality)
    summary.add("sigma", (amp.value.real, amp.value.imag))
    summary.add("sigma_nonrelativistic", (nr.value.real, nr.value.imag))
    summary.add("electric_part", (amp.parts[0].real, amp.parts[0].imag))
    summary.add("magnetic_part", (amp.parts[1].real, amp.parts[1].imag))
    if obj["rtol"] > 0:
        summary.check("coulomb_ratio_deviation", dev, obj["rtol"])
    else:
        summary.add("coulomb_ratio_deviation", dev)


def _run_grid(cfg, obj, out, summary):
    ens, grid, width, g = obj["ensemble"], obj["grid"], obj["width"], obj["g"]
    fields = field_grid(ens, grid)
    fields.to_csv(out / "fields.csv")
    current_density(ens, grid, width).to_csv(out / "current.csv")
    exclusion = g["exclusion"] if g["exclusion"] > 0 else None
    res = maxwell_residual(ens, grid, width, exclusion)
    res.to_csv(out / "residual.csv")
    summary.add("n_sources", len(ens))
    summary.add("grid.nodes", grid.size)
    summary.add("width", res.metadata["width"])
    summary.add("exclusion", res.metadata["exclusion"])
    summary.add("nearest_node", res.metadata["nearest_node"])
    summary.add("resolution_warning", res.metadata["resolution_warning"])
    summary.add("residual_max", res.metadata["max_abs"])
    if g["convergence_radius"] > 0:
        coarse, fine, ratio = residual_convergence(ens, grid, g["convergence_radius"], width)
        write_rows(out / "convergence.csv", ("component", "coarse_max", "fine_max", "ratio"),
                   np.column_stack([np.arange(4), coarse, fine, ratio]))
        summary.add("convergence_radius", g["convergence_radius"])
        summary.add("convergence_ratio", ratio)
        # components that vanish identically carry no convergence information
        live = np.isfinite(ratio) & (coarse > 1e-12 * max(float(np.nanmax(coarse)), 1e-300))
        worst = float(ratio[live].min()) if live.any() else math.inf
        summary.check("convergence_ratio_min", worst, g["min_convergence_ratio"],
                      passed=worst >= g["min_convergence_ratio"])


def _run_gauss(cfg, obj, out, summary):
    ens, q = obj["ensemble"], obj["q"]
    charges = ens.weights[:, 0]
    rows, worst = [], 0.0
    for i, (name, s) in enumerate(obj["spheres"]):
        c = np.array(s["center"])
        inside = np.linalg.norm(ens.centers - c, axis=1) < s["radius"]
        expected = float(charges[inside].sum())
        flux = gauss_flux(ens, c, s["radius"], q["n_theta"], q["n_phi"])
        scale = cfg.coupling * max(int(inside.sum()), 1)
        rel = abs(flux - expected) / scale
        worst = max(worst, rel)
        rows.append([i, *c, s["radius"], int(inside.sum()), flux, expected, rel])
        summary.add(f"{name}.flux", flux)
        summary.add(f"{name}.expected", expected)
    write_rows(out / "flux.csv",
               ("sphere", "cx", "cy", "cz", "radius", "enclosed", "flux", "expected", "rel_error"),
               rows)
    summary.add("coupling", cfg.coupling)
    summary.check("flux_rel_error", worst, q["flux_rtol"])


def _run_ab(cfg, obj, out, summary):
    model, geometry, s, geo, q = obj["model"], obj["geometry"], obj["s"], obj["geo"], obj["q"]
    steps = q["steps_per_segment"] or None
    e = cfg.coupling
    ref = interference_pattern(geometry, None, e)
    pat = interference_pattern(geometry, model, e, steps)
    pat.to_csv(out / "pattern.csv")
    if geo["write_phases"]:
        pat.phases_to_csv(out / "phases.csv")
    spacing = geometry.fringe_spacing()
    y0 = locate_maximum(ref.y, ref.intensity, 0.0)
    y1 = locate_maximum(pat.y, pat.intensity, y0)
    # AB phase: change of the two-path phase difference caused by the solenoid
    ab = (pat.phase1 - pat.phase2) - (ref.phase1 - ref.phase2)
    i0 = int(np.argmin(np.abs(pat.y)))
    summary.add("variant", s["variant"])
    summary.add("fringe_spacing", spacing)
    summary.add("reference_maximum", y0)
    summary.add("central_maximum", y1)
    summary.add("fringe_shift", (y1 - y0) / spacing)
    summary.add("ab_phase", float(ab[i0]))
    summary.add("ab_phase_spread", float(np.ptp(ab)))
    summary.add("intensity_max", float(pat.intensity.max()))
    summary.add("intensity_min", float(pat.intensity.min()))
    if s["variant"] == "ideal_infinite":
        expected = e * s["flux"]
        summary.add("expected_ab_phase", expected)
        summary.add("expected_fringe_shift", wrap_phase(expected) / (2 * math.pi))
        summary.check("ab_phase_error", float(np.abs(wrap_phase(ab - expected)).max()), 1e-4)
        summary.check("fringe_shift_error",
                      abs((y1 - y0) / spacing - wrap_phase(expected) / (2 * math.pi)),
                      geo["shift_tol"])


def _run_boost(cfg, obj, out, summary):
    params, modes, b = obj["params"], obj["modes"], obj["b"]
    boosted = boost_mode_set(modes, params)
    write_modes_csv(out / "modes.csv", modes)
    write_modes_csv(out / "modes_boosted.csv", boosted)
    speeds = np.array([phase_velocity(m) for m in boosted])
    v = abs(params.velocity)
    rng = np.random.default_rng(b["seed"])
    t = rng.uniform(-10, 10, b["n_events"])
    x = rng.uniform(-10, 10, (b["n_events"], 3))
    t2, x2 = boost_events(params, t, x)
    invariance = float(np.abs(sample_field(modes, x, t) - sample_field(boosted, x2, t2)).max())
    norms = [abs((m2.omega ** 2 - np.dot(m2.k, m2.k)) - (m.omega ** 2 - np.dot(m.k, m.k)))
             / max(np.dot(m.k, m.k), 1.0) for m, m2 in zip(modes, boosted)]
    write_rows(out / "phase_velocity.csv", ("mode", "omega", "k_norm", "phase_velocity"),
               np.column_stack([np.arange(len(boosted)), [m.omega for m in boosted],
                                [np.linalg.norm(m.k) for m in boosted], speeds]))
    summary.add("velocity", params.velocity)
    summary.add("axis", "xyz"[params.axis])
    summary.add("gamma", params.gamma)
    summary.add("n_modes", len(modes))
    summary.add("max_phase_velocity", float(speeds.max()))
    summary.add("n_events", b["n_events"])
    summary.add("seed", b["seed"])
    summary.check("phase_velocity_excess", float(speeds.max()) - v, PHASE_VELOCITY_SLACK)
    summary.check("fourier_invariance_error", invariance, b["invariance_tol"])
    summary.check("minkowski_norm_error", float(max(norms)), 1e-10)


RUNNERS = {
    "spinor": _run_spinor,
    "amplitude": _run_amplitude,
    "field-grid": _run_grid,
    "gauss-flux": _run_gauss,
    "ab-pattern": _run_ab,
    "boost-modes": _run_boost,
}


# --------------------------------------------------------------------------
# entry points

def validate(path, kind=None):
    """Diagnostics for a scenario file without running anything.

    Returns (exit_code, lines). An unreadable or unparseable file gives
    exit 1 with a single line; otherwise every violated invariant is listed.
    """
    try:
        cfg = cfgmod.load(path, kind)
    except ConfigError as exc:
        return EXIT_CONFIG, [f"config: {exc}"]
    _, lines = build(cfg)
    return (EXIT_CONFIG if lines else EXIT_OK), lines


def run(cfg: ScenarioConfig, out_dir=None, stream=sys.stdout) -> int:
    objects, lines = build(cfg)
    if lines:
        for line in lines:
            print(f"error: {line}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(out_dir or cfg.output or f"{cfg.kind}-output")
    out.mkdir(parents=True, exist_ok=True)
    summary = Summary(cfg.kind)
    try:
        RUNNERS[cfg.kind](cfg, objects, out, summary)
    except PrecisionError as exc:
        summary.add("precision_error", str(exc))
        if exc.achieved is not None:
            summary.add("precision_error.achieved", exc.achieved)
        summary.write(out / "summary.txt")
        print(f"precision failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (DomainError, ResolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    summary.write(out / "summary.txt")
    for name, achieved, tol in summary.failures:
        print(f"precision failure: {name} = {achieved:.3e} exceeds tolerance {tol:.3e}",
              file=sys.stderr)
    if summary.failures:
        return EXIT_PRECISION
    print(f"wrote {out}", file=stream)
    return EXIT_OK


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="qedfields", description=__doc__.splitlines()[0])
    ap.add_argument("kind", choices=KINDS)
    ap.add_argument("--config", required=True, help="scenario file")
    ap.add_argument("--out", help="output directory (overrides scenario.output)")
    ap.add_argument("--validate", action="store_true", help="check the scenario, run nothing")
    args = ap.parse_args(argv)
    if args.validate:
        code, lines = validate(args.config, args.kind)
        for line in lines:
            print(line)
        if code == EXIT_OK:
            print("ok: no diagnostics")
        return code
    try:
        cfg = cfgmod.load(args.config, args.kind)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg, args.out)


if __name__ == "__main__":
    sys.exit(main())
