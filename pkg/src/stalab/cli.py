"""Experiment runner: subcommand dispatch, artifacts, reproduction harness.

Every subcommand writes, inside its output directory:

    config.resolved.json   the fully resolved run configuration
    *.csv                  result tables (fixed column order)
    *.svg                  line/scatter figures
    report.json            measured quantities plus pass/fail per assertion

Exit codes: 0 success, 1 assertion failure (with --assert), 2 usage or
configuration error.  The environment variable STA_OUTPUT_DIR overrides
the output root.  Identical configurations produce byte-identical CSVs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import classical, meanfield, morse, potentials, quantum1d, schedules
from .report import InvariantReport, format_float, relative_drift
from .svgplot import LinePlot

__all__ = ["main"]


# --- helpers --------------------------------------------------------------

def _out_dir(args, name: str) -> Path:
    root = os.environ.get("STA_OUTPUT_DIR", "")
    if args.out:
        base = Path(args.out)
    elif root:
        base = Path(root) / name
    else:
        base = Path("sta-out") / name
    base.mkdir(parents=True, exist_ok=True)
    return base


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x)}")


def _resolved_config(args, skip=("func",)) -> dict:
    return {k: v for k, v in sorted(vars(args).items())
            if k not in skip and not k.startswith("_")}


def _parse_params(pairs) -> dict:
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise SystemExit(_usage_error(f"--param expects key=value, got {item!r}"))
        key, val = item.split("=", 1)
        try:
            out[key] = float(val)
        except ValueError:
            out[key] = val
    return out


def _usage_error(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 2


def _build_potential(name: str, params: dict, mass: float):
    name = name.replace("_", "-")
    if name == "harmonic":
        return potentials.harmonic(params.get("omega0", 1.0), mass)
    if name == "quartic":
        return potentials.quartic(params.get("alpha2", 0.5),
                                  params.get("alpha4", 0.1), mass)
    if name == "morse":
        return potentials.morse(params.get("depth", 1.0),
                                params.get("width", 1.0), mass)
    if name in ("gaussian", "gaussian-well"):
        return potentials.gaussian_well(params.get("A", 10.0),
                                        params.get("alpha", 1.0), mass)
    if name in ("power", "power-law"):
        return potentials.power_law(params.get("A", 1.0),
                                    int(params.get("b", 4)), mass)
    if name == "quartic-pure":
        return potentials.quartic(0.0, params.get("alpha4", 1.0), mass)
    if name == "poeschl-teller":
        return potentials.poeschl_teller(params.get("lam", 3.0),
                                         params.get("alpha", 1.0), mass)
    if name == "optical-lattice":
        return potentials.optical_lattice(params.get("A", 5.0),
                                          params.get("alpha", 1.0), mass)
    if name == "box":
        return potentials.box(params.get("L", 1.0), mass)
    raise SystemExit(_usage_error(f"unknown potential {name!r}"))


def _build_schedule(kind: str, gamma_final: float, f_final: float,
                    tau_final: float):
    if kind == "cubic":
        return schedules.make_cubic_schedule(gamma_final, f_final, tau_final)
    if kind == "quintic":
        return schedules.make_quintic_schedule(gamma_final, f_final, tau_final)
    if kind == "constant":
        return schedules.make_constant_schedule(gamma_final, f_final, tau_final)
    raise SystemExit(_usage_error(f"unknown schedule kind {kind!r}"))


def _finish(out: Path, report: dict, do_assert: bool) -> int:
    checks = report.get("checks", [])
    passed = all(c["pass"] for c in checks)
    report["all_pass"] = passed
    _write_json(out / "report.json", report)
    lines = [f"[{'PASS' if c['pass'] else 'FAIL'}] {c['name']}: {c['value']:.3e}"
             f" (threshold {c['threshold']:.3e})" for c in checks]
    print("\n".join(lines) if lines else f"wrote artifacts to {out}")
    if do_assert and not passed:
        return 1
    return 0


def _check(name: str, value: float, threshold: float, larger_ok: bool = False) -> dict:
    ok = value >= threshold if larger_ok else value <= threshold
    return {"name": name, "value": float(value), "threshold": float(threshold),
            "pass": bool(ok)}


# --- subcommands ----------------------------------------------------------

def cmd_schedule_export(args) -> int:
    out = _out_dir(args, "schedule-export")
    sched = _build_schedule(args.schedule, args.gamma_final, args.f_final,
                            args.tau_final)
    ts = np.linspace(0.0, sched.duration, args.samples)
    rows = {k: np.empty(args.samples) for k in
            ("t", "gamma", "dgamma", "ddgamma", "f", "df", "ddf", "tau",
             "chi", "omega_sq_cd")}
    for i, t in enumerate(ts):
        s = sched.sample(float(t))
        rows["t"][i] = s.t
        rows["gamma"][i] = s.gamma
        rows["dgamma"][i] = s.dgamma
        rows["ddgamma"][i] = s.ddgamma
        rows["f"][i] = s.f
        rows["df"][i] = s.df
        rows["ddf"][i] = s.ddf
        rows["tau"][i] = s.tau
        rows["chi"][i] = (-s.ddf / sched.f_final if sched.f_final != 0.0
                          else math.nan)
        rows["omega_sq_cd"][i] = (args.omega0 ** 2 / s.gamma ** 4
                                  - s.ddgamma / s.gamma)
    InvariantReport(columns=rows).write_csv(out / "schedule.csv")
    plot = LinePlot("drive schedule", "t", "value")
    plot.line(ts, rows["gamma"], "gamma")
    if sched.f_final != 0.0:
        plot.line(ts, rows["f"], "f")
    plot.line(ts, rows["tau"], "tau", dashed=True)
    plot.write(out / "schedule.svg")

    checks = []
    if sched.kind in ("cubic", "quintic"):
        bc = max(abs(rows["gamma"][0] - 1.0), abs(rows["dgamma"][0]),
                 abs(rows["gamma"][-1] - sched.gamma_final),
                 abs(rows["dgamma"][-1]), abs(rows["f"][0]), abs(rows["df"][0]),
                 abs(rows["f"][-1] - sched.f_final), abs(rows["df"][-1]))
        if sched.kind == "quintic":
            bc = max(bc, abs(rows["ddgamma"][0]), abs(rows["ddgamma"][-1]),
                     abs(rows["ddf"][0]), abs(rows["ddf"][-1]))
        checks.append(_check("boundary_conditions", bc, 1e-12))
        checks.append(_check("tau_monotone",
                             float(np.min(np.diff(rows["tau"]))), 0.0,
                             larger_ok=True))
    report = {"config": _resolved_config(args), "checks": checks}
    _write_json(out / "config.resolved.json", _resolved_config(args))
    return _finish(out, report, args.do_assert)


def cmd_catalog_dump(args) -> int:
    out = _out_dir(args, "catalog-dump")
    defaults = {
        "power-law": {"A": 1.0, "b": 4.0},
        "modified-poschl-teller": {"lam": 3.0, "alpha": 1.0},
        "optical-lattice": {"A": 5.0, "alpha": 1.0},
        "gaussian-well": {"A": 10.0, "alpha": 1.0},
        "morse": {"A": 1.0, "B": 1.0, "alpha": 1.0},
        "finite-square-well": {"A": 10.0, "alpha": 1.0},
    }
    payload = []
    for name in potentials.catalog_names():
        entry = potentials.catalog_entry(name)
        params = defaults[name]
        payload.append({
            "name": name,
            "parameters": params,
            "scaling_exponents": entry.exponents(params),
            "cd_modulation": entry.cd_formula,
        })
    _write_json(out / "catalog.json", {"entries": payload})
    _write_json(out / "config.resolved.json", _resolved_config(args))
    print(f"wrote {len(payload)} catalog rows to {out / 'catalog.json'}")
    return 0


def cmd_classical_run(args) -> int:
    out = _out_dir(args, "classical-run")
    spec = _build_potential(args.potential, _parse_params(args.param), args.mass)
    sched = _build_schedule(args.schedule, args.gamma_final, args.f_final,
                            args.tau_final)
    dp = potentials.DrivenPotential(spec, sched)
    frame = classical.Frame(args.frame)
    cfg = classical.IntegratorConfig(rtol=args.tol, atol=args.tol,
                                     n_samples=args.samples)
    traj = classical.integrate(frame, dp, classical.PhasePoint(args.q0, args.p0),
                               0.0, sched.duration, cfg)
    rep = InvariantReport(columns={
        "t": traj.t, "q": traj.q, "p": traj.p, "H": traj.energy,
        "omega": traj.omega, "I": traj.invariant,
    })
    rep.write_csv(out / "trajectory.csv")
    plot = LinePlot(f"{args.potential} / {frame.value} frame", "q", "p")
    plot.line(traj.q, traj.p, "trajectory")
    plot.write(out / "phase_portrait.svg")

    omega_drift = relative_drift(traj.omega)
    inv_drift = relative_drift(traj.invariant)
    checks = []
    if frame is classical.Frame.CD:
        checks.append(_check("omega_drift", omega_drift, args.assert_omega_drift))
        checks.append(_check("invariant_drift", inv_drift, 1e-6))
    report = {"config": _resolved_config(args),
              "omega_drift": omega_drift, "invariant_drift": inv_drift,
              "checks": checks}
    _write_json(out / "config.resolved.json", _resolved_config(args))
    return _finish(out, report, args.do_assert)


def cmd_box_demo(args) -> int:
    out = _out_dir(args, "box-demo")
    drive = classical.BoxDrive(args.L0, args.rate, args.t0, args.t1)
    z0 = classical.PhasePoint(args.q0, args.p0)
    t_end = args.t1 + 0.25 * (args.t1 - args.t0) + 0.1
    trajs = {}
    for frame in (classical.Frame.CD, classical.Frame.LOCAL, classical.Frame.BARE):
        trajs[frame] = classical.box_simulate(drive, z0, t_end, args.mass, frame)
    cd = trajs[classical.Frame.CD]
    rep = InvariantReport(columns={
        "t": cd.t, "q": cd.q, "p": cd.p, "H": cd.energy,
        "omega": cd.omega, "I": cd.invariant,
    })
    rep.write_csv(out / "box_cd.csv")
    loc = trajs[classical.Frame.LOCAL]
    InvariantReport(columns={
        "t": loc.t, "q": loc.q, "p": loc.p, "H": loc.energy,
        "omega": loc.omega, "I": loc.invariant,
    }).write_csv(out / "box_local.csv")

    # Fig-1-style geometry: dotted bare shells, sheared invariant lines,
    # plus the local-frame trajectory points mid-drive.
    t_mid = 0.5 * (args.t0 + args.t1)
    L_mid = drive.L(t_mid)
    u = drive.rate
    p0 = abs(args.p0)
    qs = np.linspace(0.0, L_mid, 60)
    plot = LinePlot("moving-wall box: shells and sheared invariant", "q", "p")
    plot.line(qs, np.full_like(qs, p0), "bare shell", dashed=True)
    plot.line(qs, np.full_like(qs, -p0), "", dashed=True)
    shear = args.mass * u * qs / L_mid
    plot.line(qs, p0 * drive.L0 / L_mid + shear, "invariant lines")
    plot.line(qs, -p0 * drive.L0 / L_mid + shear, "")
    mask = (loc.t > args.t0) & (loc.t < args.t1)
    plot.scatter(loc.q[mask][::9], loc.p[mask][::9], "local-frame samples")
    plot.write(out / "box_fig.svg")

    # checks: L|p| on the cd track between collisions, energy ratio, shell
    lp = np.asarray([drive.L(t) * abs(p) for t, p in zip(cd.t, cd.p)])
    during = (cd.t >= args.t0) & (cd.t <= args.t1)
    lp_drift = relative_drift(lp[during])
    e0 = trajs[classical.Frame.BARE].energy[0]
    ef = cd.energy[-1]
    ratio_err = abs(ef / e0 - (drive.L0 / drive.L1) ** 2)
    after = loc.t >= args.t1
    shell_err = relative_drift(loc.omega[after])
    checks = [
        _check("Lp_constancy", lp_drift, 1e-9),
        _check("energy_ratio_error", ratio_err, 1e-6),
        _check("post_drive_shell_drift", shell_err, 1e-8),
    ]
    report = {"config": _resolved_config(args), "checks": checks,
              "E_initial": float(e0), "E_final": float(ef)}
    _write_json(out / "config.resolved.json", _resolved_config(args))
    return _finish(out, report, args.do_assert)


def cmd_quantum_run(args) -> int:
    out = _out_dir(args, "quantum-run")
    spec = _build_potential(args.potential, _parse_params(args.param), args.mass)
    sched = _build_schedule(args.schedule, args.gamma_final, args.f_final,
                            args.tau_final)
    grid = quantum1d.SpatialGrid(args.grid_points, -args.extent, args.extent)
    cfg = quantum1d.ShortcutConfig(grid=grid, dt=args.dt, control=args.control)
    rep = quantum1d.shortcut_run(spec, sched, args.n, cfg)
    rep.write_csv(out / "fidelity.csv")

    plot = LinePlot(f"STA run: {args.potential}, n={args.n}", "t", "fidelity")
    plot.line(rep.t, rep.columns["F_vs_Utarget"], "F vs dressed target")
    plot.line(rep.t, rep.columns["F_vs_target"], "F vs target")
    plot.write(out / "fidelity.svg")

    # density snapshots figure
    pairs = quantum1d.solve_eigenstates(spec, grid, args.n)
    psi0 = pairs[args.n].state
    dp = potentials.DrivenPotential(spec, sched)
    times = np.linspace(0.0, sched.duration, 5)
    _, snaps = quantum1d.split_step_propagate(
        psi0, lambda q, t: dp.u_local_cd(q, t, clamp=True), 0.0,
        sched.duration, args.dt, record_times=times)
    dplot = LinePlot("density snapshots", "q", "|psi|^2")
    for t, arr in snaps:
        dplot.line(grid.q, np.abs(arr) ** 2, f"t={t:.2f}")
    dplot.write(out / "density.svg")

    checks = [
        _check("F_end", rep.stats["F_end"], args.assert_fidelity, larger_ok=True),
        _check("F_dressed_min", rep.stats["F_dressed_min"], args.assert_fidelity,
               larger_ok=True),
        _check("norm_drift", rep.stats["norm_drift"], 1e-10),
    ]
    if args.control:
        gap = rep.stats["F_end"] - rep.stats["F_end_control"]
        checks.append(_check("control_gap", gap, args.assert_gap, larger_ok=True))
    report = {"config": _resolved_config(args), "stats": rep.stats,
              "checks": checks}
    _write_json(out / "config.resolved.json", _resolved_config(args))
    return _finish(out, report, args.do_assert)


def cmd_gpe_run(args) -> int:
    out = _out_dir(args, "gpe-run")
    spec = _build_potential(args.potential, _parse_params(args.param), args.mass)
    sched = _build_schedule(args.schedule, args.gamma_final, args.f_final,
                            args.tau_final)
    grid = quantum1d.SpatialGrid(args.grid_points, -args.extent, args.extent)
    model = (meanfield.kolomeisky() if args.model == "kolomeisky"
             else meanfield.gpe(args.g0))
    state = meanfield.ground_state(model, spec, grid)
    dp = potentials.DrivenPotential(spec, sched)
    cfg = meanfield.MeanfieldConfig(dt=args.dt,
                                    freeze_coupling=args.freeze_coupling)
    rep = meanfield.cd_propagate(state, model, dp, cfg)
    rep.write_csv(out / "gpe.csv")

    plot = LinePlot(f"{args.model} CD run", "t", "value")
    plot.line(rep.t, rep.columns["R"], "density residual R")
    plot.line(rep.t, rep.columns["F"], "F vs dressed target")
    plot.write(out / "gpe.svg")

    checks = [
        _check("R_max", rep.stats["R_max"], args.assert_residual),
        _check("norm_drift", rep.stats["norm_drift"], 1e-10),
    ]
    report = {"config": _resolved_config(args), "stats": rep.stats,
              "mu": state.mu, "checks": checks}
    _write_json(out / "config.resolved.json", _resolved_config(args))
    return _finish(out, report, args.do_assert)


def cmd_morse_verify(args) -> int:
    out = _out_dir(args, "morse-verify")
    checks = []
    param_grid = {"scale": (0.6, 0.8, 1.0, 1.3, 1.7),
                  "width": (0.6, 0.8, 1.0, 1.3, 1.7),
                  "depth": (0.6, 0.8, 1.0, 1.5, 2.2)}
    for mode in morse.MODES:
        worst_omega = 0.0
        worst_turn = 0.0
        for val in param_grid[mode.value]:
            lo, _ = morse.bound_range(mode, val)
            for frac in np.linspace(0.04, 0.96, 20):
                E = lo * (1.0 - frac)
                closed = morse.omega_closed_form(mode, val, E)
                quadr = morse.omega_quadrature(mode, val, E)
                if closed > 0:
                    worst_omega = max(worst_omega, abs(quadr - closed) / closed)
                q1, q2 = morse.turning_points(mode, val, E)
                worst_turn = max(
                    worst_turn,
                    abs(float(morse.potential(mode, val, q1)) - E),
                    abs(float(morse.potential(mode, val, q2)) - E))
        checks.append(_check(f"{mode.value}/omega_closed_vs_quadrature",
                             worst_omega, 1e-8))
        checks.append(_check(f"{mode.value}/turning_points", worst_turn, 1e-10))

        val = param_grid[mode.value][3]
        lo, _ = morse.bound_range(mode, val)
        E = 0.45 * lo
        avg = morse.microcanonical_average(
            lambda q, p, _m=mode, _v=val: morse.dlambda_H0(_m, _v, q), mode,
            val, E)
        closed_avg = morse.mc_average_closed_form(mode, val, E)
        rel = abs(avg - closed_avg) / max(abs(closed_avg), 1e-12)
        checks.append(_check(f"{mode.value}/microcanonical_identity", rel, 1e-7))

        resid = morse.xi_pde_residual(mode, val, E)
        rms = float(np.sqrt(np.mean(resid ** 2)))
        tol = 1e-8 if mode is morse.MorseMode.SCALE else 1e-5
        checks.append(_check(f"{mode.value}/xi_pde_residual_rms", rms, tol))

        inc = morse.generator_increment_check(mode, val, E, 0.15, 0.8)
        checks.append(_check(f"{mode.value}/xi_increment_relation", inc, 1e-6))

    report = {"config": _resolved_config(args), "checks": checks,
              "n_checks": len(checks)}
    _write_json(out / "config.resolved.json", _resolved_config(args))
    rc = _finish(out, report, do_assert=True)
    return rc


def cmd_run(args) -> int:
    try:
        cfg = _load_config(args.config)
    except FileNotFoundError:
        return _usage_error(f"config file not found: {args.config}")
    except ValueError as exc:
        return _usage_error(str(exc))
    runs = cfg.get("runs")
    if runs is None:
        runs = [cfg]
    argv_lists = []
    for i, run in enumerate(runs):
        if "subcommand" not in run:
            return _usage_error(f"run #{i}: missing field 'subcommand'")
        argv = [str(run["subcommand"])]
        for key, val in run.items():
            if key == "subcommand":
                continue
            flag = "--" + key.replace("_", "-")
            if isinstance(val, bool):
                if val:
                    argv.append(flag)
            elif isinstance(val, list):
                for item in val:
                    argv.extend([flag, str(item)])
            else:
                argv.extend([flag, str(val)])
        argv_lists.append(argv)
    if args.jobs > 1 and len(argv_lists) > 1:
        import multiprocessing as mp

        with mp.Pool(args.jobs) as pool:
            codes = pool.map(_run_argv, argv_lists)
        return max(codes)
    return max(_run_argv(a) for a in argv_lists)


def _run_argv(argv) -> int:
    return main(argv)


def _load_config(path: str) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".json"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{exc.lineno}: {exc.msg}") from None
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ValueError(f"{path}: {exc}") from None


# --- parser ---------------------------------------------------------------

def _add_common(p, schedule=True):
    p.add_argument("--out", default="", help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--assert", dest="do_assert", action="store_true",
                   help="exit 1 when any check fails")
    if schedule:
        p.add_argument("--schedule", default="quintic",
                       choices=("cubic", "quintic", "constant"))
        p.add_argument("--gamma-final", type=float, default=2.0)
        p.add_argument("--f-final", type=float, default=0.0)
        p.add_argument("--tau-final", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="stalab",
        description="counterdiabatic shortcuts to adiabaticity at desk scale")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("schedule-export", help="sample a drive schedule to CSV")
    _add_common(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--omega0", type=float, default=1.0)
    p.set_defaults(func=cmd_schedule_export)

    p = sub.add_parser("catalog-dump", help="dump the driving catalog as JSON")
    _add_common(p, schedule=False)
    p.set_defaults(func=cmd_catalog_dump)

    p = sub.add_parser("classical-run", help="integrate a classical trajectory")
    _add_common(p)
    p.add_argument("--potential", default="morse")
    p.add_argument("--param", action="append", metavar="KEY=VAL")
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--frame", default="cd",
                   choices=[f.value for f in classical.Frame])
    p.add_argument("--q0", type=float, default=0.0)
    p.add_argument("--p0", type=float, default=0.5)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--assert-omega-drift", type=float, default=1e-7)
    p.set_defaults(func=cmd_classical_run)

    p = sub.add_parser("box-demo", help="moving-wall box shortcut demo")
    _add_common(p, schedule=False)
    p.add_argument("--L0", type=float, default=1.0)
    p.add_argument("--rate", type=float, default=0.5)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, default=2.0)
    p.add_argument("--q0", type=float, default=0.35)
    p.add_argument("--p0", type=float, default=1.3)
    p.add_argument("--mass", type=float, default=1.0)
    p.set_defaults(func=cmd_box_demo)

    p = sub.add_parser("quantum-run", help="quantum STA shortcut run")
    _add_common(p)
    p.add_argument("--potential", default="harmonic")
    p.add_argument("--param", action="append", metavar="KEY=VAL")
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--grid-points", type=int, default=2048)
    p.add_argument("--extent", type=float, default=12.0)
    p.add_argument("--dt", type=float, default=1e-3)
    ctl = p.add_mutually_exclusive_group()
    ctl.add_argument("--control", dest="control", action="store_true",
                     default=True)
    ctl.add_argument("--no-control", dest="control", action="store_false")
    p.add_argument("--assert-fidelity", type=float, default=0.999)
    p.add_argument("--assert-gap", type=float, default=0.05)
    p.set_defaults(func=cmd_quantum_run)

    p = sub.add_parser("gpe-run", help="mean-field CD run")
    _add_common(p)
    p.add_argument("--model", default="gpe", choices=("gpe", "kolomeisky"))
    p.add_argument("--g0", type=float, default=5.0)
    p.add_argument("--potential", default="harmonic")
    p.add_argument("--param", action="append", metavar="KEY=VAL")
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--grid-points", type=int, default=1024)
    p.add_argument("--extent", type=float, default=16.0)
    p.add_argument("--dt", type=float, default=2e-4)
    p.add_argument("--freeze-coupling", action="store_true")
    p.add_argument("--assert-residual", type=float, default=1e-3)
    p.set_defaults(func=cmd_gpe_run)

    p = sub.add_parser("morse-verify", help="run the full closed-form suite")
    _add_common(p, schedule=False)
    p.set_defaults(func=cmd_morse_verify)

    p = sub.add_parser("run", help="run one or more configs from a file")
    p.add_argument("--config", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_run)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
