"""Command line entry points.

Subcommands: identities, solve, persistence, weights, commutators.
Configuration is an INI file (sections of key = value); every resolved
value is echoed into the run manifest.  Exit codes: 0 pass, 1
quantitative failure, 2 precondition or configuration refusal.
"""

import argparse
import configparser
import json
import os
import sys
import time

import numpy as np

from . import fracops, persistence_lab, weights
from .bo_solver import (SolverConfig, conserved, evolve, first_moment_rate,
                        resolve_convention, soliton)
from .errors import (BlowUpError, ConstructionError, ConventionError,
                     PreconditionError)
from .lineops import LineCalculus
from .spectral_core import Field, Grid
from .storage import (write_csv, write_field, write_manifest,
                      write_norm_series_csv)
from .weights import NormRecord, build_weight, z_norm


def _load_config(path, section, defaults):
    """Resolve a config section over defaults; unknown keys are refused."""
    values = dict(defaults)
    if path:
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise PreconditionError("config file %r not found" % path)
        if parser.has_section(section):
            for key, raw in parser.items(section):
                if key not in defaults:
                    raise PreconditionError(
                        "unknown config key %r in section [%s]"
                        % (key, section))
                values[key] = raw
    out = {}
    for key, default in defaults.items():
        raw = values[key]
        if isinstance(default, bool):
            out[key] = str(raw).strip().lower() in ("1", "true", "yes", "on")
        elif isinstance(default, int):
            out[key] = int(raw)
        elif isinstance(default, float):
            out[key] = float(raw)
        else:
            out[key] = str(raw)
    return out


def _parse_float_list(text):
    return [float(tok) for tok in str(text).split(",") if tok.strip()]


def _out_path(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _say(args, message):
    if not args.quiet:
        print(message)


# identities ---------------------------------------------------------------

IDENTITY_DEFAULTS = {
    "n": 4096,
    "half_length": 128.0,
    "tol": 1e-10,
    "data": "gaussian",
}


def cmd_identities(args):
    cfg = _load_config(args.config, "identities", IDENTITY_DEFAULTS)
    grid = Grid(cfg["n"], cfg["half_length"])
    if cfg["data"] == "gaussian":
        f = Field(grid, np.exp(-grid.x ** 2))
        descriptor = "centered gaussian"
    elif cfg["data"] == "dipole":
        f = Field(grid, -2.0 * grid.x * np.exp(-grid.x ** 2))
        descriptor = "gaussian dipole"
    else:
        raise PreconditionError("identities data must be gaussian or dipole")
    dipole = Field(grid, -2.0 * grid.x * np.exp(-grid.x ** 2))
    calculus = LineCalculus(grid)
    reports = []
    start = time.perf_counter()
    for tag in fracops.IDENTITY_TAGS:
        probe = dipole if tag == "Id3" else f
        desc = "gaussian dipole" if tag == "Id3" else descriptor
        reports.append(fracops.check_identity(tag, probe, calculus,
                                              tol=cfg["tol"],
                                              descriptor=desc))
    elapsed = time.perf_counter() - start
    rows = [(r.identity_id, r.residual_l2, r.normalizer, r.tol,
             int(r.passed)) for r in reports]
    csv_path = _out_path(args, "identities.csv")
    json_path = _out_path(args, "identities.json")
    write_csv(csv_path, ["identity", "residual_l2", "normalizer", "tol",
                         "passed"], rows)
    with open(json_path, "w") as fh:
        json.dump({"grid": {"n": grid.n, "half_length": grid.half_length},
                   "reports": [r.as_dict() for r in reports]},
                  fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_manifest(_out_path(args, "identities_manifest.json"),
                   "identities", cfg, args.seed,
                   {"identities.csv": csv_path, "identities.json": json_path},
                   wall_time=elapsed)
    ok = all(r.passed for r in reports)
    for r in reports:
        _say(args, "%-5s residual %.3e  %s" % (r.identity_id, r.residual_l2,
                                               "pass" if r.passed else "FAIL"))
    return 0 if ok else 1


# solve --------------------------------------------------------------------

SOLVE_DEFAULTS = {
    "preset": "soliton",
    "n": 4096,
    "half_length": 256.0,
    "dt": 2.5e-3,
    "t_end": 5.0,
    "c": 1.0,
    "dispersion_sign": 1.0,
    "snapshots": 10,
    "s": 1.0,
    "r": 1.0,
    "resolution_scan": False,
}


def cmd_solve(args):
    cfg = _load_config(args.config, "solve", SOLVE_DEFAULTS)
    grid = Grid(cfg["n"], cfg["half_length"])
    sigma = cfg["dispersion_sign"]
    extra = {}
    if cfg["preset"] == "soliton":
        verdict = resolve_convention()
        sigma = verdict["sigma"]
        u0 = soliton(cfg["c"], 0.0, grid, verdict["soliton_sign"])
        extra["convention_verdict"] = {k: v for k, v in verdict.items()
                                       if k != "table"}
        extra["convention_table"] = verdict["table"]
    elif cfg["preset"] == "gaussian":
        u0 = Field(grid, np.exp(-grid.x ** 2))
    elif cfg["preset"] == "zero":
        u0 = Field(grid, np.zeros(grid.n))
    else:
        raise PreconditionError("solve preset must be soliton, gaussian "
                                "or zero")
    nsteps = max(1, int(round(cfg["t_end"] / cfg["dt"])))
    stride = max(1, nsteps // max(1, cfg["snapshots"]))
    solver_cfg = SolverConfig(grid, cfg["dt"], cfg["t_end"],
                              dispersion_sign=sigma,
                              snapshot_stride=stride)
    try:
        run = evolve(u0, solver_cfg)
    except BlowUpError as exc:
        write_manifest(_out_path(args, "solve_manifest.json"), "solve",
                       cfg, args.seed, {},
                       extra={"aborted": True,
                              "abort_time": exc.last_time})
        _say(args, "run aborted by blow-up at t = %g" % exc.last_time)
        return 1
    records = [z_norm(Field(grid, u), cfg["s"], cfg["r"], t=t)
               for t, u in zip(run.times, run.snapshots)]
    csv_path = _out_path(args, "norm_series.csv")
    write_norm_series_csv(csv_path, records, cfg["s"], cfg["r"])
    field_path = _out_path(args, "final_state.bof")
    write_field(field_path, run.final(grid))
    outputs = {"norm_series.csv": csv_path, "final_state.bof": field_path}

    c0 = conserved(u0, sigma)
    c1 = conserved(run.final(grid), sigma)
    extra["conservation_drift"] = {
        "I1": abs(c1.i1 - c0.i1) / (abs(c0.i1) + 1e-300),
        "I2": abs(c1.i2 - c0.i2) / (abs(c0.i2) + 1e-300),
        "I3": abs(c1.i3 - c0.i3) / (abs(c0.i3) + 1e-300),
    }
    if cfg["preset"] == "soliton":
        sign = extra["convention_verdict"]["soliton_sign"]
        direction = extra["convention_verdict"]["direction"]
        ref = soliton(cfg["c"], direction * cfg["c"] * cfg["t_end"], grid,
                      sign)
        err = (run.final(grid) - ref).l2_norm() / ref.l2_norm()
        extra["shape_error"] = err
        if cfg["resolution_scan"]:
            rows = []
            for n_scan in (grid.n // 4, grid.n // 2, grid.n):
                g2 = Grid(n_scan, grid.half_length)
                dt2 = min(cfg["dt"], 2.0 / g2.xi_max ** 2)
                scfg = SolverConfig(g2, dt2, cfg["t_end"],
                                    dispersion_sign=sigma)
                u2 = evolve(soliton(cfg["c"], 0.0, g2, sign),
                            scfg).final(g2)
                ref2 = soliton(cfg["c"], direction * cfg["c"] * cfg["t_end"],
                               g2, sign)
                rows.append((n_scan, g2.half_length,
                             (u2 - ref2).l2_norm() / ref2.l2_norm()))
            scan_path = _out_path(args, "shape_error.csv")
            write_csv(scan_path, ["n", "half_length", "shape_error"], rows)
            outputs["shape_error.csv"] = scan_path
    if cfg["preset"] == "gaussian":
        extra["first_moment_fit"] = first_moment_rate(run.times,
                                                      run.snapshots, grid)
    write_manifest(_out_path(args, "solve_manifest.json"), "solve", cfg,
                   args.seed, outputs, extra=extra,
                   wall_time=run.wall_time, steps=run.steps)
    _say(args, "run complete: %d steps, I2 drift %.2e"
         % (run.steps, extra["conservation_drift"]["I2"]))
    return 0


# persistence --------------------------------------------------------------

PERSISTENCE_DEFAULTS = {
    "family": "gaussian",
    "r_list": "2.0,2.6",
    "s_list": "0.0",
    "t_end": 1.0,
    "dt": 1e-3,
    "dx": 0.0625,
    "base_half_length": 64.0,
    "theta": 0.3,
    "budgets": True,
    "gamma": 0.7,
}


def cmd_persistence(args):
    cfg = _load_config(args.config, "persistence", PERSISTENCE_DEFAULTS)
    r_list = _parse_float_list(cfg["r_list"])
    s_list = _parse_float_list(cfg["s_list"])
    if not r_list:
        raise PreconditionError("empty r list")
    ladder = []
    for j in range(args.ladder_levels):
        half = cfg["base_half_length"] * 2 ** j
        n = int(round(2 * half / cfg["dx"]))
        ladder.append((n, half))
    params = {"gamma": cfg["gamma"]} if cfg["family"] == "fourier-cusp" \
        else {}
    spec = persistence_lab.ExperimentSpec(
        cfg["family"], params, r_list, s_list, ladder, cfg["dt"],
        t_window=(0.0, cfg["t_end"]), theta=cfg["theta"])
    start = time.perf_counter()
    report = persistence_lab.run_persistence(spec)
    elapsed = time.perf_counter() - start

    rows = []
    for (s, r), entry in sorted(report.entries.items()):
        for level, norm_sq in enumerate(entry["norms_sq"]):
            rows.append((cfg["family"], r, level, norm_sq,
                         entry["verdict"]))
    csv_path = _out_path(args, "persistence_scan.csv")
    write_csv(csv_path, ["family", "r", "level", "norm_sq", "verdict"],
              rows)

    budget_rows = []
    if cfg["budgets"]:
        n0, half0 = ladder[-1]
        grid = Grid(n0, half0)
        u0 = persistence_lab.make_data(cfg["family"], params, grid)
        nsteps = max(1, int(round(cfg["t_end"] / cfg["dt"])))
        run_cfg = SolverConfig(grid, cfg["dt"], cfg["t_end"],
                               snapshot_stride=max(1, nsteps // 64))
        run = evolve(u0, run_cfg)
        for cap in (16, 32, 64):
            for variant in ("step1", "step3"):
                b = persistence_lab.smoothing_budget(
                    run.times, run.snapshots, grid, cfg["theta"], variant,
                    cap)
                budget_rows.append((cfg["theta"], variant, cap, b["value"],
                                    b["stride_audit"]))
    budget_path = _out_path(args, "smoothing_budget.csv")
    write_csv(budget_path, ["theta", "variant", "cap_scale", "value",
                            "stride_audit"], budget_rows)

    json_path = _out_path(args, "persistence_report.json")
    with open(json_path, "w") as fh:
        json.dump(report.as_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_manifest(_out_path(args, "persistence_manifest.json"),
                   "persistence", cfg, args.seed,
                   {"persistence_scan.csv": csv_path,
                    "smoothing_budget.csv": budget_path,
                    "persistence_report.json": json_path},
                   wall_time=elapsed)
    for (s, r), entry in sorted(report.entries.items()):
        _say(args, "family=%s s=%g r=%g verdict=%s"
             % (cfg["family"], s, r, entry["verdict"]))
    return 0


# weights ------------------------------------------------------------------

WEIGHTS_DEFAULTS = {
    "beta_list": "-0.6,-0.5,-0.49,-0.4,-0.2,0.2,0.4,0.49,0.5,0.6",
    "levels": 24,
    "base_half": 8.0,
    "audit_caps": "16,64,256",
    "n": 4096,
    "half_length": 2048.0,
}


def cmd_weights(args):
    cfg = _load_config(args.config, "weights", WEIGHTS_DEFAULTS)
    betas = _parse_float_list(cfg["beta_list"])
    rows = []
    mismatches = 0
    for beta in betas:
        for kind in ("angle", "abs"):
            scan = weights.a2_constant(beta, kind, levels=cfg["levels"],
                                       base_half=cfg["base_half"])
            expected = "finite" if abs(beta) < 0.5 else "divergent"
            if scan["classification"] != expected:
                mismatches += 1
            for level, value in enumerate(scan["levels"]):
                rows.append((beta, kind, level, value,
                             scan["classification"]))
    csv_path = _out_path(args, "a2_scan.csv")
    write_csv(csv_path, ["beta", "weight_kind", "level", "constant",
                         "classification"], rows)

    grid = Grid(cfg["n"], cfg["half_length"])
    certificates = []
    for cap in (int(v) for v in _parse_float_list(cfg["audit_caps"])):
        w = build_weight(cap, 1.0, grid)
        certificates.append(w.audit)
    cert_path = _out_path(args, "weight_audits.json")
    with open(cert_path, "w") as fh:
        json.dump(certificates, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_manifest(_out_path(args, "weights_manifest.json"), "weights",
                   cfg, args.seed, {"a2_scan.csv": csv_path,
                                    "weight_audits.json": cert_path})
    _say(args, "A2 scan: %d weights, %d classification mismatches"
         % (len(betas) * 2, mismatches))
    return 0 if mismatches == 0 else 1


# commutators --------------------------------------------------------------

COMMUTATOR_DEFAULTS = {
    "n": 2048,
    "half_length": 128.0,
    "trials": 100,
    "alpha": 0.5,
    "beta": 0.5,
    "leibniz_s": 1.7,
}


def cmd_commutators(args):
    cfg = _load_config(args.config, "commutators", COMMUTATOR_DEFAULTS)
    grid = Grid(cfg["n"], cfg["half_length"])
    rng = np.random.default_rng(args.seed)
    eta = Field(grid, np.tanh(grid.x))
    gauss = Field(grid, np.exp(-grid.x ** 2))
    rows = []
    ens = {
        "I1_j1k0": [], "I2": [], "I6a": [], "I6b": [],
        "I5a": [], "I5b": [],
    }
    for _ in range(cfg["trials"]):
        f = fracops.random_band_limited(grid, rng)
        ens["I1_j1k0"].append(fracops.calderon_commutator(eta, f, 1, 0))
        ens["I2"].append(fracops.smoothing_commutator(
            cfg["alpha"], cfg["beta"], eta, f, "i2"))
        ens["I6a"].append(fracops.smoothing_commutator(
            cfg["alpha"], None, eta, f, "i6a"))
        ens["I6b"].append(fracops.smoothing_commutator(
            cfg["alpha"], None, eta, f, "i6b"))
        rj, rd = fracops.leibniz_check(cfg["leibniz_s"], f, gauss)
        ens["I5a"].append(rj)
        ens["I5b"].append(rd)
    finite = True
    for name, ratios in sorted(ens.items()):
        arr = np.asarray(ratios)
        if not np.all(np.isfinite(arr)):
            finite = False
        rows.append((name, len(ratios), float(np.max(arr)),
                     float(np.mean(arr))))
        _say(args, "%-8s max ratio %.4f" % (name, float(np.max(arr))))
    csv_path = _out_path(args, "commutator_ratios.csv")
    write_csv(csv_path, ["inequality", "trials", "max_ratio", "mean_ratio"],
              rows)
    write_manifest(_out_path(args, "commutators_manifest.json"),
                   "commutators", cfg, args.seed,
                   {"commutator_ratios.csv": csv_path})
    return 0 if finite else 1


# entry point --------------------------------------------------------------

COMMANDS = {
    "identities": cmd_identities,
    "solve": cmd_solve,
    "persistence": cmd_persistence,
    "weights": cmd_weights,
    "commutators": cmd_commutators,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bolab",
        description="Spectral laboratory for the Benjamin-Ono equation")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", default=None,
                        help="INI configuration file")
    parser.add_argument("--seed", type=int, default=0,
                        help="random seed for ensemble suites")
    parser.add_argument("--out", default="bolab_out",
                        help="output directory")
    parser.add_argument("--ladder-levels", type=int, default=3,
                        help="grid ladder depth for persistence runs")
    parser.add_argument("--quiet", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (PreconditionError, ConstructionError, ConventionError) as exc:
        print("refused: %s" % exc, file=sys.stderr)
        return 2
    except configparser.Error as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
