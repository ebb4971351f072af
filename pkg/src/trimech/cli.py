"""Command-line front end.

Subcommands: derive, steady, linear, sweep, geometry, validate.  Inputs
come from a strict plain-text config (see config.py) or from a bundled
preset; outputs are structured text records, CSV tables (17 significant
digits) and JSON summaries written into the output directory.  Every
output file opens with a header echoing the resolved parameter set and
the tool version, and identical configs produce byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 physics error (no stable
state where one is required, degenerate trap), 4 numerical fault.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, replace

import numpy as np

from . import __version__
from .config import (ConfigError, fmt, format_matrix, format_record,
                     geometry_section, model_section, parse_sections,
                     physical_params, sweep_section)
from .errors import NumericalError, PhysicsError
from .geometry import CavitySpec, PumpGeometry, field_profile_samples, lineshape
from .linear import linear_model, physicality_floor, steady_covariance
from .params import nondimensionalize, reference_params
from .presets import (PRESET_NAMES, fig2_protocol, fig3_model, fig4_model,
                      preset_drives)
from .steady import fixed_point, self_consistent_fixed_points, stationarity_residuals
from .sweeps import (drive_from_watts, occupation_landscape, power_sweep,
                     squeezing_sweep)
from .validate import IntegrationSpec, cross_check

EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_NUMERICS = 4


def _read_config(path):
    if path is None:
        raise ConfigError("an input config is required for this subcommand "
                          "(or use --preset)")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_sections(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc


def _model_from_args(args):
    """Resolve ModelParams (plus optional physical base) from preset/config."""
    if args.preset != "none":
        if args.preset == "fig3":
            return fig3_model(), reference_params()
        if args.preset == "fig4":
            return fig4_model(), reference_params()
        raise ConfigError(f"preset {args.preset!r} does not define a single "
                          "model parameter set")
    sections = _read_config(args.input)
    phys = physical_params(sections)
    detuning, mode = model_section(sections)
    return nondimensionalize(phys, detuning, mode), phys


def _echo_header(mapping):
    lines = [f"# trimech {__version__}"]
    for key, value in mapping.items():
        lines.append(f"# {key} = {value}")
    return "\n".join(lines) + "\n"


def _model_echo(m):
    return {k: (v if isinstance(v, str) else fmt(v))
            for k, v in asdict(m).items()}


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def _csv_table(header_echo, columns, rows):
    lines = [header_echo.rstrip("\n"), ",".join(columns)]
    for row in rows:
        lines.append(",".join(fmt(x) if not isinstance(x, str) else x
                              for x in row))
    return "\n".join(lines) + "\n"


def _json_text(payload):
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# --- subcommands --------------------------------------------------------------

def cmd_derive(args):
    sections = _read_config(args.input)
    phys = physical_params(sections)
    detuning, mode = model_section(sections)
    m = nondimensionalize(phys, detuning, mode)
    record = format_record("model parameters (units of the cavity decay rate)",
                           asdict(m))
    path = _write(os.path.join(args.output_dir, "model_params.txt"), record)
    print(f"wrote {path}")
    return 0


def cmd_steady(args):
    m, _ = _model_from_args(args)
    if m.detuning_mode == "bare":
        states = self_consistent_fixed_points(m)
    else:
        states = [fixed_point(m)]
    blocks = [_echo_header(_model_echo(m))]
    for i, s in enumerate(states):
        res = stationarity_residuals(m, s)
        blocks.append(format_record(
            f"classical steady state, branch {i} of {len(states)}",
            {
                "a_bar": complex(s.a_bar),
                "photon_number": s.photon_number,
                "x1_bar": s.x1_bar,
                "x2_bar": s.x2_bar,
                "Omega1": s.Omega1,
                "Omega2": s.Omega2,
                "delta_eff": s.delta_eff,
                "residual_cavity": res[0],
                "residual_p1": res[1],
                "residual_p2": res[2],
            }))
    path = _write(os.path.join(args.output_dir, "steady_state.txt"),
                  "\n".join(blocks))
    print(f"wrote {path} ({len(states)} branch(es))")
    return 0


def cmd_linear(args):
    m, _ = _model_from_args(args)
    if m.detuning_mode == "bare":
        states = self_consistent_fixed_points(m)
    else:
        states = [fixed_point(m)]
    blocks = [_echo_header(_model_echo(m))]
    summary = []
    for i, s in enumerate(states):
        lm = linear_model(m, s)
        blocks.append(format_matrix(f"drift matrix A, branch {i}", lm.drift))
        blocks.append(format_matrix(f"diffusion matrix D, branch {i}",
                                    lm.diffusion))
        eig_map = {}
        for j, ev in enumerate(np.sort_complex(lm.eigenvalues)):
            eig_map[f"eig_{j}"] = complex(ev)
        eig_map["stable"] = "true" if lm.stable else "false"
        blocks.append(format_record(f"eigenvalues, branch {i}", eig_map))
        if lm.stable:
            cov = steady_covariance(lm)
            blocks.append(format_matrix(f"covariance V, branch {i}", cov.V))
            blocks.append(format_record(f"derived scalars, branch {i}", {
                "n1": cov.n1, "n2": cov.n2,
                "var_x1": cov.var_x1, "var_p1": cov.var_p1,
                "var_x2": cov.var_x2, "var_p2": cov.var_p2,
                "S1": cov.S1, "S2": cov.S2,
                "physicality_floor": physicality_floor(cov.V),
            }))
            summary.append((i, True))
        else:
            summary.append((i, False))
    if not any(ok for _, ok in summary):
        raise PhysicsError("no stable branch; covariance undefined everywhere")
    path = _write(os.path.join(args.output_dir, "linear.txt"),
                  "\n".join(blocks))
    print(f"wrote {path}")
    return 0


def _sweep_from_preset(args):
    if args.preset == "fig3":
        m = fig3_model()
        drives = preset_drives("fig3")
        result = power_sweep(m, drives, base=reference_params())
        return "power", m, _model_echo(m), result
    if args.preset == "fig4":
        m = fig4_model()
        drives = preset_drives("fig4")
        result = squeezing_sweep(m, drives, base=reference_params())
        return "squeezing", m, _model_echo(m), result
    if args.preset == "fig2":
        proto = fig2_protocol()
        result = occupation_landscape(
            proto["base"], proto["omega1"], proto["omega2"],
            detuning_bounds=proto["detuning_bounds"],
            drive_bounds=proto["drive_bounds"], threads=args.threads)
        echo = _model_echo(proto["base"])
        echo["detuning_bounds"] = str(proto["detuning_bounds"])
        echo["drive_bounds"] = str(proto["drive_bounds"])
        return "landscape", None, echo, result
    raise ConfigError(f"unknown preset {args.preset!r}")


def _sweep_from_config(args):
    sections = _read_config(args.input)
    phys = physical_params(sections)
    spec = sweep_section(sections)
    kind = spec["kind"]
    if kind == "landscape":
        for key in ("omega1_min", "omega1_max", "omega1_count",
                    "omega2_min", "omega2_max", "omega2_count"):
            if key not in spec:
                raise ConfigError("missing mandatory key for landscape sweep",
                                  key=key)
        omega1 = np.linspace(spec["omega1_min"], spec["omega1_max"],
                             spec["omega1_count"])
        omega2 = np.linspace(spec["omega2_min"], spec["omega2_max"],
                             spec["omega2_count"])
        bounds_det = (spec.get("detuning_min", -45.0),
                      spec.get("detuning_max", -2.0))
        bounds_drv = (spec.get("drive_min", 1e6), spec.get("drive_max", 1e12))
        result = occupation_landscape(phys, omega1, omega2, bounds_det,
                                      bounds_drv, threads=args.threads)
        echo = _model_echo(phys)
        echo["detuning_bounds"] = str(bounds_det)
        echo["drive_bounds"] = str(bounds_drv)
        return "landscape", None, echo, result
    detuning, mode = model_section(sections)
    if mode != "effective":
        raise ConfigError("power sweeps require detuning_mode = effective")
    m = nondimensionalize(phys, detuning, mode)
    for key in ("points", "power_min", "power_max"):
        if key not in spec:
            raise ConfigError("missing mandatory key for power sweep", key=key)
    lo_kind, lo = spec["power_min"]
    hi_kind, hi = spec["power_max"]
    if lo_kind != hi_kind:
        raise ConfigError("power_min and power_max must both be watts or both "
                          "model-unit drives", key="power_max")
    if lo_kind == "watts":
        drives = drive_from_watts(phys, np.logspace(math.log10(lo),
                                                    math.log10(hi),
                                                    spec["points"]))
    else:
        drives = np.logspace(math.log10(lo), math.log10(hi), spec["points"])
    if kind == "power":
        return "power", m, _model_echo(m), power_sweep(m, drives, base=phys)
    return "squeezing", m, _model_echo(m), squeezing_sweep(m, drives, base=phys)


def cmd_sweep(args):
    if args.preset != "none":
        kind, m, echo_map, result = _sweep_from_preset(args)
    else:
        kind, m, echo_map, result = _sweep_from_config(args)

    echo = _echo_header(echo_map)
    wrote = []
    if kind == "power":
        columns = ["power_w", "drive", "freq_cavity", "freq_mirror",
                   "freq_sphere", "damp_cavity", "damp_mirror", "damp_sphere",
                   "n1", "n2"]
        rows = [
            (result.power_w[i], result.drive[i], *result.freqs[i],
             *result.dampings[i], result.n1[i], result.n2[i])
            for i in range(len(result.drive))
        ]
        summary = {
            "kind": "power",
            "threshold_bracket_drive": result.threshold_bracket,
            "hybridization": result.hybridization,
        }
    elif kind == "squeezing":
        columns = ["power_w", "drive", "var_x1", "var_p1", "var_x2", "var_p2",
                   "S1", "S2"]
        rows = [
            (result.power_w[i], result.drive[i], result.var_x1[i],
             result.var_p1[i], result.var_x2[i], result.var_p2[i],
             result.S1[i], result.S2[i])
            for i in range(len(result.drive))
        ]
        summary = {
            "kind": "squeezing",
            "threshold_bracket_drive": result.threshold_bracket,
            "max_S2": result.max_S2,
        }
    else:
        columns = ["omega1", "omega2", "n2_min", "n2_thermal", "detuning",
                   "drive", "ok"]
        rows = [
            (p.omega1, p.omega2, p.n2_min, p.n2_thermal, p.detuning, p.drive,
             "1" if p.ok else "0")
            for p in result.points
        ]
        summary = {
            "kind": "landscape",
            "ridge": result.ridge,
            "best": min(
                ({"omega1": p.omega1, "omega2": p.omega2, "n2": p.n2_min,
                  "reduction": p.n2_thermal / p.n2_min}
                 for p in result.points if p.ok and p.n2_min > 0),
                key=lambda d: d["n2"], default=None),
        }
        if args.format in ("csv", "both"):
            # gnuplot-compatible matrix of minimized occupations
            grid = np.full((result.omega1.size, result.omega2.size), np.nan)
            for idx, p in enumerate(result.points):
                i, j = divmod(idx, result.omega2.size)
                grid[i, j] = p.n2_min if p.ok else np.nan
            wrote.append(_write(os.path.join(args.output_dir, "landscape.dat"),
                                echo + format_matrix("n2_min over (omega1, omega2)",
                                                     grid)))

    if args.format in ("csv", "both"):
        wrote.append(_write(os.path.join(args.output_dir, "sweep.csv"),
                            _csv_table(echo, columns, rows)))
    if args.format in ("json", "both"):
        payload = {"version": __version__, "preset": args.preset,
                   "summary": summary}
        if m is not None:
            payload["model"] = {k: v for k, v in asdict(m).items()}
        wrote.append(_write(os.path.join(args.output_dir, "summary.json"),
                            _json_text(payload)))
    for path in wrote:
        print(f"wrote {path}")
    return 0


def cmd_geometry(args):
    sections = _read_config(args.input)
    geo = geometry_section(sections)
    spec = CavitySpec(length=geo["length"],
                      wavenumber=2.0 * math.pi / geo["wavelength"],
                      reflectivity=geo["reflectivity"],
                      transmissivity=geo["transmissivity"])
    variant = PumpGeometry(geo["variant"])
    table = field_profile_samples(spec, geo["samples"])
    echo = _echo_header({
        "variant": variant.value,
        "length_m": fmt(spec.length),
        "wavenumber_per_m": fmt(spec.wavenumber),
        "reflectivity": fmt(spec.reflectivity),
        "transmissivity": fmt(spec.transmissivity),
        "lineshape_power": fmt(abs(lineshape(spec)) ** 2),
    })
    lines = [echo + "# z_m    intensity_relative"]
    for z, intensity in table:
        lines.append(f"{fmt(z)} {fmt(intensity)}")
    path = _write(os.path.join(args.output_dir, "field_profile.dat"),
                  "\n".join(lines) + "\n")
    print(f"wrote {path}")
    return 0


def cmd_validate(args):
    """Three-way solver agreement over the built-in test set."""
    rng = np.random.default_rng(20240917)
    checks = []
    for k in range(args.validate_instances):
        R = rng.normal(size=(6, 6))
        R -= (np.linalg.eigvals(R).real.max() + rng.uniform(0.05, 1.0)) * np.eye(6)
        B = rng.normal(size=(6, 6))
        checks.append((f"random_{k}", R, B @ B.T, None))
    # preset operating points: the hybridization optimum and just below
    # the squeezing instability threshold
    for name, m, drive_w in (("fig3_hybridized", fig3_model(), 2.5813e-3),
                             ("fig4_near_threshold", fig4_model(), 5.70e-4)):
        ref = reference_params()
        mi = replace(m, drive=drive_from_watts(ref, drive_w))
        lm = linear_model(mi, fixed_point(mi))
        dt = 0.5 / np.abs(lm.eigenvalues).max()
        checks.append((name, lm.drift, lm.diffusion, IntegrationSpec(dt=dt)))

    worst = {"algebraic_pair": 0.0, "ode_vs_direct": 0.0}
    lines = [_echo_header({"instances": str(len(checks))})]
    ok = True
    for name, A, D, spec in checks:
        chk = cross_check(A, D, spec=spec)
        worst["algebraic_pair"] = max(worst["algebraic_pair"],
                                      chk["algebraic_pair"])
        worst["ode_vs_direct"] = max(worst["ode_vs_direct"],
                                     chk["ode_vs_direct"])
        this_ok = (chk["algebraic_pair"] < chk["algebraic_tol"]
                   and chk["ode_vs_direct"] < chk["ode_tol"])
        ok = ok and this_ok
        lines.append(f"{name}: algebraic {fmt(chk['algebraic_pair'])} "
                     f"ode {fmt(chk['ode_vs_direct'])} "
                     f"{'ok' if this_ok else 'FAIL'}")
    lines.append(f"worst algebraic pair discrepancy: {fmt(worst['algebraic_pair'])}")
    lines.append(f"worst ode discrepancy: {fmt(worst['ode_vs_direct'])}")
    lines.append("verdict: " + ("all below tolerance" if ok else "FAIL"))
    path = _write(os.path.join(args.output_dir, "validation.txt"),
                  "\n".join(lines) + "\n")
    print(f"wrote {path}")
    if not ok:
        raise NumericalError("solver cross-checks exceeded tolerance; "
                             "see validation.txt")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="trimech",
        description="Three-mode cavity optomechanics simulator")
    parser.add_argument("--version", action="version",
                        version=f"trimech {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-i", "--input", default=None,
                       help="config file (strict key = value text)")
        p.add_argument("-o", "--output-dir", default=".",
                       help="directory for output files")
        p.add_argument("--format", choices=("csv", "json", "both"),
                       default="both")
        p.add_argument("--preset", choices=("none",) + PRESET_NAMES,
                       default="none")
        p.add_argument("--threads", type=int,
                       default=int(os.environ.get("TRIMECH_THREADS", "1")),
                       help="worker count for sweeps (content-invariant)")

    for name, fn in (("derive", cmd_derive), ("steady", cmd_steady),
                     ("linear", cmd_linear), ("sweep", cmd_sweep),
                     ("geometry", cmd_geometry), ("validate", cmd_validate)):
        p = sub.add_parser(name)
        common(p)
        if name == "validate":
            p.add_argument("--validate-instances", type=int, default=50)
        p.set_defaults(handler=fn)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        os.makedirs(args.output_dir, exist_ok=True)
        return args.handler(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsError as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical fault: {exc}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
