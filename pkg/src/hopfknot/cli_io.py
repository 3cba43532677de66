"""Command line front end and deterministic file output.

Subcommands::

    hopfknot fields sample       grid (or single point) field evaluation
    hopfknot energy report       energy diagnostics at one time
    hopfknot trajectories run    electron ensemble, CSV + JSON summary
    hopfknot lines trace         field lines and pairwise linking numbers
    hopfknot verify all          the verification harness

Output files are deterministic functions of the resolved configuration:
numeric text is written with 9 significant digits, newlines are always
"\\n", there are no timestamps, and every file carries the tool version
plus the resolved physics configuration in its header. Execution knobs
(--threads, --out-dir) never influence file bytes.

Config files are plain text, one ``key = value`` per line (``:`` also
accepted), ``#`` comments, dotted namespaces for grouped keys. Unknown
keys are rejected. The coupling may be given directly (``g``) or through
``energy_joules`` + ``l0_meters``, never both.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from . import diagnostics
from . import knot_fields
from . import topology
from . import verification
from .particle_dynamics import PushConfig, axes_ensemble, coupling_strength, \
    run_ensemble
from .quadrature import GridSpec

ENV_OUT_DIR = "HOPFKNOT_OUTDIR"

PRESETS = {"g1": 1.0, "g10": 10.0, "g100": 100.0}
PRESET_STRIDE = 0.01

DEFAULT_LINES = (("magnetic", (0.3, 0.0, 0.0)),
                 ("magnetic", (0.6, 0.0, 0.0)),
                 ("electric", (0.0, 0.5, 0.0)))


class ConfigError(ValueError):
    """Malformed or contradictory run configuration."""


def _parse_float(text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError("not a number: %r" % text) from None


def _parse_int(text):
    try:
        return int(text)
    except ValueError:
        raise ConfigError("not an integer: %r" % text) from None


def _parse_stride(text):
    if text.strip().lower() in ("per-step", "none"):
        return None
    return _parse_float(text)


@dataclass(frozen=True)
class RunConfig:
    """Resolved run configuration; every field has a config-file key."""
    g: float = None
    energy_joules: float = None
    l0_meters: float = None
    t_start: float = 0.0
    t_end: float = 1.5
    time: float = 0.0
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    output_stride: float = None
    seed: int = 0
    threads: int = 1
    out_dir: str = None
    quad_radial_nodes: int = 96
    quad_angular_nodes_theta: int = 48
    quad_angular_nodes_phi: int = 96
    quad_radial_map_scale: float = 1.0
    grid_xmin: float = -2.0
    grid_xmax: float = 2.0
    grid_ymin: float = -2.0
    grid_ymax: float = 2.0
    grid_zmin: float = -2.0
    grid_zmax: float = 2.0
    grid_nx: int = 41
    grid_ny: int = 41
    grid_nz: int = 41

    def coupling(self):
        if self.g is not None:
            return self.g
        if self.energy_joules is not None:
            return coupling_strength(self.energy_joules, self.l0_meters)
        raise ConfigError("set g, or energy_joules with l0_meters")

    def grid_spec(self):
        return GridSpec(radial_nodes=self.quad_radial_nodes,
                        angular_nodes_theta=self.quad_angular_nodes_theta,
                        angular_nodes_phi=self.quad_angular_nodes_phi,
                        radial_map_scale=self.quad_radial_map_scale)

    def push_config(self, g):
        return PushConfig(g=g, t_start=self.t_start, t_end=self.t_end,
                          rel_tol=self.rel_tol, abs_tol=self.abs_tol,
                          output_stride=self.output_stride)

    def grid_bounds(self):
        return ((self.grid_xmin, self.grid_xmax),
                (self.grid_ymin, self.grid_ymax),
                (self.grid_zmin, self.grid_zmax))

    def grid_shape(self):
        return (self.grid_nx, self.grid_ny, self.grid_nz)


_KEYS = {
    "g": ("g", _parse_float),
    "energy_joules": ("energy_joules", _parse_float),
    "l0_meters": ("l0_meters", _parse_float),
    "t_start": ("t_start", _parse_float),
    "t_end": ("t_end", _parse_float),
    "time": ("time", _parse_float),
    "rel_tol": ("rel_tol", _parse_float),
    "abs_tol": ("abs_tol", _parse_float),
    "output_stride": ("output_stride", _parse_stride),
    "seed": ("seed", _parse_int),
    "threads": ("threads", _parse_int),
    "out_dir": ("out_dir", str),
    "quad.radial_nodes": ("quad_radial_nodes", _parse_int),
    "quad.angular_nodes_theta": ("quad_angular_nodes_theta", _parse_int),
    "quad.angular_nodes_phi": ("quad_angular_nodes_phi", _parse_int),
    "quad.radial_map_scale": ("quad_radial_map_scale", _parse_float),
    "grid.xmin": ("grid_xmin", _parse_float),
    "grid.xmax": ("grid_xmax", _parse_float),
    "grid.ymin": ("grid_ymin", _parse_float),
    "grid.ymax": ("grid_ymax", _parse_float),
    "grid.zmin": ("grid_zmin", _parse_float),
    "grid.zmax": ("grid_zmax", _parse_float),
    "grid.nx": ("grid_nx", _parse_int),
    "grid.ny": ("grid_ny", _parse_int),
    "grid.nz": ("grid_nz", _parse_int),
}

# execution knobs: allowed in config files, kept out of output headers
_EXECUTION_KEYS = ("threads", "out_dir")


def parse_config(text):
    """Parse a config document into a RunConfig, rejecting unknown keys."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, val = line.partition("=")
        elif ":" in line:
            key, _, val = line.partition(":")
        else:
            raise ConfigError("line %d: expected key = value, got %r"
                              % (lineno, raw.strip()))
        key = key.strip()
        val = val.strip()
        if key not in _KEYS:
            raise ConfigError("line %d: unknown key %r" % (lineno, key))
        if key in values:
            raise ConfigError("line %d: duplicate key %r" % (lineno, key))
        attr, conv = _KEYS[key]
        try:
            values[attr] = conv(val)
        except ConfigError as exc:
            raise ConfigError("line %d, key %r: %s" % (lineno, key, exc)) \
                from None
    rc = RunConfig(**values)
    _validate(rc)
    return rc


def _validate(rc):
    if rc.g is not None and rc.energy_joules is not None:
        raise ConfigError("g and energy_joules are mutually exclusive")
    if (rc.energy_joules is None) != (rc.l0_meters is None):
        raise ConfigError("energy_joules and l0_meters go together")
    if rc.t_end <= rc.t_start:
        raise ConfigError("t_end must exceed t_start")
    if rc.rel_tol <= 0.0 or rc.abs_tol <= 0.0:
        raise ConfigError("tolerances must be positive")
    if rc.output_stride is not None and rc.output_stride <= 0.0:
        raise ConfigError("output_stride must be positive or per-step")
    if rc.seed < 0:
        raise ConfigError("seed must be nonnegative")
    if rc.threads < 1:
        raise ConfigError("threads must be at least 1")
    rc.grid_spec()
    if not (rc.grid_xmin < rc.grid_xmax and rc.grid_ymin < rc.grid_ymax
            and rc.grid_zmin < rc.grid_zmax):
        raise ConfigError("grid bounds must be increasing")
    if min(rc.grid_nx, rc.grid_ny, rc.grid_nz) < 2:
        raise ConfigError("grid resolution must be at least 2 per axis")


def _fmt(x):
    """One number as text, 9 significant digits."""
    return "%.9g" % x


def _json_num(x):
    return float(_fmt(float(x)))


def _config_line(rc):
    """The resolved physics configuration as one canonical text line."""
    parts = []
    for key in sorted(_KEYS):
        if key in _EXECUTION_KEYS:
            continue
        attr, conv = _KEYS[key]
        val = getattr(rc, attr)
        if val is None:
            text = "per-step" if attr == "output_stride" else "none"
        elif conv is _parse_int:
            text = "%d" % val
        else:
            text = _fmt(val)
        parts.append("%s=%s" % (key, text))
    return " ".join(parts)


def _meta(rc):
    return {"tool": "hopfknot %s" % __version__, "config": _config_line(rc)}


def _open_out(rc, name):
    out_dir = rc.out_dir
    if out_dir is None:
        out_dir = os.environ.get(ENV_OUT_DIR, ".")
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    return path, open(path, "w", newline="\n")


def _write_csv(rc, name, header, rows, int_cols=()):
    """Write a CSV with the standard comment header; returns the path."""
    path, fh = _open_out(rc, name)
    with fh:
        fh.write("# hopfknot %s\n" % __version__)
        fh.write("# config: %s\n" % _config_line(rc))
        fh.write(header + "\n")
        for row in rows:
            cells = []
            for i, cell in enumerate(row):
                if i in int_cols:
                    cells.append("%d" % int(cell))
                else:
                    cells.append(_fmt(cell))
            fh.write(",".join(cells) + "\n")
    return path


def _write_json(rc, name, payload):
    path, fh = _open_out(rc, name)
    doc = {"meta": _meta(rc)}
    doc.update(payload)
    with fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return path


def _parse_vec3(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError("expected X,Y,Z, got %r" % text)
    return tuple(_parse_float(p) for p in parts)


def _cmd_fields_sample(rc, args):
    if args.at is not None:
        x, y, z = _parse_vec3(args.at)
        u = diagnostics.energy_density(np.array([x, y, z]), rc.time)
        s = knot_fields.field_at(np.array([x, y, z]), rc.time)
        print("X,Y,Z,U,Bx,By,Bz,Ex,Ey,Ez")
        print(",".join(_fmt(v) for v in
                       [x, y, z, float(u), *s.b, *s.e]))
        return 0
    rows = diagnostics.grid_export(rc.time, rc.grid_bounds(), rc.grid_shape())
    path = _write_csv(rc, "fields.csv", "X,Y,Z,U,Bx,By,Bz,Ex,Ey,Ez", rows)
    print("wrote %s (%d rows)" % (path, rows.shape[0]))
    return 0


def _cmd_energy_report(rc, args):
    rep = diagnostics.energy_report(rc.time, rc.grid_spec())
    payload = {
        "time": _json_num(rep.time),
        "total_energy": _json_num(rep.total_energy),
        "max_position": [_json_num(v) for v in rep.max_position],
        "max_density": _json_num(rep.max_density),
        "mean_quadratic_radius": _json_num(rep.mean_quadratic_radius),
        "fraction_within_unit_ball": _json_num(rep.fraction_within_unit_ball),
        "second_moment_eigenvalues":
            [_json_num(v) for v in rep.second_moment_eigenvalues],
    }
    jpath = _write_json(rc, "energy_report.json", payload)
    row = [rep.time, rep.total_energy, rep.max_position[0],
           rep.max_position[1], rep.max_position[2], rep.max_density,
           rep.mean_quadratic_radius, rep.fraction_within_unit_ball,
           rep.second_moment_eigenvalues[0], rep.second_moment_eigenvalues[1],
           rep.second_moment_eigenvalues[2]]
    cpath = _write_csv(
        rc, "energy_report.csv",
        "time,total_energy,max_x,max_y,max_z,max_density,"
        "mean_quadratic_radius,fraction_within_unit_ball,"
        "moment_eig_1,moment_eig_2,moment_eig_3", [row])
    print("wrote %s and %s (total_energy=%s)"
          % (jpath, cpath, _fmt(rep.total_energy)))
    return 0


def _cmd_trajectories_run(rc, args):
    if args.preset is not None:
        g = PRESETS[args.preset]
        rc = replace(rc, g=g, energy_joules=None, l0_meters=None,
                     t_start=0.0, t_end=1.5, rel_tol=1e-9, abs_tol=1e-11,
                     output_stride=PRESET_STRIDE)
    g = rc.coupling()
    states = axes_ensemble()
    result = run_ensemble(states, rc.push_config(g), threads=rc.threads)

    rows = []
    for pid, traj in enumerate(result.trajectories):
        if traj is None:
            continue
        speeds = traj.speeds
        for k in range(traj.times.shape[0]):
            rows.append([pid, traj.times[k],
                         traj.positions[k, 0], traj.positions[k, 1],
                         traj.positions[k, 2], traj.velocities[k, 0],
                         traj.velocities[k, 1], traj.velocities[k, 2],
                         speeds[k]])
    cpath = _write_csv(rc, "trajectories.csv",
                       "particle_id,T,X,Y,Z,VX,VY,VZ,speed", rows,
                       int_cols=(0,))

    finals = []
    for pid, traj in enumerate(result.trajectories):
        if traj is None:
            finals.append({"particle_id": pid, "failed": True})
            continue
        state = traj.final_state
        finals.append({
            "particle_id": pid,
            "position": [_json_num(v) for v in state.position],
            "velocity": [_json_num(v) for v in state.velocity],
            "speed": _json_num(state.speed),
        })
    payload = {
        "g": _json_num(g),
        "t_end": _json_num(rc.t_end),
        "v_min": _json_num(result.v_min),
        "v_max": _json_num(result.v_max),
        "final_states": finals,
        "failures": [[i, msg] for i, msg in result.failures],
    }
    jpath = _write_json(rc, "ensemble.json", payload)
    print("wrote %s and %s (v_min=%s v_max=%s, %d failures)"
          % (cpath, jpath, _fmt(result.v_min), _fmt(result.v_max),
             len(result.failures)))
    return 0 if not result.failures else 1


def _cmd_lines_trace(rc, args):
    wanted = []
    if args.line:
        for spec_text in args.line:
            which, _, coords = spec_text.partition(":")
            which = which.strip()
            if which not in ("magnetic", "electric"):
                raise ConfigError(
                    "--line wants magnetic:X,Y,Z or electric:X,Y,Z")
            wanted.append((which, _parse_vec3(coords)))
    else:
        wanted = list(DEFAULT_LINES)

    lines = []
    summaries = []
    rows = []
    for i, (which, start) in enumerate(wanted):
        line = topology.trace_field_line(start, t=rc.time, which=which)
        lines.append(line)
        summaries.append({
            "line_id": i,
            "which": which,
            "start": [_json_num(v) for v in start],
            "closed": line.closed,
            "closure_gap": _json_num(line.closure_gap),
            "arclength": _json_num(line.arclength),
        })
        rows.extend(topology.line_to_rows(line, i))
    cpath = _write_csv(rc, "lines.csv", "line_id,idx,X,Y,Z", rows,
                       int_cols=(0, 1))

    pairs = []
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            entry = {"first": i, "second": j}
            try:
                raw, rounded = topology.gauss_linking_number(lines[i],
                                                             lines[j])
                entry["raw"] = _json_num(raw)
                entry["rounded"] = rounded
            except (topology.OpenCurveError,
                    topology.CurveProximityError) as exc:
                entry["error"] = str(exc)
            pairs.append(entry)
    jpath = _write_json(rc, "linking.json",
                        {"time": _json_num(rc.time), "lines": summaries,
                         "linking": pairs})
    links = ["%d-%d:%s" % (p["first"], p["second"],
                           p.get("rounded", "error")) for p in pairs]
    print("wrote %s and %s (%s)" % (cpath, jpath, " ".join(links)))
    return 0


def _cmd_verify_all(rc, args):
    reports = verification.run_all(seed=rc.seed, spec=rc.grid_spec(),
                                   threads=rc.threads)
    rows = verification.report_rows(reports)
    path = _write_json(rc, "verification.json", {"checks": rows})
    ok = True
    for row in rows:
        status = "PASS" if row["passed"] else "FAIL"
        ok = ok and row["passed"]
        print("%-24s %s  (max_residual=%s tolerance=%s over %d samples)"
              % (row["check_name"], status, _fmt(row["max_residual"]),
                 _fmt(row["tolerance"]), row["samples"]))
    print("wrote %s" % path)
    return 0 if ok else 1


def _add_common(parser):
    parser.add_argument("--config", metavar="PATH",
                        help="run configuration file")
    parser.add_argument("--seed", type=int, metavar="N",
                        help="seed for all pseudo-random sampling")
    parser.add_argument("--threads", type=int, metavar="N",
                        help="worker threads (never changes output bytes)")
    parser.add_argument("--out-dir", metavar="DIR",
                        help="output directory (default $%s or cwd)"
                             % ENV_OUT_DIR)
    parser.add_argument("--T", type=float, metavar="TIME", dest="time",
                        help="field time for sampling commands")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hopfknot",
        description="Numerical laboratory for an exact electromagnetic "
                    "knot and the electrons it accelerates.")
    parser.add_argument("--version", action="version",
                        version="hopfknot %s" % __version__)
    top = parser.add_subparsers(dest="group", required=True)

    fields = top.add_parser("fields", help="field evaluation")
    sub = fields.add_subparsers(dest="action", required=True)
    p = sub.add_parser("sample", help="evaluate on the config grid")
    _add_common(p)
    p.add_argument("--at", metavar="X,Y,Z",
                   help="single-point evaluation to stdout instead")
    p.set_defaults(handler=_cmd_fields_sample)

    energy = top.add_parser("energy", help="energy diagnostics")
    sub = energy.add_subparsers(dest="action", required=True)
    p = sub.add_parser("report", help="energy report at one time")
    _add_common(p)
    p.set_defaults(handler=_cmd_energy_report)

    traj = top.add_parser("trajectories", help="electron ensembles")
    sub = traj.add_subparsers(dest="action", required=True)
    p = sub.add_parser("run", help="integrate the 60-electron ensemble")
    _add_common(p)
    p.add_argument("--preset", choices=sorted(PRESETS),
                   help="standard experiment: coupling g, T in [0, 1.5]")
    p.set_defaults(handler=_cmd_trajectories_run)

    lines = top.add_parser("lines", help="field lines and linking")
    sub = lines.add_subparsers(dest="action", required=True)
    p = sub.add_parser("trace", help="trace lines, compute linking numbers")
    _add_common(p)
    p.add_argument("--line", action="append", metavar="WHICH:X,Y,Z",
                   help="line start, e.g. magnetic:0.3,0,0 (repeatable)")
    p.set_defaults(handler=_cmd_lines_trace)

    verify = top.add_parser("verify", help="verification harness")
    sub = verify.add_subparsers(dest="action", required=True)
    p = sub.add_parser("all", help="run every check, write the report")
    _add_common(p)
    p.set_defaults(handler=_cmd_verify_all)

    return parser


def load_run_config(args):
    """Config file plus flag overrides; flags win."""
    if args.config is not None:
        with open(args.config) as fh:
            rc = parse_config(fh.read())
    else:
        rc = RunConfig()
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.threads is not None:
        updates["threads"] = args.threads
    if args.out_dir is not None:
        updates["out_dir"] = args.out_dir
    if getattr(args, "time", None) is not None:
        updates["time"] = args.time
    if updates:
        rc = replace(rc, **updates)
    _validate(rc)
    return rc


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rc = load_run_config(args)
        return args.handler(rc, args)
    except ConfigError as exc:
        print("hopfknot: config error: %s" % exc, file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OSError) as exc:
        print("hopfknot: error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
