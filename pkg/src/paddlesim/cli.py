"""Scenario-runner command line tool.

Loads flat ``section.key = value`` scenario configs (strict schema, unknown
keys rejected), runs the missions they describe, and writes one telemetry
CSV per run plus a metrics report in aligned text and ``key = value`` form.
Ships presets mirroring the bench scenarios; see ``paddlesim presets list``.
"""

import argparse
import dataclasses
import itertools
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .control import ControlMode, ControllerConfig, wrap_to_pi
from .dynamics import BoatParams
from .metrics import (NotSettled, measure_turn, orbit_radius, quartiles,
                      rms_perpendicular_error)
from .mission import (ConfigError, MissionKind, MissionSpec, TelemetryLog,
                      run_mission, validate_spec)

CSV_HEADER = ("t,theta,theta_dot,phi,phi_dot,theta_t_dot,x,y,vx,vy,"
              "theta_r,theta_des,psi_hat,tau,waypoint_index")


# --------------------------------------------------------------------- values

def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_pair(text: str) -> tuple[float, float]:
    parts = text.split()
    if len(parts) != 2:
        raise ValueError(f"expected 'x y', got {text!r}")
    return float(parts[0]), float(parts[1])


def _parse_pairs(text: str) -> tuple:
    return tuple(_parse_pair(item) for item in text.split(";") if item.strip())


def _parse_steps(text: str) -> tuple:
    out = []
    for item in text.split(";"):
        if not item.strip():
            continue
        parts = item.split()
        if len(parts) != 2:
            raise ValueError(f"expected 'time delta', got {item.strip()!r}")
        out.append((float(parts[0]), float(parts[1])))
    return tuple(out)


def _parse_impulses(text: str) -> tuple:
    out = []
    for item in text.split(";"):
        if not item.strip():
            continue
        parts = item.split()
        if len(parts) != 3:
            raise ValueError(f"expected 'time dvx dvy', got {item.strip()!r}")
        out.append((float(parts[0]), (float(parts[1]), float(parts[2]))))
    return tuple(out)


_BOAT_FIELDS = {f.name: float for f in dataclasses.fields(BoatParams)}
_CONTROL_FIELDS = {
    "omega": float, "K": float, "beta": float, "K_p": float,
    "mode": ControlMode, "desat_interval": float, "desat_threshold": float,
    "thrust_from_mean_heading": _parse_bool,
}
_MISSION_FIELDS = {
    "kind": MissionKind, "duration": float, "heading": float,
    "waypoints": _parse_pairs, "tolerance_radius": float,
    "step_schedule": _parse_steps, "disturbances": _parse_impulses,
    "controller_mode": ControlMode, "initial_theta": float,
    "start": _parse_pair, "warm_start": _parse_bool,
}
_OUTPUT_FIELDS = {"dir": str, "basename": str}
_BATCH_FIELDS = {"repeats": int}
_SECTIONS = {"boat": _BOAT_FIELDS, "control": _CONTROL_FIELDS,
             "mission": _MISSION_FIELDS, "output": _OUTPUT_FIELDS,
             "batch": _BATCH_FIELDS}


@dataclasses.dataclass
class ScenarioConfig:
    """One parsed scenario: plant, controller, mission, output and sweeps."""

    boat: BoatParams
    control: ControllerConfig
    mission: MissionSpec
    out_dir: str = "runs"
    basename: str = "run"
    repeats: int = 1
    sweeps: tuple = ()   # (section, field, (values...)) entries


def parse_scenario(text: str, name: str = "<config>") -> ScenarioConfig:
    """Parse the flat key = value format; reject unknown or malformed keys."""
    raw: dict[str, dict] = {"boat": {}, "control": {}, "mission": {},
                            "output": {}, "batch": {}}
    sweeps = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{name}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in stripped.split("=", 1))
        parts = key.split(".")
        if parts[0] == "sweep":
            if len(parts) != 3:
                raise ConfigError(f"{name}:{lineno}: sweep keys look like "
                                  f"sweep.<section>.<field>")
            _, section, field = parts
            schema = _SECTIONS.get(section)
            if schema is None or field not in schema:
                raise ConfigError(f"{name}:{lineno}: unknown sweep target {key!r}")
            if schema[field] is not float:
                raise ConfigError(f"{name}:{lineno}: only scalar fields can be swept")
            try:
                values = tuple(float(v) for v in value.split(","))
            except ValueError as exc:
                raise ConfigError(f"{name}:{lineno}: {exc}") from exc
            sweeps.append((section, field, values))
            continue
        if len(parts) != 2 or parts[0] not in _SECTIONS:
            raise ConfigError(f"{name}:{lineno}: unknown key {key!r}")
        section, field = parts
        schema = _SECTIONS[section]
        if field not in schema:
            raise ConfigError(f"{name}:{lineno}: unknown key {key!r}")
        if field in raw[section]:
            raise ConfigError(f"{name}:{lineno}: duplicate key {key!r}")
        try:
            raw[section][field] = schema[field](value)
        except ValueError as exc:
            raise ConfigError(f"{name}:{lineno}: bad value for {key!r}: {exc}") from exc

    try:
        boat = BoatParams(**raw["boat"])
        control = ControllerConfig(**raw["control"])
        mission = MissionSpec(**raw["mission"])
    except TypeError as exc:
        raise ConfigError(f"{name}: mission.kind and mission.duration are "
                          f"required ({exc})") from exc
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from exc
    validate_spec(mission)
    return ScenarioConfig(boat=boat, control=control, mission=mission,
                          out_dir=raw["output"].get("dir", "runs"),
                          basename=raw["output"].get("basename", "run"),
                          repeats=raw["batch"].get("repeats", 1),
                          sweeps=tuple(sweeps))


def expand_sweeps(cfg: ScenarioConfig):
    """Yield (label, boat, control, mission) for the sweep cross product."""
    if not cfg.sweeps:
        yield "", cfg.boat, cfg.control, cfg.mission
        return
    axes = [[(section, field, v) for v in values]
            for section, field, values in cfg.sweeps]
    for combo in itertools.product(*axes):
        boat, control, mission = cfg.boat, cfg.control, cfg.mission
        tags = []
        for section, field, value in combo:
            if section == "boat":
                boat = dataclasses.replace(boat, **{field: value})
            elif section == "control":
                control = dataclasses.replace(control, **{field: value})
            else:
                mission = dataclasses.replace(mission, **{field: value})
            tags.append(f"{field}={value:g}")
        yield "_".join(tags), boat, control, mission


# ------------------------------------------------------------------ telemetry

def write_telemetry_csv(log: TelemetryLog, path) -> None:
    """Write the fixed-header CSV, 9 significant digits per value."""
    cols = (log.t, log.theta, log.theta_dot, log.phi, log.phi_dot,
            log.theta_t_dot, log.x, log.y, log.vx, log.vy, log.theta_r,
            log.theta_des, log.psi_hat, log.tau)
    lines = [CSV_HEADER]
    idx = log.waypoint_index
    for i in range(len(log)):
        lines.append(",".join(f"{col[i]:.9g}" for col in cols) + f",{idx[i]:d}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_telemetry_csv(path, period: float = 1.0,
                       body_length: float = 0.15) -> TelemetryLog:
    """Parse a telemetry CSV back into a log (metadata supplied by caller)."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ConfigError(f"{path}: unexpected telemetry header")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.shape[1] != 15:
        raise ConfigError(f"{path}: expected 15 columns")
    cols = [data[:, i] for i in range(14)]
    return TelemetryLog(*cols, waypoint_index=data[:, 14].astype(np.int64),
                        period=period, body_length=body_length)


# -------------------------------------------------------------------- metrics

def _step_direction_errors(log: TelemetryLog, spec: MissionSpec) -> list[float]:
    """Settled observed-minus-commanded change for each scheduled step."""
    psi = np.unwrap(log.psi_hat)
    bounds = [0.0] + [ts for ts, _ in spec.step_schedule] + [float(log.t[-1])]
    errors = []
    for j, (ts, delta) in enumerate(spec.step_schedule):
        before = (log.t >= bounds[j] + 0.75 * (ts - bounds[j])) & (log.t < ts)
        end = bounds[j + 2]
        after = (log.t >= ts + 0.75 * (end - ts)) & (log.t <= end)
        if not (np.any(before) and np.any(after)):
            continue
        observed = float(np.mean(psi[after]) - np.mean(psi[before]))
        errors.append(observed - delta)
    return errors


def _collect_metrics(log: TelemetryLog, spec: MissionSpec,
                     strict_settle: bool) -> dict[str, list[float]]:
    vals: dict[str, list[float]] = {}
    span = log.t[-1] - log.t[0]
    tail = log.t >= log.t[0] + 0.75 * span

    if spec.kind in (MissionKind.CONVERGE, MissionKind.STEP_TEST):
        speed = np.hypot(log.vx[tail], log.vy[tail])
        vals["steady_speed_mps"] = [float(np.mean(speed))]

    if spec.kind is MissionKind.CONVERGE:
        err = wrap_to_pi(float(np.mean(log.theta[tail])) - float(log.theta_r[-1]))
        vals["heading_error_rad"] = [abs(err)]

    if spec.kind is MissionKind.STEP_TEST:
        rises, travels, travels_bl = [], [], []
        for ts, delta in spec.step_schedule:
            try:
                ev = measure_turn(log, ts, delta)
            except NotSettled:
                if strict_settle:
                    raise
                continue
            rises.append(ev.rise_time)
            travels.append(ev.travel_distance)
            travels_bl.append(ev.travel_BL)
        if rises:
            vals["rise_time_s"] = rises
            vals["travel_m"] = travels
            vals["travel_bl"] = travels_bl
        errs = _step_direction_errors(log, spec)
        if errs:
            vals["direction_error_rad"] = errs

    if spec.kind is MissionKind.WAYPOINTS:
        idx = log.waypoint_index
        rms, peak = [], []
        for k in range(int(idx.max())):
            mask = idx == k
            if not np.any(mask):
                continue
            t0, t1 = float(log.t[mask][0]), float(log.t[mask][-1])
            p0 = spec.waypoints[k - 1] if k > 0 else (float(log.x[0]), float(log.y[0]))
            seg = rms_perpendicular_error(log, (p0, spec.waypoints[k]), (t0, t1))
            rms.append(seg.rms_perp)
            peak.append(seg.max_perp)
        if rms:
            vals["rms_perp_m"] = rms
            vals["max_perp_m"] = peak
        arrived = np.nonzero(idx == len(spec.waypoints) - 1)[0]
        if len(arrived):
            vals["completion_time_s"] = [float(log.t[arrived[0]])]

    if spec.kind is MissionKind.STATION_KEEP:
        window = min(30.0, 0.5 * span) if span > 0 else 0.0
        if window > 0.0:
            vals["orbit_radius_m"] = [
                orbit_radius(log, spec.waypoints[-1], window)]

    return vals


def report_metrics(logs: list[TelemetryLog], spec: MissionSpec,
                   strict_settle: bool = False) -> dict[str, dict[str, float]]:
    """Median and interquartile range per metric across the given runs."""
    pooled: dict[str, list[float]] = {}
    for log in logs:
        for name, values in _collect_metrics(log, spec, strict_settle).items():
            pooled.setdefault(name, []).extend(values)
    report = {}
    for name in sorted(pooled):
        q1, med, q3 = quartiles(pooled[name])
        report[name] = {"median": med, "q1": q1, "q3": q3,
                        "n": float(len(pooled[name]))}
    return report


def render_report_text(report: dict) -> str:
    width = max([len(k) for k in report], default=6)
    lines = [f"{'metric'.ljust(width)}  {'median':>12}  {'q1':>12}  {'q3':>12}  {'n':>4}"]
    for name, stats in report.items():
        lines.append(f"{name.ljust(width)}  {stats['median']:>12.6g}  "
                     f"{stats['q1']:>12.6g}  {stats['q3']:>12.6g}  "
                     f"{int(stats['n']):>4d}")
    return "\n".join(lines) + "\n"


def render_report_dat(report: dict) -> str:
    lines = []
    for name, stats in report.items():
        for key in ("median", "q1", "q3", "n"):
            lines.append(f"{name}.{key} = {stats[key]:.9g}")
    return "\n".join(lines) + "\n"


# -------------------------------------------------------------------- presets

def preset_names() -> list[str]:
    root = resources.files("paddlesim.presets")
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def load_preset(name: str) -> str:
    root = resources.files("paddlesim.presets")
    candidate = root / f"{name}.cfg"
    if not candidate.is_file():
        raise ConfigError(f"unknown preset {name!r}; see 'presets list'")
    return candidate.read_text()


def _preset_summary(text: str) -> str:
    for line in text.splitlines():
        if line.startswith("#"):
            return line.lstrip("# ").strip()
    return ""


# ------------------------------------------------------------------- commands

def _execute(cfg: ScenarioConfig, out_dir: str | None, repeats: int | None,
             strict_settle: bool) -> int:
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n_runs = repeats if repeats is not None else cfg.repeats
    if n_runs < 1:
        raise ConfigError("repeats must be at least 1")
    for label, boat, control, mission in expand_sweeps(cfg):
        stem = cfg.basename if not label else f"{cfg.basename}_{label}"
        logs = []
        for r in range(n_runs):
            log = run_mission(boat, control, mission)
            logs.append(log)
            suffix = f"_r{r}" if n_runs > 1 else ""
            write_telemetry_csv(log, out / f"{stem}{suffix}.csv")
        report = report_metrics(logs, mission, strict_settle)
        if not report:
            print(f"error: no metrics produced for {stem}", file=sys.stderr)
            return 1
        (out / f"{stem}_metrics.txt").write_text(render_report_text(report))
        (out / f"{stem}_metrics.dat").write_text(render_report_dat(report))
        print(f"{stem}: {n_runs} run(s), {len(report)} metric(s) -> {out}")
    return 0


def _cmd_run(args) -> int:
    text = Path(args.config).read_text()
    cfg = parse_scenario(text, name=str(args.config))
    return _execute(cfg, args.out_dir, args.repeats, args.strict_settle)


def _cmd_validate(args) -> int:
    path = Path(args.config)
    if path.is_file():
        parse_scenario(path.read_text(), name=str(path))
    else:
        # also accept a preset name for dry-run validation
        parse_scenario(load_preset(args.config), name=f"preset:{args.config}")
    print(f"{args.config}: ok")
    return 0


def _cmd_presets(args) -> int:
    if args.action == "list":
        for name in preset_names():
            print(f"{name:24s} {_preset_summary(load_preset(name))}")
        return 0
    text = load_preset(args.name)
    cfg = parse_scenario(text, name=f"preset:{args.name}")
    if not cfg.basename or cfg.basename == "run":
        cfg = dataclasses.replace(cfg, basename=args.name)
    return _execute(cfg, args.out_dir, args.repeats, args.strict_settle)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paddlesim",
        description="Deterministic scenario runner for the paddling swimmer")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out-dir", default=None,
                       help="output directory (overrides output.dir)")
        p.add_argument("--repeats", type=int, default=None, metavar="N",
                       help="runs per scenario (overrides batch.repeats)")
        p.add_argument("--strict-settle", action="store_true",
                       help="treat an unsettled rise-time as a fatal error")

    p_run = sub.add_parser("run", help="run a scenario config")
    p_run.add_argument("config")
    add_common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="parse and validate a config")
    p_val.add_argument("config")
    p_val.set_defaults(func=_cmd_validate)

    p_pre = sub.add_parser("presets", help="list or run shipped presets")
    pre_sub = p_pre.add_subparsers(dest="action", required=True)
    pre_sub.add_parser("list")
    p_pre_run = pre_sub.add_parser("run")
    p_pre_run.add_argument("name")
    add_common(p_pre_run)
    p_pre.set_defaults(func=_cmd_presets)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NotSettled as exc:
        print(f"not settled: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
