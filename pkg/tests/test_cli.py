import numpy as np
import pytest

from helpers import make_log
from paddlesim.cli import (CSV_HEADER, main, parse_scenario, preset_names,
                           read_telemetry_csv, report_metrics,
                           render_report_dat, render_report_text,
                           write_telemetry_csv)
from paddlesim.control import ControlMode
from paddlesim.mission import (ConfigError, MissionKind, MissionSpec,
                               run_mission)
from paddlesim.dynamics import BoatParams
from paddlesim.control import ControllerConfig

MINIMAL = """
# smallest valid scenario
mission.kind = converge
mission.duration = 1.0
"""


def test_parse_minimal_config():
    cfg = parse_scenario(MINIMAL)
    assert cfg.mission.kind is MissionKind.CONVERGE
    assert cfg.mission.duration == 1.0
    assert cfg.repeats == 1 and cfg.basename == "run"


def test_parse_full_config():
    text = """
    boat.I_t = 2.0e-3
    boat.C_v = 1.4
    control.K = 10
    control.mode = desaturated
    mission.kind = waypoints
    mission.duration = 5.0
    mission.waypoints = 0.5 0; 0.5 0.5
    mission.tolerance_radius = 0.05
    mission.start = 0.1 -0.1
    mission.warm_start = false
    output.dir = out
    output.basename = sq
    batch.repeats = 3
    """
    cfg = parse_scenario(text)
    assert cfg.boat.I_t == 2.0e-3 and cfg.boat.C_v == 1.4
    assert cfg.control.K == 10.0
    assert cfg.control.mode is ControlMode.DESATURATED_THRUST_DIRECTION
    assert cfg.mission.waypoints == ((0.5, 0.0), (0.5, 0.5))
    assert cfg.mission.start == (0.1, -0.1)
    assert cfg.mission.warm_start is False
    assert (cfg.out_dir, cfg.basename, cfg.repeats) == ("out", "sq", 3)


@pytest.mark.parametrize("line,fragment", [
    ("boat.bogus = 1", "unknown key"),
    ("nonsense = 1", "unknown key"),
    ("mission.kind = quux\nmission.duration = 1", "bad value"),
    ("boat.I_t = fast", "bad value"),
    ("mission.kind converge", "expected"),
    ("mission.duration = 1\nmission.duration = 2", "duplicate"),
    ("sweep.boat = 1, 2", "sweep keys look like"),
    ("sweep.control.mode = 1, 2", "only scalar"),
    ("sweep.control.nope = 1, 2", "unknown sweep target"),
])
def test_parse_rejects_bad_lines(line, fragment):
    with pytest.raises(ConfigError) as err:
        parse_scenario(f"mission.kind = converge\nmission.duration = 1\n{line}"
                       if "mission.kind" not in line and "mission.duration" not in line
                       else line)
    assert fragment in str(err.value)


def test_parse_requires_kind_and_duration():
    with pytest.raises(ConfigError):
        parse_scenario("mission.duration = 1.0")
    with pytest.raises(ConfigError):
        parse_scenario("boat.I_t = 1e-3")


def test_parse_validates_physical_values():
    with pytest.raises(ConfigError):
        parse_scenario("mission.kind = converge\nmission.duration = 1\nboat.mass = -1")
    with pytest.raises(ConfigError):
        parse_scenario("mission.kind = waypoints\nmission.duration = 1")


def test_csv_empty_and_single_record(tmp_path):
    empty = make_log(np.array([]))
    path = tmp_path / "empty.csv"
    write_telemetry_csv(empty, path)
    assert path.read_text() == CSV_HEADER + "\n"

    one = make_log(np.array([0.0]))
    path2 = tmp_path / "one.csv"
    write_telemetry_csv(one, path2)
    lines = path2.read_text().splitlines()
    assert len(lines) == 2 and lines[0] == CSV_HEADER


def test_csv_round_trip(tmp_path):
    spec = MissionSpec(kind=MissionKind.CONVERGE, duration=2.0,
                       initial_theta=-0.5)
    log = run_mission(BoatParams(), ControllerConfig(), spec)
    path = tmp_path / "rt.csv"
    write_telemetry_csv(log, path)
    back = read_telemetry_csv(path, period=log.period,
                              body_length=log.body_length)
    for name in ("t", "theta", "theta_dot", "phi", "phi_dot", "theta_t_dot",
                 "x", "y", "vx", "vy", "theta_r", "theta_des", "psi_hat", "tau"):
        a, b = log.column(name), back.column(name)
        assert np.allclose(a, b, rtol=1e-8, atol=1e-14), name
    assert np.array_equal(log.waypoint_index, back.waypoint_index)


def test_csv_final_newline_and_9_digits(tmp_path):
    log = make_log(np.array([1.0 / 3.0]))
    path = tmp_path / "digits.csv"
    write_telemetry_csv(log, path)
    text = path.read_text()
    assert text.endswith("\n")
    assert text.splitlines()[1].startswith("0.333333333,")


def test_run_command_end_to_end(tmp_path):
    cfg_path = tmp_path / "scen.cfg"
    cfg_path.write_text("mission.kind = converge\n"
                        "mission.duration = 2.0\n"
                        "output.basename = demo\n")
    out = tmp_path / "out"
    code = main(["run", str(cfg_path), "--out-dir", str(out)])
    assert code == 0
    assert (out / "demo.csv").exists()
    assert (out / "demo_metrics.txt").exists()
    assert (out / "demo_metrics.dat").exists()
    dat = (out / "demo_metrics.dat").read_text()
    assert "steady_speed_mps.median" in dat


def test_validate_command_writes_nothing(tmp_path):
    cfg_path = tmp_path / "scen.cfg"
    cfg_path.write_text("mission.kind = converge\nmission.duration = 1.0\n")
    code = main(["validate", str(cfg_path)])
    assert code == 0
    assert list(tmp_path.glob("*.csv")) == []


def test_validate_rejects_bad_config(tmp_path):
    cfg_path = tmp_path / "bad.cfg"
    cfg_path.write_text("mission.kind = converge\nmission.duration = 1.0\n"
                        "boat.warp = 9\n")
    assert main(["validate", str(cfg_path)]) == 2


def test_presets_ship_and_validate():
    names = preset_names()
    assert "converge" in names and "station-keep" in names
    assert main(["presets", "list"]) == 0
    # dry-run validation of a preset by name: exit 0, no files written
    assert main(["validate", "defaults"]) == 0
    assert main(["validate", "not-a-preset"]) == 2


def test_presets_run_unknown_name():
    assert main(["presets", "run", "no-such-preset"]) == 2


def test_repeats_and_degenerate_iqr(tmp_path):
    cfg_path = tmp_path / "scen.cfg"
    cfg_path.write_text("mission.kind = converge\nmission.duration = 1.0\n")
    out = tmp_path / "o"
    code = main(["run", str(cfg_path), "--out-dir", str(out), "--repeats", "2"])
    assert code == 0
    assert (out / "run_r0.csv").exists() and (out / "run_r1.csv").exists()
    # deterministic repeats: identical files, degenerate quartiles
    assert (out / "run_r0.csv").read_bytes() == (out / "run_r1.csv").read_bytes()
    dat = dict(line.split(" = ") for line in
               (out / "run_metrics.dat").read_text().splitlines())
    assert dat["steady_speed_mps.q1"] == dat["steady_speed_mps.q3"]
    assert dat["steady_speed_mps.n"] == "2"


def test_sweep_produces_monotone_speed(tmp_path):
    cfg_path = tmp_path / "sweep.cfg"
    cfg_path.write_text("mission.kind = converge\n"
                        "mission.duration = 10.0\n"
                        "sweep.control.K = 5, 10, 15\n")
    out = tmp_path / "s"
    assert main(["run", str(cfg_path), "--out-dir", str(out)]) == 0
    speeds = []
    for k in (5, 10, 15):
        dat = dict(line.split(" = ") for line in
                   (out / f"run_K={k}_metrics.dat").read_text().splitlines())
        speeds.append(float(dat["steady_speed_mps.median"]))
    assert speeds[0] < speeds[1] < speeds[2]


def test_strict_settle_exit_code(tmp_path):
    # inner-loop-only step in slow water never holds the 90% band
    cfg_path = tmp_path / "step.cfg"
    cfg_path.write_text("boat.C_v = 1.4\n"
                        "boat.k_thrust = 9.333333333333334e-4\n"
                        "control.mode = limit_cycle\n"
                        "mission.kind = step\n"
                        "mission.duration = 12.0\n"
                        "mission.step_schedule = 5.0 1.0471975511965976\n")
    out = tmp_path / "o"
    assert main(["run", str(cfg_path), "--out-dir", str(out)]) == 0
    assert main(["run", str(cfg_path), "--out-dir", str(out),
                 "--strict-settle"]) == 3


def test_report_metrics_empty_and_quartiles():
    assert report_metrics([], MissionSpec(kind=MissionKind.CONVERGE,
                                          duration=1.0)) == {}
    report = {"m": {"median": 2.5, "q1": 1.75, "q3": 3.25, "n": 4.0}}
    text = render_report_text(report)
    assert "m" in text and "2.5" in text
    dat = render_report_dat(report)
    assert "m.q1 = 1.75" in dat and "m.n = 4" in dat


def test_empty_report_exits_nonzero(tmp_path):
    # a zero-duration station-keep yields no metrics at all
    cfg_path = tmp_path / "none.cfg"
    cfg_path.write_text("mission.kind = station_keep\n"
                        "mission.duration = 0.0\n"
                        "mission.waypoints = 0 1\n"
                        "control.mode = desaturated\n")
    assert main(["run", str(cfg_path), "--out-dir", str(tmp_path / "x")]) == 1


def test_missing_config_file_is_io_error():
    assert main(["run", "/nonexistent/path.cfg"]) == 1
