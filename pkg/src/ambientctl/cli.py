"""Batch front-end: run scenario configs, validate gains, dump linear models.

Exit codes are stable API: 0 success, 2 config/schema error, 3 gain-gate
failure, 4 numeric blow-up during integration, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .controllers import (
    GainSet,
    GainValidationError,
    Variant,
    check_hurwitz_matrix,
    check_hurwitz_poly,
    epsilon_bound,
)
from .dynamics import AmbientParams, RigidState
from .linearize import linearize_along_trajectory, linearize_at_equilibrium
from .references import builtin_tracking_reference, constant_reference
from .simulate import (
    LOG_COLUMNS,
    NumericsError,
    Scenario,
    SimConfig,
    TrajectoryLog,
    exp_envelope_fit,
    run_scenario,
)
from .so3 import exp_so3, rotation_check

CSV_HEADER = ",".join(LOG_COLUMNS)

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_GAIN_GATE = 3
EXIT_NUMERICS = 4
EXIT_IO = 5


class ConfigError(ValueError):
    """Scenario file violates the schema; the message names the field path."""


def builtin_config_path(name: str) -> Path:
    """Path of a bundled scenario config ("fig1" or "fig2")."""
    return Path(str(resources.files("ambientctl").joinpath(f"configs/{name}.json")))


def _fail(path: str, message: str) -> ConfigError:
    return ConfigError(f"config error at '{path}': {message}")


def _get(doc: dict, key: str, parent: str, required: bool = True, default=None):
    if key not in doc:
        if required:
            raise _fail(f"{parent}{key}", "missing required field")
        return default
    return doc[key]


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(path, f"expected a number, got {type(value).__name__}")
    if not np.isfinite(value):
        raise _fail(path, "must be finite")
    return float(value)


def _as_matrix(value, path: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != 9:
        raise _fail(path, "expected a 9-element row-major array")
    return np.array([_as_number(v, f"{path}[{i}]") for i, v in enumerate(value)]).reshape(3, 3)


def _as_vector(value, path: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != 3:
        raise _fail(path, "expected a 3-element array")
    return np.array([_as_number(v, f"{path}[{i}]") for i, v in enumerate(value)])


def _parse_gains(doc: dict) -> GainSet:
    variant_name = _get(doc, "variant", "gains.")
    try:
        variant = Variant(str(variant_name))
    except ValueError:
        raise _fail("gains.variant", f"unknown variant {variant_name!r}") from None
    kp = kd = ki = None
    kp_scalar = eps = None
    if "KP" in doc:
        kp = _as_matrix(doc["KP"], "gains.KP")
    if "KD" in doc:
        kd = _as_matrix(doc["KD"], "gains.KD")
    if "KI" in doc:
        ki = _as_matrix(doc["KI"], "gains.KI")
    if "kP" in doc:
        kp_scalar = _as_number(doc["kP"], "gains.kP")
    if "eps" in doc:
        eps = _as_number(doc["eps"], "gains.eps")
    return GainSet(
        variant=variant, kp_mat=kp, kd_mat=kd, ki_mat=ki, kp_scalar=kp_scalar, eps=eps
    )


def _parse_initial(doc: dict) -> RigidState:
    if not isinstance(doc, dict):
        raise _fail("initial", "expected an object")
    omega = _as_vector(_get(doc, "Omega", "initial."), "initial.Omega")
    has_r = "R" in doc
    has_aa = "axis_angle" in doc
    if has_r == has_aa:
        raise _fail("initial", "give exactly one of 'R' or 'axis_angle'")
    if has_r:
        r = _as_matrix(doc["R"], "initial.R")
    else:
        r = exp_so3(_as_vector(doc["axis_angle"], "initial.axis_angle"))
    return RigidState(r=r, omega=omega)


def _parse_reference(doc, t_final: float, scenario: Scenario):
    if doc == "paper_fig2":
        if scenario is Scenario.STABILIZE:
            raise _fail("reference", "stabilize runs need a constant reference")
        return builtin_tracking_reference(horizon=(0.0, t_final))
    if doc == "custom":
        raise _fail("reference", "'custom' references are only available through the Python API")
    if isinstance(doc, dict) and "constant" in doc:
        block = doc["constant"]
        if not isinstance(block, dict):
            raise _fail("reference.constant", "expected an object")
        r0 = _as_matrix(_get(block, "R0", "reference.constant."), "reference.constant.R0")
        try:
            return constant_reference(r0)
        except ValueError as exc:
            raise _fail("reference.constant.R0", str(exc)) from exc
    raise _fail("reference", "expected 'paper_fig2', 'custom', or {'constant': {'R0': [...]}}")


def _load_scenario_file(path) -> tuple[SimConfig, Path]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"config error at '{path}': {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config error at '{path}': invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config error at '{path}': top level must be an object")

    scenario_name = _get(doc, "scenario", "")
    try:
        scenario = Scenario(str(scenario_name))
    except ValueError:
        raise _fail("scenario", f"unknown scenario {scenario_name!r}") from None
    dt = _as_number(_get(doc, "dt", ""), "dt")
    t_final = _as_number(_get(doc, "t_final", ""), "t_final")
    k_e = _as_number(_get(doc, "k_e", "", required=False, default=1.0), "k_e")
    log_stride = _get(doc, "log_stride", "", required=False, default=10)
    if isinstance(log_stride, bool) or not isinstance(log_stride, int) or log_stride < 1:
        raise _fail("log_stride", "expected a positive integer")

    if scenario is Scenario.OPEN_LOOP:
        if "gains" in doc:
            raise _fail("gains", "open_loop runs take no gains")
        gains = None
    else:
        gains_doc = _get(doc, "gains", "")
        if not isinstance(gains_doc, dict):
            raise _fail("gains", "expected an object")
        gains = _parse_gains(gains_doc)

    initial = _parse_initial(_get(doc, "initial", ""))
    reference = _parse_reference(_get(doc, "reference", ""), t_final, scenario)
    output_csv = _get(doc, "output_csv", "")
    if not isinstance(output_csv, str) or not output_csv:
        raise _fail("output_csv", "expected a non-empty path string")

    try:
        cfg = SimConfig(
            dt=dt,
            t_final=t_final,
            scenario=scenario,
            initial=initial,
            reference=reference,
            gains=gains,
            k_e=k_e,
            log_stride=log_stride,
        )
    except GainValidationError:
        raise
    except ValueError as exc:
        raise ConfigError(f"config error: {exc}") from exc
    return cfg, Path(output_csv)


def parse_config(path) -> SimConfig:
    """Load and fully validate a scenario file; gain gates run here."""
    return _load_scenario_file(path)[0]


def write_csv(log: TrajectoryLog, path) -> None:
    """Write a trajectory log with the fixed header, 17 significant digits,
    '.' decimal separator and LF line endings."""
    lines = [CSV_HEADER]
    for row in log.data:
        lines.append(",".join("%.17g" % v for v in row))
    with open(path, "w", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


@dataclass
class SummaryReport:
    scenario: str
    t_final: float
    rows: int
    err_R_initial: float
    err_R_final: float
    err_W_initial: float
    err_W_final: float
    max_defect: float
    rate_err_R: float | None
    r2_err_R: float | None
    rate_err_W: float | None
    r2_err_W: float | None
    gain_gate: dict
    output_csv: str
    wall_time_s: float


def _gain_gate_summary(gains: GainSet | None) -> dict:
    if gains is None:
        return {}
    if gains.variant in (Variant.PD, Variant.TRACK_FULL):
        report = check_hurwitz_matrix(gains.kp_mat, gains.kd_mat)
        return {"gate": "matrix", "spectral_abscissa": report.spectral_abscissa}
    if gains.variant in (Variant.PID, Variant.TRACK_PID):
        report = check_hurwitz_poly(gains.kp_mat, gains.kd_mat, gains.ki_mat)
        return {"gate": "polynomial", "spectral_abscissa": report.spectral_abscissa}
    bound = epsilon_bound(gains.kp_scalar, gains.kd_mat)
    out = {"gate": "eps_bound", "eps_bound": bound}
    if gains.eps is not None:
        out["eps"] = gains.eps
    return out


def _fit_or_none(log: TrajectoryLog, column: str, window) -> tuple[float | None, float | None]:
    try:
        rate, r2 = exp_envelope_fit(log, column, window)
    except ValueError:
        return None, None
    return rate, r2


def _summarize(cfg: SimConfig, log: TrajectoryLog, out_path: Path, wall: float) -> SummaryReport:
    window = (0.2 * cfg.t_final, 0.9 * cfg.t_final)
    rate_r, r2_r = _fit_or_none(log, "err_R", window)
    rate_w, r2_w = _fit_or_none(log, "err_W", window)
    return SummaryReport(
        scenario=cfg.scenario.value,
        t_final=cfg.t_final,
        rows=len(log),
        err_R_initial=float(log.column("err_R")[0]),
        err_R_final=float(log.column("err_R")[-1]),
        err_W_initial=float(log.column("err_W")[0]),
        err_W_final=float(log.column("err_W")[-1]),
        max_defect=float(log.column("defect").max()),
        rate_err_R=rate_r,
        r2_err_R=r2_r,
        rate_err_W=rate_w,
        r2_err_W=r2_w,
        gain_gate=_gain_gate_summary(cfg.gains),
        output_csv=str(out_path),
        wall_time_s=wall,
    )


def _print_summary(report: SummaryReport, mode: str) -> None:
    if mode == "json":
        print(json.dumps(asdict(report), indent=2))
        return
    print(f"scenario       {report.scenario}")
    print(f"rows           {report.rows}")
    print(f"err_R          {report.err_R_initial:.6g} -> {report.err_R_final:.6g}")
    print(f"err_W          {report.err_W_initial:.6g} -> {report.err_W_final:.6g}")
    print(f"max defect     {report.max_defect:.6g}")
    if report.rate_err_R is not None:
        print(f"err_R decay    rate {report.rate_err_R:.4g} (r2 {report.r2_err_R:.4g})")
    if report.rate_err_W is not None:
        print(f"err_W decay    rate {report.rate_err_W:.4g} (r2 {report.r2_err_W:.4g})")
    if report.gain_gate:
        print(f"gain gate      {report.gain_gate}")
    print(f"csv            {report.output_csv}")
    print(f"wall time      {report.wall_time_s:.3f} s")


def _run_scenario_command(args, expected: set[Scenario]) -> int:
    cfg, out_path = _load_scenario_file(args.config)
    if cfg.scenario not in expected:
        names = "/".join(sorted(s.value for s in expected))
        raise ConfigError(
            f"config error at 'scenario': '{cfg.scenario.value}' cannot run under '{names}'"
        )
    if args.output:
        out_path = Path(args.output)
    start = time.perf_counter()
    log = run_scenario(cfg)
    wall = time.perf_counter() - start
    write_csv(log, out_path)
    _print_summary(_summarize(cfg, log, out_path, wall), args.summary)
    return EXIT_OK


def parse_matrix_flag(text: str) -> np.ndarray:
    """Parse a gain-matrix flag: 'I', '4I', 'diag:a,b,c', or 9 comma values."""
    text = text.strip()
    if text.endswith("I"):
        scale_text = text[:-1].strip()
        scale = 1.0 if scale_text in ("", "+") else (-1.0 if scale_text == "-" else float(scale_text))
        return scale * np.eye(3)
    if text.startswith("diag:"):
        values = [float(v) for v in text[5:].split(",")]
        if len(values) != 3:
            raise ValueError(f"diag: needs 3 values, got {len(values)}")
        return np.diag(values)
    values = [float(v) for v in text.split(",")]
    if len(values) != 9:
        raise ValueError(f"expected 9 comma-separated values, got {len(values)}")
    return np.array(values).reshape(3, 3)


def _parse_r0_flag(text: str) -> np.ndarray:
    text = text.strip()
    if text == "identity":
        return np.eye(3)
    if text.startswith("axisangle:"):
        values = [float(v) for v in text[10:].split(",")]
        if len(values) != 3:
            raise ValueError("axisangle: needs 3 values")
        return exp_so3(np.array(values))
    if text.startswith("diag:"):
        values = [float(v) for v in text[5:].split(",")]
        if len(values) != 3:
            raise ValueError("diag: needs 3 values")
        return np.diag(values)
    values = [float(v) for v in text.split(",")]
    if len(values) != 9:
        raise ValueError("expected identity, axisangle:..., diag:..., or 9 comma values")
    return np.array(values).reshape(3, 3)


def _linearize_command(args) -> int:
    try:
        r0 = _parse_r0_flag(args.R0)
    except ValueError as exc:
        raise ConfigError(f"config error at '--R0': {exc}") from exc
    check = rotation_check(r0)
    if not check.is_rotation:
        raise ConfigError(f"config error at '--R0': not a rotation (defect {check.defect:.3e})")
    params = AmbientParams(k_e=args.ke)
    if args.reference is None:
        op = linearize_at_equilibrium(r0, params)
    elif args.reference == "paper_fig2":
        ref = builtin_tracking_reference(horizon=(0.0, max(args.t, 20.0)))
        op = linearize_along_trajectory(ref, args.t, params)
    else:
        raise ConfigError("config error at '--reference': only 'paper_fig2' is built in")
    blocks = np.hstack([op.state_matrix(), op.input_matrix()])
    lines = [",".join("%.17g" % v for v in row) for row in blocks]
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", newline="\n") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _check_gains_command(args) -> int:
    checked_any = False
    all_pass = True
    try:
        if args.kp is not None or args.ki is not None:
            if args.kp is None or args.kd is None:
                raise ConfigError("config error: --kp and --kd must be given together")
            kp = parse_matrix_flag(args.kp)
            kd = parse_matrix_flag(args.kd)
            checked_any = True
            if args.ki is not None:
                report = check_hurwitz_poly(kp, kd, parse_matrix_flag(args.ki))
                label = "polynomial gate"
            else:
                report = check_hurwitz_matrix(kp, kd)
                label = "matrix gate"
            verdict = {True: "Hurwitz", False: "not Hurwitz", None: "indeterminate"}[report.is_hurwitz]
            print(f"{label}: {verdict} (spectral abscissa {report.spectral_abscissa:.9g})")
            all_pass = all_pass and report.is_hurwitz is True
        if args.kp_scalar is not None:
            if args.kd is None:
                raise ConfigError("config error: --kp-scalar needs --kd")
            checked_any = True
            bound = epsilon_bound(args.kp_scalar, parse_matrix_flag(args.kd))
            print(f"eps bound: {bound:.12g}")
            if args.eps is not None:
                admitted = 0 < args.eps < bound
                print(f"eps {args.eps:g}: {'admitted' if admitted else 'rejected'}")
                all_pass = all_pass and admitted
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"config error: {exc}") from exc
    if not checked_any:
        raise ConfigError("config error: nothing to check (give --kp/--kd or --kp-scalar)")
    return EXIT_OK if all_pass else EXIT_GAIN_GATE


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ambientctl",
        description="Rigid-body attitude control designed in the ambient matrix space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("stabilize", "run a stabilization (or open-loop) scenario file"),
        ("track", "run a tracking scenario file"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--output", help="override the config's output_csv path")
        p.add_argument("--summary", choices=("text", "json"), default="text")

    p = sub.add_parser("linearize", help="dump the linear model at a point or along the built-in reference")
    p.add_argument("--R0", required=True, help="identity | diag:a,b,c | axisangle:x,y,z | 9 comma values")
    p.add_argument("--ke", type=float, default=1.0, help="attractiveness gain")
    p.add_argument("--reference", help="'paper_fig2' to linearize along the built-in reference")
    p.add_argument("--t", type=float, default=0.0, help="time along the reference")
    p.add_argument("--output", help="write the 12x15 CSV here instead of stdout")

    p = sub.add_parser("check-gains", help="evaluate the gain-validity gates")
    p.add_argument("--kp", help="matrix spec: I | 4I | diag:a,b,c | 9 comma values")
    p.add_argument("--kd", help="matrix spec")
    p.add_argument("--ki", help="matrix spec; with --kp/--kd selects the polynomial gate")
    p.add_argument("--kp-scalar", dest="kp_scalar", type=float, help="scalar proportional gain")
    p.add_argument("--eps", type=float, help="gyroscopic-correction weight to test")
    return parser


def run_command(argv: list[str] | None = None) -> int:
    """Parse argv, execute one subcommand, and map failures to exit codes."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "stabilize":
            return _run_scenario_command(args, {Scenario.STABILIZE, Scenario.OPEN_LOOP})
        if args.command == "track":
            return _run_scenario_command(args, {Scenario.TRACK})
        if args.command == "linearize":
            return _linearize_command(args)
        if args.command == "check-gains":
            return _check_gains_command(args)
        parser.error(f"unknown command {args.command}")
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return EXIT_SCHEMA
    except GainValidationError as exc:
        print(f"gain gate failure: {exc}", file=sys.stderr)
        return EXIT_GAIN_GATE
    except NumericsError as exc:
        print(f"numeric blow-up: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main() -> int:
    return run_command(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
