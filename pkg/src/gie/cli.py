"""Command-line front end.

Commands
--------
point     closed-form negativity of a squeezed-input run at one parameter point
bounds    every separability bound at one parameter point (+ optional CSV row)
sweep     grid evaluation from flags and/or a key=value config file
trace     boundary tracing (bisection) from flags and/or a config file
figure    canned presets regenerating the reference figures as CSV
physical  convert SI experimental parameters to the dimensionless knobs

All numerical inputs are dimensionless channel coordinates; axes that the
reference figures show per 2 pi (theta, thermal) are per 2 pi here as well.
Exit codes: 0 success, 1 numerical or I/O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field

from . import bounds, gaussian
from .errors import NumericalConsistencyError, TruncationError
from .figures import PRESET_INFO, run_preset
from .sweeps import Axis, BoundaryTraceSpec, SweepSpec, Table, emit_csv, run_sweep, trace_boundary

TWO_PI = 2.0 * math.pi


class UsageError(Exception):
    """Bad flags, bad config, or inconsistent parameter combinations."""


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    preset: str | None = None
    output: str | None = None
    workers: int | None = None


def _read_config_file(path: str) -> dict:
    """Parse a line-oriented `key = value` file with # comments."""
    entries: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
                key, value = line.split("=", 1)
                entries[key.strip()] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    return entries


def _parse_axis(text: str, want_count: bool = True) -> Axis:
    parts = text.split(":")
    if want_count and len(parts) != 5:
        raise UsageError(f"axis spec must be name:spacing:lo:hi:count, got {text!r}")
    if not want_count and len(parts) not in (4, 5):
        raise UsageError(f"axis spec must be name:spacing:lo:hi[:count], got {text!r}")
    name, spacing = parts[0], parts[1]
    try:
        lo, hi = float(parts[2]), float(parts[3])
        count = int(parts[4]) if len(parts) == 5 else 2
    except ValueError as exc:
        raise UsageError(f"bad axis numbers in {text!r}") from exc
    try:
        return Axis(name=name, lo=lo, hi=hi, count=count, spacing=spacing)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _parse_dims(text: str) -> tuple[int, int]:
    try:
        parts = [int(p) for p in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"--dims must be INT or INT,INT, got {text!r}") from exc
    if len(parts) == 1:
        return parts[0], parts[0]
    if len(parts) == 2:
        return parts[0], parts[1]
    raise UsageError(f"--dims must be INT or INT,INT, got {text!r}")


def _add_point_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--theta-over-2pi", type=float, help="beam-splitter phase / 2 pi")
    sub.add_argument("--thermal-over-2pi", type=float,
                     help="thermal product gamma_m t_G N_th / 2 pi")
    sub.add_argument("--ratio", type=float, help="g_G / (2 gamma_m N_th); alternative to thermal")
    sub.add_argument("--nth", type=float, help="bath occupation N_th (with --damping)")
    sub.add_argument("--damping", type=float, help="gamma_m t_G (default 1e-6)")
    sub.add_argument("--eta", type=float, help="readout transmittance in (0, 1], default 1")
    sub.add_argument("--zeta", type=float, help="input squeezing parameter")
    sub.add_argument("--fock-n", type=int, help="Fock input photon number")
    sub.add_argument("--dims", type=str, help="Fock truncation per mode: INT or INT,INT")
    sub.add_argument("--out", type=str, help="write a CSV alongside the printed summary")
    sub.add_argument("--config", type=str, help="key=value file; CLI flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gie",
        description="Gravity-induced entanglement between pulsed optomechanical outputs: "
        "negativities, separability bounds, sweeps, figure data.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_point = subs.add_parser("point", help="closed-form negativity at one parameter point")
    _add_point_flags(p_point)

    p_bounds = subs.add_parser("bounds", help="all separability bounds at one parameter point")
    _add_point_flags(p_bounds)

    p_sweep = subs.add_parser("sweep", help="grid evaluation to CSV")
    _add_point_flags(p_sweep)
    p_sweep.add_argument("--mode", type=str, help="sweep mode (gaussian-closed-form, "
                         "gaussian-numeric, fock-pure, fock-thermal, bounds)")
    p_sweep.add_argument("--axis1", type=str, help="axis spec name:spacing:lo:hi:count")
    p_sweep.add_argument("--axis2", type=str, help="optional second axis spec")
    p_sweep.add_argument("--workers", type=int, help="parallel evaluation threads")

    p_trace = subs.add_parser("trace", help="boundary tracing to CSV")
    _add_point_flags(p_trace)
    p_trace.add_argument("--mode", type=str, help="evaluation mode for the target")
    p_trace.add_argument("--scan", type=str, help="scan axis spec name:spacing:lo:hi:count")
    p_trace.add_argument("--bisect", type=str, help="bisection axis spec name:spacing:lo:hi")
    p_trace.add_argument("--target", type=str, help="negativity (default) or lossy_margin")
    p_trace.add_argument("--tolerance", type=float, help="relative bisection width, default 1e-4")
    p_trace.add_argument("--workers", type=int, help="parallel evaluation threads")

    preset_lines = "\n".join(f"  {name:<10s} {info}" for name, info in sorted(PRESET_INFO.items()))
    p_fig = subs.add_parser(
        "figure",
        help="regenerate a reference figure's data as CSV",
        description="Presets:\n" + preset_lines,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p_fig.add_argument("preset", choices=sorted(PRESET_INFO), help="figure preset id")
    p_fig.add_argument("--out", type=str, required=True, help="output CSV path")
    p_fig.add_argument("--workers", type=int, help="parallel evaluation threads")

    p_phys = subs.add_parser("physical", help="convert SI parameters to dimensionless knobs")
    p_phys.add_argument("--density", type=float, required=True, help="M/d^3 in g/cm^3")
    p_phys.add_argument("--omega-m-over-2pi", type=float, required=True,
                        help="mechanical frequency omega_m / 2 pi in Hz")
    p_phys.add_argument("--gamma-m-over-2pi", type=float, required=True,
                        help="damping rate gamma_m / 2 pi in Hz (HWHM)")
    p_phys.add_argument("--temperature", type=float, required=True, help="bath temperature in K")
    p_phys.add_argument("--tg", type=float, required=True, help="interaction time t_G in s")

    return parser


_POINT_KEYS = ("theta_over_2pi", "thermal_over_2pi", "ratio", "nth", "damping",
               "eta", "zeta", "fock_n", "dims")
_FLOAT_CONFIG_KEYS = {"theta_over_2pi", "thermal_over_2pi", "ratio", "nth", "damping",
                      "eta", "zeta", "tolerance"}


def _merge_config(args: argparse.Namespace) -> dict:
    """Config-file entries overridden by explicitly given CLI flags."""
    merged: dict = {}
    if getattr(args, "config", None):
        merged.update(_read_config_file(args.config))
    for key in _POINT_KEYS + ("mode", "axis1", "axis2", "scan", "bisect",
                              "target", "tolerance", "out", "workers"):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _coerce(merged: dict) -> dict:
    out: dict = {}
    for key, value in merged.items():
        if isinstance(value, str) and key in _FLOAT_CONFIG_KEYS:
            try:
                out[key] = float(value)
            except ValueError as exc:
                raise UsageError(f"{key}: expected a number, got {value!r}") from exc
        elif key in ("fock_n", "workers") and isinstance(value, str):
            out[key] = int(value)
        else:
            out[key] = value
    return out


def _validate_ranges(params: dict) -> None:
    eta = params.get("eta")
    if eta is not None and not 0.0 < eta <= 1.0:
        raise UsageError(f"--eta must lie in (0, 1], got {eta}")
    for key in ("thermal_over_2pi", "nth", "damping"):
        value = params.get(key)
        if value is not None and value < 0:
            raise UsageError(f"--{key.replace('_', '-')} must be >= 0, got {value}")
    if params.get("ratio") is not None and params["ratio"] <= 0:
        raise UsageError(f"--ratio must be > 0, got {params['ratio']}")
    if "thermal_over_2pi" in params and "ratio" in params:
        raise UsageError("give either --thermal-over-2pi or --ratio, not both")


def parse_args(argv=None) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command

    if command == "physical":
        params = {
            "density": args.density,
            "omega_m_over_2pi": args.omega_m_over_2pi,
            "gamma_m_over_2pi": args.gamma_m_over_2pi,
            "temperature": args.temperature,
            "tg": args.tg,
        }
        return RunConfig(command=command, params=params)

    if command == "figure":
        return RunConfig(command=command, params={"preset": args.preset},
                         preset=args.preset, output=args.out, workers=args.workers)

    merged = _coerce(_merge_config(args))
    _validate_ranges(merged)
    output = merged.pop("out", None)
    workers = merged.pop("workers", None)
    return RunConfig(command=command, params=merged, output=output, workers=workers)


def _point_vars(params: dict) -> dict:
    point: dict = {}
    for key in ("theta_over_2pi", "thermal_over_2pi", "ratio", "damping", "eta", "zeta"):
        if params.get(key) is not None:
            point[key] = params[key]
    if params.get("nth") is not None:
        point["n_th"] = params["nth"]
    if params.get("fock_n") is not None:
        point["n"] = params["fock_n"]
    if params.get("dims") is not None:
        dims = params["dims"]
        point["dims"] = _parse_dims(dims) if isinstance(dims, str) else dims
    if "theta_over_2pi" not in point:
        raise UsageError("--theta-over-2pi is required")
    if not any(k in point for k in ("thermal_over_2pi", "ratio", "n_th")):
        raise UsageError("one of --thermal-over-2pi, --ratio, --nth is required")
    return point


def _meta_from(command: str, params: dict, output) -> dict:
    meta = {"command": command}
    for key in sorted(params):
        value = params[key]
        if value is None:
            continue
        meta[key] = value if not isinstance(value, tuple) else ",".join(map(str, value))
    if output:
        meta["out"] = output
    return meta


def _run_point(config: RunConfig) -> int:
    from .sweeps import resolve_channel

    point = _point_vars(config.params)
    if "zeta" not in point:
        raise UsageError("point requires --zeta")
    p = resolve_channel(point)
    zeta = float(point["zeta"])
    nu_lossless = gaussian.closed_form_nu_squeezed(zeta, p.theta, p.thermal, 1.0)
    neg_lossless = max(0.0, 0.5 * (1.0 / nu_lossless - 1.0))
    nu = gaussian.closed_form_nu_squeezed(zeta, p.theta, p.thermal, p.eta_a)
    neg = max(0.0, 0.5 * (1.0 / nu - 1.0))
    print(f"theta = {p.theta:.17g}  thermal = {p.thermal:.17g}  "
          f"zeta = {zeta:.17g}  eta = {p.eta_a:.17g}")
    print(f"negativity = {neg:.17g}")
    print(f"nu_minus = {nu:.17g}")
    if p.eta_a != 1.0:
        print(f"negativity_lossless = {neg_lossless:.17g}")
    if config.output:
        table = Table(
            columns=("theta", "thermal", "zeta", "eta", "negativity", "nu_minus"),
            rows=[(p.theta, p.thermal, zeta, p.eta_a, neg, nu)],
            meta=_meta_from("point", config.params, config.output),
        )
        emit_csv(table, config.output)
        print(f"wrote {config.output}")
    return 0


def _run_bounds(config: RunConfig) -> int:
    from .sweeps import resolve_channel

    point = _point_vars(config.params)
    p = resolve_channel(point)
    zeta = point.get("zeta")
    report = bounds.bound_report(p.theta, p.damping, p.n_th, p.eta_a,
                                 None if zeta is None else float(zeta))
    oc = bounds.omega_components(p.theta, p.damping, p.n_th)
    _, margin = bounds.separability_preserved(oc)
    print(f"theta = {p.theta:.17g}  damping = {p.damping:.17g}  "
          f"n_th = {p.n_th:.17g}  eta = {p.eta_a:.17g}")
    print(f"universal_margin = {report.universal_margin:.17g}  (g_G - 2 gamma N_th, units of g_G)")
    print(f"separability_preserved = {report.separability_preserved}  (margin {margin:.6g})")
    if oc.o2 < 0:
        print("note: omega_2 < 0, bound is sufficient-only in this regime")
    print(f"ea = {report.ea}  eb = {report.eb}")
    print(f"lossy_margin = {report.lossy_margin:.17g}  "
          f"({'separable after loss' if report.lossy_margin >= 0 else 'entanglement can survive loss'})")
    if zeta is not None:
        zeta = float(zeta)
        nu0 = gaussian.closed_form_nu_squeezed(zeta, p.theta, p.thermal, 1.0)
        neg0 = max(0.0, 0.5 * (1.0 / nu0 - 1.0))
        nu1 = gaussian.closed_form_nu_squeezed(zeta, p.theta, p.thermal, p.eta_a)
        neg1 = max(0.0, 0.5 * (1.0 / nu1 - 1.0))
        verdict = "entangled" if neg1 > 0 else "separable"
        print(f"finite_squeezing_ok = {report.finite_squeezing_ok}")
        print(f"negativity_lossless = {neg0:.17g}")
        print(f"negativity_post_loss = {neg1:.17g}  ({verdict} at eta = {p.eta_a:g})")
    if config.output:
        lines = ["# " + " ".join(f"{k}={v}" for k, v in
                                 _meta_from("bounds", config.params, config.output).items()),
                 bounds.BoundReport.CSV_HEADER, report.csv_row()]
        with open(config.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {config.output}")
    return 0


def _run_sweep(config: RunConfig) -> int:
    params = dict(config.params)
    mode = params.pop("mode", None)
    if not mode:
        raise UsageError("sweep requires --mode (or mode in the config file)")
    axis_specs = [params.pop(k) for k in ("axis1", "axis2") if params.get(k) is not None]
    params.pop("axis2", None)
    if not axis_specs:
        raise UsageError("sweep requires --axis1 (or axis1 in the config file)")
    if config.output is None:
        raise UsageError("sweep requires --out (or out in the config file)")
    axes = tuple(_parse_axis(s) for s in axis_specs)
    fixed = _sweep_fixed(params, {ax.name for ax in axes})
    try:
        spec = SweepSpec(mode=mode, fixed=fixed, axes=axes, output=config.output)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    table = run_sweep(spec, max_workers=config.workers)
    table.meta = _meta_from("sweep", config.params, config.output) | table.meta
    emit_csv(table, config.output)
    print(f"wrote {config.output} ({len(table.rows)} rows)")
    return 0


def _sweep_fixed(params: dict, axis_names: set[str]) -> dict:
    fixed: dict = {}
    rename = {"nth": "n_th", "fock_n": "n"}
    for key, value in params.items():
        if value is None or key in ("config",):
            continue
        name = rename.get(key, key)
        if name in axis_names:
            raise UsageError(f"{name} is both a flag and an axis")
        if name == "dims" and isinstance(value, str):
            value = _parse_dims(value)
        fixed[name] = value
    return fixed


def _run_trace(config: RunConfig) -> int:
    params = dict(config.params)
    mode = params.pop("mode", None) or "gaussian-closed-form"
    scan_spec = params.pop("scan", None)
    bisect_spec = params.pop("bisect", None)
    target = params.pop("target", None) or "negativity"
    tolerance = params.pop("tolerance", None)
    if scan_spec is None or bisect_spec is None:
        raise UsageError("trace requires --scan and --bisect (or config entries)")
    if config.output is None:
        raise UsageError("trace requires --out (or out in the config file)")
    scan = _parse_axis(scan_spec)
    bisect = _parse_axis(bisect_spec, want_count=False)
    fixed = _sweep_fixed(params, {scan.name, bisect.name})
    try:
        spec = BoundaryTraceSpec(
            mode=mode, scan=scan, bisect=bisect, fixed=fixed, target=target,
            tolerance=1e-4 if tolerance is None else float(tolerance),
            output=config.output,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    table = trace_boundary(spec, max_workers=config.workers)
    table.meta = _meta_from("trace", config.params, config.output) | table.meta
    emit_csv(table, config.output)
    print(f"wrote {config.output} ({len(table.rows)} rows)")
    return 0


def _run_figure(config: RunConfig) -> int:
    table = run_preset(config.preset, max_workers=config.workers)
    table.meta = {"command": "figure", "out": config.output} | table.meta
    emit_csv(table, config.output)
    print(f"wrote {config.output} ({len(table.rows)} rows)")
    return 0


def _run_physical(config: RunConfig) -> int:
    p = config.params
    pp = bounds.PhysicalParams(
        mass_density=p["density"],
        omega_m=TWO_PI * p["omega_m_over_2pi"],
        gamma_m=TWO_PI * p["gamma_m_over_2pi"],
        temperature=p["temperature"],
        t_g=p["tg"],
    )
    dp = bounds.physical_to_dimensionless(pp)
    q_required = bounds.K_B * pp.temperature / (bounds.HBAR * dp.g_g)
    print(f"g_g = {dp.g_g:.17g} rad/s")
    print(f"n_th = {dp.n_th:.17g}")
    print(f"theta = {dp.theta:.17g}  theta_over_2pi = {dp.theta / TWO_PI:.17g}")
    print(f"damping = {dp.damping:.17g}")
    print(f"ratio = {dp.ratio:.17g}  (g_G / 2 gamma_m N_th)")
    print(f"q_m = {dp.q_m:.17g}  required > {q_required:.17g}: {dp.q_m > q_required}")
    return 0


_RUNNERS = {
    "point": _run_point,
    "bounds": _run_bounds,
    "sweep": _run_sweep,
    "trace": _run_trace,
    "figure": _run_figure,
    "physical": _run_physical,
}


def run(config: RunConfig) -> int:
    """Execute a parsed RunConfig; returns the process exit code."""
    try:
        return _RUNNERS[config.command](config)
    except UsageError:
        raise
    except (NumericalConsistencyError, TruncationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    try:
        config = parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return run(config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
