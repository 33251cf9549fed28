"""Deterministic parameter grids, boundary tracing, and CSV emission.

Grid points are pure-function evaluations gathered in row-major axis order,
so the output table (and its CSV bytes) is identical for any degree of data
parallelism and across repeat runs.  Per-point numerical failures are
recorded as NaN rows with a flag token instead of aborting the sweep.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import bounds, fock, gaussian

AXIS_NAMES = ("thermal_over_2pi", "theta_over_2pi", "ratio", "eta", "zeta", "n")
MODES = ("gaussian-closed-form", "gaussian-numeric", "fock-pure", "fock-thermal", "bounds")

# Damping used whenever a grid fixes only the product gamma_m t_G N_th; deep
# inside the weak-dissipation regime the pipelines assume.
DEFAULT_DAMPING = 1e-6

TWO_PI = 2.0 * math.pi

FLAG_OK = "ok"
FLAG_NEAR_THRESHOLD = "near_threshold"
FLAG_ERROR = "error"
FLAG_NO_BRACKET = "no_bracket"
FLAG_NON_MONOTONE = "non_monotone"


@dataclass(frozen=True)
class Axis:
    """One sweep axis: name, closed interval, point count, spacing."""

    name: str
    lo: float
    hi: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown axis {self.name!r}; choose from {AXIS_NAMES}")
        if self.count < 2:
            raise ValueError(f"axis {self.name}: count must be >= 2, got {self.count}")
        if self.spacing not in ("linear", "log"):
            raise ValueError(f"axis {self.name}: spacing must be 'linear' or 'log'")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.lo >= self.hi:
            raise ValueError(f"axis {self.name}: need finite lo < hi")
        if self.spacing == "log" and self.lo <= 0:
            raise ValueError(f"axis {self.name}: log spacing requires positive bounds")

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SweepSpec:
    """A grid evaluation request: mode, fixed parameters, one or two axes."""

    mode: str
    fixed: Mapping[str, float] = field(default_factory=dict)
    axes: tuple[Axis, ...] = ()
    output: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; choose from {MODES}")
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("a sweep needs one or two axes")
        names = [ax.name for ax in self.axes]
        if len(set(names)) != len(names):
            raise ValueError("axes must be distinct")
        overlap = set(names) & set(self.fixed)
        if overlap:
            raise ValueError(f"parameters {sorted(overlap)} are both fixed and swept")
        _check_exclusive(dict(self.fixed), names)
        point = dict(self.fixed)
        for name in names:
            point[name] = None
        _require_mode_params(self.mode, point)


@dataclass(frozen=True)
class BoundaryTraceSpec:
    """Scan one axis, bisecting another for a zero crossing of a target."""

    mode: str
    scan: Axis
    bisect: Axis
    fixed: Mapping[str, float] = field(default_factory=dict)
    target: str = "negativity"
    tolerance: float = 1e-4  # relative bisection half-width
    output: str | None = None

    def __post_init__(self):
        if self.target not in ("negativity", "lossy_margin"):
            raise ValueError(f"unknown target {self.target!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.scan.name == self.bisect.name:
            raise ValueError("scan and bisect axes must differ")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be > 0")
        _check_exclusive(dict(self.fixed), [self.scan.name, self.bisect.name])


@dataclass
class Table:
    """Column-named rows plus provenance metadata for the CSV comment line."""

    columns: tuple[str, ...]
    rows: list[tuple]
    meta: dict = field(default_factory=dict)


def _check_exclusive(fixed: dict, axis_names: list[str]) -> None:
    supplied = set(fixed) | set(axis_names)
    if "thermal_over_2pi" in supplied and "ratio" in supplied:
        raise ValueError("give either thermal_over_2pi or ratio, not both")


def _require_mode_params(mode: str, point: Mapping[str, object]) -> None:
    if "theta_over_2pi" not in point:
        raise ValueError("theta_over_2pi is required (fixed or as an axis)")
    if mode in ("gaussian-closed-form", "gaussian-numeric") and "zeta" not in point:
        raise ValueError(f"mode {mode} requires zeta")
    if mode in ("fock-pure", "fock-thermal") and "n" not in point:
        raise ValueError(f"mode {mode} requires n")


def resolve_channel(point: Mapping[str, float]) -> gaussian.ChannelParams:
    """Translate grid coordinates into ChannelParams.

    theta = 2 pi * theta_over_2pi; the thermal product gamma t N comes from
    thermal_over_2pi (times 2 pi) or from ratio via gamma t N = theta / (2 ratio);
    n_th is recovered through the damping knob (default 1e-6).
    """
    theta = TWO_PI * float(point["theta_over_2pi"])
    damping = float(point.get("damping", DEFAULT_DAMPING))
    if "thermal_over_2pi" in point and "ratio" in point:
        raise ValueError("give either thermal_over_2pi or ratio, not both")
    if "thermal_over_2pi" in point:
        thermal = TWO_PI * float(point["thermal_over_2pi"])
    elif "ratio" in point:
        ratio = float(point["ratio"])
        if ratio <= 0:
            raise ValueError(f"ratio must be > 0, got {ratio}")
        thermal = abs(theta) / (2.0 * ratio)
    elif "n_th" in point:
        thermal = damping * float(point["n_th"])
    else:
        raise ValueError("one of thermal_over_2pi, ratio, n_th is required")
    if thermal < 0:
        raise ValueError(f"thermal must be >= 0, got {thermal}")
    if thermal > 0 and damping <= 0:
        raise ValueError("damping must be > 0 when the thermal product is > 0")
    n_th = thermal / damping if damping > 0 else 0.0
    eta = float(point.get("eta", 1.0))
    return gaussian.ChannelParams(theta=theta, damping=damping, n_th=n_th, eta_a=eta, eta_b=eta)


def _fock_dims(point: Mapping[str, float]) -> tuple[int, int] | None:
    dims = point.get("dims")
    if dims is None:
        return None
    if isinstance(dims, (int, float)):
        return int(dims), int(dims)
    da, db = dims
    return int(da), int(db)


def evaluate_point(mode: str, point: Mapping[str, float]) -> dict:
    """Evaluate one grid point; returns negativity, nu_minus, flag, extras.

    For Gaussian modes nu_minus is the smallest partial-transpose symplectic
    eigenvalue; for Fock modes the column carries the most negative
    partial-transpose eigenvalue instead.
    """
    p = resolve_channel(point)
    flag = FLAG_OK
    extras: dict = {}
    if mode == "gaussian-closed-form":
        zeta = float(point["zeta"])
        nu = gaussian.closed_form_nu_squeezed(zeta, p.theta, p.thermal, p.eta_a)
        neg = max(0.0, 0.5 * (1.0 / nu - 1.0))
    elif mode == "gaussian-numeric":
        zeta = float(point["zeta"])
        v = gaussian.evolve(gaussian.input_squeezed_pair(zeta), gaussian.gravity_channel(p))
        v = gaussian.apply_loss(v, p)
        nu = gaussian.ppt_min_symplectic_eigenvalue(v)
        neg = max(0.0, 0.5 * (1.0 / nu - 1.0))
    elif mode == "fock-pure":
        n = int(round(float(point["n"])))
        neg = fock.pure_fock_negativity(n, p.theta)
        nu = fock.min_ppt_eigenvalue(fock.pure_output_density(n, p.theta))
    elif mode == "fock-thermal":
        n = int(round(float(point["n"])))
        rho = fock.thermal_output_density(n, p.theta, p.damping, p.n_th, dims=_fock_dims(point))
        eigs = np.linalg.eigvalsh(fock.partial_transpose(rho))
        neg = float(-eigs[eigs < 0].sum())
        nu = float(eigs[0])
    elif mode == "bounds":
        zeta = point.get("zeta")
        report = bounds.bound_report(p.theta, p.damping, p.n_th, p.eta_a,
                                     None if zeta is None else float(zeta))
        extras = {
            "universal_margin": report.universal_margin,
            "sep_preserved": report.separability_preserved,
            "ea": report.ea,
            "eb": report.eb,
            "lossy_margin": report.lossy_margin,
        }
        if zeta is not None:
            nu = gaussian.closed_form_nu_squeezed(float(zeta), p.theta, p.thermal, p.eta_a)
            neg = max(0.0, 0.5 * (1.0 / nu - 1.0))
        else:
            neg = math.nan
            nu = math.nan
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if mode.startswith("gaussian") and abs(nu - 1.0) <= gaussian.NU_THRESHOLD_TOL:
        flag = FLAG_NEAR_THRESHOLD
    return {"negativity": neg, "nu_minus": nu, "flag": flag, "extras": extras}


BOUND_COLUMNS = ("universal_margin", "sep_preserved", "ea", "eb", "lossy_margin")


def run_sweep(spec: SweepSpec, max_workers: int | None = None) -> Table:
    """Evaluate the grid row-major over the axes; never aborts on point errors."""
    axis_values = [ax.values() for ax in spec.axes]
    points = []
    if len(spec.axes) == 1:
        for v1 in axis_values[0]:
            points.append({spec.axes[0].name: float(v1)})
    else:
        for v1 in axis_values[0]:
            for v2 in axis_values[1]:
                points.append({spec.axes[0].name: float(v1), spec.axes[1].name: float(v2)})

    columns = tuple(ax.name for ax in spec.axes) + ("negativity", "nu_minus", "flag")
    if spec.mode == "bounds":
        columns += BOUND_COLUMNS

    def eval_one(coords: dict) -> tuple:
        merged = dict(spec.fixed)
        merged.update(coords)
        base = tuple(coords[ax.name] for ax in spec.axes)
        try:
            res = evaluate_point(spec.mode, merged)
        except Exception:
            row = base + (math.nan, math.nan, FLAG_ERROR)
            if spec.mode == "bounds":
                row += (math.nan,) * len(BOUND_COLUMNS)
            return row
        row = base + (res["negativity"], res["nu_minus"], res["flag"])
        if spec.mode == "bounds":
            row += tuple(res["extras"][c] for c in BOUND_COLUMNS)
        return row

    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(eval_one, points))
    else:
        rows = [eval_one(pt) for pt in points]

    meta = {"mode": spec.mode}
    meta.update({k: spec.fixed[k] for k in sorted(spec.fixed)})
    for i, ax in enumerate(spec.axes, start=1):
        meta[f"axis{i}"] = f"{ax.name}:{ax.spacing}:{ax.lo:g}:{ax.hi:g}:{ax.count}"
    return Table(columns=columns, rows=rows, meta=meta)


def _signed_target(mode: str, target: str, point: Mapping[str, float]) -> float:
    """Signed quantity whose zero is traced.

    Gaussian negativity is clamped at zero, so its crossing is located through
    the unclamped (1/nu - 1)/2; Fock negativities are exactly zero beyond the
    boundary, so a 1e-12 offset makes the sign flip detectable.
    """
    p = resolve_channel(point)
    if target == "lossy_margin":
        return bounds.lossy_bound_margin(p.theta, p.thermal, p.eta_a)
    if mode == "gaussian-closed-form":
        nu = gaussian.closed_form_nu_squeezed(float(point["zeta"]), p.theta, p.thermal, p.eta_a)
        return 0.5 * (1.0 / nu - 1.0)
    if mode == "gaussian-numeric":
        v = gaussian.evolve(gaussian.input_squeezed_pair(float(point["zeta"])),
                            gaussian.gravity_channel(p))
        v = gaussian.apply_loss(v, p)
        nu = gaussian.ppt_min_symplectic_eigenvalue(v)
        return 0.5 * (1.0 / nu - 1.0)
    if mode == "fock-pure":
        return fock.pure_fock_negativity(int(round(float(point["n"]))), p.theta) - 1e-12
    if mode == "fock-thermal":
        rho = fock.thermal_output_density(int(round(float(point["n"]))), p.theta,
                                          p.damping, p.n_th, dims=_fock_dims(point))
        # 1e-10 offset: truncated eigensolves leave ~1e-12 of negative-noise
        # floor beyond the true boundary
        return fock.ppt_negativity(rho) - 1e-10
    raise ValueError(f"unsupported mode {mode!r} for boundary tracing")


def trace_boundary(spec: BoundaryTraceSpec, max_workers: int | None = None) -> Table:
    """Locate the target's zero along the bisection axis at each scan point.

    Requires a sign change across the bracket; the target is presampled at
    five points and flagged non-monotone when the samples are not sorted.
    Non-bracketed or non-monotone scan points produce NaN rows with a flag.
    """
    log_bisect = spec.bisect.spacing == "log"

    def solve_one(scan_value: float) -> tuple:
        base = dict(spec.fixed)
        base[spec.scan.name] = float(scan_value)

        def f(b: float) -> float:
            pt = dict(base)
            pt[spec.bisect.name] = b
            return _signed_target(spec.mode, spec.target, pt)

        lo, hi = spec.bisect.lo, spec.bisect.hi
        probe_ax = Axis(spec.bisect.name, lo, hi, 5, spec.bisect.spacing)
        try:
            samples = [f(b) for b in probe_ax.values()]
        except Exception:
            return (scan_value, math.nan, FLAG_ERROR)
        if not all(math.isfinite(s) for s in samples):
            return (scan_value, math.nan, FLAG_ERROR)
        diffs = np.diff(samples)
        if not (np.all(diffs >= 0) or np.all(diffs <= 0)):
            return (scan_value, math.nan, FLAG_NON_MONOTONE)
        f_lo, f_hi = samples[0], samples[-1]
        if f_lo == 0.0:
            return (scan_value, lo, FLAG_OK)
        if f_hi == 0.0:
            return (scan_value, hi, FLAG_OK)
        if math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi):
            return (scan_value, math.nan, FLAG_NO_BRACKET)
        a, b = (math.log(lo), math.log(hi)) if log_bisect else (lo, hi)
        fa = f_lo
        for _ in range(200):
            mid = 0.5 * (a + b)
            x = math.exp(mid) if log_bisect else mid
            fm = f(x)
            if fm == 0.0:
                return (scan_value, x, FLAG_OK)
            if math.copysign(1.0, fm) == math.copysign(1.0, fa):
                a, fa = mid, fm
            else:
                b = mid
            if log_bisect:
                # log-space width is already a relative width on the axis
                if b - a <= spec.tolerance:
                    break
            else:
                center = 0.5 * (a + b)
                if b - a <= spec.tolerance * max(abs(center), 1e-300):
                    break
        crossing = math.exp(0.5 * (a + b)) if log_bisect else 0.5 * (a + b)
        return (scan_value, crossing, FLAG_OK)

    scan_values = [float(v) for v in spec.scan.values()]
    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(solve_one, scan_values))
    else:
        rows = [solve_one(v) for v in scan_values]

    meta = {"mode": spec.mode, "target": spec.target, "tolerance": spec.tolerance}
    meta.update({k: spec.fixed[k] for k in sorted(spec.fixed)})
    meta["scan"] = f"{spec.scan.name}:{spec.scan.spacing}:{spec.scan.lo:g}:{spec.scan.hi:g}:{spec.scan.count}"
    meta["bisect"] = f"{spec.bisect.name}:{spec.bisect.spacing}:{spec.bisect.lo:g}:{spec.bisect.hi:g}"
    return Table(columns=("scan_value", "crossing_value", "flag"), rows=rows, meta=meta)


def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def emit_csv(table: Table, path) -> None:
    """Write the table as UTF-8 CSV: comment line, header, 17-digit floats, LF.

    Identical inputs produce byte-identical files; NaN cells are the literal
    'nan'.
    """
    lines = []
    if table.meta:
        fields = " ".join(f"{k}={_format_cell(v)}" for k, v in table.meta.items())
        lines.append(f"# {fields}")
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(_format_cell(v) for v in row))
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
