"""Figure presets: canned sweeps regenerating the reference data sets.

Each preset returns a Table ready for emit_csv; the meta dictionary records
every knob so the CSV header comment fully describes its provenance.  The
negativity-vs-thermal panels fix the beam-splitter phase at
theta_over_2pi = 1e-4; the phase-diagram panels live in the
(theta/2pi, ratio) plane with ratio = g_G / (2 gamma_m N_th) and recover the
thermal product through gamma t N = theta / (2 ratio); loss panels fix
theta_over_2pi = 3.4e-2 near the feasibility point.
"""

from __future__ import annotations

from .sweeps import Axis, BoundaryTraceSpec, SweepSpec, Table, run_sweep, trace_boundary

PRESET_INFO = {
    "fig2-left": "negativity vs thermal noise, squeezed inputs zeta = 1, 2, 5 (theta/2pi = 1e-4)",
    "fig2-right": "negativity vs thermal noise, Fock inputs n = 1, 2, 5 with thermal channel",
    "fig3": "negativity and bound verdicts over the (theta/2pi, ratio) plane, zeta = 1",
    "fig4": "lossy negativity vs thermal noise at eta = 0.999, zeta = 0.2, 0.5, 2",
    "fig5": "vanishing-negativity boundaries in the (theta/2pi, ratio) plane for four eta values",
    "fig6-left": "negativity over (ratio, eta) at theta/2pi = 3.4e-2, zeta = 1",
    "fig6-right": "negativity over (zeta, eta) at theta/2pi = 3.4e-2, ratio = 1.6",
}

_THERMAL_AXIS = Axis("thermal_over_2pi", 1e-6, 5e-4, 40, "log")


def _stacked_family(mode: str, family_key: str, family_values, fixed: dict,
                    axis: Axis, max_workers=None) -> Table:
    """Run one sweep per family member and stack rows under a leading column."""
    rows = []
    columns = None
    for value in family_values:
        member_fixed = dict(fixed)
        member_fixed[family_key] = value
        spec = SweepSpec(mode=mode, fixed=member_fixed, axes=(axis,))
        table = run_sweep(spec, max_workers=max_workers)
        columns = (family_key,) + table.columns
        rows.extend((value,) + row for row in table.rows)
    meta = {"preset_mode": mode, family_key: ",".join(str(v) for v in family_values)}
    meta.update({k: fixed[k] for k in sorted(fixed)})
    meta["axis"] = f"{axis.name}:{axis.spacing}:{axis.lo:g}:{axis.hi:g}:{axis.count}"
    return Table(columns=columns, rows=rows, meta=meta)


def fig2_left(max_workers=None) -> Table:
    return _stacked_family(
        "gaussian-closed-form", "zeta", (1.0, 2.0, 5.0),
        {"theta_over_2pi": 1e-4}, _THERMAL_AXIS, max_workers,
    )


def fig2_right(max_workers=None) -> Table:
    axis = Axis("thermal_over_2pi", 1e-6, 5e-4, 25, "log")
    return _stacked_family(
        "fock-thermal", "n", (1, 2, 5), {"theta_over_2pi": 1e-4}, axis, max_workers,
    )


def fig3(max_workers=None) -> Table:
    spec = SweepSpec(
        mode="bounds",
        fixed={"zeta": 1.0},
        axes=(
            Axis("theta_over_2pi", 1e-4, 1.0, 33, "log"),
            Axis("ratio", 0.1, 4.0, 32, "linear"),
        ),
    )
    return run_sweep(spec, max_workers=max_workers)


def fig4(max_workers=None) -> Table:
    return _stacked_family(
        "gaussian-closed-form", "zeta", (0.2, 0.5, 2.0),
        {"theta_over_2pi": 1e-4, "eta": 0.999}, _THERMAL_AXIS, max_workers,
    )


def fig5(max_workers=None) -> Table:
    """Boundary ratio*(theta) where the closed-form negativity vanishes."""
    rows = []
    scan = Axis("theta_over_2pi", 1e-3, 0.3, 21, "log")
    bisect = Axis("ratio", 0.05, 100.0, 2, "log")
    for eta in (0.999, 0.9, 0.8, 0.7):
        for zeta in (0.1, 0.5, 1.0, 2.0):
            spec = BoundaryTraceSpec(
                mode="gaussian-closed-form",
                scan=scan,
                bisect=bisect,
                fixed={"eta": eta, "zeta": zeta},
                target="negativity",
            )
            table = trace_boundary(spec, max_workers=max_workers)
            rows.extend((eta, zeta) + row for row in table.rows)
    meta = {
        "preset_mode": "gaussian-closed-form",
        "eta": "0.999,0.9,0.8,0.7",
        "zeta": "0.1,0.5,1,2",
        "scan": f"{scan.name}:{scan.spacing}:{scan.lo:g}:{scan.hi:g}:{scan.count}",
        "bisect": f"{bisect.name}:{bisect.spacing}:{bisect.lo:g}:{bisect.hi:g}",
    }
    return Table(
        columns=("eta", "zeta", "theta_over_2pi", "ratio_crossing", "flag"),
        rows=rows,
        meta=meta,
    )


def fig6_left(max_workers=None) -> Table:
    spec = SweepSpec(
        mode="gaussian-closed-form",
        fixed={"theta_over_2pi": 3.4e-2, "zeta": 1.0},
        axes=(
            Axis("ratio", 0.25, 8.0, 33, "log"),
            Axis("eta", 0.6, 1.0, 41, "linear"),
        ),
    )
    return run_sweep(spec, max_workers=max_workers)


def fig6_right(max_workers=None) -> Table:
    spec = SweepSpec(
        mode="gaussian-closed-form",
        fixed={"theta_over_2pi": 3.4e-2, "ratio": 1.6},
        axes=(
            Axis("zeta", 0.0, 3.0, 61, "linear"),
            Axis("eta", 0.6, 1.0, 41, "linear"),
        ),
    )
    return run_sweep(spec, max_workers=max_workers)


PRESETS = {
    "fig2-left": fig2_left,
    "fig2-right": fig2_right,
    "fig3": fig3,
    "fig4": fig4,
    "fig5": fig5,
    "fig6-left": fig6_left,
    "fig6-right": fig6_right,
}


def run_preset(preset: str, max_workers=None) -> Table:
    """Build the table for one preset id."""
    try:
        builder = PRESETS[preset]
    except KeyError:
        raise ValueError(
            f"unknown preset {preset!r}; choose from {', '.join(sorted(PRESETS))}"
        ) from None
    table = builder(max_workers=max_workers)
    table.meta = {"preset": preset, **table.meta}
    return table
