"""Tests for the grid, boundary-tracing, and CSV machinery."""

import hashlib
import math

import numpy as np
import pytest

import gie
from gie.sweeps import (
    Axis,
    BoundaryTraceSpec,
    SweepSpec,
    Table,
    emit_csv,
    evaluate_point,
    resolve_channel,
    run_sweep,
    trace_boundary,
)

E2 = math.exp(2.0)


def test_axis_values():
    lin = Axis("zeta", 0.0, 1.0, 5)
    assert np.allclose(lin.values(), [0.0, 0.25, 0.5, 0.75, 1.0])
    log = Axis("thermal_over_2pi", 1e-4, 1e-2, 3, "log")
    assert np.allclose(log.values(), [1e-4, 1e-3, 1e-2])


def test_axis_validation():
    with pytest.raises(ValueError):
        Axis("zeta", 0.0, 1.0, 1)
    with pytest.raises(ValueError):
        Axis("thermal_over_2pi", 0.0, 1.0, 4, "log")
    with pytest.raises(ValueError):
        Axis("bogus", 0.0, 1.0, 4)
    with pytest.raises(ValueError):
        Axis("zeta", 1.0, 1.0, 4)
    with pytest.raises(ValueError):
        Axis("zeta", 0.0, 1.0, 4, "cubic")


def test_sweep_spec_validation():
    ax = Axis("thermal_over_2pi", 1e-5, 1e-3, 4, "log")
    with pytest.raises(ValueError):
        SweepSpec(mode="nope", fixed={"theta_over_2pi": 1e-4, "zeta": 1.0}, axes=(ax,))
    with pytest.raises(ValueError):  # thermal and ratio together
        SweepSpec(mode="gaussian-closed-form",
                  fixed={"theta_over_2pi": 1e-4, "zeta": 1.0, "ratio": 2.0}, axes=(ax,))
    with pytest.raises(ValueError):  # missing zeta
        SweepSpec(mode="gaussian-closed-form", fixed={"theta_over_2pi": 1e-4}, axes=(ax,))
    with pytest.raises(ValueError):  # missing theta
        SweepSpec(mode="gaussian-closed-form", fixed={"zeta": 1.0}, axes=(ax,))
    with pytest.raises(ValueError):  # duplicate axes
        SweepSpec(mode="gaussian-closed-form", fixed={"theta_over_2pi": 1e-4, "zeta": 1.0},
                  axes=(ax, ax))
    with pytest.raises(ValueError):  # fixed and swept
        SweepSpec(mode="gaussian-closed-form",
                  fixed={"theta_over_2pi": 1e-4, "zeta": 1.0, "thermal_over_2pi": 0.0},
                  axes=(ax,))


def test_resolve_channel_paths():
    p = resolve_channel({"theta_over_2pi": 0.125, "thermal_over_2pi": 0.0})
    assert p.theta == pytest.approx(math.pi / 4)
    assert p.n_th == 0.0 and p.damping == 1e-6
    p = resolve_channel({"theta_over_2pi": 0.125, "ratio": 2.0})
    assert p.thermal == pytest.approx(p.theta / 4.0, rel=1e-14)
    p = resolve_channel({"theta_over_2pi": 0.125, "n_th": 10.0, "damping": 1e-3})
    assert p.thermal == pytest.approx(0.01)
    with pytest.raises(ValueError):
        resolve_channel({"theta_over_2pi": 0.125})
    with pytest.raises(ValueError):
        resolve_channel({"theta_over_2pi": 0.125, "ratio": -1.0})


def test_evaluate_point_quarter_swap():
    res = evaluate_point("gaussian-closed-form",
                         {"theta_over_2pi": 0.125, "thermal_over_2pi": 0.0, "zeta": 1.0})
    assert res["negativity"] == pytest.approx((E2 - 1) / 2, rel=1e-12)
    res_num = evaluate_point("gaussian-numeric",
                             {"theta_over_2pi": 0.125, "thermal_over_2pi": 0.0, "zeta": 1.0})
    assert res_num["negativity"] == pytest.approx(res["negativity"], rel=1e-5)


def test_evaluate_point_near_threshold_flag():
    res = evaluate_point("gaussian-closed-form",
                         {"theta_over_2pi": 0.125, "thermal_over_2pi": 0.0, "zeta": 0.0})
    assert res["nu_minus"] == 1.0
    assert res["flag"] == "near_threshold"


def test_run_sweep_minimal_grid_rows():
    spec = SweepSpec(
        mode="gaussian-closed-form",
        fixed={"theta_over_2pi": 0.125, "zeta": 1.0},
        axes=(Axis("thermal_over_2pi", 0.0, 1e-3, 2), Axis("eta", 0.9, 1.0, 2)),
    )
    table = run_sweep(spec)
    assert len(table.rows) == 4
    assert table.columns == ("thermal_over_2pi", "eta", "negativity", "nu_minus", "flag")
    # row-major ordering over axes
    assert table.rows[0][0] == 0.0 and table.rows[0][1] == 0.9
    assert table.rows[1][0] == 0.0 and table.rows[1][1] == 1.0


def test_run_sweep_clamps_negativity():
    spec = SweepSpec(
        mode="gaussian-closed-form",
        fixed={"theta_over_2pi": 1e-4, "zeta": 1.0},
        axes=(Axis("thermal_over_2pi", 1e-6, 1e-2, 25, "log"),),
    )
    table = run_sweep(spec)
    negs = [row[1] for row in table.rows]
    assert all(n >= 0.0 for n in negs)
    assert any(n > 0 for n in negs) and any(n == 0.0 for n in negs)


def test_run_sweep_error_rows_do_not_abort():
    # eta = 0 is rejected by the closed form; the row must become NaN/flagged
    spec = SweepSpec(
        mode="gaussian-closed-form",
        fixed={"theta_over_2pi": 0.125, "thermal_over_2pi": 0.0, "zeta": 1.0},
        axes=(Axis("eta", 0.0, 1.0, 3),),
    )
    table = run_sweep(spec)
    assert table.rows[0][-1] == "error"
    assert math.isnan(table.rows[0][1])
    assert table.rows[2][-1] == "ok"


def test_run_sweep_parallel_equals_serial():
    spec = SweepSpec(
        mode="gaussian-numeric",
        fixed={"theta_over_2pi": 1e-3, "zeta": 1.2, "eta": 0.95},
        axes=(Axis("thermal_over_2pi", 1e-6, 1e-3, 7, "log"),),
    )
    serial = run_sweep(spec)
    parallel = run_sweep(spec, max_workers=4)
    assert serial.rows == parallel.rows


def test_bounds_mode_appends_report_columns():
    spec = SweepSpec(
        mode="bounds",
        fixed={"theta_over_2pi": 1e-3, "zeta": 1.0},
        axes=(Axis("ratio", 0.5, 2.0, 4),),
    )
    table = run_sweep(spec)
    assert table.columns[-5:] == ("universal_margin", "sep_preserved", "ea", "eb", "lossy_margin")
    low, high = table.rows[0], table.rows[-1]
    assert low[table.columns.index("sep_preserved")] is True
    assert high[table.columns.index("sep_preserved")] is False


def test_emit_csv_bytes(tmp_path):
    table = Table(columns=("a", "b"), rows=[(1.0, float("nan")), (0.5, "ok")])
    path = tmp_path / "t.csv"
    emit_csv(table, path)
    text = path.read_bytes()
    assert text == b"a,b\n1,nan\n0.5,ok\n"
    # with metadata: one comment line on top, rerun byte-identical
    table.meta = {"mode": "demo", "x": 2.0}
    emit_csv(table, path)
    first = hashlib.sha256(path.read_bytes()).hexdigest()
    emit_csv(table, path)
    assert hashlib.sha256(path.read_bytes()).hexdigest() == first
    assert path.read_text().startswith("# mode=demo x=2\n")


def test_sweep_csv_determinism(tmp_path):
    spec = SweepSpec(
        mode="gaussian-closed-form",
        fixed={"theta_over_2pi": 1e-4, "zeta": 2.0},
        axes=(Axis("thermal_over_2pi", 1e-6, 5e-4, 12, "log"),),
    )
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(run_sweep(spec), p1)
    emit_csv(run_sweep(spec, max_workers=3), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_trace_boundary_universal_line():
    spec = BoundaryTraceSpec(
        mode="gaussian-closed-form",
        scan=Axis("theta_over_2pi", 1e-4, 1e-3, 4, "log"),
        bisect=Axis("ratio", 0.2, 5.0, 2, "log"),
        fixed={"zeta": 20.0, "eta": 1.0},
        target="negativity",
        tolerance=1e-6,
    )
    table = trace_boundary(spec)
    for _, crossing, flag in table.rows:
        assert flag == "ok"
        assert crossing == pytest.approx(1.0, rel=1e-3)


def test_trace_boundary_no_bracket():
    spec = BoundaryTraceSpec(
        mode="gaussian-closed-form",
        scan=Axis("theta_over_2pi", 1e-4, 2e-4, 3, "log"),
        bisect=Axis("ratio", 1e3, 1e4, 2, "log"),
        fixed={"zeta": 0.5, "eta": 1.0},
    )
    table = trace_boundary(spec)
    for _, crossing, flag in table.rows:
        assert flag == "no_bracket"
        assert math.isnan(crossing)


def test_trace_boundary_loss_shrinks_entangling_region():
    common = dict(
        mode="gaussian-closed-form",
        scan=Axis("theta_over_2pi", 1e-3, 1e-2, 5, "log"),
        bisect=Axis("ratio", 0.2, 200.0, 2, "log"),
        target="negativity",
        tolerance=1e-6,
    )
    lossless = trace_boundary(BoundaryTraceSpec(fixed={"zeta": 0.5, "eta": 1.0}, **common))
    lossy = trace_boundary(BoundaryTraceSpec(fixed={"zeta": 0.5, "eta": 0.999}, **common))
    for (_, r1, f1), (_, r2, f2) in zip(lossless.rows, lossy.rows):
        assert f1 == "ok" and f2 == "ok"
        assert r2 > r1 * (1.0 - 1e-9)


def test_margin_trace_matches_large_squeezing_boundary():
    scan = Axis("theta_over_2pi", 1e-4, 1e-2, 5, "log")
    bisect = Axis("ratio", 0.2, 50.0, 2, "log")
    tol = 1e-5
    neg_trace = trace_boundary(BoundaryTraceSpec(
        mode="gaussian-closed-form", scan=scan, bisect=bisect,
        fixed={"zeta": 20.0, "eta": 1.0}, target="negativity", tolerance=tol))
    margin_trace = trace_boundary(BoundaryTraceSpec(
        mode="gaussian-closed-form", scan=scan, bisect=bisect,
        fixed={"zeta": 20.0, "eta": 1.0}, target="lossy_margin", tolerance=tol))
    for (_, r1, _), (_, r2, _) in zip(neg_trace.rows, margin_trace.rows):
        assert abs(r1 - r2) <= 2 * tol * max(r1, r2) + 1e-12


def test_trace_spec_validation():
    scan = Axis("theta_over_2pi", 1e-4, 1e-3, 3, "log")
    bisect = Axis("ratio", 0.1, 10.0, 2, "log")
    with pytest.raises(ValueError):
        BoundaryTraceSpec(mode="gaussian-closed-form", scan=scan, bisect=scan,
                          fixed={"zeta": 1.0})
    with pytest.raises(ValueError):
        BoundaryTraceSpec(mode="gaussian-closed-form", scan=scan, bisect=bisect,
                          fixed={"zeta": 1.0}, target="bogus")
    with pytest.raises(ValueError):
        BoundaryTraceSpec(mode="gaussian-closed-form", scan=scan, bisect=bisect,
                          fixed={"zeta": 1.0}, tolerance=0.0)
