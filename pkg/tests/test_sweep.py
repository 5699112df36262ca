import json
import math

import numpy as np
import pytest

from omitlab.errors import InvalidSpec
from omitlab.omit import probe_transmission
from omitlab.optics import optical_transmission
from omitlab.params import SystemConfig
from omitlab.sweep import Axis, SweepSpec, emit, emit_errors, parse_json, run_sweep

from conftest import GAMMA_C


def _spec(**kw):
    d = {"observable": "optical_T", "axis1": {"path": "gamma_tip", "start": 0.0, "stop": 51.44, "count": 3}}
    d.update(kw)
    return SweepSpec.from_dict(d)


def test_one_dimensional_csv_shape():
    text = emit(run_sweep(_spec()))
    lines = text.splitlines()
    assert len(lines) == 4
    assert lines[0] == "axis1,value"
    assert lines[1] == "0,0.3600000000000001"


def test_two_dimensional_csv_is_row_major():
    spec = _spec(axis2={"path": "Delta_P", "start": -1.0, "stop": 1.0, "count": 2})
    rows = emit(run_sweep(spec)).splitlines()
    assert rows[0] == "axis1,axis2,value"
    assert [r.split(",")[:2] for r in rows[1:3]] == [["0", "-1"], ["0", "1"]]
    assert len(rows) == 7


def test_values_equal_pointwise_calls():
    spec = SweepSpec.from_dict(
        {"observable": "T_P", "axis1": {"path": "Delta_P", "start": -3.0, "stop": 3.0, "count": 2},
         "base": {"gamma_tip": 19.29}}
    )
    res = run_sweep(spec)
    cfg = SystemConfig(gamma_tip=19.29e6)
    assert res.grids["value"] == [probe_transmission(cfg, -3e6)[1], probe_transmission(cfg, 3e6)[1]]


def test_optical_curve_minimum_at_turning_point():
    spec = _spec(axis1={"path": "gamma_tip", "start": 0.0, "stop": 51.44, "count": 81})
    res = run_sweep(spec)
    grid = spec.axis1.grid()
    assert grid[int(np.argmin(res.grids["value"]))] == pytest.approx(3 * GAMMA_C / 1e6, rel=1e-12)


def test_explicit_axis_values():
    spec = _spec(axis2={"path": "Delta_P", "values": [-11.0, 0.0]})
    res = run_sweep(spec)
    assert res.shape == (3, 2)
    T, _ = optical_transmission(SystemConfig(), -11e6, -11e6)
    assert res.array()[0, 0] == T


def test_eigenvalue_observable_has_two_branches():
    spec = SweepSpec.from_dict({"observable": "eig_imag", "axis1": {"path": "gamma_tip", "start": 0, "stop": 51.44, "count": 9}})
    res = run_sweep(spec)
    assert set(res.grids) == {"plus", "minus"}
    assert emit(res).splitlines()[0] == "axis1,plus,minus"
    total = np.array(res.grids["plus"]) + np.array(res.grids["minus"])
    assert np.allclose(total, -(2 * GAMMA_C + np.array(spec.axis1.grid()) * 1e6), rtol=1e-12)


def test_json_round_trip():
    res = run_sweep(_spec(observable="eta", Delta_P=-3.0))
    again = parse_json(emit(res, "json"))
    assert again == res
    assert again.grids == res.grids
    assert set(json.loads(emit(res, "json"))["provenance"]) == {"config_hash", "code_version", "timestamp"}


def test_failed_cells_become_nan_with_error_entry():
    # rates may be negative only for Delta_L; a negative pump power is rejected per cell
    spec = _spec(observable="T_P", axis1={"path": "P_L", "start": -1e-3, "stop": 1e-3, "count": 3})
    res = run_sweep(spec)
    vals = res.grids["value"]
    assert math.isnan(vals[0]) and not math.isnan(vals[2])
    assert len(res.errors) == 1 and res.errors[0]["index"] == 0
    assert "ConfigError" in res.errors[0]["error"]
    assert emit(res).splitlines()[1].endswith(",nan")
    assert emit_errors(res).splitlines()[1].startswith("0,-0.001,")
    assert parse_json(emit(res, "json")) == res


def test_serial_and_parallel_agree():
    spec = _spec(observable="T_P", axis2={"path": "Delta_P", "start": -15.0, "stop": 15.0, "count": 13})
    a, b = run_sweep(spec), run_sweep(spec, workers=3)
    assert emit(a) == emit(b)
    assert a.grids == b.grids


def test_repeat_runs_are_byte_identical():
    spec = _spec(observable="tau_g", Delta_P=-3.0)
    assert emit(run_sweep(spec)) == emit(run_sweep(spec))


@pytest.mark.parametrize(
    "bad",
    [
        {"observable": "nope", "axis1": {"path": "gamma_tip", "start": 0, "stop": 1, "count": 2}},
        {"observable": "T_P", "axis1": {"path": "colour", "start": 0, "stop": 1, "count": 2}},
        {"observable": "T_P", "axis1": {"path": "gamma_tip", "start": 0, "stop": 1, "count": 1}},
        {"observable": "T_P", "axis1": {"path": "gamma_tip", "start": 1, "stop": 0, "count": 3}},
        {"observable": "T_P", "axis1": {"path": "gamma_tip", "start": 0, "stop": 1, "count": 2}, "base": {"m": -1}},
        {"observable": "T_P", "axis1": {"path": "gamma_tip", "start": 0, "stop": 1, "count": 2},
         "axis2": {"path": "gamma_tip", "start": 0, "stop": 1, "count": 2}},
        {"observable": "T_P"},
        {"observable": "T_P", "axis1": {"path": "gamma_tip", "start": 0, "stop": 1, "count": 2}, "extra": 1},
    ],
)
def test_invalid_specs(bad):
    with pytest.raises(InvalidSpec):
        SweepSpec.from_dict(bad)


def test_axis_dict_round_trip():
    ax = Axis.from_dict({"path": "Delta_P", "values": [-3.0, 3.0]})
    assert Axis.from_dict(ax.to_dict()) == ax
