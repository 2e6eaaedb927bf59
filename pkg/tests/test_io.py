import numpy as np
import pytest

from pfb.errors import InvalidArgumentError
from pfb.io import (
    dumps_json,
    format_float,
    output_root,
    read_series,
    read_vtk,
    series_text,
    vtk_text,
    write_series,
    write_vtk,
)
from pfb.mesh import generate_structured

POINT = {"c": [0.0, 0.5, 0.25, 1.0]}
CELL = {"pressure": [1.5, -2.0], "velocity": [[1.0, 0.0], [0.1, -0.0]]}


def test_vtk_matches_golden(data_dir, tmp_path):
    path = write_vtk(generate_structured(1, 1), tmp_path / "t.vtk", POINT, CELL, title="two triangles")
    assert path.read_bytes() == (data_dir / "two_triangles.vtk").read_bytes()


def test_vtk_round_trip(tmp_path, rng):
    mesh = generate_structured(3, 2)
    p = {"p": rng.normal(size=mesh.n_nodes), "v": rng.normal(size=(mesh.n_nodes, 2))}
    c = {"q": rng.normal(size=mesh.n_triangles)}
    back = read_vtk(write_vtk(mesh, tmp_path / "f.vtk", p, c))
    assert np.array_equal(back["points"], mesh.points)
    assert np.array_equal(back["cells"], mesh.triangles)
    assert np.array_equal(back["point_data"]["p"], p["p"])
    assert np.array_equal(back["point_data"]["v"][:, :2], p["v"])
    assert np.array_equal(back["cell_data"]["q"], c["q"])


def test_vtk_without_fields():
    text = vtk_text(generate_structured(1, 1))
    assert "POINT_DATA" not in text and text.endswith("5\n")


@pytest.mark.parametrize(
    "point,cell",
    [({"c": [1.0, 2.0]}, None), (None, {"p": [1.0, 2.0, 3.0]}), ({"bad name": [0.0] * 4}, None),
     (None, {"t": np.zeros((2, 4))})],
)
def test_vtk_rejects_bad_fields(point, cell):
    with pytest.raises(InvalidArgumentError):
        vtk_text(generate_structured(1, 1), point, cell)


def test_series_matches_golden(data_dir, tmp_path):
    rows = [{"time": 0.0, "total": -0.0, "leak": None}, {"time": 0.5, "total": 0.125, "leak": 1e-20}]
    path = write_series(rows, tmp_path / "s.csv")
    assert path.read_bytes() == (data_dir / "series.csv").read_bytes()
    header, body = read_series(path)
    assert header == ["time", "total", "leak"]
    assert body == [[0.0, 0.0, None], [0.5, 0.125, 1e-20]]


def test_series_empty_needs_columns():
    assert series_text([], ["time", "total"]) == "time,total\r\n"
    with pytest.raises(InvalidArgumentError):
        series_text([])


def test_series_missing_column():
    with pytest.raises(InvalidArgumentError):
        series_text([{"time": 1.0}], ["time", "total"])


def test_series_formats_mixed_types():
    text = series_text([{"n": np.int64(3), "ok": True, "x": np.float32(0.5)}])
    assert text.splitlines()[1] == "3,true,0.5"


@pytest.mark.parametrize("x,s", [(0.1, "0.1"), (-0.0, "0.0"), (1e-300, "1e-300"), (2.0, "2.0")])
def test_format_float_round_trips(x, s):
    assert format_float(x) == s
    assert float(s) == x


def test_json_is_canonical():
    a = dumps_json({"b": np.float64(1.5), "a": [np.int32(1), np.nan], "c": np.array([True])})
    assert a == '{\n  "a": [\n    1,\n    null\n  ],\n  "b": 1.5,\n  "c": [\n    true\n  ]\n}\n'


def test_output_root(monkeypatch, tmp_path):
    monkeypatch.delenv("PFB_OUTPUT_DIR", raising=False)
    assert str(output_root()) == "pfb-output"
    monkeypatch.setenv("PFB_OUTPUT_DIR", str(tmp_path))
    assert output_root() == tmp_path
    assert str(output_root("x")) == "x"
