import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pfb.benchmarks import build_mesh, leaky_well
from pfb.errors import GeometryError, IncompleteBoundaryError, InvalidArgumentError, MeshParseError
from pfb.mesh import (
    Mesh,
    box_sides,
    generate_disk_inclusion,
    generate_structured,
    graded_lines,
    load_mesh,
    mark_boundaries,
    mark_regions,
    parse_mesh,
    relabel_nodes,
    save_mesh,
)


@pytest.mark.parametrize(
    "nx,ny,counts",
    [(2, 2, (9, 8, 16)), (1, 1, (4, 2, 5)), (20, 20, (441, 800, 1240))],
)
def test_structured_counts(nx, ny, counts):
    m = generate_structured(nx, ny)
    assert (m.n_nodes, m.n_triangles, m.n_edges) == counts


@pytest.mark.parametrize("nx,ny", [(0, 2), (2, -1), (1.5, 2)])
def test_structured_rejects_bad_counts(nx, ny):
    with pytest.raises(InvalidArgumentError):
        generate_structured(nx, ny)


def test_structured_rejects_degenerate_box():
    with pytest.raises(InvalidArgumentError):
        generate_structured(2, 2, (0.0, 0.0, 0.0, 1.0))


def test_diagonal_runs_lower_left_to_upper_right():
    m = generate_structured(1, 1)
    diag = [tuple(e) for e in m.edges.tolist() if set(e) == {0, 3}]
    assert diag == [(0, 3)]
    assert (m.points[0] == [0, 0]).all() and (m.points[3] == [1, 1]).all()


def test_edge_normal_convention():
    m = generate_structured(1, 1)
    for (lo, hi), n in zip(m.edges, m.edge_normals):
        d = m.points[hi] - m.points[lo]
        assert np.allclose(n, np.array([d[1], -d[0]]) / np.hypot(*d))


def test_outward_normals_point_out():
    m = generate_structured(3, 2)
    mid = m.edge_midpoints[m.boundary_edges]
    probe = mid + 1e-6 * m.outward_normals
    assert np.all(m.locate(probe) == -1)
    probe_in = mid - 1e-6 * m.outward_normals
    assert np.all(m.locate(probe_in) >= 0)


def test_layer_regions_by_centroid():
    m = build_mesh({"kind": "layers", "nx": 20, "ny": 20, "n_layers": 5})
    c = m.centroids
    assert np.all(m.regions[np.isclose(c[:, 1], 0.5, atol=0.02)] == 3)
    assert np.all(m.regions[c[:, 1] < 0.05] == 1)
    assert m.region_names == [1, 2, 3, 4, 5]


def test_mark_regions_centroid_classifier():
    m = mark_regions(generate_structured(4, 4), lambda x, y: 1 if x < 0.5 else 2)
    assert np.all((m.centroids[:, 0] < 0.5) == (m.regions == 1))


def test_inclusion_mesh_and_regions():
    m = generate_disk_inclusion(target_nodes=489)
    assert abs(m.n_nodes - 489) <= 5
    assert abs(m.n_triangles - 912) <= 10
    d = np.hypot(*(m.centroids - 0.5).T)
    assert np.all(m.regions[d < 0.18] == 2)
    assert np.all(m.regions[d > 0.22] == 1)
    assert m.tag_names == ["bottom", "left", "right", "top"]
    assert m.euler_characteristic() == 2


def test_mark_boundaries_sides():
    m = generate_structured(2, 2, tag_sides=False)
    m = mark_boundaries(m, box_sides(0, 1, 0, 1))
    mid = m.edge_midpoints
    for e in m.boundary_edges:
        if mid[e, 0] == 0:
            assert m.boundary_tags[e] == "left"
        if mid[e, 1] == 1:
            assert m.boundary_tags[e] == "top"
    interior = np.setdiff1d(np.arange(m.n_edges), m.boundary_edges)
    assert all(m.boundary_tags[e] is None for e in interior)


def test_mark_boundaries_incomplete():
    m = generate_structured(2, 2, tag_sides=False)
    with pytest.raises(IncompleteBoundaryError):
        mark_boundaries(m, lambda x, y: "left" if x == 0 else None)


@pytest.mark.parametrize("tag", ["two words", "-", ""])
def test_mark_boundaries_rejects_bad_tags(tag):
    with pytest.raises(InvalidArgumentError):
        mark_boundaries(generate_structured(1, 1), lambda x, y: tag)


def test_save_load_round_trip(tmp_path):
    m = mark_regions(generate_structured(2, 2), lambda x, y: 1 + (y > 0.5))
    save_mesh(m, tmp_path / "m.txt")
    back = load_mesh(tmp_path / "m.txt")
    assert back == m
    save_mesh(back, tmp_path / "m2.txt")
    assert (tmp_path / "m.txt").read_bytes() == (tmp_path / "m2.txt").read_bytes()


def test_golden_mesh_file(data_dir):
    m = load_mesh(data_dir / "unit2.mesh")
    assert m == generate_structured(2, 2)


def test_parse_duplicate_node_id():
    text = "pfb-mesh 1\nnodes 3\n0 0 0\n0 1 0\n2 0 1\ntriangles 1\n0 0 1 2 0\nedges 3\n"
    with pytest.raises(MeshParseError, match="line 4"):
        parse_mesh(text)


def test_parse_empty_file():
    with pytest.raises(MeshParseError, match="empty"):
        parse_mesh("")


def test_parse_bad_header_reports_line():
    with pytest.raises(MeshParseError) as exc:
        parse_mesh("# comment\nmesh 2\n")
    assert exc.value.line == 2


def test_parse_wrong_edge_count():
    text = (
        "pfb-mesh 1\nnodes 3\n0 0 0\n1 1 0\n2 0 1\ntriangles 1\n0 0 1 2 0\n"
        "edges 2\n0 0 1 a\n1 0 2 b\n"
    )
    with pytest.raises(MeshParseError, match="edge count"):
        parse_mesh(text)


def test_degenerate_triangle_rejected():
    with pytest.raises(GeometryError):
        Mesh.from_triangles([[0, 0], [1, 0], [2, 0]], [[0, 1, 2]])


def test_clockwise_input_is_flipped():
    m = Mesh.from_triangles([[0, 0], [1, 0], [0, 1]], [[0, 2, 1]])
    assert m.signed_areas[0] > 0


def test_locate_outside_and_inside():
    m = generate_structured(2, 2)
    t = m.locate([[0.1, 0.05], [2.0, 2.0]])
    assert t[1] == -1
    lam = m.barycentric(t[0], [0.1, 0.05])
    assert np.all(lam >= -1e-12) and lam.sum() == pytest.approx(1.0)


def test_graded_lines_contain_breaks():
    xs = graded_lines(0, 10, breaks=[3.0, 3.3], refine=[3.15], h_min=0.05, h_max=1.0, growth=1.3)
    assert 3.0 in xs and 3.3 in xs and xs[0] == 0 and xs[-1] == 10
    assert np.all(np.diff(xs) > 0)
    assert np.diff(xs).max() <= 1.0 + 1e-9


def test_leaky_well_mesh_tags_and_regions():
    spec = leaky_well(h_min_x=0.05, h_min_y=0.5, h_max=20.0, growth=1.5)
    m = build_mesh(spec.mesh)
    assert m.tag_names == ["bottom", "injection", "left", "right", "top"]
    inj = m.edges_with_tag("injection")
    assert m.edge_lengths[inj].sum() == pytest.approx(0.3)
    well = m.regions == 3
    assert m.areas[well].sum() == pytest.approx(0.3 * 100.0)
    assert m.areas.sum() == pytest.approx(200.0 * 160.0)


def _check_invariants(m, area):
    assert m.signed_areas.sum() == pytest.approx(area, rel=1e-12)
    assert np.all(m.signed_areas > 0)
    assert m.euler_characteristic() == 2
    interior = m.edge_tris[:, 1] >= 0
    # the two neighbours see an interior edge with opposite induced orientation
    for e in np.flatnonzero(interior):
        s = []
        for t in m.edge_tris[e]:
            i = int(np.flatnonzero(m.tri_edges[t] == e)[0])
            s.append(m.edge_sign[t, i])
        assert s[0] == -s[1]
    assert np.all(np.bincount(m.tri_edges.ravel(), minlength=m.n_edges) == np.where(interior, 2, 1))


@given(
    st.integers(1, 7),
    st.integers(1, 7),
    st.floats(-5, 5),
    st.floats(0.1, 10),
    st.floats(-5, 5),
    st.floats(0.1, 10),
)
def test_structured_invariants(nx, ny, x0, w, y0, h):
    m = generate_structured(nx, ny, (x0, x0 + w, y0, y0 + h))
    _check_invariants(m, w * h)


@given(st.integers(2, 5), st.integers(2, 5), st.randoms(use_true_random=False))
def test_relabel_preserves_geometry(nx, ny, rnd):
    m = generate_structured(nx, ny)
    perm = list(range(m.n_nodes))
    rnd.shuffle(perm)
    r = relabel_nodes(m, perm)
    _check_invariants(r, 1.0)
    assert np.allclose(np.sort(r.areas), np.sort(m.areas))
    assert sorted(r.tag_names) == sorted(m.tag_names)
    assert np.allclose(r.points[perm], m.points)


def test_disk_mesh_invariants():
    m = generate_disk_inclusion(n_side=8)
    _check_invariants(m, 1.0)
