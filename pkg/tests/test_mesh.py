import io
import math

import numpy as np
import pytest

from planelast import (DIRICHLET_TAG, FREE_TAG, TRACTION_TAG, Mesh,
                       MeshFormatError, PointNotFoundError,
                       generate_cook_mesh, generate_square_mesh, locate_point,
                       read_mesh, uniform_refine, validate_mesh, write_mesh)
from planelast.mesh import total_area


def test_unit_square_n1():
    m = generate_square_mesh(1.0, 1)
    assert m.n_nodes == 4
    assert m.n_triangles == 2
    assert len(m.boundary_edges) == 4
    assert m.h == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert (m.boundary_tags == DIRICHLET_TAG).all()


def test_square_diagonal_d_omega():
    m = generate_square_mesh(math.pi, 1)
    assert m.d_omega == pytest.approx(math.pi * math.sqrt(2.0), rel=1e-14)


def test_square_n2_counts():
    # hand count of the 2x2 structured grid
    m = generate_square_mesh(1.0, 2)
    assert m.n_nodes == 9
    assert m.n_triangles == 8
    assert len(m.boundary_edges) == 8
    validate_mesh(m)


def test_square_rejects_bad_arguments():
    with pytest.raises(ValueError):
        generate_square_mesh(1.0, 0)
    with pytest.raises(ValueError):
        generate_square_mesh(0.0, 2)


def test_cook_n1_is_published_quadrilateral():
    m = generate_cook_mesh(1)
    assert m.n_nodes == 4
    assert m.n_triangles == 2
    published = {(0.0, 0.0), (48.0, 44.0), (48.0, 60.0), (0.0, 44.0)}
    assert {tuple(p) for p in m.nodes} == published


@pytest.mark.parametrize("n", [1, 2, 5])
def test_cook_d_omega(n):
    m = generate_cook_mesh(n)
    assert m.d_omega == pytest.approx(math.sqrt(5904.0), rel=1e-12)


def test_cook_right_edge_midpoint_node():
    m = generate_cook_mesh(2)
    assert any(abs(x - 48.0) < 1e-14 and abs(y - 52.0) < 1e-14
               for x, y in m.nodes)


def test_cook_tags():
    m = generate_cook_mesh(3)
    for (i, j), tag in zip(m.boundary_edges, m.boundary_tags):
        xs = m.nodes[[i, j], 0]
        if tag == DIRICHLET_TAG:
            assert (xs == 0.0).all()
        elif tag == TRACTION_TAG:
            assert (xs == 48.0).all()
        else:
            assert tag == FREE_TAG
    validate_mesh(m)


def test_refine_two_triangle_square():
    m = generate_square_mesh(1.0, 1)
    r = uniform_refine(m)
    assert r.n_triangles == 8
    assert r.n_nodes == 9
    assert len(r.boundary_edges) == 8
    validate_mesh(r)


@pytest.mark.parametrize("make", [
    lambda: generate_square_mesh(math.pi, 3),
    lambda: generate_cook_mesh(3),
])
def test_refine_invariants(make):
    m = make()
    r = uniform_refine(m)
    assert r.n_triangles == 4 * m.n_triangles
    assert len(r.boundary_edges) == 2 * len(m.boundary_edges)
    assert abs(r.h - 0.5 * m.h) <= 1e-14 * m.h
    assert total_area(r) == pytest.approx(total_area(m), rel=1e-12)
    assert r.d_omega == pytest.approx(m.d_omega, rel=1e-12)
    validate_mesh(r)
    # tags are inherited pairwise
    assert (r.boundary_tags == np.repeat(m.boundary_tags, 2)).all()


def test_locate_point_at_node():
    m = generate_square_mesh(1.0, 2)
    k, lam = locate_point(m, m.nodes[4])
    assert lam.max() == pytest.approx(1.0, abs=1e-12)
    assert lam.sum() == pytest.approx(1.0, abs=1e-12)
    assert m.nodes[m.triangles[k][np.argmax(lam)]] == pytest.approx(m.nodes[4])


def test_locate_point_at_centroid():
    m = generate_square_mesh(1.0, 2)
    k_target = 5
    centroid = m.triangle_coords()[k_target].mean(axis=0)
    k, lam = locate_point(m, centroid)
    assert k == k_target
    assert lam == pytest.approx([1 / 3, 1 / 3, 1 / 3], abs=1e-12)


def test_locate_point_outside():
    m = generate_square_mesh(1.0, 2)
    with pytest.raises(PointNotFoundError):
        locate_point(m, (2.0, 2.0))


def test_locate_point_edge_tie_lowest_index():
    m = generate_square_mesh(1.0, 1)
    # midpoint of the shared diagonal belongs to both triangles
    k, _ = locate_point(m, (0.5, 0.5))
    assert k == 0


def test_mesh_arrays_immutable():
    m = generate_square_mesh(1.0, 2)
    with pytest.raises(ValueError):
        m.nodes[0, 0] = 7.0


def test_mesh_rejects_clockwise_triangle():
    nodes = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
    with pytest.raises(ValueError, match="triangle 0"):
        Mesh(nodes, [(0, 2, 1)], [(0, 1), (1, 2), (2, 0)], [1, 1, 1])


@pytest.mark.parametrize("make", [
    lambda: generate_square_mesh(1.0, 3),
    lambda: generate_cook_mesh(2),
    lambda: uniform_refine(generate_cook_mesh(2)),
])
def test_io_round_trip(make, tmp_path):
    m = make()
    path = tmp_path / "mesh.txt"
    write_mesh(m, path)
    r = read_mesh(path)
    assert (r.nodes == m.nodes).all()
    assert (r.triangles == m.triangles).all()
    assert (r.boundary_edges == m.boundary_edges).all()
    assert (r.boundary_tags == m.boundary_tags).all()
    assert r.h == m.h
    assert r.d_omega == m.d_omega


def test_io_stream_round_trip():
    m = generate_square_mesh(1.0, 2)
    buf = io.StringIO()
    write_mesh(m, buf)
    r = read_mesh(io.StringIO(buf.getvalue()))
    assert (r.nodes == m.nodes).all()


def test_read_rejects_bad_header():
    with pytest.raises(MeshFormatError, match="line 1"):
        read_mesh(io.StringIO("mesh3d 1\n"))


def test_read_rejects_out_of_range_index():
    text = "mesh2d 1\n3 1 0\n0 0\n1 0\n0 1\n0 1 9\n"
    with pytest.raises(MeshFormatError) as err:
        read_mesh(io.StringIO(text))
    assert err.value.line == 6


def test_read_rejects_clockwise_triangle():
    text = "mesh2d 1\n3 1 3\n0 0\n1 0\n0 1\n0 2 1\n0 1 1\n1 2 1\n2 0 1\n"
    with pytest.raises(MeshFormatError, match="triangle 0"):
        read_mesh(io.StringIO(text))


def test_read_rejects_truncated_file():
    with pytest.raises(MeshFormatError):
        read_mesh(io.StringIO("mesh2d 1\n4 2 4\n0 0\n1 0\n"))


def test_repeated_refinement_stays_conforming():
    m = generate_cook_mesh(1)
    for _ in range(3):
        m = uniform_refine(m)
        validate_mesh(m)
