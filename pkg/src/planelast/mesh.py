"""Conforming triangulations of convex polygonal domains.

Meshes are immutable after construction.  Boundary edges carry small
integer tags with the convention 1 = Dirichlet, 2 = traction-loaded,
3 = traction-free.
"""

import numpy as np

DIRICHLET_TAG = 1
TRACTION_TAG = 2
FREE_TAG = 3

MESH_MAGIC = "mesh2d"
MESH_VERSION = 1


class MeshFormatError(ValueError):
    """Raised when a mesh file violates the ``mesh2d`` format."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


class PointNotFoundError(LookupError):
    """Raised when a query point lies outside the meshed domain."""


class Mesh:
    """Conforming triangulation with tagged boundary edges.

    Attributes
    ----------
    nodes : (N, 2) float64 ndarray
        Node coordinates.
    triangles : (T, 3) int64 ndarray
        Vertex indices, counterclockwise.
    boundary_edges : (B, 2) int64 ndarray
        Endpoint indices of boundary edges, oriented as in the owning
        triangle.
    boundary_tags : (B,) int64 ndarray
        Integer tag per boundary edge.
    h : float
        Maximum element diameter (longest edge over all triangles).
    d_omega : float
        Domain diameter (largest distance between boundary nodes; equals
        the hull diameter for convex domains).
    """

    def __init__(self, nodes, triangles, boundary_edges, boundary_tags):
        self.nodes = np.ascontiguousarray(nodes, dtype=np.float64)
        self.triangles = np.ascontiguousarray(triangles, dtype=np.int64)
        self.boundary_edges = np.ascontiguousarray(
            boundary_edges, dtype=np.int64
        ).reshape(-1, 2)
        self.boundary_tags = np.ascontiguousarray(boundary_tags, dtype=np.int64)

        if self.nodes.ndim != 2 or self.nodes.shape[1] != 2:
            raise ValueError("nodes must have shape (N, 2)")
        if not np.isfinite(self.nodes).all():
            raise ValueError("node coordinates must be finite")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise ValueError("triangles must have shape (T, 3)")
        if len(self.boundary_tags) != len(self.boundary_edges):
            raise ValueError("one tag per boundary edge required")

        n = len(self.nodes)
        for name, idx in (("triangle", self.triangles), ("boundary edge", self.boundary_edges)):
            if idx.size and (idx.min() < 0 or idx.max() >= n):
                raise ValueError("%s index out of range" % name)
        t = self.triangles
        if ((t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])).any():
            raise ValueError("triangle with repeated vertex")

        self._signed_areas = _signed_areas(self.nodes, self.triangles)
        bad = np.flatnonzero(self._signed_areas <= 0.0)
        if bad.size:
            raise ValueError(
                "triangle %d has non-positive signed area (clockwise or degenerate)"
                % bad[0]
            )

        self.h = float(_longest_edges(self.nodes, self.triangles).max())
        self.d_omega = _boundary_diameter(self.nodes, self.boundary_edges)

        for a in (self.nodes, self.triangles, self.boundary_edges,
                  self.boundary_tags, self._signed_areas):
            a.flags.writeable = False

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def areas(self):
        """Signed triangle areas (all positive by construction)."""
        return self._signed_areas

    def triangle_coords(self):
        """Vertex coordinates per triangle, shape (T, 3, 2)."""
        return self.nodes[self.triangles]

    def __repr__(self):
        return "Mesh(%d nodes, %d triangles, %d boundary edges, h=%g)" % (
            self.n_nodes, self.n_triangles, len(self.boundary_edges), self.h)


def _signed_areas(nodes, triangles):
    p = nodes[triangles]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


def _longest_edges(nodes, triangles):
    p = nodes[triangles]
    e = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 1], p[:, 0] - p[:, 2]], axis=1)
    return np.sqrt((e ** 2).sum(axis=2)).max(axis=1)


def _boundary_diameter(nodes, boundary_edges):
    if len(boundary_edges) == 0:
        return 0.0
    ids = np.unique(boundary_edges)
    p = nodes[ids]
    # Pairwise distances over boundary nodes; fine at desk scales.
    d2 = ((p[:, None, :] - p[None, :, :]) ** 2).sum(axis=2)
    return float(np.sqrt(d2.max()))


def _grid_mesh(nodes, n, tag_of_side):
    """Triangulate an (n+1) x (n+1) logical grid; the grid is indexed
    ``id = j * (n + 1) + i`` and the cell diagonal direction alternates
    row by row (herringbone), which avoids the directional bias a single
    diagonal imprints on bending-dominated solutions.  ``tag_of_side``
    maps side names to tags."""

    def nid(i, j):
        return j * (n + 1) + i

    tris = []
    for j in range(n):
        for i in range(n):
            v00, v10 = nid(i, j), nid(i + 1, j)
            v01, v11 = nid(i, j + 1), nid(i + 1, j + 1)
            if j % 2:
                tris.append((v00, v10, v01))
                tris.append((v10, v11, v01))
            else:
                tris.append((v00, v10, v11))
                tris.append((v00, v11, v01))

    edges, tags = [], []
    for i in range(n):  # bottom, left to right
        edges.append((nid(i, 0), nid(i + 1, 0)))
        tags.append(tag_of_side["bottom"])
    for j in range(n):  # right, upward
        edges.append((nid(n, j), nid(n, j + 1)))
        tags.append(tag_of_side["right"])
    for i in range(n):  # top, right to left
        edges.append((nid(i + 1, n), nid(i, n)))
        tags.append(tag_of_side["top"])
    for j in range(n):  # left, downward
        edges.append((nid(0, j + 1), nid(0, j)))
        tags.append(tag_of_side["left"])

    return Mesh(nodes, np.array(tris), np.array(edges), np.array(tags))


def generate_square_mesh(side, n):
    """Structured mesh of (0, side)^2 with 2 n^2 right triangles.

    All four sides are tagged Dirichlet (tag 1).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not side > 0:
        raise ValueError("side must be positive")
    ticks = np.arange(n + 1) * (side / n)
    xi, yj = np.meshgrid(ticks, ticks, indexing="xy")
    nodes = np.column_stack([xi.ravel(), yj.ravel()])
    tag = {s: DIRICHLET_TAG for s in ("bottom", "right", "top", "left")}
    return _grid_mesh(nodes, n, tag)


COOK_VERTICES = np.array([[0.0, 0.0], [48.0, 44.0], [48.0, 60.0], [0.0, 44.0]])


def generate_cook_mesh(n):
    """Structured mesh of the Cook trapezoid (0,0)-(48,44)-(48,60)-(0,44).

    An n x n grid on the unit square is mapped bilinearly onto the
    quadrilateral and each cell is split into two triangles.  The clamped
    left edge is tag 1, the loaded right edge tag 2, top and bottom tag 3.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    t = np.arange(n + 1) / n
    xi, eta = np.meshgrid(t, t, indexing="xy")
    x1 = 48.0 * xi
    x2 = 44.0 * xi + 44.0 * eta - 28.0 * xi * eta
    nodes = np.column_stack([x1.ravel(), x2.ravel()])
    tag = {"left": DIRICHLET_TAG, "right": TRACTION_TAG,
           "bottom": FREE_TAG, "top": FREE_TAG}
    return _grid_mesh(nodes, n, tag)


def uniform_refine(mesh):
    """Red refinement: split every triangle into 4 via edge midpoints.

    Halves ``h`` exactly, preserves conformity and boundary tags.
    """
    tris = mesh.triangles
    n_nodes = mesh.n_nodes

    # Unique undirected edges in deterministic (lexicographic) order.
    raw = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    raw_sorted = np.sort(raw, axis=1)
    edges, inverse = np.unique(raw_sorted, axis=0, return_inverse=True)
    mid_id = n_nodes + np.arange(len(edges))
    midpoints = 0.5 * (mesh.nodes[edges[:, 0]] + mesh.nodes[edges[:, 1]])

    nt = len(tris)
    m01 = mid_id[inverse[:nt]]
    m12 = mid_id[inverse[nt:2 * nt]]
    m20 = mid_id[inverse[2 * nt:]]

    new_tris = np.concatenate([
        np.column_stack([tris[:, 0], m01, m20]),
        np.column_stack([tris[:, 1], m12, m01]),
        np.column_stack([tris[:, 2], m20, m12]),
        np.column_stack([m01, m12, m20]),
    ])
    # Interleave so the four children of triangle t are rows 4t..4t+3.
    order = np.arange(4 * nt).reshape(4, nt).T.ravel()
    new_tris = new_tris[order]

    # Boundary edges: locate each edge's midpoint id, split in two.
    bnd = mesh.boundary_edges
    bnd_sorted = np.sort(bnd, axis=1)
    pos = _find_edge_rows(edges, bnd_sorted)
    mids = mid_id[pos]
    new_edges = np.concatenate([
        np.column_stack([bnd[:, 0], mids]),
        np.column_stack([mids, bnd[:, 1]]),
    ])
    order_e = np.arange(2 * len(bnd)).reshape(2, len(bnd)).T.ravel()
    new_edges = new_edges[order_e]
    new_tags = np.repeat(mesh.boundary_tags, 2)

    nodes = np.concatenate([mesh.nodes, midpoints])
    return Mesh(nodes, new_tris, new_edges, new_tags)


def _find_edge_rows(sorted_edges, queries):
    """Row indices of ``queries`` within the lexicographically sorted
    (E, 2) array ``sorted_edges``; every query must be present."""
    keys = sorted_edges[:, 0] * (sorted_edges.max() + 1) + sorted_edges[:, 1]
    q = queries[:, 0] * (sorted_edges.max() + 1) + queries[:, 1]
    order = np.argsort(keys, kind="stable")
    pos = np.searchsorted(keys[order], q)
    rows = order[pos]
    if not (keys[rows] == q).all():
        raise ValueError("boundary edge not found in triangulation")
    return rows


def barycentric_coordinates(coords, p):
    """Barycentric coordinates of point(s) ``p`` w.r.t. triangles ``coords``
    of shape (T, 3, 2).  Returns (T, 3)."""
    a, b, c = coords[:, 0], coords[:, 1], coords[:, 2]
    det = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) \
        - (c[:, 0] - a[:, 0]) * (b[:, 1] - a[:, 1])
    l1 = ((b[:, 0] - p[0]) * (c[:, 1] - p[1])
          - (c[:, 0] - p[0]) * (b[:, 1] - p[1])) / det
    l2 = ((c[:, 0] - p[0]) * (a[:, 1] - p[1])
          - (a[:, 0] - p[0]) * (c[:, 1] - p[1])) / det
    l3 = 1.0 - l1 - l2
    return np.column_stack([l1, l2, l3])


def locate_point(mesh, p):
    """Find a triangle containing ``p``.

    Returns ``(triangle_index, barycentric_coordinates)``.  Ties on shared
    edges resolve to the lowest triangle index.  Points farther outside
    than ``1e-10 * d_omega`` raise :class:`PointNotFoundError`.
    """
    p = np.asarray(p, dtype=np.float64)
    coords = mesh.triangle_coords()
    lam = barycentric_coordinates(coords, p)
    # Physical tolerance: a barycentric deficit of eps corresponds to a
    # distance eps * 2A / edge, so scale by the longest edge per triangle.
    delta = 1e-10 * mesh.d_omega
    tol = delta * _longest_edges(mesh.nodes, mesh.triangles) / (2.0 * mesh.areas)
    inside = lam.min(axis=1) >= -tol
    if not inside.any():
        raise PointNotFoundError("point %s lies outside the domain" % (tuple(p),))
    k = int(np.argmax(inside))
    return k, lam[k]


def total_area(mesh):
    return float(mesh.areas.sum())


def validate_mesh(mesh):
    """Check conformity and boundary bookkeeping by edge-hash counting.

    Every interior edge must be shared by exactly two triangles, and the
    remaining (boundary) edges must appear exactly once each in
    ``mesh.boundary_edges``.  Raises ``ValueError`` on violation.
    """
    tris = mesh.triangles
    raw = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    raw_sorted = np.sort(raw, axis=1)
    edges, counts = np.unique(raw_sorted, axis=0, return_counts=True)
    if counts.max() > 2:
        raise ValueError("edge shared by more than two triangles")
    boundary = edges[counts == 1]

    listed = np.sort(mesh.boundary_edges, axis=1)
    listed_unique, listed_counts = np.unique(listed, axis=0, return_counts=True)
    if (listed_counts > 1).any():
        raise ValueError("duplicate boundary edge entry")
    if len(listed_unique) != len(boundary) or not (listed_unique == boundary).all():
        raise ValueError("boundary_edges do not match the triangulation boundary")


def write_mesh(mesh, destination):
    """Write a mesh in the ASCII ``mesh2d 1`` format."""
    lines = ["%s %d" % (MESH_MAGIC, MESH_VERSION)]
    lines.append("%d %d %d" % (mesh.n_nodes, mesh.n_triangles,
                               len(mesh.boundary_edges)))
    for x, y in mesh.nodes:
        lines.append("%.17g %.17g" % (x, y))
    for i, j, k in mesh.triangles:
        lines.append("%d %d %d" % (i, j, k))
    for (i, j), tag in zip(mesh.boundary_edges, mesh.boundary_tags):
        lines.append("%d %d %d" % (i, j, tag))
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", newline="\n") as f:
            f.write(text)


def read_mesh(source):
    """Read a mesh written by :func:`write_mesh`.

    Raises :class:`MeshFormatError` with the offending line number on
    malformed input."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source) as f:
            text = f.read()
    lines = text.splitlines()

    def parse(lineno, n_fields, conv, what):
        if lineno > len(lines):
            raise MeshFormatError("unexpected end of file (%s)" % what, lineno)
        parts = lines[lineno - 1].split()
        if len(parts) != n_fields:
            raise MeshFormatError(
                "expected %d fields for %s, got %d" % (n_fields, what, len(parts)),
                lineno)
        try:
            return [conv(p) for p in parts]
        except ValueError:
            raise MeshFormatError("cannot parse %s" % what, lineno) from None

    magic = lines[0].split() if lines else []
    if magic != [MESH_MAGIC, str(MESH_VERSION)]:
        raise MeshFormatError("bad header, expected '%s %d'"
                              % (MESH_MAGIC, MESH_VERSION), 1)
    n_nodes, n_tris, n_edges = parse(2, 3, int, "counts")
    if n_nodes < 0 or n_tris < 0 or n_edges < 0:
        raise MeshFormatError("negative count", 2)

    need = 2 + n_nodes + n_tris + n_edges
    if len(lines) < need:
        raise MeshFormatError("file truncated: expected %d lines" % need,
                              len(lines) + 1)

    nodes = np.empty((n_nodes, 2))
    for r in range(n_nodes):
        nodes[r] = parse(3 + r, 2, float, "node coordinates")

    tris = np.empty((n_tris, 3), dtype=np.int64)
    for r in range(n_tris):
        lineno = 3 + n_nodes + r
        tris[r] = parse(lineno, 3, int, "triangle")
        if tris[r].min() < 0 or tris[r].max() >= n_nodes:
            raise MeshFormatError("triangle %d: node index out of range" % r,
                                  lineno)

    edges = np.empty((n_edges, 2), dtype=np.int64)
    tags = np.empty(n_edges, dtype=np.int64)
    for r in range(n_edges):
        lineno = 3 + n_nodes + n_tris + r
        i, j, tag = parse(lineno, 3, int, "boundary edge")
        if min(i, j) < 0 or max(i, j) >= n_nodes:
            raise MeshFormatError("boundary edge %d: node index out of range" % r,
                                  lineno)
        edges[r] = (i, j)
        tags[r] = tag

    if n_tris:
        areas = _signed_areas(nodes, tris)
        bad = np.flatnonzero(areas <= 0.0)
        if bad.size:
            raise MeshFormatError(
                "triangle %d has non-positive signed area" % bad[0],
                3 + n_nodes + int(bad[0]))
    return Mesh(nodes, tris, edges, tags)
