"""Planar domains: equipotential curves, circles, meshes, areas, normals.

Domains are described either implicitly through an :class:`EquipotentialSpec`
(the two-parameter family ``sum_i ||x - P_i||^(-2*alpha) = c``) or explicitly
as circles.  Boundaries are discretized into closed curves with an even
number of nodes; consecutive node triples form quadratic elements.  Curves
built from a spec or a circle keep a reference to their exact generator
("chart"), so downstream quadrature can evaluate boundary points exactly
instead of through the quadratic interpolation.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (DegenerateGradient, MultipleRoots, NoRoot, TooFewPoints)

_SCAN_POINTS = 200
_BISECT_ITERS = 80


# ---------------------------------------------------------------------------
# implicit equipotential family
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class EquipotentialSpec:
    """Implicit curve family ``sum_i ||x - P_i||^(-2*alpha) = level``.

    Parameters
    ----------
    centers : array_like, shape (m, 2)
        Potential centers P_i.
    alpha : float
        Positive exponent; larger values sharpen the potential wells.
    level : float
        Positive level-set value; larger values tighten the curve around
        the centers.
    """

    centers: np.ndarray
    alpha: float
    level: float

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        if centers.ndim != 2 or centers.shape[1] != 2 or centers.shape[0] < 1:
            raise ValueError("centers must be an (m, 2) array with m >= 1")
        if not (self.alpha > 0):
            raise ValueError("alpha must be positive")
        if not (self.level > 0):
            raise ValueError("level must be positive")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "level", float(self.level))

    @property
    def m(self):
        return self.centers.shape[0]

    @property
    def anchor(self):
        """Ray origin for the polar parametrization: the centers' centroid.

        For the symmetric center sets used throughout this is exactly the
        origin; anchoring at the centroid keeps the family translation
        equivariant.
        """
        return self.centers.mean(axis=0)

    def potential(self, points):
        """Evaluate ``sum_i ||x - P_i||^(-2*alpha)`` at (..., 2) points."""
        points = np.asarray(points, dtype=float)
        d = points[..., None, :] - self.centers
        q = np.einsum("...i,...i->...", d, d)
        return np.sum(q ** (-self.alpha), axis=-1)

    def scan_radius_max(self):
        rc = float(np.max(np.linalg.norm(self.centers - self.anchor, axis=1)))
        return 2.0 * (rc + self.level ** (-1.0 / (2.0 * self.alpha)) + 1.0)


def _radial_g(spec, r, phi):
    """Radial level-set function along rays from the spec's anchor point."""
    ax, ay = spec.anchor
    x = ax + r * np.cos(phi)
    y = ay + r * np.sin(phi)
    dx = x[..., None] - spec.centers[:, 0]
    dy = y[..., None] - spec.centers[:, 1]
    q = dx * dx + dy * dy
    return np.sum(q ** (-spec.alpha), axis=-1) - spec.level


def radii_at_angles(spec, phis):
    """Solve the radial equation for every angle in ``phis`` (vectorized).

    Scans a geometric grid for sign changes, rejects angles with zero or
    multiple crossings, then bisects each bracket.
    """
    phis = np.asarray(phis, dtype=float)
    flat = phis.ravel()
    grid = np.geomspace(1e-6, spec.scan_radius_max(), _SCAN_POINTS)
    vals = _radial_g(spec, grid[:, None], flat[None, :])
    signs = np.sign(vals)
    crossings = (signs[:-1] * signs[1:]) < 0
    ncross = crossings.sum(axis=0)
    if np.any(ncross == 0):
        bad = flat[np.argmax(ncross == 0)]
        raise NoRoot(f"radial equation has no root at angle {bad:.6f}; "
                     "curve does not enclose the origin")
    if np.any(ncross > 1):
        bad = flat[np.argmax(ncross > 1)]
        raise MultipleRoots(f"{int(ncross.max())} radial crossings at angle "
                            f"{bad:.6f}; curve is not star-shaped")
    first = np.argmax(crossings, axis=0)
    lo = grid[first]
    hi = grid[first + 1]
    glo = _radial_g(spec, lo, flat)
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        gm = _radial_g(spec, mid, flat)
        same = np.sign(gm) == np.sign(glo)
        lo = np.where(same, mid, lo)
        glo = np.where(same, gm, glo)
        hi = np.where(same, hi, mid)
    return (0.5 * (lo + hi)).reshape(phis.shape)


def solve_radius(spec, phi):
    """Radius of the equipotential curve along the ray at angle ``phi``."""
    return float(radii_at_angles(spec, np.array([float(phi)]))[0])


def outward_normal(spec, x):
    """Unit exterior normal of the implicit curve at boundary point(s) ``x``.

    The gradient of the potential points toward the enclosed region, so the
    exterior normal is the negated, normalized gradient.
    """
    x = np.asarray(x, dtype=float)
    d = x[..., None, :] - spec.centers
    q = np.einsum("...i,...i->...", d, d)
    grad = np.sum(-2.0 * spec.alpha * (q ** (-spec.alpha - 1.0))[..., None] * d,
                  axis=-2)
    nu = -grad
    norm = np.linalg.norm(nu, axis=-1, keepdims=True)
    if np.any(norm < 1e-14):
        raise DegenerateGradient("implicit gradient vanishes at a boundary point")
    return nu / norm


# ---------------------------------------------------------------------------
# charts: exact boundary parametrizations by polar angle
# ---------------------------------------------------------------------------
class CircleChart:
    """Exact parametrization of a circle by angle."""

    def __init__(self, center, radius):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)

    def evaluate(self, thetas):
        thetas = np.asarray(thetas, dtype=float)
        c, s = np.cos(thetas), np.sin(thetas)
        pts = self.center + self.radius * np.stack([c, s], axis=-1)
        dpts = self.radius * np.stack([-s, c], axis=-1)
        return pts, dpts

    def normals(self, thetas):
        thetas = np.asarray(thetas, dtype=float)
        return np.stack([np.cos(thetas), np.sin(thetas)], axis=-1)


class EquipotentialChart:
    """Exact parametrization of a star-shaped equipotential by polar angle."""

    def __init__(self, spec):
        self.spec = spec

    def evaluate(self, thetas):
        thetas = np.asarray(thetas, dtype=float)
        spec = self.spec
        r = radii_at_angles(spec, thetas)
        cosp, sinp = np.cos(thetas), np.sin(thetas)
        ax, ay = spec.anchor
        x = ax + r * cosp
        y = ay + r * sinp
        dx = x[..., None] - spec.centers[:, 0]
        dy = y[..., None] - spec.centers[:, 1]
        q = dx * dx + dy * dy
        w = q ** (-spec.alpha - 1.0)
        # implicit differentiation of g(r(phi), phi) = 0
        g_r = np.sum(-2.0 * spec.alpha * w * (dx * cosp[..., None]
                                              + dy * sinp[..., None]), axis=-1)
        g_phi = np.sum(-2.0 * spec.alpha * w * (dx * (-y[..., None])
                                                + dy * x[..., None]), axis=-1)
        rp = -g_phi / g_r
        pts = np.stack([x, y], axis=-1)
        dpts = np.stack([rp * cosp - r * sinp, rp * sinp + r * cosp], axis=-1)
        return pts, dpts

    def normals(self, thetas):
        pts, _ = self.evaluate(thetas)
        return outward_normal(self.spec, pts)


# ---------------------------------------------------------------------------
# discretized curves and meshes
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class ClosedCurve:
    """Closed boundary curve with an even number of nodes.

    Element ``j`` interpolates nodes ``(2j, 2j+1, 2j+2 mod n)`` quadratically;
    collocation points are the nodes themselves.  ``thetas`` are the parameter
    angles of the nodes; when ``chart`` is present it maps angles to exact
    boundary points, otherwise the quadratic interpolation defines the
    geometry.  Curves are stored counterclockwise (reoriented on construction
    when needed).
    """

    nodes: np.ndarray
    normals: np.ndarray
    thetas: np.ndarray
    chart: Optional[object] = field(default=None, repr=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        normals = np.asarray(self.normals, dtype=float)
        thetas = np.asarray(self.thetas, dtype=float)
        n = len(nodes)
        if n % 2 != 0 or n < 8:
            raise ValueError("node count must be even and at least 8")
        if nodes.shape != (n, 2) or normals.shape != (n, 2) or thetas.shape != (n,):
            raise ValueError("inconsistent nodes/normals/thetas shapes")
        norms = np.linalg.norm(normals, axis=1)
        if not np.allclose(norms, 1.0, atol=1e-12):
            raise ValueError("normals must be unit vectors")
        if signed_polygon_area(nodes) < 0:
            nodes = np.concatenate([nodes[:1], nodes[:0:-1]])
            normals = np.concatenate([normals[:1], normals[:0:-1]])
            thetas = np.concatenate([thetas[:1], thetas[:0:-1]])
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "thetas", thetas)

    @property
    def n(self):
        return len(self.nodes)

    @property
    def n_elements(self):
        return self.n // 2

    @property
    def elements(self):
        """(n/2, 3) node indices per quadratic element."""
        e = np.arange(self.n_elements)
        return np.stack([2 * e, 2 * e + 1, (2 * e + 2) % self.n], axis=1)

    def element_chord_lengths(self):
        idx = self.elements
        return (np.linalg.norm(self.nodes[idx[:, 1]] - self.nodes[idx[:, 0]], axis=1)
                + np.linalg.norm(self.nodes[idx[:, 2]] - self.nodes[idx[:, 1]], axis=1))

    def dense_points(self, p):
        """p fresh boundary points (exact when a chart is present)."""
        if self.chart is not None:
            thetas = 2.0 * np.pi * np.arange(p) / p
            pts, _ = self.chart.evaluate(thetas)
            return pts
        # fall back to the quadratic interpolation
        per = int(np.ceil(p / self.n_elements))
        t = -1.0 + 2.0 * np.arange(per) / per
        idx = self.elements
        y1, y2, y3 = (self.nodes[idx[:, k]] for k in range(3))
        b = 0.5 * (y3 - y1)
        c = 0.5 * (y3 + y1) - y2
        pts = (y2[:, None, :] + b[:, None, :] * t[None, :, None]
               + c[:, None, :] * (t ** 2)[None, :, None])
        return pts.reshape(-1, 2)


@dataclass(frozen=True, eq=False)
class BoundaryMesh:
    """One or more pairwise-disjoint closed curves with their total area."""

    curves: tuple
    total_area: float

    def __post_init__(self):
        if len(self.curves) < 1:
            raise ValueError("mesh needs at least one curve")
        if not (self.total_area > 0):
            raise ValueError("total area must be positive")
        object.__setattr__(self, "curves", tuple(self.curves))
        _check_disjoint(self.curves)

    @property
    def total_nodes(self):
        return sum(c.n for c in self.curves)


def points_inside_polygon(points, polygon):
    """Ray-casting interior test of ``points`` against a closed polygon."""
    points = np.asarray(points, dtype=float)
    polygon = np.asarray(polygon, dtype=float)
    x, y = points[:, 0], points[:, 1]
    px, py = polygon[:, 0], polygon[:, 1]
    qx, qy = np.roll(px, -1), np.roll(py, -1)
    dy = np.where((qy - py) == 0, 1e-300, qy - py)
    cond = (py[None, :] > y[:, None]) != (qy[None, :] > y[:, None])
    x_cross = px[None, :] + (qx - px)[None, :] * (y[:, None] - py[None, :]) / dy[None, :]
    crossings = cond & (x[:, None] < x_cross)
    return (np.sum(crossings, axis=1) % 2) == 1


def _check_disjoint(curves):
    margin = 1e-4 * max(
        float(np.max(np.ptp(c.nodes, axis=0))) for c in curves)
    dense = [c.dense_points(1024) for c in curves]
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            a, b = dense[i], dense[j]
            lo_a, hi_a = a.min(axis=0), a.max(axis=0)
            lo_b, hi_b = b.min(axis=0), b.max(axis=0)
            if (hi_a[0] + margin < lo_b[0] or hi_b[0] + margin < lo_a[0]
                    or hi_a[1] + margin < lo_b[1] or hi_b[1] + margin < lo_a[1]):
                continue
            d = np.min(np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2))
            if d <= margin:
                raise ValueError(
                    f"curves {i} and {j} are not disjoint (min sample "
                    f"distance {d:.3e})")
            if np.any(points_inside_polygon(b, a)) \
                    or np.any(points_inside_polygon(a, b)):
                raise ValueError(f"curves {i} and {j} overlap")


# ---------------------------------------------------------------------------
# sampling and construction
# ---------------------------------------------------------------------------
def sample_boundary(spec, n):
    """Discretize an equipotential curve at ``n`` equidistant angles."""
    if n % 2 != 0 or n < 8:
        raise ValueError("n must be even and at least 8")
    thetas = 2.0 * np.pi * np.arange(n) / n
    chart = EquipotentialChart(spec)
    pts, _ = chart.evaluate(thetas)
    normals = outward_normal(spec, pts)
    return ClosedCurve(nodes=pts, normals=normals, thetas=thetas, chart=chart)


def circle_curve(center, radius, n):
    """Discretize a circle at ``n`` equidistant angles, counterclockwise."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    if n % 2 != 0 or n < 8:
        raise ValueError("n must be even and at least 8")
    thetas = 2.0 * np.pi * np.arange(n) / n
    chart = CircleChart(center, radius)
    pts, _ = chart.evaluate(thetas)
    return ClosedCurve(nodes=pts, normals=chart.normals(thetas),
                       thetas=thetas, chart=chart)


def curve_from_nodes(nodes):
    """Curve through raw nodes; geometry is the quadratic interpolation.

    Normals come from the interpolated tangents (one-sided tangents averaged
    at element junctions), oriented outward.
    """
    nodes = np.asarray(nodes, dtype=float)
    n = len(nodes)
    if n % 2 != 0 or n < 8:
        raise ValueError("node count must be even and at least 8")
    if signed_polygon_area(nodes) < 0:
        nodes = np.concatenate([nodes[:1], nodes[:0:-1]])
    e = np.arange(n // 2)
    idx = np.stack([2 * e, 2 * e + 1, (2 * e + 2) % n], axis=1)
    y1, y2, y3 = nodes[idx[:, 0]], nodes[idx[:, 1]], nodes[idx[:, 2]]
    b = 0.5 * (y3 - y1)
    c = 0.5 * (y3 + y1) - y2
    tang = np.zeros((n, 2))
    tang[idx[:, 1]] = b
    tang[idx[:, 0]] += 0.5 * (b - 2.0 * c)
    tang[idx[:, 2]] += 0.5 * (b + 2.0 * c)
    normals = np.stack([tang[:, 1], -tang[:, 0]], axis=1)
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    centroid = nodes.mean(axis=0)
    if np.sum(np.einsum("ij,ij->i", normals, nodes - centroid)) < 0:
        normals = -normals
    thetas = 2.0 * np.pi * np.arange(n) / n
    return ClosedCurve(nodes=nodes, normals=normals, thetas=thetas, chart=None)


# ---------------------------------------------------------------------------
# areas
# ---------------------------------------------------------------------------
def signed_polygon_area(points):
    points = np.asarray(points, dtype=float)
    x, y = points[:, 0], points[:, 1]
    x2, y2 = np.roll(x, -1), np.roll(y, -1)
    return 0.5 * np.sum(x * y2 - x2 * y)


def polygon_area(points):
    """Absolute shoelace area of the polygon through ``points`` (p >= 3)."""
    points = np.asarray(points, dtype=float)
    if len(points) < 3:
        raise TooFewPoints("polygon area needs at least 3 points")
    x, y = points[:, 0], points[:, 1]
    x2, y2 = np.roll(x, -1), np.roll(y, -1)
    return 0.5 * abs(np.sum((x - x2) * (y + y2)))


def mesh_area(source, p=None):
    """Enclosed area from a dense polygon of freshly sampled boundary points.

    ``source`` may be an EquipotentialSpec, a ClosedCurve, a list of curves,
    or a BoundaryMesh.  The default sample count is max(4096, 8n).
    """
    if isinstance(source, EquipotentialSpec):
        pts = 16384 if p is None else p
        thetas = 2.0 * np.pi * np.arange(pts) / pts
        r = radii_at_angles(source, thetas)
        ax, ay = source.anchor
        poly = np.stack([ax + r * np.cos(thetas), ay + r * np.sin(thetas)],
                        axis=1)
        return polygon_area(poly)
    if isinstance(source, BoundaryMesh):
        curves = source.curves
    elif isinstance(source, ClosedCurve):
        curves = (source,)
    else:
        curves = tuple(source)
    total = 0.0
    for curve in curves:
        pts = max(16384, 8 * curve.n) if p is None else p
        total += polygon_area(curve.dense_points(pts))
    return total


def mesh_from_spec(spec, n):
    """BoundaryMesh with a single equipotential component."""
    curve = sample_boundary(spec, n)
    return BoundaryMesh(curves=(curve,), total_area=mesh_area(curve))


def mesh_from_circles(circles, n):
    """BoundaryMesh of explicit disjoint circles, ``n`` nodes per circle.

    ``circles`` is an iterable of (center, radius) pairs.
    """
    curves = tuple(circle_curve(c, r, n) for c, r in circles)
    return BoundaryMesh(curves=curves, total_area=mesh_area(curves))
