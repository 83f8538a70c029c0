"""Boundary-element collocation matrices for Neumann and transmission runs.

The discretization follows the quadratic collocation layout of the geometry
module: per curve, element ``e`` spans nodes ``(2e, 2e+1, 2e+2)``, density
unknowns live at the nodes, and the equations are collocated at the nodes.
When a curve carries a chart the quadrature evaluates boundary points on the
exact generator curve (angle-linear per element), which preserves the
method's fourth-order eigenvalue convergence; chartless curves fall back to
the quadratic interpolation.

Quadrature tiers per (collocation node, element) pair:

* far pairs: 10-point Gauss-Legendre;
* same-curve neighbors (node distance <= 2): 15-point Gauss-Kronrod;
* physically close pairs (near-touching components): panels graded toward
  the closest parameter, GK15 per panel;
* self pairs: the kernel's logarithmic part integrated with a dedicated
  ln(1/x)-weighted Gauss rule, the entire remainder with Gauss-Legendre,
  both split at the collocation parameter.
"""

import weakref
from dataclasses import dataclass

import numpy as np
from scipy.special import hankel1, jv

from .errors import PointTooClose, RefractionDegenerate
from .kernels import (WaveNumber, hankel1_0_log_remainder,
                      hankel1_1_log_remainder)
from .quadrature import (KRONROD15_NODES, KRONROD15_WEIGHTS, adaptive_gk15,
                         gauss_legendre, graded_panels, log_gauss)

_FAR_ORDER = 10
_SELF_SMOOTH_ORDER = 20
_SELF_LOG_ORDER = 10
_NEAR_FLAG_FACTOR = 0.8
_GRADE_DEPTH = 8
_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class TransmissionConfig:
    """Index of refraction for the interior transmission problem."""

    refraction: float

    def __post_init__(self):
        if not (self.refraction > 0):
            raise ValueError("refraction must be positive")
        if abs(self.refraction - 1.0) < 1e-6:
            raise RefractionDegenerate(
                "refraction too close to 1: transmission blocks coincide")


class NepMatrixFunction:
    """Holomorphic matrix function contract: kappa -> dense (dim, dim)."""

    def __init__(self, fn, dim, mesh, label=""):
        self._fn = fn
        self.dim = dim
        self.mesh = mesh
        self.label = label

    def __call__(self, kappa):
        return self._fn(kappa)


def _shape_functions(t):
    t = np.asarray(t, dtype=float)
    return np.stack([0.5 * t * (t - 1.0), 1.0 - t * t, 0.5 * t * (t + 1.0)],
                    axis=0)


class _ElementMap:
    """Evaluate points/Jacobians on one curve's elements at parameters t.

    ``t`` has shape (E, q) or (q,) broadcast over elements; returns points
    (E, q, 2) and the arc-length Jacobian ds/dt (E, q).
    """

    def __init__(self, curve):
        self.curve = curve
        idx = curve.elements
        nodes = curve.nodes
        self.y1, self.y2, self.y3 = (nodes[idx[:, k]] for k in range(3))
        self.b = 0.5 * (self.y3 - self.y1)
        self.c = 0.5 * (self.y3 + self.y1) - self.y2
        self.h = _TWO_PI / curve.n
        self.theta_mid = curve.thetas[idx[:, 1]]

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 1:
            t = np.broadcast_to(t, (len(self.b), len(t)))
        if self.curve.chart is not None:
            thetas = self.theta_mid[:, None] + t * self.h
            pts, dpts = self.curve.chart.evaluate(thetas.ravel())
            pts = pts.reshape(t.shape + (2,))
            dpts = dpts.reshape(t.shape + (2,))
            return pts, np.linalg.norm(dpts, axis=-1) * self.h
        pts = (self.y2[:, None, :] + self.b[:, None, :] * t[..., None]
               + self.c[:, None, :] * (t ** 2)[..., None])
        dpts = self.b[:, None, :] + 2.0 * self.c[:, None, :] * t[..., None]
        return pts, np.linalg.norm(dpts, axis=-1)


class _SelfBlock:
    """kappa-independent tables for one collocation-on-element side rule."""

    __slots__ = ("a_loc", "length", "is_log", "rphys", "ln_s", "d_over_r",
                 "d_over_r2", "basis")

    def __init__(self, a_loc, length, is_log, rphys, ln_s, d_over_r,
                 d_over_r2, basis):
        self.a_loc = a_loc
        self.length = length
        self.is_log = is_log
        self.rphys = rphys
        self.ln_s = ln_s
        self.d_over_r = d_over_r
        self.d_over_r2 = d_over_r2
        self.basis = basis          # (E, 3, q): N_a * J * w


class _CurveTables:
    """All kappa-independent quadrature data for one curve."""

    def __init__(self, curve, row_offset, col_offset, all_nodes, all_normals):
        self.curve = curve
        self.row_offset = row_offset
        self.col_offset = col_offset
        n, E = curve.n, curve.n_elements
        idx = curve.elements
        emap = _ElementMap(curve)
        n_total = len(all_nodes)

        tq, wq = gauss_legendre(_FAR_ORDER)
        Nq = _shape_functions(tq)
        self.y10, j10 = emap.evaluate(tq)
        self.w10 = np.einsum("aq,eq,q->eaq", Nq, j10, wq)

        N15 = _shape_functions(KRONROD15_NODES)
        self.y15, j15 = emap.evaluate(KRONROD15_NODES)
        self.w15 = np.einsum("aq,eq,q->eaq", N15, j15, KRONROD15_WEIGHTS)

        diff = all_nodes[:, None, None, :] - self.y10[None, :, :, :]
        self.r10 = np.linalg.norm(diff, axis=3)
        self.dot10 = np.einsum("neqi,ni->neq", diff, all_normals)

        # pair classification relative to this curve's elements
        self.mask = np.zeros((n_total, E), dtype=bool)      # self + neighbors
        rows_self = (idx.T + row_offset)                    # (3, E)
        for a in range(3):
            self.mask[rows_self[a], np.arange(E)] = True
        near_rows, near_elems = [], []
        e_arr = np.arange(E)
        for off in (-2, -1, 3, 4):
            rows = (2 * e_arr + off) % n + row_offset
            near_rows.append(rows)
            near_elems.append(e_arr)
            self.mask[rows, e_arr] = True
        self.near_rows = np.concatenate(near_rows)
        self.near_elems = np.concatenate(near_elems)
        d = all_nodes[self.near_rows, None, :] - self.y15[self.near_elems]
        self.near_r = np.linalg.norm(d, axis=2)
        self.near_dot = np.einsum("pqi,pi->pq", d,
                                  all_normals[self.near_rows])

        # physically close but parametrically far pairs (graded panels)
        arc_len = np.einsum("eq,q->e", j10, wq)
        close = (self.r10.min(axis=2) < _NEAR_FLAG_FACTOR * arc_len) & ~self.mask
        self.flagged = []
        if np.any(close):
            t_grid = np.linspace(-1.0, 1.0, 33)
            yg, _ = emap.evaluate(t_grid)
            for i_row, e in zip(*np.nonzero(close)):
                dg = np.linalg.norm(all_nodes[i_row] - yg[e], axis=1)
                t_star = t_grid[int(np.argmin(dg))]
                pts = graded_panels(t_star, -1.0, 1.0, _GRADE_DEPTH)
                t_all, w_all = [], []
                for lo, hi in zip(pts[:-1], pts[1:]):
                    half = 0.5 * (hi - lo)
                    t_all.append(0.5 * (hi + lo) + half * KRONROD15_NODES)
                    w_all.append(half * KRONROD15_WEIGHTS)
                t_all = np.concatenate(t_all)
                w_all = np.concatenate(w_all)
                yk, jk = _eval_single_element(emap, e, t_all)
                dif = all_nodes[i_row] - yk
                rph = np.linalg.norm(dif, axis=1)
                dotn = dif @ all_normals[i_row]
                basis = _shape_functions(t_all) * (jk * w_all)
                self.mask[i_row, e] = True
                self.flagged.append((i_row, e, rph, dotn, basis))

        # self-element side rules for the three collocation positions
        ul, wl = log_gauss(_SELF_LOG_ORDER)
        ug, wg = gauss_legendre(_SELF_SMOOTH_ORDER)
        ug = 0.5 * (ug + 1.0)
        wg = 0.5 * wg
        self.self_blocks = []
        nodes = curve.nodes
        normals = curve.normals
        for a_loc, t0 in enumerate((-1.0, 0.0, 1.0)):
            xi = nodes[idx[:, a_loc]]
            ni = normals[idx[:, a_loc]]
            for lo, hi in ((-1.0, t0), (t0, 1.0)):
                length = hi - lo
                if length < 1e-14:
                    continue
                sign = 1.0 if lo == t0 else -1.0
                for u, w, is_log in ((ul, wl, True), (ug, wg, False)):
                    t = t0 + sign * length * u
                    y, j = emap.evaluate(t[None, :].repeat(E, axis=0))
                    dvec = xi[:, None, :] - y
                    rphys = np.linalg.norm(dvec, axis=2)
                    ln_s = np.log(rphys / np.abs(t - t0)[None, :])
                    nw = np.einsum("eqi,ei->eq", dvec, ni)
                    basis = np.einsum("aq,eq,q->eaq", _shape_functions(t), j, w)
                    self.self_blocks.append(_SelfBlock(
                        a_loc, length, is_log, rphys, ln_s,
                        nw / rphys, nw / rphys ** 2, basis))
        self.rows_for_aloc = [idx[:, a] + row_offset for a in range(3)]


def _eval_single_element(emap, e, t):
    """Points/Jacobian of one element at a 1-D parameter array."""
    if emap.curve.chart is not None:
        thetas = emap.theta_mid[e] + t * emap.h
        pts, dpts = emap.curve.chart.evaluate(thetas)
        return pts, np.linalg.norm(dpts, axis=-1) * emap.h
    pts = emap.y2[e] + np.outer(t, emap.b[e]) + np.outer(t ** 2, emap.c[e])
    dpts = emap.b[e] + 2.0 * np.outer(t, emap.c[e])
    return pts, np.linalg.norm(dpts, axis=-1)


class _MeshData:
    def __init__(self, mesh):
        self.mesh = mesh
        self.nodes = np.concatenate([c.nodes for c in mesh.curves])
        self.normals = np.concatenate([c.normals for c in mesh.curves])
        self.n_total = len(self.nodes)
        self.tables = []
        offset = 0
        for curve in mesh.curves:
            self.tables.append(_CurveTables(curve, offset, offset,
                                            self.nodes, self.normals))
            offset += curve.n


_MESH_CACHE = weakref.WeakKeyDictionary()


def _mesh_data(mesh):
    data = _MESH_CACHE.get(mesh)
    if data is None:
        data = _MeshData(mesh)
        _MESH_CACHE[mesh] = data
    return data


# ---------------------------------------------------------------------------
# per-kind kernel evaluations
# ---------------------------------------------------------------------------
def _far_kernel(kind, kappa, r, dot):
    z = kappa * r
    if kind == "single":
        return 0.25j * hankel1(0, z)
    if kind == "adjoint":
        return -0.25j * kappa * hankel1(1, z) * dot / r
    if kind == "single_j":
        return jv(0, z) + 0j
    if kind == "adjoint_j":
        return jv(1, z) * dot / r + 0j
    raise ValueError(f"unknown kernel kind {kind!r}")


def _self_contribution(kind, kappa, block):
    """Integrand values on a self side-rule block, shape (E, q)."""
    z = kappa * block.rphys
    ln_kl = np.log(kappa) + block.ln_s + np.log(block.length)
    if kind == "single":
        if block.is_log:
            return -(0.5 / np.pi) * jv(0, z)
        return (0.25j * hankel1_0_log_remainder(z)
                - (0.5 / np.pi) * ln_kl * jv(0, z))
    if kind == "adjoint":
        if block.is_log:
            return (0.5 / np.pi) * kappa * jv(1, z) * block.d_over_r
        return (-0.25j * kappa * hankel1_1_log_remainder(z) * block.d_over_r
                + (0.5 / np.pi) * kappa * ln_kl * jv(1, z) * block.d_over_r
                - (0.5 / np.pi) * block.d_over_r2)
    if kind == "single_j":
        return None if block.is_log else jv(0, z) + 0j
    if kind == "adjoint_j":
        return None if block.is_log else jv(1, z) * block.d_over_r + 0j
    raise ValueError(f"unknown kernel kind {kind!r}")


def assemble_layer(mesh, kappa, kind):
    """Dense collocation matrix of one boundary kernel over the mesh.

    ``kind`` selects the kernel: 'single' for the single-layer operator,
    'adjoint' for the adjoint double layer (no identity term), and the
    Bessel-J variants 'single_j'/'adjoint_j' used by conjugation checks.
    """
    kappa = complex(WaveNumber(kappa))
    data = _mesh_data(mesh)
    n = data.n_total
    out = np.zeros((n, n), dtype=complex)
    for tab in data.tables:
        E = tab.curve.n_elements
        big = np.zeros((n, E, 3), dtype=complex)
        r_safe = np.where(tab.mask[:, :, None], 1.0, tab.r10)
        kern = _far_kernel(kind, kappa, r_safe, tab.dot10)
        kern = np.where(tab.mask[:, :, None], 0.0, kern)
        big += np.einsum("neq,eaq->nea", kern, tab.w10)

        near = _far_kernel(kind, kappa, tab.near_r, tab.near_dot)
        contrib = np.einsum("pq,paq->pa", near, tab.w15[tab.near_elems])
        np.add.at(big, (tab.near_rows, tab.near_elems), contrib)

        for i_row, e, rph, dotn, basis in tab.flagged:
            kf = _far_kernel(kind, kappa, rph, dotn)
            big[i_row, e, :] += basis @ kf

        for block in tab.self_blocks:
            vals = _self_contribution(kind, kappa, block)
            if vals is None:
                continue
            sign = -1.0 if block.is_log else 1.0
            acc = sign * block.length * np.einsum("eq,eaq->ea", vals,
                                                  block.basis)
            rows = tab.rows_for_aloc[block.a_loc]
            np.add.at(big, (rows, np.arange(E)), acc)

        # fold element-local weights into global columns
        off = tab.col_offset
        nc = tab.curve.n
        out[:, off:off + nc:2] += big[:, :, 0]
        out[:, off + 1:off + nc:2] += big[:, :, 1]
        out[:, off + 2:off + nc:2] += big[:, :-1, 2]
        out[:, off] += big[:, -1, 2]
    return out


def assemble_neumann(mesh, kappa):
    """Neumann collocation matrix I/2 + (adjoint double layer)."""
    n = _mesh_data(mesh).n_total
    return 0.5 * np.eye(n) + assemble_layer(mesh, kappa, "adjoint")


def transmission_blocks(mesh, kappa_inner, kappa_outer):
    """Block system matching Dirichlet and interior Neumann traces of two
    single-layer potentials at the given wavenumbers."""
    n = _mesh_data(mesh).n_total
    half = 0.5 * np.eye(n)
    s_in = assemble_layer(mesh, kappa_inner, "single")
    s_out = assemble_layer(mesh, kappa_outer, "single")
    k_in = assemble_layer(mesh, kappa_inner, "adjoint") + half
    k_out = assemble_layer(mesh, kappa_outer, "adjoint") + half
    return np.block([[s_in, -s_out], [k_in, -k_out]])


def assemble_transmission(mesh, kappa, cfg):
    """Transmission collocation matrix (2n x 2n) at refraction cfg."""
    kappa = complex(WaveNumber(kappa))
    return transmission_blocks(mesh, kappa * np.sqrt(cfg.refraction), kappa)


def neumann_operator(mesh):
    """Matrix function kappa -> I/2 + K'(kappa) with cached geometry."""
    _mesh_data(mesh)
    return NepMatrixFunction(lambda k: assemble_neumann(mesh, k),
                             _mesh_data(mesh).n_total, mesh, "neumann")


def transmission_operator(mesh, cfg):
    """Matrix function kappa -> T(kappa) for the transmission problem."""
    _mesh_data(mesh)
    return NepMatrixFunction(lambda k: assemble_transmission(mesh, k, cfg),
                             2 * _mesh_data(mesh).n_total, mesh,
                             f"transmission(n={cfg.refraction})")


# ---------------------------------------------------------------------------
# scalar element integrals and interior evaluation
# ---------------------------------------------------------------------------
def element_integral(curve, element, x, kind, kappa=None, nx=None):
    """Integrals of kernel(x, .) times the three nodal shape functions.

    ``kind`` is 'single', 'adjoint', or 'one' (unit kernel test hook).  The
    self case (x equals one of the element's nodes) uses the log-split
    scheme; otherwise the integral is computed with adaptive Gauss-Kronrod
    panels to absolute tolerance 1e-12.
    """
    emap = _ElementMap(curve)
    idx = curve.elements[element]
    scale = 1.0 + float(np.max(np.abs(curve.nodes)))
    x = np.asarray(x, dtype=float)
    t0 = None
    for a_loc, node in enumerate(curve.nodes[idx]):
        if np.linalg.norm(x - node) <= 1e-12 * scale:
            t0 = (-1.0, 0.0, 1.0)[a_loc]
            if nx is None:
                nx = curve.normals[idx[a_loc]]
            break
    if kind == "one":
        def f(a):
            def g(t):
                _, j = _eval_single_element(emap, element, np.asarray(t))
                return _shape_functions(np.asarray(t))[a] * j
            return g
        return np.array([adaptive_gk15(f(a), -1.0, 1.0) for a in range(3)],
                        dtype=complex)
    kappa = complex(WaveNumber(kappa))
    if kind == "adjoint" and nx is None:
        raise ValueError("adjoint kernel needs the collocation normal nx")

    if t0 is None:
        def integrand(a):
            def g(t):
                t = np.asarray(t)
                y, j = _eval_single_element(emap, element, t)
                d = x[None, :] - y
                r = np.linalg.norm(d, axis=1)
                if kind == "single":
                    kern = 0.25j * hankel1(0, kappa * r)
                else:
                    kern = (-0.25j * kappa * hankel1(1, kappa * r)
                            * (d @ nx) / r)
                return kern * _shape_functions(t)[a] * j
            return g
        return np.array([adaptive_gk15(integrand(a), -1.0, 1.0)
                         for a in range(3)])

    # self element: log-split scheme on each side of t0
    ul, wl = log_gauss(_SELF_LOG_ORDER)
    ug, wg = gauss_legendre(2 * _SELF_SMOOTH_ORDER)
    ug = 0.5 * (ug + 1.0)
    wg = 0.5 * wg
    acc = np.zeros(3, dtype=complex)
    for lo, hi in ((-1.0, t0), (t0, 1.0)):
        length = hi - lo
        if length < 1e-14:
            continue
        sign = 1.0 if lo == t0 else -1.0
        for u, w, is_log in ((ul, wl, True), (ug, wg, False)):
            t = t0 + sign * length * u
            y, j = _eval_single_element(emap, element, t)
            dvec = x[None, :] - y
            rphys = np.linalg.norm(dvec, axis=1)
            z = kappa * rphys
            ln_kl = (np.log(kappa) + np.log(rphys / np.abs(t - t0))
                     + np.log(length))
            if kind == "single":
                vals = (-(0.5 / np.pi) * jv(0, z) if is_log
                        else 0.25j * hankel1_0_log_remainder(z)
                        - (0.5 / np.pi) * ln_kl * jv(0, z))
            else:
                nw = dvec @ nx
                d_over_r = nw / rphys
                if is_log:
                    vals = (0.5 / np.pi) * kappa * jv(1, z) * d_over_r
                else:
                    vals = (-0.25j * kappa * hankel1_1_log_remainder(z)
                            * d_over_r
                            + (0.5 / np.pi) * kappa * ln_kl * jv(1, z)
                            * d_over_r
                            - (0.5 / np.pi) * nw / rphys ** 2)
            sgn = -1.0 if is_log else 1.0
            acc += sgn * length * np.einsum(
                "q,aq,q,q->a", vals, _shape_functions(t), j, w)
    return acc


def evaluate_interior(mesh, kappa, density, points):
    """Single-layer potential with the given nodal density at interior points.

    Points closer to the boundary than two element lengths switch to a
    graded panel rule; closer than 1e-3 raises PointTooClose.
    """
    kappa = complex(WaveNumber(kappa))
    data = _mesh_data(mesh)
    density = np.asarray(density, dtype=complex)
    if density.shape != (data.n_total,):
        raise ValueError("density must have one entry per mesh node")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.zeros(len(points), dtype=complex)
    for tab in data.tables:
        idx = tab.curve.elements
        dens_e = density[idx + tab.col_offset]       # (E, 3)
        tq, wq = gauss_legendre(_FAR_ORDER)
        arc_len = tab.w10.sum(axis=(1, 2))
        diff = points[:, None, None, :] - tab.y10[None, :, :, :]
        r = np.linalg.norm(diff, axis=3)
        dmin = r.min(axis=2)                          # (P, E)
        fine = dmin < 2.0 * arc_len[None, :]
        r_safe = np.where(fine[:, :, None], 1.0, r)
        kern = 0.25j * hankel1(0, kappa * r_safe)
        kern = np.where(fine[:, :, None], 0.0, kern)
        out += np.einsum("peq,eaq,ea->p", kern, tab.w10, dens_e)
        emap = _ElementMap(tab.curve)
        t_grid = np.linspace(-1.0, 1.0, 129)
        for p_i, e in zip(*np.nonzero(fine)):
            yg, _ = _eval_single_element(emap, e, t_grid)
            dists = np.linalg.norm(points[p_i] - yg, axis=1)
            if np.min(dists) < 1e-3:
                raise PointTooClose(
                    f"point {points[p_i]} is within 1e-3 of the boundary")
            t_star = t_grid[int(np.argmin(dists))]
            brk = graded_panels(t_star, -1.0, 1.0, _GRADE_DEPTH)
            t_all = np.concatenate([0.5 * (hi + lo)
                                    + 0.5 * (hi - lo) * KRONROD15_NODES
                                    for lo, hi in zip(brk[:-1], brk[1:])])
            w_all = np.concatenate([0.5 * (hi - lo) * KRONROD15_WEIGHTS
                                    for lo, hi in zip(brk[:-1], brk[1:])])
            yk, jk = _eval_single_element(emap, e, t_all)
            rk = np.linalg.norm(points[p_i] - yk, axis=1)
            kern = 0.25j * hankel1(0, kappa * rk)
            basis = _shape_functions(t_all)
            out[p_i] += np.einsum("q,aq,q,q,a->", kern, basis, jk, w_all,
                                  dens_e[e])
    return out
