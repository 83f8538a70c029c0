"""Contour-integral eigensolver for holomorphic matrix functions.

Given ``Z(z)`` holomorphic inside an elliptic contour, the two moments

    A0 = (1/2*pi*i) \\oint Z(z)^{-1} V dz
    A1 = (1/2*pi*i) \\oint z Z(z)^{-1} V dz

are approximated with the trapezoidal rule, reduced by an SVD rank cut,
and the eigenvalues inside the contour are read off a small linearization.
Returned values must pass a strict contour-containment test and a residual
test on the original matrix function; failures are logged, not returned.

For matrix functions dominated by smoothing operators (single-layer
blocks), set ``precondition=True``: the probe is premultiplied by ``Z``
evaluated at an off-axis contour node, which turns the integrand into
``Z(z)^{-1} Z(z_ref) V`` with an O(1) analytic background while leaving
eigenvalues and eigenvectors untouched.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .errors import FactorizationFailure, RankSaturated

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Contour:
    """Ellipse ``center + rx*cos(t) + i*ry*sin(t)`` with N trapezoid nodes."""

    center: complex
    radius_x: float
    radius_y: float
    nodes: int = 32

    def __post_init__(self):
        if self.radius_x <= 0 or self.radius_y <= 0:
            raise ValueError("contour radii must be positive")
        if self.nodes < 8:
            raise ValueError("need at least 8 trapezoid nodes")
        object.__setattr__(self, "center", complex(self.center))

    def points(self):
        t = 2.0 * np.pi * np.arange(self.nodes) / self.nodes
        z = self.center + self.radius_x * np.cos(t) + 1j * self.radius_y * np.sin(t)
        dz = -self.radius_x * np.sin(t) + 1j * self.radius_y * np.cos(t)
        return z, dz

    def contains(self, z, margin=0.0):
        z = np.asarray(z, dtype=complex)
        u = (z.real - self.center.real) / self.radius_x
        v = (z.imag - self.center.imag) / self.radius_y
        return u * u + v * v < 1.0 - margin

    def excludes_origin(self):
        return not bool(self.contains(0.0))


@dataclass(frozen=True)
class BeynConfig:
    """Solver knobs: probe count, rank/residual cutoffs, rng seed."""

    probe_columns: int = 16
    rank_tol: float = 1e-8
    residual_tol: float = 1e-6
    rng_seed: int = 1
    precondition: bool = False
    cluster_tol: Optional[float] = None   # default: 1e-6 * |kappa| at grouping

    def __post_init__(self):
        if self.probe_columns < 1:
            raise ValueError("probe_columns must be >= 1")
        if not (0 < self.rank_tol < 1 and 0 < self.residual_tol < 1):
            raise ValueError("tolerances must lie in (0, 1)")


@dataclass(frozen=True)
class EigenCluster:
    value: complex
    multiplicity: int
    members: tuple


@dataclass(frozen=True)
class EigenResult:
    """Eigenvalues inside the contour with eigenvectors and residuals.

    ``eigenvalues[i]`` pairs with ``eigenvectors[:, i]`` and ``residuals[i]``;
    ``clusters`` groups nearby values with their multiplicities.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    clusters: tuple

    @property
    def is_empty(self):
        return len(self.eigenvalues) == 0

    @property
    def cluster_values(self):
        return np.array([c.value for c in self.clusters])

    @property
    def cluster_multiplicities(self):
        return np.array([c.multiplicity for c in self.clusters], dtype=int)

    def expanded_values(self):
        """Cluster representatives repeated by multiplicity."""
        out = []
        for c in self.clusters:
            out.extend([c.value] * c.multiplicity)
        return np.array(out)


def cluster_eigenvalues(values, tol):
    """Single-linkage clustering of complex values at distance ``tol``.

    Returns a list of (mean, multiplicity, member_indices) triples sorted by
    ``(|mean|, Im mean)``.
    """
    if tol <= 0:
        raise ValueError("cluster tolerance must be positive")
    values = np.asarray(values, dtype=complex)
    k = len(values)
    if k == 0:
        return []
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(k):
        for j in range(i + 1, k):
            if abs(values[i] - values[j]) <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        members = tuple(sorted(members))
        mean = complex(np.mean(values[list(members)]))
        out.append((mean, len(members), members))
    out.sort(key=lambda t: (abs(t[0]), t[0].imag))
    return out


def _sort_key(values):
    return np.lexsort((values.imag, np.abs(values)))


def beyn_solve(Z, contour, cfg=None):
    """All eigenvalues of the matrix function ``Z`` inside ``contour``.

    ``Z`` is a callable ``z -> (d, d) complex ndarray`` exposing ``dim``
    (a NepMatrixFunction works directly).  Raises RankSaturated when the
    numerical rank reaches the probe count while probes could still be
    added, and FactorizationFailure when a contour node is singular.
    """
    cfg = cfg or BeynConfig()
    dim = Z.dim if hasattr(Z, "dim") else Z(contour.center).shape[0]
    ell = min(cfg.probe_columns, dim)
    rng = np.random.Generator(np.random.Philox(cfg.rng_seed))
    probe = rng.standard_normal((dim, ell)) + 1j * rng.standard_normal((dim, ell))

    zs, dzs = contour.points()
    if cfg.precondition:
        # off-axis reference keeps real-axis determinant zeros away
        probe = np.asarray(Z(zs[contour.nodes // 4])) @ probe

    a0 = np.zeros((dim, ell), dtype=complex)
    a1 = np.zeros((dim, ell), dtype=complex)
    for j, (z, dz) in enumerate(zip(zs, dzs)):
        mat = np.asarray(Z(z))
        try:
            lu = sla.lu_factor(mat)
            y = sla.lu_solve(lu, probe)
        except (sla.LinAlgError, ValueError) as exc:
            raise FactorizationFailure(
                f"matrix singular at contour node {j} (z={z:.6g}); "
                "perturb the node count") from exc
        if not np.all(np.isfinite(y)):
            raise FactorizationFailure(
                f"non-finite resolvent at contour node {j} (z={z:.6g})")
        a0 += y * dz
        a1 += (z * dz) * y
    a0 /= 1j * contour.nodes
    a1 /= 1j * contour.nodes

    u, s, wh = sla.svd(a0, full_matrices=False)
    if s[0] == 0:
        return _empty_result(dim)
    rank = int(np.sum(s > cfg.rank_tol * s[0]))
    if rank == 0:
        return _empty_result(dim)
    if rank == ell and ell < dim:
        raise RankSaturated(
            f"numerical rank hit the probe count ({ell}); increase "
            "probe_columns")
    u0 = u[:, :rank]
    w0 = wh[:rank, :].conj().T
    b = u0.conj().T @ a1 @ w0 @ np.diag(1.0 / s[:rank])
    lam, vec = np.linalg.eig(b)

    kept_vals, kept_vecs, kept_res = [], [], []
    for i, value in enumerate(lam):
        if not contour.contains(value):
            logger.debug("discarding %s: outside contour", value)
            continue
        v = u0 @ vec[:, i]
        residual = np.linalg.norm(np.asarray(Z(value)) @ v) / np.linalg.norm(v)
        if residual > cfg.residual_tol:
            logger.info("discarding eigenvalue candidate %s: residual %.3e "
                        "exceeds %.1e", value, residual, cfg.residual_tol)
            continue
        kept_vals.append(value)
        kept_vecs.append(v)
        kept_res.append(residual)

    if not kept_vals:
        return _empty_result(dim)
    values = np.array(kept_vals)
    order = _sort_key(values)
    values = values[order]
    vectors = np.stack([kept_vecs[i] for i in order], axis=1)
    residuals = np.array([kept_res[i] for i in order])
    tol = cfg.cluster_tol
    clusters = []
    for mean, mult, members in cluster_eigenvalues(
            values, tol if tol is not None else max(1e-6 * float(np.max(np.abs(values))), 1e-300)):
        clusters.append(EigenCluster(mean, mult, members))
    return EigenResult(values, vectors, residuals, tuple(clusters))


def _empty_result(dim):
    return EigenResult(np.zeros(0, dtype=complex),
                       np.zeros((dim, 0), dtype=complex),
                       np.zeros(0), ())
