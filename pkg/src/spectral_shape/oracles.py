"""Analytic disk references used to validate the numerical layers.

Everything here rests on integer-order Bessel functions evaluated by
Miller's downward recurrence with series normalization, independent of the
special-function route used by the kernels module, so disk results can act
as a genuinely separate check on the BEM + contour-solver pipeline.

Disk interior Neumann wavenumbers are the zeros of ``J_m'`` (multiplicity 2
for m >= 1, once for m = 0).  Disk interior transmission wavenumbers are
the roots of a per-order 2x2 determinant coupling ``J_m`` at the two
wavenumbers ``kappa*sqrt(n)`` and ``kappa``.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .beyn import BeynConfig, Contour, beyn_solve

_RESCALE_LIMIT = 1e250


@dataclass(frozen=True)
class DiskSpec:
    """Reference disk with optional refraction index for ITE oracles."""

    radius: float
    refraction: Optional[float] = None

    def __post_init__(self):
        if not (self.radius > 0):
            raise ValueError("radius must be positive")
        if self.refraction is not None and not (self.refraction > 0):
            raise ValueError("refraction must be positive")


def bessel_j_sequence(z, m_max):
    """J_0(z) .. J_{m_max}(z) by downward recurrence (complex capable)."""
    z = complex(z)
    if z == 0:
        out = np.zeros(m_max + 1, dtype=complex)
        out[0] = 1.0
        return out
    start = m_max + 20 + int(1.5 * abs(z))
    vals = np.zeros(start + 2, dtype=complex)
    vals[start + 1] = 0.0
    vals[start] = 1e-30
    for m in range(start, 0, -1):
        nxt = (2.0 * m / z) * vals[m] - vals[m + 1]
        vals[m - 1] = nxt
        if abs(nxt) > _RESCALE_LIMIT:
            vals[m - 1:] /= abs(nxt)
    norm = vals[0] + 2.0 * np.sum(vals[2:start + 1:2])
    return vals[:m_max + 1] / norm


def bessel_j(order, z):
    """J_order(z) for scalar or array ``z`` (integer order >= 0)."""
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    out = np.array([bessel_j_sequence(v, order)[order] for v in flat])
    out = out.reshape(z.shape)
    return out if out.ndim else complex(out)


def bessel_jp(order, z):
    """Derivative J_order'(z) via the three-term identity."""
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    vals = np.empty(flat.shape, dtype=complex)
    for i, v in enumerate(flat):
        seq = bessel_j_sequence(v, order + 1)
        if order == 0:
            vals[i] = -seq[1]
        else:
            jm1 = seq[order - 1]
            vals[i] = 0.5 * (jm1 - seq[order + 1])
    vals = vals.reshape(z.shape)
    return vals if vals.ndim else complex(vals)


def _jp_real(order, x):
    return bessel_jp(order, complex(x)).real


def _deriv_zeros_upto(order, x_max):
    """Real zeros of J_order' in (0, x_max], bisected to 1e-12."""
    if x_max <= 0.2:
        return []
    grid = np.arange(0.05, x_max + 0.1, 0.1)
    vals = np.array([_jp_real(order, x) for x in grid])
    zeros = []
    for i in range(len(grid) - 1):
        a, b = grid[i], grid[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            zeros.append(a)
            continue
        if fa * fb < 0:
            for _ in range(60):
                mid = 0.5 * (a + b)
                fm = _jp_real(order, mid)
                if fa * fm <= 0:
                    b = mid
                else:
                    a, fa = mid, fm
                if b - a < 1e-13:
                    break
            zeros.append(0.5 * (a + b))
    return [z for z in zeros if z <= x_max]


def disk_neumann_eigenvalues(radius, k_max):
    """First ``k_max`` nonzero Neumann wavenumbers of a disk, with
    multiplicities, sorted ascending.

    Zeros of ``J_m'(kappa * radius)``; angular order m >= 1 contributes
    multiplicity 2, m = 0 multiplicity 1 (kappa = 0 excluded).
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    x_max = 4.0
    while True:
        found = []
        m = 0
        while m <= x_max + 2:
            for x in _deriv_zeros_upto(m, x_max):
                found.append((x, 1 if m == 0 else 2))
            m += 1
        found.sort()
        if sum(mult for _, mult in found) >= k_max:
            break
        x_max *= 1.6
    out = []
    total = 0
    for x, mult in found:
        out.append((x / radius, mult))
        total += mult
        if total >= k_max:
            break
    return out


@lru_cache(maxsize=1)
def first_j1prime_zero():
    """The first positive zero of J_1' (disk's fundamental Neumann mode)."""
    return _deriv_zeros_upto(1, 4.0)[0]


def two_disc_lambda2(total_area):
    """Scale-invariant lambda_2 * A for two equal disjoint discs.

    Independent of ``total_area``: both discs share the fundamental
    wavenumber, so lambda_2 * A = 2*pi*(j'_{1,1})^2.
    """
    if total_area <= 0:
        raise ValueError("total_area must be positive")
    z = first_j1prime_zero()
    return 2.0 * np.pi * z * z


def disk_ite_determinant(kappa, order, radius, refraction):
    """Determinant whose roots are the order-``order`` disk ITEs.

    det [[J_m(k*s*R), -J_m(k*R)], [k*s*J_m'(k*s*R), -k*J_m'(k*R)]]
    with s = sqrt(refraction).
    """
    kappa = np.asarray(kappa, dtype=complex)
    s = np.sqrt(refraction)
    flat = kappa.ravel()
    out = np.empty(flat.shape, dtype=complex)
    for i, k in enumerate(flat):
        j_in = bessel_j_sequence(k * s * radius, order + 1)
        j_out = bessel_j_sequence(k * radius, order + 1)

        def deriv(seq, m):
            return -seq[1] if m == 0 else 0.5 * (seq[m - 1] - seq[m + 1])

        a = j_in[order]
        b = -j_out[order]
        c = k * s * deriv(j_in, order)
        d = -k * deriv(j_out, order)
        out[i] = a * d - b * c
    out = out.reshape(kappa.shape)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class DiskIteResult:
    """Disk ITE roots with their angular orders and a truncation flag."""

    eigenvalues: np.ndarray
    orders: np.ndarray
    order_truncated: bool


class _OrderMatrix:
    """2x2 matrix function of one disk ITE order, for the contour solver."""

    dim = 2

    def __init__(self, order, radius, refraction):
        self.order = order
        self.radius = radius
        self.s = np.sqrt(refraction)

    def __call__(self, kappa):
        k = complex(kappa)
        m = self.order
        j_in = bessel_j_sequence(k * self.s * self.radius, m + 1)
        j_out = bessel_j_sequence(k * self.radius, m + 1)

        def deriv(seq):
            return -seq[1] if m == 0 else 0.5 * (seq[m - 1] - seq[m + 1])

        return np.array([
            [j_in[m], -j_out[m]],
            [k * self.s * deriv(j_in), -k * deriv(j_out)],
        ])


def _winding_number(values):
    """Winding of a closed discrete curve of nonzero complex values."""
    ang = np.angle(values)
    d = np.diff(np.concatenate([ang, ang[:1]]))
    d = (d + np.pi) % (2.0 * np.pi) - np.pi
    return int(round(np.sum(d) / (2.0 * np.pi)))


def _det_scale(order, kappa, radius, refraction):
    """Row-norm product of the order matrix, for relative det residuals."""
    mat = _OrderMatrix(order, radius, refraction)(kappa)
    return (np.linalg.norm(mat[0]) * np.linalg.norm(mat[1])) or 1e-300


def disk_ite_eigenvalues(radius, refraction, window, max_order=40,
                         tile_width=0.3, seed=1):
    """All disk ITE wavenumbers inside ``window`` for orders 0..max_order.

    The window is tiled along its major axis; per (order, tile) the root
    count comes from the winding number of the determinant, and roots are
    extracted with the contour solver applied to the order's 2x2 matrix
    function, then Newton-polished on the determinant.  Conjugate pairs are
    reported individually (the window is expected to straddle the real
    axis).  ``order_truncated`` flags roots still appearing at max_order.
    """
    if window.contains(0.0):
        raise ValueError("window must exclude kappa = 0")
    n_tiles = max(1, int(np.ceil(window.radius_x / tile_width)))
    # Tiles are taller than the window and one spacing wide, which covers the
    # whole window ellipse; candidates outside the window are filtered below.
    spacing = 2.0 * window.radius_x / n_tiles
    centers = (window.center.real - window.radius_x
               + spacing * (np.arange(n_tiles) + 0.5))
    tile_ry = 1.25 * window.radius_y
    # High orders drive the 2x2 matrix norm toward underflow, which makes the
    # standard residual test pass vacuously; the winding count plus the
    # relative determinant check below do the real filtering instead.
    cfg = BeynConfig(probe_columns=2, rng_seed=seed, residual_tol=0.99)
    found_vals, found_orders = [], []
    truncated = False
    for order in range(max_order + 1):
        fn = _OrderMatrix(order, radius, refraction)
        tiles = [Contour(center=complex(c, window.center.imag),
                         radius_x=spacing, radius_y=tile_ry, nodes=48)
                 for c in centers]
        depth = 0
        while tiles and depth < 6:
            next_tiles = []
            for tile in tiles:
                zs, _ = tile.points()
                dets = disk_ite_determinant(zs, order, radius, refraction)
                if np.all(dets != 0):
                    count = _winding_number(dets)
                    if count == 0:
                        continue
                    if count > 2:       # beyond the 2x2 capacity: split
                        for shift in (-0.5, 0.5):
                            next_tiles.append(Contour(
                                tile.center + shift * tile.radius_x,
                                0.75 * tile.radius_x, tile.radius_y, 48))
                        continue
                res = beyn_solve(fn, tile, cfg)
                for val in res.eigenvalues:
                    z = complex(val)
                    for _ in range(3):
                        h = 1e-7 * max(1.0, abs(z))
                        f = disk_ite_determinant(z, order, radius, refraction)
                        fp = (disk_ite_determinant(z + h, order, radius,
                                                   refraction)
                              - disk_ite_determinant(z - h, order, radius,
                                                     refraction)) / (2.0 * h)
                        if abs(fp) == 0:
                            break
                        z = z - f / fp
                    det = abs(disk_ite_determinant(z, order, radius,
                                                   refraction))
                    if det > 1e-9 * _det_scale(order, z, radius, refraction):
                        continue
                    if not window.contains(z):
                        continue
                    if any(o == order and abs(z - v) < 1e-8
                           for v, o in zip(found_vals, found_orders)):
                        continue
                    found_vals.append(z)
                    found_orders.append(order)
                    if order == max_order:
                        truncated = True
            tiles = next_tiles
            depth += 1
    vals = np.array(found_vals)
    orders = np.array(found_orders, dtype=int)
    if len(vals):
        idx = np.lexsort((vals.imag, np.abs(vals)))
        vals, orders = vals[idx], orders[idx]
    return DiskIteResult(vals, orders, truncated)
