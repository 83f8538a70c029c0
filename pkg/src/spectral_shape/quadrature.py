"""Quadrature rules used by the boundary-element assembly.

Three building blocks:

* Gauss-Legendre rules (cached) for smooth integrands.
* The 15-point Gauss-Kronrod rule with its embedded 7-point Gauss rule,
  used for near-boundary integrals and for the adaptive scalar path.
* A generated Gauss rule for the weight ln(1/x) on (0, 1], used to
  integrate the logarithmic part of singular kernels on self elements.
"""

from functools import lru_cache
from math import comb

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import QuadratureFailure

# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1]
# (QUADPACK dqk15 abscissae/weights; Gauss points are the odd-indexed nodes).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839998060075570,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

KRONROD15_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])          # ascending
KRONROD15_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# weights of the embedded Gauss-7 rule, zero on Kronrod-only nodes
GAUSS7_EMBEDDED = np.zeros(15)
GAUSS7_EMBEDDED[1:14:2] = np.concatenate([_WG[:-1], _WG[::-1]])


@lru_cache(maxsize=32)
def gauss_legendre(n):
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@lru_cache(maxsize=8)
def log_gauss(n):
    """Gauss rule for the weight ln(1/x) on (0, 1].

    Built from modified moments against shifted Legendre polynomials with
    the Wheeler (modified Chebyshev) algorithm, then Golub-Welsch.  The
    modified moments are known in closed form, which keeps the generation
    well conditioned up to the orders needed here.
    """
    nmom = 2 * n
    nu = np.zeros(nmom)
    nu[0] = 1.0
    for k in range(1, nmom):
        nu[k] = (-1.0) ** k / (k * (k + 1) * comb(2 * k, k))
    # monic shifted-Legendre recurrence coefficients on [0, 1]
    a = np.full(nmom, 0.5)
    b = np.zeros(nmom)
    for k in range(1, nmom):
        b[k] = k * k / (4.0 * (4.0 * k * k - 1.0))

    alpha = np.zeros(n)
    beta = np.zeros(n)
    sigma = np.zeros((n + 1, nmom))
    sigma[1, :] = nu
    alpha[0] = a[0] + nu[1] / nu[0]
    beta[0] = nu[0]
    for k in range(1, n):
        for l in range(k, nmom - k):
            sigma[k + 1, l] = (sigma[k, l + 1]
                               - (alpha[k - 1] - a[l]) * sigma[k, l]
                               - beta[k - 1] * sigma[k - 1, l]
                               + b[l] * sigma[k, l - 1])
        alpha[k] = (a[k] + sigma[k + 1, k + 1] / sigma[k + 1, k]
                    - sigma[k, k] / sigma[k, k - 1])
        beta[k] = sigma[k + 1, k] / sigma[k, k - 1]

    nodes, vecs = eigh_tridiagonal(alpha, np.sqrt(beta[1:]))
    weights = beta[0] * vecs[0, :] ** 2
    return nodes, weights


def kronrod15_panel(f, a, b):
    """Apply the GK15 rule to ``f`` on [a, b].

    Returns (kronrod_value, error_estimate); ``f`` must accept an ndarray.
    """
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    vals = f(mid + half * KRONROD15_NODES)
    k15 = half * np.sum(vals * KRONROD15_WEIGHTS, axis=-1)
    g7 = half * np.sum(vals * GAUSS7_EMBEDDED, axis=-1)
    return k15, np.max(np.abs(k15 - g7))


def adaptive_gk15(f, a, b, tol=1e-12, max_depth=12):
    """Adaptive bisection with GK15 panels.

    ``f`` maps an ndarray of points to an ndarray of (possibly complex)
    values of the same leading shape.  Raises QuadratureFailure when the
    depth limit is reached with the tolerance still unmet.
    """
    total, err = kronrod15_panel(f, a, b)
    stack = [(a, b, total, err, 0)]
    acc = 0.0 + 0.0j if np.iscomplexobj(total) else 0.0
    while stack:
        lo, hi, val, err, depth = stack.pop()
        if err <= max(tol, 1e-15 * abs(val)) or hi - lo < 1e-15:
            acc += val
            continue
        if depth >= max_depth:
            raise QuadratureFailure(
                f"adaptive GK15 exceeded depth {max_depth} on [{lo}, {hi}] "
                f"(error estimate {err:.2e})")
        mid = 0.5 * (lo + hi)
        v1, e1 = kronrod15_panel(f, lo, mid)
        v2, e2 = kronrod15_panel(f, mid, hi)
        stack.append((lo, mid, v1, e1, depth + 1))
        stack.append((mid, hi, v2, e2, depth + 1))
    return acc


def graded_panels(t_star, lo, hi, depth):
    """Panel breakpoints geometrically refined toward ``t_star`` in [lo, hi].

    Returns an array of interval endpoints covering [lo, hi]; panels next
    to ``t_star`` halve in width ``depth`` times.  Used for near-singular
    integrands whose peak sits at parameter ``t_star``.
    """
    pts = [lo]
    if t_star - lo > 1e-14:
        left = t_star - (t_star - lo) * 0.5 ** np.arange(depth, -1, -1.0)
        pts.extend(left[left > lo + 1e-14])
    pts.append(min(t_star, hi) if t_star > lo else lo)
    if hi - t_star > 1e-14:
        right = t_star + (hi - t_star) * 0.5 ** np.arange(depth, -1, -1.0)
        pts.extend(right[right < hi - 1e-14])
        pts.append(hi)
    out = np.unique(np.clip(np.asarray(pts), lo, hi))
    return out
