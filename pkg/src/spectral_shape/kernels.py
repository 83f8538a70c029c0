"""Helmholtz fundamental solution and its boundary kernels.

The 2D fundamental solution is ``Phi_k(x, y) = (i/4) H0(k*|x - y|)`` with
``H0`` the first-kind Hankel function of order zero.  The adjoint
double-layer kernel is its normal derivative at the observation point.

For log-aware quadrature near the diagonal the Hankel functions are split
into an explicit logarithmic part and an entire remainder:

    H0(z) = (2i/pi) * ln(z) * J0(z) + R0(z)
    H1(z) = (2i/pi) * (ln(z) * J1(z) - 1/z) + S1(z)

``R0`` and ``S1`` are entire; they are evaluated by their power series for
moderate arguments (direct subtraction would lose digits as z -> 0).
"""

import numpy as np
from scipy.special import hankel1, jv

from .errors import CoincidentPoints, DomainError

EULER_GAMMA = 0.5772156649015328606
_SERIES_CUTOFF = 8.0
_SERIES_TERMS = 34


def _as_complex_array(z):
    return np.asarray(z, dtype=complex)


def _check_domain(z):
    z = _as_complex_array(z)
    if np.any(z == 0):
        raise DomainError("Hankel functions are singular at z = 0")
    on_cut = (z.real < 0) & (z.imag == 0)
    if np.any(on_cut):
        raise DomainError("argument on the branch cut (negative real axis)")
    return z


def hankel1_0(z):
    """First-kind Hankel function of order 0 for complex argument."""
    z = _check_domain(z)
    out = hankel1(0, z)
    return out if out.ndim else complex(out)


def hankel1_1(z):
    """First-kind Hankel function of order 1 for complex argument."""
    z = _check_domain(z)
    out = hankel1(1, z)
    return out if out.ndim else complex(out)


def bessel_j0(z):
    return jv(0, _as_complex_array(z))


def bessel_j1(z):
    return jv(1, _as_complex_array(z))


def hankel1_0_log_remainder(z):
    """Entire remainder R0(z) = H0(z) - (2i/pi) ln(z) J0(z)."""
    z = _as_complex_array(z)
    out = np.empty(z.shape, dtype=complex)
    small = np.abs(z) <= _SERIES_CUTOFF
    zs = z[small]
    q = 0.25 * zs * zs
    term = np.ones_like(zs)
    acc = np.zeros_like(zs)
    hk = 0.0
    for k in range(1, _SERIES_TERMS):
        term = term * (-q) / (k * k)
        hk += 1.0 / k
        acc -= term * hk            # sum (-1)^(k+1) H_k q^k / (k!)^2
    out[small] = (jv(0, zs) * (1.0 + (2j / np.pi) * (EULER_GAMMA - np.log(2.0)))
                  + (2j / np.pi) * acc)
    zb = z[~small]
    out[~small] = hankel1(0, zb) - (2j / np.pi) * np.log(zb) * jv(0, zb)
    return out


def hankel1_1_log_remainder(z):
    """Entire remainder S1(z) = H1(z) - (2i/pi) (ln(z) J1(z) - 1/z)."""
    z = _as_complex_array(z)
    out = np.empty(z.shape, dtype=complex)
    small = np.abs(z) <= _SERIES_CUTOFF
    zs = z[small]
    h = 0.5 * zs
    q = h * h
    term = h.copy()
    hk, hk1 = 0.0, 1.0
    acc = term * (hk + hk1 - 2.0 * EULER_GAMMA)
    for k in range(1, _SERIES_TERMS):
        term = term * (-q) / (k * (k + 1))
        hk += 1.0 / k
        hk1 += 1.0 / (k + 1)
        acc += term * (hk + hk1 - 2.0 * EULER_GAMMA)
    out[small] = (jv(1, zs) * (1.0 - (2j / np.pi) * np.log(2.0))
                  - (1j / np.pi) * acc)
    zb = z[~small]
    out[~small] = hankel1(1, zb) - (2j / np.pi) * (np.log(zb) * jv(1, zb)
                                                   - 1.0 / zb)
    return out


# ---------------------------------------------------------------------------
# validated value types
# ---------------------------------------------------------------------------
class WaveNumber:
    """Complex wavenumber restricted to the holomorphy region C \\ R_{<=0}."""

    __slots__ = ("kappa",)

    def __init__(self, kappa):
        kappa = complex(kappa)
        if kappa == 0:
            raise DomainError("wavenumber must be nonzero")
        if kappa.real < 0 and kappa.imag == 0:
            raise DomainError("wavenumber on the negative real axis")
        self.kappa = kappa

    def __complex__(self):
        return self.kappa

    def __repr__(self):
        return f"WaveNumber({self.kappa!r})"


class KernelPoint:
    """Source/observation pair with optional unit normals."""

    __slots__ = ("x", "y", "nx", "ny")

    def __init__(self, x, y, nx=None, ny=None):
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        if np.array_equal(self.x, self.y):
            raise CoincidentPoints("kernel point requires x != y")
        for name, v in (("nx", nx), ("ny", ny)):
            if v is not None:
                v = np.asarray(v, dtype=float)
                if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                    raise ValueError(f"{name} must be a unit vector")
            setattr(self, name, v)


def _kappa_value(kappa):
    return kappa.kappa if isinstance(kappa, WaveNumber) else complex(kappa)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------
def fundamental_solution(kappa, x, y):
    """Phi_k(x, y) = (i/4) H0(k |x - y|); x and y broadcast over (..., 2)."""
    k = _kappa_value(kappa)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = np.linalg.norm(x - y, axis=-1)
    if np.any(r == 0):
        raise CoincidentPoints("fundamental solution undefined at x == y")
    out = 0.25j * hankel1(0, k * r)
    return out if np.ndim(out) else complex(out)


def adjoint_doublelayer_kernel(kappa, x, y, nx):
    """Normal derivative of Phi at the observation point:

    ``-(i k / 4) H1(k r) (nx . (x - y)) / r``.
    """
    k = _kappa_value(kappa)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    nx = np.asarray(nx, dtype=float)
    d = x - y
    r = np.linalg.norm(d, axis=-1)
    if np.any(r == 0):
        raise CoincidentPoints("kernel undefined at x == y")
    dot = np.einsum("...i,...i->...", nx, d)
    out = -0.25j * k * hankel1(1, k * r) * dot / r
    return out if np.ndim(out) else complex(out)
