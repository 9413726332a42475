"""Smooth compactly supported cutoffs with exact support control.

Every cutoff is assembled from one base smoothstep, arranged so that
plateaus are exactly 1.0 and supports are exact in floating point:
outside its declared support a bump returns 0.0 rather than something
small. Telescoping partition identities then hold to rounding error.
"""

import numpy as np
from scipy import integrate, special

from .geometry import dist_to_cone

__all__ = [
    "smoothstep", "smoothstep_deriv", "taper", "taper_deriv", "psi",
    "psi_deriv", "mu_delta", "lp_annulus", "lp_annulus_radial",
    "coarse_scale_exponent", "schwartz_cap", "SchwartzCap",
    "angular_collar", "AngularCollar",
]


def _exp_bump(x):
    # exp(-1/x) on x > 0, zero elsewhere; never evaluates exp at x <= 0
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0.0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def _scalarize(out, *inputs):
    if all(np.ndim(v) == 0 for v in inputs):
        return float(np.asarray(out).reshape(()))
    return out


def smoothstep(x):
    """Monotone C-infinity step: 0 for x <= 0, 1 for x >= 1.

    Satisfies smoothstep(x) + smoothstep(1 - x) = 1, so the midpoint
    value is exactly 1/2.
    """
    x = np.asarray(x, dtype=float)
    a = _exp_bump(x)
    b = _exp_bump(1.0 - x)
    den = a + b
    # a + b > 0 on (0, 1); the where() guards only the clamped regions
    val = a / np.where(den == 0.0, 1.0, den)
    out = np.where(x <= 0.0, 0.0, np.where(x >= 1.0, 1.0, val))
    return _scalarize(out, x)


def smoothstep_deriv(x):
    """Exact derivative of smoothstep (zero outside (0, 1))."""
    x = np.asarray(x, dtype=float)
    inside = (x > 0.0) & (x < 1.0)
    xi = np.where(inside, x, 0.5)
    a = np.exp(-1.0 / xi)
    b = np.exp(-1.0 / (1.0 - xi))
    da = a / xi ** 2
    db = -b / (1.0 - xi) ** 2
    val = (da * b - a * db) / (a + b) ** 2
    out = np.where(inside, val, 0.0)
    return _scalarize(out, x)


def taper(t):
    """Smooth cut from 1 to 0 across [1/2, 1]: exactly 1 for t <= 1/2,
    exactly 0 for t >= 1."""
    t = np.asarray(t, dtype=float)
    out = 1.0 - smoothstep(2.0 * t - 1.0)
    return _scalarize(out, t)


def taper_deriv(t):
    t = np.asarray(t, dtype=float)
    out = -2.0 * smoothstep_deriv(2.0 * t - 1.0)
    return _scalarize(out, t)


def psi(t):
    """Dyadic band bump: support exactly [1/4, 1], value 1 at t = 1/2,
    and sum(psi(2^g t) over integer g) = 1 for every t > 0."""
    t = np.asarray(t, dtype=float)
    out = taper(t) - taper(2.0 * t)
    return _scalarize(out, t)


def psi_deriv(t):
    t = np.asarray(t, dtype=float)
    out = taper_deriv(t) - 2.0 * taper_deriv(2.0 * t)
    return _scalarize(out, t)


def mu_delta(r, delta):
    """Collar profile: supported on (1 - delta, 1), flat 1 on the middle
    third [1 - 2*delta/3, 1 - delta/3], derivatives of order k bounded
    by C_k * delta^(-k)."""
    if not 0.0 < delta <= 0.25:
        raise ValueError(f"delta must lie in (0, 1/4], got {delta}")
    r = np.asarray(r, dtype=float)
    s = (1.0 - r) / delta
    out = smoothstep(3.0 * s) * (1.0 - smoothstep(3.0 * s - 2.0))
    return _scalarize(out, r)


def coarse_scale_exponent(delta):
    """Smallest j0 with 2^j0 a power of two at least 2*ceil(1/delta)."""
    target = 2 * int(np.ceil(1.0 / delta))
    j0 = 0
    while (1 << j0) < target:
        j0 += 1
    return j0


def lp_annulus_radial(rho, j, delta):
    """Dyadic spatial cutoff as a function of the radius rho = |x|.

    For j > j0(delta) this is the annulus bump supported exactly in
    (2^(j-1), 2^(j+1)); at j = j0 it is the closed telescoped form of
    "one minus all finer annuli", a cap equal to 1 on {rho <= 2^j0}.
    """
    j0 = coarse_scale_exponent(delta)
    if j < j0:
        raise ValueError(f"j={j} below the coarse scale j0={j0}")
    rho = np.asarray(rho, dtype=float)
    if j == j0:
        out = taper(rho / 2.0 ** (j0 + 1))
    else:
        out = taper(rho / 2.0 ** (j + 1)) - taper(rho / 2.0 ** j)
    return _scalarize(out, rho)


def lp_annulus(x, j, delta):
    """Dyadic spatial cutoff at points x of shape (..., n)."""
    x = np.asarray(x, dtype=float)
    return lp_annulus_radial(np.sqrt(np.sum(x * x, axis=-1)), j, delta)


class SchwartzCap:
    """Normalized frequency cap and its inverse transform.

    The spectral side is c * taper(|xi| / rho), supported in the closed
    ball of radius rho, with c fixed so the full integral is 1; the
    physical side is then a rapidly decaying profile with value 1 at 0,
    evaluated on demand by radial quadrature.
    """

    def __init__(self, rho, dim=1):
        if not 0.0 < rho <= 1.0 / 64.0:
            raise ValueError(f"cap radius must lie in (0, 1/64], got {rho}")
        if dim not in (1, 2):
            raise ValueError("quadrature path implemented for dim 1 and 2")
        self.rho = float(rho)
        self.dim = int(dim)
        if dim == 1:
            mass, _ = integrate.quad(taper, 0.0, 1.0)
            mass *= 2.0 * rho
        else:
            mass, _ = integrate.quad(lambda s: taper(s) * s, 0.0, 1.0)
            mass *= 2.0 * np.pi * rho ** 2
        self._c = 1.0 / mass

    def hat(self, xi_norm):
        """Spectral profile at |xi| = xi_norm."""
        xi_norm = np.asarray(xi_norm, dtype=float)
        out = self._c * taper(np.abs(xi_norm) / self.rho)
        return _scalarize(out, xi_norm)

    def value(self, x_norm, nodes=4096):
        """Physical profile at |x| = x_norm by Gauss-Legendre quadrature
        of the radial inverse transform."""
        x = np.atleast_1d(np.asarray(x_norm, dtype=float))
        s, w = np.polynomial.legendre.leggauss(nodes)
        s = 0.5 * (s + 1.0) * self.rho
        w = 0.5 * self.rho * w
        prof = self._c * taper(s / self.rho)
        if self.dim == 1:
            ker = 2.0 * np.cos(2.0 * np.pi * np.outer(x, s))
        else:
            ker = 2.0 * np.pi * special.j0(2.0 * np.pi * np.outer(x, s)) * s
        out = ker @ (w * prof)
        return _scalarize(out, x_norm)


def schwartz_cap(rho, dim=1):
    """Build the (spectral, physical) cap pair at support radius rho."""
    cap = SchwartzCap(rho, dim)
    return cap.hat, cap.value


class AngularCollar:
    """Telescoping partition of frequency space by distance to the cone.

    Pieces live at dyadic distance scales 2^ell * delta up to
    2^ell_top ~ 1/10, beyond which the far piece (the exact complement)
    takes over, so the family sums to 1 pointwise by construction. The
    coarse piece sits at index 10 when the scale range allows it; for
    larger delta the ladder degenerates to coarse piece plus far piece
    at the top scale. Middle pieces exist only for delta roughly below
    2^-14.
    """

    def __init__(self, delta):
        if not 0.0 < delta <= 0.25:
            raise ValueError(f"delta must lie in (0, 1/4], got {delta}")
        self.delta = float(delta)
        # nearest power of two to 1/(10 delta)
        self.ell_top = int(np.rint(np.log2(1.0 / (10.0 * delta))))
        self.ell_coarse = min(10, self.ell_top)

    @property
    def ell_range(self):
        return range(self.ell_coarse + 1, self.ell_top + 1)

    def _dist(self, xi):
        return dist_to_cone(xi)

    # the *_at variants take precomputed cone distances, so large
    # lattices can be swept blockwise without stacking coordinates

    def coarse_at(self, dist):
        return taper(np.asarray(dist, dtype=float)
                     / (2.0 ** self.ell_coarse * self.delta))

    def piece_at(self, dist, ell):
        if not self.ell_coarse <= ell <= self.ell_top:
            raise ValueError(
                f"ell={ell} outside [{self.ell_coarse}, {self.ell_top}]")
        if ell == self.ell_coarse:
            return self.coarse_at(dist)
        d = np.asarray(dist, dtype=float)
        return (taper(d / (2.0 ** ell * self.delta))
                - taper(d / (2.0 ** (ell - 1) * self.delta)))

    def far_at(self, dist):
        return 1.0 - taper(np.asarray(dist, dtype=float)
                           / (2.0 ** self.ell_top * self.delta))

    def coarse(self, xi):
        return self.coarse_at(self._dist(xi))

    def piece(self, xi, ell):
        return self.piece_at(self._dist(xi), ell)

    def far(self, xi):
        return self.far_at(self._dist(xi))

    def partition_sum(self, xi):
        total = self.coarse(xi)
        for ell in self.ell_range:
            total = total + self.piece(xi, ell)
        return total + self.far(xi)


def angular_collar(delta):
    return AngularCollar(delta)
