"""Closed-form multiplier families on the frequency side.

Each family is a symbol descriptor that evaluates its analytic formula
at arbitrary points, with the anisotropic dilation xi -> (xi'/t, xi_n)
folded into the formula itself. Families whose symbol factors as
F(|xi'|/(t xi_n)) * G(xi_n) expose that radial profile so square
functions can integrate in t per frequency without any lattice work.

Symbols and conventions:

* q denotes |xi'|^2 / (t xi_n)^2 and u = 1 - q, the normalized gap to
  the cone; the smooth band selector is psi(xi_n / 2), supported in
  xi_n in [1/2, 2].
* The full cone symbol u_+^lambda is 0-homogeneous and two-sided in
  xi_n. On the axis xi' = 0 it extends by its limit 1, including at
  the origin, keeping exact homogeneity along rays.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .bumps import mu_delta, psi, psi_deriv, taper

FAMILIES = (
    "cone-full",
    "cone-localized",
    "angular-dyadic",
    "angular-dyadic-grad",
    "delta-collar",
    "band-psi",
    "cap-phi",
)


@dataclass(frozen=True)
class RadialProfile:
    """Factorization m(xi'/t, xi_n) = F(|xi'|/(t xi_n)) * G(xi_n).

    s_lo/s_hi bound the support of F; vanishes_at_zero records whether
    F(0) = 0, which decides if the t-integral over (0, inf) converges.
    """
    F: Callable
    s_lo: float
    s_hi: float
    G: Callable
    vanishes_at_zero: bool


def _pos_pow(u, lam):
    return np.where(u > 0.0, np.power(np.clip(u, 0.0, None), lam), 0.0)


def _band(h):
    return psi(np.asarray(h, dtype=float) / 2.0)


@dataclass(frozen=True)
class MultiplierSpec:
    """Descriptor of one multiplier family; use the module constructors."""
    family: str
    lam: float = 0.0
    gamma: int = 0
    delta: float = 0.0
    k: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")

    # -- evaluation ---------------------------------------------------

    def values_on_axes(self, axes, t=1.0):
        """Evaluate on an open coordinate mesh (one array per axis)."""
        r2 = 0.0
        for a in axes[:-1]:
            r2 = r2 + a * a
        return self._eval_r2h(r2, axes[-1], t)

    def values(self, points, t=1.0):
        """Evaluate at points of shape (..., n)."""
        pts = np.asarray(points, dtype=float)
        r2 = np.sum(pts[..., :-1] ** 2, axis=-1)
        return self._eval_r2h(r2, pts[..., -1], t)

    def _eval_r2h(self, r2, h, t):
        fam = self.family
        r2 = np.asarray(r2, dtype=float)
        h = np.asarray(h, dtype=float)
        if fam == "cap-phi":
            return taper(np.sqrt(r2) / t)
        if fam == "band-psi":
            out = psi(h / 2.0 ** (self.k + 1))
            return np.broadcast_to(out, np.broadcast_shapes(r2.shape, h.shape)).copy()

        zero_h = h == 0.0
        hsafe = np.where(zero_h, 1.0, h)
        q = r2 / (t * t * hsafe * hsafe)
        u = 1.0 - q

        if fam == "cone-full":
            val = _pos_pow(u, self.lam)
            axis_val = np.where(r2 == 0.0, 1.0, 0.0)
            return np.where(zero_h, axis_val, val)

        band = _band(h)
        if fam == "cone-localized":
            val = _pos_pow(u, self.lam) * band
        elif fam == "angular-dyadic":
            g = self.gamma
            if g == 0:
                val = _pos_pow(u, self.lam) * (1.0 - taper(2.0 * u)) * band
            else:
                val = (2.0 ** (g * self.lam) * psi(2.0 ** g * u)
                       * _pos_pow(u, self.lam) * band)
        elif fam == "angular-dyadic-grad":
            val = self._grad_val(q, u, band)
        elif fam == "delta-collar":
            val = mu_delta(np.sqrt(q), self.delta) * band
        else:  # pragma: no cover
            raise AssertionError(fam)
        return np.where(zero_h, 0.0, val)

    def _grad_val(self, q, u, band):
        g, lam = self.gamma, self.lam
        # supp psi(2^g u) keeps u >= 2^(-g-2), so u^(lam-1) is safe there
        on = (u > 2.0 ** (-g - 2) * 0.5) & (u < 2.0 ** -g * 2.0)
        usafe = np.where(on, u, 1.0)
        inner = (2.0 ** g * psi_deriv(2.0 ** g * usafe) * np.power(usafe, lam)
                 + lam * psi(2.0 ** g * usafe) * np.power(usafe, lam - 1.0))
        val = -(2.0 ** (1 - g)) * q * 2.0 ** (g * lam) * inner * band
        return np.where(on, val, 0.0)

    # -- geometry -----------------------------------------------------

    def support_box(self, t=1.0):
        """Per-axis support bounds (prime-block radius, band edge);
        None marks an unbounded direction."""
        fam = self.family
        if fam == "cone-full":
            return None, None
        if fam == "band-psi":
            return None, 2.0 ** (self.k + 1)
        if fam == "cap-phi":
            return t, None
        return 2.0 * t, 2.0

    @property
    def collar_delta(self):
        return self.delta if self.family == "delta-collar" else None

    def support_contains(self, points, t=1.0):
        """Exact closed support membership (True on the closure)."""
        pts = np.asarray(points, dtype=float)
        r2 = np.sum(pts[..., :-1] ** 2, axis=-1)
        h = pts[..., -1]
        fam = self.family
        if fam == "cap-phi":
            return r2 <= (t * t)
        if fam == "band-psi":
            c = 2.0 ** (self.k + 1)
            return (h >= c / 4.0) & (h <= c)
        if fam == "cone-full":
            return r2 <= h * h * t * t
        in_band = (h >= 0.5) & (h <= 2.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(h > 0.0, r2 / (t * t * h * h), np.inf)
        u = 1.0 - q
        if fam == "cone-localized":
            return in_band & (u >= 0.0)
        if fam == "delta-collar":
            s = np.sqrt(q)
            return in_band & (s >= 1.0 - self.delta) & (s <= 1.0)
        g = self.gamma
        if g == 0:
            return in_band & (u >= 0.25)
        return in_band & (u >= 2.0 ** (-g - 2)) & (u <= 2.0 ** -g)

    # -- square-function profile ---------------------------------------

    def radial_profile(self) -> Optional[RadialProfile]:
        fam, lam, g = self.family, self.lam, self.gamma
        band = _band
        if fam == "delta-collar":
            d = self.delta
            return RadialProfile(lambda s: mu_delta(s, d),
                                 1.0 - d, 1.0, band, True)
        if fam == "cone-localized":
            return RadialProfile(lambda s: _pos_pow(1.0 - s * s, lam),
                                 0.0, 1.0, band, False)
        if fam == "angular-dyadic":
            if g == 0:
                def F(s):
                    u = 1.0 - s * s
                    return _pos_pow(u, lam) * (1.0 - taper(2.0 * u))
                return RadialProfile(F, 0.0, np.sqrt(0.75), band, False)

            def F(s):
                u = 1.0 - np.asarray(s, dtype=float) ** 2
                return 2.0 ** (g * lam) * psi(2.0 ** g * u) * _pos_pow(u, lam)
            return RadialProfile(F, np.sqrt(1.0 - 2.0 ** -g),
                                 np.sqrt(1.0 - 2.0 ** (-g - 2)), band, True)
        if fam == "angular-dyadic-grad":
            def F(s):
                s = np.asarray(s, dtype=float)
                q = s * s
                u = 1.0 - q
                on = (u > 2.0 ** (-g - 2) * 0.5) & (u < 2.0 ** -g * 2.0)
                usafe = np.where(on, u, 1.0)
                inner = (2.0 ** g * psi_deriv(2.0 ** g * usafe)
                         * np.power(usafe, lam)
                         + lam * psi(2.0 ** g * usafe)
                         * np.power(usafe, lam - 1.0))
                val = -(2.0 ** (1 - g)) * q * 2.0 ** (g * lam) * inner
                return np.where(on, val, 0.0)
            return RadialProfile(F, np.sqrt(1.0 - 2.0 ** -g),
                                 np.sqrt(1.0 - 2.0 ** (-g - 2)), band, True)
        return None


# -- constructors -----------------------------------------------------

def cone_full(lam):
    """0-homogeneous cone symbol u_+^lambda, two-sided in xi_n."""
    _check_lambda(lam)
    return MultiplierSpec(family="cone-full", lam=float(lam))


def cone_localized(lam):
    """Cone symbol localized to the smooth band xi_n in [1/2, 2]."""
    _check_lambda(lam)
    return MultiplierSpec(family="cone-localized", lam=float(lam))


def angular_dyadic(gamma, lam):
    """Renormalized angular piece at gap scale 2^-gamma (gamma = 0 is
    the coarse piece covering the region away from the cone)."""
    _check_lambda(lam)
    if gamma < 0 or int(gamma) != gamma:
        raise ValueError(f"gamma must be a nonnegative integer, got {gamma}")
    return MultiplierSpec(family="angular-dyadic", lam=float(lam),
                          gamma=int(gamma))


def angular_dyadic_grad(gamma, lam):
    """Scaled radial-gradient companion of the angular piece."""
    _check_lambda(lam)
    if gamma < 1 or int(gamma) != gamma:
        raise ValueError(f"gamma must be a positive integer, got {gamma}")
    return MultiplierSpec(family="angular-dyadic-grad", lam=float(lam),
                          gamma=int(gamma))


def delta_collar(delta):
    """Collar symbol: smooth indicator of |xi'|/xi_n in (1-delta, 1)
    against the band selector."""
    if not 0.0 < delta <= 0.25:
        raise ValueError(f"delta must lie in (0, 1/4], got {delta}")
    return MultiplierSpec(family="delta-collar", delta=float(delta))


def band_psi(k):
    """Smooth dyadic band selector psi(xi_n / 2^(k+1))."""
    return MultiplierSpec(family="band-psi", k=int(k))


def cap_phi():
    """Low-pass cap in xi' alone: taper(|xi'| / t)."""
    return MultiplierSpec(family="cap-phi")


def _check_lambda(lam):
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")


# -- reconstruction ---------------------------------------------------

def reconstruct_residual(points, lam, gamma_max, t=1.0):
    """|coarse + sum of weighted angular pieces - localized symbol| by
    direct summation of the family evaluations.

    The telescoping design makes this exactly zero wherever the
    normalized gap u is at least 2^(-gamma_max - 1).
    """
    pts = np.asarray(points, dtype=float)
    total = angular_dyadic(0, lam).values(pts, t)
    for g in range(1, gamma_max + 1):
        total = total + 2.0 ** (-g * lam) * angular_dyadic(g, lam).values(pts, t)
    target = cone_localized(lam).values(pts, t)
    return np.abs(total - target)
