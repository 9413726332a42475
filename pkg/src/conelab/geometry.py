"""Exact geometry of the truncated cone shell and its collar.

The reference surface is the set of points whose leading-block radius
equals the last coordinate, with that value running over [1, 2]. All
distance questions reduce to plane geometry for the pair
(radius, height) = (|x'|, x_n), so everything here is closed form.
"""

import numpy as np

SHELL_LO = 1.0
SHELL_HI = 2.0


def dist_to_cone(xi):
    """Euclidean distance from points to the truncated cone shell.

    Parameters
    ----------
    xi : array_like, shape (..., n)
        Points; the last axis holds coordinates, n >= 2. The shell is
        {|x'| = x_n, x_n in [1, 2]} with x' the first n-1 coordinates.

    Returns
    -------
    float or ndarray
        Exact distance, endpoints of the shell included.
    """
    xi = np.asarray(xi, dtype=float)
    r = np.sqrt(np.sum(xi[..., :-1] ** 2, axis=-1))
    return dist_to_cone_rh(r, xi[..., -1])


def dist_to_cone_rh(r, h, lo=SHELL_LO, hi=SHELL_HI):
    """Distance in the (radius, height) half-plane to the segment
    {r = h, h in [lo, hi]}, default [1, 2].

    Valid for r >= 0: rotational reduction maps the n-dimensional
    problem onto this plane without changing distances. Callers whose
    symbol occupies a wider height band than the trace shell pass the
    band endpoints, so on-support points always classify as near.
    """
    r = np.asarray(r, dtype=float)
    h = np.asarray(h, dtype=float)
    s = np.clip(0.5 * (r + h), lo, hi)
    d = np.hypot(r - s, h - s)
    return float(d) if d.ndim == 0 else d


def collar_height_window(r, delta):
    """Vertical slice of the open collar {dist < delta} at fixed radius.

    The collar is a stadium around a segment in the (radius, height)
    plane. Distance to a convex set is convex, so each slice is one
    interval. Empty slices come back with lo > hi.

    Returns
    -------
    (lo, hi) : ndarrays matching the shape of r.
    """
    r = np.asarray(r, dtype=float)
    lo = np.full(r.shape, np.inf)
    hi = np.full(r.shape, -np.inf)

    # band part: projection foot lands strictly inside the segment
    half = np.sqrt(2.0) * delta
    blo = np.maximum(2.0 * SHELL_LO - r, r - half)
    bhi = np.minimum(2.0 * SHELL_HI - r, r + half)
    ok = blo < bhi
    lo = np.where(ok, blo, lo)
    hi = np.where(ok, bhi, hi)

    # disk caps around the two segment endpoints
    for c in (SHELL_LO, SHELL_HI):
        gap2 = delta * delta - (r - c) ** 2
        ok = gap2 > 0.0
        root = np.sqrt(np.where(ok, gap2, 0.0))
        lo = np.where(ok, np.minimum(lo, c - root), lo)
        hi = np.where(ok, np.maximum(hi, c + root), hi)
    return lo, hi


def ring_radial_windows(b, g2, r_in, r_out):
    """Radii rho > 0 with r_in <= |x + rho*theta| <= r_out.

    Here b = x . theta (signed projection) and g2 = |x|^2 - b^2 >= 0
    (squared distance from the origin to the traversed line), so
    |x + rho*theta|^2 = (rho + b)^2 + g2.

    Returns
    -------
    (a1, b1, a2, b2) : ndarrays
        Up to two windows per input; empty windows satisfy a > b.
        The second window is empty unless the inner disk is pierced.
    """
    b = np.asarray(b, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    out2 = r_out * r_out - g2
    hit = out2 > 0.0
    so = np.sqrt(np.where(hit, out2, 0.0))
    in2 = r_in * r_in - g2
    pierce = in2 > 0.0
    si = np.sqrt(np.where(pierce, in2, 0.0))

    # outer window is [-b-so, -b+so]; remove the open inner core when pierced
    a1 = -b - so
    b1 = np.where(pierce, -b - si, -b + so)
    a2 = np.where(pierce, -b + si, 1.0)
    b2 = np.where(pierce, -b + so, 0.0)

    a1 = np.where(hit, np.maximum(a1, 0.0), 1.0)
    b1 = np.where(hit, b1, 0.0)
    a2 = np.where(hit, np.maximum(a2, 0.0), 1.0)
    b2 = np.where(hit, b2, 0.0)
    return a1, b1, a2, b2


def sphere_area(d):
    """Surface measure of the unit sphere S^d embedded in R^(d+1)."""
    from scipy.special import gamma
    return 2.0 * np.pi ** ((d + 1) / 2.0) / gamma((d + 1) / 2.0)
