"""Four-way weighted splits and block orthogonality measurements.

split_four factors a field against a band-limited cap pair, one cap in
the prime coordinates and one in the last, into four parts that sum
back to the field exactly.  choose_exponents picks a weight exponent
pair per part from the selection windows at a given integrability p,
staying under the exponent-sum budget.  ortho_ratio measures how close
the annulus-band pieces of a field come to an orthogonal family in a
weighted norm; block_sum_ratio measures the dual direction for
externally supplied blocks.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .bumps import SchwartzCap, psi, taper
from .errors import InfeasibleError
from .grid import Field, Spectrum, forward_transform, inverse_transform
from .weights import WeightParams, lp_norm, weighted_norm

__all__ = [
    "EDGE_INSET",
    "ExponentSelection",
    "FourSplit",
    "SplitNormReport",
    "block_sum_ratio",
    "choose_exponents",
    "exponent_windows",
    "ortho_block",
    "ortho_ratio",
    "split_four",
    "split_norm_report",
]

# Open window endpoints are approached no closer than this; a budget
# that does not leave room for the inset is reported as infeasible.
EDGE_INSET = 1e-6


def _check_p(p):
    if not (math.isfinite(p) and p >= 2.0):
        raise ValueError(f"p must lie in [2, inf), got {p}")


def _window_table(p, n):
    # Per part: ((alpha_lo, alpha_hi, lo_open), (beta_lo, beta_hi, lo_open)).
    # Upper endpoints are always open. Part 1 is pinned to (0, 0).
    tp = 1.0 - 2.0 / p
    sg = (n - 1) * tp
    return (
        ((0.0, 0.0, False), (0.0, 0.0, False)),
        ((sg, 1.0 + sg, True), (0.0, tp, False)),
        ((0.0, sg, False), (tp, 1.0 + tp, True)),
        ((sg, 1.0 + sg, True), (tp, 1.0 + tp, True)),
    )


def exponent_windows(p, n):
    """Numeric endpoints of the four selection windows at this p.

    Returned as ((alpha_lo, alpha_hi), (beta_lo, beta_hi)) per part.
    Lower endpoints are attained only where the table marks them
    closed: the alpha windows of parts 1 and 3 and the beta windows of
    parts 1 and 2.  A closed window with zero width degenerates to the
    single point at its endpoint.
    """
    _check_p(p)
    if n < 2:
        raise ValueError("windows need at least one prime coordinate")
    return tuple(((aw[0], aw[1]), (bw[0], bw[1]))
                 for aw, bw in _window_table(p, n))


@dataclass(frozen=True)
class ExponentSelection:
    """Chosen exponent pairs, the windows they came from, and the
    exponent-sum budget they satisfy."""
    parts: Tuple[WeightParams, ...]
    windows: tuple
    budget: float


def _floor_and_mid(lo, hi, lo_open):
    if hi <= lo:
        # degenerate closed window, the single admissible point is lo
        return lo, lo
    return (lo + EDGE_INSET if lo_open else lo), 0.5 * (lo + hi)


def _pick_pair(awin, bwin, budget, part):
    fa, ma = _floor_and_mid(*awin)
    fb, mb = _floor_and_mid(*bwin)
    if ma + mb < budget:
        return ma, mb
    # midpoints overshoot: land halfway between the floor sum and the
    # budget, splitting the slack in proportion to each midpoint's
    # distance from its floor so both picks stay inside their windows
    goal = 0.5 * (fa + fb + budget)
    wa, wb = ma - fa, mb - fb
    if wa + wb <= 0.0:
        return fa, fb
    slack = goal - (fa + fb)
    return fa + slack * wa / (wa + wb), fb + slack * wb / (wa + wb)


def choose_exponents(p, eps, n):
    """Select one weight exponent pair per part at integrability p.

    Picks window midpoints when they fit, otherwise scales toward the
    lower edges until every pair's exponent sum falls below
    n*(1 - 2/p) + eps.  Raises InfeasibleError naming the binding part
    when eps leaves no room above the window floors.
    """
    _check_p(p)
    if not 0.0 < eps <= 0.5:
        raise ValueError(f"eps must lie in (0, 1/2], got {eps}")
    if n < 2:
        raise ValueError("selection needs at least one prime coordinate")
    budget = n * (1.0 - 2.0 / p) + eps
    table = _window_table(p, n)
    floors = [_floor_and_mid(*aw)[0] + _floor_and_mid(*bw)[0]
              for aw, bw in table]
    if max(floors) >= budget:
        worst = max(range(1, 4), key=lambda i: floors[i])
        aw, bw = table[worst]
        raise InfeasibleError(
            f"part {worst + 1}: smallest admissible exponent sum "
            f"{floors[worst]:.8g} does not fall below the budget "
            f"{budget:.8g} (floors alpha >= {_floor_and_mid(*aw)[0]:.8g}, "
            f"beta >= {_floor_and_mid(*bw)[0]:.8g})")
    parts = [WeightParams(0.0, 0.0)]
    for i, (aw, bw) in enumerate(table[1:], start=2):
        a, b = _pick_pair(aw, bw, budget, i)
        parts.append(WeightParams(a, b))
    windows = tuple(((aw[0], aw[1]), (bw[0], bw[1])) for aw, bw in table)
    return ExponentSelection(tuple(parts), windows, budget)


@dataclass(frozen=True)
class FourSplit:
    """The four cap-split parts of a field, their assigned weight
    exponents, the cap radius, and each part's spectrum."""
    parts: Tuple[Field, ...]
    exponents: Tuple[WeightParams, ...]
    rho: float
    spectra: tuple


def _cap_on_radii(cap, radii, chunk=2048):
    # normalized by the center value so the profile is exactly 1 at 0,
    # which keeps the split parts exact at the origin
    r = np.asarray(radii, dtype=float).ravel()
    out = np.empty(r.size)
    for a in range(0, r.size, chunk):
        out[a:a + chunk] = cap.value(r[a:a + chunk])
    out /= cap.value(0.0)
    return out.reshape(np.shape(radii))


def split_four(f, rho, exponents=None):
    """Split f into four parts against caps of spectral radius rho.

    The prime-coordinate cap and the last-coordinate cap each split the
    field into a near piece and a far piece; the four products sum back
    to f exactly, with no transforms involved.  Part 1 carries both
    near factors, part 2 the far prime factor, part 3 the far last
    factor, part 4 both far factors.  With one coordinate there is no
    prime block and parts 2 and 4 vanish identically.
    """
    g = f.grid
    if not 0.0 < rho <= 2.0 ** -6:
        raise ValueError(f"cap radius must lie in (0, 2^-6], got {rho}")
    if g.n > 3:
        raise ValueError("prime cap evaluation covers n <= 3")
    ax = g.sample_axis()
    last = _cap_on_radii(SchwartzCap(rho, dim=1), np.abs(ax))
    if g.n == 1:
        a = 1.0
    elif g.n == 2:
        a = _cap_on_radii(SchwartzCap(rho, dim=1), np.abs(ax))[:, None]
    else:
        rr = np.hypot(ax[:, None], ax[None, :])
        a = _cap_on_radii(SchwartzCap(rho, dim=2), rr)[:, :, None]
    b = last
    masks = (a * b, (1.0 - a) * b, a * (1.0 - b), (1.0 - a) * (1.0 - b))
    fields = tuple(Field(grid=g, values=f.values * m) for m in masks)
    if exponents is None:
        exponents = (WeightParams(0.0, 0.0),) * 4
    exponents = tuple(exponents)
    if len(exponents) != 4:
        raise ValueError("exactly four exponent pairs are required")
    if exponents[0] != WeightParams(0.0, 0.0):
        raise ValueError("the first part carries the flat weight")
    spectra = tuple(forward_transform(q) for q in fields)
    return FourSplit(fields, exponents, float(rho), spectra)


@dataclass(frozen=True)
class SplitNormReport:
    """Weighted norms of the four parts against the plain Lp norm of
    the whole field."""
    p: float
    lp: float
    weighted: Tuple[float, ...]
    ratios: Tuple[float, ...]


def split_norm_report(s, f, p):
    lp = lp_norm(f, p)
    if lp == 0.0:
        raise ValueError("zero field has no norm ratios")
    weighted = tuple(weighted_norm(q, w)
                     for q, w in zip(s.parts, s.exponents))
    return SplitNormReport(float(p), lp, weighted,
                           tuple(v / lp for v in weighted))


def _unit_annulus(u):
    # radial profile supported on (1/2, 2), equal to 1 at 1; its dyadic
    # dilates telescope to a partition of unity away from the origin
    u = np.asarray(u, dtype=float)
    return taper(0.5 * u) - taper(u)


def _prime_norm(axes):
    r2 = 0.0
    for a in axes[:-1]:
        r2 = r2 + a * a
    return np.sqrt(r2)


def _block_mask(grid, k, ell):
    axes = grid.freq_axes()
    r = _prime_norm(axes)
    return _unit_annulus(r / 2.0 ** (k + ell)) * psi(axes[-1] / 2.0 ** ell)


def ortho_block(f, k, ell):
    """One annulus-band piece of f: prime radius near 2^(k+ell), last
    frequency in the dyadic band at 2^ell."""
    if f.grid.n < 2:
        raise ValueError("pieces need at least one prime coordinate")
    fh = forward_transform(f)
    mask = _block_mask(f.grid, k, ell)
    return inverse_transform(Spectrum(f.grid, fh.coeffs * mask))


def ortho_ratio(f, w, k_range, ell_range):
    """Energy of the annulus-band pieces of f against the energy of f,
    both in the weighted norm.

    A ratio near 1 means the family behaves like an orthogonal
    decomposition under this weight; boundedness across fields is the
    measurable property.
    """
    g = f.grid
    if g.n < 2:
        raise ValueError("pieces need at least one prime coordinate")
    if not w.admissible_a2(g.n):
        raise ValueError(f"weight {w} sits outside the A2 window at n={g.n}")
    den = weighted_norm(f, w) ** 2
    if den == 0.0:
        raise ValueError("zero field has no energy ratio")
    fh = forward_transform(f)
    total = 0.0
    for ell in ell_range:
        for k in k_range:
            mask = _block_mask(g, k, ell)
            piece = inverse_transform(Spectrum(g, fh.coeffs * mask))
            total += weighted_norm(piece, w) ** 2
    return total / den


def block_sum_ratio(blocks, w):
    """Weighted energy of the sum of the blocks against the sum of
    their weighted energies; the dual direction to ortho_ratio."""
    blocks = list(blocks)
    if not blocks:
        raise ValueError("needs at least one block")
    g = blocks[0].grid
    acc = np.zeros((g.N,) * g.n, dtype=complex)
    total = 0.0
    for q in blocks:
        if q.grid != g:
            raise ValueError("blocks live on different grids")
        acc = acc + q.values
        total += weighted_norm(q, w) ** 2
    if total == 0.0:
        raise ValueError("all blocks are zero")
    return weighted_norm(Field(grid=g, values=acc), w) ** 2 / total
