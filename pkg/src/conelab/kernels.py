"""Physical-space collar kernels and their decay diagnostics.

The collar symbol's inverse transform is a kernel concentrated near
unit scale; everything here slices it. Dyadic spatial pieces isolate
the kernel at radius 2^j, angular frequency factors isolate dyadic
distance bands around the cone, and a reduced Bessel quadrature
evaluates the smooth-multiplier kernel far outside any box a lattice
could hold. Sweep helpers fit log-log decay slopes against the scale
variables.

Synthesis resolution: kernels are built once the frequency step is at
most an eighth of the collar width, a looser rule than the generic
mask evaluator enforces, so the constructors check it themselves and
evaluate the symbol directly.

The collar kernel is complex. Its band selector is one-sided in the
last frequency axis, which makes the kernel a Hilbert pair in the last
coordinate: the imaginary part carries the same weight as the real
part, and the testable symmetries are evenness in the prime block and
conjugate symmetry under flipping the last coordinate.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
import scipy.fft as sfft
from scipy import special

from .bumps import (angular_collar, coarse_scale_exponent, lp_annulus_radial,
                    psi, taper)
from .errors import GeometryError, ResolutionError
from .geometry import dist_to_cone_rh
from .grid import (Field, Grid, Spectrum, forward_transform,
                   inverse_transform, make_grid)
from .multipliers import delta_collar
from .operators import collar_tgrid, required_count

__all__ = [
    "KERNEL_RESOLUTION_FACTOR", "FAR_PIECE",
    "KernelPiece", "ShellSup", "CubeLattice",
    "kernel_Kdelta", "kernel_piece", "kernel_tail_mass",
    "offcone_spectrum_sup", "region_partition",
    "decay_grid", "piece_sup_sweep", "shell_sup_sweep",
    "kernel_Klambda", "klambda_ray_envelope",
    "piece_square_fields", "wedge_mode_points", "weighted_square_ratio",
    "loglog_slope",
]

# kernel synthesis needs the lattice to resolve the collar width
KERNEL_RESOLUTION_FACTOR = 8.0

# marker for the residual angular factor beyond the last dyadic band
FAR_PIECE = math.inf

# cone-distance classifier segment: the full height band the collar
# symbol occupies, wider than the trace shell's [1, 2]
_SEG = dict(lo=0.5, hi=2.0)

_ROW_BLOCK = 256


def _row_blocks(total, block=_ROW_BLOCK):
    for lo in range(0, total, block):
        yield lo, min(lo + block, total)


def _collar_mask(grid, delta, t=1.0):
    """Collar symbol samples on the dual lattice under the kernel rule
    1/L <= delta/8, bypassing the stricter generic mask guard."""
    if t <= 0:
        raise ValueError(f"dilation parameter must be positive, got {t}")
    mspec = delta_collar(delta)
    tol = 1e-12
    if grid.freq_step > delta / KERNEL_RESOLUTION_FACTOR * (1.0 + tol):
        raise ResolutionError(
            f"kernel synthesis at collar width {delta:g} needs frequency "
            f"step <= {delta / KERNEL_RESOLUTION_FACTOR:g}, grid has "
            f"{grid.freq_step:g}")
    prime_bound, last_bound = mspec.support_box(t)
    if max(prime_bound, last_bound) > grid.nyquist * (1.0 + tol):
        raise ResolutionError(
            f"collar support box ({prime_bound:g}, {last_bound:g}) exceeds "
            f"the Nyquist frequency {grid.nyquist:g}")
    return mspec.values_on_axes(grid.freq_axes(), t)


def kernel_Kdelta(grid, delta):
    """Collar kernel: inverse transform of the collar symbol.

    Complex-valued (see the module note); zero mean because the symbol
    vanishes at the origin.
    """
    mask = _collar_mask(grid, delta)
    return inverse_transform(Spectrum(grid=grid, coeffs=mask))


def _scaled_radius_sq(axes, t, lo, hi):
    # anisotropic radius: prime axes carry the dilation, the last does not
    lead = t * axes[0].ravel()[lo:hi] if len(axes) > 1 else axes[0].ravel()[lo:hi]
    r2 = lead.reshape((-1,) + (1,) * (len(axes) - 1)) ** 2
    for a in axes[1:-1]:
        r2 = r2 + (t * a) ** 2
    if len(axes) > 1:
        r2 = r2 + axes[-1] ** 2
    return r2


def _prime_radius_sq(axes, lo, hi):
    # squared prime-block radius, blockwise over the leading axis
    if len(axes) == 1:
        return np.zeros((hi - lo,) + (1,) * 0)
    lead = axes[0].ravel()[lo:hi]
    r2 = lead.reshape((-1,) + (1,) * (len(axes) - 1)) ** 2
    for a in axes[1:-1]:
        r2 = r2 + a * a
    return r2


def _piece_values(grid, j, delta, t=1.0):
    """Writable samples of the t-dilated dyadic piece: the dilated
    collar kernel times the annulus at the anisotropically scaled
    radius. Blockwise so large lattices never hold a second full copy."""
    kd = inverse_transform(Spectrum(grid=grid, coeffs=_collar_mask(grid, delta, t)))
    vals = np.array(kd.values)
    del kd
    ax = grid.sample_axes()
    for lo, hi in _row_blocks(grid.N):
        r2 = _scaled_radius_sq(ax, t, lo, hi)
        vals[lo:hi] *= lp_annulus_radial(np.sqrt(r2), j, delta)
    return vals


@dataclass(frozen=True)
class KernelPiece:
    """One dyadic piece of the collar kernel, both representations.

    ell is None for the plain spatial piece, a dyadic band index for an
    angular frequency factor, or FAR_PIECE for the residual factor; t
    records the dilation the piece was built at.
    """
    j: int
    ell: Optional[float]
    delta: float
    t: float
    field: Field
    spectrum: Spectrum


def _angular_factor(grid, delta, ell, t):
    col = angular_collar(delta)
    fax = grid.freq_axes()
    r2 = _prime_radius_sq(fax, 0, grid.N)
    dist = dist_to_cone_rh(np.sqrt(r2) / t, fax[-1])
    if ell == FAR_PIECE:
        return col.far_at(dist)
    return col.piece_at(dist, int(ell))


def kernel_piece(grid, j, delta, ell=None, t=1.0):
    """Build one dyadic piece of the collar kernel on the grid.

    The spatial factor is the dyadic annulus at scale 2^j (the
    telescoped cap at the coarse scale); when ell is given the spectrum
    is additionally multiplied by the angular band factor at dyadic
    cone distance 2^ell times the collar width, FAR_PIECE selecting the
    residual beyond the last band.
    """
    j0 = coarse_scale_exponent(delta)
    if j < j0:
        raise ValueError(f"j={j} below the coarse scale j0={j0}")
    if 2.0 ** (j + 1) > grid.L / 2.0:
        raise GeometryError(
            f"piece extent 2^{j + 1} does not fit half the box {grid.L / 2:g}")
    vals = _piece_values(grid, j, delta, t)
    field = Field(grid=grid, values=vals)
    spectrum = forward_transform(field)
    if ell is not None:
        coeffs = spectrum.coeffs * _angular_factor(grid, delta, ell, t)
        spectrum = Spectrum(grid=grid, coeffs=coeffs)
        field = inverse_transform(spectrum)
    return KernelPiece(j=int(j), ell=ell, delta=float(delta), t=float(t),
                       field=field, spectrum=spectrum)


def _ladder_top(grid):
    # largest piece scale the box holds: 2^(jmax+1) <= L/2
    return int(math.floor(math.log2(grid.L / 4.0) + 1e-9))


def kernel_tail_mass(grid, delta, jmax=None):
    """Integral of |K|^2 over the part of the collar kernel the dyadic
    ladder up to jmax does not reproduce (the cap complement)."""
    if jmax is None:
        jmax = _ladder_top(grid)
    kd = kernel_Kdelta(grid, delta)
    ax = grid.sample_axes()
    total = 0.0
    for lo, hi in _row_blocks(grid.N):
        r2 = _scaled_radius_sq(ax, 1.0, lo, hi)
        cap = taper(np.sqrt(r2) / 2.0 ** (jmax + 1))
        total += float(np.sum(np.abs(kd.values[lo:hi]) ** 2 * (1.0 - cap) ** 2))
    return total * grid.cell_volume


@dataclass(frozen=True)
class ShellSup:
    """Supremum of a spectrum over one cone-distance shell; points
    counts the lattice sites probed, zero flagging an empty shell."""
    value: float
    points: int

    @property
    def empty(self):
        return self.points == 0

    def __float__(self):
        return self.value


def _shell_sup(s, delta, ell, t=1.0):
    g = s.grid
    fax = g.freq_axes()
    best = 0.0
    points = 0
    for lo, hi in _row_blocks(g.N):
        blk = np.abs(s.coeffs[lo:hi])
        if ell == -1:
            sel = None
        else:
            r2 = _prime_radius_sq(fax, lo, hi)
            dist = dist_to_cone_rh(np.sqrt(r2) / t, fax[-1])
            if ell == FAR_PIECE:
                sel = dist >= 0.5
            else:
                sel = ((dist >= 2.0 ** ell * delta)
                       & (dist < 2.0 ** (ell + 1) * delta))
        if sel is None:
            best = max(best, float(blk.max()))
            points += blk.size
        else:
            hit = int(np.count_nonzero(sel))
            if hit:
                best = max(best, float(blk[sel].max()))
                points += hit
    if points == 0:
        return ShellSup(value=math.nan, points=0)
    return ShellSup(value=best, points=points)


def offcone_spectrum_sup(piece, ell_probe):
    """Sup of |spectrum| of a piece over one dyadic cone-distance shell.

    ell_probe -1 probes the whole lattice, FAR_PIECE the region at
    distance >= 1/2, an integer the shell [2^ell, 2^(ell+1)) times the
    collar width. Distances are taken at the piece's own dilation.
    """
    return _shell_sup(piece.spectrum, piece.delta, ell_probe, piece.t)


def decay_grid(j, n=2):
    """Grid sized for one dyadic piece: box 2^(j+2), Nyquist exactly at
    the collar band edge."""
    return make_grid(n, 2 ** (j + 4), float(2 ** (j + 2)))


def _streamed_shell_sups(grid, j, delta, probes):
    """Shell sups of one piece's spectrum, sweep path.

    Builds the collar coefficients directly in transform storage order
    with the half-box sign folded into the fill, runs both transforms
    in place, and probes the shells blockwise: the peak never holds
    more than two full-size arrays. Matches the dense route exactly,
    the scalar factors of the two transforms cancel.
    """
    N, n = grid.N, grid.n
    mint = np.fft.fftfreq(N, 1.0 / N).astype(int)
    fax = mint / grid.L
    sign = np.where(mint & 1, -1.0, 1.0)
    rest = [fax.reshape((1,) * a + (N,) + (1,) * (n - 1 - a))
            for a in range(1, n)]
    srest = 1.0
    for a in range(1, n):
        srest = srest * sign.reshape((1,) * a + (N,) + (1,) * (n - 1 - a))
    mspec = delta_collar(delta)
    if grid.freq_step > delta / KERNEL_RESOLUTION_FACTOR * (1.0 + 1e-12):
        raise ResolutionError(
            f"kernel synthesis at collar width {delta:g} needs frequency "
            f"step <= {delta / KERNEL_RESOLUTION_FACTOR:g}, grid has "
            f"{grid.freq_step:g}")
    c = np.empty((N,) * n, dtype=complex)
    for lo, hi in _row_blocks(N):
        lead = fax[lo:hi].reshape((-1,) + (1,) * (n - 1))
        blk = mspec.values_on_axes([lead] + rest, 1.0) * srest
        blk *= sign[lo:hi].reshape((-1,) + (1,) * (n - 1))
        c[lo:hi] = blk
    c = sfft.ifftn(c, overwrite_x=True)
    ax = grid.sample_axes()
    for lo, hi in _row_blocks(N):
        r2 = _scaled_radius_sq(ax, 1.0, lo, hi)
        c[lo:hi] *= lp_annulus_radial(np.sqrt(r2), j, delta)
    c = sfft.fftn(c, overwrite_x=True)
    best = {ell: 0.0 for ell in probes}
    points = {ell: 0 for ell in probes}
    for lo, hi in _row_blocks(N):
        blk = np.abs(c[lo:hi])
        lead = fax[lo:hi].reshape((-1,) + (1,) * (n - 1))
        r2p = lead * lead
        for a in rest[:-1]:
            r2p = r2p + a * a
        dist = dist_to_cone_rh(np.sqrt(r2p), rest[-1]) if n > 1 else None
        for ell in probes:
            if ell == -1:
                best[ell] = max(best[ell], float(blk.max()))
                points[ell] += blk.size
                continue
            if ell == FAR_PIECE:
                sel = dist >= 0.5
            else:
                sel = ((dist >= 2.0 ** ell * delta)
                       & (dist < 2.0 ** (ell + 1) * delta))
            sel = np.broadcast_to(sel, blk.shape)
            hit = int(np.count_nonzero(sel))
            if hit:
                best[ell] = max(best[ell], float(blk[sel].max()))
                points[ell] += hit
    return {ell: ShellSup(value=(best[ell] if points[ell] else math.nan),
                          points=points[ell]) for ell in probes}


def piece_sup_sweep(delta, j_list=None, n=2, count=4):
    """Global spectrum sup of the dyadic pieces across scales, each on
    its own grid; returns (j, 2^j * delta, sup) triples."""
    j0 = coarse_scale_exponent(delta)
    if j_list is None:
        j_list = range(j0, j0 + count)
    out = []
    for j in j_list:
        sup = _streamed_shell_sups(decay_grid(j, n), j, delta, [-1])[-1]
        out.append((int(j), 2.0 ** j * delta, sup.value))
    return out


def shell_sup_sweep(delta, j=None, ell_probes=range(2, 7), n=2):
    """Shell sups of one piece's spectrum across dyadic cone distances;
    returns (ell, 2^ell, ShellSup) triples."""
    j0 = coarse_scale_exponent(delta)
    if j is None:
        j = j0 + 2
    grid = decay_grid(j, n)
    sups = _streamed_shell_sups(grid, j, delta, list(ell_probes))
    return [(int(ell), 2.0 ** ell, sups[ell]) for ell in ell_probes]


# -- cube partition and regions -------------------------------------------

def _classify_regions(idx, n):
    idx = np.asarray(idx)
    thr = 10 * n
    prime = idx[..., :-1].astype(float)
    ip = np.sqrt(np.sum(prime * prime, axis=-1))
    ilast = np.abs(idx[..., -1])
    big_p = ip >= thr
    big_n = ilast >= thr
    return np.where(big_p & big_n, 1,
                    np.where(big_p, 2, np.where(big_n, 4, 3)))


@dataclass(frozen=True)
class CubeLattice:
    """Partition of the box into cubes of side ~c1 2^j with the
    four-region index classifier; counts tally cubes per region."""
    grid: Grid
    j: int
    c1: float
    side: float
    count: int
    counts: dict

    def index_of(self, x):
        """Wrapped cube index of physical points, shape (..., n); cells
        on a cube boundary belong to the upper neighbor."""
        i = np.floor(np.asarray(x, dtype=float) / self.side + 0.5).astype(int)
        k = self.count
        return ((i + k // 2) % k) - k // 2

    def region_of(self, idx):
        """Region code 1..4 of cube indices of shape (..., n)."""
        out = _classify_regions(idx, self.grid.n)
        return int(out) if np.ndim(out) == 0 else out

    def cube_mask(self, i):
        """Boolean sample mask of one cube over the grid."""
        i = np.asarray(i, dtype=int)
        if i.shape != (self.grid.n,):
            raise ValueError(f"expected a cube index in Z^{self.grid.n}")
        k = self.count
        out = np.ones((1,) * self.grid.n, dtype=bool)
        for a, ax in enumerate(self.grid.sample_axes()):
            ia = np.floor(ax / self.side + 0.5).astype(int)
            ia = ((ia + k // 2) % k) - k // 2
            out = out & (ia == i[a])
        return np.broadcast_to(out, (self.grid.N,) * self.grid.n)


def region_partition(grid, j, c1=1.0):
    """Cube partition of the grid's box at scale 2^j.

    The requested c1 is adjusted within [1/2, 2] so the cube count per
    axis is an integer; the adjusted value is recorded on the result.
    """
    if not c1 > 0:
        raise ValueError(f"c1 must be positive, got {c1}")
    scale = 2.0 ** j
    k_lo = max(1, math.ceil(grid.L / (2.0 * scale) - 1e-9))
    k_hi = math.floor(grid.L / (0.5 * scale) + 1e-9)
    best = None
    for k in range(k_lo, k_hi + 1):
        c = grid.L / (k * scale)
        if not 0.5 - 1e-12 <= c <= 2.0 + 1e-12:
            continue
        gap = abs(math.log(c / c1))
        if best is None or gap < best[0] - 1e-15:
            best = (gap, k, c)
    if best is None:
        raise GeometryError(
            f"no admissible cube side at scale 2^{j} divides the box "
            f"{grid.L:g} with c1 in [1/2, 2]")
    _, count, c_adj = best
    v = np.arange(count) - count // 2
    mesh = np.stack(np.meshgrid(*([v] * grid.n), indexing="ij"), axis=-1)
    codes = _classify_regions(mesh, grid.n)
    counts = {f"E{r}": int(np.count_nonzero(codes == r)) for r in (1, 2, 3, 4)}
    return CubeLattice(grid=grid, j=int(j), c1=float(c_adj),
                       side=grid.L / count, count=int(count), counts=counts)


# -- reduced Bessel quadrature for the smooth-multiplier kernel -----------

@lru_cache(maxsize=64)
def _gauss_panel(count, lo, hi):
    x, w = np.polynomial.legendre.leggauss(count)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def _klambda_required(rho, x_n):
    # 8 nodes per oscillation: the radial factor sees up to rho cycles,
    # the band factor up to 3/4 (|x_n| + rho)
    ns = max(32, math.ceil(8.0 * rho))
    nh = max(32, math.ceil(6.0 * (abs(x_n) + rho)))
    return ns, nh


def kernel_Klambda(rho, x_n, lam, n=3, nodes=None):
    """Smooth-multiplier kernel at prime radius rho and height x_n.

    The prime-plane integral reduces to a Bessel transform, leaving the
    2-D quadrature

        2 pi int psi(h) h^2 e^(2 pi i x_n h)
                 int_0^1 (1 - s^2)^lam J0(2 pi s h rho) s ds dh

    evaluated by Gauss-Legendre on both axes. nodes: None for the
    resolution-matched counts, an integer for both axes, or an
    (ns, nh) pair; counts below the oscillation floor are refused.
    """
    if n != 3:
        raise ValueError(f"reduced quadrature is the n=3 path, got n={n}")
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    rho = float(rho)
    x_n = float(x_n)
    if not rho >= 0.0:
        raise ValueError(f"prime radius must be nonnegative, got {rho}")
    ns_req, nh_req = _klambda_required(rho, x_n)
    if nodes is None:
        ns, nh = ns_req, nh_req
    else:
        ns, nh = (int(nodes), int(nodes)) if np.isscalar(nodes) else map(int, nodes)
        if ns < ns_req or nh < nh_req:
            raise ResolutionError(
                f"quadrature at (rho, x_n) = ({rho:g}, {x_n:g}) needs at "
                f"least ({ns_req}, {nh_req}) nodes, got ({ns}, {nh})")
    s, ws = _gauss_panel(ns, 0.0, 1.0)
    h, wh = _gauss_panel(nh, 0.25, 1.0)
    bessel = special.j0(2.0 * np.pi * rho * np.outer(h, s))
    inner = bessel @ (ws * (1.0 - s * s) ** lam * s)
    outer = wh * psi(h) * h * h * np.exp(2j * np.pi * x_n * h)
    return complex(2.0 * np.pi * np.dot(outer, inner))


def klambda_ray_envelope(lam, r_lo=4.0, r_hi=64.0, windows=8, per_window=8,
                         n=3):
    """Windowed sup of |K| along the interior ray rho = x_n / sqrt(2).

    Log-spaced windows; the per-window max dodges oscillation zeros so
    the sups trace the decay envelope. Returns (window center, sup)."""
    edges = np.geomspace(r_lo, r_hi, windows + 1)
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        env = 0.0
        for r in np.geomspace(a, b, per_window, endpoint=False):
            v = kernel_Klambda(r / math.sqrt(3.0), r * math.sqrt(2.0 / 3.0),
                               lam, n=n)
            env = max(env, abs(v))
        out.append((float(math.sqrt(a * b)), env))
    return out


def loglog_slope(xs, ys):
    """Least-squares slope and r^2 of log y against log x."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    if lx.size < 2:
        raise ValueError(f"need at least two points, got {lx.size}")
    A = np.stack([lx, np.ones_like(lx)], axis=1)
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    res = ly - A @ coef
    sst = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if sst == 0.0 else 1.0 - float(res @ res) / sst
    return float(coef[0]), r2


# -- square function of a dilated piece ------------------------------------

def piece_square_fields(f_list, j, delta, tg=None):
    """Square function of the t-dilated dyadic piece against each field.

    Per dilation node the piece kernel is rebuilt from closed forms
    (collar symbol at dilation t, annulus at the anisotropically scaled
    radius) so no sampled data is rescaled; convolutions run on the
    spectral side and the t-integral is the trapezoid rule in log t.
    Returns the square-function Fields, one per input field.
    """
    if not f_list:
        raise ValueError("need at least one field")
    grid = f_list[0].grid
    if any(f.grid != grid for f in f_list):
        raise ValueError("fields live on different grids")
    if tg is None:
        tg = collar_tgrid(1.0, 2.0, delta)
    elif not tg.resolves(delta):
        need = required_count(tg.t_min, tg.t_max, delta)
        raise ResolutionError(
            f"dilation grid with {tg.count} nodes cannot resolve the "
            f"collar width {delta:g}; need at least {need} nodes")
    hats = [forward_transform(f).coeffs for f in f_list]
    acc = [np.zeros((grid.N,) * grid.n) for _ in f_list]
    ts = tg.values()
    for i, t in enumerate(ts):
        wt = tg.log_step * (0.5 if i in (0, tg.count - 1) else 1.0)
        piece_hat = forward_transform(
            Field(grid=grid, values=_piece_values(grid, j, delta, t))).coeffs
        for fi, fh in enumerate(hats):
            conv = inverse_transform(Spectrum(grid=grid, coeffs=fh * piece_hat))
            acc[fi] += wt * np.abs(conv.values) ** 2
    return [Field(grid=grid, values=np.sqrt(a)) for a in acc]


# -- weighted square-function ratios through quadratic forms ---------------

def wedge_mode_points(grid, delta, t_lo=1.0, t_hi=2.0):
    """Lattice frequencies the dilated collar family can see: ratio
    |xi'|/xi_n within [t_lo (1 - delta), t_hi] inside the band
    1/2 <= xi_n <= 2. Returned in lattice scan order, shape (M, n)."""
    fax = grid.freq_axes()
    r2 = _prime_radius_sq(fax, 0, grid.N)
    h = fax[-1]
    ok_band = (h >= 0.5) & (h <= 2.0)
    hsafe = np.where(h == 0.0, 1.0, h)
    ratio = np.sqrt(r2) / hsafe
    sel = ok_band & (ratio >= t_lo * (1.0 - delta)) & (ratio <= t_hi)
    sel = np.broadcast_to(sel, (grid.N,) * grid.n)
    idx = np.argwhere(sel)
    return (idx - grid.N // 2) / grid.L


def weighted_square_ratio(wk, points, coeffs, delta, t_lo=1.0, t_hi=2.0,
                          tg=None):
    """Weighted norm ratio of square function to field for a sparse
    spectral field, entirely through weight quadratic forms.

    Per dilation node the collar symbol masks the coefficients in
    closed form and the stored quadratic matrix scores the weighted
    energy (trapezoid in log t). A sorted-ratio window drops the modes
    outside the collar support at each node before the form is applied,
    so the cost per node follows the active set, not the mode count.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    c = np.asarray(coeffs, dtype=complex)
    if c.shape != (pts.shape[0],):
        raise ValueError("one coefficient per mode point is required")
    idx = wk.mode_indices(pts)
    Q = wk.quadratic_matrix(idx)
    base = wk.energy(c, Q)
    if not base > 0.0:
        raise ValueError("field carries no weighted mass")
    if tg is None:
        tg = collar_tgrid(t_lo, t_hi, delta)
    elif not tg.resolves(delta):
        need = required_count(tg.t_min, tg.t_max, delta)
        raise ResolutionError(
            f"dilation grid with {tg.count} nodes cannot resolve the "
            f"collar width {delta:g}; need at least {need} nodes")
    mspec = delta_collar(delta)
    r = np.sqrt(np.sum(pts[:, :-1] ** 2, axis=1))
    ratio = r / pts[:, -1]
    order = np.argsort(ratio, kind="stable")
    srt = ratio[order]
    pad = 1e-12
    total = 0.0
    ts = tg.values()
    for i, t in enumerate(ts):
        wt = tg.log_step * (0.5 if i in (0, tg.count - 1) else 1.0)
        lo = int(np.searchsorted(srt, t * (1.0 - delta) - pad, side="left"))
        hi = int(np.searchsorted(srt, t + pad, side="right"))
        if lo >= hi:
            continue
        act = order[lo:hi]
        m = mspec.values(pts[act], t)
        if not np.any(m):
            continue
        sub = Q[np.ix_(act, act)]
        total += wt * wk.energy(c[act] * m, sub)
    return math.sqrt(total / base)
