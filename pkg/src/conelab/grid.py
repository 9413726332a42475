"""Periodic sampling grids and the discrete Fourier pairing.

Conventions, fixed once for the whole package:

* Physical samples sit at x_k = L * (k/N - 1/2) per axis, k = 0..N-1,
  so the box is [-L/2, L/2)^n and the origin is a sample point.
* Frequencies sit on the dual lattice xi_m = m / L, m = -N/2..N/2-1,
  stored in ascending m order.
* The forward transform approximates the integral transform with the
  e^(-2 pi i x.xi) kernel: coefficients carry the cell volume (L/N)^n.
* Plancherel holds exactly: integral of |f|^2 over the box equals
  sum |fhat|^2 / L^n, up to FFT rounding.

Masks are evaluated from closed-form symbol descriptors on the lattice;
sampled mask data is never interpolated or rescaled.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft

from .errors import ResolutionError

# refuse allocations beyond this many bytes for one complex lattice array
MEMORY_CAP_BYTES = 2 << 30

# collar masks need the lattice to resolve the collar width
COLLAR_RESOLUTION_FACTOR = 32.0


@dataclass(frozen=True)
class Grid:
    """Cubic periodic grid: n axes, N points per axis, box side L."""
    n: int
    N: int
    L: float

    @property
    def freq_step(self):
        return 1.0 / self.L

    @property
    def nyquist(self):
        return self.N / (2.0 * self.L)

    @property
    def spacing(self):
        return self.L / self.N

    @property
    def cell_volume(self):
        return (self.L / self.N) ** self.n

    @property
    def lattice_measure(self):
        return self.L ** (-self.n)

    def sample_axis(self):
        k = np.arange(self.N)
        return self.L * (k / self.N - 0.5)

    def freq_axis(self):
        m = np.arange(-self.N // 2, self.N // 2)
        return m / self.L

    def sample_axes(self):
        """Open (broadcastable) coordinate arrays, one per axis."""
        ax = self.sample_axis()
        return _open_mesh(ax, self.n)

    def freq_axes(self):
        ax = self.freq_axis()
        return _open_mesh(ax, self.n)

    def mode_index(self, xi0):
        """Integer lattice index of an on-lattice frequency, or raise."""
        xi0 = np.asarray(xi0, dtype=float)
        if xi0.shape != (self.n,):
            raise ValueError(f"expected a point in R^{self.n}")
        m = xi0 * self.L
        mi = np.rint(m).astype(int)
        if not np.allclose(m, mi, rtol=0.0, atol=1e-9):
            raise ValueError(f"{xi0} is not on the dual lattice (1/L={1/self.L})")
        if np.any(mi < -self.N // 2) or np.any(mi > self.N // 2 - 1):
            raise ValueError(f"mode {mi} outside the resolved band")
        return tuple(mi + self.N // 2)


def _open_mesh(ax, n):
    out = []
    for a in range(n):
        shape = [1] * n
        shape[a] = ax.size
        out.append(ax.reshape(shape))
    return out


def make_grid(n, N, L):
    """Validate parameters and build a Grid.

    N must be an even power of two (FFT path and exact half-box
    symmetry both rely on it); the projected complex lattice array must
    fit under MEMORY_CAP_BYTES.
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if N < 2 or (N & (N - 1)) != 0:
        raise ValueError(f"N must be a power of two >= 2, got {N}")
    if not L > 0:
        raise ValueError(f"box side must be positive, got {L}")
    nbytes = 16 * N ** n
    if nbytes > MEMORY_CAP_BYTES:
        raise ResolutionError(
            f"lattice of {N}^{n} complex samples needs {nbytes/2**30:.1f} GiB, "
            f"over the {MEMORY_CAP_BYTES/2**30:.1f} GiB cap")
    return Grid(n=int(n), N=int(N), L=float(L))


@dataclass(frozen=True)
class Field:
    """Complex samples on a Grid, immutable after construction."""
    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=complex)
        if v.shape != (self.grid.N,) * self.grid.n:
            raise ValueError("sample array shape does not match the grid")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def l2_norm_sq(self):
        """Integral of |f|^2 over the box (cell-volume quadrature, exact
        for band-limited fields)."""
        return float(np.sum(np.abs(self.values) ** 2)) * self.grid.cell_volume

    def l2_norm(self):
        return np.sqrt(self.l2_norm_sq())

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True)
class Spectrum:
    """Fourier coefficients on the dual lattice, ascending index order."""
    grid: Grid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.ascontiguousarray(self.coeffs, dtype=complex)
        if c.shape != (self.grid.N,) * self.grid.n:
            raise ValueError("coefficient array shape does not match the grid")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def l2_mass(self):
        """Sum |fhat|^2 times the lattice measure (equals the field's
        squared norm by Plancherel)."""
        return float(np.sum(np.abs(self.coeffs) ** 2)) * self.grid.lattice_measure


def _half_shift_phase(grid):
    # (-1)^(m_1 + ... + m_n) as an open-mesh product, from the half-box
    # offset of the sample coordinates
    m = np.arange(-grid.N // 2, grid.N // 2)
    sign = np.where(m & 1, -1.0, 1.0)
    out = 1.0
    for block in _open_mesh(sign, grid.n):
        out = out * block
    return out


def forward_transform(f):
    """Field -> Spectrum with the integral-transform normalization."""
    g = f.grid
    coeffs = sfft.fftn(f.values)
    coeffs = sfft.fftshift(coeffs)
    coeffs *= g.cell_volume * _half_shift_phase(g)
    return Spectrum(grid=g, coeffs=coeffs)


def inverse_transform(s):
    """Spectrum -> Field; exact inverse of forward_transform."""
    g = s.grid
    work = s.coeffs * _half_shift_phase(g)
    work = sfft.ifftshift(work)
    values = sfft.ifftn(work)
    values *= (g.N / g.L) ** g.n
    return Field(grid=g, values=values)


def synthesize_mode(grid, xi0, amplitude=1.0):
    """Pure lattice mode amplitude * e^(2 pi i x . xi0) as a Field.

    xi0 must lie on the dual lattice; its forward transform is a single
    coefficient of value amplitude * L^n at xi0.
    """
    grid.mode_index(xi0)  # validates
    xi0 = np.asarray(xi0, dtype=float)
    ax = grid.sample_axis()
    values = np.asarray(amplitude, dtype=complex)
    for a in range(grid.n):
        block = np.exp(2j * np.pi * ax * xi0[a])
        shape = [1] * grid.n
        shape[a] = grid.N
        values = values * block.reshape(shape)
    values = np.broadcast_to(values, (grid.N,) * grid.n).copy()
    return Field(grid=grid, values=values)


def eval_mask(mspec, grid, t=1.0):
    """Evaluate a closed-form symbol descriptor on the dual lattice.

    The descriptor must provide values_on_axes(axes, t) for open-mesh
    evaluation, support_box(t) -> (prime_radius | None, last_bound |
    None) for the resolution check, and may carry collar_delta for the
    collar-width rule 1/L <= delta/32.

    Dilation is applied inside the descriptor's closed form; sampled
    mask data is never rescaled.
    """
    if t <= 0:
        raise ValueError(f"dilation parameter must be positive, got {t}")
    prime_bound, last_bound = mspec.support_box(t)
    tol = 1e-12
    if prime_bound is not None and prime_bound > grid.nyquist * (1 + tol):
        raise ResolutionError(
            f"mask support radius {prime_bound:g} exceeds the Nyquist "
            f"frequency {grid.nyquist:g}")
    if last_bound is not None and last_bound > grid.nyquist * (1 + tol):
        raise ResolutionError(
            f"mask band edge {last_bound:g} exceeds the Nyquist "
            f"frequency {grid.nyquist:g}")
    delta = getattr(mspec, "collar_delta", None)
    if delta is not None and grid.freq_step > delta / COLLAR_RESOLUTION_FACTOR:
        raise ResolutionError(
            f"collar width {delta:g} needs frequency step <= "
            f"{delta / COLLAR_RESOLUTION_FACTOR:g}, grid has {grid.freq_step:g}")
    return mspec.values_on_axes(grid.freq_axes(), t)


def apply_mask(s, mask):
    """Pointwise product of a Spectrum with a lattice mask array (full
    shape, or an open mesh broadcastable to it)."""
    try:
        shape = np.broadcast_shapes(np.shape(mask), s.coeffs.shape)
    except ValueError:
        shape = None
    if shape != s.coeffs.shape:
        raise ValueError("mask shape does not match the spectrum")
    return Spectrum(grid=s.grid, coeffs=s.coeffs * mask)
