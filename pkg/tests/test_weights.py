"""Weighted norms against closed-form moments, and the rectangle-average
product sweep that separates admissible from inadmissible exponents.

The half-cell quadrature converges like h^(1-beta) toward integrals with
a |x_n|^(-beta) factor, so closed-form anchors are checked through
Richardson extrapolation at the known rate rather than raw values.
"""

import math

import numpy as np
import numpy.testing as npt
import pytest

from conelab import grid as grd
from conelab import weights as wts


def gaussian_field(g):
    axes = g.sample_axes()
    q = 0.0
    for a in axes:
        q = q + a ** 2
    return grd.Field(grid=g, values=np.exp(-0.5 * np.pi * q))


def gauss_moment_1d(beta):
    # integral of exp(-pi x^2) |x|^(-beta) dx
    return math.pi ** ((beta - 1.0) / 2.0) * math.gamma((1.0 - beta) / 2.0)


def test_params_windows():
    assert wts.WeightParams(1.0, 0.5).admissible_a2(3)
    assert not wts.WeightParams(2.0, 0.5).admissible_a2(3)
    assert not wts.WeightParams(1.0, 1.0).admissible_a2(3)
    assert wts.WeightParams(0.5, 0.5).trace_window(3)
    assert not wts.WeightParams(0.0, 0.5).trace_window(3)
    assert not wts.WeightParams(1.5, 0.5).trace_window(2)


def test_zero_exponents_reduce_to_plain_norm():
    g = grd.make_grid(2, 64, 8.0)
    rng = np.random.default_rng(3)
    f = grd.Field(grid=g, values=rng.standard_normal((64, 64)))
    w0 = wts.WeightParams(0.0, 0.0)
    assert wts.weighted_norm(f, w0) == pytest.approx(f.l2_norm(), rel=1e-14)


def test_gaussian_moment_one_dim():
    beta = 0.5
    exact = gauss_moment_1d(beta)
    assert abs(exact - 2.7233) < 5e-5
    vals = {}
    for N in (2 ** 15, 2 ** 16):
        g = grd.make_grid(1, N, 32.0)
        f = gaussian_field(g)
        vals[N] = wts.weighted_norm(f, wts.WeightParams(0.0, beta)) ** 2
    # raw values approach from below at rate h^(1/2)
    assert vals[2 ** 15] < vals[2 ** 16] < exact
    rate = 2.0 ** (beta - 1.0)
    ext = (vals[2 ** 16] - rate * vals[2 ** 15]) / (1.0 - rate)
    assert abs(ext - exact) / exact < 1e-4


def test_gaussian_moment_convergence_rate():
    beta = 0.5
    exact = gauss_moment_1d(beta)
    errs = []
    for N in (2 ** 14, 2 ** 15, 2 ** 16):
        g = grd.make_grid(1, N, 32.0)
        f = gaussian_field(g)
        got = wts.weighted_norm(f, wts.WeightParams(0.0, beta)) ** 2
        errs.append(exact - got)
    ratios = [errs[i + 1] / errs[i] for i in range(2)]
    want = 2.0 ** (beta - 1.0)
    for r in ratios:
        assert abs(r - want) < 0.03


def test_gaussian_moment_three_dim():
    # product closed form; limit recovered by fitting V + a h^(1/2) + b h
    alpha, beta = 1.0, 0.5
    prime = math.pi ** (alpha / 2.0) * math.gamma(1.0 - alpha / 2.0)
    exact = prime * gauss_moment_1d(beta)
    v, hs = [], []
    for N in (64, 128, 256):
        g = grd.make_grid(3, N, 16.0)
        f = gaussian_field(g)
        v.append(wts.weighted_norm(f, wts.WeightParams(alpha, beta)) ** 2)
        hs.append(g.spacing)
    A = np.array([[1.0, h ** 0.5, h] for h in hs])
    limit = np.linalg.solve(A, np.array(v))[0]
    assert abs(limit - exact) / exact < 0.02


def test_dilation_identity_exact_on_matched_lattices():
    # sampling f(2x) on box L is the same lattice data as f on box 2L,
    # and the half-cell rule maps onto itself, so the weighted norms
    # differ by exactly 2^((alpha + beta - n)/2)
    rng = np.random.default_rng(7)
    V = rng.standard_normal((256, 256)) + 1j * rng.standard_normal((256, 256))
    w = wts.WeightParams(0.8, 0.4)
    a = wts.weighted_norm(grd.Field(grid=grd.make_grid(2, 256, 8.0),
                                    values=V), w)
    b = wts.weighted_norm(grd.Field(grid=grd.make_grid(2, 256, 16.0),
                                    values=V), w)
    want = 2.0 ** (0.5 * (w.alpha + w.beta - 2.0))
    assert a / b == pytest.approx(want, rel=1e-13)


def test_weight_anisotropic_homogeneity_pointwise():
    w = wts.WeightParams(1.3, 0.7)
    rng = np.random.default_rng(9)
    axes = [rng.uniform(0.1, 3.0, size=(50, 1)),
            rng.uniform(0.1, 3.0, size=(1, 50))]
    base = wts.weight_on_axes(axes, w)
    s, u = 1.7, 2.9
    scaled = wts.weight_on_axes([axes[0] * s, axes[1] * u], w)
    npt.assert_allclose(scaled, s ** -w.alpha * u ** -w.beta * base,
                        rtol=1e-13)


def test_weighted_norm_offset_matches_manual():
    g = grd.make_grid(2, 32, 4.0)
    rng = np.random.default_rng(17)
    f = grd.Field(grid=g, values=rng.standard_normal((32, 32)))
    w = wts.WeightParams(0.9, 0.3)
    off = np.array([10.0, -6.0])
    x, y = g.sample_axes()
    h = 0.5 * g.spacing
    wv = (np.abs(x + off[0] + h) ** -w.alpha
          * np.abs(y + off[1] + h) ** -w.beta)
    manual = np.sqrt(np.sum(np.abs(f.values) ** 2 * wv) * g.cell_volume)
    assert wts.weighted_norm(f, w, offset=off) == pytest.approx(manual,
                                                                rel=1e-13)


def test_weight_kernel_matches_dense_route():
    g = grd.make_grid(2, 64, 8.0)
    rng = np.random.default_rng(7)
    m = 30
    idx = rng.integers(-g.N // 2, g.N // 2, size=(m, 2))
    c = rng.normal(size=m) + 1j * rng.normal(size=m)
    coeffs = np.zeros((g.N, g.N), dtype=complex)
    for (i, j), cv in zip(idx, c):
        coeffs[i + g.N // 2, j + g.N // 2] += cv
    f = grd.inverse_transform(grd.Spectrum(grid=g, coeffs=coeffs))

    for w, off in [(wts.WeightParams(0.5, 0.4), None),
                   (wts.WeightParams(0.0, 0.0), None),
                   (wts.WeightParams(0.9, 0.3), np.array([3.0, -2.0]))]:
        ker = wts.WeightKernel(g, w, offset=off)
        quad = ker.quadratic_matrix(ker.mode_indices(idx / g.L))
        dense = wts.weighted_norm(f, w, offset=off) ** 2
        assert ker.energy(c, quad) == pytest.approx(dense, rel=1e-12)


def test_weight_kernel_rejects_off_lattice_points():
    g = grd.make_grid(2, 32, 4.0)
    ker = wts.WeightKernel(g, wts.WeightParams(0.5, 0.5))
    with pytest.raises(ValueError):
        ker.mode_indices(np.array([[0.3, 0.25]]))
    with pytest.raises(ValueError):
        ker.mode_indices(np.array([[g.nyquist, 0.0]]))


def test_refinement_differences_decay():
    w = wts.WeightParams(0.5, 0.5)
    vals = []
    for N in (512, 1024, 2048):
        g = grd.make_grid(2, N, 16.0)
        vals.append(wts.weighted_norm(gaussian_field(g), w))
    d1 = abs(vals[1] - vals[0]) / vals[-1]
    d2 = abs(vals[2] - vals[1]) / vals[-1]
    assert d2 < d1 * 0.8
    assert d2 < 0.02


def test_lp_norms():
    g = grd.make_grid(1, 256, 8.0)
    f = grd.Field(grid=g, values=np.ones(256))
    assert wts.lp_norm(f, 2) == pytest.approx(np.sqrt(8.0), rel=1e-14)
    assert wts.lp_norm(f, 4) == pytest.approx(8.0 ** 0.25, rel=1e-14)
    assert wts.lp_norm(f, np.inf) == 1.0
    with pytest.raises(ValueError):
        wts.lp_norm(f, 0.5)


def test_a2_sweep_trivial_weight_is_one():
    out = wts.a2_product_constant(wts.WeightParams(0.0, 0.0), 3)
    npt.assert_allclose(out, 1.0, rtol=1e-14)


def test_a2_sweep_admissible_stabilizes():
    # alpha just under the n-1 endpoint: averages converge, so the
    # consecutive ratio must fall under 1.05 by the deepest level
    out = wts.a2_product_constant(wts.WeightParams(1.9, 0.0), 3,
                                  levels=range(3, 14))
    ratios = np.array(out[1:]) / np.array(out[:-1])
    assert ratios[-1] <= 1.05
    assert ratios[-1] < ratios[0]


def test_a2_sweep_barely_inadmissible_grows():
    # alpha just over the endpoint: sustained growth, asymptotic rate
    # 2^(alpha - (n-1)) = 2^0.1, approached from above
    out = wts.a2_product_constant(wts.WeightParams(2.1, 0.0), 3,
                                  levels=range(3, 12))
    ratios = np.array(out[1:]) / np.array(out[:-1])
    assert np.min(ratios) >= 1.06


def test_a2_sweep_strongly_inadmissible_doubles():
    out = wts.a2_product_constant(wts.WeightParams(3.0, 0.0), 3,
                                  levels=range(3, 10))
    ratios = np.array(out[1:]) / np.array(out[:-1])
    assert ratios[-1] >= 1.99


def test_a2_sweep_inadmissible_height_exponent():
    # beta over 1 diverges through the |x_n| factor at rate 2^(beta - 1)
    out = wts.a2_product_constant(wts.WeightParams(0.0, 1.5), 3,
                                  levels=range(3, 10))
    ratios = np.array(out[1:]) / np.array(out[:-1])
    assert np.min(ratios) >= 1.3
