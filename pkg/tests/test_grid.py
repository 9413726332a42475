"""Grid conventions, transform normalization, and mask plumbing."""

import numpy as np
import numpy.testing as npt
import pytest

from conelab import multipliers as mult
from conelab.errors import ResolutionError
from conelab.grid import (Field, apply_mask, eval_mask, forward_transform,
                          inverse_transform, make_grid, synthesize_mode)


def random_field(grid, seed):
    rng = np.random.default_rng(seed)
    shape = (grid.N,) * grid.n
    vals = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return Field(grid=grid, values=vals)


def test_dual_lattice_spacing():
    g = make_grid(2, 8, 16.0)
    assert g.freq_step == 1.0 / 16
    npt.assert_allclose(g.freq_axis(), np.arange(-4, 4) / 16.0)


def test_nyquist():
    g = make_grid(3, 128, 64.0)
    assert g.nyquist == 1.0


def test_power_of_two_required():
    with pytest.raises(ValueError):
        make_grid(2, 7, 16.0)


def test_memory_cap():
    with pytest.raises(ResolutionError):
        make_grid(3, 2048, 16.0)


def test_origin_is_a_sample():
    g = make_grid(1, 16, 8.0)
    assert 0.0 in g.sample_axis()
    assert g.sample_axis()[0] == -4.0


def test_roundtrip():
    g = make_grid(2, 16, 4.0)
    f = random_field(g, 0)
    back = inverse_transform(forward_transform(f))
    assert np.max(np.abs(back.values - f.values)) <= 1e-12


def test_forward_matches_direct_summation():
    # brute-force O(N^2) oracle for the integral-transform convention
    for n, N, L, seed in ((1, 8, 4.0, 1), (2, 4, 6.0, 2), (1, 4, 2.5, 3)):
        g = make_grid(n, N, L)
        f = random_field(g, seed)
        s = forward_transform(f)
        x = g.sample_axis()
        xi = g.freq_axis()
        if n == 1:
            ref = np.array([
                np.sum(f.values * np.exp(-2j * np.pi * x * k)) * g.cell_volume
                for k in xi])
        else:
            ref = np.zeros((N, N), dtype=complex)
            for a, ka in enumerate(xi):
                for b, kb in enumerate(xi):
                    phase = np.exp(-2j * np.pi * (np.add.outer(x * ka, x * kb)))
                    ref[a, b] = np.sum(f.values * phase) * g.cell_volume
        npt.assert_allclose(np.asarray(s.coeffs), ref, atol=1e-13 * N ** n)


def test_unitarity_random_fields():
    cases = [(1, 64, 16.0), (2, 32, 8.0), (3, 16, 4.0)]
    count = 334
    for n, N, L in cases:
        g = make_grid(n, N, L)
        for seed in range(count):
            f = random_field(g, seed)
            s = forward_transform(f)
            lhs = f.l2_norm_sq()
            assert abs(lhs - s.l2_mass()) <= 1e-10 * lhs


def test_single_mode_spectrum():
    g = make_grid(2, 16, 8.0)
    xi0 = np.array([0.375, -0.25])
    f = synthesize_mode(g, xi0, amplitude=1.0)
    s = forward_transform(f)
    coeffs = np.asarray(s.coeffs)
    idx = g.mode_index(xi0)
    expected = g.L ** g.n
    assert abs(coeffs[idx] - expected) <= 1e-10 * expected
    coeffs_rest = coeffs.copy()
    coeffs_rest[idx] = 0.0
    assert np.max(np.abs(coeffs_rest)) <= 1e-10 * expected


def test_zero_mode_is_constant_one():
    g = make_grid(2, 8, 4.0)
    f = synthesize_mode(g, np.zeros(2), amplitude=1.0)
    npt.assert_allclose(f.values, 1.0, atol=1e-15)


def test_two_mode_linearity():
    g = make_grid(1, 32, 8.0)
    xi1, xi2 = np.array([0.5]), np.array([-1.25])
    f1 = synthesize_mode(g, xi1, 2.0)
    f2 = synthesize_mode(g, xi2, -0.5j)
    f = Field(grid=g, values=f1.values + f2.values)
    s = np.asarray(forward_transform(f).coeffs)
    nz = np.flatnonzero(np.abs(s) > 1e-9)
    assert set(nz) == {g.mode_index(xi1)[0], g.mode_index(xi2)[0]}


def test_off_lattice_mode_rejected():
    g = make_grid(1, 16, 8.0)
    with pytest.raises(ValueError):
        synthesize_mode(g, np.array([0.3]))
    with pytest.raises(ValueError):
        synthesize_mode(g, np.array([g.nyquist]))


def test_mask_identity_and_zero():
    g = make_grid(2, 16, 8.0)
    f = random_field(g, 9)
    s = forward_transform(f)
    same = apply_mask(s, np.ones((16, 16)))
    npt.assert_array_equal(np.asarray(same.coeffs), np.asarray(s.coeffs))
    gone = apply_mask(s, np.zeros((16, 16)))
    assert np.all(np.asarray(gone.coeffs) == 0.0)


def test_mask_scales_single_mode():
    g = make_grid(2, 32, 8.0)
    xi0 = np.array([0.25, 1.0])
    s = forward_transform(synthesize_mode(g, xi0))
    mask = np.zeros((32, 32))
    mask[g.mode_index(xi0)] = 0.625
    scaled = apply_mask(s, mask)
    f = inverse_transform(scaled)
    ref = synthesize_mode(g, xi0, amplitude=0.625)
    npt.assert_allclose(f.values, ref.values, atol=1e-12)


def test_eval_mask_nyquist_guard():
    spec = mult.cone_localized(1.0)
    ok = make_grid(2, 32, 8.0)  # nyquist 2 equals the band edge
    eval_mask(spec, ok)
    tight = make_grid(2, 16, 8.0)  # nyquist 1 cannot hold the band
    with pytest.raises(ResolutionError):
        eval_mask(spec, tight)
    with pytest.raises(ResolutionError):
        eval_mask(mult.band_psi(3), ok)


def test_eval_mask_collar_resolution_guard():
    delta = 1.0 / 8
    spec = mult.delta_collar(delta)
    with pytest.raises(ResolutionError):
        eval_mask(spec, make_grid(2, 512, 16.0))
    fine = make_grid(2, 2048, 32.0 / delta)
    mask = eval_mask(spec, fine)
    assert mask.shape == (2048, 2048)
    assert np.max(mask) > 0.99


def test_field_immutable():
    g = make_grid(1, 8, 2.0)
    f = random_field(g, 4)
    with pytest.raises(ValueError):
        f.values[0] = 0.0
