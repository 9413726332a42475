"""Closed-form cone-shell geometry."""

import numpy as np
import numpy.testing as npt

from conelab.geometry import (collar_height_window, dist_to_cone,
                              dist_to_cone_rh, ring_radial_windows,
                              sphere_area)


def test_on_shell_distance_zero():
    assert dist_to_cone(np.array([1.5, 0.0, 1.5])) == 0.0
    assert dist_to_cone(np.array([1.0, 1.0])) == 0.0


def test_axis_point():
    npt.assert_allclose(dist_to_cone(np.array([0.0, 0.0, 1.5])),
                        np.sqrt(1.25), rtol=1e-15)


def test_beyond_far_endpoint():
    npt.assert_allclose(dist_to_cone(np.array([3.0, 0.0, 3.0])),
                        np.sqrt(2.0), rtol=1e-15)


def test_matches_brute_force_minimization():
    rng = np.random.default_rng(7)
    pts = rng.uniform(-1.0, 4.0, size=(200, 3))
    s = np.linspace(1.0, 2.0, 20001)
    for p in pts:
        r = np.hypot(p[0], p[1])
        brute = np.min(np.hypot(r - s, p[2] - s))
        assert abs(dist_to_cone(p) - brute) < 1e-7


def test_rotational_invariance():
    rng = np.random.default_rng(3)
    pts = rng.uniform(-2.0, 3.0, size=(100, 4))
    th = rng.uniform(0.0, 2 * np.pi)
    c, sn = np.cos(th), np.sin(th)
    rot = pts.copy()
    rot[:, 0] = c * pts[:, 0] - sn * pts[:, 1]
    rot[:, 1] = sn * pts[:, 0] + c * pts[:, 1]
    npt.assert_allclose(dist_to_cone(pts), dist_to_cone(rot), atol=1e-12)


def test_collar_window_agrees_with_distance():
    rng = np.random.default_rng(11)
    delta = 0.15
    r = rng.uniform(0.0, 3.0, size=3000)
    h = rng.uniform(-1.0, 4.0, size=3000)
    lo, hi = collar_height_window(r, delta)
    inside = (h > lo) & (h < hi)
    truth = dist_to_cone_rh(r, h) < delta
    # boundary grazing is measure zero; exact agreement expected
    assert np.array_equal(inside, truth)


def test_collar_window_is_tight():
    delta = 1.0 / 16
    r = np.linspace(0.5, 2.5, 101)
    lo, hi = collar_height_window(r, delta)
    ok = lo < hi
    eps = 1e-9
    d_in = dist_to_cone_rh(r[ok], np.clip(lo[ok] + eps, None, hi[ok]))
    assert np.all(d_in < delta)
    d_out = dist_to_cone_rh(r[ok], lo[ok] - eps)
    assert np.all(d_out >= delta - 1e-6)


def test_ring_windows_cover_the_ring():
    rng = np.random.default_rng(5)
    delta = 0.1
    x = np.array([0.4, 0.2])
    th = rng.uniform(0, 2 * np.pi, size=500)
    dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
    b = dirs @ x
    g2 = np.maximum(x @ x - b * b, 0.0)
    a1, b1, a2, b2 = ring_radial_windows(b, g2, 1 - delta, 1 + delta)
    rho = rng.uniform(0.0, 3.0, size=500)
    y = np.linalg.norm(x[None, :] + rho[:, None] * dirs, axis=1)
    truth = (y >= 1 - delta) & (y <= 1 + delta)
    claimed = ((rho >= a1) & (rho <= b1)) | ((rho >= a2) & (rho <= b2))
    assert np.mean(claimed == truth) == 1.0


def test_sphere_area_known_values():
    npt.assert_allclose(sphere_area(0), 2.0, rtol=1e-14)
    npt.assert_allclose(sphere_area(1), 2 * np.pi, rtol=1e-14)
    npt.assert_allclose(sphere_area(2), 4 * np.pi, rtol=1e-14)
