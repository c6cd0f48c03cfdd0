"""Grids, finite differences, norms, rearrangement, radial sampling."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlslab import (CartesianGrid, InvalidInputError, RadialGrid,
                    RadialProfile, WaveField, ball_volume, embed_radial,
                    fd_weights, field_norms, radial_derivative, radial_norms,
                    sample_radial, schwarz_rearrange, sphere_area)


# ---------------------------------------------------------------------------
# geometry constants
# ---------------------------------------------------------------------------

def test_sphere_area_known_values():
    assert sphere_area(1) == pytest.approx(2.0, rel=1e-15)
    assert sphere_area(2) == pytest.approx(2 * math.pi, rel=1e-15)
    assert sphere_area(3) == pytest.approx(4 * math.pi, rel=1e-15)


def test_ball_volume_known_values():
    assert ball_volume(1) == pytest.approx(2.0, rel=1e-15)
    assert ball_volume(2) == pytest.approx(math.pi, rel=1e-15)
    assert ball_volume(3) == pytest.approx(4 * math.pi / 3, rel=1e-15)


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

def test_radial_grid_nodes():
    g = RadialGrid(10.0, 101)
    assert g.dr == pytest.approx(0.1)
    assert g.nodes[0] == 0.0
    assert g.nodes[-1] == 10.0


def test_radial_grid_validation():
    with pytest.raises(InvalidInputError):
        RadialGrid(-1.0, 100)
    with pytest.raises(InvalidInputError):
        RadialGrid(1.0, 8)


def test_cartesian_grid_geometry():
    g = CartesianGrid(dim=1, half_width=8.0, points_per_axis=64)
    x = g.axis_coords()
    assert x[0] == -8.0
    assert x[-1] == pytest.approx(8.0 - g.dx)
    assert g.cell_volume == pytest.approx(g.dx)
    # Parseval: sum k_sq = n * sum over fftfreq
    assert g.k_sq().shape == (64,)


def test_cartesian_grid_validation():
    with pytest.raises(InvalidInputError):
        CartesianGrid(dim=3, half_width=1.0, points_per_axis=32)
    with pytest.raises(InvalidInputError):
        CartesianGrid(dim=1, half_width=1.0, points_per_axis=48)
    with pytest.raises(InvalidInputError):
        CartesianGrid(dim=1, half_width=0.0, points_per_axis=32)


def test_wave_field_shape_and_finiteness_checks():
    g = CartesianGrid(dim=1, half_width=1.0, points_per_axis=32)
    with pytest.raises(InvalidInputError):
        WaveField(g, np.zeros(31, dtype=complex))
    bad = np.zeros(32, dtype=complex)
    bad[0] = np.nan
    with pytest.raises(InvalidInputError):
        WaveField(g, bad)


# ---------------------------------------------------------------------------
# finite-difference weights
# ---------------------------------------------------------------------------

def test_fd_weights_central_second_derivative():
    w = fd_weights([-1, 0, 1], 2)
    assert np.allclose(w, [1.0, -2.0, 1.0], atol=1e-13)


def test_fd_weights_fourth_order_first_derivative():
    w = fd_weights([-2, -1, 0, 1, 2], 1)
    assert np.allclose(w, [1 / 12, -8 / 12, 0.0, 8 / 12, -1 / 12], atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=3),
       st.permutations([-3, -2, -1, 0, 1, 2]))
def test_fd_weights_exact_on_polynomials(order, offsets):
    # an n-point stencil differentiates polynomials of degree < n exactly:
    # applied to x^deg at x=0, the result is order! when deg == order, else 0
    offs = np.array(offsets[:order + 2], dtype=float)
    w = fd_weights(offs, order)
    for deg in range(len(offs)):
        num = float(np.dot(w, offs ** deg)) if deg > 0 else float(np.sum(w))
        exact = float(math.factorial(order)) if deg == order else 0.0
        assert num == pytest.approx(exact, abs=1e-8)


# ---------------------------------------------------------------------------
# radial norms (full-space measure) against Gaussian closed forms
# ---------------------------------------------------------------------------

def _gaussian_profile(dim, sigma=1.0, n=4001, r_max=20.0):
    g = RadialGrid(r_max, n)
    return RadialProfile(g, np.exp(-g.nodes ** 2 / (2 * sigma ** 2)), dim)


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_radial_norms_gaussian_closed_form(dim):
    # integral over R^dim of exp(-r^2/s^2) is (pi s^2)^{dim/2}
    sigma = 1.3
    p = _gaussian_profile(dim, sigma)
    n = radial_norms(p, exponents=(4.0,), with_variance=True)
    mass_exact = (math.pi * sigma ** 2) ** (dim / 2.0)
    assert n.mass == pytest.approx(mass_exact, rel=1e-10)
    # |grad u|^2 = (r/sigma^2)^2 u^2 -> integral = dim/2 * sigma^{dim-2} pi^{dim/2} / ... :
    grad_exact = dim / (2 * sigma ** 2) * mass_exact
    assert n.grad_sq == pytest.approx(grad_exact, rel=1e-10)
    l4_exact = (math.pi * sigma ** 2 / 2.0) ** (dim / 2.0)
    assert n.lp[4.0] == pytest.approx(l4_exact, rel=1e-10)
    var_exact = dim * sigma ** 2 / 2.0 * mass_exact
    assert n.variance == pytest.approx(var_exact, rel=1e-10)


@pytest.mark.parametrize("dim", [1, 2])
def test_radial_and_cartesian_norms_agree(dim):
    prof = _gaussian_profile(dim, 1.0, n=2001, r_max=12.0)
    nr = radial_norms(prof, exponents=(4.0,), with_variance=True)
    grid = CartesianGrid(dim=dim, half_width=12.0,
                         points_per_axis=512 if dim == 1 else 256)
    field = embed_radial(prof, grid)
    nf = field_norms(field, exponents=(4.0,), with_variance=True)
    assert nf.mass == pytest.approx(nr.mass, rel=1e-9)
    assert nf.grad_sq == pytest.approx(nr.grad_sq, rel=1e-9)
    assert nf.lp[4.0] == pytest.approx(nr.lp[4.0], rel=1e-9)
    assert nf.variance == pytest.approx(nr.variance, rel=1e-8)


def test_radial_derivative_accuracy():
    sigma = 1.0
    p = _gaussian_profile(1, sigma, n=2001, r_max=12.0)
    d = radial_derivative(p, order=1)
    exact = -p.grid.nodes / sigma ** 2 * p.values
    assert float(np.max(np.abs(d - exact))) < 1e-8


def test_sample_radial_interpolation():
    p = _gaussian_profile(1, 1.0, n=2001, r_max=12.0)
    r = np.linspace(0.05, 6.0, 137)
    got = sample_radial(p, r)
    assert float(np.max(np.abs(got - np.exp(-r ** 2 / 2)))) < 1e-9


# ---------------------------------------------------------------------------
# symmetric decreasing rearrangement
# ---------------------------------------------------------------------------

def test_rearrangement_preserves_lp_and_decreases_gradient(rng):
    grid = CartesianGrid(dim=1, half_width=12.0, points_per_axis=4096)
    x = grid.axis_coords()
    # an asymmetric two-bump field
    vals = (np.exp(-(x - 2.0) ** 2) + 0.6 * np.exp(-(x + 3.0) ** 2 / 2)).astype(complex)
    field = WaveField(grid, vals)
    prof = schwarz_rearrange(field)
    nf = field_norms(field, exponents=(4.0,))
    np_ = radial_norms(prof, exponents=(4.0,))
    # equality is exact in the continuum; the cell-measure scheme carries
    # an O(dx) binning error at this resolution
    assert np_.mass == pytest.approx(nf.mass, rel=1e-4)
    assert np_.lp[4.0] == pytest.approx(nf.lp[4.0], rel=1e-4)
    # Polya-Szego: the rearrangement cannot increase the Dirichlet energy
    assert np_.grad_sq <= nf.grad_sq * (1 + 1e-6)
    # monotone decreasing output
    assert np.all(np.diff(prof.values) <= 1e-12)


def test_rearrangement_fixes_radial_decreasing_data():
    grid = CartesianGrid(dim=1, half_width=12.0, points_per_axis=2048)
    x = grid.axis_coords()
    field = WaveField(grid, np.exp(-x ** 2).astype(complex))
    prof = schwarz_rearrange(field)
    exact = np.exp(-prof.grid.nodes ** 2)
    assert float(np.max(np.abs(prof.values - exact))) < 1e-3
