"""Prescribed-norm data: Gaussians, the explicit blow-up family, embeddings."""

import math

import numpy as np
import pytest

from nlslab import (BoundaryLeakageError, CartesianGrid,
                    InvalidInputError, ModelParams,
                    PreconditionViolationError, RadialGrid, RadialProfile,
                    auto_box, classify_plane_point, embed_radial,
                    field_norms, gaussian_with_norms, make_phi_ab,
                    polish_stationary)


@pytest.mark.parametrize("dim,a,b", [(1, 1.0, 1.0), (1, 0.3, 2.0), (2, 1.4, 0.6)])
def test_gaussian_with_norms_hits_requested_norms(dim, a, b):
    grid = CartesianGrid(dim=dim, half_width=40.0,
                         points_per_axis=2048 if dim == 1 else 512)
    u = gaussian_with_norms(a, b, grid)
    n = field_norms(u, with_variance=True)
    assert math.sqrt(n.mass) == pytest.approx(a, rel=1e-10)
    assert math.sqrt(n.grad_sq) == pytest.approx(b, rel=1e-10)
    assert n.variance is not None and n.variance > 0


def test_gaussian_with_norms_validation():
    grid = CartesianGrid(dim=1, half_width=10.0, points_per_axis=256)
    with pytest.raises(InvalidInputError):
        gaussian_with_norms(-1.0, 1.0, grid)


def test_embed_radial_rejects_leaky_profiles():
    g = RadialGrid(30.0, 1001)
    prof = RadialProfile(g, np.exp(-g.nodes / 5.0), 1)  # slow exponential tail
    tight = CartesianGrid(dim=1, half_width=8.0, points_per_axis=256)
    with pytest.raises(BoundaryLeakageError):
        embed_radial(prof, tight)


def test_auto_box_holds_the_profile(gs18):
    box = auto_box(gs18.profile)
    field = embed_radial(gs18.profile, box)  # must not raise
    n = field_norms(field)
    assert n.mass == pytest.approx(gs18.norms.mass, rel=1e-8)


def test_phi_ab_certificate(ts18, gs18):
    b = 1.0
    a = 1.2 * ts18.r_star(b)
    cert = make_phi_ab(a, b, ts18, gs18)
    # prescribed norms
    n = field_norms(cert.field, exponents=(10.0,))
    assert math.sqrt(n.mass) == pytest.approx(a, rel=1e-6)
    assert math.sqrt(n.grad_sq) == pytest.approx(b, rel=1e-6)
    # analytic certificate
    assert cert.q_value < 0
    assert cert.s_value < cert.m_value
    # E-sign agrees with the plane classification
    lab = classify_plane_point(ts18, a, b)
    assert lab.label == "blow-up-constructible"
    assert (cert.e_value > 0) == (lab.e_sign == "positive")
    # construction scalars are consistent: beta = b / r*^{-1}(a)
    assert cert.beta == pytest.approx(b / ts18.r_star_inv(a), rel=1e-12)


def test_phi_ab_zero_energy_on_the_rho_curve(ts18, gs18):
    b = 1.0
    a = ts18.rho_star(b)
    cert = make_phi_ab(a, b, ts18, gs18)
    scale = abs(cert.s_value) + cert.grad_sq
    assert abs(cert.e_value) < 1e-8 * scale


def test_phi_ab_requires_a_above_r_star(ts18, gs18):
    b = 1.0
    with pytest.raises(PreconditionViolationError):
        make_phi_ab(0.9 * ts18.r_star(b), b, ts18, gs18)


def test_polish_stationary_reduces_discrete_residual(gs12):
    params = ModelParams(1, 2.0, lam=1.0, omega=1.0)
    grid = CartesianGrid(dim=1, half_width=40.0, points_per_axis=2048)
    field = embed_radial(gs12.profile, grid)

    def residual(f):
        k_sq = grid.k_sq()
        u = f.values
        lin = np.fft.ifftn((params.omega + k_sq) * np.fft.fftn(u))
        return float(np.max(np.abs(lin - params.lam * np.abs(u) ** 2 * u)))

    r0 = residual(field)
    polished = polish_stationary(field, params)
    assert residual(polished) < 1e-3 * r0
    # the polish is a refinement, not a different state
    assert float(np.max(np.abs(polished.values - field.values))) < 1e-4
