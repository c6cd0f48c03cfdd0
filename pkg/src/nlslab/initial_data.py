"""Construction of initial data: blow-up certificates and Gaussian probes.

`make_phi_ab` realizes the explicit blow-up datum with prescribed L^2 norm a
and gradient norm b: a dilation by beta = b / r_inv(a) > 1 of the rescaled
ground state psi(x) = nu R(sqrt(omega) x).  The datum is built in radial form
first (cheap, exact dilation) and embedded into the periodic box last.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (CartesianGrid, RadialGrid, RadialProfile, WaveField,
                   field_norms, radial_norms, sample_radial)
from .errors import (BoundaryLeakageError, InvalidInputError,
                     PreconditionViolationError)
from .functionals import ThresholdSet, constraint_Q, action_S, energy
from .ground_state import GroundState, ModelParams, rescale_unit_to_model

__all__ = [
    "PhiAbCertificate",
    "make_phi_ab",
    "gaussian_with_norms",
    "embed_radial",
    "auto_box",
    "polish_stationary",
]


def _mass_radius(profile: RadialProfile, fraction_left_out: float = 1e-12) -> float:
    """Radius of the ball containing all but `fraction_left_out` of the mass."""
    from scipy.integrate import cumulative_trapezoid
    from .core import sphere_area
    r = profile.grid.nodes
    w = sphere_area(profile.dim) * r ** (profile.dim - 1)
    cum = cumulative_trapezoid(w * profile.values ** 2, r, initial=0.0)
    total = cum[-1]
    if total <= 0:
        raise InvalidInputError("profile has zero mass")
    idx = np.searchsorted(cum, (1.0 - fraction_left_out) * total)
    return float(r[min(idx, len(r) - 1)])


def auto_box(profile: RadialProfile, points_per_axis: int | None = None) -> CartesianGrid:
    """Periodic box sized to hold `profile` and its dilations without leakage.

    Half-width is 1.5x the radius containing essentially all of the mass, so
    dilations with beta in (1, 4] stay inside.
    """
    half_width = 1.5 * _mass_radius(profile, 1e-14)
    if points_per_axis is None:
        # resolve the profile scale: at least ~8 points per unit of the
        # steepest inverse length carried by the profile
        n = radial_norms(profile)
        k_char = math.sqrt(n.grad_sq / n.mass)
        needed = max(16, int(2 ** math.ceil(math.log2(
            max(8.0 * k_char * half_width / math.pi, 2.0 * half_width / profile.grid.dr / 4.0)))))
        points_per_axis = min(needed, 8192 if profile.dim == 1 else 512)
    return CartesianGrid(dim=profile.dim, half_width=half_width,
                         points_per_axis=points_per_axis)


def embed_radial(profile: RadialProfile, grid: CartesianGrid) -> WaveField:
    """Sample profile(|x|) on the Cartesian grid (cubic interpolation)."""
    if profile.dim != grid.dim:
        raise InvalidInputError("profile and grid dimensions differ")
    peak = float(np.max(np.abs(profile.values)))
    if peak > 0:
        tail = float(np.abs(sample_radial(profile, np.array([grid.half_width]))[0]))
        if tail > 1e-10 * peak:
            raise BoundaryLeakageError(
                f"profile tail {tail:.3e} at the box half-width exceeds 1e-10 of the peak")
    values = sample_radial(profile, grid.radius())
    return WaveField(grid=grid, values=values.astype(complex))


@dataclass
class PhiAbCertificate:
    """Blow-up datum with prescribed norms plus its construction scalars.

    The analytic certificate: Q(field) < 0 and S(field) < m, where m is the
    action of the ground state at the construction frequency omega.
    """

    a: float
    b: float
    nu: float
    omega: float
    beta: float
    psi_link: GroundState
    field: WaveField
    q_value: float
    s_value: float
    e_value: float
    m_value: float
    grad_sq: float


def make_phi_ab(a: float, b: float, ts: ThresholdSet, R_unit: GroundState,
                grid: CartesianGrid | None = None) -> PhiAbCertificate:
    """Build the explicit blow-up datum with ||phi|| = a, ||grad phi|| = b.

    Requires a > r_star(b); the datum is the dilation P(beta, psi) of the
    ground-state rescaling psi = nu R(sqrt(omega) x) with beta = b/r_inv(a).
    """
    if not (a > 0 and b > 0):
        raise InvalidInputError("norms a, b must be positive")
    if not (a > ts.r_star(b)):
        raise PreconditionViolationError(
            f"need a > r_star(b): a={a:.6g}, r_star(b)={ts.r_star(b):.6g}")
    params = ts.params
    N, al, lam = params.dim, params.alpha, params.lam
    s2 = 4.0 - al * (N - 2)
    r_inv = ts.r_star_inv(a)
    omega = r_inv ** 2 * s2 / (N * al) * a ** -2.0
    nu = (r_inv ** (N / 2.0) * (s2 / (N * al)) ** (N / 4.0)
          * a ** (-(N - 2) / 2.0) / ts.R_l2)
    beta = b / r_inv

    # psi = nu R(sqrt(omega) x), the ground state at frequency omega
    psi = rescale_unit_to_model(R_unit, omega, lam)
    psi_norms = radial_norms(psi.profile, exponents=(al + 2.0,))
    if not math.isclose(math.sqrt(psi_norms.mass), a, rel_tol=1e-6):
        raise InvalidInputError("psi mass does not reproduce the requested a")
    if not math.isclose(math.sqrt(psi_norms.grad_sq), r_inv, rel_tol=1e-6):
        raise InvalidInputError("psi gradient does not reproduce r_inv(a)")

    # exact radial dilation: phi(r) = beta^{N/2} psi(beta r)
    psi_grid = psi.profile.grid
    phi_grid = RadialGrid(psi_grid.r_max / beta, psi_grid.n_points)
    phi_vals = beta ** (N / 2.0) * sample_radial(psi.profile, beta * phi_grid.nodes)
    phi_profile = RadialProfile(phi_grid, phi_vals, N)
    phi_norms = radial_norms(phi_profile, exponents=(al + 2.0,), with_variance=True)

    box = grid if grid is not None else auto_box(phi_profile)
    field = embed_radial(phi_profile, box)

    omega_params = params.with_(omega=omega)
    q_val = constraint_Q(phi_norms, omega_params)
    s_val = action_S(phi_norms, omega_params)
    e_val = energy(phi_norms, omega_params)
    m_val = action_S(psi_norms, omega_params)
    if not q_val < 0:
        raise InvalidInputError("constructed datum fails the certificate Q < 0")
    if not s_val < m_val:
        raise InvalidInputError("constructed datum fails the certificate S < m")

    return PhiAbCertificate(a=a, b=b, nu=nu, omega=omega, beta=beta,
                            psi_link=psi, field=field,
                            q_value=q_val, s_value=s_val, e_value=e_val,
                            m_value=m_val, grad_sq=phi_norms.grad_sq)


def polish_stationary(field: WaveField, params: ModelParams,
                      max_iter: int = 500, tol: float = 1e-14) -> WaveField:
    """Refine `field` to a stationary state of the discrete spectral system.

    Fixed-point iteration with a stabilizing power factor on
    (omega - Delta) u = lam |u|^alpha u, Delta spectral on the periodic box.
    A profile sampled from the continuum equation carries an O(1e-7)
    discrete residual; for dynamically unstable solitons that residual
    seeds exponential error growth, so soliton evolution tests need the
    discrete stationary state instead.
    """
    grid = field.grid
    om, lam, al = params.omega, params.lam, params.alpha
    if not (om > 0 and lam > 0):
        raise InvalidInputError("stationary polish needs omega > 0, lam > 0")
    u = np.abs(field.values.real)
    k_sq = grid.k_sq()
    gamma = (al + 1.0) / al
    # the max-norm residual bottoms out at ~eps * k_max^2 * |u| (roundoff of
    # the spectral Laplacian); accept the first stall below that scaled tol
    floor = tol * max(1.0, float(np.max(k_sq)))
    best = math.inf
    stalled = 0
    for _ in range(max_iter):
        nl = lam * np.abs(u) ** al * u
        lin = np.fft.ifftn((om + k_sq) * np.fft.fftn(u)).real
        s_fac = float(np.sum(lin * u) / np.sum(nl * u))
        u_new = np.fft.ifftn(np.fft.fftn(nl) / (om + k_sq)).real * s_fac ** gamma
        residual = float(np.max(np.abs(
            np.fft.ifftn(-k_sq * np.fft.fftn(u_new)).real
            - om * u_new + lam * np.abs(u_new) ** al * u_new)))
        u = u_new
        if residual < 0.5 * best:
            best = residual
            stalled = 0
        else:
            stalled += 1
        if residual < floor * max(1.0, float(np.max(np.abs(u)))) and stalled >= 3:
            break
    else:
        raise InvalidInputError(
            f"stationary polish did not converge "
            f"(residual {residual:.3e} after {max_iter} iterations)")
    return WaveField(grid=grid, values=u.astype(complex),
                     time_stamp=field.time_stamp, params_link=params)


def gaussian_with_norms(a: float, b: float, grid: CartesianGrid) -> WaveField:
    """Centered Gaussian with ||u||_{L^2} = a and ||grad u||_{L^2} = b.

    Closed form: u(x) = mu exp(-|x|^2/(2 sigma^2)) with sigma = sqrt(N/2) a/b.
    """
    if not (a > 0 and b > 0):
        raise InvalidInputError("norms a, b must be positive")
    N = grid.dim
    sigma = math.sqrt(N / 2.0) * a / b
    mu = a / (sigma * math.sqrt(math.pi)) ** (N / 2.0)
    L = grid.half_width
    # mass fraction beyond the box is ~ exp(-L^2/sigma^2); demand < 1e-12
    if math.exp(-(L / sigma) ** 2) > 1e-12:
        raise BoundaryLeakageError(
            f"Gaussian width sigma={sigma:.3g} too fat for half-width {L:.3g}")
    values = mu * np.exp(-grid.radius_sq() / (2.0 * sigma ** 2))
    return WaveField(grid=grid, values=values.astype(complex))
