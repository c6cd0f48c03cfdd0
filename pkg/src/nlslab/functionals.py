"""Conserved functionals, variational quantities and explicit thresholds.

Implements the energy E, the action S, the virial-type constraint Q, the
optimal-dilation scale beta*, the L^2-isometric dilation P(beta, .), the
Weinstein quotient J, the sharp Gagliardo-Nirenberg constant (closed form
and an independent symmetrized minimization), and the three explicit
threshold curves gamma_*, r_*, rho_* with their inverses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import czt

from .core import (CartesianGrid, NormSet, RadialGrid, RadialProfile,
                   WaveField, field_norms, radial_norms, sample_radial,
                   schwarz_rearrange, sphere_area)
from .errors import (BoundaryLeakageError, ConvergenceFailureError,
                     InvalidInputError, UnsupportedRegimeError)
from .ground_state import GroundState, ModelParams, rescale_unit_to_model

__all__ = [
    "energy",
    "action_S",
    "constraint_Q",
    "beta_star",
    "dilate_P",
    "weinstein_J",
    "gn_constant_formula",
    "gn_constant_minimize",
    "ThresholdSet",
    "evaluate_thresholds",
    "invert_thresholds",
    "RegionLabel",
    "classify_plane_point",
    "VariationalContext",
]


def norms_of(obj, params: ModelParams, with_variance: bool = False) -> NormSet:
    """NormSet of a NormSet/GroundState/RadialProfile/WaveField, with L^(alpha+2)."""
    p = float(params.alpha + 2)
    if isinstance(obj, NormSet):
        if p not in obj.lp:
            raise InvalidInputError(f"NormSet lacks the L^{p} entry")
        return obj
    if isinstance(obj, GroundState):
        return obj.norms
    if isinstance(obj, RadialProfile):
        return radial_norms(obj, exponents=(p,), with_variance=with_variance)
    if isinstance(obj, WaveField):
        return field_norms(obj, exponents=(p,), with_variance=with_variance)
    raise InvalidInputError(f"cannot compute norms of {type(obj).__name__}")


# ---------------------------------------------------------------------------
# functionals
# ---------------------------------------------------------------------------

def energy(obj, params: ModelParams) -> float:
    """E = 1/2 ||grad||^2 - lam/(alpha+2) ||.||_{alpha+2}^{alpha+2}."""
    n = norms_of(obj, params)
    return 0.5 * n.grad_sq - params.lam / (params.alpha + 2) * n.lp[float(params.alpha + 2)]


def action_S(obj, params: ModelParams) -> float:
    """S = E + omega/2 * mass (the action at frequency params.omega)."""
    n = norms_of(obj, params)
    return energy(n, params) + 0.5 * params.omega * n.mass


def constraint_Q(obj, params: ModelParams) -> float:
    """Q = ||grad||^2 - lam*N*alpha/(2(alpha+2)) ||.||_{alpha+2}^{alpha+2}."""
    n = norms_of(obj, params)
    N, al = params.dim, params.alpha
    return n.grad_sq - params.lam * N * al / (2 * (al + 2)) * n.lp[float(al + 2)]


def beta_star(obj, params: ModelParams) -> float:
    """Dilation scale maximizing S along P(beta, .); equals 1 on ground states."""
    if not params.is_supercritical:
        raise UnsupportedRegimeError("beta* needs alpha > 4/dim")
    n = norms_of(obj, params)
    if n.mass == 0:
        raise InvalidInputError("beta* of the zero field")
    N, al = params.dim, params.alpha
    val = 2 * (al + 2) / (params.lam * N * al) * n.grad_sq / n.lp[float(al + 2)]
    return val ** (2.0 / (N * al - 4))


def weinstein_J(obj, params: ModelParams) -> float:
    """J(f) = ||f||^{(4-al(N-2))/2} ||grad f||^{N al/2} / ||f||_{al+2}^{al+2}."""
    n = norms_of(obj, params)
    if n.mass == 0:
        raise InvalidInputError("J of the zero field")
    N, al = params.dim, params.alpha
    return (n.mass ** ((4 - al * (N - 2)) / 4.0)
            * n.grad_sq ** (N * al / 4.0)
            / n.lp[float(al + 2)])


# ---------------------------------------------------------------------------
# dilation
# ---------------------------------------------------------------------------

def _czt_dilate_axis(vals: np.ndarray, beta: float, axis: int) -> np.ndarray:
    """Trigonometric interpolation of v(beta * x) along one axis.

    Exact evaluation of the FFT interpolant at the scaled nodes via the
    chirp-z transform; periodic wrap-around applies for |beta x| > L.
    """
    n = vals.shape[axis]
    V = np.fft.fftshift(np.fft.fft(vals, axis=axis), axes=axis)
    c = 0.5 * n * (1.0 - beta)
    j = np.arange(n)
    shape = [1] * vals.ndim
    shape[axis] = n
    phase_in = np.exp(2j * math.pi * j * c / n).reshape(shape)
    out = czt(V * phase_in, m=n, w=np.exp(2j * math.pi * beta / n), a=1.0 + 0j,
              axis=axis)
    phase_out = np.exp(-1j * math.pi * (c + beta * j)).reshape(shape)
    return out * phase_out / n


def _boundary_mass_fraction(field: WaveField, cells: int = 2) -> float:
    a2 = np.abs(field.values) ** 2
    total = float(np.sum(a2))
    if total == 0:
        return 0.0
    mask = np.zeros(field.grid.shape, dtype=bool)
    for ax in range(field.grid.dim):
        sl_lo = [slice(None)] * field.grid.dim
        sl_hi = [slice(None)] * field.grid.dim
        sl_lo[ax] = slice(0, cells)
        sl_hi[ax] = slice(-cells, None)
        mask[tuple(sl_lo)] = True
        mask[tuple(sl_hi)] = True
    return float(np.sum(a2[mask])) / total


def dilate_P(beta: float, field: WaveField) -> WaveField:
    """P(beta, psi)(x) = beta^{N/2} psi(beta x); exact L^2 isometry."""
    if not (beta > 0):
        raise InvalidInputError("beta must be positive")
    g = field.grid
    vals = field.values
    if beta != 1.0:
        for ax in range(g.dim):
            vals = _czt_dilate_axis(vals, beta, ax)
            if beta > 1.0:
                # |beta*x| > L samples the periodic image, not the (decaying)
                # field itself; the true values there are below the tail floor
                shape = [1] * g.dim
                shape[ax] = g.points_per_axis
                coord = np.abs(g.axis_coords()).reshape(shape)
                vals = np.where(coord > g.half_width / beta, 0.0, vals)
        vals = beta ** (g.dim / 2.0) * vals
        if np.isrealobj(field.values) or np.max(np.abs(field.values.imag)) == 0:
            vals = vals.real.astype(complex)
    out = WaveField(g, np.ascontiguousarray(vals), time_stamp=field.time_stamp,
                    params_link=field.params_link)
    if _boundary_mass_fraction(out) > 1e-12:
        raise BoundaryLeakageError("dilated field touches the box edge")
    return out


# ---------------------------------------------------------------------------
# sharp Gagliardo-Nirenberg constant
# ---------------------------------------------------------------------------

def gn_constant_formula(params: ModelParams, R_l2: float) -> float:
    """Best constant from the unit ground state's L^2 norm.

    C* = 2(al+2)/(N al) * ((4 - al(N-2))/(N al))^{(N al - 4)/4} * ||R||^-al.
    """
    N, al = params.dim, params.alpha
    if not (0 < al and (N <= 2 or al < 4.0 / (N - 2))):
        raise InvalidInputError("alpha outside (0, 4/(N-2))")
    s2 = 4.0 - al * (N - 2)
    return (2 * (al + 2) / (N * al)
            * (s2 / (N * al)) ** ((N * al - 4) / 4.0)
            * R_l2 ** (-al))


def _rearrange_radial(values: np.ndarray, grid: RadialGrid, dim: int) -> np.ndarray:
    """Decreasing rearrangement of a radial function, with exact shell measures.

    Same cell-measure scheme as `schwarz_rearrange`, but the cells are the
    radial shells themselves, so no angular lattice noise enters (this is
    what keeps the minimizer accurate for dim >= 2).
    """
    from .core import ball_volume
    r = grid.nodes
    dr = grid.dr
    vol = ball_volume(dim)
    lo_m = vol * np.clip(r - 0.5 * dr, 0.0, None) ** dim
    hi_m = vol * (r + 0.5 * dr) ** dim
    w = hi_m - lo_m
    order = np.argsort(np.abs(values))[::-1]
    v_sorted = np.abs(values)[order]
    w_sorted = w[order]
    m_edges = np.concatenate(([0.0], np.cumsum(w_sorted)))
    cum = np.concatenate(([0.0], np.cumsum(v_sorted * w_sorted)))
    c_lo = np.interp(lo_m, m_edges, cum, right=cum[-1])
    c_hi = np.interp(hi_m, m_edges, cum, right=cum[-1])
    return (c_hi - c_lo) / w


def _radial_laplacian(values: np.ndarray, grid: RadialGrid, dim: int) -> np.ndarray:
    from .core import _apply_stencil_1d
    d1 = _apply_stencil_1d(values, grid.dr, 1)
    d2 = _apply_stencil_1d(values, grid.dr, 2)
    lap = np.empty_like(values)
    lap[0] = dim * d2[0]
    lap[1:] = d2[1:] + (dim - 1) / grid.nodes[1:] * d1[1:]
    return lap


def _normalize_profile(profile: RadialProfile) -> RadialProfile:
    """Rescale a radial profile so that mass = grad_sq = 1."""
    n = radial_norms(profile)
    A = math.sqrt(n.mass)
    B = math.sqrt(n.grad_sq)
    N = profile.dim
    lam_sc = A / B
    mu = A ** ((N - 2) / 2.0) / B ** (N / 2.0)
    vals = mu * sample_radial(profile, lam_sc * profile.grid.nodes)
    return RadialProfile(profile.grid, vals, N)


def gn_constant_minimize(params: ModelParams, grid: RadialGrid | None = None,
                         max_iter: int = 100000, tol: float = 1e-10,
                         step0: float = 0.1, init=None,
                         with_info: bool = False):
    """Minimize the Weinstein quotient J directly; returns 1/inf J.

    Projected descent on radial representatives: a gradient step on J in
    field space, then decreasing rearrangement, then renormalization of the
    two constraint norms (held at ``mass = grad_sq = 1`` by a soft log-square
    penalty, which vanishes at the constraint and does not move the minimizer
    because J is invariant under both rescalings).  Stops when the relative
    J-change drops below `tol` on two consecutive accepted steps.  Independent
    of the closed-form route through the ground-state norm.

    The iteration works on the even periodic extension of the radial
    profile, where the spectral derivative and the H^1 smoothing of the
    gradient are symmetric operators; this keeps descent directions smooth
    through r = 0 and leaves no finite-difference null modes for the
    optimizer to exploit.
    """
    if grid is None:
        grid = RadialGrid(20.0, 2049)
    N, al = params.dim, params.alpha
    p = float(al + 2)
    s2 = 4.0 - al * (N - 2)
    kappa = 0.5  # weight of the norm-pinning penalty

    if init is None:
        # Gaussian with width matched so that mass = grad_sq at the start
        f0 = np.exp(-0.5 * grid.nodes ** 2)
        n0 = radial_norms(RadialProfile(grid, f0, N))
        width = math.sqrt(n0.mass / n0.grad_sq)
        vals = np.exp(-0.5 * (grid.nodes / width) ** 2)
    elif isinstance(init, GroundState):
        vals = sample_radial(init.profile, grid.nodes)
    elif isinstance(init, RadialProfile):
        vals = sample_radial(init, grid.nodes)
    elif isinstance(init, WaveField):
        vals = sample_radial(schwarz_rearrange(init), grid.nodes)
    else:
        vals = np.asarray(init, dtype=float)
    vals = _rearrange_radial(np.abs(vals), grid, N)
    vals = _normalize_profile(RadialProfile(grid, vals, N)).values

    n_pts = grid.n_points
    m = 2 * (n_pts - 1)
    dr = grid.dr
    k = 2.0 * math.pi * np.fft.fftfreq(m, d=dr)
    ik = 1j * k
    j_idx = np.arange(m)
    r_circ = dr * np.minimum(j_idx, m - j_idx)
    # half of the full-space radial weight: the circle visits each radius twice
    w_circ = 0.5 * sphere_area(N) * r_circ ** (N - 1) * dr

    def to_circle(f):
        return np.concatenate([f, f[-2:0:-1]])

    def objective(F):
        DF = np.fft.ifft(ik * np.fft.fft(F)).real
        mass = w_circ @ (F * F)
        grad = w_circ @ (DF * DF)
        lp = w_circ @ (np.abs(F) ** p)
        if not (mass > 0 and grad > 0 and lp > 0):
            raise InvalidInputError("minimizer iterate degenerated to zero")
        val = ((N * al / 4.0) * math.log(grad) + (s2 / 4.0) * math.log(mass)
               - math.log(lp)
               + kappa * (math.log(mass) ** 2 + math.log(grad) ** 2))
        g = (-((N * al / 4.0) + 2 * kappa * math.log(grad))
             * 2.0 * np.fft.ifft(ik * np.fft.fft(w_circ * DF)).real / grad
             + ((s2 / 4.0) + 2 * kappa * math.log(mass)) * 2.0 * w_circ * F / mass
             - p * w_circ * np.abs(F) ** (p - 1) * np.sign(F) / lp)
        logJ = ((N * al / 4.0) * math.log(grad) + (s2 / 4.0) * math.log(mass)
                - math.log(lp))
        return val, g, logJ

    def project(F):
        f = np.maximum(F[:n_pts], 0.0)
        if np.any(np.diff(f) > 0):
            f = _rearrange_radial(f, grid, N)
        return to_circle(f)

    F = to_circle(vals)
    val, g, logJ = objective(F)
    eta = step0
    slow = 0
    iterations = 0
    for iterations in range(1, max_iter + 1):
        smoothed = np.fft.ifft(np.fft.fft(g) / (1.0 + k * k)).real
        accepted = False
        for d in (smoothed, g):
            dn = np.max(np.abs(d))
            if dn == 0.0:
                continue
            e = min(eta * 4.0, 2.0)
            while e > 1e-15:
                trial = project(F - (e / dn) * d)
                val_t, g_t, logJ_t = objective(trial)
                if val_t < val:
                    accepted = True
                    break
                e *= 0.5
            if accepted:
                eta = e
                break
        if not accepted:
            break
        dlogJ = abs(logJ - logJ_t)
        F, val, g, logJ = trial, val_t, g_t, logJ_t
        slow = slow + 1 if dlogJ <= tol else 0
        if slow >= 2:
            break
    else:
        raise ConvergenceFailureError("J minimization did not converge")

    out = radial_norms(RadialProfile(grid, F[:n_pts], N), exponents=(p,))
    c_star = 1.0 / weinstein_J(out, params)
    if with_info:
        return c_star, {"iterations": iterations,
                        "profile": RadialProfile(grid, F[:n_pts], N)}
    return c_star


# ---------------------------------------------------------------------------
# thresholds
# ---------------------------------------------------------------------------

@dataclass
class ThresholdSet:
    """||R||_{L^2} of the unit ground state plus the curve evaluators."""

    params: ModelParams
    R_l2: float
    C_star: float

    @classmethod
    def from_ground_state(cls, R_unit: GroundState) -> "ThresholdSet":
        p = R_unit.params
        if not (p.lam == 1.0 and p.omega == 1.0):
            raise InvalidInputError("ThresholdSet needs the unit (lam=omega=1) state")
        return cls(params=p, R_l2=R_unit.l2,
                   C_star=gn_constant_formula(p, R_unit.l2))

    def _check(self, a: float):
        if not (a > 0):
            raise InvalidInputError("threshold argument must be positive")
        if not self.params.is_supercritical:
            raise UnsupportedRegimeError("thresholds need alpha > 4/dim")

    # all evaluators work in log space so that the large exponents occurring
    # near the critical limit cannot overflow
    def _log_r_star(self, a: float) -> float:
        N, al, lam = self.params.dim, self.params.alpha, self.params.lam
        s2 = 4.0 - al * (N - 2)
        log_L = math.log(self.R_l2) - math.log(lam) / al
        return ((N * al - 4) / (2 * s2) * math.log(N * al / s2)
                + 2 * al / s2 * log_L
                - (N * al - 4) / s2 * math.log(a))

    def r_star(self, a: float) -> float:
        self._check(a)
        return math.exp(self._log_r_star(a))

    def gamma_star(self, a: float) -> float:
        self._check(a)
        N, al = self.params.dim, self.params.alpha
        s2 = 4.0 - al * (N - 2)
        return math.exp((N * al - 4) / (2 * s2) * math.log((N * al - 4) / (N * al))
                        + self._log_r_star(a))

    def rho_star(self, a: float) -> float:
        self._check(a)
        N, al = self.params.dim, self.params.alpha
        s2 = 4.0 - al * (N - 2)
        return math.exp(2.0 / s2 * math.log(N * al / 4.0) + self._log_r_star(a))

    def _log_r_star_inv(self, a: float) -> float:
        N, al, lam = self.params.dim, self.params.alpha, self.params.lam
        s2 = 4.0 - al * (N - 2)
        log_L = math.log(self.R_l2) - math.log(lam) / al
        return (0.5 * math.log(N * al / s2)
                + 2 * al / (N * al - 4) * log_L
                - s2 / (N * al - 4) * math.log(a))

    def r_star_inv(self, a: float) -> float:
        self._check(a)
        return math.exp(self._log_r_star_inv(a))

    def gamma_star_inv(self, a: float) -> float:
        self._check(a)
        N, al = self.params.dim, self.params.alpha
        return math.sqrt((N * al - 4) / (N * al)) * self.r_star_inv(a)

    def rho_star_inv(self, a: float) -> float:
        self._check(a)
        N, al = self.params.dim, self.params.alpha
        return math.exp(2.0 / (N * al - 4) * math.log(N * al / 4.0)
                        + self._log_r_star_inv(a))


def evaluate_thresholds(ts: ThresholdSet, a: float) -> tuple:
    """(gamma_*(a), r_*(a), rho_*(a))."""
    return ts.gamma_star(a), ts.r_star(a), ts.rho_star(a)


def invert_thresholds(ts: ThresholdSet, a: float) -> tuple:
    """(gamma_*^{-1}(a), r_*^{-1}(a), rho_*^{-1}(a))."""
    return ts.gamma_star_inv(a), ts.r_star_inv(a), ts.rho_star_inv(a)


@dataclass
class RegionLabel:
    """Classification of an (L^2, gradient)-norm pair against the curves."""

    label: str  # guaranteed-global | blow-up-constructible | gap
    e_sign: str | None = None  # positive | zero | negative (blow-up data only)


def classify_plane_point(ts: ThresholdSet, a: float, b: float) -> RegionLabel:
    """Classify the point (mass-norm a, gradient-norm b) against the curves."""
    if not (a > 0 and b > 0):
        raise InvalidInputError("a and b must be positive")
    if a <= ts.gamma_star(b):
        return RegionLabel("guaranteed-global")
    if a > ts.r_star(b):
        rho = ts.rho_star(b)
        if abs(a - rho) <= 1e-12 * rho:
            sign = "zero"
        elif a < rho:
            sign = "positive"
        else:
            sign = "negative"
        return RegionLabel("blow-up-constructible", e_sign=sign)
    return RegionLabel("gap")


@dataclass
class VariationalContext:
    """Ground state at (omega, lam) together with the action level m."""

    params: ModelParams
    ground_state: GroundState
    m: float

    @classmethod
    def from_unit_state(cls, params: ModelParams, R_unit: GroundState) -> "VariationalContext":
        psi = rescale_unit_to_model(R_unit, params.omega, params.lam)
        m = action_S(psi, params)
        q = constraint_Q(psi, params)
        if not (m > 0) or abs(q) > 1e-6 * psi.norms.grad_sq:
            raise ConvergenceFailureError("ground state fails the M-membership check")
        return cls(params=params, ground_state=psi, m=m)
