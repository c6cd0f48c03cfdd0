"""nlslab: a numerical laboratory for the focusing nonlinear Schroedinger
equation i u_t + Laplace(u) + lam |u|^alpha u = 0 in the mass-supercritical,
energy-subcritical regime.

The package computes the ground state two independent ways, evaluates the
explicit global-existence / blow-up thresholds in the (gradient, mass) plane,
and verifies both against a split-step spectral evolution with conservation,
virial, bootstrap, and blow-up diagnostics.
"""

from .errors import (BoundaryLeakageError, ConvergenceFailureError,
                     FormatError, InvalidInputError, NlsLabError,
                     NoGroundStateError, PreconditionViolationError,
                     UnsupportedRegimeError)
from .core import (CartesianGrid, NormSet, RadialGrid, RadialProfile,
                   WaveField, ball_volume, fd_weights, field_norms,
                   radial_derivative, radial_norms, sample_radial,
                   schwarz_rearrange, sphere_area)
from .ground_state import (GroundState, ModelParams, default_radial_grid,
                           pohozaev_residuals, rescale_unit_to_model,
                           solve_fixed_point, solve_shooting)
from .functionals import (RegionLabel, ThresholdSet, VariationalContext,
                          action_S, beta_star, classify_plane_point,
                          constraint_Q, dilate_P, energy,
                          evaluate_thresholds, gn_constant_formula,
                          gn_constant_minimize, invert_thresholds,
                          weinstein_J)
from .initial_data import (PhiAbCertificate, auto_box, embed_radial,
                           gaussian_with_norms, make_phi_ab,
                           polish_stationary)
from .evolution import (BootstrapBound, DetectorReport, MonitorReport,
                        ObservableRecord, ObservableSeries, RunOutcome,
                        blow_up_detector, bootstrap_monitor,
                        split_step_evolve, virial_residuals)
from .io import (CHECKPOINT_MAGIC, CHECKPOINT_VERSION, checkpoint_read,
                 checkpoint_write, observables_csv_write, profile_csv_write)
from .sweep import (SweepConfig, SweepPoint, SweepResult,
                    cached_unit_ground_state, run_sweep, sweep_csv,
                    sweep_svg, write_sweep_artifacts)
from .verify import CheckResult, VerifyReport, run_verify

__version__ = "1.0.0"

__all__ = [
    "__version__",
    # errors
    "NlsLabError", "InvalidInputError", "UnsupportedRegimeError",
    "PreconditionViolationError", "ConvergenceFailureError",
    "NoGroundStateError", "BoundaryLeakageError", "FormatError",
    # core
    "RadialGrid", "CartesianGrid", "RadialProfile", "WaveField", "NormSet",
    "sphere_area", "ball_volume", "fd_weights", "radial_derivative",
    "radial_norms", "field_norms", "schwarz_rearrange", "sample_radial",
    # ground state
    "ModelParams", "GroundState", "default_radial_grid", "solve_shooting",
    "solve_fixed_point", "pohozaev_residuals", "rescale_unit_to_model",
    # functionals and thresholds
    "energy", "action_S", "constraint_Q", "beta_star", "dilate_P",
    "weinstein_J", "gn_constant_formula", "gn_constant_minimize",
    "ThresholdSet", "evaluate_thresholds", "invert_thresholds",
    "RegionLabel", "classify_plane_point", "VariationalContext",
    # initial data
    "PhiAbCertificate", "make_phi_ab", "gaussian_with_norms", "embed_radial",
    "auto_box", "polish_stationary",
    # evolution
    "ObservableRecord", "ObservableSeries", "BootstrapBound", "MonitorReport",
    "DetectorReport", "RunOutcome", "split_step_evolve", "virial_residuals",
    "bootstrap_monitor", "blow_up_detector",
    # io
    "CHECKPOINT_MAGIC", "CHECKPOINT_VERSION", "checkpoint_write",
    "checkpoint_read", "observables_csv_write", "profile_csv_write",
    # sweep
    "SweepConfig", "SweepPoint", "SweepResult", "run_sweep",
    "cached_unit_ground_state", "sweep_csv", "sweep_svg",
    "write_sweep_artifacts",
    # verify
    "CheckResult", "VerifyReport", "run_verify",
]
