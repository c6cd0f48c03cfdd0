"""Plane sweeps over (gradient norm b, mass norm a) with deterministic output.

For each grid point the theoretical region label is computed from the
threshold curves, a datum is built (the explicit blow-up datum where it
exists and the family asks for it, a width-matched Gaussian otherwise), the
field is evolved, and the empirical outcome is recorded.  Results are merged
in row-major (a, b) order regardless of execution order, so the CSV is
byte-identical across parallelism degrees.
"""

from __future__ import annotations

import hashlib
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from .core import CartesianGrid, RadialGrid, RadialProfile, WaveField
from .errors import InvalidInputError, NlsLabError
from .evolution import split_step_evolve, UNDECIDED
from .functionals import ThresholdSet, classify_plane_point
from .ground_state import GroundState, ModelParams, solve_shooting
from .initial_data import gaussian_with_norms, make_phi_ab

__all__ = [
    "SweepConfig",
    "SweepPoint",
    "SweepResult",
    "run_sweep",
    "cached_unit_ground_state",
    "sweep_csv",
    "sweep_svg",
    "write_sweep_artifacts",
]

_FAMILIES = ("phi_ab", "gaussian")


@dataclass
class SweepConfig:
    """Sweep over log-spaced a and b ranges."""

    params: ModelParams
    a_min: float
    a_max: float
    a_count: int
    b_min: float
    b_max: float
    b_count: int
    t_end: float = 1.0
    dt0: float = 1e-3
    half_width: float = 20.0
    points_per_axis: int = 4096
    family: str = "phi_ab"
    detector_opts: dict | None = None
    max_steps: int = 200_000
    parallelism: int = 1
    reproducible: bool = False
    out_dir: str = "."
    cache_dir: str | None = None

    def __post_init__(self):
        if not (0 < self.a_min <= self.a_max and 0 < self.b_min <= self.b_max):
            raise InvalidInputError("ranges must be positive and ordered")
        if self.a_count < 1 or self.b_count < 1:
            raise InvalidInputError("counts must be >= 1")
        if self.family not in _FAMILIES:
            raise InvalidInputError(f"family must be one of {_FAMILIES}")
        if self.parallelism < 1:
            raise InvalidInputError("parallelism must be >= 1")
        if not (self.t_end > 0 and self.dt0 > 0):
            raise InvalidInputError("t_end and dt0 must be positive")

    def a_values(self) -> np.ndarray:
        return np.geomspace(self.a_min, self.a_max, self.a_count)

    def b_values(self) -> np.ndarray:
        return np.geomspace(self.b_min, self.b_max, self.b_count)

    _KEYS = ("dim", "alpha", "lam", "omega", "a_min", "a_max", "a_count",
             "b_min", "b_max", "b_count", "t_end", "dt0", "half_width",
             "points_per_axis", "family", "parallelism", "reproducible",
             "out_dir", "cache_dir", "max_steps", "growth_factor", "window")

    @classmethod
    def from_file(cls, path, overrides: dict | None = None) -> "SweepConfig":
        """Key=value config file; `overrides` (e.g. CLI flags) win."""
        kv = {}
        with open(path) as f:
            for ln, raw in enumerate(f, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise InvalidInputError(f"{path}:{ln}: expected key=value")
                key, val = (s.strip() for s in line.split("=", 1))
                if key not in cls._KEYS:
                    raise InvalidInputError(f"{path}:{ln}: unknown key {key!r}")
                kv[key] = val
        if overrides:
            kv.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_mapping(kv)

    @classmethod
    def from_mapping(cls, kv: dict) -> "SweepConfig":
        def num(key, default=None, cast=float):
            if key not in kv or kv[key] is None:
                if default is None:
                    raise InvalidInputError(f"missing config key {key!r}")
                return default
            return cast(kv[key])

        params = ModelParams(num("dim", 1, int), num("alpha", 8.0),
                             lam=num("lam", 1.0), omega=num("omega", 1.0))
        rep = kv.get("reproducible", False)
        if isinstance(rep, str):
            rep = rep.lower() in ("1", "true", "yes", "on")
        return cls(params=params,
                   a_min=num("a_min"), a_max=num("a_max"),
                   a_count=num("a_count", 1, int),
                   b_min=num("b_min"), b_max=num("b_max"),
                   b_count=num("b_count", 1, int),
                   t_end=num("t_end", 1.0), dt0=num("dt0", 1e-3),
                   half_width=num("half_width", 20.0),
                   points_per_axis=num("points_per_axis", 4096, int),
                   family=kv.get("family", "phi_ab"),
                   detector_opts=({
                       **({"growth_factor": num("growth_factor")}
                          if "growth_factor" in kv else {}),
                       **({"window": num("window", cast=int)}
                          if "window" in kv else {}),
                   } or None) if ("growth_factor" in kv or "window" in kv) else None,
                   max_steps=num("max_steps", 200_000, int),
                   parallelism=num("parallelism", 1, int),
                   reproducible=bool(rep),
                   out_dir=kv.get("out_dir", "."),
                   cache_dir=kv.get("cache_dir"))


@dataclass
class SweepPoint:
    """One (a, b) grid point: theory label plus empirical outcome."""

    a: float
    b: float
    family_used: str
    label: str
    e_sign: str
    status: str
    e_initial: float
    blow_up_time_estimate: float | None
    margin: float
    reason: str = ""


@dataclass
class SweepResult:
    points: list = dc_field(default_factory=list)
    config: SweepConfig | None = None


# ---------------------------------------------------------------------------
# ground-state disk cache
# ---------------------------------------------------------------------------

def _grid_hash(grid: RadialGrid) -> str:
    return hashlib.sha256(
        f"{grid.r_max!r}:{grid.n_points!r}".encode()).hexdigest()[:16]


def cached_unit_ground_state(params: ModelParams, cache_dir: str | None,
                             grid: RadialGrid | None = None) -> GroundState:
    """Shooting solution for the unit state, memoized on disk.

    Cache key: (dim, alpha, lam, omega, radial-grid hash).
    """
    unit = ModelParams(params.dim, params.alpha, lam=1.0, omega=1.0)
    if cache_dir is None:
        return solve_shooting(unit, grid)
    os.makedirs(cache_dir, exist_ok=True)
    from .ground_state import default_radial_grid
    g = grid if grid is not None else default_radial_grid(unit)
    key = (f"gs-{unit.dim}-{unit.alpha!r}-{unit.lam!r}-{unit.omega!r}-"
           f"{_grid_hash(g)}.npz")
    path = os.path.join(cache_dir, key)
    if os.path.exists(path):
        data = np.load(path)
        from .core import NormSet
        profile = RadialProfile(RadialGrid(float(data["r_max"]),
                                           int(data["n_points"])),
                                data["values"], unit.dim)
        variance = float(data["variance"])
        norms = NormSet(mass=float(data["mass"]),
                        grad_sq=float(data["grad_sq"]),
                        lp={float(p): float(v) for p, v in
                            zip(data["lp_p"], data["lp_v"])},
                        variance=None if variance < 0 else variance)
        return GroundState(profile=profile, params=unit, norms=norms,
                           method=str(data["method"]),
                           residual_linf=float(data["residual"]))
    gs = solve_shooting(unit, g)
    lp_items = sorted(gs.norms.lp.items())
    variance = -1.0 if gs.norms.variance is None else gs.norms.variance
    np.savez(path, values=gs.profile.values, r_max=gs.profile.grid.r_max,
             n_points=gs.profile.grid.n_points, mass=gs.norms.mass,
             grad_sq=gs.norms.grad_sq, variance=variance,
             lp_p=np.array([p for p, _ in lp_items]),
             lp_v=np.array([v for _, v in lp_items]),
             method=gs.method, residual=gs.residual_linf)
    return gs


# ---------------------------------------------------------------------------
# per-point worker
# ---------------------------------------------------------------------------

def _run_point(args) -> tuple:
    """Worker: returns (index, SweepPoint); never raises."""
    (idx, a, b, cfg_fields, R_values, R_r_max, R_n_points) = args
    params = ModelParams(cfg_fields["dim"], cfg_fields["alpha"],
                         lam=cfg_fields["lam"], omega=cfg_fields["omega"])
    try:
        unit = ModelParams(params.dim, params.alpha, lam=1.0, omega=1.0)
        profile = RadialProfile(RadialGrid(R_r_max, R_n_points),
                                R_values, params.dim)
        from .core import radial_norms
        norms = radial_norms(profile, exponents=(params.alpha + 2.0,),
                             with_variance=True)
        R_unit = GroundState(profile=profile, params=unit, norms=norms,
                             method="cache", residual_linf=0.0)
        ts = ThresholdSet.from_ground_state(R_unit)
        label = classify_plane_point(ts, a, b)
        grid = CartesianGrid(dim=params.dim,
                             half_width=cfg_fields["half_width"],
                             points_per_axis=cfg_fields["points_per_axis"])
        family = cfg_fields["family"]
        if family == "phi_ab" and a > ts.r_star(b):
            cert = make_phi_ab(a, b, ts, R_unit, grid=grid)
            field = cert.field
            e_init = cert.e_value
            used = "phi_ab"
        else:
            field = gaussian_with_norms(a, b, grid)
            from .core import field_norms
            from .functionals import energy
            ns = field_norms(field, exponents=(params.alpha + 2.0,))
            e_init = energy(ns, params)
            used = "gaussian"
        out, series = split_step_evolve(field, params, cfg_fields["t_end"],
                                        dt0=cfg_fields["dt0"],
                                        observer_stride=5,
                                        detector_opts=cfg_fields["detector_opts"],
                                        max_steps=cfg_fields["max_steps"])
        g = series.column("grad_sq")
        margin = float(ts.r_star_inv(a) ** 2 - g.max())
        point = SweepPoint(a=a, b=b, family_used=used, label=label.label,
                           e_sign=label.e_sign or "", status=out.status,
                           e_initial=e_init,
                           blow_up_time_estimate=out.blow_up_time_estimate,
                           margin=margin, reason=out.reason)
    except NlsLabError as exc:
        point = SweepPoint(a=a, b=b, family_used="", label="", e_sign="",
                           status=UNDECIDED, e_initial=float("nan"),
                           blow_up_time_estimate=None, margin=float("nan"),
                           reason=f"{type(exc).__name__}: {exc}")
    return idx, point


def run_sweep(config: SweepConfig) -> SweepResult:
    """Evaluate every (a, b) grid point; failures become undecided rows."""
    R_unit = cached_unit_ground_state(config.params, config.cache_dir)
    cfg_fields = {
        "dim": config.params.dim, "alpha": config.params.alpha,
        "lam": config.params.lam, "omega": config.params.omega,
        "t_end": config.t_end, "dt0": config.dt0,
        "half_width": config.half_width,
        "points_per_axis": config.points_per_axis,
        "family": config.family, "detector_opts": config.detector_opts,
        "max_steps": config.max_steps,
    }
    tasks = []
    idx = 0
    for a in config.a_values():
        for b in config.b_values():
            tasks.append((idx, float(a), float(b), cfg_fields,
                          R_unit.profile.values,
                          R_unit.profile.grid.r_max,
                          R_unit.profile.grid.n_points))
            idx += 1
    points = [None] * len(tasks)
    if config.parallelism == 1:
        for task in tasks:
            i, p = _run_point(task)
            points[i] = p
    else:
        with ProcessPoolExecutor(max_workers=config.parallelism) as pool:
            for i, p in pool.map(_run_point, tasks):
                points[i] = p
    return SweepResult(points=points, config=config)


# ---------------------------------------------------------------------------
# artifacts
# ---------------------------------------------------------------------------

_CSV_HEADER = ("a,b,family,label,e_sign,status,e_initial,"
               "blow_up_time_estimate,margin,reason")


def sweep_csv(result: SweepResult) -> str:
    """Deterministic CSV text, one row per grid point in row-major order."""
    lines = [_CSV_HEADER]
    for p in result.points:
        est = "" if p.blow_up_time_estimate is None else "%.17g" % p.blow_up_time_estimate
        reason = p.reason.replace(",", ";").replace("\n", " ")
        lines.append(",".join([
            "%.17g" % p.a, "%.17g" % p.b, p.family_used, p.label, p.e_sign,
            p.status, "%.17g" % p.e_initial, est, "%.17g" % p.margin, reason]))
    return "\n".join(lines) + "\n"


_STATUS_COLOR = {
    "global-on-window": "#2166ac",
    "blow-up-detected": "#b2182b",
    "undecided": "#999999",
    "diagnostics-violated": "#f4a582",
}


def sweep_svg(result: SweepResult, ts: ThresholdSet | None = None) -> str:
    """Self-contained SVG: threshold curves over the (b, a) plane + outcomes."""
    cfg = result.config
    if ts is None:
        R_unit = cached_unit_ground_state(cfg.params, cfg.cache_dir)
        ts = ThresholdSet.from_ground_state(R_unit)
    pts = result.points
    bs = [p.b for p in pts]
    as_ = [p.a for p in pts]
    lo_b, hi_b = min(bs) / 1.5, max(bs) * 1.5
    lo_a, hi_a = min(as_) / 1.5, max(as_) * 1.5
    W, H, M = 640, 480, 60

    def x_of(b):
        return M + (W - 2 * M) * (math.log(b / lo_b) / math.log(hi_b / lo_b))

    def y_of(a):
        return H - M - (H - 2 * M) * (math.log(a / lo_a) / math.log(hi_a / lo_a))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<rect x="{M}" y="{M}" width="{W - 2 * M}" height="{H - 2 * M}" '
        'fill="none" stroke="#333"/>',
    ]
    curves = [("gamma*", ts.gamma_star, "#2166ac"),
              ("r*", ts.r_star, "#333333"),
              ("rho*", ts.rho_star, "#b2182b")]
    b_line = np.geomspace(lo_b, hi_b, 200)
    for name, fn, color in curves:
        coords = []
        for b in b_line:
            a = fn(float(b))
            if lo_a <= a <= hi_a:
                coords.append(f"{x_of(b):.2f},{y_of(a):.2f}")
        if coords:
            parts.append(f'<polyline points="{" ".join(coords)}" fill="none" '
                         f'stroke="{color}" stroke-width="1.5"/>')
            parts.append(f'<text x="{W - M + 4}" y="{M + 16 * curves.index((name, fn, color))+12}" '
                         f'font-size="11" fill="{color}">{name}</text>')
    for p in pts:
        color = _STATUS_COLOR.get(p.status, "#000000")
        parts.append(f'<circle cx="{x_of(p.b):.2f}" cy="{y_of(p.a):.2f}" r="5" '
                     f'fill="{color}" stroke="#000" stroke-width="0.5">'
                     f'<title>a={p.a:.4g} b={p.b:.4g} {p.label} {p.status}</title>'
                     '</circle>')
    parts.append(f'<text x="{W // 2}" y="{H - 16}" font-size="12" '
                 'text-anchor="middle">gradient norm b (log)</text>')
    parts.append(f'<text x="16" y="{H // 2}" font-size="12" text-anchor="middle" '
                 f'transform="rotate(-90 16 {H // 2})">mass norm a (log)</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_sweep_artifacts(result: SweepResult, out_dir: str) -> dict:
    """Write sweep.csv and sweep.svg under `out_dir`; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "sweep.csv")
    svg_path = os.path.join(out_dir, "sweep.svg")
    with open(csv_path, "w") as f:
        f.write(sweep_csv(result))
    with open(svg_path, "w") as f:
        f.write(sweep_svg(result))
    return {"csv": csv_path, "svg": svg_path}
