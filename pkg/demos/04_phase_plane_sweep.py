#!/usr/bin/env python3
"""
Sweeping the (gradient, mass) plane
===================================

Runs a grid of initial data across the threshold curves and renders the
outcome map: each point is evolved, classified by the analytic curves, and
colored by what the dynamics actually did.  With `reproducible = True` the
CSV is byte-identical no matter how many worker processes are used.
"""

from nlslab import SweepConfig, run_sweep, write_sweep_artifacts

config = SweepConfig.from_mapping({
    "dim": 1, "alpha": 8.0,
    "a_min": 0.9, "a_max": 1.6, "a_count": 4,
    "b_min": 1.0, "b_max": 1.5, "b_count": 4,
    "t_end": 1.0, "dt0": 1e-3,
    "half_width": 45.0, "points_per_axis": 8192,
    "growth_factor": 1e3, "window": 4, "max_steps": 100000,
    "parallelism": 4, "reproducible": "true",
    "cache_dir": ".sweep-cache",
})

result = run_sweep(config)
for p in result.points:
    est = f", T* ~ {p.blow_up_time_estimate:.3f}" if p.blow_up_time_estimate else ""
    print(f"a={p.a:.3f} b={p.b:.3f}  {p.label:<22} -> {p.status}{est}")

paths = write_sweep_artifacts(result, "sweep_output")
print(f"\nwrote {paths['csv']} and {paths['svg']}")
