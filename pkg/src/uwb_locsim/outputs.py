"""Result files for deployment studies.

Three artifacts per study: a per-point CSV (one row per run and grid
point), an ECDF CSV of the 2D errors for plotting, and an aggregate
JSON report. All floats are written in shortest round-trip form and no
timestamps are recorded, so identical runs produce byte-identical
files.
"""

from __future__ import annotations

import json
import os

from .scenarios import scenario_to_dict
from .simulator import RunStatistics, Scenario

POINTS_CSV = "points.csv"
ECDF_CSV = "ecdf.csv"
REPORT_JSON = "report.json"

_POINTS_HEADER = "run,px,py,pz,ex,ey,ez,err2d_m,err3d_m,conditions"


def _fmt(value: float) -> str:
    return str(float(value))


def write_points_csv(stats: RunStatistics, path: str) -> None:
    n_runs, n_points = stats.err2d.shape
    with open(path, "w", encoding="utf-8", newline="\n") as out:
        out.write(_POINTS_HEADER + "\n")
        for run in range(n_runs):
            for p in range(n_points):
                px, py, pz = stats.grid[p]
                ex, ey, ez = stats.estimates[run, p]
                out.write(
                    f"{run},{_fmt(px)},{_fmt(py)},{_fmt(pz)},"
                    f"{_fmt(ex)},{_fmt(ey)},{_fmt(ez)},"
                    f"{_fmt(stats.err2d[run, p])},{_fmt(stats.err3d[run, p])},"
                    f"{stats.conditions[p]}\n"
                )


def write_ecdf_csv(stats: RunStatistics, path: str) -> None:
    agg = stats.aggregate_2d
    with open(path, "w", encoding="utf-8", newline="\n") as out:
        out.write("err2d_m,cum_prob\n")
        for value, prob in zip(agg.ecdf_values, agg.ecdf_probs):
            out.write(f"{_fmt(value)},{_fmt(prob)}\n")


def build_report(stats: RunStatistics, scenario: Scenario) -> dict:
    n_runs, n_points = stats.err2d.shape
    return {
        "scenario": scenario_to_dict(scenario),
        "grid_points": n_points,
        "runs": n_runs,
        "solves": n_runs * n_points,
        "failed_solves": stats.n_failed,
        "error_2d_m": stats.aggregate_2d.to_dict(),
        "error_3d_m": stats.aggregate_3d.to_dict(),
    }


def write_report_json(stats: RunStatistics, scenario: Scenario, path: str) -> dict:
    report = build_report(stats, scenario)
    with open(path, "w", encoding="utf-8", newline="\n") as out:
        json.dump(report, out, indent=2, sort_keys=True)
        out.write("\n")
    return report


def write_outputs(stats: RunStatistics, scenario: Scenario, outdir: str) -> dict:
    """Write all three artifacts into ``outdir``; returns the report."""
    os.makedirs(outdir, exist_ok=True)
    write_points_csv(stats, os.path.join(outdir, POINTS_CSV))
    write_ecdf_csv(stats, os.path.join(outdir, ECDF_CSV))
    return write_report_json(stats, scenario, os.path.join(outdir, REPORT_JSON))
