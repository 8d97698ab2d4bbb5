"""Scenario configuration, execution, diagnostics output and sweeps.

Configs are JSON; every omitted key is filled from the documented
defaults and the fully resolved config is echoed into the output report
for provenance.  Time series go to CSV, structured reports to JSON,
plots to dependency-free SVG.
"""

from __future__ import annotations

import copy
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import certificates as cert
from . import characteristics as chars
from . import evolution as ev
from .errors import ConfigurationError
from .grid import GridField, field_from_function

SCHEMA_VERSION = 1

DEFAULTS = {
    "equation": {"alpha": 1.0, "beta": 0.0, "nu": 1.0},
    "initial_data": {"kind": "sine", "amplitude": 1.0, "width": 1.0,
                     "phase": 0.0, "mode": 1, "samples": None},
    "grid": {"half_length": math.pi, "n_points": 256},
    "time": {"t_end": 1.0, "cfl": 0.5, "dt_min": 1e-10, "dt_max": 1e-2,
             "slope_safety": 0.1, "sample_stride": 1,
             "breaking_ratio": 100.0},
    "monitors": {
        "g5": {"enabled": True, "epsilon": 0.1},
        "b7": {"enabled": False, "delta": 1.0},
        "nesting": {"enabled": False, "gamma": 1.0 / 3.0, "n_labels": 129},
        "q_monotone": {"enabled": True},
    },
    "certificates": {"enabled": False, "epsilon": 0.015, "g": 1.0, "n_max": 8},
    "outputs": {"csv_path": None, "json_path": None, "svg_path": None,
                "snapshot_stride": 0},
}

CSV_COLUMNS = ["t", "m", "q", "argmin_x", "mass", "l2_norm", "dt",
               "g5_ok", "b7_ok", "riccati_residual"]


@dataclass
class ScenarioConfig:
    data: dict

    def __getitem__(self, key):
        return self.data[key]


@dataclass
class RunArtifacts:
    exit_classification: str
    csv_path: str | None = None
    json_path: str | None = None
    svg_paths: list = field(default_factory=list)
    report: dict = field(default_factory=dict)
    trajectory: ev.Trajectory | None = None
    bracket_violation: bool = False


def _merge_with_defaults(user: dict, defaults: dict, path: str = "") -> dict:
    if not isinstance(user, dict):
        raise ConfigurationError(f"expected object at '{path or 'top level'}'")
    unknown = sorted(set(user) - set(defaults))
    if unknown:
        raise ConfigurationError(
            f"unknown config keys at '{path or 'top level'}': {', '.join(unknown)}")
    merged = {}
    for key, default in defaults.items():
        if key in user and isinstance(default, dict):
            merged[key] = _merge_with_defaults(user[key], default,
                                              f"{path}{key}.")
        elif key in user:
            merged[key] = user[key]
        else:
            merged[key] = copy.deepcopy(default)
    return merged


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigurationError(message)


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a JSON scenario config, applying defaults."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
    cfg = _merge_with_defaults(raw, DEFAULTS)

    g = cfg["grid"]
    _require(g["half_length"] > 0, "grid.half_length must be positive")
    n = g["n_points"]
    _require(n >= 16 and (n & (n - 1)) == 0,
             "grid.n_points must be a power of two >= 16")
    t = cfg["time"]
    _require(t["t_end"] > 0, "time.t_end must be positive")
    _require(0 < t["cfl"] <= 1, "time.cfl must lie in (0, 1]")
    _require(t["dt_min"] > 0, "time.dt_min must be positive")
    _require(t["dt_max"] >= t["dt_min"], "time.dt_max must be >= dt_min")
    _require(t["slope_safety"] > 0, "time.slope_safety must be positive")
    _require(t["sample_stride"] >= 1, "time.sample_stride must be >= 1")
    eq = cfg["equation"]
    _require(eq["nu"] >= 0, "equation.nu must be >= 0")
    _require(any(eq[k] != 0 for k in ("alpha", "beta", "nu")),
             "equation: at least one of alpha, beta, nu must be nonzero")
    ini = cfg["initial_data"]
    _require(ini["kind"] in ("gaussian_bump", "neg_x_gaussian", "sine",
                             "custom_samples"),
             f"initial_data.kind '{ini['kind']}' not recognized")
    if ini["kind"] == "custom_samples":
        _require(isinstance(ini["samples"], list) and len(ini["samples"]) == n,
                 "initial_data.samples must be a list of length grid.n_points")
    else:
        _require(ini["width"] > 0, "initial_data.width must be positive")
    mon = cfg["monitors"]
    _require(0 < mon["g5"]["epsilon"] < 1, "monitors.g5.epsilon must lie in (0, 1)")
    _require(mon["b7"]["delta"] > 0, "monitors.b7.delta must be positive")
    _require(0 < mon["nesting"]["gamma"] < 1,
             "monitors.nesting.gamma must lie in (0, 1)")
    certs = cfg["certificates"]
    if certs["enabled"]:
        _require(0 < certs["epsilon"] < cert.EPSILON_MAX,
                 f"certificates.epsilon must lie in (0, {cert.EPSILON_MAX:.6g}) "
                 "when certificates are enabled")
        _require(certs["g"] >= 1, "certificates.g must be >= 1")
    return ScenarioConfig(cfg)


def build_initial_field(cfg: ScenarioConfig) -> GridField:
    g, ini = cfg["grid"], cfg["initial_data"]
    L, n = g["half_length"], g["n_points"]
    kind = ini["kind"]
    a, w, phase = ini["amplitude"], ini["width"], ini["phase"]
    if kind == "custom_samples":
        return GridField(L, np.asarray(ini["samples"], dtype=float))
    if kind == "sine":
        k = int(ini["mode"]) * math.pi / L
        return field_from_function(lambda x: a * np.sin(k * x + phase), L, n)
    if kind == "gaussian_bump":
        return field_from_function(
            lambda x: a * np.exp(-((x - phase) / w) ** 2), L, n)
    # neg_x_gaussian
    return field_from_function(
        lambda x: -a * ((x - phase) / w) * np.exp(-((x - phase) / w) ** 2), L, n)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return repr(float(value))


def write_csv(traj: ev.Trajectory, path: str):
    residuals = traj.riccati_residuals()
    n = len(traj.times)
    g5 = traj.g5_ok if traj.g5_ok else [None] * n
    b7 = traj.b7_ok if traj.b7_ok else [None] * n
    lines = [f"# schema_version={SCHEMA_VERSION}", ",".join(CSV_COLUMNS)]
    for i in range(n):
        row = [traj.times[i], traj.m[i], traj.q[i], traj.argmin_x[i],
               traj.mass[i], traj.l2[i], traj.dt[i], g5[i], b7[i],
               residuals[i]]
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _q_monotone_ok(traj: ev.Trajectory, tol: float = 1e-9) -> bool:
    q = [v for v in traj.q if np.isfinite(v)]
    return all(q[i + 1] <= q[i] + tol for i in range(len(q) - 1))


def _nesting_violation_count(traj: ev.Trajectory, gamma: float) -> int | None:
    if not traj.member_sets:
        return None
    dx = traj.final_state.u.dx if traj.final_state is not None else 0.0
    return chars.nesting_violations(traj.member_sets, traj.v1_series,
                                    traj.thresholds, position_tol=dx,
                                    v2_series=traj.v2_series, gamma=gamma)


def run_scenario(cfg: ScenarioConfig) -> RunArtifacts:
    """Execute one scenario end to end and write the configured artifacts."""
    eq = cfg["equation"]
    spec = ev.EquationSpec(eq["alpha"], eq["beta"], eq["nu"])
    u0 = build_initial_field(cfg)
    tcfg, mon, certs, out = cfg["time"], cfg["monitors"], cfg["certificates"], cfg["outputs"]

    hypothesis_record = None
    if certs["enabled"]:
        hyp = cert.check_hypotheses(u0, certs["epsilon"], certs["g"], certs["n_max"])
        hypothesis_record = hyp.to_record()

    control = ev.StepControl(
        cfl=tcfg["cfl"], dt_min=tcfg["dt_min"], dt_max=tcfg["dt_max"],
        slope_safety=tcfg["slope_safety"], sample_stride=tcfg["sample_stride"],
        breaking_ratio=tcfg["breaking_ratio"],
        snapshot_stride=out["snapshot_stride"],
    )
    L = cfg["grid"]["half_length"]
    monitors = ev.MonitorSet(
        g5=mon["g5"]["enabled"], g5_epsilon=mon["g5"]["epsilon"],
        b7=mon["b7"]["enabled"], b7_delta=mon["b7"]["delta"],
        nesting=mon["nesting"]["enabled"], nesting_gamma=mon["nesting"]["gamma"],
        nesting_labels=np.linspace(-L, L, mon["nesting"]["n_labels"],
                                   endpoint=False)
        if mon["nesting"]["enabled"] else None,
        q_monotone=mon["q_monotone"]["enabled"],
    )

    state = ev.SolverState(0.0, u0)
    try:
        traj = ev.integrate(state, spec, tcfg["t_end"], monitors, control)
    except Exception as exc:  # numerical failure: preserve partial artifacts
        return RunArtifacts(exit_classification="error",
                            report={"error": str(exc)})
    breaking = ev.detect_breaking(traj)

    g5_held = traj.g5_held_throughout() if monitors.g5 else False
    bracket_record = None
    in_bracket = None
    bracket_applicable = (spec.nu > 0 and spec.alpha != 0
                          and breaking.verdict == "breaking" and traj.m0 < 0)
    if bracket_applicable:
        bracket = cert.blowup_bracket(traj.m0, mon["g5"]["epsilon"])
        bracket_record = bracket.to_record()
        if monitors.g5 and g5_held and breaking.t_est is not None:
            in_bracket = bracket.contains(breaking.t_est)

    q_ok = _q_monotone_ok(traj) if monitors.q_monotone else None
    nest_violations = (_nesting_violation_count(traj, mon["nesting"]["gamma"])
                       if monitors.nesting else None)

    if breaking.verdict == "breaking" or traj.terminated_by_breaking:
        classification = "breaking_detected"
    elif traj.resolution_warning and control.strict_resolution:
        classification = "resolution_exhausted"
    else:
        classification = "completed"
    violation = in_bracket is False

    report = {
        "schema_version": SCHEMA_VERSION,
        "config": cfg.data,
        "m0": traj.m0,
        "breaking": breaking.to_record(),
        "bracket": bracket_record,
        "g5_held_throughout": g5_held if monitors.g5 else None,
        "t_est_in_bracket": in_bracket,
        "q_monotone_ok": q_ok,
        "nesting_violations": nest_violations,
        "resolution_warning": traj.resolution_warning,
        "resolution_time": traj.resolution_time,
        "hypothesis_report": hypothesis_record,
        "exit_classification": classification,
        "bracket_violation": violation,
    }

    artifacts = RunArtifacts(exit_classification=classification, report=report,
                             trajectory=traj, bracket_violation=violation)
    if out["csv_path"]:
        write_csv(traj, out["csv_path"])
        artifacts.csv_path = out["csv_path"]
    if out["json_path"]:
        with open(out["json_path"], "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        artifacts.json_path = out["json_path"]
    if out["svg_path"]:
        artifacts.svg_paths = _emit_run_plots(traj, report, out["svg_path"])
    return artifacts


# ---------------------------------------------------------------------------
# sweeps

def _set_path(data: dict, dotted: str, value):
    keys = dotted.split(".")
    node = data
    for key in keys[:-1]:
        if key not in node:
            raise ConfigurationError(f"unknown sweep axis '{dotted}'")
        node = node[key]
    if keys[-1] not in node:
        raise ConfigurationError(f"unknown sweep axis '{dotted}'")
    node[keys[-1]] = value


def _sweep_worker(args):
    cfg_data, axis, value = args
    data = copy.deepcopy(cfg_data)
    _set_path(data, axis, value)
    for key in ("csv_path", "json_path", "svg_path"):
        data["outputs"][key] = None
    try:
        art = run_scenario(parse_config(json.dumps(data)))
        rep = art.report
        breaking = rep.get("breaking", {})
        bracket = rep.get("bracket") or {}
        return {
            "value": value,
            "t_est": breaking.get("t_est"),
            "t_lower": bracket.get("t_lower"),
            "t_upper": bracket.get("t_upper"),
            "in_bracket": rep.get("t_est_in_bracket"),
            "monitors_held": rep.get("g5_held_throughout"),
            "error": rep.get("error"),
        }
    except Exception as exc:
        return {"value": value, "t_est": None, "t_lower": None,
                "t_upper": None, "in_bracket": None, "monitors_held": None,
                "error": str(exc)}


def worker_count() -> int:
    env = os.environ.get("KMWAVE_WORKERS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def sweep(cfg: ScenarioConfig, axis: str, values, csv_path: str | None = None) -> list[dict]:
    """Run the scenario once per axis value, in parallel; rows sorted by value."""
    values = list(values)
    if not values:
        rows = []
    else:
        jobs = [(cfg.data, axis, v) for v in values]
        workers = worker_count()
        if workers == 1 or len(jobs) == 1:
            rows = [_sweep_worker(j) for j in jobs]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(_sweep_worker, jobs))
        rows.sort(key=lambda r: r["value"])
    if csv_path is not None:
        cols = ["value", "t_est", "t_lower", "t_upper", "in_bracket",
                "monitors_held", "error"]
        lines = [f"# schema_version={SCHEMA_VERSION}", ",".join(cols)]
        for row in rows:
            lines.append(",".join(
                "" if row[c] is None else
                (_fmt(row[c]) if isinstance(row[c], (int, float, bool)) else str(row[c]))
                for c in cols))
        with open(csv_path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    return rows


# ---------------------------------------------------------------------------
# SVG plots

def emit_plot(series: dict, path: str, title: str = "",
              bracket: tuple[float, float] | None = None,
              width: int = 640, height: int = 400):
    """Self-contained SVG line chart; optional vertical bracket band."""
    if not series:
        raise ValueError("series must be nonempty")
    margin = 50
    xs = np.concatenate([np.asarray(t, dtype=float) for t, _ in series.values()])
    ys = np.concatenate([np.asarray(y, dtype=float) for _, y in series.values()])
    finite = np.isfinite(xs) & np.isfinite(ys)
    if bracket is not None:
        xs = np.append(xs, bracket)
        finite = np.append(finite, [True, True])
        ys = np.append(ys, [ys[0], ys[0]])
    x_lo, x_hi = (float(np.min(xs[finite])), float(np.max(xs[finite]))) \
        if np.any(finite) else (0.0, 1.0)
    y_lo, y_hi = (float(np.min(ys[finite])), float(np.max(ys[finite]))) \
        if np.any(finite) else (0.0, 1.0)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def sx(x):
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def sy(y):
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if bracket is not None:
        parts.append(
            f'<rect x="{sx(bracket[0]):.2f}" y="{margin}" '
            f'width="{max(1.0, sx(bracket[1]) - sx(bracket[0])):.2f}" '
            f'height="{height - 2 * margin}" fill="#ffd58a" opacity="0.5"/>')
    parts.append(
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>'
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height - margin}" stroke="black"/>')
    for k in range(5):
        xv = x_lo + k * (x_hi - x_lo) / 4
        yv = y_lo + k * (y_hi - y_lo) / 4
        parts.append(
            f'<text x="{sx(xv):.1f}" y="{height - margin + 18}" font-size="11" '
            f'text-anchor="middle">{xv:.4g}</text>'
            f'<text x="{margin - 6}" y="{sy(yv) + 4:.1f}" font-size="11" '
            f'text-anchor="end">{yv:.4g}</text>')
    for i, (name, (t, y)) in enumerate(series.items()):
        t = np.asarray(t, dtype=float)
        y = np.asarray(y, dtype=float)
        ok = np.isfinite(t) & np.isfinite(y)
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(t[ok], y[ok]))
        color = colors[i % len(colors)]
        if np.count_nonzero(ok) == 1:
            a, b = t[ok][0], y[ok][0]
            parts.append(f'<circle cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="3" '
                         f'fill="{color}"/>')
        else:
            parts.append(f'<polyline points="{pts}" fill="none" '
                         f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{width - margin - 4}" y="{margin + 14 + 14 * i}" '
                     f'font-size="12" text-anchor="end" fill="{color}">{name}</text>')
    if title:
        parts.append(f'<text x="{width / 2}" y="20" font-size="14" '
                     f'text-anchor="middle">{title}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
    return path


def _emit_run_plots(traj: ev.Trajectory, report: dict, base_path: str) -> list[str]:
    stem, dot, ext = base_path.rpartition(".")
    if not dot:
        stem, ext = base_path, "svg"
    paths = []
    t = np.asarray(traj.times)
    m = np.asarray(traj.m)
    paths.append(emit_plot({"m(t)": (t, m)}, f"{stem}_m.{ext}",
                           title="minimum slope"))
    neg = m < 0
    if np.any(neg):
        bracket = None
        if report.get("bracket"):
            bracket = (report["bracket"]["t_lower"], report["bracket"]["t_upper"])
        paths.append(emit_plot({"-1/m(t)": (t[neg], -1.0 / m[neg])},
                               f"{stem}_inv_m.{ext}", title="Riccati extrapolation",
                               bracket=bracket))
    if traj.final_state is not None:
        u = traj.final_state.u
        paths.append(emit_plot({"u(x, t_final)": (u.nodes(), u.values)},
                               f"{stem}_profile.{ext}", title="final profile"))
    return paths
