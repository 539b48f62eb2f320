"""Command-line entry point: ``gapstress <command> [--config PATH] [--out DIR]``.

Commands::

    fields eval         sample the auxiliary fields at seeded random points
    verify              run the analytic self-checks, JSON report
    integrals compare   closed form, quadrature and two-term expansion
    solve box           force-free two-disk problem on the box oracle
    solve gap           local gap problems for the selected modes
    factors             blow-up factors and free constants at one eps
    sweep eps           oracle experiment over a list of eps values
    predict             leading-order stress tensors from given ratios

The configuration is an INI file; every key is optional.  Exit codes are 0
on success, 1 when a check fails, 2 for configuration errors and 3 when a
solver fails.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, checks, rates
from . import stiffness as st
from .fields import sample
from .geometry import DomainError, GapGeometry, decode_mode, mode_count
from .oracle.mac import OracleError, ResolutionError
from .stress import (AsymptoticStressModel, HypothesisError, MissingRatioError, fit_exponent,
                     predict_stress, stress_bounds)

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3


class ConfigError(ValueError):
    """Invalid configuration; the message names the file line when known."""


# --- configuration ---------------------------------------------------------------

def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.replace(",", " ").split())


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(",", " ").split())


def _words(text: str) -> tuple[str, ...]:
    return tuple(text.replace(",", " ").split())


def _bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "yes", "true", "on"):
        return True
    if value in ("0", "no", "false", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _mapping(text: str) -> dict[int, float]:
    """``"1: 0.5, 2: -1.25"`` -> ``{1: 0.5, 2: -1.25}``."""
    out = {}
    for item in text.split(","):
        if item.strip():
            key, _, value = item.partition(":")
            out[int(key)] = float(value)
    return out


def _points_list(text: str) -> tuple[tuple[float, ...], ...]:
    """Semicolon-separated points, coordinates separated by spaces or commas."""
    return tuple(_floats(p) for p in text.split(";") if p.strip())


def _optional_fraction(text: str):
    return None if not text.strip() else Fraction(text.strip())


SCHEMA = {
    "geometry": {"n": (int, "2"), "eps": (float, "1e-3"), "kappa": (float, "1"),
                 "r0": (float, "0.2"), "mu": (float, "1")},
    "fields": {"modes": (_ints, "all"), "particle": (int, "1"), "points": (int, "16"),
               "radius_factor": (float, "1"), "extra_points": (_points_list, "")},
    "oracle": {"gap_cells": (int, "8"), "half_width": (float, "2"),
               "x_cells_per_root": (float, "12"), "growth": (float, "1.08"),
               "h_max": (float, "0.04"), "gap_modes": (_ints, "1, 2"),
               "truncation_radii": (_floats, "0.05, 0.1")},
    "sweep": {"eps": (_floats, "4e-3, 1e-3, 2.5e-4")},
    "factors": {"extrapolate": (_bool, "no")},
    "verify": {"n_values": (_ints, "2 3 4"), "kappas": (_words, "1/4 1/2 1 2"),
               "coefficient_n_values": (_ints, "2 3 4 5 6 7 8"), "points": (int, "1000"),
               "residual_points": (int, "200"), "systems": (int, "100"),
               "divergence_tol": (float, "1e-10"), "quadrature_tol": (float, "1e-9"),
               "cramer_tol": (float, "1e-12"), "min_order": (float, "1.9"),
               "inject_b3": (_optional_fraction, "")},
    "integrals": {"n_values": (_ints, "2 3"), "eps": (_floats, "1e-2 1e-4 1e-6 1e-8"),
                  "corrected": (_bool, "no"), "weight": (str, "none")},
    "predict": {"ratios": (_mapping, ""), "geometry_constants": (_mapping, ""),
                "points": (int, "8"), "extra_points": (_points_list, "")},
}


def _line_numbers(text: str) -> dict[tuple[str, str], int]:
    """``(section, key) -> line`` for every assignment in an INI text."""
    out, section = {}, None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            out[(section, "")] = number
        elif section and line and line[0] not in "#;":
            key = line.split("=", 1)[0].split(":", 1)[0].strip().lower()
            out[(section, key)] = number
    return out


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration: typed values per section plus run flags."""

    values: dict
    seed: int = 0
    out: Path = Path("gapstress-out")
    jobs: int = 1
    source: str = "<defaults>"

    def __getitem__(self, section: str) -> dict:
        return self.values[section]

    @property
    def geometry(self) -> GapGeometry:
        return GapGeometry(**self.values["geometry"])

    @property
    def digest(self) -> str:
        canon = {s: {k: _canonical(v) for k, v in sorted(kv.items())}
                 for s, kv in sorted(self.values.items())}
        blob = json.dumps(canon, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def header(self) -> list[str]:
        return [f"gapstress {__version__} config-sha256={self.digest} seed={self.seed}"]


def _canonical(value):
    if isinstance(value, dict):
        return {str(k): _canonical(v) for k, v in sorted(value.items())}
    if isinstance(value, (tuple, list)):
        return [_canonical(v) for v in value]
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, Fraction):
        return str(value)
    return value


def load_config(path=None, seed: int = 0, out=None, jobs: int = 1) -> RunConfig:
    """Read and validate an INI file (``None`` gives the defaults)."""
    text, name = "", "<defaults>"
    if path is not None:
        name = str(path)
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"{name}: cannot read config ({exc.strerror})") from exc
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        parser.read_string(text, source=name)
    except configparser.Error as exc:
        raise ConfigError(f"{name}: {exc}") from exc
    lines = _line_numbers(text)

    def where(section, key=""):
        line = lines.get((section, key))
        return f"{name}:{line}" if line else name

    values = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{where(section)}: unknown section [{section}]")
        for key in parser[section]:
            if key not in SCHEMA[section]:
                raise ConfigError(f"{where(section, key)}: unknown key '{key}' in [{section}]")
    for section, keys in SCHEMA.items():
        values[section] = {}
        for key, (convert, default) in keys.items():
            raw = parser.get(section, key, fallback=default)
            if key == "modes" and raw.strip() == "all":
                values[section][key] = None
                continue
            try:
                values[section][key] = convert(raw)
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"{where(section, key)}: bad value for {section}.{key}: {exc}") from exc
    if not 0 <= seed < 2**64:
        raise ConfigError("--seed must be an unsigned 64-bit integer")
    if jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    cfg = RunConfig(values, seed, Path(out) if out is not None else Path("gapstress-out"), jobs, name)
    _validate(cfg, where)
    return cfg


def _validate(cfg: RunConfig, where) -> None:
    try:
        g = cfg.geometry
    except DomainError as exc:
        raise ConfigError(f"{where('geometry')}: {exc}") from exc
    m = mode_count(g.n)
    modes = cfg["fields"]["modes"]
    for a in modes or ():
        if not 1 <= a <= m:
            raise ConfigError(f"{where('fields', 'modes')}: mode {a} outside 1..{m}")
    if cfg["fields"]["particle"] not in (1, 2):
        raise ConfigError(f"{where('fields', 'particle')}: particle must be 1 or 2")
    for section in ("fields", "predict"):
        for p in cfg[section]["extra_points"]:
            if len(p) != g.n:
                raise ConfigError(f"{where(section, 'extra_points')}: point {p} needs {g.n} coordinates")
    eps = cfg["sweep"]["eps"]
    if not eps:
        raise ConfigError(f"{where('sweep', 'eps')}: the eps list is empty")
    if any(b >= a for a, b in zip(eps, eps[1:])) or min(eps) <= 0:
        raise ConfigError(f"{where('sweep', 'eps')}: eps values must be positive and strictly decreasing")
    if cfg["oracle"]["gap_cells"] < 6:
        raise ConfigError(f"{where('oracle', 'gap_cells')}: at least 6 cells across the gap are needed")
    if cfg["integrals"]["weight"] not in rates.WEIGHTS:
        raise ConfigError(f"{where('integrals', 'weight')}: weight must be one of {rates.WEIGHTS}")


# --- output helpers --------------------------------------------------------------

def _cell(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g") if math.isfinite(value) else "NA"
    return str(value)


def write_csv(path: Path, cfg: RunConfig, columns, rows, notes=()) -> Path:
    """RFC-4180 CSV with ``#`` provenance and column comment lines first."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        for line in cfg.header() + [f"columns: {' '.join(columns)}"] + list(notes):
            fh.write(f"# {line}\r\n")
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(row.get(c)) for c in columns])
    return path


def _json_ready(value):
    if isinstance(value, dict):
        return {str(k): _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    if isinstance(value, np.ndarray):
        return _json_ready(value.tolist())
    if isinstance(value, (np.floating, float)):
        return float(value) if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def write_json(path: Path, cfg: RunConfig, document: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    body = {"provenance": {"version": __version__, "config_sha256": cfg.digest, "seed": cfg.seed},
            **document}
    path.write_text(json.dumps(_json_ready(body), indent=2) + "\n")
    return path


# --- commands --------------------------------------------------------------------

def cmd_fields_eval(cfg: RunConfig) -> int:
    g = cfg.geometry
    f = cfg["fields"]
    n = g.n
    modes = f["modes"] if f["modes"] is not None else tuple(range(1, mode_count(n) + 1))
    rng = np.random.default_rng(cfg.seed)
    x = checks.random_gap_points(g, f["points"], rng, radius_factor=f["radius_factor"])
    if f["extra_points"]:
        x = np.vstack([x, np.array(f["extra_points"], dtype=float)])
    columns = (["alpha", "particle"] + [f"x{i}" for i in range(1, n + 1)]
               + [f"u{i}" for i in range(1, n + 1)] + ["p"]
               + [f"grad{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1)] + ["divergence"])
    rows = []
    for alpha in modes:
        s = sample(g, f["particle"], alpha, x)
        for k in range(x.shape[0]):
            row = {"alpha": alpha, "particle": f["particle"], "p": s.pressure[k],
                   "divergence": s.divergence[k]}
            for i in range(n):
                row[f"x{i + 1}"] = x[k, i]
                row[f"u{i + 1}"] = s.velocity[k, i]
                for j in range(n):
                    row[f"grad{i + 1}{j + 1}"] = s.grad[k, i, j]
            rows.append(row)
    path = write_csv(cfg.out / "fields.csv", cfg, columns, rows,
                     ["grad_ij is d u_i / d x_j"])
    print(path)
    return EXIT_OK


def verify_settings(cfg: RunConfig) -> dict:
    v = cfg["verify"]
    g = cfg["geometry"]
    common = {"eps": g["eps"], "kappa": g["kappa"], "r0": g["r0"], "seed": cfg.seed}
    override = {"b3": v["inject_b3"]} if v["inject_b3"] is not None else None
    return {
        "coefficients": {"n_values": v["coefficient_n_values"], "kappas": v["kappas"],
                         "override": override},
        "divergence": {"n_values": v["n_values"], "points": v["points"], "tol": v["divergence_tol"],
                       **common},
        "residuals": {"n_values": tuple(k for k in v["n_values"] if k in (2, 3)),
                      "points": v["residual_points"], "min_order": v["min_order"], **common},
        "quadrature": {"tol": v["quadrature_tol"], "kappa": g["kappa"]},
        "cramer": {"systems": v["systems"], "seed": cfg.seed, "tol": v["cramer_tol"]},
    }


def cmd_verify(cfg: RunConfig) -> int:
    results = checks.run_all(verify_settings(cfg))
    report = [r.as_dict() for r in results]
    path = write_json(cfg.out / "verify.json", cfg, {"checks": report})
    for r in results:
        print(f"{r.status.upper():4s} {r.check_name} worst_error={r.worst_error:.3e} "
              f"tolerance={r.tolerance:.3e}")
    print(path)
    failed = [r for r in results if not r.passed]
    for r in failed:
        print(f"check failed: {r.check_name}: {'; '.join(r.detail[:5])}", file=sys.stderr)
    return EXIT_CHECK if failed else EXIT_OK


def cmd_integrals_compare(cfg: RunConfig) -> int:
    g = cfg.geometry
    s = cfg["integrals"]
    columns = ["n", "eps", "kappa", "r0", "closed", "quadrature", "asymptotic", "abs_err", "rel_err"]
    rows = []
    for n in s["n_values"]:
        for eps in s["eps"]:
            quad = rates.gap_integral_quadrature(n, eps, g.kappa, g.r0, weight=s["weight"])
            row = {"n": n, "eps": eps, "kappa": g.kappa, "r0": g.r0, "quadrature": quad}
            if n in (2, 3) and s["weight"] == "none":
                closed = rates.gap_integral_closed(n, eps, g.kappa, g.r0)
                row["closed"] = closed
                row["abs_err"] = abs(quad - closed)
                row["rel_err"] = abs(quad - closed) / abs(closed)
                if n == 2 or eps < math.exp(-1):
                    row["asymptotic"] = rates.gap_integral_asymptotic(n, eps, g.kappa, g.r0,
                                                                      s["corrected"])
            rows.append(row)
    note = "abs_err and rel_err compare quadrature with the closed form"
    path = write_csv(cfg.out / "integrals.csv", cfg, columns, rows, [note])
    print(path)
    return EXIT_OK


def _box_scene(cfg: RunConfig, eps: float):
    from .oracle.scenes import BoxScene

    g = cfg.geometry
    o = cfg["oracle"]
    if g.n != 2:
        raise ConfigError("the oracle is two dimensional; set geometry.n = 2")
    return BoxScene(eps, radius=1.0 / (2.0 * g.kappa), half_width=o["half_width"], mu=g.mu,
                    gap_cells=o["gap_cells"], x_cells_per_root=o["x_cells_per_root"],
                    growth=o["growth"], h_max=o["h_max"])


def cmd_solve_box(cfg: RunConfig) -> int:
    from .oracle.functionals import energy, free_solution
    from .oracle.scenes import solve_box

    scene = _box_scene(cfg, cfg.geometry.eps)
    box = solve_box(scene)
    system, asym = st.assemble_from_fields(energy, box.modes, box.background)
    X1, X2 = st.solve_block_system(system)
    u = free_solution(box, X1, X2)
    cfg.out.mkdir(parents=True, exist_ok=True)
    u.to_csv(cfg.out / "box_free.csv", cfg.header())
    (cfg.out / "box_free.sgap").write_bytes(u.to_bytes())
    summary = {"info": box.info, "C1_minus_C2": X1, "C2": X2, "gram_asymmetry": asym,
               "max_divergence": u.max_divergence(), "flux_correction": box.flux_correction}
    print(write_json(cfg.out / "box_summary.json", cfg, summary))
    return EXIT_OK


def cmd_solve_gap(cfg: RunConfig) -> int:
    from .oracle.functionals import max_gradient
    from .oracle.scenes import GapScene, solve_gap

    g = cfg.geometry
    if g.n != 2:
        raise ConfigError("the oracle is two dimensional; set geometry.n = 2")
    o = cfg["oracle"]
    scene = GapScene(g, gap_cells=max(o["gap_cells"], 8))
    cfg.out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for alpha in o["gap_modes"]:
        if not 1 <= alpha <= mode_count(2):
            raise ConfigError(f"gap mode {alpha} outside 1..3")
        w = solve_gap(scene, alpha)
        w.to_csv(cfg.out / f"gap_alpha{alpha}.csv", cfg.header())
        (cfg.out / f"gap_alpha{alpha}.sgap").write_bytes(w.to_bytes())
        summary[str(alpha)] = {"description": decode_mode(2, alpha).describe(),
                               "sup_grad_w": max_gradient(w, g),
                               "max_divergence": w.max_divergence(),
                               "unknowns": w.stats.unknowns if w.stats else None}
    print(write_json(cfg.out / "gap_summary.json", cfg, {"modes": summary}))
    return EXIT_OK


def _study_row(args) -> dict:
    """Worker: one oracle study; failures are returned, not raised."""
    cfg, eps = args
    from .oracle.study import study_box

    try:
        study = study_box(_box_scene(cfg, eps), r0=cfg.geometry.r0,
                          truncation_radii=cfg["oracle"]["truncation_radii"])
    except (OracleError, ResolutionError, st.SingularSystemError, np.linalg.LinAlgError,
            ArithmeticError, MemoryError) as exc:
        return {"eps": eps, "status": "failed", "error": f"{type(exc).__name__}: {exc}"}
    row = {"status": "ok", **study.row(), "X1": study.X1, "X2": study.X2,
           "factors": study.factors, "A": np.array(study.system.A)}
    g = GapGeometry(2, eps, cfg.geometry.kappa, cfg.geometry.r0, cfg.geometry.mu)
    try:
        model = AsymptoticStressModel(2, st.determinant_ratios(study.system.A, study.factors, 2))
        row["predicted_lower"], row["predicted_upper"] = stress_bounds(model, g)
    except (HypothesisError, st.SingularSystemError):
        row["predicted_lower"] = row["predicted_upper"] = None
    return row


def run_sweep(cfg: RunConfig, eps_list) -> list[dict]:
    """Studies for every eps, in input order, on at most ``cfg.jobs`` workers."""
    tasks = [(cfg, float(e)) for e in eps_list]
    if cfg.jobs == 1 or len(tasks) == 1:
        return [_study_row(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(cfg.jobs, len(tasks))) as pool:
        return list(pool.map(_study_row, tasks))


def sweep_summary(rows: list[dict]) -> dict:
    ok = [r for r in rows if r["status"] == "ok"]
    out = {"points": len(rows), "succeeded": len(ok), "slopes": {}, "limits": {}}
    for key in ("max_grad", "max_pressure_dev"):
        if len(ok) >= 3:
            slope, err = fit_exponent([(r["eps"], r[key]) for r in ok])
            out["slopes"][key] = {"value": slope, "stderr": err}
        else:
            out["slopes"][key] = "not available"
    if len(ok) >= 2:
        diffs = np.abs(np.diff(np.array([r["factors"] for r in ok]), axis=0))
        out["cauchy_differences"] = diffs
        out["cauchy_monotone"] = [bool(np.all(np.diff(diffs[:, b]) < 0)) if len(diffs) > 1 else None
                                  for b in range(diffs.shape[1])]
    for name, key in (("C_star", "X2"), ("B_star", "factors"), ("C1_minus_C2_star", "X1")):
        if len(ok) >= 3:
            try:
                value, err = st.limit_constants([(r["eps"], r[key]) for r in ok], strict=False)
                out["limits"][name] = {"value": value, "error": err}
            except (ValueError, st.NonConvergentSweepError) as exc:
                out["limits"][name] = f"not available: {exc}"
        else:
            out["limits"][name] = "not available"
    return out


def cmd_factors(cfg: RunConfig) -> int:
    row = run_sweep(cfg, [cfg.geometry.eps])[0]
    if row["status"] != "ok":
        print(f"solver failed: {row['error']}", file=sys.stderr)
        return EXIT_SOLVER
    limits = {}
    if cfg["factors"]["extrapolate"]:
        limits = sweep_summary(run_sweep(cfg, cfg["sweep"]["eps"]))["limits"]
    doc = {"eps": cfg.geometry.eps, "provenance_kind": "oracle", "modes": {}}
    for a in range(1, 4):
        entry = {"description": decode_mode(2, a).describe(), "B": row["factors"][a - 1],
                 "C2": row["X2"][a - 1], "C1_minus_C2": row["X1"][a - 1], "C_star": None}
        c_star = limits.get("C_star")
        if isinstance(c_star, dict):
            entry["C_star"] = c_star["value"][a - 1]
            entry["C_star_error"] = c_star["error"][a - 1]
        doc["modes"][str(a)] = entry
    if not cfg["factors"]["extrapolate"]:
        doc["C_star_note"] = "set [factors] extrapolate = yes to extrapolate over [sweep] eps"
    print(write_json(cfg.out / "factors.json", cfg, doc))
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    rows = run_sweep(cfg, cfg["sweep"]["eps"])
    summary = sweep_summary(rows)
    slopes = summary["slopes"]
    columns = ["eps", "status", "max_grad", "max_pressure_dev", "predicted_lower", "predicted_upper",
               "slope_max_grad", "slope_max_pressure_dev"]
    columns += [f"{k}_{a}" for k in ("B", "C2", "C1mC2") for a in (1, 2, 3)] + ["error"]
    for r in rows:
        for key in ("max_grad", "max_pressure_dev"):
            s = slopes[key]
            r[f"slope_{key}"] = s["value"] if isinstance(s, dict) else None
    write_csv(cfg.out / "sweep.csv", cfg, columns, rows,
              ["slope columns repeat the fit over all successful rows; NA when unavailable"])
    print(write_json(cfg.out / "sweep_summary.json", cfg,
                     {"eps": cfg["sweep"]["eps"], "summary": summary}))
    if summary["succeeded"] == 0:
        print("solver failed for every eps", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_predict(cfg: RunConfig) -> int:
    g = cfg.geometry
    p = cfg["predict"]
    model = AsymptoticStressModel(g.n, p["ratios"], p["geometry_constants"])
    rng = np.random.default_rng(cfg.seed)
    radius = min(math.sqrt(g.eps), g.r0) / g.r0 if g.eps > 0 else 0.5
    x = checks.random_gap_points(g, p["points"], rng, radius_factor=radius)
    if p["extra_points"]:
        x = np.vstack([x, np.array(p["extra_points"], dtype=float)])
    pred = predict_stress(model, g, x)
    points = [{"x": x[k], "stress": pred.stress[k], "strain_part": pred.strain_part[k],
               "pressure_part": pred.pressure_part[k], "remainder": pred.remainder[k]}
              for k in range(x.shape[0])]
    print(write_json(cfg.out / "predict.json", cfg, {"geometry": g.as_record(),
                                                      "branch": model.branch, "points": points}))
    return EXIT_OK


COMMANDS = {
    ("fields", "eval"): cmd_fields_eval,
    ("verify",): cmd_verify,
    ("integrals", "compare"): cmd_integrals_compare,
    ("solve", "box"): cmd_solve_box,
    ("solve", "gap"): cmd_solve_gap,
    ("factors",): cmd_factors,
    ("sweep", "eps"): cmd_sweep,
    ("predict",): cmd_predict,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI configuration file")
    common.add_argument("--out", metavar="DIR", default="gapstress-out", help="output directory")
    common.add_argument("--jobs", metavar="N", type=int, default=1, help="worker processes")
    common.add_argument("--seed", metavar="U64", type=int, default=0, help="random seed")
    parser = argparse.ArgumentParser(prog="gapstress", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    top = parser.add_subparsers(dest="command", required=True)
    groups = {}
    for key in COMMANDS:
        if len(key) == 1:
            top.add_parser(key[0], parents=[common]).set_defaults(key=key)
        else:
            if key[0] not in groups:
                sub = top.add_parser(key[0])
                groups[key[0]] = sub.add_subparsers(dest="action", required=True)
            groups[key[0]].add_parser(key[1], parents=[common]).set_defaults(key=key)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config, seed=args.seed, out=args.out, jobs=args.jobs)
        return COMMANDS[args.key](cfg)
    except (ConfigError, DomainError, ResolutionError, MissingRatioError, HypothesisError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OracleError, st.SingularSystemError, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
