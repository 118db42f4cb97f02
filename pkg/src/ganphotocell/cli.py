"""Command-line entry point: ``ganphotocell <experiment> [options]``.

Every run writes the resolved configuration next to its results. CSV files
start with ``#`` comment lines (config hash, creation time) followed by a
header row; the body depends only on the configuration.
"""
import argparse
import datetime
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import EXPERIMENTS, MODELS, parse_config, serialize
from .errors import PhotocellError
from .experiments import geometry_sweep, iv_curves, phonon_rate_sweep, population_dynamics
from .kinetics import PopulationState, build_generator
from .model import GAMMA_X_RULE, ModelKind, derive_rates
from .numerics import steady_state
from .observables import operating_point, peak_power, relative_enhancement

EXIT_OK, EXIT_FATAL, EXIT_PARTIAL = 0, 1, 2
CLAMP_TOL = 1e-9

RATE_UNITS = {
    "J": "eV", "mu_len": "nm", "gamma_h": "1/ns", "gamma_x": "1/ns", "n_h": "",
    "n_x": "", "Gamma_x1_alpha": "1/ns", "Gamma_x2_alpha": "1/ns", "Gamma_a_alpha": "1/ns",
    "Gamma_beta_b": "1/ns", "Gamma_load": "1/ns", "chi": "", "E_x1": "eV", "E_x2": "eV",
    "E_alpha_beta": "eV", "T_a": "K",
}


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _clamp(values):
    v = np.array(values, dtype=float)
    v[(v < 0) & (v >= -CLAMP_TOL)] = 0.0
    return v


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x) if math.isfinite(x) else None
    return x


class Writer:
    """Single writer for all output files of one run."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.prefix = Path(cfg.output)
        self.config_text = serialize(cfg)
        self.sha = hashlib.sha256(self.config_text.encode()).hexdigest()
        self.stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
        self.files = []

    def path(self, suffix):
        return self.prefix.parent / f"{self.prefix.name}_{suffix}"

    def echo_config(self):
        p = self.path("config.toml")
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(f"# config_sha256 = {self.sha}\n" + self.config_text, encoding="utf-8")
        self.files.append(p)

    def csv(self, suffix, header, rows):
        p = self.path(suffix)
        lines = [f"# ganphotocell {__version__}", f"# config_sha256 = {self.sha}",
                 f"# created = {self.stamp}", ",".join(header)]
        lines += [",".join(_fmt(x) for x in row) for row in rows]
        p.write_text("\n".join(lines) + "\n", encoding="utf-8")
        self.files.append(p)

    def summary(self, payload):
        p = self.path("summary.json")
        doc = {"config_sha256": self.sha, "experiment": self.cfg.experiment,
               "provenance": provenance(self.cfg), **payload}
        p.write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        self.files.append(p)


def provenance(cfg):
    d = cfg.device
    return {
        "E_star_eV": d.E_star,
        "E_star_reference": "conduction-band minimum at the dot centre",
        "Gamma_beta_b_rule": "equal to the electron tunneling rate at E_star",
        "Gamma_unit": "1/ns",
        "gamma_x_rule": (f"{d.gamma_x_multiplier:g} x {GAMMA_X_RULE}/hbar"
                         if isinstance(d.gamma_x, str) else f"explicit {d.gamma_x:g} 1/ns"),
        "E_b_eV": 0.0,
        "E_1b_equals_E_x1": True,
        "gamma_grid_per_ns": {"min": cfg.grids.gamma_min_per_ns, "max": cfg.grids.gamma_max_per_ns,
                              "points": cfg.grids.gamma_points, "spacing": "log"},
    }


def _kinds(cfg):
    if cfg.model == "both":
        return [ModelKind.COUPLED, ModelKind.UNCOUPLED]
    return [ModelKind(cfg.model)]


def run_rates(cfg, out):
    payload = {}
    for kind in _kinds(cfg):
        r = derive_rates(cfg.device, kind)
        print(f"[{kind.value}]")
        for name, value in r.as_dict().items():
            unit = RATE_UNITS.get(name, "")
            print(f"  {name:16s} = {value:.10g} {unit}".rstrip())
        payload[kind.value] = r.as_dict()
    out.summary({"rates": payload, "units": RATE_UNITS})
    return EXIT_OK


def run_dynamics(cfg, out):
    g = cfg.grids
    for kind in _kinds(cfg):
        tr = population_dynamics(cfg.device, kind, g.t_end_ns, g.n_checkpoints, g.t_min_ns, cfg.solver)
        header = ["t_ns"] + [f"rho_{s}" for s in kind.state_labels]
        rows = [[t, *_clamp(v)] for t, v in zip(tr.times, tr.values)]
        out.csv(f"dynamics_{kind.value}.csv", header, rows)
    out.summary({"t_end_ns": g.t_end_ns, "n_checkpoints": g.n_checkpoints})
    return EXIT_OK


def run_steady(cfg, out):
    payload = {}
    for kind in _kinds(cfg):
        gen = build_generator(derive_rates(cfg.device, kind), kind)
        rho = steady_state(gen, PopulationState.ground(kind).values)
        op = operating_point(gen)
        labels = kind.state_labels
        out.csv(f"steady_{kind.value}.csv", ["state", "population"],
                [[s, v] for s, v in zip(labels, _clamp(rho))])
        payload[kind.value] = {"populations": dict(zip(labels, _clamp(rho))),
                               "residual": float(np.max(np.abs(gen.matrix @ rho))),
                               "Gamma_per_ns": op.Gamma_load, "V_volts": op.V, "j_e_per_ns": op.j,
                               "P_eV_per_ns": op.P, "P_sun_eV_per_ns": op.P_sun, "flag": op.flag}
    out.summary({"steady": payload})
    return EXIT_OK


def _point_dict(p):
    return {"Gamma_per_ns": p.Gamma_load, "V_volts": p.V, "j_e_per_ns": p.j, "P_eV_per_ns": p.P,
            "P_sun_eV_per_ns": p.P_sun, "flag": p.flag}


def run_iv(cfg, out):
    curves = iv_curves(cfg.device, _kinds(cfg), cfg.grids.gamma_grid(), cfg.grids.workers)
    payload, peaks, failed = {}, {}, 0
    header = ["Gamma_per_ns", "V_volts", "j_e_per_ns", "P_eV_per_ns", "P_sun_eV_per_ns", "flag"]
    for curve in curves:
        rows = [[p.Gamma_load, p.V, p.j, p.P, p.P_sun, p.flag] for p in curve.points]
        rows += [[g, math.nan, math.nan, math.nan, math.nan, "failed"] for g, _ in curve.failures]
        rows.sort(key=lambda r: r[0])
        out.csv(f"iv_{curve.kind.value}.csv", header, rows)
        failed += len(curve.failures)
        entry = {"failures": [{"Gamma_per_ns": g, "error": m} for g, m in curve.failures]}
        if curve.points:
            pk = peak_power(curve)
            peaks[curve.kind] = pk
            entry.update(P_max=pk.P_max, boundary=pk.boundary, peak=_point_dict(pk.at))
        payload[curve.kind.value] = entry
    if ModelKind.COUPLED in peaks and ModelKind.UNCOUPLED in peaks and not failed:
        payload["eta"] = relative_enhancement(peaks[ModelKind.COUPLED].P_max, peaks[ModelKind.UNCOUPLED].P_max)
    out.summary(payload)
    return EXIT_PARTIAL if failed else EXIT_OK


def _grid_rows(grid):
    rows = []
    for idx in np.ndindex(grid.eta.shape):
        axes = [grid.axis1[idx[0]]] + ([grid.axis2[idx[1]]] if grid.axis2 is not None else [])
        rows.append(axes + [grid.eta[idx], grid.P_coupled_max[idx], grid.P_uncoupled_max[idx],
                            grid.converged[idx], grid.boundary[idx],
                            "" if grid.converged[idx] else "failed"])
    return rows


def _grid_summary(grid):
    payload = {"n_failed": grid.n_failed,
               "errors": [{"cell": list(map(int, k)), "error": v} for k, v in sorted(grid.errors.items())]}
    if grid.n_failed < grid.eta.size:
        idx = grid.argmax()
        payload.update(eta_max=grid.eta[idx], argmax=[int(i) for i in idx],
                       max_is_interior=grid.max_is_interior())
    return payload


_GRID_TAIL = ["eta", "P_coupled_max_eV_per_ns", "P_uncoupled_max_eV_per_ns", "converged", "boundary", "flag"]


def run_sweep_gamma_x(cfg, out):
    grid = phonon_rate_sweep(cfg.device, cfg.grids.gamma_x_multipliers, cfg.grids.gamma_grid(), cfg.grids.workers)
    out.csv("sweep_gamma_x.csv", ["gamma_x_multiplier"] + _GRID_TAIL, _grid_rows(grid))
    payload = _grid_summary(grid)
    payload["eta"] = grid.eta
    out.summary(payload)
    return EXIT_PARTIAL if grid.n_failed else EXIT_OK


def run_sweep_geometry(cfg, out):
    g = cfg.grids
    grid = geometry_sweep(cfg.device, g.d_perp_nm, g.w_br_nm, g.gamma_grid(), g.workers)
    out.csv("sweep_geometry.csv", ["d_perp_nm", "w_br_nm"] + _GRID_TAIL, _grid_rows(grid))
    out.summary(_grid_summary(grid))
    return EXIT_PARTIAL if grid.n_failed else EXIT_OK


RUNNERS = {
    "rates": run_rates,
    "dynamics": run_dynamics,
    "steady": run_steady,
    "iv": run_iv,
    "sweep-gamma-x": run_sweep_gamma_x,
    "sweep-geometry": run_sweep_geometry,
}


def run_experiment(cfg):
    """Run the configured experiment; returns ``(exit_code, written_files)``."""
    out = Writer(cfg)
    out.echo_config()
    code = RUNNERS[cfg.experiment](cfg, out)
    return code, out.files


def build_parser():
    parser = argparse.ArgumentParser(prog="ganphotocell", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="TOML run configuration")
        p.add_argument("--out", help="output path prefix")
        p.add_argument("--model", choices=MODELS)
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key (repeatable), e.g. w_br_nm=0.7 or grids.workers=4")
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_FATAL
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
        overrides = list(args.overrides) + [f'experiment="{args.experiment}"']
        if args.out:
            overrides.append(("output", args.out))
        if args.model:
            overrides.append(("model", args.model))
        cfg = parse_config(text, overrides)
        code, files = run_experiment(cfg)
    except (PhotocellError, OSError, ValueError) as exc:
        print(f"ganphotocell: error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    for f in files:
        print(f"wrote {f}")
    return code


if __name__ == "__main__":
    sys.exit(main())
