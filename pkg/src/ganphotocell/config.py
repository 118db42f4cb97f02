"""Strict TOML run configuration with unit-suffixed keys.

Device keys carry their unit in the name (``w_d_nm``, ``F_d_V_per_nm``,
``Gamma_load_per_ns``). Writing a dimensioned quantity without its suffix,
or with a different one, is rejected rather than guessed. Device keys may sit
at the top level or under ``[device]``; solver and grid settings live under
``[solver]`` and ``[grids]``.
"""
import dataclasses
import re
import sys
from dataclasses import dataclass, field

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .experiments import D_PERP_GRID, PHONON_MULTIPLIERS, W_BR_GRID
from .errors import ParseError, UnitMismatch, UnknownKey
from .model import GAMMA_X_RULE, DeviceParams, validate_params
from .numerics import SolverConfig
from .observables import GAMMA_GRID_MAX, GAMMA_GRID_MIN, GAMMA_GRID_POINTS, default_gamma_grid

EXPERIMENTS = ("rates", "dynamics", "steady", "iv", "sweep-gamma-x", "sweep-geometry")
MODELS = ("coupled", "uncoupled", "both")

# DeviceParams field -> (base name, unit suffix); "" marks a dimensionless key
DEVICE_KEYS = {
    "E_g": ("E_g", "eV"),
    "delta_E_c": ("delta_E_c", "eV"),
    "delta_E_v": ("delta_E_v", "eV"),
    "m_e_eff": ("m_e_eff", ""),
    "m_h_eff": ("m_h_eff", ""),
    "eps_r": ("eps_r", ""),
    "w_d": ("w_d", "nm"),
    "F_d": ("F_d", "V_per_nm"),
    "F_br": ("F_br", "V_per_nm"),
    "chi": ("chi", ""),
    "T_a": ("T_a", "K"),
    "E_1b": ("E_1b", "eV"),
    "n_h": ("n_h", ""),
    "w_br": ("w_br", "nm"),
    "d_perp": ("d_perp", "nm"),
    "dipole_fraction": ("dipole_fraction", ""),
    "E_star": ("E_star", "eV"),
    "Gamma_load": ("Gamma_load", "per_ns"),
    "gamma_x_multiplier": ("gamma_x_multiplier", ""),
}
GAMMA_X_RATE_KEY = "gamma_x_per_ns"
GAMMA_X_RULE_KEY = "gamma_x"


def _key(field_name):
    base, unit = DEVICE_KEYS[field_name]
    return f"{base}_{unit}" if unit else base


_KEY_TO_FIELD = {_key(f): f for f in DEVICE_KEYS}
_DIMENSIONED = {base: f"{base}_{unit}" for base, unit in DEVICE_KEYS.values() if unit}
_DIMENSIONED["gamma_x"] = GAMMA_X_RATE_KEY

SOLVER_KEYS = {
    "rel_tol": "rel_tol",
    "abs_tol": "abs_tol",
    "max_step_ns": "max_step",
    "newton_tol": "newton_tol",
    "max_newton_iters": "max_newton_iters",
}


@dataclass(frozen=True)
class GridSpec:
    """Sweep and time grids; rates in 1/ns, lengths in nm, times in ns."""

    gamma_min_per_ns: float = GAMMA_GRID_MIN
    gamma_max_per_ns: float = GAMMA_GRID_MAX
    gamma_points: int = GAMMA_GRID_POINTS
    t_end_ns: float = 200.0
    t_min_ns: float = 1e-6
    n_checkpoints: int = 60
    gamma_x_multipliers: tuple = PHONON_MULTIPLIERS
    d_perp_nm: tuple = D_PERP_GRID
    w_br_nm: tuple = W_BR_GRID
    workers: int = 1

    def gamma_grid(self):
        return default_gamma_grid(self.gamma_min_per_ns, self.gamma_max_per_ns, self.gamma_points)


_GRID_TYPES = {f.name: f.type for f in dataclasses.fields(GridSpec)}
_INT_GRID = {"gamma_points", "n_checkpoints", "workers"}
_LIST_GRID = {"gamma_x_multipliers", "d_perp_nm", "w_br_nm"}


@dataclass(frozen=True)
class RunConfig:
    device: DeviceParams = field(default_factory=DeviceParams)
    solver: SolverConfig = field(default_factory=SolverConfig)
    experiment: str = "iv"
    output: str = "ganphotocell_out"
    model: str = "both"
    grids: GridSpec = field(default_factory=GridSpec)


def _line_of(text, key):
    pattern = re.compile(rf"^[ \t]*(?:\"{re.escape(key)}\"|{re.escape(key)})\s*=", re.M)
    m = pattern.search(text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _number(v, key, line):
    if not _is_number(v):
        raise ParseError(f"expected a number, got {v!r}", line, key)
    return float(v)


def _integer(v, key, line):
    if isinstance(v, bool) or not (isinstance(v, int) or (isinstance(v, float) and v.is_integer())):
        raise ParseError(f"expected an integer, got {v!r}", line, key)
    return int(v)


def _reject_unknown(key, text, section):
    line = _line_of(text, key)
    for base, proper in _DIMENSIONED.items():
        if key == base or (key.startswith(base + "_") and key != proper):
            raise UnitMismatch(f"dimensioned quantity needs the suffix, write {proper!r}", line, key)
    raise UnknownKey(f"unknown key in {section}", line, key)


def _parse_device(table, text, section):
    values = {}
    for key, v in table.items():
        line = _line_of(text, key)
        if key in _KEY_TO_FIELD:
            values[_KEY_TO_FIELD[key]] = _number(v, key, line)
        elif key == GAMMA_X_RULE_KEY and isinstance(v, str):
            if v != GAMMA_X_RULE:
                raise ParseError(f"gamma_x rule must be {GAMMA_X_RULE!r}", line, key)
            values["gamma_x"] = v
        elif key == GAMMA_X_RATE_KEY:
            values["gamma_x"] = _number(v, key, line)
        else:
            _reject_unknown(key, text, section)
    return values


def _parse_solver(table, text):
    values = {}
    for key, v in table.items():
        line = _line_of(text, key)
        if key not in SOLVER_KEYS:
            raise UnknownKey("unknown key in [solver]", line, key)
        values[SOLVER_KEYS[key]] = _integer(v, key, line) if key == "max_newton_iters" else _number(v, key, line)
    try:
        return SolverConfig(**values)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _parse_grids(table, text):
    values = {}
    for key, v in table.items():
        line = _line_of(text, key)
        if key not in _GRID_TYPES:
            raise UnknownKey("unknown key in [grids]", line, key)
        if key in _INT_GRID:
            values[key] = _integer(v, key, line)
        elif key in _LIST_GRID:
            if not isinstance(v, list) or not v:
                raise ParseError("expected a non-empty list of numbers", line, key)
            values[key] = tuple(_number(x, key, line) for x in v)
        else:
            values[key] = _number(v, key, line)
    g = GridSpec(**values)
    if not 0 < g.gamma_min_per_ns < g.gamma_max_per_ns or g.gamma_points < 1:
        raise ParseError("gamma grid needs 0 < gamma_min_per_ns < gamma_max_per_ns and gamma_points >= 1")
    if not 0 < g.t_min_ns <= g.t_end_ns or g.n_checkpoints < 1:
        raise ParseError("time grid needs 0 < t_min_ns <= t_end_ns and n_checkpoints >= 1")
    if g.workers < 1:
        raise ParseError("workers must be at least 1", key="workers")
    return g


def _load(text):
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ParseError(str(exc), int(m.group(1)) if m else None) from None


def parse_override(item):
    """Split a ``key=value`` override; the value is read as TOML, else as a string."""
    if "=" not in item:
        raise ParseError(f"override must look like key=value, got {item!r}")
    key, raw = (s.strip() for s in item.split("=", 1))
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    return key, value


def parse_config(text="", overrides=()):
    """Build a RunConfig from a TOML document plus ``key=value`` overrides.

    Omitted keys keep their defaults. Overrides address device keys by name
    and other settings as ``solver.<key>`` or ``grids.<key>``.
    """
    doc = _load(text)
    device = dict(doc.pop("device", {}))
    solver = dict(doc.pop("solver", {}))
    grids = dict(doc.pop("grids", {}))
    top = {}
    for key in list(doc):
        if key in ("experiment", "output", "model"):
            top[key] = doc.pop(key)
    device.update(doc)  # remaining top-level keys are device keys

    for item in overrides:
        key, value = parse_override(item) if isinstance(item, str) else item
        section, _, name = key.rpartition(".")
        target = {"": device, "device": device, "solver": solver, "grids": grids}.get(section)
        if target is None:
            raise UnknownKey(f"unknown section {section!r}", key=key)
        if section == "" and name in ("experiment", "output", "model"):
            top[name] = value
        else:
            target[name] = value

    if not all(isinstance(x, dict) for x in (device, solver, grids)):
        raise ParseError("[device], [solver] and [grids] must be tables")
    params = DeviceParams(**_parse_device(device, text, "[device]"))
    violations = validate_params(params)
    if violations:
        v = violations[0]
        raise ParseError(v.reason, _line_of(text, _key(v.field)) if v.field in DEVICE_KEYS else None, v.field)

    experiment = top.get("experiment", RunConfig.experiment)
    model = top.get("model", RunConfig.model)
    output = top.get("output", RunConfig.output)
    if experiment not in EXPERIMENTS:
        raise ParseError(f"experiment must be one of {EXPERIMENTS}", _line_of(text, "experiment"), "experiment")
    if model not in MODELS:
        raise ParseError(f"model must be one of {MODELS}", _line_of(text, "model"), "model")
    if not isinstance(output, str) or not output:
        raise ParseError("output must be a non-empty path prefix", _line_of(text, "output"), "output")
    return RunConfig(params, _parse_solver(solver, text), experiment, output, model, _parse_grids(grids, text))


def to_dict(cfg):
    """Fully resolved config as a plain TOML-ready mapping."""
    dev = {}
    for f in DEVICE_KEYS:
        dev[_key(f)] = float(getattr(cfg.device, f))
    if isinstance(cfg.device.gamma_x, str):
        dev[GAMMA_X_RULE_KEY] = cfg.device.gamma_x
    else:
        dev[GAMMA_X_RATE_KEY] = float(cfg.device.gamma_x)
    solver = {k: getattr(cfg.solver, attr) for k, attr in SOLVER_KEYS.items()}
    grids = {}
    for name in _GRID_TYPES:
        v = getattr(cfg.grids, name)
        grids[name] = list(v) if name in _LIST_GRID else v
    return {"experiment": cfg.experiment, "model": cfg.model, "output": cfg.output,
            "device": dev, "solver": solver, "grids": grids}


def serialize(cfg):
    """TOML text that parses back to an equal RunConfig."""
    return tomli_w.dumps(to_dict(cfg))

