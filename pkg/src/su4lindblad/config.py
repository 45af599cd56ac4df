"""Run configuration: TOML schema, presets and validation."""

import sys
from dataclasses import dataclass, field

from .basis import basis_size
from .errors import ConfigError, InvalidParameterError
from .liouvillian import ModelParams

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

MODES = ("evolve", "steady", "sweep", "correlate", "oracle-check")
FORMATS = ("csv", "json")
INITIAL_KINDS = ("all-ground-vacuum", "all-excited-vacuum")

# name -> (unit, is_complex)
QUANTITIES = {
    "trace": ("1", False),
    "mean_photon": ("1", False),
    "field_amp": ("1", True),
    "inversion": ("1", False),
    "spin_zz": ("1", False),
    "spin_plus": ("1", True),
    "spin_corr": ("1", True),
    "photon_moment2": ("1", False),
    "g2_zero": ("1", False),
    "fano": ("1", False),
    "purity": ("1", False),
    "entropy": ("nat", False),
    "boundary_population": ("1", False),
}

_RUN_DEFAULTS = {
    "mode": "steady",
    "t_final": 10.0,
    "t_points": 101,
    "dt_init": 1e-3,
    "rel_tol": 1e-8,
    "abs_tol": 1e-10,
    "trunc_tol": 1e-6,
    "initial": "all-ground-vacuum",
    "sweep_parameter": None,
    "sweep_values": None,
    "sweep_unit": "absolute",
    "tau_max": 20.0,
    "tau_points": 401,
    "correlation": "first-order",
    "seed": 0,
}

_OUTPUT_DEFAULTS = {
    "directory": "results",
    "format": "csv",
    "quantities": ["mean_photon", "inversion", "spin_corr", "g2_zero", "entropy"],
}

# Gamma_c = omega^2 / kappa sets the pump unit of the superradiance preset
PRESETS = {
    "laser-threshold": {
        "model": {"N": 10, "omega": 1.0, "gamma_decay": 5.0, "kappa": 1.0,
                  "dephasing": 0.0, "n_max": 40},
        "run": {"mode": "sweep", "sweep_parameter": "w",
                "sweep_values": [float(w) for w in range(1, 13)]},
        "output": {"quantities": ["mean_photon", "spin_corr", "g2_zero", "entropy", "fano"]},
    },
    "superradiance-g2": {
        "model": {"N": 10, "omega": 0.05, "kappa": 1.0, "gamma_decay": 0.0,
                  "dephasing": 0.0, "n_max": 6},
        "run": {"mode": "sweep", "sweep_parameter": "w", "sweep_unit": "gamma_c",
                "sweep_values": [0.1, 0.3, 1.0, 3.0, 10.0, 20.0, 25.0, 30.0]},
        "output": {"quantities": ["g2_zero", "mean_photon"]},
    },
}


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    run: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)

    @property
    def mode(self):
        return self.run["mode"]

    @property
    def gamma_c(self):
        return self.model.omega**2 / self.model.kappa if self.model.kappa > 0 else float("nan")

    def sweep_points(self):
        """``[(value as written, ModelParams)]`` for sweep mode."""
        name = self.run["sweep_parameter"]
        scale = self.gamma_c if self.run["sweep_unit"] == "gamma_c" else 1.0
        pts = []
        for v in self.run["sweep_values"]:
            actual = v * scale
            if name in ("N", "n_max"):
                actual = int(round(actual))
            pts.append((v, self.model.replace(**{name: actual})))
        return pts


def _merge(base, over):
    out = {k: dict(v) for k, v in base.items()}
    for sec, vals in over.items():
        if isinstance(vals, dict):
            out.setdefault(sec, {}).update(vals)
        else:
            out[sec] = vals
    return out


def load_config(path):
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config {path} is not valid TOML: {exc}") from None
    return parse_config(raw)


def parse_config(raw):
    raw = dict(raw)
    preset = raw.pop("preset", None)
    unknown = set(raw) - {"model", "run", "output"}
    if unknown:
        raise ConfigError(f"unknown top-level section(s) {sorted(unknown)}")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"preset: unknown preset {preset!r}; valid presets are {sorted(PRESETS)}")
        raw = _merge(PRESETS[preset], raw)
    model_raw = dict(raw.get("model", {}))
    names = ModelParams.field_names()
    bad = set(model_raw) - set(names)
    if bad:
        raise ConfigError(f"model.{sorted(bad)[0]}: not a model parameter; valid names are {list(names)}")
    if "N" not in model_raw:
        raise ConfigError("model.N: required")
    for key in ("N", "n_max"):
        if key in model_raw and not isinstance(model_raw[key], int):
            raise ConfigError(f"model.{key}: must be an integer")
    for key, val in model_raw.items():
        if key not in ("N", "n_max"):
            if not isinstance(val, (int, float)) or isinstance(val, bool):
                raise ConfigError(f"model.{key}: must be a number")
            model_raw[key] = float(val)
    try:
        model = ModelParams(**model_raw)
    except InvalidParameterError as exc:
        field_name = next((n for n in names if str(exc).startswith(n)), "?")
        raise ConfigError(f"model.{field_name}: {exc}") from None

    run = dict(_RUN_DEFAULTS)
    extra = set(raw.get("run", {})) - set(run)
    if extra:
        raise ConfigError(f"run.{sorted(extra)[0]}: unknown key; valid keys are {sorted(run)}")
    run.update(raw.get("run", {}))
    if run["mode"] not in MODES:
        raise ConfigError(f"run.mode: {run['mode']!r} is not one of {list(MODES)}")
    for key in ("t_final", "tau_max"):
        if not isinstance(run[key], (int, float)) or run[key] < 0:
            raise ConfigError(f"run.{key}: must be a non-negative number")
    for key in ("dt_init", "rel_tol", "abs_tol", "trunc_tol"):
        if not isinstance(run[key], (int, float)) or not run[key] > 0:
            raise ConfigError(f"run.{key}: must be positive")
    for key in ("t_points", "tau_points"):
        if not isinstance(run[key], int) or run[key] < 2:
            raise ConfigError(f"run.{key}: must be an integer >= 2")
    if run["initial"] not in INITIAL_KINDS:
        raise ConfigError(f"run.initial: {run['initial']!r} is not one of {list(INITIAL_KINDS)}")
    if run["sweep_unit"] not in ("absolute", "gamma_c"):
        raise ConfigError("run.sweep_unit: must be 'absolute' or 'gamma_c'")
    if run["mode"] == "sweep":
        if run["sweep_parameter"] not in names:
            raise ConfigError(f"run.sweep_parameter: {run['sweep_parameter']!r} is not a model parameter; "
                              f"valid names are {list(names)}")
        vals = run["sweep_values"]
        if not isinstance(vals, list) or not vals or not all(isinstance(v, (int, float)) for v in vals):
            raise ConfigError("run.sweep_values: must be a non-empty list of numbers")
        if run["sweep_unit"] == "gamma_c" and not model.kappa > 0:
            raise ConfigError("run.sweep_unit: gamma_c units need kappa > 0")
    from .observables import CORRELATION_KINDS
    if run["correlation"] not in CORRELATION_KINDS:
        raise ConfigError(f"run.correlation: {run['correlation']!r} is not one of {list(CORRELATION_KINDS)}")

    output = dict(_OUTPUT_DEFAULTS)
    extra = set(raw.get("output", {})) - set(output)
    if extra:
        raise ConfigError(f"output.{sorted(extra)[0]}: unknown key; valid keys are {sorted(output)}")
    output.update(raw.get("output", {}))
    if output["format"] not in FORMATS:
        raise ConfigError(f"output.format: {output['format']!r} is not one of {list(FORMATS)}")
    qs = output["quantities"]
    if not isinstance(qs, list) or not qs:
        raise ConfigError("output.quantities: must be a non-empty list")
    for q in qs:
        if q not in QUANTITIES:
            raise ConfigError(f"output.quantities: unknown quantity {q!r}; valid names are {list(QUANTITIES)}")
    cfg = RunConfig(model, run, output)
    if run["mode"] == "sweep":
        try:
            cfg.sweep_points()
        except InvalidParameterError as exc:
            raise ConfigError(f"run.sweep_values: {exc}") from None
    return cfg


def estimate(model):
    """Size diagnostics without computation."""
    k = basis_size(model.N)
    entries = k * (model.n_max + 1) ** 2
    return {
        "basis_size": k,
        "state_entries": entries,
        "state_bytes": entries * 16,
    }
