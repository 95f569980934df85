"""Experiment configuration: schema, defaults, validation and hashing.

Configs are plain JSON with one block per subsystem. Every default here
matches the documented package defaults; any field can be overridden
from a config file. Validation errors name the offending dotted path.
"""

import copy
import hashlib
import json
import math

from .building import BoucWenParams, ShearBuildingModel
from .excitation import WhiteNoiseSpec
from .fno import FnoConfig
from .grid import TimeGrid
from .simplify import SimplifierKind
from .training import TrainingParams


class ConfigError(ValueError):
    pass


DEFAULTS = {
    "structure": {
        "n_d": 5,
        "mass": 3.0e4,
        "stiffness": 2.0e7,  # documented default, override per system
        "zeta_damp": 0.05,
        "bw": {"u_y": 0.01, "alpha": 0.1, "n_exp": 3.0, "A": 1.0},
    },
    "excitation": {
        "S": 0.015,
        "n": 1200,
        "d_omega": math.pi / 30.0,
        "dt": 0.01,
        "duration": 30.0,
    },
    "simplifier": {"kind": "els", "param": 0},
    "network": {
        "width": 64,
        "n_layers": 6,
        "n_modes": 32,
        "proj_hidden": 128,
        "pad_fraction": 0.0,
    },
    "training": {
        "batch_size": 20,
        "epochs": 300,
        "lr": 1e-3,
        "lr_decay": 0.5,
        "lr_decay_every": 100,
    },
    "splits": {"train": 400, "val": 100, "test": 200},
    "substeps": 1,
    "seed": 0,
}

# desk-scale preset: full property coverage at laptop runtimes
DESK_OVERRIDES = {
    "excitation": {"dt": 0.02, "duration": 30.0},
    "network": {"width": 32, "n_layers": 4, "n_modes": 16, "proj_hidden": 64},
    "training": {"epochs": 150, "lr_decay_every": 50},
    "splits": {"train": 100, "val": 25, "test": 50},
}

_SCHEMA = {
    "structure": {
        "n_d": int,
        "mass": float,
        "stiffness": float,
        "zeta_damp": float,
        "bw": {"u_y": float, "alpha": float, "n_exp": float, "A": float},
    },
    "excitation": {"S": float, "n": int, "d_omega": float, "dt": float, "duration": float},
    "simplifier": {"kind": str, "param": int},
    "network": {
        "width": int,
        "n_layers": int,
        "n_modes": int,
        "proj_hidden": int,
        "pad_fraction": float,
    },
    "training": {
        "batch_size": int,
        "epochs": int,
        "lr": float,
        "lr_decay": float,
        "lr_decay_every": int,
    },
    "splits": {"train": int, "val": int, "test": int},
    "substeps": int,
    "seed": int,
}


def _merge(base, override, path=""):
    out = copy.deepcopy(base)
    for key, val in override.items():
        here = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown config field: {here}")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"{here}: expected an object")
            out[key] = _merge(base[key], val, here)
        else:
            out[key] = val
    return out


def _validate(data, schema, path=""):
    for key, spec in schema.items():
        here = f"{path}.{key}" if path else key
        val = data[key]
        if isinstance(spec, dict):
            _validate(val, spec, here)
        elif spec is float:
            if not isinstance(val, (int, float)) or isinstance(val, bool):
                raise ConfigError(f"{here}: expected a number, got {val!r}")
            data[key] = float(val)
        elif spec is int:
            if not isinstance(val, int) or isinstance(val, bool):
                raise ConfigError(f"{here}: expected an integer, got {val!r}")
        elif spec is str:
            if not isinstance(val, str):
                raise ConfigError(f"{here}: expected a string, got {val!r}")


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def canonical_hash(obj):
    """Stable short hex digest of a JSON-serializable object."""
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:16]


class ExperimentConfig:
    """Validated view over a merged config dict."""

    def __init__(self, data=None, desk=False):
        merged = DEFAULTS
        if desk:
            merged = _merge(merged, DESK_OVERRIDES)
        if data:
            merged = _merge(merged, data)
        _validate(merged, _SCHEMA)
        self.data = merged
        # constructor-level checks surface config mistakes early
        self.building()
        self.wn_spec()
        self.simplifier()

    @classmethod
    def from_file(cls, path):
        with open(path) as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigError(f"{path}: invalid JSON ({e})") from e
        return cls(data)

    @property
    def seed(self):
        return self.data["seed"]

    @property
    def substeps(self):
        return self.data["substeps"]

    @property
    def splits(self):
        s = self.data["splits"]
        return s["train"], s["val"], s["test"]

    def building(self):
        s = self.data["structure"]
        bw = s["bw"]
        try:
            params = BoucWenParams.from_yield_displacement(
                u_y=bw["u_y"], alpha=bw["alpha"], n_exp=bw["n_exp"], A=bw["A"]
            )
            return ShearBuildingModel(
                masses=[s["mass"]] * s["n_d"],
                stiffnesses=[s["stiffness"]] * s["n_d"],
                zeta_damp=s["zeta_damp"],
                bw=params,
            )
        except ValueError as e:
            raise ConfigError(f"structure: {e}") from e

    def wn_spec(self):
        e = self.data["excitation"]
        n_t = int(round(e["duration"] / e["dt"])) + 1
        try:
            return WhiteNoiseSpec(
                S=e["S"], n=e["n"], d_omega=e["d_omega"], grid=TimeGrid(e["dt"], n_t)
            )
        except ValueError as err:
            raise ConfigError(f"excitation: {err}") from err

    def simplifier(self):
        s = self.data["simplifier"]
        try:
            return SimplifierKind(kind=s["kind"], param=s["param"])
        except ValueError as e:
            raise ConfigError(f"simplifier: {e}") from e

    def fno_config(self, mode):
        if mode not in ("baseline", "composite"):
            raise ConfigError(f"mode must be 'baseline' or 'composite', got {mode!r}")
        net = self.data["network"]
        n_d = self.data["structure"]["n_d"]
        in_ch = (1 if mode == "baseline" else n_d) + 1  # + time channel
        return FnoConfig(
            in_channels=in_ch,
            out_channels=n_d,
            width=net["width"],
            n_layers=net["n_layers"],
            n_modes=net["n_modes"],
            proj_hidden=net["proj_hidden"],
            pad_fraction=net["pad_fraction"],
        )

    def training_params(self):
        t = self.data["training"]
        return TrainingParams(
            batch_size=t["batch_size"],
            epochs=t["epochs"],
            lr=t["lr"],
            lr_decay=t["lr_decay"],
            lr_decay_every=t["lr_decay_every"],
        )

    def model_hash(self):
        """Hash of everything that determines dataset content."""
        return canonical_hash(
            {
                "structure": self.data["structure"],
                "excitation": self.data["excitation"],
                "substeps": self.data["substeps"],
            }
        )
