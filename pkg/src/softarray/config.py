"""Experiment configuration: YAML loading and validation.

See ``docs/config.md`` for the full schema.  Unknown keys are rejected so
that typos fail loudly instead of silently falling back to defaults.
"""

from dataclasses import dataclass, field, fields, replace
from importlib import resources

import yaml

from .baselines import BaselineSettings
from .channel import ChannelConfig
from .exceptions import ConfigError
from .geometry import SPEED_OF_LIGHT, ArrayConstants
from .sca import ScaSettings

ARCHITECTURES = ("sra", "fixed", "ccaa2d", "ccaa3d")
SWEEP_AXES = ("snr", "users", "directivity")

_TOP_KEYS = {
    "array", "channel", "sweep", "snr_db", "noise_var", "architectures",
    "realizations", "seed", "output", "sca", "baseline", "workers",
}
_ARRAY_KEYS = {
    "num_tentacles", "elements_per_tentacle", "carrier_hz", "wavelength",
    "total_arc_length", "amplitude_bound", "spatial_freq_bound", "phase",
}
_CHANNEL_KEYS = {"num_users", "num_clusters", "paths_per_cluster", "directivity"}
_SCA_KEYS = {
    "max_iterations", "tolerance", "trust_amplitude", "trust_freq", "shrink",
    "min_trust", "init", "init_seed", "freeze_precoder", "starts", "gradient",
}
_BASELINE_KEYS = {f.name for f in fields(BaselineSettings)}


@dataclass(frozen=True)
class ExperimentConfig:
    array: ArrayConstants = field(default_factory=ArrayConstants)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    sweep_axis: str = "snr"
    sweep_values: tuple = (20.0,)
    snr_db: float = 20.0
    noise_var: float = 1.0
    architectures: tuple = ARCHITECTURES
    realizations: int = 1000
    seed: int = 0
    output: str = "results"
    sca: ScaSettings = field(default_factory=ScaSettings)
    sca_starts: int = 1
    baseline: BaselineSettings = field(default_factory=BaselineSettings)
    workers: int = 1

    def point(self, value):
        """``(array, channel, p_max)`` for one sweep value."""
        channel, snr_db = self.channel, self.snr_db
        if self.sweep_axis == "snr":
            snr_db = float(value)
        elif self.sweep_axis == "users":
            channel = replace(channel, num_users=int(value))
        else:
            channel = replace(channel, directivity=float(value))
        return self.array, channel, self.noise_var * 10 ** (snr_db / 10)


def _section(data, name, allowed):
    sec = data.get(name, {}) or {}
    if not isinstance(sec, dict):
        raise ConfigError(f"'{name}' must be a mapping")
    unknown = set(sec) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in '{name}': {', '.join(sorted(unknown))}")
    return sec


def _num(value, name, kind=float):
    # PyYAML reads "1e-4" (no dot) as a string; accept it anyway.
    if isinstance(value, bool):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    try:
        out = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}") from None
    if kind is int and out != float(value):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return out


def _array(sec):
    kw = {}
    for key in ("num_tentacles", "elements_per_tentacle"):
        if key in sec:
            kw[key] = _num(sec[key], f"array.{key}", int)
    for key in ("total_arc_length", "amplitude_bound", "spatial_freq_bound", "phase"):
        if key in sec and sec[key] is not None:
            kw[key] = _num(sec[key], f"array.{key}")
    if "carrier_hz" in sec and "wavelength" in sec:
        raise ConfigError("give either array.carrier_hz or array.wavelength, not both")
    if "carrier_hz" in sec:
        f = _num(sec["carrier_hz"], "array.carrier_hz")
        if f <= 0:
            raise ConfigError("array.carrier_hz must be positive")
        kw["wavelength"] = SPEED_OF_LIGHT / f
    elif "wavelength" in sec:
        kw["wavelength"] = _num(sec["wavelength"], "array.wavelength")
    try:
        return ArrayConstants(**kw)
    except ValueError as exc:
        raise ConfigError(f"array: {exc}") from None


def _directivity(value, name):
    if value is None or (isinstance(value, str) and value.lower() in ("omni", "omnidirectional")):
        return None
    return _num(value, name)


def _channel(sec, wavelength):
    kw = {k: _num(sec[k], f"channel.{k}", int)
          for k in ("num_users", "num_clusters", "paths_per_cluster") if k in sec}
    if "directivity" in sec:
        kw["directivity"] = _directivity(sec["directivity"], "channel.directivity")
    try:
        return ChannelConfig(wavelength=wavelength, **kw)
    except ValueError as exc:
        raise ConfigError(f"channel: {exc}") from None


def _sca(sec):
    kw = {}
    for key in ("max_iterations", "init_seed"):
        if key in sec:
            kw[key] = _num(sec[key], f"sca.{key}", int)
    for key in ("tolerance", "trust_amplitude", "trust_freq", "shrink", "min_trust"):
        if key in sec and sec[key] is not None:
            kw[key] = _num(sec[key], f"sca.{key}")
    if "init" in sec:
        if sec["init"] not in ("midpoint", "random"):
            raise ConfigError("sca.init must be 'midpoint' or 'random'")
        kw["init"] = sec["init"]
    if "gradient" in sec:
        if sec["gradient"] not in ("full", "heights"):
            raise ConfigError("sca.gradient must be 'full' or 'heights'")
        kw["gradient"] = sec["gradient"]
    if "freeze_precoder" in sec:
        if not isinstance(sec["freeze_precoder"], bool):
            raise ConfigError("sca.freeze_precoder must be true or false")
        kw["freeze_precoder"] = sec["freeze_precoder"]
    starts = _num(sec.get("starts", 1), "sca.starts", int)
    if starts < 1:
        raise ConfigError("sca.starts must be at least 1")
    try:
        return ScaSettings(**kw), starts
    except ValueError as exc:
        raise ConfigError(f"sca: {exc}") from None


def _baseline(sec):
    kw = {}
    for key in _BASELINE_KEYS:
        if key in sec and sec[key] is not None:
            kind = int if key == "max_iterations" else float
            kw[key] = _num(sec[key], f"baseline.{key}", kind)
    settings = BaselineSettings(**kw)
    if settings.max_iterations < 1 or not 0 < settings.shrink < 1 or settings.min_step <= 0:
        raise ConfigError("baseline: invalid iteration budget, shrink or min_step")
    return settings


def config_from_dict(data):
    """Build and validate an :class:`ExperimentConfig` from parsed YAML."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping at the top level")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(sorted(unknown))}")

    array = _array(_section(data, "array", _ARRAY_KEYS))
    channel = _channel(_section(data, "channel", _CHANNEL_KEYS), array.wavelength)
    sweep = _section(data, "sweep", {"axis", "values"})
    axis = sweep.get("axis", "snr")
    if axis not in SWEEP_AXES:
        raise ConfigError(f"sweep.axis must be one of {SWEEP_AXES}, got {axis!r}")
    values = sweep.get("values", [20.0])
    if not isinstance(values, list) or not values:
        raise ConfigError("sweep.values must be a non-empty list")
    kind = int if axis == "users" else float
    values = tuple(_num(v, "sweep.values", kind) for v in values)

    archs = data.get("architectures", list(ARCHITECTURES))
    if not isinstance(archs, list) or not archs or set(archs) - set(ARCHITECTURES):
        raise ConfigError(f"architectures must be a non-empty subset of {ARCHITECTURES}")
    archs = tuple(a for a in ARCHITECTURES if a in archs)

    realizations = _num(data.get("realizations", 1000), "realizations", int)
    seed = _num(data.get("seed", 0), "seed", int)
    workers = _num(data.get("workers", 1), "workers", int)
    noise_var = _num(data.get("noise_var", 1.0), "noise_var")
    snr_db = _num(data.get("snr_db", 20.0), "snr_db")
    if realizations < 1:
        raise ConfigError("realizations must be at least 1")
    if not 0 <= seed < 2**63:
        raise ConfigError("seed must lie in [0, 2**63)")
    if workers < 1:
        raise ConfigError("workers must be at least 1")
    if noise_var <= 0:
        raise ConfigError("noise_var must be positive")

    users = values if axis == "users" else (channel.num_users,)
    if min(users) < 1:
        raise ConfigError("number of users must be positive")
    if max(users) > array.num_elements:
        raise ConfigError(f"{max(users)} users exceed the {array.num_elements} array elements")
    if axis == "directivity" and min(values) < 1:
        raise ConfigError("directivity sweep values must be >= 1")
    if ("ccaa2d" in archs or "ccaa3d" in archs) and (
        (array.elements_per_tentacle - 1) * array.wavelength / 2 > array.total_arc_length
    ):
        raise ConfigError("elements cannot keep lambda/2 spacing within the arc length")

    sca, starts = _sca(_section(data, "sca", _SCA_KEYS))
    output = data.get("output", "results")
    if not isinstance(output, str):
        raise ConfigError("output must be a path string")
    return ExperimentConfig(
        array=array, channel=channel, sweep_axis=axis, sweep_values=values,
        snr_db=snr_db, noise_var=noise_var, architectures=archs,
        realizations=realizations, seed=seed, output=output, sca=sca,
        sca_starts=starts, baseline=_baseline(_section(data, "baseline", _BASELINE_KEYS)),
        workers=workers,
    )


def load_config(path):
    """Read and validate a YAML experiment file."""
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML ({exc})") from None
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return config_from_dict(data)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def default_config_text():
    return resources.files("softarray").joinpath("data/default.yaml").read_text()
