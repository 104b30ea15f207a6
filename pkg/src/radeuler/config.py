"""Run configuration: sectioned ``key = value`` files plus command-line overrides."""

import configparser
from dataclasses import asdict, dataclass, fields
import io
from pathlib import Path

from .differences import CLOSURES
from .evolution import INTEGRATORS
from .initial_data import PROFILES

MODES = ("nonlinear", "linearized", "picard", "radiation-off")


class ConfigError(ValueError):
    """Invalid configuration; the message names the key and the constraint."""


# section -> ordered keys; attribute name is "<key>" except where remapped
SECTIONS = {
    "geometry": ("a", "b"),
    "gas": ("cv", "A"),
    "grid": ("n",),
    "time": ("t_final", "cfl", "output_every", "integrator"),
    "model": ("mode", "closure", "nu"),
    "initial": ("epsilon", "profile", "flatness_order", "weights", "center", "half_width",
                "custom_P", "custom_u", "custom_s"),
    "picard": ("T", "k_max", "tol"),
    "output": ("directory", "diagnostics"),
}

_ATTR = {("picard", "T"): "picard_T", ("picard", "k_max"): "k_max", ("picard", "tol"): "picard_tol",
         ("output", "directory"): "output_dir"}


def _attr(section, key):
    return _ATTR.get((section, key), key)


@dataclass
class RunConfig:
    a: float = 1.0
    b: float = 2.0
    cv: float = 1.5
    A: float = 1.0
    n: int = 256
    t_final: float = 1.0
    cfl: float = 0.4
    output_every: float = 0.1
    integrator: str = "ssprk3"
    mode: str = "nonlinear"
    closure: str = "sbp"
    nu: float = 0.0
    epsilon: float = 1e-3
    profile: str = "compact-bump"
    flatness_order: int = 1
    weights: tuple = (1.0, 1.0, 1.0)
    center: float = 0.5
    half_width: float = 0.35
    custom_P: str = ""
    custom_u: str = ""
    custom_s: str = ""
    picard_T: float = None
    k_max: int = 8
    picard_tol: float = 1e-12
    output_dir: str = ""
    diagnostics: bool = True

    def validate(self):
        def need(ok, key, constraint):
            if not ok:
                raise ConfigError(f"{key}: {constraint} (got {getattr(self, _attr(*key.split('.')))!r})")

        need(0 < self.a, "geometry.a", "must be positive")
        need(self.a < self.b, "geometry.b", "must exceed geometry.a")
        need(self.cv > 0, "gas.cv", "must be positive")
        need(self.A > 0, "gas.A", "must be positive")
        need(self.n >= 8, "grid.n", "must be an integer >= 8")
        need(self.t_final >= 0, "time.t_final", "must be non-negative")
        need(0 < self.cfl <= 1, "time.cfl", "must lie in (0, 1]")
        need(self.output_every > 0, "time.output_every", "must be positive")
        need(self.integrator in INTEGRATORS, "time.integrator", f"must be one of {INTEGRATORS}")
        need(self.mode in MODES, "model.mode", f"must be one of {MODES}")
        need(self.closure in CLOSURES, "model.closure", f"must be one of {CLOSURES}")
        need(self.nu >= 0, "model.nu", "must be non-negative")
        need(self.epsilon >= 0, "initial.epsilon", "must be non-negative")
        need(self.profile in PROFILES, "initial.profile", f"must be one of {PROFILES}")
        need(self.flatness_order >= 1, "initial.flatness_order", "must be an integer >= 1")
        need(len(self.weights) == 3, "initial.weights", "needs three numbers for P, u, s")
        need(0 < self.half_width and 0 < self.center - self.half_width
             and self.center + self.half_width < 1,
             "initial.half_width", "bump support must lie inside (0, 1)")
        if self.profile == "custom":
            need(any((self.custom_P, self.custom_u, self.custom_s)), "initial.custom_P",
                 "custom profile needs at least one sample file")
        if self.mode == "picard":
            need(self.picard_T is not None, "picard.T", "required in picard mode")
        if self.picard_T is not None:
            need(self.picard_T > 0, "picard.T", "must be positive")
        need(self.k_max >= 1, "picard.k_max", "must be >= 1")
        need(self.picard_tol >= 0, "picard.tol", "must be non-negative")
        return self

    @property
    def horizon(self):
        """Final time of the run in the chosen mode."""
        return self.picard_T if self.mode == "picard" else self.t_final


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(section, key, text):
    name = _attr(section, key)
    kind = _TYPES[name]
    text = text.strip()
    try:
        if name == "picard_T":
            return None if text.lower() in ("", "none") else float(text)
        if kind is float:
            return float(text)
        if kind is int:
            value = float(text)
            if value != int(value):
                raise ValueError
            return int(value)
        if kind is bool:
            lowered = text.lower()
            if lowered not in ("true", "false", "yes", "no", "1", "0", "on", "off"):
                raise ValueError
            return lowered in ("true", "yes", "1", "on")
        if kind is tuple:
            parts = [float(p) for p in text.replace(",", " ").split()]
            return tuple(parts)
        return text
    except ValueError:
        raise ConfigError(f"{section}.{key}: cannot parse {text!r} as {kind.__name__}") from None


def _lookup(dotted):
    if "." not in dotted:
        for section, keys in SECTIONS.items():
            if dotted in keys:
                return section, dotted
        raise ConfigError(f"unknown key {dotted!r}")
    section, key = dotted.split(".", 1)
    if section not in SECTIONS:
        raise ConfigError(f"unknown section {section!r}")
    if key not in SECTIONS[section]:
        raise ConfigError(f"unknown key {section}.{key}")
    return section, key


def parse_config(path=None, overrides=None, text=None):
    """Read a config file (or text) and apply ``{"section.key": "value"}`` overrides.

    Missing keys take the documented defaults.  Unknown sections or keys
    and out-of-range values raise :class:`ConfigError`.
    """
    values = {}
    if path is not None or text is not None:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            if path is not None:
                with open(path) as fh:
                    parser.read_file(fh)
            else:
                parser.read_string(text)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except configparser.Error as exc:
            raise ConfigError(f"malformed config: {exc}") from None
        for section in parser.sections():
            if section not in SECTIONS:
                raise ConfigError(f"unknown section {section!r}")
            for key, raw in parser.items(section):
                if key not in SECTIONS[section]:
                    raise ConfigError(f"unknown key {section}.{key}")
                values[_attr(section, key)] = _convert(section, key, raw)
    for dotted, raw in (overrides or {}).items():
        section, key = _lookup(dotted)
        values[_attr(section, key)] = raw if not isinstance(raw, str) else _convert(section, key, raw)
    return RunConfig(**values).validate()


def _format(value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


def to_ini(config):
    """Serialize every field; ``parse_config(text=to_ini(c)) == c``."""
    data = asdict(config)
    out = io.StringIO()
    for section, keys in SECTIONS.items():
        out.write(f"[{section}]\n")
        for key in keys:
            out.write(f"{key} = {_format(data[_attr(section, key)])}\n")
        out.write("\n")
    return out.getvalue()


def initial_spec(config, base_dir=None):
    """Build an :class:`~radeuler.initial_data.InitialDataSpec` from a config."""
    from .initial_data import InitialDataSpec, load_custom_profile

    custom = {}
    for name in ("P", "u", "s"):
        path = getattr(config, f"custom_{name}")
        if path:
            p = Path(path)
            if base_dir is not None and not p.is_absolute():
                p = Path(base_dir) / p
            custom[name] = load_custom_profile(p, config.n)
    return InitialDataSpec(
        epsilon=config.epsilon, profile=config.profile, flatness_order=config.flatness_order,
        weights=tuple(config.weights), custom=custom, center=config.center,
        half_width=config.half_width,
    )
