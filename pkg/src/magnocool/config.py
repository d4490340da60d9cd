"""Plain-text key = value parameter files.

Every numeric key is SI (rad/s, K, T, m) unless it carries one of the
suffixes below, which are expanded at load time:

    _over_2pi       value is a frequency in Hz, multiplied by 2*pi
    _over_omega_b   value is a ratio to omega_b
    _over_kappa_m   value is a ratio to kappa_m
    _mT             field in millitesla

``#`` starts a comment.  Unknown keys and duplicated quantities are errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .model import GYRO_RATIO, SphereSpec, SystemParams, thermal_occupancy
from .spectrum import CONSISTENT, PRINTED

#: Base numeric quantities and the model field each one feeds.
NUMERIC_KEYS = {
    "omega_a": "rate",
    "omega_m": "rate",
    "omega_b": "rate",
    "kappa_a": "rate",
    "kappa_m": "rate",
    "gamma_b": "rate",
    "J": "rate",
    "g": "rate",
    "G": "rate",
    "omega_drive": "rate",
    "rabi": "rate",
    "detuning": "rate",
    "gyro_ratio": "rate",
    "n_th": "number",
    "temperature": "number",
    "radius": "number",
    "spin_density": "number",
    "bias_field": "field",
    "drive_field": "field",
}
BOOL_KEYS = {"steady_state_halfwidth", "hot_magnon"}
STRING_KEYS = {"spectrum_form"}
FORMS = {"consistent": CONSISTENT, "printed": PRINTED}


@dataclass(frozen=True)
class RunInputs:
    params: SystemParams
    n_th: float | None
    sphere: SphereSpec
    hot_magnon: bool = True
    form_name: str = "consistent"
    resolved: dict = field(default_factory=dict)

    @property
    def form(self):
        return FORMS[self.form_name]


def _split_key(key):
    """Return (quantity, suffix) for a config key."""
    for suffix in ("_over_2pi", "_over_omega_b", "_over_kappa_m", "_mT"):
        if key.endswith(suffix):
            return key[: -len(suffix)], suffix
    return key, ""


def _validate_key(key):
    quantity, suffix = _split_key(key)
    if quantity in BOOL_KEYS or quantity in STRING_KEYS:
        if suffix:
            raise KeyError(key)
        return quantity
    kind = NUMERIC_KEYS.get(quantity)
    if kind is None:
        raise KeyError(key)
    if suffix == "_mT" and kind != "field":
        raise KeyError(key)
    if suffix in ("_over_2pi", "_over_omega_b", "_over_kappa_m") and kind != "rate":
        raise KeyError(key)
    return quantity


def _parse_bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_text(text, source=None):
    """Parse config text into an ordered ``{key: raw string}`` mapping."""
    entries = {}
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno, source)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"empty key or value in {raw.strip()!r}", lineno, source)
        try:
            quantity = _validate_key(key)
        except KeyError:
            raise ConfigError(f"unknown key {key!r}", lineno, source) from None
        if quantity in seen:
            raise ConfigError(
                f"{key!r} duplicates {seen[quantity][0]!r} (line {seen[quantity][1]})", lineno, source
            )
        seen[quantity] = (key, lineno)
        entries[key] = (value, lineno)
    return entries


def apply_overrides(entries, overrides, source="--set"):
    """Overrides replace every existing entry for the same quantity."""
    out = dict(entries)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must be KEY=VALUE, got {item!r}", source=source)
        key, value = (s.strip() for s in item.split("=", 1))
        try:
            quantity = _validate_key(key)
        except KeyError:
            raise ConfigError(f"unknown key {key!r}", source=source) from None
        for existing in [k for k in out if _validate_key(k) == quantity]:
            del out[existing]
        out[key] = (value, None)
    return out


def _resolve_numbers(entries, source):
    values = {}
    pending = {}
    for key, (text, lineno) in entries.items():
        quantity, suffix = _split_key(key)
        if quantity in BOOL_KEYS or quantity in STRING_KEYS:
            continue
        try:
            number = float(text)
        except ValueError:
            raise ConfigError(f"{key}: not a number: {text!r}", lineno, source) from None
        if not math.isfinite(number):
            raise ConfigError(f"{key}: value must be finite", lineno, source)
        if suffix == "":
            values[quantity] = number
        elif suffix == "_over_2pi":
            values[quantity] = 2.0 * math.pi * number
        elif suffix == "_mT":
            values[quantity] = 1e-3 * number
        else:
            pending[quantity] = (suffix[len("_over_"):], number, key, lineno)
    while pending:
        progressed = False
        for quantity, (base, number, key, lineno) in list(pending.items()):
            if base in values:
                values[quantity] = number * values[base]
                del pending[quantity]
                progressed = True
        if not progressed:
            quantity, (base, _, key, lineno) = next(iter(pending.items()))
            raise ConfigError(f"{key}: {base} is not defined", lineno, source)
    return values


def resolve(entries, source=None) -> RunInputs:
    values = _resolve_numbers(entries, source)
    flags = {}
    strings = {}
    for key, (text, lineno) in entries.items():
        if key in BOOL_KEYS:
            try:
                flags[key] = _parse_bool(text)
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}", lineno, source) from None
        elif key in STRING_KEYS:
            strings[key] = text
    form_name = strings.get("spectrum_form", "consistent")
    if form_name not in FORMS:
        raise ConfigError(f"spectrum_form must be one of {sorted(FORMS)}, got {form_name!r}", source=source)

    required = ("omega_a", "omega_m", "omega_b", "kappa_a", "kappa_m", "gamma_b", "J")
    missing = [k for k in required if k not in values]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}", source=source)
    if "omega_drive" in values and "detuning" in values:
        raise ConfigError("give either omega_drive or detuning, not both", source=source)
    if "detuning" in values:
        values["omega_drive"] = values["omega_m"] + values["detuning"]
    if "omega_drive" not in values:
        raise ConfigError("missing omega_drive (or detuning)", source=source)
    if "n_th" in values and "temperature" in values:
        raise ConfigError("give either n_th or temperature, not both", source=source)

    try:
        params = SystemParams(
            omega_a=values["omega_a"],
            omega_m=values["omega_m"],
            omega_b=values["omega_b"],
            kappa_a=values["kappa_a"],
            kappa_m=values["kappa_m"],
            gamma_b=values["gamma_b"],
            j_coupling=values["J"],
            g_single=values.get("g", 0.0),
            omega_drive=values["omega_drive"],
            rabi=values.get("rabi", 0.0),
            g_linearized_override=values.get("G"),
            steady_state_halfwidth=flags.get("steady_state_halfwidth", False),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), source=source) from None
    sphere = SphereSpec(
        radius=values.get("radius", SphereSpec.radius),
        spin_density=values.get("spin_density", SphereSpec.spin_density),
        gyro_ratio=values.get("gyro_ratio", GYRO_RATIO),
        bias_field=values.get("bias_field", 0.0),
        drive_field_amplitude=values.get("drive_field", 0.0),
    )
    n_th = values.get("n_th")
    if "temperature" in values:
        n_th = thermal_occupancy(params.omega_b, values["temperature"])
    if n_th is not None and n_th < 0:
        raise ConfigError("n_th must be non-negative", source=source)
    resolved = dict(values)
    resolved.update(flags)
    resolved["spectrum_form"] = form_name
    if n_th is not None:
        resolved["n_th"] = n_th
    return RunInputs(
        params=params,
        n_th=n_th,
        sphere=sphere,
        hot_magnon=flags.get("hot_magnon", True),
        form_name=form_name,
        resolved=resolved,
    )


def shipped_configs():
    """Names of the configuration files bundled with the package."""
    root = resources.files("magnocool") / "configs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def read_config_text(name_or_path):
    """Return ``(text, source)`` for a path or a bundled config name."""
    path = Path(name_or_path)
    if path.is_file():
        return path.read_text(), str(path)
    name = name_or_path[:-4] if name_or_path.endswith(".cfg") else name_or_path
    res = resources.files("magnocool") / "configs" / f"{name}.cfg"
    if res.is_file():
        return res.read_text(), name
    raise ConfigError(f"no such config file or bundled config: {name_or_path!r}")


def load(name_or_path, overrides=()) -> RunInputs:
    text, source = read_config_text(name_or_path)
    entries = apply_overrides(parse_text(text, source), overrides)
    return resolve(entries, source)


def loads(text, overrides=(), source="<string>") -> RunInputs:
    return resolve(apply_overrides(parse_text(text, source), overrides), source)
