"""
Environment registry

Environments are addressed by string id:

- ``"cartpole"``, ``"pendulum"``, ``"minipong"``: default (in-distribution) instances
- ``"cartpole/gravity/78.4"``: one physical parameter overridden
- ``"minipong/gaussian/3"``: severity level 3 of a frame corruption
- ``"pendulum/length=5,mass=2"``: explicit overrides

``list_presets`` exposes the OOD grids: for the physics tasks each default
scaled by 1/10 ... 1/2 and 2 ... 10 (cartpole) or by fixed factors (pendulum);
for MiniPong the five severity levels of each corruption kind.
"""

import logging
from dataclasses import dataclass, field
from typing import Mapping, Optional

from pydantic import ValidationError

from ..corruptions import KINDS as CORRUPTION_KINDS
from ..corruptions import CorruptionSpec, severity_spec
from ..errors import ConfigError, SpecError
from .base import Environment, EnvParams
from .cartpole import CartpoleEnv, CartpoleParams
from .minipong import MiniPongEnv, MiniPongParams
from .pendulum import PendulumEnv, PendulumParams

logger = logging.getLogger(__name__)

ENV_CLASSES: dict[str, type[Environment]] = {
    "cartpole": CartpoleEnv,
    "pendulum": PendulumEnv,
    "minipong": MiniPongEnv,
}
PARAM_CLASSES: dict[str, type[EnvParams]] = {
    "cartpole": CartpoleParams,
    "pendulum": PendulumParams,
    "minipong": MiniPongParams,
}
ENV_IDS = tuple(ENV_CLASSES)

# short preset name -> parameter field
PARAM_ALIASES: dict[str, dict[str, str]] = {
    "cartpole": {"length": "pole_half_length", "force": "force_magnitude"},
    "pendulum": {},
    "minipong": {},
}

PRESET_GRIDS: dict[str, dict[str, tuple[float, ...]]] = {
    "cartpole": {
        "gravity": (0.98, 1.09, 1.23, 1.4, 1.63, 1.96, 2.45, 3.27, 4.9,
                    19.6, 29.4, 39.2, 49.0, 58.8, 68.6, 78.4, 88.2, 98.0),
        "mass_cart": (0.1, 0.1111, 0.125, 0.1429, 0.1667, 0.2, 0.25, 0.3333, 0.5,
                      2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0),
        "length": (0.05, 0.0556, 0.0625, 0.0714, 0.0833, 0.1, 0.125, 0.1667, 0.25,
                   1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0),
        "mass_pole": (0.01, 0.0111, 0.0125, 0.0143, 0.0167, 0.02, 0.025, 0.0333, 0.05,
                      0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0),
        "force": (1.0, 1.1111, 1.25, 1.4286, 1.6667, 2.0, 2.5, 3.3333, 5.0,
                  20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0),
    },
    "pendulum": {
        "gravity": (0.5, 1.0, 2.0, 5.0, 20.0, 50.0, 100.0, 200.0),
        "mass": (0.05, 0.1, 0.2, 0.5, 2.0, 5.0, 10.0, 20.0),
        "length": (0.05, 0.1, 0.2, 0.5, 2.0, 5.0, 10.0, 20.0),
        "max_speed": (0.4, 0.8, 1.6, 4.0, 16.0, 40.0, 80.0, 160.0),
        "max_torque": (0.1, 0.2, 0.4, 1.0, 4.0, 10.0, 20.0, 40.0),
    },
}  # fmt: skip


@dataclass(frozen=True)
class VariantSpec:
    """A resolved environment variant: base env, parameter overrides, corruption"""

    env_id: str
    overrides: tuple[tuple[str, float], ...] = ()
    corruption: Optional[CorruptionSpec] = None
    variant_id: str = ""
    preset: Optional[str] = field(default=None, compare=False)

    @property
    def is_default(self) -> bool:
        return not self.overrides and self.corruption is None

    def build(self) -> Environment:
        return make_variant(
            self.env_id,
            dict(self.overrides),
            corruption=self.corruption,
            variant_id=self.variant_id,
        )


def _check_env(env_id: str) -> None:
    if env_id not in ENV_CLASSES:
        raise ConfigError(f"Unknown environment '{env_id}'. Available: {', '.join(ENV_IDS)}")


def canonical_param(env_id: str, name: str) -> str:
    """Map a short preset name (e.g. ``length``) to the parameter field

    Raises:
        ConfigError: If the environment has no such parameter
    """
    _check_env(env_id)
    field_name = PARAM_ALIASES[env_id].get(name, name)
    if field_name not in PARAM_CLASSES[env_id].model_fields:
        valid = sorted(set(PARAM_CLASSES[env_id].model_fields) | set(PARAM_ALIASES[env_id]))
        raise ConfigError(f"Unknown {env_id} parameter '{name}'. Valid: {', '.join(valid)}")
    return field_name


def make_params(env_id: str, overrides: Optional[Mapping[str, float]] = None) -> EnvParams:
    """Default parameters with ``overrides`` applied

    Raises:
        ConfigError: On unknown parameter names or invalid values
    """
    _check_env(env_id)
    values = {canonical_param(env_id, k): v for k, v in (overrides or {}).items()}
    try:
        return PARAM_CLASSES[env_id](**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid {env_id} parameters {values}: {e}") from e


def make_variant(
    base: str,
    overrides: Optional[Mapping[str, float]] = None,
    corruption: Optional[CorruptionSpec] = None,
    variant_id: Optional[str] = None,
) -> Environment:
    """Environment ``base`` with defaults except ``overrides``

    Example:
        >>> env = make_variant("cartpole", {"gravity": 78.4})
        >>> env.params.gravity
        78.4
    """
    params = make_params(base, overrides)
    if corruption is not None and base != "minipong":
        raise ConfigError(f"Observation corruptions need a pixel environment, got '{base}'")
    vid = variant_id or _format_variant_id(base, overrides or {}, corruption)
    if base == "minipong":
        return MiniPongEnv(params, corruption=corruption, variant_id=vid)
    return ENV_CLASSES[base](params, variant_id=vid)


def _format_value(value: float) -> str:
    return f"{float(value):g}"


def _format_variant_id(
    env_id: str, overrides: Mapping[str, float], corruption: Optional[CorruptionSpec]
) -> str:
    if corruption is not None:
        if corruption.severity is not None:
            return f"{env_id}/{corruption.kind}/{corruption.severity}"
        return f"{env_id}/{corruption.kind}={corruption.label}"
    if not overrides:
        return env_id
    if len(overrides) == 1:
        name, value = next(iter(overrides.items()))
        return f"{env_id}/{name}/{_format_value(value)}"
    pairs = ",".join(f"{k}={_format_value(v)}" for k, v in sorted(overrides.items()))
    return f"{env_id}/{pairs}"


def list_presets(env_id: str) -> list[str]:
    """All preset variant ids of an environment, grid order"""
    _check_env(env_id)
    if env_id == "minipong":
        return [f"minipong/{kind}/{s}" for kind in CORRUPTION_KINDS for s in range(1, 6)]
    return [
        f"{env_id}/{name}/{_format_value(v)}"
        for name, grid in PRESET_GRIDS[env_id].items()
        for v in grid
    ]


def preset_grid(env_id: str, name: str) -> tuple[float, ...]:
    """OOD values for one parameter (short name)"""
    _check_env(env_id)
    try:
        return PRESET_GRIDS[env_id][name]
    except KeyError:
        raise ConfigError(f"No preset grid for {env_id}.{name}") from None


def _parse_float(text: str, variant_id: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"Bad value '{text}' in variant id '{variant_id}'") from None


def resolve_variant(
    variant: str | Mapping[str, float], env_id: Optional[str] = None
) -> VariantSpec:
    """Parse a variant id (or an explicit override mapping for ``env_id``)

    Raises:
        ConfigError: On unknown environments, parameters or malformed ids
    """
    if not isinstance(variant, str):
        if env_id is None:
            raise ConfigError("Override mappings need an env_id")
        mapped = {canonical_param(env_id, k): float(v) for k, v in variant.items()}
        make_params(env_id, mapped)
        return VariantSpec(
            env_id=env_id,
            overrides=tuple(sorted(mapped.items())),
            variant_id=_format_variant_id(env_id, dict(variant), None),
        )

    parts = variant.strip().split("/")
    base = parts[0]
    _check_env(base)
    if env_id is not None and base != env_id:
        raise ConfigError(f"Variant '{variant}' does not belong to environment '{env_id}'")

    if len(parts) == 1:
        return VariantSpec(env_id=base, variant_id=base)

    if len(parts) == 2 and "=" in parts[1]:
        overrides: dict[str, float] = {}
        for pair in parts[1].split(","):
            name, _, text = pair.partition("=")
            overrides[canonical_param(base, name.strip())] = _parse_float(text.strip(), variant)
        make_params(base, overrides)
        return VariantSpec(
            env_id=base,
            overrides=tuple(sorted(overrides.items())),
            variant_id=variant.strip(),
        )

    if len(parts) != 3:
        raise ConfigError(f"Malformed variant id '{variant}'")

    _, name, text = parts
    if base == "minipong" and name in CORRUPTION_KINDS:
        try:
            corruption = severity_spec(name, int(text))
        except (ValueError, SpecError) as e:
            raise ConfigError(f"Bad severity in variant id '{variant}': {e}") from e
        return VariantSpec(
            env_id=base, corruption=corruption, variant_id=f"{base}/{name}/{int(text)}", preset=name
        )

    value = _parse_float(text, variant)
    field_name = canonical_param(base, name)
    make_params(base, {field_name: value})
    return VariantSpec(
        env_id=base,
        overrides=((field_name, value),),
        variant_id=f"{base}/{name}/{_format_value(value)}",
        preset=name,
    )


def make_env(variant: str) -> Environment:
    """Build an environment from an id such as ``"cartpole/length/2"``"""
    return resolve_variant(variant).build()
