"""Model files: voluptuous schemas, YAML parsing and built-in presets."""

from __future__ import annotations

from pathlib import Path
from typing import Any

import voluptuous as vol
import yaml

from .const import (
    _LOGGER,
    CONF_ATOMS,
    CONF_IMMIGRATION,
    CONF_KIND,
    CONF_OFFSPRING,
    CONF_PARAM,
    CONF_PROB,
    CONF_REFLECT,
    CONF_SITES,
    CONF_VALUE,
    KIND_DETERMINISTIC,
    KIND_FINITE,
    KIND_GEOMETRIC,
    KIND_POISSON,
    PRESET_KAPPAS,
    PRESET_SITES_A,
    PRESET_SITES_B,
    PRESET_SITES_C,
    SITE_PRESET_KAPPAS,
)
from .env_model import (
    Deterministic,
    EnvironmentAtom,
    EnvironmentModel,
    FiniteDiscrete,
    Geometric,
    Law,
    Poisson,
    preset_model,
    two_point_environment,
)
from .exceptions import ParseError, ValidationError
from .rwre import RwreModel

# right-step probabilities of the site presets; xi'/xi is 1/2 and 2
_SITE_VALUES = (2.0 / 3.0, 1.0 / 3.0)

LAW_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_KIND): vol.In(
            [KIND_GEOMETRIC, KIND_POISSON, KIND_DETERMINISTIC, KIND_FINITE]
        ),
        vol.Required(CONF_PARAM): vol.Any(
            vol.Coerce(float),
            {vol.Coerce(int): vol.Coerce(float)},
        ),
    }
)

ATOM_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_OFFSPRING): LAW_SCHEMA,
        vol.Required(CONF_IMMIGRATION): LAW_SCHEMA,
        vol.Required(CONF_PROB): vol.Coerce(float),
    }
)

MODEL_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_ATOMS): vol.All([ATOM_SCHEMA], vol.Length(min=1)),
    }
)

SITE_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_VALUE): vol.Coerce(float),
        vol.Required(CONF_PROB): vol.Coerce(float),
    }
)

SITES_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_SITES): vol.All([SITE_SCHEMA], vol.Length(min=1)),
        vol.Optional(CONF_REFLECT, default=True): bool,
    }
)

SITE_PRESET_NAMES = (PRESET_SITES_A, PRESET_SITES_B, PRESET_SITES_C)


def site_preset(name: str) -> RwreModel:
    """
    Built-in site law SITES-A .. SITES-C.

    xi takes the values 2/3 and 1/3; the weight on 2/3 is the down-probability
    of the two-point environment with the same Cramer root.
    """
    if name not in SITE_PRESET_KAPPAS:
        msg = f"unknown site preset {name!r}"
        raise KeyError(msg)
    probs = two_point_environment(SITE_PRESET_KAPPAS[name]).probs
    return RwreModel(site_values=_SITE_VALUES, probs=probs)


def _build_law(config: dict[str, Any], where: str) -> Law:
    kind = config[CONF_KIND]
    param = config[CONF_PARAM]
    if kind == KIND_FINITE:
        if not isinstance(param, dict):
            msg = f"{where}: finite law needs a {{value: prob}} mapping"
            raise ValidationError([msg])
        return FiniteDiscrete.from_pmf(param)
    if isinstance(param, dict):
        msg = f"{where}: {kind} law needs a single number"
        raise ValidationError([msg])
    if kind == KIND_GEOMETRIC:
        return Geometric(param)
    if kind == KIND_POISSON:
        return Poisson(param)
    if not float(param).is_integer() or param < 0:
        msg = f"{where}: deterministic value must be a natural number: {param!r}"
        raise ValidationError([msg])
    return Deterministic(int(param))


def model_from_config(config: dict[str, Any]) -> EnvironmentModel | RwreModel:
    """
    Validate a decoded model document and build the model.

    :raises ValidationError: listing every schema or invariant violation
    """
    if not isinstance(config, dict):
        msg = f"model document must be a mapping, got {type(config).__name__}"
        raise ValidationError([msg])
    schema = SITES_SCHEMA if CONF_SITES in config else MODEL_SCHEMA
    try:
        config = schema(config)
    except vol.MultipleInvalid as err:
        raise ValidationError([str(e) for e in err.errors]) from err
    except vol.Invalid as err:
        raise ValidationError([str(err)]) from err

    if CONF_SITES in config:
        sites = config[CONF_SITES]
        return RwreModel(
            site_values=tuple(s[CONF_VALUE] for s in sites),
            probs=tuple(s[CONF_PROB] for s in sites),
            reflect_at_origin=config[CONF_REFLECT],
        )

    atoms = []
    problems: list[str] = []
    for i, atom in enumerate(config[CONF_ATOMS]):
        laws = []
        for key in (CONF_OFFSPRING, CONF_IMMIGRATION):
            try:
                laws.append(_build_law(atom[key], f"atom {i} {key}"))
            except ValidationError as err:
                problems.extend(err.problems)
        if len(laws) == 2:  # noqa: PLR2004
            atoms.append(EnvironmentAtom(*laws))
    if problems:
        raise ValidationError(problems)
    return EnvironmentModel(
        atoms=tuple(atoms), probs=tuple(a[CONF_PROB] for a in config[CONF_ATOMS])
    )


def parse_model(source: str | Path) -> EnvironmentModel | RwreModel:
    """
    Load a model from a preset name or a YAML file.

    :param source: ``ENV-A`` .. ``ENV-E``, ``SITES-A`` .. ``SITES-C`` or a path
    :raises ParseError: when the file is missing or not valid YAML
    :raises ValidationError: when the document violates the model invariants
    """
    name = str(source)
    if name in PRESET_KAPPAS:
        return preset_model(name)
    if name in SITE_PRESET_KAPPAS:
        return site_preset(name)

    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        msg = f"cannot read model file {path}: {err}"
        raise ParseError(msg) from err
    try:
        config = yaml.safe_load(text)
    except yaml.YAMLError as err:
        msg = f"model file {path} is not valid YAML: {err}"
        raise ParseError(msg) from err
    model = model_from_config(config)
    _LOGGER.debug("parsed %s from %s", type(model).__name__, path)
    return model


def serialize_model(model: EnvironmentModel | RwreModel) -> str:
    """YAML text that ``parse_model`` reads back to an equal model."""
    return yaml.safe_dump(model.to_config(), sort_keys=False)


def write_model(model: EnvironmentModel | RwreModel, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(serialize_model(model), encoding="utf-8")
    return path


def model_fingerprint(model: EnvironmentModel | RwreModel) -> str:
    """Content hash of the canonical model document."""
    return model.fingerprint()
