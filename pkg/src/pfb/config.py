"""JSON run configuration: schema validation with JSON-path diagnostics.

A run config names either a built-in benchmark (with constructor parameters
and a nested ``overrides`` object merged into the generated spec) or a full
custom spec::

    {"problem": {"benchmark": "multilayer", "params": {"nx": 20, "ny": 20}},
     "formulation": "rt0", "output_dir": "out/ml"}
"""

from __future__ import annotations

import copy
import inspect
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema

from . import benchmarks
from .errors import ConfigError

_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}
_FIELD = {
    "oneOf": [
        {"type": "number"},
        {
            "type": "object",
            "properties": {"linear": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}},
            "required": ["linear"],
            "additionalProperties": False,
        },
    ]
}
_TAG_TABLE = {"type": "object", "additionalProperties": _FIELD}

SPEC_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "mesh": {
            "type": "object",
            "properties": {"kind": {"enum": ["structured", "layers", "disk_inclusion", "leaky_well", "file"]}},
            "required": ["kind"],
        },
        "materials": {
            "type": "object",
            "properties": {
                "regions": {
                    "type": "object",
                    "patternProperties": {
                        "^-?[0-9]+$": {
                            "type": "object",
                            "properties": {"k": _POS, "rho": _NONNEG},
                            "required": ["k"],
                            "additionalProperties": False,
                        }
                    },
                    "additionalProperties": False,
                    "minProperties": 1,
                },
                "mu0": _POS,
                "beta": _NONNEG,
                "body_force": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            },
            "required": ["regions", "mu0"],
            "additionalProperties": False,
        },
        "flow": {
            "type": "object",
            "properties": {
                "velocity": _TAG_TABLE,
                "pressure": _TAG_TABLE,
                "source": {"oneOf": [{"type": "null"}, _FIELD]},
            },
            "additionalProperties": False,
        },
        "transport": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "properties": {
                        "diffusivity": _POS,
                        "dt": _POS,
                        "t_end": _NONNEG,
                        "dirichlet": _TAG_TABLE,
                        "neumann": _TAG_TABLE,
                        "source": {"oneOf": [{"type": "null"}, _FIELD]},
                        "initial": {
                            "type": "object",
                            "properties": {
                                "value": {"type": "number"},
                                "regions": {
                                    "type": "object",
                                    "patternProperties": {"^-?[0-9]+$": {"type": "number"}},
                                    "additionalProperties": False,
                                },
                            },
                            "additionalProperties": False,
                        },
                        "output_interval": {"type": "integer", "minimum": 1},
                    },
                    "required": ["dt", "t_end"],
                    "additionalProperties": False,
                },
            ]
        },
        "outputs": {"type": "object"},
        "thresholds": {"type": "object", "additionalProperties": {"type": ["number", "array", "null"]}},
        "formulations": {
            "type": "array",
            "items": {"enum": ["rt0", "vms"]},
            "minItems": 1,
            "uniqueItems": True,
        },
    },
    "required": ["name", "mesh", "materials", "flow"],
    "additionalProperties": False,
}

RUN_SCHEMA = {
    "type": "object",
    "properties": {
        "problem": {
            "type": "object",
            "properties": {
                "benchmark": {"enum": sorted(benchmarks.BUILTIN)},
                "params": {"type": "object"},
                "overrides": {"type": "object"},
                "spec": {"type": "object"},
            },
            "additionalProperties": False,
            "oneOf": [{"required": ["benchmark"]}, {"required": ["spec"]}],
        },
        "formulation": {"enum": ["rt0", "vms", "both"]},
        "output_dir": {"type": "string", "minLength": 1},
        "output_interval": {"type": "integer", "minimum": 1},
        "solver": {
            "type": "object",
            "properties": {
                "picard_tol": _POS,
                "picard_max_iter": {"type": "integer", "minimum": 1},
                "steady_tol": _POS,
            },
            "additionalProperties": False,
        },
    },
    "required": ["problem"],
    "additionalProperties": False,
}


@dataclass
class RunConfig:
    spec: benchmarks.BenchmarkSpec
    formulations: list
    output_dir: Optional[str] = None
    solver: dict = field(default_factory=dict)
    source: dict = field(default_factory=dict)  # the validated raw config


def _path(prefix, parts):
    out = prefix
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _first_error(instance, schema, prefix):
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(instance), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if not errors:
        return None
    err = errors[0]
    # drill into the most specific branch of oneOf failures
    while err.context:
        err = sorted(err.context, key=lambda e: (-len(e.absolute_path), e.message))[0]
    parts = list(err.absolute_path)
    if err.validator == "additionalProperties" and isinstance(err.instance, dict):
        known = set(err.schema.get("properties", {}))
        patterns = err.schema.get("patternProperties", {})
        extra = sorted(
            k for k in err.instance if k not in known and not any(re.search(p, k) for p in patterns)
        )
        if extra:
            hint = f" (expected one of {sorted(known)})" if known else ""
            return ConfigError(_path(prefix, parts + [extra[0]]), f"unknown key {extra[0]!r}{hint}")
    if err.validator == "required":
        missing = [k for k in err.validator_value if k not in err.instance]
        if missing:
            return ConfigError(_path(prefix, parts + [missing[0]]), "missing required field")
    return ConfigError(_path(prefix, parts), err.message)


def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def validate_spec_dict(data, prefix="$"):
    err = _first_error(data, SPEC_SCHEMA, prefix)
    if err:
        raise err
    return benchmarks.BenchmarkSpec.from_dict(data, prefix)


def resolve_spec(problem: dict) -> benchmarks.BenchmarkSpec:
    if "spec" in problem:
        return validate_spec_dict(problem["spec"], "$.problem.spec")
    name = problem["benchmark"]
    params = problem.get("params", {})
    factory = benchmarks.BUILTIN[name]
    sig = inspect.signature(factory)
    accepts_kwargs = any(p.kind is p.VAR_KEYWORD for p in sig.parameters.values())
    for key in params:
        if key not in sig.parameters and not accepts_kwargs:
            raise ConfigError(f"$.problem.params.{key}", f"unknown parameter for {name!r}")
    try:
        spec = factory(**params)
    except TypeError as exc:
        raise ConfigError("$.problem.params", str(exc)) from None
    merged = _merge(spec.to_dict(), problem.get("overrides", {}))
    err = _first_error(merged, SPEC_SCHEMA, "$.problem.overrides")
    if err:
        raise err
    return benchmarks.BenchmarkSpec.from_dict(merged, "$.problem.overrides")


def parse_config_data(data) -> RunConfig:
    err = _first_error(data, RUN_SCHEMA, "$")
    if err:
        raise err
    spec = resolve_spec(data["problem"])
    if "output_interval" in data and spec.transport:
        spec.transport["output_interval"] = data["output_interval"]
    form = data.get("formulation", "both")
    forms = list(spec.formulations) if form == "both" else [form]
    return RunConfig(spec, forms, data.get("output_dir"), dict(data.get("solver", {})), data)


def parse_config_text(text) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config_data(data)


def parse_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("$", f"cannot read {path}: {exc.strerror}") from None
    return parse_config_text(text)
