"""Scenario files: YAML or JSON, validated against the bundled schemas."""

import json
from dataclasses import dataclass, field
from importlib import resources

import jsonschema
import yaml
from referencing import Registry, Resource

from ..errors import ConfigInvalid

TASKS = ("CheckConditions", "CasimirAlpha", "WallAudit", "TraceChain", "OscillatorTrace", "FullPipeline")
SCHEMA_VERSION = 1


def _load_schema(name):
    text = resources.files(__package__).joinpath("schemas").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def _registry():
    common = _load_schema("common")
    return Registry().with_resource("common.json", Resource.from_contents(common))


def schema_for(task):
    """Published parameter schema of a task."""
    if task not in TASKS:
        raise ConfigInvalid(f"unknown task {task!r}")
    return _load_schema(task)


@dataclass(frozen=True)
class Scenario:
    name: str
    task: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    output_format: str = "json"

    def echo(self):
        return {
            "schema": SCHEMA_VERSION,
            "name": self.name,
            "task": self.task,
            "parameters": self.parameters,
            "seed": self.seed,
            "output_format": self.output_format,
        }


def _fail(err, prefix):
    where = "/".join(str(p) for p in err.absolute_path)
    where = f"{prefix}/{where}" if where else prefix
    raise ConfigInvalid(f"{where}: {err.message}") from None


def validate(data):
    """Check a raw mapping; raise ConfigInvalid with the failing path."""
    if not isinstance(data, dict):
        raise ConfigInvalid("scenario must be a mapping")
    top = jsonschema.Draft202012Validator(_load_schema("scenario"))
    for err in sorted(top.iter_errors(data), key=lambda e: list(e.absolute_path)):
        _fail(err, "scenario")
    params = jsonschema.Draft202012Validator(schema_for(data["task"]), registry=_registry())
    errors = sorted(params.iter_errors(data["parameters"]), key=lambda e: list(e.absolute_path))
    for err in errors:
        _fail(err, "parameters")
    return Scenario(
        name=data["name"],
        task=data["task"],
        parameters=data["parameters"],
        seed=data.get("seed", 0),
        output_format=data.get("output_format", "json"),
    )


def load_scenario(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigInvalid(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigInvalid(f"cannot parse {path}: {exc}") from None
    return validate(data)
