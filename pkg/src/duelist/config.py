"""Strict JSON experiment configuration.

Three document kinds, selected by the top-level ``kind`` key::

    {"kind": "experiment", "algorithm": "da", "benchmark": "m2", "seeds": [1, 2],
     "config": {"luck_coefficient": 0.0}, "bits_per_var": 16}

    {"kind": "sweep", "base": {...experiment without kind...},
     "parameter": "learning_probability", "values": [0.1, 0.2], "seeds": [1, 2]}

    {"kind": "compare", "threshold": 30.0, "experiments": [{...}, {...}]}

Unknown keys, duplicate keys and out-of-range values raise
:class:`~duelist.core.ConfigError` whose ``key`` is the dotted path of the
offending entry. Parameters missing from a ``config`` block take the
algorithm defaults listed by ``duelist --help``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

from .core import ConfigError
from .harness.experiment import ComparisonSpec, ExperimentSpec, SweepSpec

AnySpec = Union[ExperimentSpec, SweepSpec, ComparisonSpec]

_EXPERIMENT_KEYS = {"algorithm", "benchmark", "seeds", "config", "benchmark_params", "bounds",
                    "bits_per_var", "init_seeds", "label", "output_dir"}
_REQUIRED = ("algorithm", "benchmark", "seeds")


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ConfigError(f"duplicate key {k!r}", key=k)
        out[k] = v
    return out


def _check_keys(doc: Any, allowed: set[str], where: str, required=()) -> None:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where or 'document'} must be a JSON object", key=where or None)
    prefix = f"{where}." if where else ""
    for key in doc:
        if key not in allowed:
            raise ConfigError(f"{prefix}{key}: unknown key", key=prefix + key)
    for key in required:
        if key not in doc:
            raise ConfigError(f"{prefix}{key}: missing required key", key=prefix + key)


def _int_list(value, key: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise ConfigError(f"{key}: must be a list of integers", key=key)
    return tuple(value)


def _experiment(doc: dict, where: str) -> ExperimentSpec:
    _check_keys(doc, _EXPERIMENT_KEYS, where, _REQUIRED)
    prefix = f"{where}." if where else ""
    for key in ("config", "benchmark_params"):
        if key in doc and not isinstance(doc[key], dict):
            raise ConfigError(f"{prefix}{key}: must be a JSON object", key=prefix + key)
    lower = upper = None
    if "bounds" in doc:
        bounds = doc["bounds"]
        _check_keys(bounds, {"lower", "upper"}, prefix + "bounds", ("lower", "upper"))
        lower, upper = bounds["lower"], bounds["upper"]
        for name, value in (("lower", lower), ("upper", upper)):
            if not isinstance(value, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                                       for v in value):
                raise ConfigError(f"{prefix}bounds.{name}: must be a list of numbers",
                                  key=f"{prefix}bounds.{name}")
    spec = ExperimentSpec(
        algorithm=doc["algorithm"],
        benchmark=doc["benchmark"],
        seeds=_int_list(doc["seeds"], prefix + "seeds"),
        config=doc.get("config", {}),
        benchmark_params=doc.get("benchmark_params", {}),
        lower=lower,
        upper=upper,
        bits_per_var=doc.get("bits_per_var", 16),
        init_seeds=_int_list(doc["init_seeds"], prefix + "init_seeds") if "init_seeds" in doc else None,
        label=doc.get("label"),
        output_dir=doc.get("output_dir"),
    )
    try:
        spec.validate()
    except ConfigError as exc:
        if not where:
            raise
        key = f"{where}.{exc.key}" if exc.key else where
        raise ConfigError(f"{where}: {exc}", key=key) from None
    return spec


def from_dict(doc: Any) -> AnySpec:
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    kind = doc.get("kind")
    body = {k: v for k, v in doc.items() if k != "kind"}
    if kind == "experiment":
        return _experiment(body, "")
    if kind == "sweep":
        _check_keys(body, {"base", "parameter", "values", "seeds"}, "", ("base", "parameter", "values"))
        values = body["values"]
        if not isinstance(values, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                                   for v in values):
            raise ConfigError("values: must be a list of numbers", key="values")
        spec = SweepSpec(
            base=_experiment(body["base"], "base"),
            parameter=body["parameter"],
            values=tuple(values),
            seeds=_int_list(body["seeds"], "seeds") if "seeds" in body else None,
        )
        spec.validate()
        return spec
    if kind == "compare":
        _check_keys(body, {"experiments", "threshold"}, "", ("experiments",))
        if not isinstance(body["experiments"], list):
            raise ConfigError("experiments: must be a list", key="experiments")
        experiments = tuple(_experiment(e, f"experiments[{k}]") for k, e in enumerate(body["experiments"]))
        spec = ComparisonSpec(experiments, body.get("threshold"))
        spec.validate()
        return spec
    raise ConfigError(f"kind: must be one of 'experiment', 'sweep', 'compare', got {kind!r}", key="kind")


def loads(text: str) -> AnySpec:
    if not text.strip():
        raise ConfigError("config document is empty")
    try:
        doc = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from None
    return from_dict(doc)


def parse_config(path) -> AnySpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    return loads(text)


def _experiment_dict(spec: ExperimentSpec) -> dict:
    doc = {
        "algorithm": spec.algorithm,
        "benchmark": spec.benchmark,
        "seeds": list(spec.seeds),
        "config": dict(spec.config),
        "benchmark_params": dict(spec.benchmark_params),
        "bits_per_var": spec.bits_per_var,
    }
    if spec.lower is not None or spec.upper is not None:
        _, domain = spec.problem()
        doc["bounds"] = {"lower": list(domain.lower), "upper": list(domain.upper)}
    if spec.init_seeds is not None:
        doc["init_seeds"] = list(spec.init_seeds)
    if spec.label is not None:
        doc["label"] = spec.label
    if spec.output_dir is not None:
        doc["output_dir"] = spec.output_dir
    return doc


def to_dict(spec: AnySpec) -> dict:
    if isinstance(spec, ExperimentSpec):
        return {"kind": "experiment", **_experiment_dict(spec)}
    if isinstance(spec, SweepSpec):
        doc = {"kind": "sweep", "base": _experiment_dict(spec.base), "parameter": spec.parameter,
               "values": list(spec.values)}
        if spec.seeds is not None:
            doc["seeds"] = list(spec.seeds)
        return doc
    if isinstance(spec, ComparisonSpec):
        doc = {"kind": "compare", "experiments": [_experiment_dict(e) for e in spec.experiments]}
        if spec.threshold is not None:
            doc["threshold"] = spec.threshold
        return doc
    raise TypeError(f"not a config spec: {spec!r}")


def dumps(spec: AnySpec) -> str:
    """Canonical JSON text (sorted keys, two-space indent)."""
    return json.dumps(to_dict(spec), indent=2, sort_keys=True) + "\n"
