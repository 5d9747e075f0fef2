"""Run configuration files.

The format is line oriented: ``key = value``, with ``#`` starting a
comment. Lists are comma separated. Keys that are not run settings must
be parameters of the selected model; anything else is an error.

Example::

    model = colliding
    N = 10
    k = 0.5
    n0 = 50
    seed = 1
    max_reactions = 5000
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import ConfigError
from .rulesets import MODELS, ModelRuleSet


def _int_list(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _str_list(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def _initial(text):
    out = []
    for item in text.split(","):
        if not item.strip():
            continue
        specie, sep, count = item.partition(":")
        if not sep:
            raise ValueError(f"expected specie:count, got {item.strip()!r}")
        out.append((specie.strip(), int(count)))
    return out


# run setting -> parser
_SETTINGS = {
    "model": str,
    "seed": int,
    "max_reactions": int,
    "max_sim_time": float,
    "sample_interval": float,
    "output": str,
    "metadata": str,
    "initial": _initial,
    # bench
    "sizes": _int_list,
    "engines": _str_list,
    "replicates": int,
    "timeout": float,
    # validate
    "dm_seed": int,
    "threshold": float,
    "draws": int,
    "sampling_threshold": float,
    "max_universe": int,
}


@dataclass
class RunConfig:
    model: str
    params: Dict[str, str] = field(default_factory=dict)
    seed: int = 0
    max_reactions: Optional[int] = None
    max_sim_time: Optional[float] = None
    sample_interval: Optional[float] = None
    output: Optional[str] = None
    metadata: Optional[str] = None
    initial: Optional[List[Tuple[str, int]]] = None
    sizes: List[int] = field(default_factory=list)
    engines: List[str] = field(default_factory=lambda: ["epdm"])
    replicates: int = 10
    timeout: Optional[float] = None
    dm_seed: Optional[int] = None
    threshold: float = 0.01
    draws: int = 100_000
    sampling_threshold: float = 0.001
    max_universe: int = 1000

    def rules(self, **overrides) -> ModelRuleSet:
        params = dict(self.params)
        params.update({k: str(v) for k, v in overrides.items()})
        try:
            return MODELS[self.model].from_params(params)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def initial_state(self, rules) -> List[Tuple[str, int]]:
        return list(self.initial) if self.initial is not None else rules.initial_state()


def parse_config(text: str) -> RunConfig:
    raw: Dict[str, Tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        raw[key] = (value, lineno)

    if "max_reactions" not in raw and "max_sim_time" not in raw:
        raise ConfigError("no stop condition: set max_reactions and/or max_sim_time")
    if "model" not in raw:
        raise ConfigError("missing required key 'model'")
    model = raw["model"][0]
    if model not in MODELS:
        raise ConfigError(f"unknown model {model!r}; choose from {sorted(MODELS)}", raw["model"][1])
    model_keys = MODELS[model].param_types

    settings = {}
    params = {}
    for key, (value, lineno) in raw.items():
        if key in _SETTINGS:
            try:
                settings[key] = _SETTINGS[key](value)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {exc}", lineno) from None
        elif key in model_keys:
            params[key] = value
        else:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in ("max_reactions", "replicates", "draws", "max_universe") and settings[key] < 0:
            raise ConfigError(f"{key} must be nonnegative", lineno)
        if key in ("max_sim_time", "sample_interval", "timeout") and not settings[key] > 0:
            raise ConfigError(f"{key} must be positive", lineno)
        if key == "sizes" and any(n < 1 for n in settings[key]):
            raise ConfigError("sizes must be positive", lineno)
        if key == "engines" and set(settings[key]) - {"epdm", "dm"}:
            raise ConfigError("engines must be drawn from epdm, dm", lineno)

    cfg = RunConfig(params=params, **settings)
    # surface missing or malformed model parameters now; a sweep supplies N
    probe = {"N": cfg.sizes[0]} if cfg.sizes and "N" not in params else {}
    cfg.rules(**probe)
    return cfg


def load_config(path: str) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read())
