import math
import os
from dataclasses import dataclass, fields, replace

from dotenv import dotenv_values, load_dotenv

from .errors import UsageError

SEED_ENV_VAR = "G2PSTACK_SEED"

LEARNER_KINDS = ("ib1ig", "igtree", "tree_rules", "maxent")


@dataclass(frozen=True)
class Settings:
    """Every tunable of the pipeline. Flags, config files and the environment all land here."""

    seed: int = 7
    jobs: int = 0  # 0 = available parallelism
    folds: int = 10
    inner_folds: int = 5
    null_penalty: float = math.log(0.1)
    em_iters: int = 3
    threshold: int = 15
    k: int = 1
    weighting: str = "gainratio"
    max_iterations: int = 100
    tolerance: float = 1e-4
    with_spelling: bool = False
    resubstitution: bool = False
    component: str = "ib1ig"
    combiner: str = "ib1ig"
    meta_learners: tuple = ("tree_rules", "ib1ig", "igtree", "maxent")

    def effective_jobs(self):
        return self.jobs if self.jobs > 0 else (os.cpu_count() or 1)


_FIELD_TYPES = {f.name: f.type for f in fields(Settings)}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _convert(key, raw):
    kind = _FIELD_TYPES[key]
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        if kind is bool:
            lowered = text.lower()
            if lowered in _TRUE:
                return True
            if lowered in _FALSE:
                return False
            raise ValueError(text)
        if kind is tuple:
            return tuple(part.strip() for part in text.split(",") if part.strip())
    except ValueError:
        raise UsageError(f"invalid value for '{key}': {raw!r}") from None
    return text


def _normalize_key(key):
    return key.strip().lstrip("-").replace("-", "_")


def read_config_file(path):
    """Parse a flat key=value file (same syntax as a .env file)."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"config file not found: {path}")
    values = {}
    for key, raw in dotenv_values(path).items():
        name = _normalize_key(key)
        if name not in _FIELD_TYPES:
            raise UsageError(f"unknown config key '{key}' in {path}")
        if raw is None:
            raise UsageError(f"config key '{key}' in {path} has no value")
        values[name] = _convert(name, raw)
    return values


def load_settings(config_path=None, overrides=None):
    """Resolve settings: overrides > config file > environment > defaults.

    overrides maps field names to values; None values are treated as unset.
    """
    # Load a local .env so G2PSTACK_SEED can live next to the data
    load_dotenv()

    resolved = {}
    env_seed = os.getenv(SEED_ENV_VAR)
    if env_seed:
        resolved["seed"] = _convert("seed", env_seed)

    if config_path:
        resolved.update(read_config_file(config_path))

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        name = _normalize_key(key)
        if name not in _FIELD_TYPES:
            raise UsageError(f"unknown setting '{key}'")
        resolved[name] = _convert(name, value)

    settings = replace(Settings(), **resolved)
    _validate(settings)
    return settings


def _validate(settings):
    if settings.weighting not in ("ig", "gainratio"):
        raise UsageError(f"weighting must be 'ig' or 'gainratio', got '{settings.weighting}'")
    for name in ("component", "combiner"):
        if getattr(settings, name) not in LEARNER_KINDS:
            raise UsageError(f"unknown learner '{getattr(settings, name)}' for {name}")
    for kind in settings.meta_learners:
        if kind not in LEARNER_KINDS:
            raise UsageError(f"unknown meta learner '{kind}'")
    if settings.folds < 2 or settings.inner_folds < 2:
        raise UsageError("folds and inner folds must be at least 2")
    if settings.threshold < 1:
        raise UsageError("threshold must be at least 1")
    if settings.k < 1:
        raise UsageError("k must be at least 1")
