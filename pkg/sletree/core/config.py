"""Run configuration: seeds, YAML run files and chunked Monte Carlo execution.

Run files are YAML mappings from command name to option values, e.g.::

    cle-radius-hist:
      kappa: 4
      n: 10000

They prefill command options (explicit flags still win). Parsing rejects
duplicate keys and non-mapping payloads.
"""

import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, TypeVar, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field

from sletree.core.validation import validate_seed

SEED_ENV = "CLE_SEED"
DEFAULT_SEED = 0

T = TypeVar("T")


class ConfigError(ValueError):
    """Raised when a run file or the seed environment variable is malformed."""


class RunConfig(BaseModel):
    """A resolved command invocation, as recorded in the run log."""

    model_config = ConfigDict(frozen=True)

    command: str
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64)
    out: Optional[Path] = None
    jobs: int = Field(default=1, ge=1)
    params: Dict[str, Any] = Field(default_factory=dict)


def resolve_seed(
    explicit: Optional[int] = None, environ: Optional[Mapping[str, str]] = None
) -> int:
    """Explicit seed, else ``CLE_SEED`` from the environment, else 0.

    Raises:
        ConfigError: ``CLE_SEED`` is set but not an integer in ``[0, 2**64)``
    """
    if explicit is not None:
        return int(explicit)
    env = os.environ if environ is None else environ
    raw = env.get(SEED_ENV, "").strip()
    if not raw:
        return DEFAULT_SEED
    ok, msg = validate_seed(raw)
    if not ok:
        raise ConfigError(f"{SEED_ENV}: {msg}")
    return int(raw)


def spawn_seeds(master: int, k: int) -> List[np.random.Generator]:
    """``k`` independent generators derived from ``master`` by ``SeedSequence.spawn``."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(master).spawn(k)]


def run_chunks(worker: Callable[[Any], T], tasks: Sequence[Any], jobs: int = 1) -> List[T]:
    """``worker`` over ``tasks`` in order, in a process pool when ``jobs > 1``."""
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    if jobs == 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, tasks))


class _StrictLoader(yaml.SafeLoader):
    """SafeLoader that rejects duplicate mapping keys."""


def _construct_mapping_no_duplicates(
    loader: "_StrictLoader", node: yaml.MappingNode, deep: bool = False
) -> Dict[Any, Any]:
    seen = set()
    for key_node, _value_node in node.value:
        key = loader.construct_object(key_node, deep=True)
        if key in seen:
            raise ConfigError(f"Duplicate key in run file: {key!r}")
        seen.add(key)
    return yaml.SafeLoader.construct_mapping(loader, node, deep=deep)


_StrictLoader.add_constructor(
    yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping_no_duplicates
)


def parse_run_file(text: str) -> Dict[str, Dict[str, Any]]:
    """Parse run-file YAML into a click ``default_map``.

    Option names may use dashes or underscores.

    Raises:
        ConfigError: invalid YAML, duplicate keys or a non-mapping payload
    """
    try:
        data = yaml.load(text, Loader=_StrictLoader)
    except yaml.YAMLError as exc:
        raise ConfigError(f"Invalid run file: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("Run file must be a mapping of command names to options")
    out: Dict[str, Dict[str, Any]] = {}
    for command, options in data.items():
        if options is None:
            options = {}
        if not isinstance(options, dict):
            raise ConfigError(f"Options for '{command}' must be a mapping")
        out[str(command)] = {str(k).replace("-", "_"): v for k, v in options.items()}
    return out


def load_run_file(path: Union[str, Path]) -> Dict[str, Dict[str, Any]]:
    return parse_run_file(Path(path).read_text(encoding="utf-8"))


__all__ = [
    "SEED_ENV",
    "DEFAULT_SEED",
    "ConfigError",
    "RunConfig",
    "resolve_seed",
    "spawn_seeds",
    "run_chunks",
    "parse_run_file",
    "load_run_file",
]
