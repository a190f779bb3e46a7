"""TOML configuration files.

A file may hold three tables, each optional::

    [codec]        # CodecConfig fields
    eps_grid = [0.2, 0.25, 0.3]
    kernel = 5

    [synth]        # SynthParams fields
    clusters = 10

    [experiment]   # ExperimentSpec fields
    sizes = [1000]
    repetitions = 5
"""

from __future__ import annotations

import dataclasses
import re

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import InvalidArgumentError, ParseError
from .experiment import ExperimentSpec
from .pipeline import CodecConfig
from .synthgen import SynthParams

SECTIONS = {
    "codec": CodecConfig,
    "synth": SynthParams,
    "experiment": ExperimentSpec,
}


@dataclass(frozen=True)
class FileConfig:
    """Validated tables of a configuration file."""

    codec: CodecConfig = field(default_factory=CodecConfig)
    synth: dict[str, Any] = field(default_factory=dict)
    experiment: dict[str, Any] = field(default_factory=dict)


def _check_keys(section: str, values: dict[str, Any]) -> dict[str, Any]:
    allowed = {f.name for f in dataclasses.fields(SECTIONS[section])}
    if section == "experiment":
        allowed.discard("codec")
    unknown = sorted(set(values) - allowed)
    if unknown:
        raise InvalidArgumentError(
            f"unknown key(s) in [{section}]: {', '.join(unknown)}."
        )
    return {key: tuple(v) if isinstance(v, list) else v for key, v in values.items()}


def load_config(path: str | Path) -> FileConfig:
    path = Path(path)
    try:
        with path.open("rb") as handle:
            document = tomllib.load(handle)
    except tomllib.TOMLDecodeError as err:
        match = re.search(r"line (\d+)", str(err))
        raise ParseError(str(err), int(match.group(1)) if match else None, path) from err

    unknown = sorted(set(document) - set(SECTIONS))
    if unknown:
        raise InvalidArgumentError(f"unknown table(s) in {path}: {', '.join(unknown)}.")

    codec = _check_keys("codec", document.get("codec", {}))
    return FileConfig(
        codec=CodecConfig(**codec),
        synth=_check_keys("synth", document.get("synth", {})),
        experiment=_check_keys("experiment", document.get("experiment", {})),
    )


__all__ = ["FileConfig", "load_config"]
