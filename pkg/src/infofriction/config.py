"""Experiment configuration files.

Configs are INI files: an ``[experiment]`` section with run-wide keys (``seed``,
``output`` ...) plus subcommand sections. Grid-valued keys accept a comma list or
``logspace(start, stop, num[, base])``. Relative paths resolve against the config
file's directory, so a config plus the code version fully determines a run.
"""
from __future__ import annotations

import configparser
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class ConfigError(ValueError):
    pass


_LOGSPACE = re.compile(r"^logspace\(([^)]*)\)$")


def parse_grid(text: str, kind=float) -> list:
    text = text.strip()
    m = _LOGSPACE.match(text)
    if m:
        args = [float(a) for a in m.group(1).split(",")]
        if len(args) not in (3, 4):
            raise ConfigError(f"logspace needs (start, stop, num[, base]): {text!r}")
        base = args[3] if len(args) == 4 else 10.0
        vals = np.logspace(args[0], args[1], int(args[2]), base=base)
        return [kind(v) for v in vals]
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise ConfigError("empty grid")
    out = []
    for t in items:
        try:
            out.append(kind(float(t)) if kind is int else kind(t))
        except ValueError:
            raise ConfigError(f"bad grid value {t!r}") from None
    return out


@dataclass
class Section:
    name: str
    values: dict[str, str]
    base_dir: Path

    def has(self, key: str) -> bool:
        return key in self.values

    def get(self, key: str, default=None, kind=str):
        if key not in self.values:
            if default is None:
                raise ConfigError(f"[{self.name}] missing required key {key!r}")
            return default
        raw = self.values[key]
        try:
            if kind is bool:
                return raw.strip().lower() in ("1", "true", "yes", "on")
            if kind is int:
                return int(float(raw))
            return kind(raw.strip())
        except ValueError:
            raise ConfigError(f"[{self.name}] bad value for {key!r}: {raw!r}") from None

    def grid(self, key: str, default: str | None = None, kind=float) -> list:
        if key not in self.values:
            if default is None:
                raise ConfigError(f"[{self.name}] missing required grid {key!r}")
            return parse_grid(default, kind)
        try:
            return parse_grid(self.values[key], kind)
        except (ConfigError, ValueError) as exc:
            raise ConfigError(f"[{self.name}] {key}: {exc}") from None

    def path(self, key: str, required: bool = True) -> Path | None:
        if key not in self.values:
            if required:
                raise ConfigError(f"[{self.name}] missing required path {key!r}")
            return None
        p = Path(self.values[key].strip())
        return p if p.is_absolute() else Path(os.path.normpath(self.base_dir / p))

    def list(self, key: str, default: str = "") -> list[str]:
        raw = self.values.get(key, default)
        return [t.strip() for t in raw.split(",") if t.strip()]


@dataclass
class ExperimentConfig:
    path: Path
    sections: dict[str, Section] = field(default_factory=dict)

    @property
    def experiment(self) -> Section:
        return self.section("experiment")

    @property
    def seed(self) -> int:
        return self.experiment.get("seed", kind=int)

    def section(self, name: str) -> Section:
        if name not in self.sections:
            raise ConfigError(f"{self.path}: missing section [{name}]")
        return self.sections[name]

    def sections_with_prefix(self, prefix: str) -> list[Section]:
        return [s for n, s in self.sections.items() if n.startswith(prefix)]


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    base = path.parent
    cfg = ExperimentConfig(path, {n: Section(n, dict(parser[n]), base) for n in parser.sections()})
    if "experiment" in cfg.sections:
        cfg.seed  # noqa: B018 -- required key, validated eagerly
    else:
        raise ConfigError(f"{path}: missing section [experiment]")
    return cfg


def load_coder_description(path: str | Path) -> Section:
    """A standalone coder file: one ``[coder]`` section."""
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except FileNotFoundError:
        raise ConfigError(f"coder file not found: {path}") from None
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if "coder" not in parser:
        raise ConfigError(f"{path}: missing [coder] section")
    return Section(f"coder.{path.stem}", dict(parser["coder"]), path.parent)
