"""Scenario configuration files.

Grammar (INI, ``#`` or ``;`` comments)::

    [scenario]
    command = tunnel
    particle = electron
    seed = 12345
    format = csv
    threads = 1
    out = tunnel.csv

    [params]
    barrier = rect:V0=2E,w=0.5nm
    energy = 1eV

Every key in ``[params]`` has the same name as the long command-line flag with
dashes replaced by underscores; flags given on the command line win.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, replace
from pathlib import Path

from .core import default_catalog
from .errors import ConfigError

DEFAULT_SEED = 12345
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class ScenarioConfig:
    command: str
    particle: str | None = None
    params: dict[str, str] = field(default_factory=dict)
    out: str | None = None
    seed: int = DEFAULT_SEED
    format: str = "csv"
    threads: int = 1

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if self.particle is not None and self.particle not in default_catalog():
            raise ConfigError(f"unknown particle {self.particle!r}; known: {', '.join(default_catalog().names())}")

    def to_ini(self) -> str:
        cp = _parser()
        cp["scenario"] = {"command": self.command, "seed": str(self.seed), "format": self.format, "threads": str(self.threads)}
        if self.particle is not None:
            cp["scenario"]["particle"] = self.particle
        if self.out is not None:
            cp["scenario"]["out"] = self.out
        cp["params"] = dict(sorted(self.params.items()))
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str, source: str = "<string>") -> "ScenarioConfig":
        cp = _parser()
        try:
            cp.read_string(text, source=source)
        except configparser.Error as exc:
            raise ConfigError(f"{source}: {exc}") from exc
        if "scenario" not in cp:
            raise ConfigError(f"{source}: missing [scenario] section")
        unknown = set(cp.sections()) - {"scenario", "params"}
        if unknown:
            raise ConfigError(f"{source}: unknown section(s) {sorted(unknown)}")
        sc = cp["scenario"]
        extra = set(sc) - {"command", "particle", "seed", "format", "threads", "out"}
        if extra:
            raise ConfigError(f"{source}: unknown [scenario] key(s) {sorted(extra)}")
        if "command" not in sc:
            raise ConfigError(f"{source}: [scenario] needs a command")
        try:
            seed = int(sc.get("seed", str(DEFAULT_SEED)))
            threads = int(sc.get("threads", "1"))
        except ValueError as exc:
            raise ConfigError(f"{source}: {exc}") from exc
        return cls(
            command=sc["command"],
            particle=sc.get("particle"),
            params=dict(cp["params"]) if "params" in cp else {},
            out=sc.get("out"),
            seed=seed,
            format=sc.get("format", "csv"),
            threads=threads,
        )

    @classmethod
    def load(cls, path: str | Path) -> "ScenarioConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_ini(text, str(path))

    def merged(self, **overrides) -> "ScenarioConfig":
        """Copy with non-None top-level overrides; ``params`` entries are merged key by key."""
        params = dict(self.params)
        params.update({k: v for k, v in (overrides.pop("params", None) or {}).items() if v is not None})
        kept = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, params=params, **kept)


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    cp.optionxform = str  # keep key case
    return cp
