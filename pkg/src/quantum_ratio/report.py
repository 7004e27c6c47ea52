"""Experiment reports and deterministic CSV/JSON emission with provenance headers."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__

CONVENTIONS = {
    "size": "size = 2 standard deviations of |psi|^2",
    "hbar": "hbar restored in the variational equations: G(t) = G0 + i hbar t/m",
    "mu": "mu is an explicit input; presets state whether it is mu_B or mu_B/2",
    "branch": "branch +1 = spin up = force +mu*dB_z/dz",
}


def _plain(obj):
    """Convert numpy scalars/arrays and infinities to JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": _plain(obj.real), "im": _plain(obj.imag)}
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if hasattr(obj, "value") and hasattr(obj, "name") and not isinstance(obj, (str, bytes)):
        return obj.value
    return obj


def canonical_json(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"))


def config_hash(config) -> str:
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()[:16]


def provenance(config, conventions: dict | None = None) -> dict:
    return {
        "tool": "quantum_ratio",
        "version": __version__,
        "config_hash": config_hash(config),
        "conventions": dict(conventions or CONVENTIONS),
    }


@dataclass
class ExperimentReport:
    """Computed observables of one scenario together with its echoed inputs."""

    scenario: str
    inputs: dict
    observables: dict = field(default_factory=dict)
    conventions: dict = field(default_factory=lambda: dict(CONVENTIONS))

    def __getitem__(self, key):
        return self.observables[key]

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "inputs": _plain(self.inputs),
            "observables": _plain(self.observables),
            "provenance": provenance(self.inputs, self.conventions),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def csv_text(columns: Sequence[str], rows: Iterable[Sequence], config=None, conventions: dict | None = None) -> str:
    """RFC-style CSV with ``#``-prefixed provenance lines before the header."""
    buf = io.StringIO()
    prov = provenance(config if config is not None else {}, conventions)
    buf.write(f"# tool: {prov['tool']} {prov['version']}\n")
    buf.write(f"# config_hash: {prov['config_hash']}\n")
    for k, v in sorted(prov["conventions"].items()):
        buf.write(f"# convention {k}: {v}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return v


def read_csv(path_or_text: str | Path) -> tuple[list[str], list[list[str]], list[str]]:
    """Return ``(header, rows, comment_lines)`` of a CSV written by :func:`csv_text`."""
    text = Path(path_or_text).read_text() if isinstance(path_or_text, Path) else path_or_text
    comments = [ln for ln in text.splitlines() if ln.startswith("#")]
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = list(csv.reader(body))
    return reader[0], reader[1:], comments


def write_text(path: str | Path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")
