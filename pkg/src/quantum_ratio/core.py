"""Physical constants, the particle catalog and the quantum ratio Q = R_q / L_0.

All quantities are SI internally. The catalog file accepts explicit unit tags
(``amu``, ``MeV``, ``g``, ``A``, ``fm``, ``mm``, ...) which are converted on load.
"""

from __future__ import annotations

import configparser
import enum
import functools
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from scipy import constants as _sc

from .errors import CatalogError, ConfigError, DomainError


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float
    h: float
    electron_mass: float
    amu: float
    bohr_magneton: float
    c: float

    def __post_init__(self):
        for name in ("hbar", "h", "electron_mass", "amu", "bohr_magneton", "c"):
            if not getattr(self, name) > 0:
                raise DomainError(f"constant {name} must be positive")
        if abs(self.h - 2 * math.pi * self.hbar) > 1e-12 * self.h:
            raise DomainError("h and hbar are inconsistent")


CONSTANTS = PhysicalConstants(
    hbar=_sc.hbar,
    h=_sc.h,
    electron_mass=_sc.m_e,
    amu=_sc.atomic_mass,
    bohr_magneton=_sc.physical_constants["Bohr magneton"][0],
    c=_sc.c,
)

HBAR = CONSTANTS.hbar
H_PLANCK = CONSTANTS.h
AMU = CONSTANTS.amu
MU_B = CONSTANTS.bohr_magneton

# mass of 1 MeV/c^2 in kg
MEV_C2 = _sc.mega * _sc.electron_volt / _sc.c**2

MASS_UNITS = {
    "kg": 1.0,
    "g": 1e-3,
    "amu": AMU,
    "u": AMU,
    "au": AMU,
    "ev": MEV_C2 * 1e-6,
    "kev": MEV_C2 * 1e-3,
    "mev": MEV_C2,
    "gev": MEV_C2 * 1e3,
}
LENGTH_UNITS = {
    "m": 1.0,
    "cm": 1e-2,
    "mm": 1e-3,
    "um": 1e-6,
    "µm": 1e-6,
    "nm": 1e-9,
    "a": 1e-10,
    "å": 1e-10,
    "angstrom": 1e-10,
    "fm": 1e-15,
}
MOMENT_UNITS = {"j/t": 1.0, "mu_b": MU_B, "mub": MU_B}
TIME_UNITS = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9}
# tags are case-insensitive, so "mev" stays reserved for MeV/c^2 masses
ENERGY_UNITS = {"j": 1.0, "ev": _sc.electron_volt, "kev": _sc.kilo * _sc.electron_volt}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([^\s]*)\s*$")


def parse_quantity(text: str, units: dict[str, float], default_unit: str | None = None) -> float:
    """Parse ``"1.44 A"`` style strings into SI floats.

    Parameters
    ----------
    text : str
        Number followed by an optional unit tag (case-insensitive).
    units : dict
        Mapping of unit tag to SI scale factor.
    default_unit : str, optional
        Unit used when the tag is omitted. A bare number is rejected if None.
    """
    m = _QUANTITY.match(text)
    if m is None:
        raise ValueError(f"cannot parse quantity {text!r}")
    value = float(m.group(1))
    unit = m.group(2).lower()
    if not unit:
        if default_unit is None:
            raise ValueError(f"quantity {text!r} is missing a unit")
        unit = default_unit
    if unit not in units:
        raise ValueError(f"unknown unit {unit!r} in {text!r}; expected one of {sorted(units)}")
    return value * units[unit]


@dataclass(frozen=True)
class Particle:
    """A physical species; ``size_l0 == 0`` marks an elementary (pointlike) particle.

    ``r_q`` and ``q_reference`` are optional reference values for entries that
    come from a tabulated experiment (quantum fluctuation range and the
    published order of magnitude of Q).
    """

    name: str
    mass: float
    size_l0: float
    magnetic_moment: float | None = None
    spin: float | None = None
    r_q: float | None = None
    q_reference: float | None = None
    note: str = ""

    def __post_init__(self):
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise DomainError(f"{self.name}: mass must be positive, got {self.mass}")
        if not (self.size_l0 >= 0 and math.isfinite(self.size_l0)):
            raise DomainError(f"{self.name}: size_l0 must be >= 0, got {self.size_l0}")
        if self.spin is not None and (self.spin < 0 or abs(2 * self.spin - round(2 * self.spin)) > 1e-12):
            raise DomainError(f"{self.name}: spin must be a non-negative half-integer")
        if self.r_q is not None and not self.r_q > 0:
            raise DomainError(f"{self.name}: r_q must be positive")

    @property
    def elementary(self) -> bool:
        return self.size_l0 == 0


@dataclass(frozen=True)
class QuantumRatio:
    """Q = r_q / l_0 as a tagged extended real: ``infinite`` is set iff l_0 == 0."""

    r_q: float
    l_0: float

    @property
    def infinite(self) -> bool:
        return self.l_0 == 0

    @property
    def q(self) -> float:
        return math.inf if self.infinite else self.r_q / self.l_0

    def log10(self) -> float:
        return math.inf if self.infinite else math.log10(self.r_q) - math.log10(self.l_0)

    def as_dict(self) -> dict:
        return {
            "r_q": self.r_q,
            "l_0": self.l_0,
            "q": None if self.infinite else self.q,
            "q_infinite": self.infinite,
        }


class Regime(str, enum.Enum):
    QUANTUM = "Quantum"
    CLASSICAL = "Classical"
    BORDERLINE = "Borderline"


@dataclass(frozen=True)
class Thresholds:
    hi: float = 10.0
    lo: float = 1.0

    def __post_init__(self):
        if not (self.lo > 0 and self.hi > 0):
            raise ConfigError("thresholds must be positive")
        if self.lo > self.hi:
            raise ConfigError(f"inverted thresholds: lo={self.lo} > hi={self.hi}")


@dataclass(frozen=True)
class Classification:
    regime: Regime
    threshold_hi: float
    threshold_lo: float

    def as_dict(self) -> dict:
        return {"class": self.regime.value, "threshold_hi": self.threshold_hi, "threshold_lo": self.threshold_lo}


def quantum_ratio(r_q: float, l_0: float) -> QuantumRatio:
    if not (r_q > 0 and math.isfinite(r_q)):
        raise DomainError(f"r_q must be positive and finite, got {r_q}")
    if not (l_0 >= 0 and math.isfinite(l_0)):
        raise DomainError(f"l_0 must be non-negative and finite, got {l_0}")
    return QuantumRatio(float(r_q), float(l_0))


def classify(qr: QuantumRatio, thresholds: Thresholds | None = None) -> Classification:
    """Three-way classification; a tie with ``lo == hi`` resolves to Quantum."""
    th = thresholds or Thresholds()
    if qr.infinite or qr.q >= th.hi:
        regime = Regime.QUANTUM
    elif qr.q <= th.lo:
        regime = Regime.CLASSICAL
    else:
        regime = Regime.BORDERLINE
    return Classification(regime, th.hi, th.lo)


def nucleus_size(mass_number: int) -> float:
    """Order-of-magnitude nuclear radius A^(1/3) fm, in metres."""
    if int(mass_number) != mass_number or mass_number < 1:
        raise DomainError(f"mass number must be a positive integer, got {mass_number}")
    return float(mass_number) ** (1.0 / 3.0) * 1e-15


def de_broglie_wavelength(mass: float, speed: float) -> float:
    if not (mass > 0 and speed > 0):
        raise DomainError(f"mass and speed must be positive, got {mass}, {speed}")
    return H_PLANCK / (mass * speed)


# -- catalog -----------------------------------------------------------------

_CATALOG_FIELDS = {"mass", "size_l0", "magnetic_moment", "spin", "r_q", "q_reference", "note"}


def parse_catalog(text: str, source: str = "<string>") -> list[Particle]:
    """Parse catalog text: one ``[name]`` section per particle with ``key = value`` lines."""
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise CatalogError(f"{source}: cannot parse catalog: {exc}") from exc

    particles = []
    for name in parser.sections():
        sec = parser[name]
        unknown = set(sec) - _CATALOG_FIELDS
        if unknown:
            raise CatalogError(f"{source}: entry {name!r} has unknown fields {sorted(unknown)}")
        try:
            if "mass" not in sec or "size_l0" not in sec:
                raise ValueError("mass and size_l0 are required")
            particles.append(
                Particle(
                    name=name,
                    mass=parse_quantity(sec["mass"], MASS_UNITS),
                    size_l0=parse_quantity(sec["size_l0"], LENGTH_UNITS),
                    magnetic_moment=(
                        parse_quantity(sec["magnetic_moment"], MOMENT_UNITS) if "magnetic_moment" in sec else None
                    ),
                    spin=float(sec["spin"]) if "spin" in sec else None,
                    r_q=parse_quantity(sec["r_q"], LENGTH_UNITS) if "r_q" in sec else None,
                    q_reference=float(sec["q_reference"]) if "q_reference" in sec else None,
                    note=sec.get("note", ""),
                )
            )
        except (ValueError, DomainError) as exc:
            raise CatalogError(f"{source}: invalid entry {name!r}: {exc}") from exc
    return particles


def load_catalog(path: str | Path | None = None) -> list[Particle]:
    """Load a particle catalog file; ``None`` loads the bundled default catalog."""
    if path is None:
        text = resources.files("quantum_ratio.data").joinpath("particles.ini").read_text(encoding="utf-8")
        return parse_catalog(text, source="default catalog")
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CatalogError(f"cannot read catalog {path}: {exc}") from exc
    return parse_catalog(text, source=str(path))


@dataclass(frozen=True)
class Catalog:
    particles: tuple[Particle, ...] = field(default_factory=tuple)

    @classmethod
    def load(cls, path: str | Path | None = None) -> "Catalog":
        return cls(tuple(load_catalog(path)))

    def names(self) -> list[str]:
        return [p.name for p in self.particles]

    def __getitem__(self, name: str) -> Particle:
        for p in self.particles:
            if p.name == name:
                return p
        raise KeyError(f"particle {name!r} not in catalog; known: {', '.join(self.names())}")

    def __contains__(self, name: str) -> bool:
        return any(p.name == name for p in self.particles)

    def __iter__(self):
        return iter(self.particles)

    def __len__(self) -> int:
        return len(self.particles)


@functools.cache
def default_catalog() -> Catalog:
    return Catalog.load()
