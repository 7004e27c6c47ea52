"""Two-branch reduced density matrices under a parametric environment channel,
timescale-hierarchy checks, and pure/mixed comparisons."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.constants import Boltzmann

from .core import AMU, H_PLANCK, QuantumRatio, quantum_ratio
from .errors import DomainError
from .report import _plain
from .sterngerlach import DensityMatrix2, SpinHalfState, band_intensities
from .wavepacket import doubling_time

_TOL = 1e-12


@dataclass(frozen=True)
class BranchDensity:
    w1: float
    w2: float
    off_diagonal: complex = 0.0
    r1: float = 0.0
    r2: float = 0.0
    a: float = 0.0

    def __post_init__(self):
        if self.w1 < 0 or self.w2 < 0 or abs(self.w1 + self.w2 - 1.0) > _TOL:
            raise DomainError(f"weights ({self.w1}, {self.w2}) must be >= 0 and sum to 1")
        bound = math.sqrt(self.w1 * self.w2)
        if abs(self.off_diagonal) > bound * (1 + _TOL) + _TOL:
            raise DomainError(f"|off_diagonal| = {abs(self.off_diagonal):.6g} exceeds sqrt(w1 w2) = {bound:.6g}")
        if self.a < 0:
            raise DomainError("branch width must be >= 0")

    @classmethod
    def pure(cls, c1: complex, c2: complex, r1: float = 0.0, r2: float = 0.0, a: float = 0.0) -> "BranchDensity":
        c1, c2 = complex(c1), complex(c2)
        return cls(abs(c1) ** 2, abs(c2) ** 2, c1 * c2.conjugate(), r1, r2, a)

    @classmethod
    def from_spin(cls, s: SpinHalfState, r1: float = 0.0, r2: float = 0.0, a: float = 0.0) -> "BranchDensity":
        return cls.pure(s.c1, s.c2, r1, r2, a)

    @property
    def separation(self) -> float:
        return abs(self.r1 - self.r2)

    @property
    def coherence(self) -> float:
        """gamma = |off_diagonal| / sqrt(w1 w2); 0 when a branch is empty."""
        denom = math.sqrt(self.w1 * self.w2)
        return 0.0 if denom == 0 else min(abs(self.off_diagonal) / denom, 1.0)

    def matrix(self) -> np.ndarray:
        off = complex(self.off_diagonal)
        return np.array([[self.w1, off], [off.conjugate(), self.w2]], dtype=complex)

    def to_density_matrix(self) -> DensityMatrix2:
        return DensityMatrix2.from_array(self.matrix())


@dataclass(frozen=True)
class EnvironmentSpec:
    rate_lambda: float
    env_wavelength: float
    label: str = ""

    def __post_init__(self):
        if not (self.rate_lambda > 0 and self.env_wavelength > 0):
            raise DomainError("rate_lambda and env_wavelength must be positive")


DecayLaw = Callable[[EnvironmentSpec, float], float]


def collisional_rate(env: EnvironmentSpec, separation: float) -> float:
    """Lambda * min(1, (dr/lambda)^2): quadratic below the environment wavelength, saturated above."""
    return env.rate_lambda * min(1.0, (separation / env.env_wavelength) ** 2)


def saturated_rate(env: EnvironmentSpec, separation: float) -> float:
    """Step law: full rate once the branches are resolvable at all."""
    return env.rate_lambda if separation > 0 else 0.0


def decohere(rho: BranchDensity, env: EnvironmentSpec, t: float, law: DecayLaw = collisional_rate) -> BranchDensity:
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if t == 0:
        return rho
    rate = law(env, rho.separation)
    return replace(rho, off_diagonal=complex(rho.off_diagonal) * math.exp(-rate * t))


def purity(rho: BranchDensity) -> float:
    return rho.w1**2 + rho.w2**2 + 2.0 * abs(rho.off_diagonal) ** 2


def sg_mixed_prediction(rho: BranchDensity | SpinHalfState | DensityMatrix2) -> tuple[float, float]:
    """Stern-Gerlach band intensities; independent of the off-diagonal element."""
    if isinstance(rho, SpinHalfState):
        rho = rho.density_matrix()
    elif isinstance(rho, BranchDensity):
        rho = rho.to_density_matrix()
    return band_intensities(rho)


def two_path_intensity(gamma: float, phase) -> np.ndarray:
    """Balanced two-path recombination: I = 1 + gamma cos(phase)."""
    return 1.0 + gamma * np.cos(np.asarray(phase, dtype=float))


def two_path_visibility(rho: BranchDensity) -> float:
    i_max = float(two_path_intensity(rho.coherence, 0.0))
    i_min = float(two_path_intensity(rho.coherence, math.pi))
    return (i_max - i_min) / (i_max + i_min)


# -- timescale hierarchy ------------------------------------------------------------------


@dataclass(frozen=True)
class TimescaleSet:
    tau_dec: float
    tau_trans: float
    tau_diff: float
    tau_diss: float
    derived: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("tau_dec", "tau_trans", "tau_diff", "tau_diss"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")


def sg_timescales(
    env: EnvironmentSpec, mass: float, packet_std: float, transit_time: float, tau_diss: float
) -> TimescaleSet:
    """tau_diff is the free doubling time of a packet of size 2*packet_std (marked as derived)."""
    return TimescaleSet(
        tau_dec=1.0 / env.rate_lambda,
        tau_trans=transit_time,
        tau_diff=doubling_time(mass, 2.0 * packet_std),
        tau_diss=tau_diss,
        derived=("tau_diff",),
    )


@dataclass(frozen=True)
class RegimeCheck:
    label: str
    lhs_name: str
    lhs: float
    rhs_name: str
    rhs: float
    margin: float
    passed: bool
    note: str = ""


@dataclass(frozen=True)
class RegimeReport:
    strictness: float
    checks: tuple[RegimeCheck, ...]
    derived: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[RegimeCheck]:
        return [c for c in self.checks if not c.passed]

    def as_dict(self) -> dict:
        return {
            "strictness": self.strictness,
            "ok": self.ok,
            "derived": list(self.derived),
            "checks": [
                {
                    "label": c.label,
                    "inequality": f"{c.lhs_name} * strictness <= {c.rhs_name}",
                    "lhs": c.lhs,
                    "rhs": c.rhs,
                    "margin": c.margin,
                    "pass": c.passed,
                    "note": c.note,
                }
                for c in self.checks
            ],
        }

    def to_json(self) -> str:
        return json.dumps(_plain(self.as_dict()), sort_keys=True, indent=2) + "\n"


def _check(label, lhs_name, lhs, rhs_name, rhs, strictness, fail_note=""):
    margin = rhs / (lhs * strictness)
    # relative slack so an inequality met with equality passes despite rounding
    passed = margin >= 1.0 - 1e-12
    return RegimeCheck(label, lhs_name, lhs, rhs_name, rhs, margin, passed, "" if passed else fail_note)


def validate_regime(
    ts: TimescaleSet, a: float, lambda_env: float, separation: float, strictness: float = 10.0
) -> RegimeReport:
    """Evaluate every ">>" of the hierarchy as ``small * strictness <= large``; margin = large/(small*strictness)."""
    if not strictness > 1:
        raise DomainError(f"strictness must exceed 1, got {strictness}")
    if not (a > 0 and lambda_env > 0 and separation > 0):
        raise DomainError("a, lambda_env and separation must be positive")
    checks = (
        _check("cond1", "tau_dec", ts.tau_dec, "tau_trans", ts.tau_trans, strictness,
               "environment too slow to decohere during transit"),
        _check("cond1", "tau_trans", ts.tau_trans, "tau_diff", ts.tau_diff, strictness,
               "packet spreads appreciably during transit"),
        _check("cond1", "tau_trans", ts.tau_trans, "tau_diss", ts.tau_diss, strictness,
               "dissipation faster than transit: totally random motion"),
        _check("cond2", "a", a, "lambda_env", lambda_env, strictness,
               "environment resolves the internal width of each branch"),
        _check("cond3", "lambda_env", lambda_env, "separation", separation, strictness,
               "environment cannot resolve the two branches"),
    )
    return RegimeReport(strictness, checks, ts.derived)


# -- presets --------------------------------------------------------------------------------


def thermal_wavelength(mass: float, temperature: float) -> float:
    """Thermal de Broglie wavelength h / sqrt(2 pi m k T)."""
    return H_PLANCK / math.sqrt(2.0 * math.pi * mass * Boltzmann * temperature)


_N2_MASS = 2 * 14.0067 * AMU

AIR_ELECTRON = EnvironmentSpec(
    rate_lambda=1e13,
    env_wavelength=thermal_wavelength(_N2_MASS, 300.0),
    label="300K air, 1 atm, electron",
)

# Thermal self-decoherence of hot C70 shrinks the interferometric R_q to the grating period;
# only the order of magnitude is meaningful.
HOT_C70_RQ_TOLERANCE_DECADES = 1.0


def hot_c70_quantum_ratio(grating_period: float = 1e-6, size_l0: float = 9.4e-10) -> QuantumRatio:
    return quantum_ratio(grating_period, size_l0)


PRESETS = {"air-electron": AIR_ELECTRON}
