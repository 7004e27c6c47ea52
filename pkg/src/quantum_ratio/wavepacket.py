"""Gaussian wave-packet dynamics.

The packet is the variational trial state

    psi(z) ~ exp(-(1/(4G) - i*sigma) (z - zbar)^2 + i pbar (z - zbar) / hbar)

with complex width parameter ``G`` and phase parameter ``sigma``. Physical
constants are kept explicit (hbar restored), so the free solution is
``G(t) = G0 + i*hbar*t/m`` and ``sigma(t) = (i/4) / G(t)``. A packet with
position standard deviation ``s`` therefore starts from ``G0 = 2 s**2``.

Branch convention for the Stern-Gerlach equations: ``branch=+1`` is spin up
and feels the force ``+mu * dB_z/dz`` (deflection towards +z for a positive
gradient); ``branch=-1`` is spin down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import HBAR
from .errors import DomainError, IntegrationError, RegimeError

# the (g34)-branch relation sigma = i/(4G) is checked to this relative tolerance
_BRANCH_RTOL = 1e-9


@dataclass(frozen=True)
class GaussianPacket:
    center: float
    mean_momentum: float
    width_g: complex
    phase_sigma: complex
    mass: float

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass}")
        if not self.alpha.real > 0:
            raise DomainError("packet is not normalizable: Re(1/(4G) - i sigma) <= 0")

    @classmethod
    def from_std(cls, center: float, std: float, mass: float, mean_momentum: float = 0.0) -> "GaussianPacket":
        """Packet with position standard deviation ``std`` and no chirp."""
        if not std > 0:
            raise DomainError(f"std must be positive, got {std}")
        g0 = complex(2.0 * std * std)
        return cls(float(center), float(mean_momentum), g0, 0.25j / g0, float(mass))

    @property
    def alpha(self) -> complex:
        """Combined Gaussian exponent 1/(4G) - i*sigma."""
        return 1.0 / (4.0 * self.width_g) - 1j * self.phase_sigma

    @property
    def std(self) -> float:
        """Standard deviation of |psi|^2."""
        return math.sqrt(1.0 / (4.0 * self.alpha.real))

    @property
    def on_free_branch(self) -> bool:
        target = 0.25j / self.width_g
        return abs(self.phase_sigma - target) <= _BRANCH_RTOL * abs(target)

    def density(self, z):
        """Probability density |psi(z)|^2, normalized by construction (only Re(alpha) enters)."""
        z = np.asarray(z, dtype=float)
        s = self.std
        return np.exp(-0.5 * ((z - self.center) / s) ** 2) / (math.sqrt(2 * math.pi) * s)

    def as_row(self, t: float) -> tuple:
        return (t, self.center, self.mean_momentum, self.width_g.real, self.width_g.imag, self.std)


def _require_free_branch(p: GaussianPacket) -> None:
    if not p.on_free_branch:
        raise DomainError(
            "closed-form evolution needs sigma0 = i/(4 G0); build the packet with "
            "GaussianPacket.from_std or integrate it with sg_ode_integrate"
        )


def free_evolve(p: GaussianPacket, t: float) -> GaussianPacket:
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    _require_free_branch(p)
    if t == 0:
        return p
    g = p.width_g + 1j * HBAR * t / p.mass
    return GaussianPacket(p.center + p.mean_momentum * t / p.mass, p.mean_momentum, g, 0.25j / g, p.mass)


def width_at(mass: float, std0: float, t: float) -> float:
    """Standard deviation of a free, initially unchirped packet after time t."""
    return std0 * math.sqrt(1.0 + (HBAR * t / (2.0 * mass * std0 * std0)) ** 2)


def doubling_time(mass: float, initial_size: float) -> float:
    """Time for a free packet to double its size.

    "Size" is two standard deviations, so ``initial_size = 1e-6`` means a
    0.5 um standard deviation. The width obeys
    ``s(t) = s0 sqrt(1 + (hbar t / (2 m s0^2))^2)``, which doubles at
    ``t = 2 sqrt(3) m s0^2 / hbar``.
    """
    if not (mass > 0 and initial_size > 0):
        raise DomainError(f"mass and initial_size must be positive, got {mass}, {initial_size}")
    s0 = 0.5 * initial_size
    return 2.0 * math.sqrt(3.0) * mass * s0 * s0 / HBAR


SIZE_CONVENTION = "size = 2 standard deviations of |psi|^2; doubling solved from s(t) = s0*sqrt(1+(hbar t/(2 m s0^2))^2)"
HBAR_CONVENTION = "hbar restored: G(t) = G0 + i hbar t/m, sigma(t) = (i/4)/G(t), G0 = 2 s0^2"


# -- harmonic coherent states ---------------------------------------------------


@dataclass(frozen=True)
class CoherentState:
    amplitude: float
    phase: float
    omega: float
    mass: float

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError(f"omega must be positive, got {self.omega}")
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass}")

    @property
    def width_d(self) -> float:
        """Position variance hbar / (2 m omega)."""
        return HBAR / (2.0 * self.mass * self.omega)

    @classmethod
    def with_std(cls, amplitude: float, phase: float, std: float, mass: float) -> "CoherentState":
        """Coherent state whose position standard deviation is ``std``."""
        return cls(amplitude, phase, HBAR / (2.0 * mass * std * std), mass)


def coherent_evolve(s: CoherentState, t: float) -> tuple[float, float, float]:
    """Return ``(x0(t), p0(t), D)``; the variance D does not depend on t."""
    arg = s.phase + s.omega * t
    return s.amplitude * math.cos(arg), s.mass * s.omega * s.amplitude * math.sin(arg), s.width_d


def quench(s: CoherentState, t0: float) -> GaussianPacket:
    """Switch the oscillator off at ``t0``; the packet then moves freely.

    The returned packet has position variance D = hbar/(2 m omega), i.e.
    ``G0 = 2 D`` in the trial-state parametrization.
    """
    x0, p0, d = coherent_evolve(s, t0)
    return GaussianPacket.from_std(x0, math.sqrt(d), s.mass, mean_momentum=p0)


# -- Stern-Gerlach field and variational dynamics --------------------------------


@dataclass(frozen=True)
class SGFieldSpec:
    """Field B = (0, -b0 y, B0 + b0 z) of a Stern-Gerlach magnet.

    ``mu`` is the magnetic moment entering V = -/+ mu b0 z; presets state
    whether it is mu_B or mu_B/2. ``transverse_extent`` is the largest |y|
    the beam explores, used for the check |B0| >> |b0 y|.
    """

    b0_gradient: float
    b0_bias: float
    mu: float
    region_length: float
    beam_speed: float
    transverse_extent: float = 3e-5
    validity_factor: float = 10.0

    def __post_init__(self):
        if not (self.region_length > 0 and self.beam_speed > 0):
            raise DomainError("region_length and beam_speed must be positive")
        if not self.mu > 0:
            raise DomainError("mu must be positive")
        if not self.transverse_extent >= 0:
            raise DomainError("transverse_extent must be non-negative")

    @property
    def transit_time(self) -> float:
        return self.region_length / self.beam_speed

    def check_validity(self) -> None:
        lhs = abs(self.b0_bias)
        rhs = self.validity_factor * abs(self.b0_gradient * self.transverse_extent)
        if not lhs >= rhs:
            raise RegimeError(
                f"|B0| >> |b0*y| violated: |B0| = {lhs:.4g} T < {self.validity_factor:g} * "
                f"|b0*y| = {rhs:.4g} T (y = {self.transverse_extent:.3g} m)"
            )

    def profile(self) -> "LinearField":
        return LinearField(self.b0_bias, self.b0_gradient)


@dataclass(frozen=True)
class LinearField:
    """B_z(z) = bias + gradient * z."""

    bias: float
    gradient_value: float

    def __call__(self, z):
        return self.bias + self.gradient_value * z

    def gradient(self, z):
        return self.gradient_value + 0.0 * z


def _check_branch(branch: int) -> int:
    if branch not in (1, -1):
        raise DomainError(f"branch must be +1 (spin up) or -1 (spin down), got {branch}")
    return branch


def sg_closed_form(p: GaussianPacket, branch: int, f: SGFieldSpec, t: float) -> GaussianPacket:
    """Exact variational solution in the linear field at time ``t``."""
    _check_branch(branch)
    _require_free_branch(p)
    force = branch * f.mu * f.b0_gradient
    m = p.mass
    g = p.width_g + 1j * HBAR * t / m
    return GaussianPacket(
        (0.5 * force * t * t + p.mean_momentum * t) / m + p.center,
        force * t + p.mean_momentum,
        g,
        0.25j / g,
        m,
    )


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    center: np.ndarray
    mean_momentum: np.ndarray
    width_g: np.ndarray
    phase_sigma: np.ndarray
    mass: float

    def __len__(self) -> int:
        return len(self.t)

    def packet(self, i: int) -> GaussianPacket:
        return GaussianPacket(
            float(self.center[i]), float(self.mean_momentum[i]), complex(self.width_g[i]), complex(self.phase_sigma[i]), self.mass
        )

    @property
    def std(self) -> np.ndarray:
        alpha = 1.0 / (4.0 * self.width_g) - 1j * self.phase_sigma
        return np.sqrt(1.0 / (4.0 * alpha.real))

    def rows(self):
        std = self.std
        for i in range(len(self.t)):
            yield (self.t[i], self.center[i], self.mean_momentum[i], self.width_g[i].real, self.width_g[i].imag, std[i])


TRAJECTORY_COLUMNS = ("t", "z_mean", "p_mean", "re_G", "im_G", "sigma_width")


def _rhs(z: float, p: float, g: complex, s: complex, force: Callable[[float], float], m: float):
    return p / m, force(z), 4.0 * HBAR / m * s * g, -2.0 * HBAR / m * s * s + HBAR / (8.0 * m) / (g * g)


DEFAULT_STEPS = 10_000


def sg_ode_integrate(
    p: GaussianPacket,
    branch: int,
    mu: float,
    field_profile: Callable,
    t_end: float,
    dt: float | None = None,
    max_steps: int = 10_000_000,
    fd_step: float | None = None,
) -> Trajectory:
    """Fixed-step RK4 integration of the variational equations.

    ``dt`` defaults to ``t_end / 10**4`` and is shrunk slightly so the last
    step lands on ``t_end``. ``field_profile`` is B_z(z); its ``gradient``
    method is used when present, otherwise dB_z/dz is taken by central
    differences with step ``fd_step`` (default: 1e-6 of the packet width).
    The force on the packet centre is ``branch * mu * dB_z/dz(zbar)``.
    """
    _check_branch(branch)
    if t_end < 0:
        raise DomainError(f"t_end must be >= 0, got {t_end}")
    if dt is None:
        dt = t_end / DEFAULT_STEPS if t_end > 0 else 1.0
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    n_steps = int(math.ceil(t_end / dt - 1e-9))
    if n_steps > max_steps:
        raise IntegrationError(f"step count {n_steps} exceeds max_steps={max_steps} at t=0")
    h = t_end / n_steps if n_steps else 0.0

    grad = getattr(field_profile, "gradient", None)
    if grad is None:
        eps = fd_step if fd_step is not None else 1e-6 * p.std

        def grad(z):
            return (field_profile(z + eps) - field_profile(z - eps)) / (2.0 * eps)

    def force(z):
        return branch * mu * float(grad(z))

    m = p.mass
    z, mom, g, s = float(p.center), float(p.mean_momentum), complex(p.width_g), complex(p.phase_sigma)
    out = [(z, mom, g, s)]
    for i in range(n_steps):
        try:
            a1 = _rhs(z, mom, g, s, force, m)
            a2 = _rhs(z + 0.5 * h * a1[0], mom + 0.5 * h * a1[1], g + 0.5 * h * a1[2], s + 0.5 * h * a1[3], force, m)
            a3 = _rhs(z + 0.5 * h * a2[0], mom + 0.5 * h * a2[1], g + 0.5 * h * a2[2], s + 0.5 * h * a2[3], force, m)
            a4 = _rhs(z + h * a3[0], mom + h * a3[1], g + h * a3[2], s + h * a3[3], force, m)
            w = h / 6.0
            z += w * (a1[0] + 2.0 * a2[0] + 2.0 * a3[0] + a4[0])
            mom += w * (a1[1] + 2.0 * a2[1] + 2.0 * a3[1] + a4[1])
            g += w * (a1[2] + 2.0 * a2[2] + 2.0 * a3[2] + a4[2])
            s += w * (a1[3] + 2.0 * a2[3] + 2.0 * a3[3] + a4[3])
        except ArithmeticError as exc:
            raise IntegrationError(f"{exc} at t={i * h:.6g} s") from exc
        t_now = (i + 1) * h
        if not all(map(math.isfinite, (z, mom, g.real, g.imag, s.real, s.imag))):
            raise IntegrationError(f"non-finite state at t={t_now:.6g} s")
        if not (1.0 / (4.0 * g) - 1j * s).real > 0:
            raise IntegrationError(f"packet lost normalizability at t={t_now:.6g} s")
        out.append((z, mom, g, s))
    arr = np.array(out, dtype=complex)
    t = h * np.arange(n_steps + 1)
    return Trajectory(t, arr[:, 0].real.copy(), arr[:, 1].real.copy(), arr[:, 2].copy(), arr[:, 3].copy(), m)


def closed_form_trajectory(p: GaussianPacket, branch: int, f: SGFieldSpec, t: np.ndarray) -> Trajectory:
    t = np.asarray(t, dtype=float)
    packets = [sg_closed_form(p, branch, f, float(ti)) for ti in t]
    return Trajectory(
        t,
        np.array([q.center for q in packets]),
        np.array([q.mean_momentum for q in packets]),
        np.array([q.width_g for q in packets]),
        np.array([q.phase_sigma for q in packets]),
        p.mass,
    )
