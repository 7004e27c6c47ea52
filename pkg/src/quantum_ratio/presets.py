"""Named scenario presets and the published reference numbers they are compared with."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import MU_B, Particle, de_broglie_wavelength, default_catalog
from .interferometry import GeometrySpec, GratingSpec, resonant_l2
from .sterngerlach import SpinHalfState
from .wavepacket import GaussianPacket, SGFieldSpec

# Doubling times (s) for a 1 um initial size.
DOUBLING_TIME_REFERENCE = {"electron": 1e-8, "hydrogen": 1.6e-5, "C70": 8e-3, "stone1g": 1e19}
REFERENCE_SIZE = 1e-6

# Catalog rows carrying (r_q, q_reference).
QUANTUM_RATIO_ROWS = ("Ag", "Na", "C70", "C70_hot")


@dataclass(frozen=True)
class SGPreset:
    name: str
    particle: Particle
    field: SGFieldSpec
    packet: GaussianPacket
    spin: SpinHalfState
    target_separation: float
    derivation: str


def back_solve_gradient(separation: float, mass: float, mu: float, transit_time: float) -> float:
    """b0 such that the two branches end ``separation`` apart: separation = mu b0 t^2 / m."""
    return separation * mass / (mu * transit_time**2)


def ag_stern_gerlach(
    separation: float = 2e-4,
    region_length: float = 0.035,
    beam_speed: float = 550.0,
    b0_bias: float = 0.1,
    transverse_extent: float = 5e-6,
    packet_std: float = 1e-5,
) -> SGPreset:
    ag = default_catalog()["Ag"]
    t = region_length / beam_speed
    mu = MU_B
    b0 = back_solve_gradient(separation, ag.mass, mu, t)
    field = SGFieldSpec(b0, b0_bias, mu, region_length, beam_speed, transverse_extent)
    packet = GaussianPacket.from_std(0.0, packet_std, ag.mass)
    derivation = (
        f"mu = mu_B; t = L/v = {region_length:g} m / {beam_speed:g} m/s = {t:.6g} s; "
        f"b0 = separation*m/(mu*t^2) = {b0:.6g} T/m for a {separation:g} m branch separation; "
        f"B0 = {b0_bias:g} T with |y| <= {transverse_extent:g} m gives |B0|/|b0 y| = "
        f"{b0_bias / (b0 * transverse_extent):.3g}"
    )
    return SGPreset("Ag", ag, field, packet, SpinHalfState(math.pi / 2), separation, derivation)


@dataclass(frozen=True)
class TalbotPreset:
    name: str
    particle: Particle
    speed: float
    grating: GratingSpec
    l1: float

    @property
    def wavelength(self) -> float:
        return de_broglie_wavelength(self.particle.mass, self.speed)

    def geometry(self, order: float = 2.0) -> GeometrySpec:
        return GeometrySpec(self.l1, resonant_l2(self.l1, self.grating.period, self.wavelength, order), self.wavelength)


def c70_talbot(speed: float = 100.0, period: float = 1e-6, n_slits: int = 100, l1: float = 1.0) -> TalbotPreset:
    c70 = default_catalog()["C70"]
    return TalbotPreset("C70", c70, speed, GratingSpec(period, 0.5, n_slits), l1)


SG_PRESETS = {"Ag": ag_stern_gerlach}
TALBOT_PRESETS = {"C70": c70_talbot}
