"""Stern-Gerlach experiment: spin-1/2 predictions, screen images, classical
ensembles and the large-spin concentration of the S_z distribution."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import erf

from .core import Thresholds, classify, quantum_ratio
from .errors import DomainError
from .report import ExperimentReport
from .wavepacket import GaussianPacket, SGFieldSpec, sg_closed_form

# -- spin states ----------------------------------------------------------------


@dataclass(frozen=True)
class SpinHalfState:
    """Spin-1/2 state pointing along (theta, phi)."""

    theta: float
    phi: float = 0.0

    @property
    def c1(self) -> complex:
        return complex(np.exp(-0.5j * self.phi) * math.cos(0.5 * self.theta))

    @property
    def c2(self) -> complex:
        return complex(np.exp(0.5j * self.phi) * math.sin(0.5 * self.theta))

    def density_matrix(self) -> "DensityMatrix2":
        c1, c2 = self.c1, self.c2
        return DensityMatrix2(abs(c1) ** 2, c1 * c2.conjugate(), c2 * c1.conjugate(), abs(c2) ** 2)


@dataclass(frozen=True)
class DensityMatrix2:
    r11: complex
    r12: complex
    r21: complex
    r22: complex
    atol: float = field(default=1e-12, repr=False, compare=False)

    def __post_init__(self):
        tol = self.atol
        if abs(self.r12 - complex(self.r21).conjugate()) > tol:
            raise DomainError("density matrix is not Hermitian")
        if abs(complex(self.r11).imag) > tol or abs(complex(self.r22).imag) > tol:
            raise DomainError("density matrix has complex diagonal entries")
        d1, d2 = complex(self.r11).real, complex(self.r22).real
        if d1 < -tol or d2 < -tol:
            raise DomainError("density matrix has negative diagonal entries")
        if abs(d1 + d2 - 1.0) > tol:
            raise DomainError(f"density matrix trace is {d1 + d2}, not 1")
        if d1 * d2 - abs(self.r12) ** 2 < -tol:
            raise DomainError("density matrix is not positive semidefinite")

    @classmethod
    def from_array(cls, rho) -> "DensityMatrix2":
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (2, 2):
            raise DomainError(f"expected a 2x2 matrix, got shape {rho.shape}")
        return cls(rho[0, 0], rho[0, 1], rho[1, 0], rho[1, 1])

    @classmethod
    def unpolarized(cls) -> "DensityMatrix2":
        return cls(0.5, 0.0, 0.0, 0.5)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.r11, self.r12], [self.r21, self.r22]], dtype=complex)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def band_intensities(rho: DensityMatrix2) -> tuple[float, float]:
    """Relative intensities (rho_11, rho_22) of the upper and lower bands."""
    if not isinstance(rho, DensityMatrix2):
        rho = DensityMatrix2.from_array(rho)
    return complex(rho.r11).real, complex(rho.r22).real


# -- screen images --------------------------------------------------------------


@dataclass(frozen=True)
class ScreenImage:
    bin_edges: np.ndarray
    weights: np.ndarray
    band_centers: tuple[float, ...]
    band_widths: tuple[float, ...]
    band_weights: tuple[float, ...] = ()

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    def rows(self):
        return zip(self.bin_centers.tolist(), self.weights.tolist())


def find_bands(edges: np.ndarray, weights: np.ndarray, rel_threshold: float = 1e-3):
    """Group contiguous bins above ``rel_threshold * max`` into bands."""
    centers = 0.5 * (edges[1:] + edges[:-1])
    on = weights > rel_threshold * weights.max()
    bands = []
    i = 0
    n = len(weights)
    while i < n:
        if on[i]:
            j = i
            while j + 1 < n and on[j + 1]:
                j += 1
            w = weights[i : j + 1]
            x = centers[i : j + 1]
            tot = w.sum()
            mean = float(np.dot(w, x) / tot)
            std = float(math.sqrt(max(np.dot(w, (x - mean) ** 2) / tot, 0.0)))
            bands.append((mean, std, float(tot)))
            i = j + 1
        else:
            i += 1
    return tuple(b[0] for b in bands), tuple(b[1] for b in bands), tuple(b[2] for b in bands)


def _image(edges, weights, rel_threshold=1e-3) -> ScreenImage:
    weights = np.asarray(weights, dtype=float)
    weights = weights / weights.sum()
    c, w, tw = find_bands(edges, weights, rel_threshold)
    return ScreenImage(np.asarray(edges, dtype=float), weights, c, w, tw)


def max_deflection(f: SGFieldSpec, mass: float) -> float:
    """|z| displacement of a fully aligned moment over one transit."""
    t = f.transit_time
    return 0.5 * f.mu * abs(f.b0_gradient) * t * t / mass


def _edges(center: float, half_span: float, n_bins: int) -> np.ndarray:
    return np.linspace(center - half_span, center + half_span, n_bins + 1)


def quantum_screen_image(
    f: SGFieldSpec, packet: GaussianPacket, weights: tuple[float, float], n_bins: int = 512, span_factor: float = 1.2
) -> ScreenImage:
    """Screen image of the two branches after one transit (bin-integrated Gaussians)."""
    t = f.transit_time
    up = sg_closed_form(packet, +1, f, t)
    down = sg_closed_form(packet, -1, f, t)
    mid = packet.center + packet.mean_momentum * t / packet.mass
    extreme = max(abs(up.center - mid), abs(down.center - mid)) + 5.0 * max(up.std, down.std)
    edges = _edges(mid, span_factor * extreme, n_bins)
    w = np.zeros(n_bins)
    for branch, weight in ((up, weights[0]), (down, weights[1])):
        cdf = 0.5 * (1.0 + erf((edges - branch.center) / (math.sqrt(2.0) * branch.std)))
        w += weight * np.diff(cdf)
    return _image(edges, w)


def isotropic_orientations(rng: np.random.Generator, n: int):
    """Uniform directions on the sphere: cos(theta) ~ U[-1, 1], phi ~ U[0, 2 pi)."""
    cos_t = rng.uniform(-1.0, 1.0, n)
    phi = rng.uniform(0.0, 2.0 * math.pi, n)
    return np.arccos(cos_t), phi


def fixed_orientation(theta: float, phi: float = 0.0) -> Callable:
    def sampler(rng: np.random.Generator, n: int):
        return np.full(n, float(theta)), np.full(n, float(phi))

    return sampler


def classical_arrival(f: SGFieldSpec, packet: GaussianPacket, theta):
    """Newtonian arrival position with the precession-averaged force mu cos(theta) b0."""
    t = f.transit_time
    m = packet.mass
    force = f.mu * np.cos(theta) * f.b0_gradient
    return packet.center + packet.mean_momentum * t / m + 0.5 * force * t * t / m


def classical_sg_ensemble(
    f: SGFieldSpec,
    packet: GaussianPacket,
    orientations: Callable = isotropic_orientations,
    n_samples: int = 100_000,
    seed: int = 12345,
    n_bins: int = 512,
    span_factor: float = 1.2,
    fallback_half_span: float = 1e-6,
) -> ScreenImage:
    """Histogram of classical arrivals for magnetic moments drawn from ``orientations``.

    Bins span ``span_factor`` times the largest possible deflection around the
    undeflected arrival point (``fallback_half_span`` when the gradient is 0).
    """
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    theta, _ = orientations(rng, n_samples)
    z = classical_arrival(f, packet, theta)
    mid = packet.center + packet.mean_momentum * f.transit_time / packet.mass
    zmax = max_deflection(f, packet.mass)
    half = span_factor * zmax if zmax > 0 else fallback_half_span
    edges = _edges(mid, half, n_bins)
    counts, _ = np.histogram(z, bins=edges)
    return _image(edges, counts.astype(float))


# -- full experiment -------------------------------------------------------------


def _sg_report(f, packet, weights, l_0, thresholds, coherence, inputs) -> ExperimentReport:
    f.check_validity()
    t = f.transit_time
    up = sg_closed_form(packet, +1, f, t)
    down = sg_closed_form(packet, -1, f, t)
    separation = abs(up.center - down.center)
    r_q = separation + up.std + down.std
    qr = quantum_ratio(r_q, l_0)
    qr_sep = quantum_ratio(separation, l_0) if separation > 0 else None
    cls = classify(qr, thresholds)
    obs = {
        "transit_time": t,
        "separation": separation,
        "up_center": up.center,
        "down_center": down.center,
        "branch_widths": [up.std, down.std],
        "weights": list(weights),
        "r_q": r_q,
        "r_q_separation": separation,
        "quantum_ratio": qr.as_dict(),
        "q_separation": None if qr_sep is None else qr_sep.q,
        "classification": cls.as_dict(),
        "coherence": coherence,
    }
    return ExperimentReport("stern-gerlach", inputs, obs)


def _inputs(f: SGFieldSpec, packet: GaussianPacket, l_0: float, extra: dict) -> dict:
    return {
        "field": {
            "b0_gradient": f.b0_gradient,
            "b0_bias": f.b0_bias,
            "mu": f.mu,
            "region_length": f.region_length,
            "beam_speed": f.beam_speed,
            "transverse_extent": f.transverse_extent,
            "validity_factor": f.validity_factor,
        },
        "packet": {"center": packet.center, "mean_momentum": packet.mean_momentum, "std": packet.std, "mass": packet.mass},
        "l_0": l_0,
        **extra,
    }


def run_sg_pure(
    f: SGFieldSpec, packet: GaussianPacket, s: SpinHalfState, l_0: float, thresholds: Thresholds | None = None
) -> ExperimentReport:
    """Pure spin state: both branches evolve by the closed-form variational solution.

    ``r_q`` in the report is the separation plus one standard deviation on each
    side (two branch half-widths); ``r_q_separation`` is the bare separation.
    """
    weights = (abs(s.c1) ** 2, abs(s.c2) ** 2)
    inputs = _inputs(f, packet, l_0, {"spin": {"theta": s.theta, "phi": s.phi}})
    return _sg_report(f, packet, weights, l_0, thresholds, "pure", inputs)


def run_sg_mixed(
    f: SGFieldSpec, packet: GaussianPacket, rho: DensityMatrix2, l_0: float, thresholds: Thresholds | None = None
) -> ExperimentReport:
    weights = band_intensities(rho)
    coherence = "pure" if abs(rho.purity() - 1.0) < 1e-12 else "mixed"
    inputs = _inputs(f, packet, l_0, {"rho": rho.matrix})
    return _sg_report(f, packet, weights, l_0, thresholds, coherence, inputs)


# -- large spin ---------------------------------------------------------------------

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_STIRLERR_TABLE = np.array(
    [0.0] + [math.lgamma(n + 1.0) - (n + 0.5) * math.log(n) + n - _LOG_SQRT_2PI for n in range(1, 16)]
)


def _stirlerr(n: np.ndarray) -> np.ndarray:
    """log(n!) - log(sqrt(2 pi n) (n/e)^n) for integers n >= 1."""
    n = np.asarray(n, dtype=float)
    out = np.empty_like(n)
    small = n <= 15
    out[small] = _STIRLERR_TABLE[n[small].astype(int)]
    big = n[~small]
    nn = big * big
    s0, s1, s2, s3, s4 = 1 / 12, 1 / 360, 1 / 1260, 1 / 1680, 1 / 1188
    out[~small] = (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / big
    return out


def _bd0(x: np.ndarray, mean: float) -> np.ndarray:
    """x log(x/mean) + mean - x, without cancellation near x = mean."""
    u = (np.asarray(x, dtype=float) - mean) / mean
    out = np.empty_like(u)
    near = np.abs(u) < 0.1
    un = u[near]
    acc = np.zeros_like(un)
    for j in range(24, 1, -1):
        acc = acc * -un + 1.0 / (j * (j - 1))
    out[near] = un * un * acc
    uf = u[~near]
    out[~near] = (1.0 + uf) * np.log1p(uf) - uf
    return mean * out


def binomial_log_pmf(n: int, p: float, q: float) -> np.ndarray:
    """log C(n,k) p^k q^(n-k) for k = 0..n, accurate near machine precision for large n."""
    k = np.arange(n + 1, dtype=float)
    with np.errstate(divide="ignore"):
        logp = math.log(p) if p > 0 else -math.inf
        logq = math.log(q) if q > 0 else -math.inf
    out = np.full(n + 1, -math.inf)
    out[0] = n * logq if q > 0 else (0.0 if n == 0 else -math.inf)
    out[n] = n * logp if p > 0 else -math.inf
    if p == 0:
        out[0] = 0.0
    if q == 0:
        out[n] = 0.0
    if n >= 2 and p > 0 and q > 0:
        ki = k[1:n]
        out[1:n] = (
            _stirlerr(np.array([n]))[0]
            - _stirlerr(ki)
            - _stirlerr(n - ki)
            - _bd0(ki, n * p)
            - _bd0(n - ki, n * q)
            + 0.5 * np.log(n / (2.0 * math.pi * ki * (n - ki)))
        )
    return out


@dataclass(frozen=True)
class LargeSpinDistribution:
    """Weights |c_k|^2 of a spin S = N/2 state pointing along theta, k = number of up spins.

    ``log_weights`` are evaluated directly from the closed form; ``raw_total``
    is their exponentiated sum before the final normalization.
    """

    n: int
    theta: float
    log_weights: np.ndarray
    raw_total: float

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights) / self.raw_total

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n

    @property
    def sz(self) -> np.ndarray:
        """S_z = M = k - N/2 for each k."""
        return np.arange(self.n + 1) - 0.5 * self.n


MAX_SPIN_N = 10_000_000


def large_spin_coefficients(n: int, theta: float) -> LargeSpinDistribution:
    if int(n) != n or not 1 <= n <= MAX_SPIN_N:
        raise DomainError(f"n must be an integer in [1, {MAX_SPIN_N}], got {n}")
    n = int(n)
    p = math.cos(0.5 * theta) ** 2
    q = math.sin(0.5 * theta) ** 2
    logw = binomial_log_pmf(n, p, q)
    total = math.fsum(np.exp(logw).tolist())
    return LargeSpinDistribution(n, float(theta), logw, total)


@dataclass(frozen=True)
class SpikeAnalysis:
    mean_x: float
    std_x: float
    x0: float
    gaussian_tv_error: float

    @property
    def sz_over_s(self) -> float:
        """<S_z>/S = 2 <x> - 1 = cos(theta)."""
        return 2.0 * self.mean_x - 1.0


def saddle_gaussian(n: int, x0: float) -> np.ndarray:
    """Discretized Gaussian from the quadratic expansion of f(x) around x0, normalized over k."""
    x = np.arange(n + 1) / n
    var = x0 * (1.0 - x0)
    if var == 0.0:
        g = (np.abs(x - x0) < 0.5 / n).astype(float)
    else:
        g = np.exp(-n * (x - x0) ** 2 / (2.0 * var))
    return g / g.sum()


def spike_analysis(dist: LargeSpinDistribution) -> SpikeAnalysis:
    if dist.n < 2:
        raise DomainError("spike analysis needs N >= 2")
    w = dist.weights
    x = dist.x
    mean = float(np.dot(w, x))
    std = float(math.sqrt(np.dot(w, (x - mean) ** 2)))
    x0 = math.cos(0.5 * dist.theta) ** 2
    tv = 0.5 * float(np.abs(w - saddle_gaussian(dist.n, x0)).sum())
    return SpikeAnalysis(mean, std, x0, tv)
