"""One-dimensional barrier transmission: WKB exponent, exact transfer matrices
and the transversely split packet hitting a barrier."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .core import HBAR
from .errors import AboveBarrierError, DomainError

WKB_LABEL = "WKB, no prefactor"


@dataclass(frozen=True)
class BarrierSpec:
    """Potential barrier; V = 0 outside its support.

    Either ``segments`` (ordered, non-overlapping ``(z_start, z_end, V)``
    triples with V in joules) or a smooth ``potential`` callable on ``support``.
    """

    segments: tuple[tuple[float, float, float], ...] | None = None
    potential: Callable[[float], float] | None = None
    support: tuple[float, float] | None = None

    def __post_init__(self):
        if (self.segments is None) == (self.potential is None):
            raise DomainError("give exactly one of segments or potential")
        if self.segments is not None:
            if not self.segments:
                raise DomainError("segment list is empty")
            prev_end = -math.inf
            for z0, z1, v in self.segments:
                if not (math.isfinite(z0) and math.isfinite(z1) and math.isfinite(v)):
                    raise DomainError("segment values must be finite")
                if z1 < z0:
                    raise DomainError(f"segment ({z0}, {z1}) has negative width")
                if z0 < prev_end:
                    raise DomainError("segments overlap or are not ordered")
                prev_end = z1
        else:
            if self.support is None or not self.support[1] > self.support[0]:
                raise DomainError("a smooth potential needs a support (lo, hi) with hi > lo")

    @classmethod
    def rectangle(cls, height: float, width: float, start: float = 0.0) -> "BarrierSpec":
        return cls(segments=((start, start + width, height),))

    @classmethod
    def smooth(cls, potential: Callable[[float], float], a: float) -> "BarrierSpec":
        """Smooth barrier on [-a, a]."""
        return cls(potential=potential, support=(-a, a))

    @property
    def is_piecewise(self) -> bool:
        return self.segments is not None

    @property
    def bounds(self) -> tuple[float, float]:
        if self.segments is not None:
            return self.segments[0][0], self.segments[-1][1]
        return self.support

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if self.segments is not None:
            out = np.zeros_like(z)
            for z0, z1, v in self.segments:
                out = np.where((z >= z0) & (z < z1), v, out)
            return out
        lo, hi = self.support
        inside = (z >= lo) & (z <= hi)
        vals = np.vectorize(self.potential, otypes=[float])(np.clip(z, lo, hi))
        return np.where(inside, vals, 0.0)

    def max_height(self) -> float:
        if self.segments is not None:
            return max(v for _, _, v in self.segments)
        lo, hi = self.support
        z = np.linspace(lo, hi, 4097)
        v = np.vectorize(self.potential, otypes=[float])(z)
        i = int(np.argmax(v))
        a, b = z[max(i - 1, 0)], z[min(i + 1, len(z) - 1)]
        res = minimize_scalar(lambda s: -self.potential(s), bounds=(a, b), method="bounded", options={"xatol": 1e-14 * (hi - lo)})
        return max(float(v[i]), -float(res.fun))

    def staircase(self, n: int) -> "BarrierSpec":
        """Piecewise-constant approximation with ``n`` equal segments (midpoint values)."""
        if self.segments is not None:
            return self
        lo, hi = self.support
        edges = np.linspace(lo, hi, n + 1)
        mids = 0.5 * (edges[1:] + edges[:-1])
        return BarrierSpec(segments=tuple((float(edges[i]), float(edges[i + 1]), float(self.potential(mids[i]))) for i in range(n)))


@dataclass(frozen=True)
class TransmissionResult:
    method: str
    transmission: float
    reflection: float
    log_transmission: float
    t_amplitude: complex | None = None
    t_magnitude: float | None = None
    turning_points: tuple[tuple[float, float], ...] = ()
    underflow: bool = False

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "transmission": self.transmission,
            "reflection": self.reflection,
            "log_transmission": self.log_transmission,
            "underflow": self.underflow,
        }


# -- WKB -----------------------------------------------------------------------------


def _bisect(f: Callable[[float], float], a: float, b: float, tol: float) -> float:
    fa = f(a)
    while b - a > tol:
        mid = 0.5 * (a + b)
        fm = f(mid)
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def _adaptive_simpson(f: Callable[[float], float], a: float, b: float, tol: float, max_depth: int = 50) -> float:
    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return rec(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)

    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, max_depth)


def forbidden_intervals(b: BarrierSpec, e: float, n_scan: int = 4096) -> list[tuple[float, float]]:
    """Intervals where V(z) > E; endpoints are turning points or support edges."""
    if b.segments is not None:
        out = []
        for z0, z1, v in b.segments:
            if v > e and z1 > z0:
                if out and out[-1][1] == z0:
                    out[-1] = (out[-1][0], z1)
                else:
                    out.append((z0, z1))
        return out
    lo, hi = b.support
    tol = (hi - lo) * 1e-12

    def g(z):
        return b.potential(z) - e

    z = np.linspace(lo, hi, n_scan + 1)
    pos = np.array([g(zi) > 0 for zi in z])
    out = []
    i = 0
    while i <= n_scan:
        if pos[i]:
            start = lo if i == 0 else _bisect(g, z[i - 1], z[i], tol)
            j = i
            while j + 1 <= n_scan and pos[j + 1]:
                j += 1
            end = hi if j == n_scan else _bisect(g, z[j], z[j + 1], tol)
            out.append((float(start), float(end)))
            i = j + 1
        else:
            i += 1
    return out


def wkb_exponent(b: BarrierSpec, e: float, m: float, rtol: float = 1e-11) -> tuple[float, list]:
    """Return (integral of sqrt(2m(V-E))/hbar over the forbidden region, intervals)."""
    intervals = forbidden_intervals(b, e)
    if b.segments is not None:
        total = math.fsum(
            math.sqrt(2.0 * m * (v - e)) / HBAR * (z1 - z0) for z0, z1, v in b.segments if v > e
        )
        return total, intervals
    total = 0.0
    for z0, z1 in intervals:
        half = 0.5 * (z1 - z0)

        # z = z0 + half (1 - cos phi) removes the square-root behaviour at turning points
        def integrand(phi, z0=z0, half=half):
            z = z0 + half * (1.0 - math.cos(phi))
            return math.sqrt(max(2.0 * m * (b.potential(z) - e), 0.0)) / HBAR * half * math.sin(phi)

        rough = abs(integrand(0.5 * math.pi)) * math.pi + 1e-300
        total += _adaptive_simpson(integrand, 0.0, math.pi, rtol * rough)
    return total, intervals


def wkb_transmission(b: BarrierSpec, e: float, m: float) -> TransmissionResult:
    """T = exp(-2 * integral sqrt(2m(V-E))/hbar dz) over the classically forbidden region."""
    if not e > 0:
        raise DomainError(f"energy must be positive, got {e}")
    if not m > 0:
        raise DomainError(f"mass must be positive, got {m}")
    vmax = b.max_height()
    if e >= vmax:
        raise AboveBarrierError(f"E = {e:.4g} J >= max V = {vmax:.4g} J: no turning points, WKB form inapplicable")
    expo, intervals = wkb_exponent(b, e, m)
    log_t = -2.0 * expo
    t = math.exp(log_t)
    return TransmissionResult(
        WKB_LABEL,
        t,
        1.0 - t,
        log_t,
        t_magnitude=math.exp(-expo),
        turning_points=tuple(intervals),
        underflow=t == 0.0,
    )


# -- exact transfer matrix ---------------------------------------------------------------


def _regions(b: BarrierSpec) -> list[tuple[float, float]]:
    """(width, V) for every region between the first and last barrier edge, gaps as V = 0."""
    regions = []
    prev = None
    for z0, z1, v in b.segments:
        if prev is not None and z0 > prev:
            regions.append((z0 - prev, 0.0))
        if z1 > z0:
            regions.append((z1 - z0, v))
        prev = z1
    return regions


def _region_matrix(q2: float, width: float, k0: float) -> tuple[np.ndarray, float]:
    """Map of (psi, psi'/k0) across one region, with a log scale factored out.

    ``q2`` is 2m(E - V)/hbar^2; every map has unit determinant.
    """
    if q2 > 0:
        q = math.sqrt(q2)
        th = q * width
        u = q / k0
        return np.array([[math.cos(th), k0 * width * np.sinc(th / math.pi)], [-u * math.sin(th), math.cos(th)]]), 0.0
    if q2 == 0:
        return np.array([[1.0, k0 * width], [0.0, 1.0]]), 0.0
    kappa = math.sqrt(-q2)
    x = kappa * width
    em = math.exp(-2.0 * x)
    sh = -math.expm1(-2.0 * x)
    u = kappa / k0
    # cosh and sinh times 2 exp(-x)
    return np.array([[1.0 + em, sh / u], [u * sh, 1.0 + em]]), x - math.log(2.0)


def transfer_matrix_transmission(b: BarrierSpec, e: float, m: float) -> TransmissionResult:
    """Exact transmission through a piecewise-constant barrier.

    Works on (psi, psi'/k) so E = V regions need no special casing. Growing
    factors are pulled out into a log scale, so opaque barriers give a finite
    ``log_transmission`` even when ``transmission`` underflows.
    """
    if not e > 0:
        raise DomainError(f"energy must be positive, got {e}")
    if not b.is_piecewise:
        raise DomainError("the transfer-matrix method needs a piecewise-constant barrier; use staircase()")
    c = 2.0 * m / (HBAR * HBAR)
    k0 = math.sqrt(c * e)
    mat = np.eye(2)
    log_scale = 0.0
    length = 0.0
    for width, v in _regions(b):
        step, ls = _region_matrix(c * (e - v), width, k0)
        mat = step @ mat
        s = np.abs(mat).max()
        mat /= s
        log_scale += ls + math.log(s)
        length += width
    (p11, p12), (p21, p22) = mat
    # incident amplitude A and reflected B for unit transmitted amplitude
    amp_a = 0.5 * complex(p11 + p22, p21 - p12)
    amp_b = 0.5 * complex(p22 - p11, -(p12 + p21))
    log_t = -2.0 * log_scale - 2.0 * math.log(abs(amp_a))
    trans = math.exp(log_t)
    t_mag = math.exp(0.5 * log_t)
    t_amp = t_mag * complex(np.exp(-1j * (k0 * length + np.angle(amp_a))))
    return TransmissionResult(
        "exact transfer matrix",
        trans,
        float(abs(amp_b / amp_a) ** 2),
        log_t,
        t_amplitude=t_amp,
        t_magnitude=t_mag,
        underflow=trans == 0.0,
    )


def rectangle_transmission(v0: float, width: float, e: float, m: float) -> float:
    """Closed-form log-transmission of a single rectangular barrier (any E > 0)."""
    if e < v0:
        kappa = math.sqrt(2.0 * m * (v0 - e)) / HBAR
        x = kappa * width
        log_sinh = x + math.log1p(-math.exp(-2.0 * x)) - math.log(2.0) if x > 0 else -math.inf
        log_a = math.log(v0 * v0 / (4.0 * e * (v0 - e)))
        return -float(np.logaddexp(0.0, log_a + 2.0 * log_sinh))
    if e == v0:
        return -math.log1p(m * v0 * width * width / (2.0 * HBAR * HBAR))
    k2 = math.sqrt(2.0 * m * (e - v0)) / HBAR
    return -math.log1p(v0 * v0 * math.sin(k2 * width) ** 2 / (4.0 * e * (e - v0)))


# -- split transverse packet ------------------------------------------------------------


@dataclass(frozen=True)
class SplitTransverseSpec:
    c1: complex
    c2: complex
    r1: tuple[float, float] = (0.0, 0.0)
    r2: tuple[float, float] = (1e-6, 0.0)
    gamma: float = 1.0

    def __post_init__(self):
        norm = abs(self.c1) ** 2 + abs(self.c2) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise DomainError(f"|c1|^2 + |c2|^2 = {norm}, expected 1")
        if not 0.0 <= self.gamma <= 1.0:
            raise DomainError(f"gamma must lie in [0, 1], got {self.gamma}")

    def density(self) -> np.ndarray:
        c1, c2 = complex(self.c1), complex(self.c2)
        off = self.gamma * c1 * c2.conjugate()
        return np.array([[abs(c1) ** 2, off], [off.conjugate(), abs(c2) ** 2]], dtype=complex)


def two_path_intensity(rho: np.ndarray, phase) -> np.ndarray:
    """Balanced recombination of the two branches: I = 1 + gamma cos(phase - arg rho12)."""
    phase = np.asarray(phase, dtype=float)
    norm = math.sqrt(rho[0, 0].real * rho[1, 1].real)
    if norm == 0:
        return np.ones_like(phase)
    return 1.0 + np.real(rho[0, 1] / norm * np.exp(-1j * phase))


def fringe_visibility(rho: np.ndarray) -> float:
    """(Imax - Imin)/(Imax + Imin) of the balanced two-path intensity, i.e. gamma."""
    norm = math.sqrt(rho[0, 0].real * rho[1, 1].real)
    return 0.0 if norm == 0 else float(abs(rho[0, 1]) / norm)


@dataclass(frozen=True)
class TunnelOutcome:
    transmission: TransmissionResult
    incident_density: np.ndarray
    transmitted_density: np.ndarray
    transmitted_weights: tuple[float, float]
    reflected_weights: tuple[float, float]
    coherence: float
    regime_flag: dict = field(default_factory=dict)

    @property
    def visibility(self) -> float:
        return fringe_visibility(self.transmitted_density)

    def as_dict(self) -> dict:
        return {
            "transmission": self.transmission.as_dict(),
            "transmitted_weights": list(self.transmitted_weights),
            "reflected_weights": list(self.reflected_weights),
            "transmitted_density": self.transmitted_density,
            "coherence": self.coherence,
            "visibility": self.visibility,
            "regime": self.regime_flag,
        }


def tunnel_scenario(
    split: SplitTransverseSpec,
    b: BarrierSpec,
    e: float,
    m: float,
    method: str = "exact",
    momentum_spread: float | None = None,
    transit_time: float | None = None,
) -> TunnelOutcome:
    """Barrier acting on the longitudinal motion of a transversely split packet.

    The transverse state passes unchanged (normalized): gamma = 1 keeps the
    coherent superposition, gamma = 0 leaves a mixture with weights |c1|^2,
    |c2|^2. The transmitted probability is T for every gamma. With
    ``momentum_spread`` (b) and ``transit_time`` the neglect of longitudinal
    spreading is checked against t << 2 m hbar / b^2.
    """
    if method == "exact":
        res = transfer_matrix_transmission(b if b.is_piecewise else b.staircase(400), e, m)
    elif method == "wkb":
        res = wkb_transmission(b, e, m)
    else:
        raise DomainError(f"unknown method {method!r}; use 'exact' or 'wkb'")
    rho = split.density()
    w1, w2 = rho[0, 0].real, rho[1, 1].real
    flag = {}
    if momentum_spread is not None and transit_time is not None:
        bound = 2.0 * m * HBAR / momentum_spread**2
        flag = {"transit_time": transit_time, "spreading_time": bound, "ok": transit_time * 10.0 <= bound}
    t = res.transmission
    return TunnelOutcome(
        res,
        rho,
        rho.copy(),
        (t * w1, t * w2),
        ((1.0 - t) * w1, (1.0 - t) * w2),
        split.gamma,
        flag,
    )
