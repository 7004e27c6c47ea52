"""Near-field matter-wave optics: Fresnel propagation, binary gratings, Talbot
self-imaging and Talbot-Lau transmission scans.

A :class:`WaveField` stores a slowly varying envelope ``u`` on a uniform grid
plus an optional quadratic carrier ``exp(i pi x^2 / (lambda R))`` of curvature
radius ``R`` (a paraxial spherical wave from a point ``R`` upstream). Propagating
a curved field over ``z`` is done exactly by the Fresnel scaling theorem:
propagate ``u`` over ``z R/(R+z)`` and magnify coordinates by ``(R+z)/R``.

The propagation integral is evaluated by direct quadrature: the Fresnel kernel
is integrated exactly over each source cell (Fresnel integrals C, S), which is
exact for piecewise-constant envelopes such as a lit binary grating.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import fresnel

from .core import QuantumRatio, quantum_ratio
from .errors import AliasingError, DomainError

# -- geometry -----------------------------------------------------------------------


@dataclass(frozen=True)
class GratingSpec:
    """Binary amplitude grating of ``n_slits`` openings, centred on ``offset``."""

    period: float
    open_fraction: float = 0.5
    n_slits: int = 100
    offset: float = 0.0

    def __post_init__(self):
        if not self.period > 0:
            raise DomainError(f"period must be positive, got {self.period}")
        if not 0 < self.open_fraction <= 1:
            raise DomainError(f"open_fraction must lie in (0, 1], got {self.open_fraction}")
        if int(self.n_slits) != self.n_slits or self.n_slits < 2:
            raise DomainError(f"n_slits must be an integer >= 2, got {self.n_slits}")

    @property
    def height(self) -> float:
        return self.n_slits * self.period

    @property
    def slit_centers(self) -> np.ndarray:
        return self.offset + (np.arange(self.n_slits) - 0.5 * (self.n_slits - 1)) * self.period

    @property
    def extent(self) -> tuple[float, float]:
        return self.offset - 0.5 * self.height, self.offset + 0.5 * self.height

    def open_length_below(self, x: np.ndarray) -> np.ndarray:
        """Total open length of the grating in (-inf, x]."""
        w = self.open_fraction * self.period
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c in self.slit_centers:
            out += np.clip(x - (c - 0.5 * w), 0.0, w)
        return out


@dataclass(frozen=True)
class GeometrySpec:
    """Source-to-G2 distance ``l1``, G2-to-G3 distance ``l2``, de Broglie wavelength."""

    l1: float
    l2: float
    wavelength: float

    def __post_init__(self):
        if not (self.l1 > 0 and self.l2 > 0 and self.wavelength > 0):
            raise DomainError("l1, l2 and wavelength must all be positive")

    @property
    def m1(self) -> float:
        return (self.l1 + self.l2) / self.l2

    @property
    def m2(self) -> float:
        return (self.l1 + self.l2) / self.l1

    @property
    def effective_distance(self) -> float:
        """Plane-wave equivalent distance l1 l2 / (l1 + l2) = l2 / m2."""
        return self.l1 * self.l2 / (self.l1 + self.l2)


def talbot_length(d: float, wavelength: float) -> float:
    """L_T = d^2 / lambda."""
    if not (d > 0 and wavelength > 0):
        raise DomainError("period and wavelength must be positive")
    return d * d / wavelength


def resonant_l2(l1: float, d: float, wavelength: float, order: float = 2.0) -> float:
    """Solve l2 = order * M2(l2) * L_T for l2 (order 2: full revival, 1: half-period shift)."""
    lt = talbot_length(d, wavelength)
    denom = 1.0 - order * lt / l1
    if denom <= 0:
        raise DomainError(f"no resonant l2 for l1={l1:g}: need l1 > {order:g} * L_T = {order * lt:g}")
    return order * lt / denom


# -- fields --------------------------------------------------------------------------


@dataclass(frozen=True)
class WaveField:
    """Envelope ``u`` sampled at ``x0 + i * pitch``; full field is u * exp(i pi x^2/(lambda R))."""

    u: np.ndarray
    x0: float
    pitch: float
    wavelength: float
    curvature: float = math.inf

    def __post_init__(self):
        if not (self.pitch > 0 and self.wavelength > 0):
            raise DomainError("pitch and wavelength must be positive")
        if not self.curvature > 0:
            raise DomainError("curvature radius must be positive (or inf for a plane wave)")

    @property
    def n(self) -> int:
        return len(self.u)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.pitch * np.arange(self.n)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.u) ** 2

    @property
    def psi(self) -> np.ndarray:
        if math.isinf(self.curvature):
            return self.u.copy()
        x = self.x
        return self.u * np.exp(1j * math.pi * x * x / (self.wavelength * self.curvature))

    def power(self) -> float:
        return float(self.intensity.sum() * self.pitch)


def centered_grid(n: int, pitch: float) -> tuple[float, float]:
    """(x0, pitch) of an n-point grid symmetric about 0."""
    return -0.5 * (n - 1) * pitch, pitch


def point_source_field(n: int, pitch: float, wavelength: float, l1: float, x_center: float = 0.0) -> WaveField:
    """Unit-amplitude paraxial spherical wave at distance ``l1`` from a point source on axis."""
    x0, _ = centered_grid(n, pitch)
    return WaveField(np.ones(n, dtype=complex), x0 + x_center, pitch, wavelength, l1)


def plane_wave_field(n: int, pitch: float, wavelength: float, x_center: float = 0.0) -> WaveField:
    x0, _ = centered_grid(n, pitch)
    return WaveField(np.ones(n, dtype=complex), x0 + x_center, pitch, wavelength)


def _cell_kernel(n: int, pitch: float, lz: float) -> np.ndarray:
    """Fresnel kernel integrated over one cell, for offsets -(n-1)..(n-1) cells."""
    k = np.arange(-(n - 1), n) * pitch
    scale = math.sqrt(2.0 / lz)
    sa, ca = fresnel((k - 0.5 * pitch) * scale)
    sb, cb = fresnel((k + 0.5 * pitch) * scale)
    return math.sqrt(0.5 * lz) * ((cb - ca) + 1j * (sb - sa)) / np.sqrt(1j * lz)


def edge_fraction(f: WaveField, band: float = 0.02) -> float:
    """Largest intensity in the outer ``band`` of the grid relative to the peak."""
    inten = f.intensity
    peak = inten.max()
    if peak == 0:
        return 0.0
    m = max(1, int(band * f.n))
    return float(max(inten[:m].max(), inten[-m:].max()) / peak)


def propagate(f: WaveField, distance: float, edge_tol: float | None = 1e-6) -> WaveField:
    """Fresnel-propagate ``f`` downstream by ``distance``.

    The output grid has the same number of samples; for a curved field its
    pitch is magnified by (R+z)/R. Raises :class:`AliasingError` if the
    output intensity in the outer 2% of the grid exceeds ``edge_tol`` times
    the peak (set ``edge_tol=None`` to skip the check).
    """
    if not distance > 0:
        raise DomainError(f"distance must be positive, got {distance}")
    if math.isinf(f.curvature):
        mag, z_eff, new_r = 1.0, distance, math.inf
    else:
        mag = (f.curvature + distance) / f.curvature
        z_eff = distance / mag
        new_r = f.curvature + distance

    n = f.n
    nz = np.flatnonzero(f.u)
    if nz.size == 0:
        return replace(f, u=np.zeros(n, dtype=complex), x0=mag * f.x0, pitch=mag * f.pitch, curvature=new_r)
    j0, j1 = int(nz[0]), int(nz[-1])
    kernel = _cell_kernel(n, f.pitch, f.wavelength * z_eff)
    full = np.convolve(f.u[j0 : j1 + 1], kernel)
    u_out = full[n - 1 - j0 : n - 1 - j0 + n] / math.sqrt(mag)

    out = WaveField(u_out, mag * f.x0, mag * f.pitch, f.wavelength, new_r)
    if edge_tol is not None:
        leak = edge_fraction(out)
        if leak > edge_tol:
            raise AliasingError(
                f"intensity at the grid boundary is {leak:.3g} of the peak (> {edge_tol:.1g}); "
                "use a wider grid (more samples at the same pitch)"
            )
    return out


def grating_mask(f: WaveField, g: GratingSpec) -> np.ndarray:
    """Open fraction of every grid cell (1 fully open, 0 blocked)."""
    x = f.x
    h = 0.5 * f.pitch
    frac = (g.open_length_below(x + h) - g.open_length_below(x - h)) / f.pitch
    # snap cumulative-sum roundoff so fully open and fully blocked cells are exact
    frac[np.abs(frac - 1.0) < 1e-9] = 1.0
    frac[np.abs(frac) < 1e-9] = 0.0
    return frac


def apply_grating(f: WaveField, g: GratingSpec) -> WaveField:
    lo, hi = g.extent
    if f.x0 - 0.5 * f.pitch > lo or f.x[-1] + 0.5 * f.pitch < hi:
        raise DomainError(
            f"grid [{f.x0:.4g}, {f.x[-1]:.4g}] does not cover the grating [{lo:.4g}, {hi:.4g}]"
        )
    if f.pitch > g.period / 16:
        raise DomainError(f"grid pitch {f.pitch:.3g} exceeds period/16 = {g.period / 16:.3g}")
    return replace(f, u=f.u * grating_mask(f, g))


# -- self-imaging ----------------------------------------------------------------------


@dataclass(frozen=True)
class PointSource:
    position: float = 0.0
    weight: float = 1.0


@dataclass(frozen=True)
class SelfImageResult:
    correlation: float
    best_shift: float
    period_at_g3: float
    behind_g2: np.ndarray
    at_g3: np.ndarray
    x_g3: np.ndarray


DEFAULT_SAMPLES_PER_PERIOD = 32
DEFAULT_GRID = 2**14
# grids of DEFAULT_GRID samples leak ~3e-4 of the peak intensity at their edges
DEFAULT_EDGE_TOL = 1e-3


def _behind_g2(source: PointSource, g: GratingSpec, geo: GeometrySpec, n_grid: int, spp: int) -> WaveField:
    """Field just behind G2 in coordinates centred on the source (shifted by -source.position)."""
    pitch = g.period / spp
    f = point_source_field(n_grid, pitch, geo.wavelength, geo.l1)
    return apply_grating(f, replace(g, offset=g.offset - source.position))


def _source_frame_fields(source: PointSource, g: GratingSpec, geo: GeometrySpec, n_grid: int, spp: int, edge_tol):
    behind = _behind_g2(source, g, geo, n_grid, spp)
    return behind, propagate(behind, geo.l2, edge_tol=edge_tol)


def _circular_correlation(a: np.ndarray, b: np.ndarray, shifts: range) -> np.ndarray:
    a = a - a.mean()
    b = b - b.mean()
    norm = math.sqrt(float(np.dot(a, a)) * float(np.dot(b, b)))
    if norm == 0:
        return np.zeros(len(shifts))
    return np.array([float(np.dot(a, np.roll(b, -k))) / norm for k in shifts])


def self_image_check(
    source: PointSource | None,
    g: GratingSpec,
    geo: GeometrySpec,
    n_grid: int = DEFAULT_GRID,
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
    edge_tol: float | None = DEFAULT_EDGE_TOL,
    edge_exclusion: float = 0.1,
) -> SelfImageResult:
    """Compare the intensity at G3, rescaled by 1/M2, with the intensity behind G2.

    The correlation is a normalized circular cross-correlation over the
    central integer number of periods, leaving out ``edge_exclusion`` of the
    grating at each end. ``best_shift`` is in G3 coordinates, in
    (-M2 d / 2, M2 d / 2].
    """
    source = source or PointSource()
    spp = int(samples_per_period)
    behind, at_g3 = _source_frame_fields(source, g, geo, n_grid, spp, edge_tol)
    i2 = behind.intensity
    i3 = at_g3.intensity * geo.m2  # undo the 1/M2 intensity dilution

    n_periods = int(math.floor(g.n_slits * (1.0 - 2.0 * edge_exclusion)))
    if n_periods < 1:
        raise DomainError("edge exclusion leaves no complete period")
    width = n_periods * spp
    # window centred on the grating centre, which sits at index (n-1)/2 + offset/pitch
    centre = (behind.n - 1) / 2.0 + (g.offset - source.position) / behind.pitch
    start = int(round(centre - width / 2.0))
    if start < 0 or start + width > behind.n:
        raise DomainError("correlation window falls outside the grid")
    a = i2[start : start + width]
    b = i3[start : start + width]
    corr = _circular_correlation(a, b, range(spp))
    k = int(np.argmax(corr))
    if k > spp // 2:
        k -= spp
    period3 = geo.m2 * g.period
    return SelfImageResult(
        float(corr.max()), k * at_g3.pitch, period3, i2, i3 / geo.m2, at_g3.x + source.position
    )


# -- Talbot-Lau ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanResult:
    shifts: np.ndarray
    transmissions: np.ndarray
    visibility: float
    period_mismatch: float
    flagged: bool

    def rows(self):
        return zip(self.shifts.tolist(), self.transmissions.tolist())


def visibility(values) -> float:
    """(max - min) / (max + min); 0 for a constant or all-zero array."""
    v = np.asarray(values, dtype=float)
    hi, lo = float(v.max()), float(v.min())
    if hi == lo or hi + lo == 0:
        return 0.0
    return (hi - lo) / (hi + lo)


def _open_fraction_periodic(x_lo: np.ndarray, x_hi: np.ndarray, period: float, open_fraction: float, shift: float):
    """Open length of an infinite periodic grating (openings centred at shift + j*period) in [x_lo, x_hi]."""
    w = open_fraction * period

    def cum(x):
        # open length in [shift - period/2 - w/2 ... x] measured from a period boundary
        y = x - (shift - 0.5 * w)
        k = np.floor(y / period)
        r = y - k * period
        return k * w + np.minimum(r, w)

    return cum(x_hi) - cum(x_lo)


def g3_transmission(at_g3: WaveField, g3: GratingSpec, shift: float, frame_offset: float = 0.0) -> float:
    """Total intensity passing a G3 grating displaced by ``shift``.

    G3 is treated as covering the whole beam (its ``n_slits`` is ignored), so a
    fully open G3 transmits the same power at every shift.
    """
    if g3.open_fraction == 1.0:
        return float(at_g3.intensity.sum() * at_g3.pitch)
    x = at_g3.x + frame_offset
    h = 0.5 * at_g3.pitch
    open_len = _open_fraction_periodic(x - h, x + h, g3.period, g3.open_fraction, g3.offset + shift)
    return float(np.dot(at_g3.intensity, open_len))


def lau_sources(geo: GeometrySpec, d: float, n_points: int = 20, n_slits: int = 5, slit_fraction: float = 0.1):
    """Incoherent point sources filling ``n_slits`` G1 openings of period M1*d."""
    if n_points < 1:
        raise DomainError("n_points must be >= 1")
    period1 = geo.m1 * d
    per = max(1, n_points // n_slits)
    pts = []
    for j in range(n_slits):
        c = (j - 0.5 * (n_slits - 1)) * period1
        for i in range(per):
            frac = (i + 0.5) / per - 0.5
            pts.append(PointSource(c + frac * slit_fraction * period1))
    return pts


def talbot_lau_scan(
    sources,
    g2: GratingSpec,
    g3: GratingSpec,
    geo: GeometrySpec,
    shifts,
    n_grid: int = DEFAULT_GRID,
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
    edge_tol: float | None = DEFAULT_EDGE_TOL,
    threads: int = 1,
) -> ScanResult:
    """Total G3 transmission versus G3 displacement, summed incoherently over sources.

    G3's period should equal M2 * d; a mismatch above 10% is flagged in the
    result but the scan still runs.
    """
    if isinstance(sources, PointSource) or sources is None:
        sources = [sources or PointSource()]
    shifts = np.asarray(shifts, dtype=float)
    expected = geo.m2 * g2.period
    mismatch = abs(g3.period - expected) / expected

    def one(src: PointSource) -> np.ndarray:
        _, at_g3 = _source_frame_fields(src, g2, geo, n_grid, int(samples_per_period), edge_tol)
        return src.weight * np.array([g3_transmission(at_g3, g3, s, frame_offset=src.position) for s in shifts])

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(one, sources))
    else:
        parts = [one(s) for s in sources]
    total = np.zeros(len(shifts))
    for p in parts:  # index order, independent of scheduling
        total += p
    return ScanResult(shifts, total, visibility(total), mismatch, mismatch > 0.1)


def talbot_carpet(
    g: GratingSpec,
    geo: GeometrySpec,
    distances,
    n_grid: int = DEFAULT_GRID,
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
    edge_tol: float | None = None,
    n_bins: int | None = None,
):
    """Intensity rows behind G2 at each distance, on the G3 grid rescaled by 1/M2.

    Returns ``(x, rows)`` where ``x`` are G2-plane coordinates; with
    ``n_bins`` the central grating region is resampled to that many columns.
    """
    behind = _behind_g2(PointSource(), g, geo, n_grid, int(samples_per_period))
    x = behind.x
    rows = []
    for z in distances:
        out = propagate(behind, float(z), edge_tol=edge_tol)
        mag = (geo.l1 + z) / geo.l1
        rows.append(out.intensity * mag)
    rows = np.array(rows)
    if n_bins is not None:
        lo, hi = g.extent
        sel = (x >= lo) & (x <= hi)
        x, rows = x[sel], rows[:, sel]
        step = max(1, len(x) // n_bins)
        x, rows = x[::step], rows[:, ::step]
    return x, rows


def coherence_quantum_ratio(g2: GratingSpec, particle) -> QuantumRatio:
    """Q with R_q taken as the total height of the diffraction grating."""
    return quantum_ratio(g2.height, particle.size_l0)
