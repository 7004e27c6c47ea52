"""Acceptance criteria 1-8, each timed and reported as one PASS/FAIL line."""

import io
import math
import time

import numpy as np
from scipy.optimize import brentq

from oracles import harmonic_std_per_period
from quantum_ratio.cli import run
from quantum_ratio.core import default_catalog, quantum_ratio
from quantum_ratio.decoherence import BranchDensity, EnvironmentSpec, decohere, purity, sg_mixed_prediction
from quantum_ratio.interferometry import GratingSpec, PointSource, self_image_check, talbot_lau_scan
from quantum_ratio.presets import DOUBLING_TIME_REFERENCE, QUANTUM_RATIO_ROWS, REFERENCE_SIZE, ag_stern_gerlach, c70_talbot
from quantum_ratio.report import read_csv
from quantum_ratio.sterngerlach import (
    classical_sg_ensemble,
    large_spin_coefficients,
    quantum_screen_image,
    spike_analysis,
)
from quantum_ratio.tunneling import (
    BarrierSpec,
    SplitTransverseSpec,
    rectangle_transmission,
    transfer_matrix_transmission,
    tunnel_scenario,
    wkb_transmission,
)
from quantum_ratio.wavepacket import (
    CoherentState,
    closed_form_trajectory,
    coherent_evolve,
    doubling_time,
    free_evolve,
    quench,
    sg_ode_integrate,
)

CAT = default_catalog()
HBAR = 1.054571817e-34
EV = 1.602176634e-19


def test_criterion_1_doubling_times(acceptance):
    t0 = time.perf_counter()
    buf = io.StringIO()
    code = run(["diffusion", "--size", "1um", "--particles", "electron,hydrogen,C70,stone1g"], out=buf)
    _, rows, _ = read_csv(buf.getvalue())
    ratios = {r[0]: float(r[3]) / DOUBLING_TIME_REFERENCE[r[0]] for r in rows}
    m = CAT["C70"].mass
    linear = max(abs(doubling_time(k * m, REFERENCE_SIZE) / (k * doubling_time(m, REFERENCE_SIZE)) - 1) for k in (2.0, 1e3, 1e25))
    runtime = time.perf_counter() - t0
    ok = code == 0 and len(ratios) == 4 and all(1 / 3 <= r <= 3 for r in ratios.values()) and linear <= 1e-10
    detail = " ".join(f"{k}={v:.3g}x" for k, v in ratios.items()) + f" mass-linearity={linear:.1e}"
    assert acceptance(1, "free-packet doubling times", ok, runtime, 1.0, detail)


def test_criterion_2_quantum_ratios(acceptance):
    t0 = time.perf_counter()
    diffs = {}
    for name in QUANTUM_RATIO_ROWS:
        p = CAT[name]
        diffs[name] = quantum_ratio(p.r_q, p.size_l0).log10() - math.log10(p.q_reference)
    runtime = time.perf_counter() - t0
    ok = len(diffs) == 4 and all(abs(d) <= 0.5 for d in diffs.values())
    detail = " ".join(f"{k}:{v:+.2f}dex" for k, v in diffs.items())
    assert acceptance(2, "reference quantum ratios", ok, runtime, 1.0, detail)


def test_criterion_3_rk4_vs_closed_form(acceptance):
    t0 = time.perf_counter()
    pre = ag_stern_gerlach()
    f, p = pre.field, pre.packet
    t_end = f.transit_time
    worst = 0.0
    branches = {}
    for branch in (+1, -1):
        tr = sg_ode_integrate(p, branch, f.mu, f.profile(), t_end)
        cf = closed_form_trajectory(p, branch, f, tr.t)
        for a, b in ((tr.center, cf.center), (tr.mean_momentum, cf.mean_momentum), (tr.width_g, cf.width_g),
                     (tr.phase_sigma, cf.phase_sigma)):
            worst = max(worst, float(np.max(np.abs(a - b)) / np.max(np.abs(b))))
        branches[branch] = tr.center[-1]
    sep = branches[+1] - branches[-1]
    expected = f.mu * f.b0_gradient * t_end**2 / p.mass
    sep_err = abs(sep / expected - 1)
    runtime = time.perf_counter() - t0
    ok = worst <= 1e-8 and sep_err <= 1e-10
    assert acceptance(3, "RK4 vs closed form", ok, runtime, 1.0, f"sup-rel={worst:.1e} separation-rel={sep_err:.1e}")


def test_criterion_4_large_spin(acceptance):
    t0 = time.perf_counter()
    theta = math.pi / 4
    x0 = math.cos(math.pi / 8) ** 2
    scaled, tv, mean_err = [], {}, 0.0
    for n in (100, 1000, 10_000, 100_000):
        a = spike_analysis(large_spin_coefficients(n, theta))
        mean_err = max(mean_err, abs(a.mean_x - x0))
        scaled.append(a.std_x * math.sqrt(n))
        tv[n] = a.gaussian_tv_error
    spread = max(scaled) - min(scaled)
    norm_err = abs(large_spin_coefficients(1_000_000, theta).weights.sum() - 1.0)
    runtime = time.perf_counter() - t0
    ok = mean_err <= 1e-12 and spread <= 1e-10 and tv[1000] <= 0.05 and tv[100_000] <= 0.01 and norm_err <= 1e-10
    detail = f"mean-err={mean_err:.1e} std*sqrtN-spread={spread:.1e} tv(1e3)={tv[1000]:.4f} tv(1e5)={tv[100_000]:.5f} norm-err(1e6)={norm_err:.1e}"
    assert acceptance(4, "large-spin spike", ok, runtime, 10.0, detail)


def test_criterion_5_talbot(acceptance):
    t0 = time.perf_counter()
    pre = c70_talbot()
    g = pre.grating
    full = self_image_check(PointSource(), g, pre.geometry(2.0))
    half = self_image_check(PointSource(), g, pre.geometry(1.0))
    geo = pre.geometry(2.0)
    shifts = np.linspace(0.0, geo.m2 * g.period, 17)
    g3 = GratingSpec(geo.m2 * g.period, 0.5, g.n_slits)
    scan = talbot_lau_scan(PointSource(), g, g3, geo, shifts)
    open_scan = talbot_lau_scan(PointSource(), g, GratingSpec(geo.m2 * g.period, 1.0, g.n_slits), geo, shifts)
    runtime = time.perf_counter() - t0
    half_err = abs(abs(half.best_shift) - 0.5 * half.period_at_g3) / half.period_at_g3
    ok = (
        full.correlation >= 0.8
        and abs(full.best_shift) <= 0.05 * full.period_at_g3
        and half.correlation >= 0.8
        and half_err <= 0.05
        and scan.visibility >= 0.3
        and open_scan.visibility == 0.0
    )
    detail = (f"revival corr={full.correlation:.4f} shift={full.best_shift:.2e} m; "
              f"half corr={half.correlation:.4f} shift-err={half_err:.3f} period; "
              f"V={scan.visibility:.3f} V(open G3)={open_scan.visibility}")
    assert acceptance(5, "Talbot self-imaging and Talbot-Lau", ok, runtime, 60.0, detail)


def test_criterion_6_tunneling(acceptance):
    t0 = time.perf_counter()
    m = CAT["electron"].mass
    v0, w = 2 * EV, 0.5e-9
    b = BarrierSpec.rectangle(v0, w)
    unitarity, closed = 0.0, 0.0
    for e in np.linspace(0.01, 1.5, 100) * v0:
        res = transfer_matrix_transmission(b, float(e), m)
        unitarity = max(unitarity, abs(res.transmission + res.reflection - 1))
        closed = max(closed, abs(res.transmission / math.exp(rectangle_transmission(v0, w, float(e), m)) - 1))
    kappa = math.sqrt(2 * m * (v0 - EV)) / HBAR
    ladder = []
    for kw in (3, 5, 10, 20):
        bb = BarrierSpec.rectangle(v0, kw / kappa)
        ladder.append(abs(wkb_transmission(bb, EV, m).log_transmission / transfer_matrix_transmission(bb, EV, m).log_transmission - 1))
    runtime = time.perf_counter() - t0
    monotone = all(a > c for a, c in zip(ladder, ladder[1:]))
    ok = unitarity <= 1e-10 and closed <= 1e-10 and ladder[2] <= 0.1 and monotone
    detail = f"unitarity={unitarity:.1e} closed-form={closed:.1e} WKB ladder=" + ",".join(f"{x:.4f}" for x in ladder)
    assert acceptance(6, "tunneling", ok, runtime, 1.0, detail)


def test_criterion_7_decoherence_vs_classicality(acceptance):
    t0 = time.perf_counter()
    c = 1 / math.sqrt(2)
    env = EnvironmentSpec(1e13, 1e-6)
    pure = BranchDensity.pure(c, c, r2=2e-4)
    mixed = decohere(pure, env, 1e-10)
    bands_equal = sg_mixed_prediction(pure) == sg_mixed_prediction(mixed) and abs(mixed.off_diagonal) == 0.0

    vis_err = 0.0
    b = BarrierSpec.rectangle(2 * EV, 0.3e-9)
    for t in (0.0, 3e-14, 1e-13, 3e-13):
        rho = decohere(pure, env, t)
        out = tunnel_scenario(SplitTransverseSpec(c, c, gamma=rho.coherence), b, EV, CAT["electron"].mass)
        vis_err = max(vis_err, abs(out.visibility - rho.coherence))

    semigroup = 0.0
    for t1, t2 in ((1e-14, 2e-14), (5e-14, 5e-14), (1e-13, 3e-13)):
        semigroup = max(semigroup, abs(purity(decohere(decohere(pure, env, t1), env, t2)) - purity(decohere(pure, env, t1 + t2))))

    pre = ag_stern_gerlach()
    classical = classical_sg_ensemble(pre.field, pre.packet, n_samples=100_000, seed=12345, n_bins=100)
    filled = classical.weights[classical.weights > 0]
    interior_ratio = float(filled.min() / filled.mean())
    quantum = quantum_screen_image(pre.field, pre.packet, (0.5, 0.5))
    two_bands = len(quantum.band_centers) == 2 and sum(quantum.band_weights) >= 0.99
    runtime = time.perf_counter() - t0
    ok = bands_equal and vis_err <= 1e-15 and semigroup <= 1e-12 and interior_ratio >= 0.2 and two_bands
    detail = (f"bands-equal={bands_equal} visibility-err={vis_err:.1e} purity-semigroup={semigroup:.1e} "
              f"classical-min/mean={interior_ratio:.3f} quantum-two-band-weight={sum(quantum.band_weights):.5f}")
    assert acceptance(7, "decoherence is not classicality", ok, runtime, 5.0, detail)


def test_criterion_8_coherent_states(acceptance):
    t0 = time.perf_counter()
    m_e = CAT["electron"].mass
    s = CoherentState.with_std(3e-6, 0.0, 0.5e-6, m_e)
    period = 2 * math.pi / s.omega
    widths = [coherent_evolve(s, k * period / 4)[2] for k in range(41)]
    width_drift = max(abs(w / widths[0] - 1) for w in widths)
    oracle = harmonic_std_per_period(periods=10)
    oracle_drift = float(np.max(np.abs(oracle * math.sqrt(2) - 1)))

    q = quench(s, 0.3 * period)
    std0 = q.std
    t_double = brentq(lambda t: free_evolve(q, t).std - 2 * std0, 0.0, 1.0, xtol=1e-20, rtol=1e-14)
    electron_ratio = t_double / DOUBLING_TIME_REFERENCE["electron"]

    stone = quench(CoherentState.with_std(1e-3, 0.0, 0.5e-6, 1e-3), 0.0)
    stone_change = abs(free_evolve(stone, 1e6).std / stone.std - 1)
    runtime = time.perf_counter() - t0
    ok = width_drift <= 1e-12 and oracle_drift <= 1e-12 and 1 / 3 <= electron_ratio <= 3 and stone_change < 1e-6
    detail = (f"width-drift={width_drift:.1e} oracle-drift={oracle_drift:.1e} "
              f"electron t_d={t_double:.3e} s ({electron_ratio:.3g}x) 1g change={stone_change:.1e}")
    assert acceptance(8, "coherent states and quench", ok, runtime, 5.0, detail)
