import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import constants as sc

from oracles import ode_transmission, rectangle_closed_form
from quantum_ratio.errors import AboveBarrierError, DomainError
from quantum_ratio.tunneling import (
    WKB_LABEL,
    BarrierSpec,
    SplitTransverseSpec,
    forbidden_intervals,
    rectangle_transmission,
    transfer_matrix_transmission,
    tunnel_scenario,
    two_path_intensity,
    wkb_exponent,
    wkb_transmission,
)

M = sc.m_e
EV = sc.electron_volt
A = 1e-9

# ODE oracle for V = 2 eV (1 - (z/a)^2) on [-1 nm, 1 nm] at E = 1 eV.
PARABOLA_T_ODE = 1.0804455450255029e-05


def _kappa(v0, e):
    return math.sqrt(2 * M * (v0 - e)) / sc.hbar


def _rect_for_kw(kw, e=EV):
    return BarrierSpec.rectangle(2 * e, kw / _kappa(2 * e, e))


def _parabola():
    return BarrierSpec.smooth(lambda z: 2 * EV * (1 - (z / A) ** 2), A)


@pytest.mark.parametrize("kw", [0.5, 3.0, 10.0, 25.0])
@pytest.mark.parametrize("ratio", [0.1, 0.5, 0.9])
def test_rectangle_matches_closed_form(kw, ratio):
    v0 = 3 * EV
    e = ratio * v0
    w = kw / _kappa(v0, e)
    res = transfer_matrix_transmission(BarrierSpec.rectangle(v0, w), e, M)
    ref = rectangle_closed_form(v0, w, e, M)
    assert res.transmission == pytest.approx(ref, rel=1e-10)
    assert math.exp(rectangle_transmission(v0, w, e, M)) == pytest.approx(ref, rel=1e-10)
    assert res.transmission + res.reflection == pytest.approx(1.0, abs=1e-10)


def test_free_space_is_pure_phase():
    res = transfer_matrix_transmission(BarrierSpec(segments=((0.0, 1e-9, 0.0),)), EV, M)
    assert res.transmission == pytest.approx(1.0, abs=1e-12)
    assert abs(res.t_amplitude) == pytest.approx(1.0, abs=1e-12)
    assert res.reflection == pytest.approx(0.0, abs=1e-12)


def test_above_barrier_resonances():
    v0, w = EV, 2e-9
    # sin(k' w) = 0 at k' = n pi / w
    for n in (1, 2, 3):
        k2 = n * math.pi / w
        e = v0 + (sc.hbar * k2) ** 2 / (2 * M)
        res = transfer_matrix_transmission(BarrierSpec.rectangle(v0, w), e, M)
        assert res.transmission == pytest.approx(1.0, abs=1e-10)
    es = np.linspace(1.01, 3.0, 400) * v0
    ts = [transfer_matrix_transmission(BarrierSpec.rectangle(v0, w), e, M).transmission for e in es]
    assert min(ts) < 0.95 and max(ts) > 1 - 1e-4


@given(
    st.floats(min_value=0.01, max_value=0.99),
    st.floats(min_value=0.05, max_value=3.0),
    st.lists(st.tuples(st.floats(0.0, 0.5), st.floats(0.01, 0.5), st.floats(-1.0, 4.0)), min_size=1, max_size=6),
)
@settings(max_examples=60, deadline=None)
def test_unitarity(e_frac, scale, layers):
    segs, z = [], 0.0
    for gap, width, v in layers:
        z += gap * 1e-9
        segs.append((z, z + width * 1e-9, v * EV * scale))
        z += width * 1e-9
    b = BarrierSpec(segments=tuple(segs))
    e = e_frac * 3 * EV
    res = transfer_matrix_transmission(b, e, M)
    assert 0.0 < res.transmission <= 1.0 + 1e-10
    assert abs(res.transmission + res.reflection - 1.0) <= 1e-10


def test_opaque_barrier_log_representation():
    res = transfer_matrix_transmission(_rect_for_kw(800.0), EV, M)
    assert res.underflow and res.transmission == 0.0
    assert res.log_transmission == pytest.approx(rectangle_transmission(2 * EV, 800 / _kappa(2 * EV, EV), EV, M), rel=1e-12)
    assert res.log_transmission == pytest.approx(-1600.0 + math.log(4.0), abs=1e-9)


def test_wkb_rectangle_constant_integrand():
    b = _rect_for_kw(7.0)
    res = wkb_transmission(b, EV, M)
    assert res.method == WKB_LABEL
    assert res.log_transmission == pytest.approx(-14.0, rel=1e-12)
    assert res.transmission + res.reflection == pytest.approx(1.0)


def test_wkb_within_ten_percent_at_kw_10():
    b = _rect_for_kw(10.0)
    ln_wkb = wkb_transmission(b, EV, M).log_transmission
    ln_exact = transfer_matrix_transmission(b, EV, M).log_transmission
    assert abs(ln_wkb / ln_exact - 1) <= 0.10


def test_wkb_ladder_monotone():
    errs = []
    for kw in (3, 5, 10, 20):
        b = _rect_for_kw(kw)
        errs.append(abs(wkb_transmission(b, EV, M).log_transmission / transfer_matrix_transmission(b, EV, M).log_transmission - 1))
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[2] <= 0.10


def test_wkb_near_top_goes_to_one():
    b = _parabola()
    ts = [wkb_transmission(b, f * 2 * EV, M).transmission for f in (0.9, 0.99, 0.9999)]
    assert ts[0] < ts[1] < ts[2] and ts[2] > 0.99


def test_parabola_wkb_exponent_analytic():
    # exponent 2 int sqrt(2m(V0(1-z^2/a^2) - E)) / hbar = pi a sqrt(2m) (V0 - E) / (hbar sqrt(V0))
    v0, e = 2 * EV, EV
    expected = math.pi * A * math.sqrt(2 * M) * (v0 - e) / (sc.hbar * math.sqrt(v0))
    res = wkb_transmission(_parabola(), e, M)
    assert -res.log_transmission == pytest.approx(expected, rel=1e-10)
    ((z0, z1),) = res.turning_points
    assert z1 == pytest.approx(A / math.sqrt(2), abs=2 * A / 1e6)
    assert z0 == pytest.approx(-A / math.sqrt(2), abs=2 * A / 1e6)


def test_parabola_staircase_converges_to_ode():
    b = _parabola()
    errs = [abs(transfer_matrix_transmission(b.staircase(n), EV, M).transmission / PARABOLA_T_ODE - 1) for n in (200, 800, 3200)]
    assert errs[0] < 0.01
    assert errs[0] > errs[1] > errs[2]


def test_frozen_parabola_value_matches_oracle():
    t = ode_transmission(lambda z: 2 * EV * (1 - (z / A) ** 2), -A, A, EV, M)
    assert t == pytest.approx(PARABOLA_T_ODE, rel=1e-8)


@given(st.floats(0.2e-9, 2e-9), st.floats(1.01, 2.0))
def test_wkb_monotone_in_width(w, factor):
    t1 = wkb_transmission(BarrierSpec.rectangle(2 * EV, w), EV, M).log_transmission
    t2 = wkb_transmission(BarrierSpec.rectangle(2 * EV, w * factor), EV, M).log_transmission
    assert t2 < t1


@given(st.floats(1.1, 3.0), st.floats(1.01, 2.0))
def test_wkb_monotone_in_height(v, factor):
    t1 = wkb_transmission(BarrierSpec.rectangle(v * EV, 1e-9), EV, M).log_transmission
    t2 = wkb_transmission(BarrierSpec.rectangle(v * factor * EV, 1e-9), EV, M).log_transmission
    assert t2 < t1


def test_wkb_errors():
    b = _rect_for_kw(5.0)
    with pytest.raises(AboveBarrierError):
        wkb_transmission(b, 2 * EV, M)
    with pytest.raises(DomainError):
        wkb_transmission(b, 0.0, M)
    with pytest.raises(DomainError):
        wkb_transmission(b, EV, 0.0)


def test_barrier_validation():
    with pytest.raises(DomainError):
        BarrierSpec()
    with pytest.raises(DomainError):
        BarrierSpec(segments=((0.0, 2.0, 1.0), (1.0, 3.0, 1.0)))
    with pytest.raises(DomainError):
        BarrierSpec(segments=((1.0, 0.0, 1.0),))
    with pytest.raises(DomainError, match="staircase"):
        transfer_matrix_transmission(_parabola(), EV, M)
    with pytest.raises(DomainError):
        transfer_matrix_transmission(_rect_for_kw(3.0), 0.0, M)


def test_zero_width_segment_skipped():
    base = _rect_for_kw(4.0)
    (z0, z1, v), = base.segments
    with_empty = BarrierSpec(segments=((z0, z0, 9 * EV), (z0, z1, v)))
    assert transfer_matrix_transmission(with_empty, EV, M).transmission == pytest.approx(
        transfer_matrix_transmission(base, EV, M).transmission, rel=1e-12
    )


def test_forbidden_intervals_two_humps():
    def v(z):
        return 2 * EV * (math.exp(-((z - 2e-9) / 5e-10) ** 2) + math.exp(-((z + 2e-9) / 5e-10) ** 2))

    b = BarrierSpec.smooth(v, 5e-9)
    iv = forbidden_intervals(b, EV)
    assert len(iv) == 2
    total, _ = wkb_exponent(b, EV, M)
    assert total > 0


@pytest.mark.parametrize("gamma", [0.0, 0.5, 1.0])
def test_tunnel_scenario(gamma):
    c1, c2 = math.sqrt(0.3), math.sqrt(0.7) * np.exp(0.4j)
    split = SplitTransverseSpec(c1, c2, gamma=gamma)
    b = _rect_for_kw(5.0)
    out = tunnel_scenario(split, b, EV, M)
    t = transfer_matrix_transmission(b, EV, M).transmission
    assert out.transmission.transmission == t
    assert out.transmitted_weights == pytest.approx((0.3 * t, 0.7 * t))
    assert sum(out.transmitted_weights) + sum(out.reflected_weights) == pytest.approx(1.0, abs=1e-12)
    rho = out.transmitted_density
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
    assert abs(rho[0, 1]) == pytest.approx(gamma * math.sqrt(0.21), abs=1e-12)
    assert out.visibility == pytest.approx(gamma, abs=1e-12)
    if gamma == 1.0:
        np.testing.assert_allclose(rho, out.incident_density)


def test_tunnel_scenario_wkb_and_smooth():
    split = SplitTransverseSpec(1 / math.sqrt(2), 1 / math.sqrt(2))
    out = tunnel_scenario(split, _parabola(), EV, M)
    assert out.transmission.transmission == pytest.approx(PARABOLA_T_ODE, rel=0.01)
    wkb = tunnel_scenario(split, _parabola(), EV, M, method="wkb")
    assert wkb.transmission.method == WKB_LABEL
    with pytest.raises(DomainError):
        tunnel_scenario(split, _parabola(), EV, M, method="magic")


def test_tunnel_regime_flag():
    split = SplitTransverseSpec(1.0, 0.0)
    b = _rect_for_kw(3.0)
    spread = 1e-26
    bound = 2 * M * sc.hbar / spread**2
    assert tunnel_scenario(split, b, EV, M, momentum_spread=spread, transit_time=bound / 100).regime_flag["ok"]
    assert not tunnel_scenario(split, b, EV, M, momentum_spread=spread, transit_time=bound).regime_flag["ok"]


def test_split_validation_and_intensity():
    with pytest.raises(DomainError):
        SplitTransverseSpec(1.0, 1.0)
    with pytest.raises(DomainError):
        SplitTransverseSpec(1.0, 0.0, gamma=1.5)
    rho = SplitTransverseSpec(0.6, 0.8, gamma=0.4).density()
    i = two_path_intensity(rho, np.linspace(0, 2 * np.pi, 1001))
    assert (i.max() - i.min()) / (i.max() + i.min()) == pytest.approx(0.4, abs=1e-5)


def test_energy_equal_to_step_height():
    w = 1e-9
    res = transfer_matrix_transmission(BarrierSpec.rectangle(EV, w), EV, M)
    assert res.log_transmission == pytest.approx(rectangle_transmission(EV, w, EV, M), rel=1e-12)
    assert res.transmission + res.reflection == pytest.approx(1.0, abs=1e-14)
