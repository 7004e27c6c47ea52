import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quantum_ratio import (
    CONSTANTS,
    Catalog,
    Regime,
    Thresholds,
    classify,
    de_broglie_wavelength,
    default_catalog,
    load_catalog,
    nucleus_size,
    quantum_ratio,
)
from quantum_ratio.core import AMU, LENGTH_UNITS, MASS_UNITS, MEV_C2, PhysicalConstants, parse_catalog, parse_quantity
from quantum_ratio.errors import CatalogError, ConfigError, DomainError

positive = st.floats(min_value=1e-20, max_value=1e20, allow_nan=False, allow_infinity=False)


def test_constants_consistent():
    assert math.isclose(CONSTANTS.h, 2 * math.pi * CONSTANTS.hbar, rel_tol=1e-12)
    for v in (CONSTANTS.hbar, CONSTANTS.electron_mass, CONSTANTS.amu, CONSTANTS.bohr_magneton, CONSTANTS.c):
        assert v > 0


def test_constants_reject_inconsistent_h():
    with pytest.raises(ValueError):
        PhysicalConstants(1.0, 7.0, 1.0, 1.0, 1.0, 1.0)


def test_ag_quantum_ratio():
    qr = quantum_ratio(0.2e-3, 1.44e-10)
    assert math.isclose(qr.q, 1.3888888888888889e6, rel_tol=1e-12)
    assert classify(qr).regime is Regime.QUANTUM


def test_elementary_is_infinite():
    qr = quantum_ratio(1e-9, 0.0)
    assert qr.infinite and qr.q == math.inf
    assert qr.as_dict()["q"] is None and qr.as_dict()["q_infinite"]
    assert classify(qr).regime is Regime.QUANTUM


def test_unit_ratio_and_boundary():
    qr = quantum_ratio(1e-6, 1e-6)
    assert qr.q == 1.0
    assert classify(qr, Thresholds(10, 1)).regime is Regime.CLASSICAL
    assert classify(quantum_ratio(3.0, 1.0)).regime is Regime.BORDERLINE


def test_tie_thresholds_resolve_to_quantum():
    assert classify(quantum_ratio(5.0, 1.0), Thresholds(5, 5)).regime is Regime.QUANTUM


@pytest.mark.parametrize("r, l", [(0.0, 1.0), (-1.0, 1.0), (1.0, -1e-10), (math.inf, 1.0)])
def test_quantum_ratio_domain(r, l):
    with pytest.raises(DomainError):
        quantum_ratio(r, l)


def test_inverted_thresholds():
    with pytest.raises(ConfigError):
        Thresholds(hi=1, lo=10)


def test_nucleus_size():
    assert nucleus_size(1) == pytest.approx(1e-15, rel=1e-15)
    assert nucleus_size(27) == pytest.approx(3e-15, rel=1e-12)
    assert nucleus_size(4) == pytest.approx(1.5874010519681994e-15, rel=1e-12)
    with pytest.raises(DomainError):
        nucleus_size(0)


def test_de_broglie():
    assert de_broglie_wavelength(23 * AMU, 1000.0) == pytest.approx(1.73e-11, rel=3e-3)
    assert de_broglie_wavelength(840 * AMU, 100.0) == pytest.approx(4.75e-12, rel=1e-3)
    assert de_broglie_wavelength(AMU, 2.0) == pytest.approx(0.5 * de_broglie_wavelength(AMU, 1.0), rel=1e-15)
    with pytest.raises(DomainError):
        de_broglie_wavelength(0.0, 1.0)


def test_default_catalog_entries():
    cat = default_catalog()
    e = cat["electron"]
    assert e.mass == pytest.approx(0.51099895 * MEV_C2, rel=1e-12) and e.size_l0 == 0 and e.elementary
    ag = cat["Ag"]
    assert ag.mass == pytest.approx(108 * AMU) and ag.size_l0 == pytest.approx(1.44e-10)
    assert "nope" not in cat
    with pytest.raises(KeyError):
        cat["nope"]


def test_catalog_elementary_always_quantum():
    for p in default_catalog():
        if p.size_l0 == 0:
            assert classify(quantum_ratio(1e-30, p.size_l0)).regime is Regime.QUANTUM


def test_reference_quantum_ratio_orders_of_magnitude():
    cat = default_catalog()
    for name in ("Ag", "Na", "C70", "C70_hot"):
        p = cat[name]
        qr = quantum_ratio(p.r_q, p.size_l0)
        assert abs(qr.log10() - math.log10(p.q_reference)) <= 0.5, name


def test_empty_catalog(tmp_path):
    f = tmp_path / "empty.ini"
    f.write_text("")
    assert load_catalog(f) == []


def test_catalog_errors_name_entry(tmp_path):
    with pytest.raises(CatalogError, match="bad"):
        parse_catalog("[bad]\nmass = -1 kg\nsize_l0 = 0 m\n")
    with pytest.raises(CatalogError, match="odd"):
        parse_catalog("[odd]\nmass = 1 kg\nsize_l0 = 0 m\ncolour = red\n")
    with pytest.raises(CatalogError, match="half"):
        parse_catalog("[half]\nmass = 1 kg\n")
    with pytest.raises(CatalogError):
        load_catalog(tmp_path / "missing.ini")


def test_catalog_units():
    (p,) = parse_catalog("[x]\nmass = 2 g\nsize_l0 = 3 fm\nmagnetic_moment = 1 mu_B\nspin = 0.5\n")
    assert p.mass == pytest.approx(2e-3) and p.size_l0 == pytest.approx(3e-15)
    assert Catalog((p,)).names() == ["x"]


def test_parse_quantity():
    assert parse_quantity("1.44 A", LENGTH_UNITS) == pytest.approx(1.44e-10)
    assert parse_quantity("1e-3", LENGTH_UNITS, "m") == 1e-3
    assert parse_quantity("2.5e2amu", MASS_UNITS) == pytest.approx(250 * AMU)
    with pytest.raises(ValueError):
        parse_quantity("3", LENGTH_UNITS)
    with pytest.raises(ValueError):
        parse_quantity("3 parsec", LENGTH_UNITS)


@given(positive, positive, st.floats(min_value=1e-6, max_value=1e6))
def test_scale_covariance(r, l, lam):
    q1 = quantum_ratio(r, l).q
    q2 = quantum_ratio(r * lam, l * lam).q
    assert math.isclose(q1, q2, rel_tol=1e-12)


_ORDER = {Regime.CLASSICAL: 0, Regime.BORDERLINE: 1, Regime.QUANTUM: 2}


@given(positive, positive, st.floats(min_value=1.0, max_value=1e6))
def test_classification_monotone_in_r(r, l, factor):
    a = classify(quantum_ratio(r, l)).regime
    b = classify(quantum_ratio(r * factor, l)).regime
    assert _ORDER[b] >= _ORDER[a]
