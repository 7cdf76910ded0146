import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from catfilter import opo
from catfilter.opo import OpoParams
from catfilter.signals import both_side_exp, causal_exp, default_time_grid, inner_product, norm, normalize

pumps = st.floats(0.0, 0.95)
omegas = st.floats(-100.0, 100.0)


def test_params_validation():
    with pytest.raises(ValueError):
        OpoParams(1.0, 1.0)
    with pytest.raises(ValueError):
        OpoParams(1.0, -0.1)
    with pytest.raises(ValueError):
        OpoParams(0.0, 0.0)
    assert OpoParams(2.0, 0.5).ratio == 0.25


def test_antisqueezing_at_dc():
    p = OpoParams(1.0, 0.3)
    assert opo.v_plus(p, 0.0) == pytest.approx((1.3 / 0.7) ** 2, rel=1e-14)
    assert opo.v_plus(p, 0.0) == pytest.approx(3.44898, abs=1e-5)


def test_no_pump_is_vacuum():
    p = OpoParams(1.0, 0.0)
    w = np.linspace(-5, 5, 11)
    assert np.all(opo.v_plus(p, w) == 1) and np.all(opo.r_tilde(p, w) == 0)


@given(pumps, omegas)
def test_spectra_properties(ratio, w):
    p = OpoParams(1.0, ratio)
    assert opo.v_plus(p, w) * opo.v_minus(p, w) == pytest.approx(1.0, abs=1e-12)
    assert opo.v_plus(p, w) >= 1.0 >= opo.v_minus(p, w)
    assert opo.r_tilde(p, w) == pytest.approx(0.5 * math.log(opo.v_plus(p, w)), abs=1e-12)
    assert opo.r_tilde(p, w) == opo.r_tilde(p, -w)
    assert opo.phase(p, w) == pytest.approx(-opo.phase(p, -w), abs=1e-12)


def test_phase_is_zero_at_dc():
    assert opo.phase(OpoParams(1.0, 0.5), 0.0) == 0.0


def test_spectrum_point():
    pt = opo.spectrum(OpoParams(1.0, 0.3), 0.0)
    assert pt.v_plus == pytest.approx(3.448979591836735)
    assert pt.r_tilde == pytest.approx(math.log(1.3 / 0.7))


def test_weak_pump_correlation_is_first_order_spectrum():
    p = OpoParams(1.0, 1e-4)
    w = np.linspace(-10, 10, 21)
    # r~ ~ 2 g e / (g^2 + w^2) to first order in e
    assert np.allclose(opo.correlation_weak_pump(p).spectrum(w).real, opo.r_tilde(p, w), rtol=2e-4)


@pytest.mark.parametrize("eps", [0.03, 0.3, 0.7])
def test_numeric_correlation_matches_frullani(eps):
    p = OpoParams(1.0, eps)
    r = opo.correlation_time(p)
    exact = opo.correlation_exact(p)
    scale = math.sqrt(2 * quad(lambda t: exact(np.array([t]))[0].real ** 2, 0, np.inf, limit=400)[0])
    t = r.grid.points
    mid = np.abs(t) < 10
    assert np.max(np.abs(r.values - exact(t).real / scale)[mid]) < 1e-8


@pytest.mark.parametrize("eps", [0.3, 0.7])
def test_correlation_is_even_and_normalized(eps):
    r = opo.correlation_time(OpoParams(1.0, eps))
    assert np.max(np.abs(r.values - r.values[::-1])) < 1e-12
    assert norm(r) == pytest.approx(1.0, abs=1e-5)


def test_correlation_limits():
    grid = default_time_grid(1.0)
    shape = normalize(both_side_exp(1.0)).sample(grid)
    assert np.max(np.abs(opo.correlation_time(OpoParams(1.0, 0.0), grid).values - shape.values)) == 0
    small = opo.correlation_time(OpoParams(1.0, 1e-3), grid)
    assert np.max(np.abs(small.values - shape.values)) < 1e-6


def test_strong_pump_correlation_stays_close_to_exponential():
    r = opo.correlation_time(OpoParams(1.0, 0.7))
    shape = normalize(both_side_exp(1.0)).sample(r.grid)
    assert abs(inner_product(shape, r)) ** 2 >= 0.97


def test_frullani_value_at_origin():
    p = OpoParams(1.0, 0.3)
    assert opo.correlation_exact(p)(np.array([0.0]))[0] == pytest.approx(0.6 * math.sqrt(math.pi / 2), rel=1e-12)
    assert opo.correlation_norm(p) == pytest.approx(
        math.sqrt(2 * quad(lambda w: opo.r_tilde(p, w) ** 2, 0, np.inf)[0]), rel=1e-9)


def test_correlation_from_decays():
    lam = causal_exp(2.0)
    r = opo.correlation_from_decays(lam, lam)
    t = np.array([-1.0, 0.0, 0.5])
    assert np.allclose(r(t), np.exp(-2 * np.abs(t)) / 4, atol=1e-15)
