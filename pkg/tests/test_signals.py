import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.integrate import quad

from catfilter.signals import (
    FREQUENCY,
    NEAR_RATE_TOL,
    TIME,
    DeltaLike,
    ExpPoly,
    FunctionSignal,
    Grid,
    GridError,
    IllConditionedError,
    Sampled,
    SignalError,
    ZeroNormError,
    anticausal_exp,
    both_side_exp,
    causal_exp,
    conjugate,
    converged,
    convolve,
    default_time_grid,
    fourier,
    frequency_grid_for,
    gram_schmidt_step,
    inner_product,
    inverse_fourier,
    lorentzian,
    norm,
    normalize,
    time_reverse,
    zero_signal,
)

rates = st.floats(0.2, 5.0)
amps = st.complex_numbers(min_magnitude=0.1, max_magnitude=5.0)


def quad_complex(func, a, b, points=None):
    re = quad(lambda x: func(x).real, a, b, points=points, limit=400, epsabs=1e-13)[0]
    im = quad(lambda x: func(x).imag, a, b, points=points, limit=400, epsabs=1e-13)[0]
    return re + 1j * im


def separated(a, b):
    """Rates the exact engine accepts: equal, or outside the ill-conditioned band."""
    return a == b or abs(a - b) > NEAR_RATE_TOL * max(a, b)


def scalar(f):
    return lambda x: complex(f(np.array([x]))[0])


# ---------------------------------------------------------------- grids


def test_grid_basics():
    g = Grid.symmetric(10.0, 21)
    assert g.step == 1.0
    assert g.is_symmetric
    assert g.zero_index() == 10
    assert g.points[0] == -10.0 and g.stop == 10.0
    assert g.refined().count == 41 and g.refined().step == 0.5


def test_grid_rejects_bad_input():
    with pytest.raises(GridError):
        Grid(0.0, 0.0, 5)
    with pytest.raises(GridError):
        Grid(0.0, 1.0, 1)
    with pytest.raises(GridError):
        Grid.symmetric(1.0, 10)
    with pytest.raises(GridError):
        Grid(0.5, 1.0, 4).zero_index()


def test_conjugate_grid_is_reciprocal():
    g = default_time_grid(1.0, count=1025)
    c = g.conjugate()
    assert c.step * g.step * g.count == pytest.approx(2 * math.pi)
    assert c.conjugate().same_as(g)


def test_frequency_grid_for_covers_span():
    g = frequency_grid_for(0.5, 2.0, span_factor=100.0)
    assert g.step == pytest.approx(0.5 / 6)
    assert g.stop >= 200.0 and g.is_symmetric


# ---------------------------------------------------------------- ExpPoly


def test_call_and_limits():
    f = ExpPoly([((2.0,), 1.0)], [((1.0, 1.0), -3.0)])
    assert f(np.array([-1.0]))[0] == pytest.approx(2 * math.exp(-1))
    assert f(np.array([1.0]))[0] == pytest.approx(2 * math.exp(-3))
    assert f.left_limit() == 2.0 and f.right_limit() == 1.0


def test_sample_puts_jump_midpoint_at_zero():
    s = causal_exp(1.0).sample(Grid.symmetric(1.0, 5))
    assert s.values[2] == pytest.approx(0.5)


def test_terms_with_equal_rates_merge():
    f = ExpPoly([], [((1.0,), -1.0), ((2.0,), -1.0)])
    assert len(f.pos) == 1 and f.pos[0].poly == (3.0,)
    assert (f - f).is_zero


@given(rates, amps)
def test_inner_product_matches_quadrature(rate, amp):
    f = both_side_exp(rate, amp) + causal_exp(2 * rate)
    g = ExpPoly([((1.0, -0.5), 1.5 * rate)], [((0.3,), -0.7 * rate)])
    exact = inner_product(f, g)
    oracle = quad_complex(lambda t: np.conj(scalar(f)(t)) * scalar(g)(t), -np.inf, 0) + \
        quad_complex(lambda t: np.conj(scalar(f)(t)) * scalar(g)(t), 0, np.inf)
    assert exact == pytest.approx(oracle, rel=1e-8, abs=1e-10)


def test_norm_of_both_side_exp():
    # int e^{-2 g |t|} dt = 1 / g
    assert norm(both_side_exp(2.0)) == pytest.approx(math.sqrt(0.5), abs=1e-14)


@pytest.mark.parametrize("t", [-3.0, -0.4, 0.0, 0.25, 2.0])
def test_convolution_matches_quadrature(t):
    f = causal_exp(1.0, 1 + 1j)
    g = ExpPoly([((1.0, 2.0), 2.5)], [((0.5,), -0.6)])
    exact = convolve(f, g)(np.array([t]))[0]
    fs, gs = scalar(f), scalar(g)
    oracle = quad_complex(lambda tau: fs(tau) * gs(t - tau), 0, np.inf, points=None) if t <= 0 else \
        quad_complex(lambda tau: fs(tau) * gs(t - tau), 0, t) + quad_complex(lambda tau: fs(tau) * gs(t - tau), t, np.inf)
    assert exact == pytest.approx(oracle, rel=1e-9, abs=1e-12)


def test_convolution_of_equal_rates_gives_polynomial_term():
    # (e^{-t}u) * (e^{-t}u) = t e^{-t} u
    c = convolve(causal_exp(1.0), causal_exp(1.0))
    t = np.array([0.5, 2.0])
    assert np.allclose(c(t), t * np.exp(-t), atol=1e-15)


def test_near_coincident_rates_raise():
    with pytest.raises(IllConditionedError):
        convolve(causal_exp(1.0), causal_exp(1.001))


@given(rates, rates)
def test_exact_spectrum_matches_quadrature(a, b):
    f = ExpPoly([((1.0,), a)], [((0.5, 1.0), -b)])
    for w in (0.0, 0.7, -2.0):
        fs = scalar(f)
        oracle = (quad_complex(lambda t: fs(t) * np.exp(1j * w * t), -np.inf, 0)
                  + quad_complex(lambda t: fs(t) * np.exp(1j * w * t), 0, np.inf)) / math.sqrt(2 * math.pi)
        assert f.spectrum(w) == pytest.approx(oracle, rel=1e-8, abs=1e-10)


def test_lorentzian_shape():
    w = np.array([0.0, 1.0, 3.0])
    expected = math.sqrt(2 / math.pi) * 2.0 / (4.0 + w**2)
    assert np.allclose(lorentzian(2.0)(w).real, expected, atol=1e-15)


# ---------------------------------------------------------------- laws


@given(rates, rates, amps)
def test_conjugation_and_reversal_laws(a, b, c):
    f = causal_exp(a, c) + anticausal_exp(b)
    assert norm(conjugate(conjugate(f)) - f) == 0
    assert norm(time_reverse(time_reverse(f)) - f) == 0
    assert norm(normalize(f)) == pytest.approx(1.0, abs=1e-12)
    assert inner_product(f, f).real == pytest.approx(norm(f) ** 2, rel=1e-12)


@given(rates, rates, amps)
def test_convolution_commutes_and_has_delta_identity(a, b, c):
    assume(separated(a, b))
    f, g = causal_exp(a, c), both_side_exp(b)
    scale = norm(convolve(f, g))
    assert norm(convolve(f, g) - convolve(g, f)) <= 1e-10 * scale
    assert norm(convolve(DeltaLike(), f) - f) == 0


@given(rates, rates)
def test_cauchy_schwarz(a, b):
    f, g = causal_exp(a, 1j), both_side_exp(b)
    assert abs(inner_product(f, g)) <= norm(f) * norm(g) * (1 + 1e-12)


def test_zero_norm_raises():
    with pytest.raises(ZeroNormError):
        normalize(zero_signal())


def test_delta_is_not_square_integrable():
    with pytest.raises(SignalError):
        inner_product(DeltaLike(), DeltaLike())
    with pytest.raises(SignalError):
        DeltaLike().sample(Grid.symmetric(1.0, 3))


def test_domain_mismatch():
    spec = FunctionSignal(FREQUENCY, lambda w: np.ones_like(w))
    with pytest.raises(SignalError):
        convolve(both_side_exp(1.0), spec)


# ---------------------------------------------------------------- sampled routes


def test_fft_convolution_matches_exact():
    grid = default_time_grid(1.0)
    a, b = both_side_exp(1.0), causal_exp(2.0, 1 + 1j)
    fft = convolve(a.sample(grid), b.sample(grid))
    exact = convolve(a, b).sample(grid)
    assert np.max(np.abs(fft.values - exact.values)) < 1e-6


def test_fft_convolution_spill_raises():
    grid = Grid.symmetric(3.0, 601)
    s = both_side_exp(0.5).sample(grid)
    with pytest.raises(GridError, match="widen"):
        convolve(s, s)


def test_fourier_of_samples_matches_exact_spectrum():
    grid = default_time_grid(1.0)
    f = both_side_exp(1.0) + both_side_exp(3.0, 0.5j)
    spec = fourier(f.sample(grid))
    w = spec.grid.points
    mid = np.abs(w) < 30
    assert np.max(np.abs(spec.values - f.spectrum(w))[mid]) < 1e-6


def test_inverse_fourier_roundtrip_with_reference():
    f = both_side_exp(1.0)
    grid = default_time_grid(1.0, count=2**14 + 1)
    spec = FunctionSignal(FREQUENCY, f.spectrum)
    back = inverse_fourier(spec, grid, reference=both_side_exp(1.0))
    assert np.max(np.abs(back.values - f.sample(grid).values)) < 1e-12
    # without the reference the 1/w^2 tail is visible at the span edge
    with pytest.raises(GridError):
        inverse_fourier(spec, Grid.symmetric(40.0, 257))


def test_inverse_fourier_of_spectrum_is_exact():
    f = causal_exp(1.0)
    assert inverse_fourier(fourier(f)) is f


def test_parseval_on_samples():
    grid = default_time_grid(0.7)
    f = (both_side_exp(0.7) + both_side_exp(2.0, -0.3j)).sample(grid)
    assert norm(fourier(f)) == pytest.approx(norm(f), abs=1e-10)


def test_frequency_convolution_is_spectral_product():
    a, b = both_side_exp(1.0), both_side_exp(2.0)
    grid = frequency_grid_for(1.0, 2.0, span_factor=50)
    prod = convolve(fourier(a).sample(grid), fourier(b).sample(grid))
    assert np.allclose(prod.values, convolve(a, b).spectrum(grid.points), atol=1e-14)


def test_sampled_arithmetic_requires_same_grid():
    a = both_side_exp(1.0).sample(Grid.symmetric(5.0, 11))
    b = both_side_exp(1.0).sample(Grid.symmetric(5.0, 21))
    with pytest.raises(GridError):
        a + b
    with pytest.raises(GridError):
        Sampled(TIME, Grid.symmetric(1.0, 3), np.zeros(4))


# ---------------------------------------------------------------- Gram-Schmidt and convergence


def test_gram_schmidt_step_decomposes():
    g = normalize(both_side_exp(1.0))
    v = convolve(g, both_side_exp(1.0))
    res = gram_schmidt_step(g, v)
    assert abs(res.parallel) ** 2 == pytest.approx(0.9, abs=1e-12)
    assert abs(inner_product(g, res.orthogonal)) < 1e-12
    assert norm(res.orthogonal) == pytest.approx(1.0, abs=1e-12)


def test_gram_schmidt_parallel_is_degenerate():
    g = normalize(both_side_exp(1.0))
    res = gram_schmidt_step(g, g * 3.0)
    assert res.degenerate and res.orthogonal is None


def test_converged_detects_a_coarse_grid():
    f = both_side_exp(1.0)
    value, change = converged(lambda gr: norm(f.sample(gr)), Grid.symmetric(40.0, 2**16 + 1), tol=1e-6)
    assert value == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(GridError):
        converged(lambda gr: norm(f.sample(gr)), Grid.symmetric(40.0, 101), tol=1e-8)
