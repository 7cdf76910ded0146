"""Filter cavity in the subtraction path and the purified heralded mode.

A single cavity of decay ``Gamma`` acts on the field as a causal low-pass
filter ``h(t) = Gamma exp(-Gamma t) u(t)``. Detecting a photon behind it
heralds a single photon in the mode ``N(h^R* * r)`` instead of ``N(r)``;
a filter narrower than the OPO raises the mode-matching rate toward one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import opo
from .opo import OpoParams
from .signals import (
    SQRT_2PI,
    ExpPoly,
    FunctionSignal,
    FREQUENCY,
    NEAR_RATE_TOL,
    Grid,
    IllConditionedError,
    Signal,
    SignalError,
    both_side_exp,
    causal_exp,
    conjugate,
    convolve,
    default_time_grid,
    fourier,
    frequency_grid_for,
    inverse_fourier,
    normalize,
    time_reverse,
)
from .wavepacket import mode_match

DEGENERACY_TOL = NEAR_RATE_TOL


class DegenerateRatesError(SignalError):
    """The explicit closed expressions need ``gamma != Gamma``."""


@dataclass(frozen=True)
class FilterParams:
    """Filter decay ``big_gamma``; ``order`` single-pole cavities in cascade."""

    big_gamma: float
    order: int = 1

    def __post_init__(self):
        if not self.big_gamma > 0:
            raise ValueError(f"big_gamma must be positive, got {self.big_gamma}")
        if self.order < 1:
            raise ValueError("order must be at least 1")


@dataclass(frozen=True)
class ModeMatchReport:
    gamma_rel_inv: float
    m_closed: float
    m_numeric: float
    discrepancy: float


def filter_response(f: FilterParams) -> ExpPoly:
    """Impulse response; unit area, causal. Cascades convolve single poles."""
    single = causal_exp(f.big_gamma, f.big_gamma)
    h = single
    for _ in range(f.order - 1):
        h = convolve(h, single)
    h.label = f"h(Gamma={f.big_gamma:g}, order={f.order})"
    return h


def transfer(f: FilterParams, omega):
    """Field transmission ``(Gamma / (Gamma - i w))^order``."""
    omega = np.asarray(omega, dtype=float)
    return (f.big_gamma / (f.big_gamma - 1j * omega)) ** f.order


def _detector_mode(f: FilterParams) -> ExpPoly:
    """``h^R*``: the kernel convolved onto ``r`` by filtered detection."""
    return conjugate(time_reverse(filter_response(f)))


def heralded_mode(p: OpoParams, f: FilterParams | None = None, weak_pump: bool = True,
                  grid: Grid | None = None) -> Signal:
    """Wavepacket of the heralded single photon.

    With ``weak_pump`` the mode is ``N(h^R* * r)`` for the weak-pump
    correlation (``N(r)`` without a filter), computed exactly. Otherwise
    the spectrum ``FT[h^R*](w) sinh r~(w)`` is inverted numerically on the
    time ``grid``; a closed-form weak-pump reference carries the slow
    spectral tail so only a fast-decaying remainder goes through the DFT.
    Filters with ``Gamma`` within a few percent of ``gamma`` also take the
    numerical route, with the reference built at ``Gamma = gamma``.
    """
    shape = both_side_exp(p.gamma)
    kernel = None if f is None else _detector_mode(f)
    if weak_pump or p.epsilon == 0:
        if kernel is None:
            return normalize(shape)
        try:
            return normalize(convolve(kernel, shape))
        except IllConditionedError:
            amplitude = 1.0
            modulation = shape.spectrum
    else:
        amplitude = p.epsilon * SQRT_2PI
        modulation = lambda w: np.sinh(opo.r_tilde(p, w))
    slow = p.gamma - p.epsilon
    if f is not None:
        slow = min(slow, f.big_gamma)
    if grid is None:
        grid = default_time_grid(slow)
    reference = both_side_exp(p.gamma, amplitude)
    if kernel is None:
        filt = lambda w: np.ones_like(w, dtype=complex)
    else:
        filt = lambda w: SQRT_2PI * kernel.spectrum(w)
        try:
            reference = convolve(kernel, reference)
        except IllConditionedError:
            near = _detector_mode(FilterParams(p.gamma, f.order))
            reference = convolve(near, reference)

    def target(w):
        return filt(w) * modulation(w)

    mode = inverse_fourier(FunctionSignal(FREQUENCY, target, "heralded spectrum"), grid,
                           reference=reference)
    return normalize(mode)


def _check_rates(gamma, big_gamma):
    if not (gamma > 0 and big_gamma > 0):
        raise ValueError("rates must be positive")
    if abs(gamma - big_gamma) / gamma <= DEGENERACY_TOL:
        raise DegenerateRatesError(
            "closed forms need gamma != Gamma; use heralded_mode / convolve for the degenerate case"
        )


def closed_hr_r(gamma: float, big_gamma: float) -> ExpPoly:
    """Normalized ``N(h^R * r)`` from the explicit piecewise formula."""
    _check_rates(gamma, big_gamma)
    g, G = gamma, big_gamma
    c = math.sqrt(g * G / (2 * g + G))
    neg = [((c * 2 * g / (g - G),), G), ((-c * (g + G) / (g - G),), g)]
    pos = [((c,), -g)]
    return ExpPoly(neg, pos, "N(h^R*r)")


def closed_hr_rr(gamma: float, big_gamma: float) -> ExpPoly:
    """Normalized ``N(h^R * r * r)`` from the explicit piecewise formula."""
    _check_rates(gamma, big_gamma)
    g, G = gamma, big_gamma
    scale = math.sqrt(2 * g**3 * G / (16 * g**3 + 29 * g**2 * G + 20 * g * G**2 + 5 * G**3))
    d = g - G
    neg = [
        ((scale * 4 * g**2 / d**2,), G),
        ((-scale * (2 * g - G) * (g + G) ** 2 / (g * d**2), scale * (g + G) ** 2 / d), g),
    ]
    pos = [((scale * (2 + G / g), scale * (g + G)), -g)]
    return ExpPoly(neg, pos, "N(h^R*r*r)")


def mode_match_filtered_closed(gamma_rel: float) -> float:
    """Closed-form ``M[h^R * r, r]`` against ``Gamma_rel = Gamma / gamma``."""
    x = gamma_rel
    if not x > 0:
        raise ValueError("Gamma_rel must be positive")
    return (8 + 9 * x + 3 * x * x) ** 2 / (2 * (2 + x) * (16 + 29 * x + 20 * x * x + 5 * x**3))


def mode_match_filtered_numeric(gamma: float, big_gamma: float, grid: Grid | None = None,
                                order: int = 1) -> float:
    """``M[h^R * r, r]`` by quadrature of sampled spectra.

    Independent of the closed form: the spectra of ``h^R`` and ``r`` are
    sampled on a frequency grid, multiplied, and the overlap integrals are
    taken with the trapezoid rule.
    """
    h = _detector_mode(FilterParams(big_gamma, order))
    r = both_side_exp(gamma)
    if grid is None:
        grid = frequency_grid_for(min(gamma, big_gamma), max(gamma, big_gamma))
    hs = fourier(h).sample(grid)
    rs = fourier(r).sample(grid)
    return mode_match(convolve(hs, rs), rs)


def filter_scan(p: OpoParams, inv_gamma_rel_list, grid: Grid | None = None) -> list[ModeMatchReport]:
    """Closed-form and numeric mode-matching rates along ``1 / Gamma_rel``."""
    out = []
    for inv in inv_gamma_rel_list:
        x = 1.0 / inv
        m_closed = mode_match_filtered_closed(x)
        m_num = mode_match_filtered_numeric(p.gamma, x * p.gamma, grid)
        out.append(ModeMatchReport(float(inv), m_closed, m_num, abs(m_closed - m_num)))
    return out
