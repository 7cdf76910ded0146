"""Dual-route and invariant checks run by ``catfilter verify``.

Every check compares two independent routes to the same number (closed
form against quadrature, exact convolution against FFT, two simulator
routes) or tests a structural invariant. Each reports a value and the
tolerance it was judged against; ``tolerance_scale`` multiplies every
tolerance, so a scale of 0 turns the suite into a self-test of the
failure path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import fock, opo
from .filters import (
    FilterParams,
    closed_hr_r,
    closed_hr_rr,
    filter_response,
    heralded_mode,
    mode_match_filtered_closed,
    mode_match_filtered_numeric,
)
from .opo import OpoParams
from .signals import (
    both_side_exp,
    causal_exp,
    convolve,
    default_time_grid,
    fourier,
    inner_product,
    norm,
    normalize,
    time_reverse,
)
from .wavepacket import (
    equivalent_loss,
    lorentz_wavepacket,
    mode_match,
    pair_mode_ladder,
    wavepacket_variances,
    weak_pump_loss,
)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.name}: value={self.value:.6e} tol={self.tolerance:.1e}"


class _Suite:
    def __init__(self, scale: float):
        self.scale = scale
        self.checks: list[Check] = []

    def at_most(self, name, value, tol):
        """Passes when ``value <= tol`` (deviations, distances)."""
        t = tol * self.scale
        self.checks.append(Check(name, float(value), t, bool(value <= t)))

    def near(self, name, value, target, tol):
        self.at_most(name, abs(value - target), tol)


def _opo_checks(s: _Suite, gamma: float, epsilons):
    omega = np.linspace(-20 * gamma, 20 * gamma, 1000)
    for eps in epsilons:
        p = OpoParams(gamma, eps)
        tag = f"eps={eps:g}"
        s.at_most(f"spectrum {tag}: max |V+ V- - 1|", np.max(np.abs(opo.v_plus(p, omega) * opo.v_minus(p, omega) - 1)), 1e-12)
        closed_db = 20 * math.log10((gamma + eps) / (gamma - eps))
        s.near(f"spectrum {tag}: dB at w=0 vs ratio form", float(opo.squeezing_db(p)), closed_db, 1e-12)
        if eps == 0:
            continue
        r = opo.correlation_time(p)
        t = r.grid.points
        mid = np.abs(t) < 10 / gamma
        exact = opo.correlation_exact(p)
        scale = math.sqrt(2 * quad(lambda x: exact(np.array([x]))[0].real ** 2, 0, np.inf, epsrel=1e-13, limit=400)[0])
        s.at_most(f"correlation {tag}: max dev from Frullani form", np.max(np.abs(r.values - exact(t).real / scale)[mid]), 1e-8)
        s.at_most(f"correlation {tag}: evenness", np.max(np.abs(r.values - r.values[::-1])), 1e-12)


def _wavepacket_checks(s: _Suite, gamma: float, epsilons, gamma_rel_list):
    r = both_side_exp(gamma)
    g = normalize(r)
    s.near("bare mode match (exact engine) vs 9/10", mode_match(g, r), 0.9, 1e-12)
    grid = default_time_grid(gamma)
    s.near("bare mode match (FFT route) vs 9/10", mode_match(g.sample(grid), r.sample(grid)), 0.9, 1e-6)
    ladder = pair_mode_ladder(g, r, depth=3)
    s.near("ladder head ratio vs mode match", ladder.head_ratio(), 0.9, 1e-12)

    g1 = lorentz_wavepacket(1.0, gamma)
    s.near("weak-pump loss at gamma_rel=1 vs 1/10", weak_pump_loss(g1, OpoParams(gamma, 0.01 * gamma)), 0.1, 1e-3)

    curves = []
    worst_cs = 0.0
    for eps in epsilons:
        p = OpoParams(gamma, eps)
        if eps == 0:
            continue
        row = []
        for gr in gamma_rel_list:
            v = wavepacket_variances(lorentz_wavepacket(gr, gamma), p)
            worst_cs = max(worst_cs, 1.0 - v.product)
            row.append(equivalent_loss(v))
        curves.append(row)
    s.at_most("Cauchy-Schwarz: max (1 - V+ V-)", worst_cs, 1e-10)
    if len(curves) > 1:
        arr = np.array(curves, dtype=float)
        s.at_most("equivalent loss: pairwise spread across pumps", float(np.max(arr.max(0) - arr.min(0))), 1e-2)


def _filter_checks(s: _Suite, gamma: float, big_gamma: float, inv_list):
    s.near("filtered M closed form at Gamma_rel=1e-4 vs 1", mode_match_filtered_closed(1e-4), 1.0, 1e-3)
    s.near("filtered M closed form at Gamma_rel=1e4 vs 9/10", mode_match_filtered_closed(1e4), 0.9, 1e-3)
    xs = np.logspace(-4, 4, 50)
    m = np.array([mode_match_filtered_closed(x) for x in xs])
    s.at_most("filtered M strictly decreasing: max step", float(np.max(np.diff(m))), 0.0)
    worst = max(abs(mode_match_filtered_closed(1 / inv) - mode_match_filtered_numeric(gamma, gamma / inv))
                for inv in inv_list)
    s.at_most("filtered M: closed form vs spectral quadrature", worst, 1e-6)

    f = FilterParams(big_gamma)
    r = both_side_exp(gamma)
    hr = closed_hr_r(gamma, big_gamma)
    hrr = closed_hr_rr(gamma, big_gamma)
    engine_hr = normalize(heralded_mode(OpoParams(gamma, 0.0), f))
    engine_hrr = normalize(convolve(engine_hr, r))
    s.at_most("N(h^R*r): closed form vs exact convolution", 1 - abs(inner_product(hr, engine_hr)) ** 2, 1e-12)
    s.at_most("N(h^R*r*r): closed form vs exact convolution", 1 - abs(inner_product(hrr, engine_hrr)) ** 2, 1e-12)
    s.at_most("N(h^R*r): continuity at t=0", abs(hr.left_limit() - hr.right_limit()), 1e-9)
    s.at_most("N(h^R*r*r): continuity at t=0", abs(hrr.left_limit() - hrr.right_limit()), 1e-9)
    s.near("closed modes: overlap^2 vs M formula", abs(inner_product(hr, hrr)) ** 2,
           mode_match_filtered_closed(big_gamma / gamma), 1e-10)
    s.near("filter response: unit area", float(filter_response(f).spectrum(0.0).real * math.sqrt(2 * math.pi)), 1.0, 1e-12)


def _signal_checks(s: _Suite, gamma: float):
    grid = default_time_grid(gamma)
    g = lorentz_wavepacket(1.0, gamma).sample(grid)
    s.near("Parseval (DFT of sampled wavepacket)", norm(fourier(g)), norm(g), 1e-8)
    a, b = both_side_exp(gamma), causal_exp(2 * gamma, 1 + 1j)
    lhs = time_reverse(convolve(a, b))
    rhs = convolve(time_reverse(a), time_reverse(b))
    s.at_most("time reversal of a convolution", norm(lhs - rhs), 1e-12)
    fft = convolve(a.sample(grid), b.sample(grid))
    s.at_most("convolution: exact vs FFT (max abs)", np.max(np.abs(fft.values - convolve(a, b).sample(grid).values)), 1e-6)


def _fock_checks(s: _Suite, cutoff: int):
    s.at_most("squeezed single photon: 1 - fidelity", 1 - fock.squeezed_single_photon_check(0.5, cutoff), 1e-8)
    psi = fock.squeezed_vacuum(0.3, cutoff)
    s.at_most("loss commutes with subtraction", fock.loss_commutation_check(psi, 0.2), 1e-9)
    p30, p21 = fock.pair_apply_ratio_check(1.0, 1.0)
    s.near("pair operator on |1,0>: p30/p21 vs 3/4", p30 / p21, 0.75, 1e-10)
    b = fock.apply_beamsplitter(fock.number_state((1, 0), 3), (0, 1), 0.3)
    s.near("beamsplitter |1,0> reflected amplitude", b.amplitude(0, 1).real, math.sqrt(0.3), 1e-12)
    sv = fock.squeezed_vacuum(0.5, cutoff)
    s.near("<0|S(0.5)|0> vs cosh^(-1/2)", sv.amplitude(0).real, 1 / math.sqrt(math.cosh(0.5)), 1e-10)
    inf = [fock.tap_infidelity(sv, R) for R in (1e-2, 1e-3, 1e-4)]
    s.at_most("tap infidelity decreasing in R: max step", max(inf[1] - inf[0], inf[2] - inf[1]), 0.0)


def run_checks(gamma: float = 1.0, epsilons=(0.03, 0.3, 0.7), big_gamma: float = 0.4,
               cutoff: int = fock.DEFAULT_CUTOFF, inv_gamma_rel=(0.05, 0.1, 0.5, 1.0, 2.5, 10.0),
               gamma_rel_list=None, tolerance_scale: float = 1.0) -> list[Check]:
    """Run the full suite and return every check, passed or not."""
    s = _Suite(tolerance_scale)
    if gamma_rel_list is None:
        gamma_rel_list = np.logspace(-2, 2, 20)
    _opo_checks(s, gamma, epsilons)
    _wavepacket_checks(s, gamma, epsilons, gamma_rel_list)
    _filter_checks(s, gamma, big_gamma, inv_gamma_rel)
    _signal_checks(s, gamma)
    _fock_checks(s, cutoff)
    return s.checks
