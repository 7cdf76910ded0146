"""Squeezing seen through a single wavepacket mode.

Quadrature variances of a wavepacket, the equivalent-loss measure of their
asymmetry, the mode-matching rate of a pair-creation kernel with respect
to a wavepacket, and the Gram-Schmidt ladder of modes that the pair
operator couples together.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from . import opo
from .opo import OpoParams
from .signals import (
    TIME,
    DeltaLike,
    ExpPoly,
    Grid,
    IllConditionedError,
    Sampled,
    Signal,
    SignalError,
    ZeroNormError,
    conjugate,
    convolve,
    default_time_grid,
    fourier,
    frequency_grid_for,
    inner_product,
    norm,
    normalize,
)

REAL_TOL = 1e-9
NORM_TOL = 1e-9
WEIGHT_TOL = 1e-6


@dataclass(frozen=True)
class WavepacketVariances:
    """``V_g^(+)`` and ``V_g^(-)``, in units where the vacuum gives 1."""

    v_plus_g: float
    v_minus_g: float

    @property
    def product(self) -> float:
        return self.v_plus_g * self.v_minus_g


def lorentz_wavepacket(gamma_rel: float, gamma: float = 1.0) -> ExpPoly:
    """Normalized ``sqrt(k) exp(-k |t|)`` with ``k = gamma_rel * gamma``."""
    if not (gamma_rel > 0 and gamma > 0):
        raise ValueError("gamma_rel and gamma must be positive")
    k = gamma_rel * gamma
    return ExpPoly([((math.sqrt(k),), k)], [((math.sqrt(k),), -k)], f"Lorentz({gamma_rel:g})")


def _check_real(g: Signal):
    s = g.sample(default_time_grid(_slow_rate(g), count=4097)) if not isinstance(g, Sampled) else g
    if g.domain == TIME:
        peak = np.max(np.abs(s.values))
        if np.max(np.abs(s.values.imag)) > REAL_TOL * max(peak, 1.0):
            raise SignalError("wavepacket must be a real function of time")


def _slow_rate(g) -> float:
    if isinstance(g, ExpPoly) and g.rates().size:
        return float(np.min(g.rates()))
    return 1.0


def _variance_grid(g: Signal, p: OpoParams) -> Grid:
    rates = g.rates() if isinstance(g, ExpPoly) and not g.is_zero else np.array([p.gamma])
    slow = min(float(np.min(rates)), p.gamma - p.epsilon)
    fast = max(float(np.max(rates)), p.gamma + p.epsilon)
    return frequency_grid_for(slow, fast, span_factor=200.0)


def wavepacket_variances(g: Signal, p: OpoParams, grid: Grid | None = None) -> WavepacketVariances:
    """Antisqueezed and squeezed quadrature variances of a real wavepacket.

    ``V_g^(+-) = int |g~(w)|^2 V^(+-)(w) dw``. The integrals are evaluated
    as ``1 + int |g~|^2 (V - 1) dw`` using the exact unit norm of ``g``;
    the excess ``V - 1`` is a Lorentzian, so the integrand decays fast and
    the trapezoid rule on ``grid`` (frequency) converges exponentially.
    The weight ``int |g~|^2 dw`` is still checked against 1.
    """
    _check_real(g)
    if abs(norm(g) - 1.0) > NORM_TOL:
        raise SignalError("wavepacket must be normalized")
    if g.domain == TIME and not isinstance(g, ExpPoly):
        gt = fourier(g)
        grid = gt.grid
    else:
        gt = fourier(g) if g.domain == TIME else g
        grid = grid or _variance_grid(g, p)
    w = grid.points
    weight = np.abs(gt.sample(grid).values) ** 2
    total = trapezoid(weight, dx=grid.step)
    if abs(total - 1.0) > WEIGHT_TOL:
        raise SignalError(f"|g~|^2 integrates to {total:.9f} on the frequency grid, not 1")
    excess_plus = 4.0 * p.gamma * p.epsilon / ((p.gamma - p.epsilon) ** 2 + w * w)
    excess_minus = 4.0 * p.gamma * p.epsilon / ((p.gamma + p.epsilon) ** 2 + w * w)
    a = trapezoid(weight * excess_plus, dx=grid.step)
    b = trapezoid(weight * excess_minus, dx=grid.step)
    return WavepacketVariances(1.0 + a, 1.0 - b)


def equivalent_loss(v: WavepacketVariances, tol: float = 1e-15) -> float | None:
    """Loss ``L`` that would turn a pure squeezed state into ``v``.

    ``L = (V+ V- - 1) / (V+ + V- - 2)``. Returns ``None`` when both
    variances equal the vacuum value, where ``L`` is indefinite.
    """
    a = v.v_plus_g - 1.0
    b = 1.0 - v.v_minus_g
    if abs(a) <= tol and abs(b) <= tol:
        return None
    den = a - b
    if den <= 0:
        raise ValueError("variances below the minimum-uncertainty bound")
    return (a - b - a * b) / den


def equiv_loss_curve(p: OpoParams, gamma_rel_list) -> list[tuple[float, float | None]]:
    """``(gamma_rel, L)`` for Lorentzian wavepackets of each relative bandwidth."""
    out = []
    for gr in gamma_rel_list:
        g = lorentz_wavepacket(gr, p.gamma)
        out.append((float(gr), equivalent_loss(wavepacket_variances(g, p))))
    return out


def weak_pump_loss(g: Signal, p: OpoParams, grid: Grid | None = None) -> float:
    """Second-order limit ``L = 1 - (int |g~|^2 r~)^2 / int |g~|^2 r~^2``."""
    gt = fourier(g)
    grid = grid or _variance_grid(g, p)
    weight = np.abs(gt.sample(grid).values) ** 2
    rt = opo.r_tilde(p, grid.points)
    m1 = trapezoid(weight * rt, dx=grid.step)
    m2 = trapezoid(weight * rt * rt, dx=grid.step)
    return 1.0 - m1 * m1 / m2


def mode_match(g: Signal, r: Signal, grid: Grid | None = None) -> float:
    """Mode-matching rate ``M[g, r] = |<N(g), N(g* * r)>|^2``.

    Normalization of both arguments is built in, so the value is invariant
    under rescaling and global phase. Works on any representation that
    ``convolve`` supports (exact, sampled time, sampled spectra). Exact
    inputs with nearly coincident rates are sampled on a time grid set by
    the slowest rate.
    """
    if not isinstance(r, DeltaLike) and g.domain != r.domain:
        raise SignalError("g and r must share a domain")
    try:
        gn = normalize(g, grid)
        try:
            v = normalize(convolve(conjugate(g), r), grid)
        except IllConditionedError:
            if not (isinstance(g, ExpPoly) and isinstance(r, ExpPoly)):
                raise
            fine = default_time_grid(float(np.concatenate([g.rates(), r.rates()]).min()))
            return mode_match(g.sample(fine), r.sample(fine))
    except ZeroNormError as exc:
        raise ZeroNormError("mode match needs nonzero g and r") from exc
    m = abs(inner_product(gn, v, grid)) ** 2
    return min(max(m, 0.0), 1.0)


@dataclass
class ModeLadder:
    """Modes ``g_k`` coupled by the pair operator, with its coefficients.

    ``diag_coeffs[k] = <g_k, g_k* * r>`` and
    ``offdiag_coeffs[k] = <g_{k+1}, g_k* * r>`` (real, non-negative by the
    phase choice of ``g_{k+1}``). ``modes`` has one more entry than the
    coefficient lists unless the ladder terminated. ``tail_norm`` is the
    part of the last ``g_k* * r`` left outside the span of ``modes``.
    """

    modes: list
    diag_coeffs: list
    offdiag_coeffs: list
    terminated: bool = False
    norms: list = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.diag_coeffs)

    def head_ratio(self) -> float:
        """``|c_00|^2 / (|c_00|^2 + |c_01|^2)``; equals ``mode_match(g_0, r)``."""
        c0, c1 = abs(self.diag_coeffs[0]) ** 2, abs(self.offdiag_coeffs[0]) ** 2
        return c0 / (c0 + c1)


def pair_mode_ladder(g: Signal, r: Signal, depth: int = 8, grid: Grid | None = None,
                     tol: float = 1e-10) -> ModeLadder:
    """Gram-Schmidt ladder ``g_0 = g, g_{k+1} ~ (g_k* * r)`` minus its projections.

    Each new mode is orthogonalized against every previous mode (not just
    the last one) to keep the basis orthonormal in finite precision. The
    ladder stops early, with ``terminated`` set, when the residual norm
    drops below ``tol``: the pair operator is then fully captured.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if abs(norm(g, grid) - 1.0) > NORM_TOL:
        raise SignalError("g must be normalized")
    modes = [g]
    diag, off, norms = [], [], []
    for k in range(depth):
        v = convolve(conjugate(modes[k]), r)
        if isinstance(v, Sampled) and not isinstance(modes[k], Sampled):
            modes = [m.sample(v.grid) for m in modes]
        norms.append(norm(v, grid))
        diag.append(inner_product(modes[k], v, grid))
        rest = v
        for m in modes:
            rest = rest - m * inner_product(m, rest, grid)
        # second pass against numerical drift
        for m in modes:
            rest = rest - m * inner_product(m, rest, grid)
        rn = norm(rest, grid)
        off.append(rn)
        if rn <= tol * max(norms[-1], 1.0):
            return ModeLadder(modes, diag, off, True, norms)
        modes.append(rest / rn)
    return ModeLadder(modes, diag, off, False, norms)
