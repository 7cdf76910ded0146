"""Ideal, lossless OPO squeezing: sideband spectra and pair correlations.

All quantities are in the canonical frame with a real, non-negative pump
amplitude ``epsilon`` below threshold (``epsilon < gamma``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .signals import (
    FREQUENCY,
    SQRT_2PI,
    ExpPoly,
    FunctionSignal,
    Grid,
    Sampled,
    Signal,
    both_side_exp,
    convolve,
    default_time_grid,
    inverse_fourier,
    normalize,
    time_reverse,
)


@dataclass(frozen=True)
class OpoParams:
    """Cavity decay ``gamma`` and pump amplitude ``epsilon``."""

    gamma: float = 1.0
    epsilon: float = 0.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not 0 <= self.epsilon < self.gamma:
            raise ValueError(
                f"need 0 <= epsilon < gamma (below threshold), got epsilon={self.epsilon}, gamma={self.gamma}"
            )

    @property
    def ratio(self) -> float:
        return self.epsilon / self.gamma


@dataclass(frozen=True)
class SqueezingSpectrumPoint:
    omega: float
    v_plus: float
    v_minus: float
    r_tilde: float
    phi: float


def v_plus(p: OpoParams, omega):
    """Antisqueezing spectrum ``((g+e)^2 + w^2) / ((g-e)^2 + w^2)``."""
    w2 = np.square(omega)
    return ((p.gamma + p.epsilon) ** 2 + w2) / ((p.gamma - p.epsilon) ** 2 + w2)


def v_minus(p: OpoParams, omega):
    w2 = np.square(omega)
    return ((p.gamma - p.epsilon) ** 2 + w2) / ((p.gamma + p.epsilon) ** 2 + w2)


def r_tilde(p: OpoParams, omega):
    """Frequency-dependent squeezing parameter ``ln sqrt(V+)``.

    Written with ``log1p`` of the excess so weak pumping keeps full
    relative precision.
    """
    w2 = np.square(omega)
    excess = 4.0 * p.gamma * p.epsilon / ((p.gamma - p.epsilon) ** 2 + w2)
    return 0.5 * np.log1p(excess)


def phase(p: OpoParams, omega):
    """Cavity phase rotation ``arg((g+e+iw)/(g-e-iw))``; odd in ``omega``."""
    omega = np.asarray(omega, dtype=float)
    return np.angle((p.gamma + p.epsilon + 1j * omega) / (p.gamma - p.epsilon - 1j * omega))


def spectrum(p: OpoParams, omega: float) -> SqueezingSpectrumPoint:
    return SqueezingSpectrumPoint(
        omega=float(omega),
        v_plus=float(v_plus(p, omega)),
        v_minus=float(v_minus(p, omega)),
        r_tilde=float(r_tilde(p, omega)),
        phi=float(phase(p, omega)),
    )


def squeezing_db(p: OpoParams, omega=0.0):
    return 10.0 * np.log10(v_plus(p, omega))


def correlation_spectrum(p: OpoParams) -> FunctionSignal:
    """``r~(w)`` as a real, even frequency-domain signal.

    The cavity phase rotation is deliberately left out: it acts on the
    vacuum input, which is rotation invariant.
    """
    return FunctionSignal(FREQUENCY, lambda w: r_tilde(p, w), f"r~(gamma={p.gamma:g}, eps={p.epsilon:g})")


def correlation_weak_pump(p: OpoParams) -> ExpPoly:
    """Weak-pump correlation ``eps sqrt(2 pi) exp(-gamma |t|)``."""
    return both_side_exp(p.gamma, p.epsilon * SQRT_2PI)


def correlation_time(p: OpoParams, grid: Grid | None = None) -> Sampled:
    """Normalized time-domain correlation ``N(r)(t)`` by numerical inversion.

    The weak-pump Lorentzian ``eps * 2 gamma / (gamma^2 + w^2)`` shares the
    ``1/w^2`` tail of ``r~`` and is inverted exactly; only the remainder
    goes through the DFT. The norm comes from Parseval, by adaptive
    quadrature of ``r~(w)^2``: the trapezoid rule in time would carry an
    O(dt^2) error from the kink at ``t = 0``. At ``epsilon = 0`` the
    limiting shape ``sqrt(gamma) exp(-gamma |t|)`` is returned.
    """
    if grid is None:
        grid = default_time_grid(p.gamma - p.epsilon)
    if p.epsilon == 0:
        return normalize(both_side_exp(p.gamma)).sample(grid)
    r = inverse_fourier(correlation_spectrum(p), grid, reference=correlation_weak_pump(p))
    return Sampled(r.domain, r.grid, r.values.real / correlation_norm(p))


def correlation_norm(p: OpoParams) -> float:
    """``||r|| = (int r~(w)^2 dw)^(1/2)``."""
    half, _ = quad(lambda w: r_tilde(p, w) ** 2, 0.0, np.inf, epsabs=0.0, epsrel=1e-13, limit=400)
    return math.sqrt(2.0 * half)


def correlation_exact(p: OpoParams) -> FunctionSignal:
    """Closed-form ``r(t) = sqrt(pi/2) (e^{-(g-e)|t|} - e^{-(g+e)|t|}) / |t|``.

    Inverse transform of ``r~`` through the Frullani integral. Used as an
    independent check on ``correlation_time``; unnormalized.
    """
    a, b = p.gamma + p.epsilon, p.gamma - p.epsilon

    def r(t):
        t = np.abs(np.asarray(t, dtype=float))
        out = np.empty_like(t)
        small = t < 1e-8
        out[small] = (a - b) - 0.5 * (a * a - b * b) * t[small]
        ts = t[~small]
        out[~small] = (np.exp(-b * ts) - np.exp(-a * ts)) / ts
        return math.sqrt(math.pi / 2.0) * out

    return FunctionSignal("time", r, "r(t) exact")


def correlation_from_decays(lambda_sig: Signal, lambda_idl: Signal) -> Signal:
    """Pair correlation ``lambda_sig * lambda_idl^R`` (unnormalized)."""
    return convolve(lambda_sig, time_reverse(lambda_idl))
