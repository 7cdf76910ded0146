"""Longitudinal mode functions and their algebra.

A mode function is held in one of three representations:

* ``ExpPoly``: an exact piecewise exponential-polynomial in time, with one
  piece on ``t < 0`` and one on ``t >= 0``. Convolution, inner products,
  time reversal and the Fourier transform are all evaluated in closed form.
* ``FunctionSignal``: any other closed-form callable, in time or frequency.
* ``Sampled``: complex samples on a uniform ``Grid``.

Every operation treats a signal as the time-domain function it represents,
whatever domain it is stored in. A frequency-domain signal is the unitary
spectrum ``f~(w) = (2 pi)^(-1/2) int f(t) exp(i w t) dt`` of its time
function, so ``convolve`` of two spectra returns the spectrum of the
convolution and ``conjugate`` returns the spectrum of ``f*(t)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.integrate import trapezoid
from scipy.signal import fftconvolve

TIME = "time"
FREQUENCY = "frequency"

SQRT_2PI = math.sqrt(2.0 * math.pi)

_RATE_MERGE_TOL = 1e-12
# relative rate separation below which exact convolution loses ~1e-10
NEAR_RATE_TOL = 2e-2


class SignalError(ValueError):
    """Invalid operation on a signal (domain mismatch, divergence, ...)."""


class GridError(SignalError):
    """The grid cannot represent the requested result to tolerance."""


class ZeroNormError(SignalError):
    """Normalization or projection of a zero-norm signal."""


class IllConditionedError(SignalError):
    """Exact algebra on nearly coincident decay rates.

    Terms like ``(e^{at} - e^{bt}) / (a - b)`` cancel catastrophically when
    ``a`` and ``b`` almost coincide; a sampled route should be used.
    """


# --------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class Grid:
    """Uniform grid ``start + k * step`` for ``k = 0 .. count-1``."""

    start: float
    step: float
    count: int

    def __post_init__(self):
        if not self.step > 0:
            raise GridError(f"grid step must be positive, got {self.step}")
        if self.count < 2:
            raise GridError(f"grid needs at least 2 points, got {self.count}")

    @classmethod
    def centered(cls, step: float, count: int) -> "Grid":
        """Grid with a node at zero and ``count // 2`` nodes below it."""
        return cls(-(count // 2) * step, step, count)

    @classmethod
    def symmetric(cls, half_span: float, count: int) -> "Grid":
        if count % 2 == 0:
            raise GridError("a symmetric grid needs an odd point count")
        return cls.centered(2.0 * half_span / (count - 1), count)

    @property
    def points(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    @property
    def stop(self) -> float:
        return self.start + self.step * (self.count - 1)

    @property
    def is_symmetric(self) -> bool:
        return abs(self.start + self.stop) <= 1e-9 * self.step

    def zero_index(self) -> int:
        k = -self.start / self.step
        n = int(round(k))
        if abs(k - n) > 1e-9 or not 0 <= n < self.count:
            raise GridError("grid has no node at zero")
        return n

    def conjugate(self) -> "Grid":
        """Reciprocal grid of the discrete Fourier transform.

        Same point count, step ``2 pi / (count * step)``, centered on zero.
        Applying it twice returns a centered grid to itself.
        """
        return Grid.centered(2.0 * math.pi / (self.count * self.step), self.count)

    def refined(self) -> "Grid":
        """Same span with the step halved."""
        return Grid(self.start, self.step / 2.0, 2 * self.count - 1)

    def same_as(self, other: "Grid") -> bool:
        return (
            self.count == other.count
            and math.isclose(self.step, other.step, rel_tol=1e-12)
            and abs(self.start - other.start) <= 1e-9 * self.step
        )


def default_time_grid(rate: float = 1.0, count: int = 2**16 + 1) -> Grid:
    """Time grid spanning ``[-40/rate, 40/rate]``.

    ``rate`` should be the slowest decay rate of the signals involved;
    ``exp(-40)`` keeps truncation far below the quadrature tolerance.
    """
    return Grid.symmetric(40.0 / rate, count)


def default_frequency_grid(rate: float = 1.0, count: int = 2**16 + 1) -> Grid:
    return default_time_grid(rate, count).conjugate()


def frequency_grid_for(slow_rate: float, fast_rate: float, *,
                       span_factor: float = 1000.0,
                       step_fraction: float = 1.0 / 6.0) -> Grid:
    """Frequency quadrature grid for spectra with poles at ``+-i*rate``.

    The trapezoid rule on an analytic integrand converges like
    ``exp(-2 pi d / step)`` with ``d`` the distance of the nearest pole,
    so the step is a fixed fraction of the slowest rate. The span is a
    multiple of the fastest rate so algebraic tails are negligible.
    """
    step = step_fraction * slow_rate
    half = span_factor * max(fast_rate, slow_rate)
    n = int(math.ceil(half / step))
    return Grid.centered(step, 2 * n + 1)


# --------------------------------------------------------------------------
# representations


class Signal:
    """Base class; subclasses set ``domain`` and implement ``__call__``."""

    domain: str = TIME

    def __call__(self, x):  # pragma: no cover - abstract
        raise NotImplementedError

    def sample(self, grid: Grid) -> "Sampled":
        return Sampled(self.domain, grid, np.asarray(self(grid.points), dtype=complex))


class Term(NamedTuple):
    """``poly(t) * exp(rate * t)``; ``poly`` holds ascending coefficients."""

    poly: tuple
    rate: complex


def _clean_terms(terms) -> tuple:
    merged: list[list] = []
    for poly, rate in terms:
        rate = complex(rate)
        poly = np.trim_zeros(np.asarray(poly, dtype=complex), "b")
        if poly.size == 0:
            continue
        for entry in merged:
            if abs(entry[1] - rate) <= _RATE_MERGE_TOL * max(1.0, abs(rate)):
                entry[0] = npoly.polyadd(entry[0], poly)
                break
        else:
            merged.append([poly, rate])
    out = []
    for poly, rate in merged:
        poly = np.trim_zeros(poly, "b")
        if poly.size:
            out.append(Term(tuple(complex(c) for c in poly), rate))
    return tuple(out)


def _eval_terms(terms, t: np.ndarray) -> np.ndarray:
    out = np.zeros(t.shape, dtype=complex)
    for poly, rate in terms:
        out += npoly.polyval(t, poly) * np.exp(rate * t)
    return out


class ExpPoly(Signal):
    """Piecewise exponential-polynomial in time, breakpoint at ``t = 0``.

    ``neg`` terms apply for ``t < 0`` and ``pos`` terms for ``t >= 0``
    (so the unit step has ``u(0) = 1``). Square integrability needs
    ``Re(rate) < 0`` on the positive piece and ``Re(rate) > 0`` on the
    negative piece; this is checked lazily by the integrals.
    """

    domain = TIME

    def __init__(self, neg=(), pos=(), label: str | None = None):
        self.neg = _clean_terms(neg)
        self.pos = _clean_terms(pos)
        self.label = label

    def __repr__(self):
        name = self.label or "ExpPoly"
        return f"<{name}: {len(self.neg)} neg terms, {len(self.pos)} pos terms>"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        m = t >= 0
        if np.any(m):
            out[m] = _eval_terms(self.pos, t[m])
        if np.any(~m):
            out[~m] = _eval_terms(self.neg, t[~m])
        return out

    def left_limit(self) -> complex:
        return complex(sum(p[0] for p, _ in self.neg))

    def right_limit(self) -> complex:
        return complex(sum(p[0] for p, _ in self.pos))

    def sample(self, grid: Grid) -> "Sampled":
        """Render on ``grid``.

        A node at ``t = 0`` stores the mean of the one-sided limits, which
        keeps the trapezoid rule second order across a jump.
        """
        s = super().sample(grid)
        t = grid.points
        hit = np.flatnonzero(np.abs(t) <= 1e-12 * grid.step)
        if hit.size:
            s.values[hit[0]] = 0.5 * (self.left_limit() + self.right_limit())
        return s

    @property
    def is_zero(self) -> bool:
        return not self.neg and not self.pos

    def rates(self) -> np.ndarray:
        """Absolute real parts of all decay rates."""
        return np.array([abs(r.real) for _, r in self.neg + self.pos])

    def scaled(self, c) -> "ExpPoly":
        c = complex(c)
        return ExpPoly([(np.multiply(p, c), r) for p, r in self.neg],
                       [(np.multiply(p, c), r) for p, r in self.pos], self.label)

    def conj(self) -> "ExpPoly":
        return ExpPoly([(np.conj(p), np.conj(r)) for p, r in self.neg],
                       [(np.conj(p), np.conj(r)) for p, r in self.pos], self.label)

    def reversed(self) -> "ExpPoly":
        def flip(terms):
            return [(np.asarray(p) * (-1.0) ** np.arange(len(p)), -r) for p, r in terms]
        return ExpPoly(flip(self.pos), flip(self.neg), self.label)

    def __add__(self, other):
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return ExpPoly(self.neg + other.neg, self.pos + other.pos)

    def __sub__(self, other):
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return self + other.scaled(-1.0)

    def __mul__(self, c):
        return self.scaled(c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self.scaled(1.0 / complex(c))

    def spectrum(self, omega) -> np.ndarray:
        """Exact unitary Fourier transform evaluated at ``omega``."""
        w = np.asarray(omega, dtype=float)
        out = np.zeros(w.shape, dtype=complex)
        for poly, rate in self.pos:
            s = rate + 1j * w
            for n, c in enumerate(poly):
                out += c * math.factorial(n) / (-s) ** (n + 1)
        for poly, rate in self.neg:
            s = rate + 1j * w
            for n, c in enumerate(poly):
                out += c * (-1) ** n * math.factorial(n) / s ** (n + 1)
        return out / SQRT_2PI


class DeltaLike(Signal):
    """``weight * delta(t)``; the identity of convolution."""

    domain = TIME

    def __init__(self, weight=1.0):
        self.weight = complex(weight)

    def __call__(self, t):
        raise SignalError("a delta function has no pointwise values")

    def sample(self, grid):
        raise SignalError("a delta function cannot be sampled")

    def __repr__(self):
        return f"<DeltaLike weight={self.weight}>"


class FunctionSignal(Signal):
    """Closed-form callable in either domain."""

    def __init__(self, domain: str, func: Callable, label: str | None = None):
        _check_domain(domain)
        self.domain = domain
        self.func = func
        self.label = label

    def __call__(self, x):
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=complex)

    def __repr__(self):
        return f"<FunctionSignal {self.domain} {self.label or ''}>"


class Spectrum(FunctionSignal):
    """Frequency-domain view of an ``ExpPoly``; inverts exactly."""

    def __init__(self, source: ExpPoly):
        super().__init__(FREQUENCY, source.spectrum, f"spectrum of {source.label or 'ExpPoly'}")
        self.source = source


class Sampled(Signal):
    """Complex samples on a uniform grid."""

    def __init__(self, domain: str, grid: Grid, values):
        _check_domain(domain)
        values = np.asarray(values)
        if values.shape != (grid.count,):
            raise GridError(f"expected {grid.count} samples, got shape {values.shape}")
        self.domain = domain
        self.grid = grid
        self.values = values.astype(complex)

    def __repr__(self):
        return f"<Sampled {self.domain} n={self.grid.count} step={self.grid.step:.3g}>"

    def __call__(self, x):
        """Linear interpolation between nodes (zero outside the grid)."""
        x = np.asarray(x, dtype=float)
        t = self.grid.points
        re = np.interp(x, t, self.values.real, left=0.0, right=0.0)
        im = np.interp(x, t, self.values.imag, left=0.0, right=0.0)
        return re + 1j * im

    def sample(self, grid: Grid) -> "Sampled":
        if grid.same_as(self.grid):
            return self
        return Sampled(self.domain, grid, self(grid.points))

    def _like(self, values) -> "Sampled":
        return Sampled(self.domain, self.grid, values)

    def _other_values(self, other):
        if isinstance(other, Sampled):
            if other.domain != self.domain or not other.grid.same_as(self.grid):
                raise GridError("sampled signals live on different grids")
            return other.values
        return np.asarray(other)

    def __add__(self, other):
        return self._like(self.values + self._other_values(other))

    def __sub__(self, other):
        return self._like(self.values - self._other_values(other))

    def __mul__(self, c):
        return self._like(self.values * complex(c))

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self._like(self.values / complex(c))


def _check_domain(domain):
    if domain not in (TIME, FREQUENCY):
        raise SignalError(f"unknown domain {domain!r}")


# constructors for the named closed-form descriptors

def both_side_exp(rate: float, amplitude=1.0) -> ExpPoly:
    """``amplitude * exp(-rate |t|)``."""
    return ExpPoly([((amplitude,), rate)], [((amplitude,), -rate)], f"BothSideExp({rate:g})")


def causal_exp(rate: float, amplitude=1.0) -> ExpPoly:
    """``amplitude * exp(-rate t) u(t)``."""
    return ExpPoly((), [((amplitude,), -rate)], f"CausalExp({rate:g})")


def anticausal_exp(rate: float, amplitude=1.0) -> ExpPoly:
    """``amplitude * exp(rate t) u(-t)``."""
    return ExpPoly([((amplitude,), rate)], (), f"AntiCausalExp({rate:g})")


def lorentzian(rate: float) -> Spectrum:
    """Spectrum of ``exp(-rate |t|)``: ``sqrt(2/pi) rate / (rate^2 + w^2)``."""
    return Spectrum(both_side_exp(rate))


def zero_signal(domain: str = TIME) -> Signal:
    if domain == TIME:
        return ExpPoly()
    return FunctionSignal(FREQUENCY, np.zeros_like, "zero")


# --------------------------------------------------------------------------
# exact half-line integrals and convolutions


def _halfline_integral(poly, rate: complex, side: str) -> complex:
    """``int t^n e^{rate t}`` summed over ``poly`` on one half line."""
    total = 0j
    for n, c in enumerate(poly):
        if c == 0:
            continue
        if side == "pos":
            if rate.real >= 0:
                raise SignalError("integral diverges on t >= 0")
            total += c * math.factorial(n) / (-rate) ** (n + 1)
        else:
            if rate.real <= 0:
                raise SignalError("integral diverges on t < 0")
            total += c * (-1) ** n * math.factorial(n) / rate ** (n + 1)
    return total


def _antiderivative(poly: np.ndarray, p: complex) -> np.ndarray:
    """``A`` with ``d/dt [A(t) e^{pt}] = poly(t) e^{pt}``."""
    if p == 0:
        return npoly.polyint(poly)
    out = np.zeros(len(poly), dtype=complex)
    d = np.asarray(poly, dtype=complex)
    k = 0
    while d.size and np.any(d != 0):
        out[: d.size] += (-1) ** k * d / p ** (k + 1)
        d = npoly.polyder(d)
        k += 1
    return out


def _convolve_terms(f: Term, f_side: str, g: Term, g_side: str):
    """Exact convolution of two half-line terms -> (neg_terms, pos_terms)."""
    P = np.asarray(f.poly, dtype=complex)
    Q = np.asarray(g.poly, dtype=complex)
    a, b = f.rate, g.rate
    p = a - b
    if p != 0 and abs(p) < NEAR_RATE_TOL * max(abs(a), abs(b)):
        raise IllConditionedError(
            f"decay rates {a:.6g} and {b:.6g} nearly coincide; use a sampled route"
        )
    # Q(t - tau) = sum_j B_j(t) tau^j
    U = np.zeros(1, dtype=complex)  # multiplies e^{a t}
    V = np.zeros(1, dtype=complex)  # multiplies e^{b t}
    for j in range(len(Q)):
        B = np.zeros(len(Q) - j, dtype=complex)
        for i in range(j, len(Q)):
            B[i - j] += Q[i] * math.comb(i, j) * (-1) ** j
        A = _antiderivative(np.concatenate([np.zeros(j, dtype=complex), P]), p)
        U = npoly.polyadd(U, npoly.polymul(B, A))
        V = npoly.polyadd(V, B * A[0])
    if f_side == "pos" and g_side == "pos":
        return [], [(U, a), (-V, b)]
    if f_side == "pos" and g_side == "neg":
        return [(-V, b)], [(-U, a)]
    if f_side == "neg" and g_side == "pos":
        return [(U, a)], [(V, b)]
    return [(V, b), (-U, a)], []


def _convolve_exppoly(f: ExpPoly, g: ExpPoly) -> ExpPoly:
    neg, pos = [], []
    for fs, fterms in (("neg", f.neg), ("pos", f.pos)):
        for gs, gterms in (("neg", g.neg), ("pos", g.pos)):
            for ft in fterms:
                for gt in gterms:
                    n, q = _convolve_terms(ft, fs, gt, gs)
                    neg += n
                    pos += q
    return ExpPoly(neg, pos)


def _inner_exppoly(f: ExpPoly, g: ExpPoly) -> complex:
    total = 0j
    for side, fterms, gterms in (("neg", f.neg, g.neg), ("pos", f.pos, g.pos)):
        for fp, fr in fterms:
            for gp, gr in gterms:
                prod = npoly.polymul(np.conj(fp), gp)
                total += _halfline_integral(prod, np.conj(fr) + gr, side)
    return total


# --------------------------------------------------------------------------
# discrete Fourier transform with the continuous unitary convention


def _dft(values: np.ndarray, src: Grid, dst: Grid, sign: int) -> np.ndarray:
    """``(step/sqrt(2 pi)) sum_n f_n exp(sign*i x_k y_n)`` onto ``dst``.

    Requires ``src.step * dst.step * count == 2 pi``.
    """
    n = src.count
    x0, dx = src.start, src.step
    y0, dy = dst.start, dst.step
    k = np.arange(n)
    pre = values * np.exp(sign * 1j * y0 * dx * k)
    if sign > 0:
        core = np.fft.ifft(pre) * n
    else:
        core = np.fft.fft(pre)
    return (dx / SQRT_2PI) * np.exp(sign * 1j * (y0 * x0 + dy * x0 * k)) * core


def _check_edges(values: np.ndarray, tol: float, what: str, hint: str = ""):
    peak = np.max(np.abs(values)) if values.size else 0.0
    if peak == 0:
        return
    m = max(1, values.size // 100)
    edge = max(np.max(np.abs(values[:m])), np.max(np.abs(values[-m:])))
    if edge > tol * peak:
        raise GridError(f"{what}: edge magnitude {edge / peak:.2e} of peak exceeds {tol:.1e}{hint}")


# --------------------------------------------------------------------------
# operations


def _resolve_pair(f: Signal, g: Signal, grid: Grid | None):
    if f.domain != g.domain:
        raise SignalError(f"domain mismatch: {f.domain} vs {g.domain}")
    if isinstance(f, DeltaLike) or isinstance(g, DeltaLike):
        raise SignalError("delta functions are not square integrable")
    fs = f if isinstance(f, Sampled) else None
    gs = g if isinstance(g, Sampled) else None
    if fs is not None and gs is not None:
        if not fs.grid.same_as(gs.grid):
            raise GridError("sampled signals live on different grids")
        return fs.grid
    if fs is not None:
        return fs.grid
    if gs is not None:
        return gs.grid
    if grid is not None:
        return grid
    return default_time_grid() if f.domain == TIME else default_frequency_grid()


def inner_product(f: Signal, g: Signal, grid: Grid | None = None) -> complex:
    """``<f, g> = int f*(x) g(x) dx``.

    Exact for two ``ExpPoly``; otherwise the trapezoid rule on the grid of
    whichever argument is sampled (or ``grid``, or the default grid).
    """
    if isinstance(f, ExpPoly) and isinstance(g, ExpPoly):
        return _inner_exppoly(f, g)
    grid = _resolve_pair(f, g, grid)
    fv = f.sample(grid).values
    gv = g.sample(grid).values
    return complex(trapezoid(np.conj(fv) * gv, dx=grid.step))


def norm(f: Signal, grid: Grid | None = None) -> float:
    if isinstance(f, ExpPoly) and f.is_zero:
        return 0.0
    return math.sqrt(max(inner_product(f, f, grid).real, 0.0))


def normalize(f: Signal, grid: Grid | None = None, tol: float = 1e-300) -> Signal:
    """``f / ||f||``; raises ``ZeroNormError`` for a zero signal."""
    n = norm(f, grid)
    if not n > tol:
        raise ZeroNormError("cannot normalize a zero-norm signal")
    if isinstance(f, (ExpPoly, Sampled)):
        return f / n
    if isinstance(f, Spectrum):
        return Spectrum(f.source / n)
    return FunctionSignal(f.domain, lambda x, _f=f.func: _f(x) / n, f.label)


def conjugate(f: Signal) -> Signal:
    """Complex conjugate of the time function ``f*(t)``.

    In the frequency domain this is ``conj(f~(-w))``, which needs a grid
    symmetric about zero when ``f`` is sampled.
    """
    if isinstance(f, ExpPoly):
        return f.conj()
    if isinstance(f, DeltaLike):
        return DeltaLike(np.conj(f.weight))
    if isinstance(f, Spectrum):
        return Spectrum(f.source.conj())
    if isinstance(f, Sampled):
        if f.domain == TIME:
            return f._like(np.conj(f.values))
        if not f.grid.is_symmetric:
            raise GridError("frequency reflection needs a symmetric grid")
        return f._like(np.conj(f.values[::-1]))
    if f.domain == TIME:
        return FunctionSignal(TIME, lambda t, _f=f.func: np.conj(_f(t)), f.label)
    return FunctionSignal(FREQUENCY, lambda w, _f=f.func: np.conj(_f(-w)), f.label)


def time_reverse(f: Signal) -> Signal:
    """``f^R(t) = f(-t)`` (``f~(-w)`` for spectra)."""
    if isinstance(f, ExpPoly):
        return f.reversed()
    if isinstance(f, DeltaLike):
        return f
    if isinstance(f, Spectrum):
        return Spectrum(f.source.reversed())
    if isinstance(f, Sampled):
        if not f.grid.is_symmetric:
            raise GridError("time reversal of samples needs a symmetric grid")
        return f._like(f.values[::-1].copy())
    return FunctionSignal(f.domain, lambda x, _f=f.func: _f(-x), f.label)


def convolve(f: Signal, g: Signal, grid: Grid | None = None, tol: float = 1e-9) -> Signal:
    """Convolution ``(f * g)(t) = int f(tau) g(t - tau) d tau``.

    Two ``ExpPoly`` give an exact ``ExpPoly``. Sampled time signals are
    convolved through the FFT on their common grid (which must contain
    ``t = 0``); the result is returned on the same grid, and a
    ``GridError`` is raised if more than ``tol`` of the peak falls outside
    it. Frequency-domain inputs multiply: ``sqrt(2 pi) f~ g~``.
    """
    if f.domain != g.domain:
        raise SignalError(f"domain mismatch: {f.domain} vs {g.domain}")
    if isinstance(g, DeltaLike):
        f, g = g, f
    if isinstance(f, DeltaLike):
        if isinstance(g, DeltaLike):
            return DeltaLike(f.weight * g.weight)
        return g * f.weight if isinstance(g, (ExpPoly, Sampled)) else _scaled_function(g, f.weight)
    if isinstance(f, ExpPoly) and isinstance(g, ExpPoly):
        return _convolve_exppoly(f, g)
    if f.domain == FREQUENCY:
        if isinstance(f, Sampled) or isinstance(g, Sampled):
            grid = _resolve_pair(f, g, grid)
            return Sampled(FREQUENCY, grid, SQRT_2PI * f.sample(grid).values * g.sample(grid).values)
        return FunctionSignal(FREQUENCY, lambda w, a=f, b=g: SQRT_2PI * a(w) * b(w), "product")
    grid = _resolve_pair(f, g, grid)
    m = grid.zero_index()
    n = grid.count
    full = fftconvolve(f.sample(grid).values, g.sample(grid).values) * grid.step
    out = full[m:m + n]
    peak = np.max(np.abs(out)) if out.size else 0.0
    spill = max(np.max(np.abs(full[:m]), initial=0.0), np.max(np.abs(full[m + n:]), initial=0.0))
    if peak > 0 and spill > tol * peak:
        raise GridError(
            f"convolution spills {spill / peak:.2e} of its peak outside the grid; "
            f"widen the span beyond +-{max(abs(grid.start), abs(grid.stop)):g}"
        )
    return Sampled(TIME, grid, out)


def _scaled_function(f: FunctionSignal, c) -> FunctionSignal:
    return FunctionSignal(f.domain, lambda x, _f=f.func: c * _f(x), f.label)


def fourier(f: Signal, grid: Grid | None = None, leakage_tol: float = 1e-6) -> Signal:
    """Unitary transform ``f~(w) = (2 pi)^(-1/2) int f(t) exp(i w t) dt``.

    ``ExpPoly`` transforms exactly to a ``Spectrum``. Other signals are
    sampled (on ``grid`` or their own) and transformed by the DFT onto the
    conjugate grid; spectral content above ``leakage_tol`` of the peak at
    the grid edges raises ``GridError``.
    """
    if f.domain != TIME:
        raise SignalError("fourier expects a time-domain signal")
    if isinstance(f, ExpPoly):
        return Spectrum(f)
    if isinstance(f, DeltaLike):
        w = f.weight
        return FunctionSignal(FREQUENCY, lambda x: np.full(np.shape(x), w / SQRT_2PI), "delta spectrum")
    if not isinstance(f, Sampled):
        f = f.sample(grid or default_time_grid())
    dst = f.grid.conjugate()
    values = _dft(f.values, f.grid, dst, +1)
    _check_edges(values, leakage_tol, "spectral leakage (aliasing)", "; refine the time step")
    return Sampled(FREQUENCY, dst, values)


def inverse_fourier(F: Signal, grid: Grid | None = None, reference: ExpPoly | None = None,
                    leakage_tol: float = 1e-6) -> Signal:
    """Inverse of ``fourier``.

    A ``Spectrum`` inverts exactly. Otherwise the result is sampled on the
    time ``grid`` (default: conjugate of ``F``'s own grid). ``reference``
    is an optional closed-form time signal whose spectrum carries the slow
    tail of ``F``: it is subtracted before the discrete transform and added
    back exactly, so the DFT only sees a fast-decaying remainder.
    """
    if F.domain != FREQUENCY:
        raise SignalError("inverse_fourier expects a frequency-domain signal")
    if isinstance(F, Spectrum) and reference is None:
        return F.source
    if grid is None:
        if not isinstance(F, Sampled):
            raise GridError("a time grid is needed to invert a sampled transform")
        grid = F.grid.conjugate()
    fgrid = grid.conjugate()
    spec = F.sample(fgrid).values
    if reference is not None:
        spec = spec - reference.spectrum(fgrid.points)
    _check_edges(spec, leakage_tol, "truncated spectrum", "; widen the frequency span")
    values = _dft(spec, fgrid, grid, -1)
    if reference is not None:
        values = values + reference.sample(grid).values
    return Sampled(TIME, grid, values)


class GramSchmidtResult(NamedTuple):
    parallel: complex
    orthogonal: Signal | None
    degenerate: bool


def gram_schmidt_step(g: Signal, v: Signal, grid: Grid | None = None,
                      tol: float = 1e-10) -> GramSchmidtResult:
    """Split ``N(v) = parallel * g + sqrt(1 - |parallel|^2) * orthogonal``.

    ``g`` must be normalized. When ``N(v)`` is parallel to ``g`` within
    ``tol`` the orthogonal part is undefined: ``orthogonal`` is ``None``
    and ``degenerate`` is set.
    """
    if isinstance(g, Sampled) and not isinstance(v, Sampled):
        v = v.sample(g.grid)
    elif isinstance(v, Sampled) and not isinstance(g, Sampled):
        g = g.sample(v.grid)
    if not (isinstance(g, (ExpPoly, Sampled)) and isinstance(v, (ExpPoly, Sampled))):
        raise SignalError("Gram-Schmidt needs ExpPoly or sampled signals")
    vn = normalize(v, grid)
    c = inner_product(g, vn, grid)
    rest = vn - g * c
    rn = norm(rest, grid)
    if rn <= tol:
        return GramSchmidtResult(c, None, True)
    return GramSchmidtResult(c, rest / rn, False)


def converged(func: Callable[[Grid], complex], grid: Grid, tol: float = 1e-8):
    """Evaluate ``func`` on ``grid`` and on its refinement.

    Returns ``(value_on_refined_grid, change)``; raises ``GridError`` when
    the change exceeds ``tol``.
    """
    coarse = func(grid)
    fine = func(grid.refined())
    change = float(np.max(np.abs(np.asarray(fine) - np.asarray(coarse))))
    if change > tol:
        raise GridError(f"quadrature not converged: grid halving changed the result by {change:.2e}")
    return fine, change
