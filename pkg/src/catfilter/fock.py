"""Truncated Fock-space simulation of one to three bosonic modes.

Checks the operator identities behind photon subtraction: weak tapping
approaches the annihilation operator, subtracting from squeezed vacuum
gives a squeezed single photon, loss commutes with subtraction, and the
pair operator applied to a single photon is biased 3:4.

States are immutable; every operation returns a new state. Generators
for the beamsplitter and the squeezer are exponentiated with
``scipy.linalg.expm`` on the truncated space.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

DEFAULT_CUTOFF = 40
LEAKAGE_TOL = 1e-10
ZERO_TOL = 1e-14
DUMP_THRESHOLD = 1e-12


class FockError(ValueError):
    pass


class CutoffError(FockError):
    """The truncation is too small for the requested operation."""


class ZeroVectorError(FockError):
    """An operation produced the zero vector where a state was needed."""


@dataclass(frozen=True, eq=False)
class FockState:
    """Amplitudes ``c[n1, n2, n3]`` with photon numbers up to ``cutoff``."""

    mode_count: int
    cutoff: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.mode_count not in (1, 2, 3):
            raise FockError("mode_count must be 1, 2 or 3")
        if self.cutoff < 1:
            raise FockError("cutoff must be at least 1")
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.cutoff + 1,) * self.mode_count:
            raise FockError(f"amplitudes must have shape {(self.cutoff + 1,) * self.mode_count}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def is_zero(self) -> bool:
        return self.norm <= ZERO_TOL

    def normalized(self) -> "FockState":
        n = self.norm
        if n <= ZERO_TOL:
            raise ZeroVectorError("cannot normalize the zero vector")
        return self._with(self.amplitudes / n)

    def leakage(self) -> float:
        """Largest probability found in the top two photon-number shells of any mode."""
        p = np.abs(self.amplitudes) ** 2
        total = p.sum()
        if total == 0:
            return 0.0
        worst = 0.0
        for mode in range(self.mode_count):
            top = np.take(p, [self.cutoff - 1, self.cutoff], axis=mode).sum()
            worst = max(worst, top / total)
        return float(worst)

    def check_leakage(self, tol: float = LEAKAGE_TOL) -> "FockState":
        leak = self.leakage()
        if leak > tol:
            raise CutoffError(f"probability {leak:.3g} in the top shells exceeds {tol:g}; raise the cutoff")
        return self

    def amplitude(self, *ns) -> complex:
        return complex(self.amplitudes[tuple(ns)])

    def inner(self, other: "FockState") -> complex:
        """``<self|other>``."""
        _same_space(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def _with(self, amps) -> "FockState":
        return FockState(self.mode_count, self.cutoff, amps)


def _same_space(a: FockState, b: FockState):
    if a.mode_count != b.mode_count or a.cutoff != b.cutoff:
        raise FockError("states live in different truncated spaces")


def vacuum(mode_count: int = 1, cutoff: int = DEFAULT_CUTOFF) -> FockState:
    return number_state((0,) * mode_count, cutoff)


def number_state(ns, cutoff: int = DEFAULT_CUTOFF) -> FockState:
    """``|n1, n2, ...>``; a bare integer gives a single-mode state."""
    ns = (ns,) if np.isscalar(ns) else tuple(ns)
    if any(n < 0 or n > cutoff for n in ns):
        raise CutoffError(f"photon numbers {ns} do not fit under cutoff {cutoff}")
    amps = np.zeros((cutoff + 1,) * len(ns), dtype=complex)
    amps[ns] = 1.0
    return FockState(len(ns), cutoff, amps)


def add_vacuum_mode(s: FockState) -> FockState:
    """``|psi> (x) |0>`` with the new mode appended last."""
    if s.mode_count == 3:
        raise FockError("at most three modes are supported")
    amps = np.zeros(s.amplitudes.shape + (s.cutoff + 1,), dtype=complex)
    amps[..., 0] = s.amplitudes
    return FockState(s.mode_count + 1, s.cutoff, amps)


def _lowering(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), 1)


def _check_mode(s: FockState, mode: int):
    if not 0 <= mode < s.mode_count:
        raise FockError(f"mode {mode} out of range for {s.mode_count} modes")


def _apply_single(s: FockState, mode: int, op: np.ndarray) -> FockState:
    _check_mode(s, mode)
    out = np.tensordot(op, s.amplitudes, axes=([1], [mode]))
    return s._with(np.moveaxis(out, 0, mode))


def apply_annihilation(s: FockState, mode: int = 0) -> FockState:
    """``a|psi>``, unnormalized. The vacuum maps to the zero vector (see ``is_zero``)."""
    return _apply_single(s, mode, _lowering(s.cutoff))


def apply_creation(s: FockState, mode: int = 0) -> FockState:
    """``a^dag|psi>``, unnormalized. Needs an empty top shell in ``mode``."""
    _check_mode(s, mode)
    top = np.take(s.amplitudes, s.cutoff, axis=mode)
    if np.any(np.abs(top) > ZERO_TOL):
        raise CutoffError(f"no headroom above n={s.cutoff} in mode {mode}")
    return _apply_single(s, mode, _lowering(s.cutoff).T)


@lru_cache(maxsize=32)
def _beamsplitter_matrix(cutoff: int, reflectivity: float) -> np.ndarray:
    """Two-mode unitary, exponentiated block by block in total photon number."""
    theta = math.asin(math.sqrt(reflectivity))
    d = cutoff + 1
    u = np.zeros((d * d, d * d))
    for total in range(2 * cutoff + 1):
        n1 = np.arange(max(0, total - cutoff), min(total, cutoff) + 1)
        idx = n1 * d + (total - n1)
        # a_1 a_2^dag - a_1^dag a_2 sends a_1^dag to cos a_1^dag + sin a_2^dag
        hop = np.sqrt(n1[1:] * (total - n1[:-1]))
        gen = np.diag(hop, 1) - np.diag(hop, -1)
        u[np.ix_(idx, idx)] = expm(theta * gen)
    return u


def apply_beamsplitter(s: FockState, modes=(0, 1), reflectivity: float = 0.5) -> FockState:
    """Beamsplitter with ``a_i^dag -> sqrt(1-R) a_i^dag + sqrt(R) a_j^dag``.

    The generator conserves total photon number, so amplitudes with
    ``n_i + n_j <= cutoff`` are propagated without truncation error.
    """
    i, j = modes
    _check_mode(s, i)
    _check_mode(s, j)
    if i == j:
        raise FockError("beamsplitter needs two distinct modes")
    if not 0 <= reflectivity <= 1:
        raise FockError(f"reflectivity must be in [0, 1], got {reflectivity}")
    d = s.cutoff + 1
    u = _beamsplitter_matrix(s.cutoff, float(reflectivity)).reshape(d, d, d, d)
    out = np.tensordot(u, s.amplitudes, axes=([2, 3], [i, j]))
    return s._with(np.moveaxis(out, [0, 1], [i, j]))


@lru_cache(maxsize=32)
def _squeeze_matrix(cutoff: int, r: float) -> np.ndarray:
    a = _lowering(cutoff)
    return expm(0.5 * r * (a.T @ a.T - a @ a))


def suggested_cutoff(r: float, tol: float = LEAKAGE_TOL) -> int:
    """Cutoff at which squeezed vacuum of parameter ``r`` leaks less than ``tol``."""
    t = math.tanh(abs(r))
    if t == 0:
        return 2
    return int(math.ceil(math.log(tol) / math.log(t))) + 4


def apply_squeeze(s: FockState, mode: int = 0, r: float = 0.0, tol: float = LEAKAGE_TOL) -> FockState:
    """``S(r) = exp((r a^dag^2 - r a^2) / 2)`` on ``mode``, real ``r``."""
    out = _apply_single(s, mode, _squeeze_matrix(s.cutoff, float(r)))
    leak = out.leakage()
    if leak > tol:
        raise CutoffError(
            f"squeezing r={r} leaks {leak:.3g} into the top shells; "
            f"try cutoff >= {max(suggested_cutoff(r, tol), s.cutoff + 10)}"
        )
    return out


def squeezed_vacuum(r: float, cutoff: int = DEFAULT_CUTOFF) -> FockState:
    return apply_squeeze(vacuum(1, cutoff), 0, r)


def fidelity(a: FockState, b: FockState) -> float:
    """``|<a|b>|^2 / (<a|a><b|b>)``."""
    if a.is_zero or b.is_zero:
        raise ZeroVectorError("fidelity with the zero vector is undefined")
    return abs(a.inner(b)) ** 2 / (a.norm**2 * b.norm**2)


def aligned_distance(a: FockState, b: FockState) -> float:
    """``min_phi || N(a) - e^{i phi} N(b) ||``."""
    na, nb = a.normalized(), b.normalized()
    ov = na.inner(nb)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(na.amplitudes - nb.amplitudes / phase))


@dataclass(frozen=True)
class HeraldResult:
    """Post-selected state and its probability.

    ``state`` is renormalized; when the projection vanishes it is the zero
    vector and ``success_prob`` is 0.
    """

    state: FockState
    success_prob: float

    @property
    def heralded(self) -> bool:
        return self.success_prob > 0


def subtract_via_tap(s: FockState, reflectivity: float, mode: int = 0) -> HeraldResult:
    """Tap ``mode`` with a weak beamsplitter and herald one photon in the tap."""
    if not 0 < reflectivity < 1:
        raise FockError("tap reflectivity must lie strictly between 0 and 1")
    big = apply_beamsplitter(add_vacuum_mode(s), (mode, s.mode_count), reflectivity)
    projected = s._with(np.take(big.amplitudes, 1, axis=s.mode_count))
    prob = projected.norm**2
    if prob <= ZERO_TOL**2:
        return HeraldResult(s._with(np.zeros_like(s.amplitudes)), 0.0)
    return HeraldResult(projected.normalized(), float(min(prob, 1.0)))


def tap_infidelity(s: FockState, reflectivity: float, mode: int = 0) -> float:
    """``1 - F`` between the tapped-and-heralded state and ``N(a|psi>)``."""
    res = subtract_via_tap(s, reflectivity, mode)
    if not res.heralded:
        raise ZeroVectorError("nothing to herald from the vacuum")
    return 1.0 - fidelity(res.state, apply_annihilation(s, mode))


def squeezed_single_photon_check(r: float, cutoff: int = DEFAULT_CUTOFF) -> float:
    """Fidelity of ``N(a S(r)|0>)`` with ``S(r)|1>``."""
    subtracted = apply_annihilation(squeezed_vacuum(r, cutoff))
    if subtracted.is_zero:
        raise ZeroVectorError("subtraction from the vacuum (r = 0) gives the zero vector")
    single = apply_squeeze(number_state(1, cutoff), 0, r)
    return fidelity(subtracted, single)


def parity_weight(s: FockState, parity: int, mode: int = 0) -> float:
    """Largest amplitude magnitude with photon number of the given parity in ``mode``."""
    idx = np.arange(parity % 2, s.cutoff + 1, 2)
    sel = np.take(s.amplitudes, idx, axis=mode)
    return float(np.max(np.abs(sel))) if sel.size else 0.0


def loss_commutation_check(psi: FockState, loss: float) -> float:
    """Distance between ``a B(L)|psi,0>`` and ``B(L) a|psi,0>`` after normalization."""
    if psi.mode_count != 1:
        raise FockError("loss check takes a single-mode state")
    if psi.is_zero or apply_annihilation(psi).is_zero:
        raise ZeroVectorError("subtraction from the vacuum gives the zero vector")
    both = add_vacuum_mode(psi)
    lhs = apply_annihilation(apply_beamsplitter(both, (0, 1), loss), 0)
    rhs = apply_beamsplitter(apply_annihilation(both, 0), (0, 1), loss)
    return aligned_distance(lhs, rhs)


def pair_apply_ratio_check(c_gg: float, c_ggp: float, cutoff: int = 4) -> tuple[float, float]:
    """Probabilities of ``|3,0>`` and ``|2,1>`` after ``c_gg a^dag^2 + 2 c_ggp a^dag b^dag`` on ``|1,0>``."""
    if c_gg == 0 and c_ggp == 0:
        raise ValueError("pair operator is zero")
    one = number_state((1, 0), cutoff)
    aa = apply_creation(apply_creation(one, 0), 0)
    ab = apply_creation(apply_creation(one, 1), 0)
    out = one._with(c_gg * aa.amplitudes + 2 * c_ggp * ab.amplitudes).normalized()
    return abs(out.amplitude(3, 0)) ** 2, abs(out.amplitude(2, 1)) ** 2


def dump_csv(s: FockState, path, threshold: float = DUMP_THRESHOLD):
    """Write amplitudes above ``threshold`` as ``n1[,n2[,n3]],re,im`` rows."""
    names = [f"n{k + 1}" for k in range(s.mode_count)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names + ["re", "im"])
        for ns in itertools.product(range(s.cutoff + 1), repeat=s.mode_count):
            c = s.amplitudes[ns]
            if abs(c) > threshold:
                w.writerow(list(ns) + [f"{c.real:.12e}", f"{c.imag:.12e}"])
