"""Photon subtraction from continuous squeezed light: wavepacket impurity and filter purification."""
from .filters import (
    DegenerateRatesError,
    FilterParams,
    ModeMatchReport,
    closed_hr_r,
    closed_hr_rr,
    filter_response,
    filter_scan,
    heralded_mode,
    mode_match_filtered_closed,
    mode_match_filtered_numeric,
    transfer,
)
from .fock import (
    CutoffError,
    FockError,
    FockState,
    HeraldResult,
    ZeroVectorError,
    apply_annihilation,
    apply_beamsplitter,
    apply_creation,
    apply_squeeze,
    loss_commutation_check,
    number_state,
    pair_apply_ratio_check,
    squeezed_single_photon_check,
    squeezed_vacuum,
    subtract_via_tap,
    vacuum,
)
from .opo import OpoParams, SqueezingSpectrumPoint
from .signals import (
    DeltaLike,
    ExpPoly,
    Grid,
    GridError,
    IllConditionedError,
    Sampled,
    Signal,
    SignalError,
    ZeroNormError,
    anticausal_exp,
    both_side_exp,
    causal_exp,
    conjugate,
    convolve,
    fourier,
    inner_product,
    inverse_fourier,
    norm,
    normalize,
    time_reverse,
)
from .wavepacket import (
    ModeLadder,
    WavepacketVariances,
    equiv_loss_curve,
    equivalent_loss,
    lorentz_wavepacket,
    mode_match,
    pair_mode_ladder,
    wavepacket_variances,
    weak_pump_loss,
)

__version__ = "0.1.0"
