"""Mean Assouad dimension and spectrum of symbolic dynamical systems.

Exact closed-form dimensions for carpet systems built over pair
subshifts, scale-sweep covering-count estimators, full-shift covering
tools over finite real alphabets, and a verification suite for the
inequalities the theory asserts.
"""

from . import errors
from .carpet import (
    ApproxSquare,
    CarpetSystem,
    ClosedFormDims,
    CoverCount,
    ScaleIndices,
    approx_square,
    closed_form_dims,
    cover_count_formula,
    cover_count_oracle,
    oracle_sweep,
    scale_indices,
    spectrum_closed_form,
    sup_cover_count,
    transition_theta,
)
from .entropy import (
    EntropyEstimate,
    conditional_entropy,
    fekete_extrapolate,
    projection_entropy,
    sofic_entropy,
    spectral_radius,
    topological_entropy,
)
from .estimate import (
    DimensionReport,
    ScaleGrid,
    SpectrumCurve,
    Verdict,
    bilipschitz_check,
    check_bounds,
    estimate_madim,
    estimate_spectrum,
    fit_dimension,
    madim_grid,
    order_exchange_check,
    pair_grid,
    subadditivity_check,
    theta_grid,
    uniform_scale_grid,
    wandering_demo,
    wandering_verdicts,
)
from .fullshift import (
    RealAlphabet,
    f_lambda_alphabet,
    f_lambda_spectrum,
    interval_cover_count,
    interval_pack_count,
    make_alphabet,
    product_cover_bounds,
    sinfty_curve,
)
from .symbolic import (
    FULL,
    PairSFT,
    SoficAutomaton,
    WordSet,
    count_projected_words,
    count_words,
    enumerate_words,
    fiber_count,
    make_sft,
    project_automaton,
    sup_fiber_count,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
