"""Thinned isophoric linear arrays synthesized by autocorrelation matching."""

from .afpa import AuxExcitations, InfeasibleMaskError, solve_afpa
from .autocorr import autocorrelation, spectrum, target_fpe, target_me
from .layout import GridSpec, Mask, cyclic_shift, flat_mask, irregular_mask, tapered_mask
from .optimizer import GaConfig, SynthesisResult, evolve, run_fpe_ad, run_me_ad
from .pattern import mask_matching_error, power_pattern, sidelobe_level
from .pd_baseline import run_pd

__version__ = "0.1.0"

__all__ = [
    "AuxExcitations", "GaConfig", "GridSpec", "InfeasibleMaskError", "Mask", "SynthesisResult",
    "autocorrelation", "cyclic_shift", "evolve", "flat_mask", "irregular_mask",
    "mask_matching_error", "power_pattern", "run_fpe_ad", "run_me_ad", "run_pd",
    "sidelobe_level", "solve_afpa", "spectrum", "tapered_mask", "target_fpe", "target_me",
]
