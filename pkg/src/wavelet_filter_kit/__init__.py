"""Rational N-band wavelet filters: construction, realization, verification."""

from .config import WaveletKitConfig
from .filters import BoxPoint, Factor, FilterParameters, wavelet_eval
from .realization import Realization, realize_wavelet

__all__ = [
    "BoxPoint",
    "Factor",
    "FilterParameters",
    "Realization",
    "WaveletKitConfig",
    "realize_wavelet",
    "wavelet_eval",
]
