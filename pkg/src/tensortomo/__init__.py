"""Symmetric and elastic tensor-field decompositions and ray transforms on 2-D grids.

The line-integral kernel is compiled with Cython when available; set
``TENSORTOMO_PURE_PYTHON=1`` before import to force the NumPy fallback.
"""
from .decompose import (ElasticSplit, MeanZeroError, Sym2Split, decompose_elastic, decompose_sym2,
                        mean_zero_necessity_probe, pointwise_split_elastic, pointwise_split_sym2)
from .grid import DecayGateError, GaussPoly, Grid2, GridField, mean_integral
from .raytransforms import KERNEL_BACKEND, LineGrid, Sinogram
from .spectral import SpectralField, fft_field, ifft_field
from .tensor_core import ElasticTensor2, PolarizedRay, SymTensor, TensorOrderError

__version__ = "0.1.0"

__all__ = [
    "DecayGateError", "ElasticSplit", "ElasticTensor2", "GaussPoly", "Grid2", "GridField",
    "KERNEL_BACKEND", "LineGrid", "MeanZeroError", "PolarizedRay", "Sinogram", "SpectralField",
    "Sym2Split", "SymTensor", "TensorOrderError", "decompose_elastic", "decompose_sym2",
    "fft_field", "ifft_field", "mean_integral", "mean_zero_necessity_probe",
    "pointwise_split_elastic", "pointwise_split_sym2",
]
