"""Convolution and exact deconvolution with smooth even kernels.

Polynomials convolved with an even rapidly decaying unit-mass kernel stay
polynomials of the same degree, and the map is invertible in closed form;
arbitrary sampled signals are deconvolved by a truncated series of iterated
convolutions.  See README.md for the full tour.
"""

from .deconvolution import (
    DeconvConfig,
    DeconvReport,
    explicit_inverse_series,
    inverse_operator,
    make_sinc_filter,
    recover_with_filter,
    spectral_factor,
)
from .errors import (
    DeconvError,
    DivergenceError,
    InputError,
    ParameterError,
    PrecisionError,
    ResolutionError,
)
from .kernels import (
    AdmissibilityReport,
    BumpKernel,
    GaussianKernel,
    Kernel,
    TabulatedKernel,
    make_kernel,
)
from .multipoly import MultiPolynomial, convolve_multipoly, invert_multipoly
from .polynomials import ConvOperator, Polynomial1D
from .signals import (
    GridSignal,
    KernelTaps,
    Spectrum,
    convolve_signal,
    dft,
    discretize_kernel,
    idft,
    interior_rel_l2,
    sample_function,
    signal_from_csv,
    signal_to_csv,
    spectrum_to_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "BumpKernel",
    "ConvOperator",
    "DeconvConfig",
    "DeconvError",
    "DeconvReport",
    "DivergenceError",
    "GaussianKernel",
    "GridSignal",
    "InputError",
    "Kernel",
    "KernelTaps",
    "MultiPolynomial",
    "ParameterError",
    "Polynomial1D",
    "PrecisionError",
    "ResolutionError",
    "Spectrum",
    "TabulatedKernel",
    "convolve_multipoly",
    "convolve_signal",
    "dft",
    "discretize_kernel",
    "explicit_inverse_series",
    "idft",
    "interior_rel_l2",
    "inverse_operator",
    "invert_multipoly",
    "make_kernel",
    "make_sinc_filter",
    "recover_with_filter",
    "sample_function",
    "signal_from_csv",
    "signal_to_csv",
    "spectral_factor",
    "spectrum_to_csv",
]
