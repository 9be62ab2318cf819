"""Simulated quantum homodyne tomography with closed-form oracles at every stage."""

from .errors import (
    EstimationError,
    InvalidArgumentError,
    TomographyError,
    TruncationTooSmallError,
    WindowTooSmallError,
)
from .fock import (
    DensityMatrix,
    StateDescriptor,
    hermite_basis,
    kernel_from_state,
    kernel_gram_psd_check,
    kernel_trace,
    make_state,
    validate_state,
)
from .grids import Grid1D, Grid2D, GridFunction2D, ThetaGrid
from .povm import (
    PovmElement,
    Sinogram,
    box_probability,
    completeness_singular_values,
    moment_profile,
    position_overlap_matrix,
    povm_element,
    quadrature_density,
    sinogram,
    tail_mass,
)
from .radon import (
    back_projection,
    lambda_filter_fft,
    lambda_filter_pv_oracle,
    radon_transform,
    reconstruct_state,
    reconstruct_wigner,
)
from .sampler import SampleSet, draw_samples, empirical_box_frequency, empirical_mean
from .wigner import char_function, char_slice_check, fock_projection, wigner, wigner_fock_oracle

__version__ = "0.1.0"
