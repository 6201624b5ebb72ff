"""Gowers norms, dense models and property testers on the middle slice of the Boolean cube."""

__version__ = "0.1.0"

from .bitcore import (
    BitVector,
    and_,
    as_table,
    character_table,
    pointwise_combine,
    read_table,
    weight,
    write_table,
    xor,
)
from .fourier import FourierSpectrum, character_eval, inverse_wht, level_inequality_report, level_weight, wht
from .gowers import GowersEstimate, derivative, gowers_norm_bruteforce, gowers_norm_exact, gowers_norm_mc
from .nonclassical import (
    RegimeError,
    TorusPolynomial,
    additive_derivative,
    bias,
    biased_rank_witness,
    classical_polynomial,
    correlation,
    degree,
    residue_decomposition_check,
    verify_degree,
    weight_polynomial,
)
from .slicemodel import (
    AtomAlgebra,
    DomainSpec,
    all_in_slice_probability,
    atom_weight_determinism_check,
    dense_model_distance,
    indicator,
    joint_slice_probability,
    orbit_enumerate,
    orbit_size,
    residue_spec,
    sample_conditioned,
    slice_spec,
    weight_intersection_residue,
)
from .testers import (
    agreement,
    decode_linear,
    gowers_test_pass_rate,
    linearity_pass_rate,
    max_fourier_lower_bound_check,
    parallelepiped_probability_check,
    planted_linear,
    random_slice_function,
)
