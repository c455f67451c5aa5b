"""Fourier restriction norms on discrete Cantor sets.

The package measures how much of a function supported on a discrete
Cantor set survives a discrete Fourier transform followed by
restriction to the same set.  The decay exponent of that norm in the
set's order, certified from below by submultiplicativity, is the
quantity of interest; alphabet-space statistics, concentration bounds,
and open quantum map spectra build on it.
"""

from .cantor import (
    N_CAP,
    Alphabet,
    CantorSet,
    alphabet_to_string,
    build_cantor,
    contains,
    dimension,
    new_alphabet,
    parse_alphabet,
)
from .errors import (
    CapExceeded,
    CertificateViolation,
    FupError,
    InvariantViolation,
    TrivialAlphabet,
    ValidationError,
)
from .fourier import (
    dft,
    dft_many,
    idft,
    idft_many,
    restricted_apply,
    restricted_apply_adjoint,
)
from .spectral import (
    GramMatrix,
    SpectralReport,
    beta_lower,
    cantor_block,
    envelopes,
    gram_matrix,
    r1_dense,
    rk_power,
    rk_power_many,
    schur_bound,
)
from .alphabets import (
    AlphabetSpace,
    GoodSetReport,
    MeanResult,
    TailReport,
    alphabet_space,
    concentration_bound,
    enumerate_alphabets,
    exp_sum,
    expectation,
    good_set_complement_measure,
    good_set_member,
    lipschitz_norm,
    metric,
    rank_alphabet,
    sample_alphabet,
    space_cardinality,
    tail_probability,
    unrank_alphabet,
    wilson_interval,
)
from .permutations import (
    LiftReport,
    PartitionChain,
    Permutation,
    build_prefix_chain,
    chain_from_json,
    chain_to_json,
    enumerate_permutations,
    lift_and_compare,
    metric_p,
    metric_space_tail_bound,
    new_permutation,
    permutation_space_cardinality,
    project,
    verify_length_certificate,
)
from .oqm import (
    GapRow,
    OpenQuantumMap,
    RadiusReport,
    apply_bn,
    apply_bn_adjoint,
    bn_norm,
    build_bn,
    gap_report,
    middle_factor,
    spectral_radius,
)
from .experiments import (
    CurvePoint,
    FupcRecord,
    beta_sweep_exact,
    beta_sweep_mc,
    concentration_experiment,
    derive_seed,
    expectation_experiment,
    figure1_dataset,
    fupc_experiment,
    theorem_floor,
)

__version__ = "0.1.0"

__all__ = [
    "N_CAP",
    "Alphabet",
    "CantorSet",
    "alphabet_to_string",
    "build_cantor",
    "contains",
    "dimension",
    "new_alphabet",
    "parse_alphabet",
    "CapExceeded",
    "CertificateViolation",
    "FupError",
    "InvariantViolation",
    "TrivialAlphabet",
    "ValidationError",
    "dft",
    "dft_many",
    "idft",
    "idft_many",
    "restricted_apply",
    "restricted_apply_adjoint",
    "GramMatrix",
    "SpectralReport",
    "beta_lower",
    "cantor_block",
    "envelopes",
    "gram_matrix",
    "r1_dense",
    "rk_power",
    "rk_power_many",
    "schur_bound",
    "AlphabetSpace",
    "GoodSetReport",
    "MeanResult",
    "TailReport",
    "alphabet_space",
    "concentration_bound",
    "enumerate_alphabets",
    "exp_sum",
    "expectation",
    "good_set_complement_measure",
    "good_set_member",
    "lipschitz_norm",
    "metric",
    "rank_alphabet",
    "sample_alphabet",
    "space_cardinality",
    "tail_probability",
    "unrank_alphabet",
    "wilson_interval",
    "LiftReport",
    "PartitionChain",
    "Permutation",
    "build_prefix_chain",
    "chain_from_json",
    "chain_to_json",
    "enumerate_permutations",
    "lift_and_compare",
    "metric_p",
    "metric_space_tail_bound",
    "new_permutation",
    "permutation_space_cardinality",
    "project",
    "verify_length_certificate",
    "GapRow",
    "OpenQuantumMap",
    "RadiusReport",
    "apply_bn",
    "apply_bn_adjoint",
    "bn_norm",
    "build_bn",
    "gap_report",
    "middle_factor",
    "spectral_radius",
    "CurvePoint",
    "FupcRecord",
    "beta_sweep_exact",
    "beta_sweep_mc",
    "concentration_experiment",
    "derive_seed",
    "expectation_experiment",
    "figure1_dataset",
    "fupc_experiment",
    "theorem_floor",
    "__version__",
]
