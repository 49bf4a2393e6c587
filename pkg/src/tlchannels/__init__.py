"""Temperley-Lieb quantum channels for O_N^+ and SU(2)."""

__version__ = "0.1.0"

from .channels import (
    LEFT,
    RIGHT,
    StinespringChannel,
    TLChannel,
    apply,
    build_channel,
    choi,
    choi_theorem_deviation,
    complementary,
    compose,
    covariant_state,
    kraus_operators,
    tensor,
)
from .infoquant import (
    CapacityBounds,
    Descent,
    Ensemble,
    MOEReport,
    PaperWitness,
    RandomPure,
    capacity_bounds,
    coherent_information,
    holevo_of_ensemble,
    min_output_entropy,
    moe_witness_state,
    q1_witness_state,
    von_neumann_entropy,
)
from .qalg import AdmissibilityError, AdmissibleTriple, GroupSpec, dim_irrep, quantum_integer, theta_net
from .recoupling import (
    SpectrumReport,
    compare_spectra,
    six_j,
    tensor_output_spectrum_bruteforce,
    tensor_output_spectrum_formula,
    tet_net,
    zero_eigenvalue_formula,
)
from .structure import PPTReport, ppt_check, purity, range_dimension, verify_degrading_identity
from .tlrep import NumericalError, ResourceCapError, cg_isometry, jones_wenzl_basis, jones_wenzl_projector

__all__ = [
    "__version__",
    "AdmissibilityError",
    "AdmissibleTriple",
    "CapacityBounds",
    "Descent",
    "Ensemble",
    "GroupSpec",
    "LEFT",
    "MOEReport",
    "NumericalError",
    "PPTReport",
    "PaperWitness",
    "RIGHT",
    "RandomPure",
    "ResourceCapError",
    "SpectrumReport",
    "StinespringChannel",
    "TLChannel",
    "apply",
    "build_channel",
    "capacity_bounds",
    "cg_isometry",
    "choi",
    "choi_theorem_deviation",
    "coherent_information",
    "compare_spectra",
    "complementary",
    "compose",
    "covariant_state",
    "dim_irrep",
    "holevo_of_ensemble",
    "jones_wenzl_basis",
    "jones_wenzl_projector",
    "kraus_operators",
    "min_output_entropy",
    "moe_witness_state",
    "ppt_check",
    "purity",
    "q1_witness_state",
    "quantum_integer",
    "range_dimension",
    "six_j",
    "tensor",
    "tensor_output_spectrum_bruteforce",
    "tensor_output_spectrum_formula",
    "tet_net",
    "theta_net",
    "verify_degrading_identity",
    "von_neumann_entropy",
    "zero_eigenvalue_formula",
]
