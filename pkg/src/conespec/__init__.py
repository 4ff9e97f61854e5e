"""Cone-preserving operators on complex spaces: spectra, positivity certificates and flows."""

__version__ = "0.1.0"

from .cones import (
    ArcSet,
    Complexified,
    Cone,
    DecompositionSpec,
    Generated,
    Orthant,
    Polyhedral,
    Restricted,
    Transformed,
    arc_feasible,
    circle_align,
    cone_meets_subspace,
    find_proper_subcone,
    projectively_proper,
)
from .dynamics import asymptotic_profile, estimate_growth, evolve, gamma_residual, monitor_cone_invariance
from .krt import (
    certify_dominant,
    certify_real_cone,
    certify_split,
    extract_perron_pair,
    phase_family_probe,
    search_counterexample,
)
from .linalg import eigen_spectrum, invariant_split, multiplicities
from .positivity import (
    certify_positive,
    certify_rotational_strong_positivity,
    check_interior_mapping,
    complexify,
)
from .tolerances import DEFAULT, STRICT, Tolerances
