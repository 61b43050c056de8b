"""Matrix-weighted Haar bases, band operators and T1 certification on finite
dyadic trees: adapted orthonormal systems, A2/reverse-Holder characteristics,
testing constants, paraproducts, Carleson embedding and stopping trees, with
exact operator-norm comparison against the theorem-style bounds."""

from .carleson import (
    CarlesonInstance,
    StoppingTree,
    build_stopping_tree,
    carleson_from_operator,
    cet1_testing_constant,
    cet2_testing_constant,
    embedding_sharp_constant,
    find_lambda_star,
    stopping_decay,
)
from .certifier import (
    CertificationReport,
    TestingConstants,
    build_paraproduct,
    certify,
    testing_a1,
    testing_a2_dual,
    testing_a3,
    testing_constants,
    testing_local,
)
from .errors import (
    BadParams,
    DyadT1Error,
    LeafHasNoChildren,
    OutOfTree,
    ShapeMismatch,
    SingularLeaf,
)
from .haar import HaarSystem, build_system, weighted_expectation, weighted_norm
from .kernels import BACKEND as KERNEL_BACKEND
from .operators import (
    BandOperator,
    WellLocReport,
    identity_operator,
    is_band,
    is_well_localized,
    make_counterexample,
    make_dyadic_shift,
    make_haar_multiplier,
    make_random_band,
    matrix_form,
    operator_norm,
    weighted_adjoint_apply,
    weighted_apply,
    zero_operator,
)
from .tree import DyadicInterval, TreeConfig, ancestor, contains, tree_distance
from .weights import (
    Characteristics,
    WeightGrid,
    a2_characteristic,
    generate_weight,
    inverse_weight,
    r2_estimate,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BadParams",
    "BandOperator",
    "CarlesonInstance",
    "CertificationReport",
    "Characteristics",
    "DyadT1Error",
    "DyadicInterval",
    "HaarSystem",
    "KERNEL_BACKEND",
    "LeafHasNoChildren",
    "OutOfTree",
    "ShapeMismatch",
    "SingularLeaf",
    "StoppingTree",
    "TestingConstants",
    "TreeConfig",
    "WeightGrid",
    "WellLocReport",
    "a2_characteristic",
    "ancestor",
    "build_paraproduct",
    "build_stopping_tree",
    "build_system",
    "carleson_from_operator",
    "certify",
    "cet1_testing_constant",
    "cet2_testing_constant",
    "contains",
    "embedding_sharp_constant",
    "find_lambda_star",
    "generate_weight",
    "identity_operator",
    "is_band",
    "inverse_weight",
    "is_well_localized",
    "make_counterexample",
    "make_dyadic_shift",
    "make_haar_multiplier",
    "make_random_band",
    "matrix_form",
    "operator_norm",
    "r2_estimate",
    "stopping_decay",
    "testing_a1",
    "testing_a2_dual",
    "testing_a3",
    "testing_constants",
    "testing_local",
    "tree_distance",
    "weighted_adjoint_apply",
    "weighted_apply",
    "weighted_expectation",
    "weighted_norm",
    "zero_operator",
]
