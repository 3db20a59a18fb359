"""Scalar products of Bethe vectors in the generalised SU(2) model.

Exact determinant evaluators, a Bethe-equation solver, an explicit
Hilbert-space oracle for the inhomogeneous XXX chain and the semiclassical
coefficients F0, F1 by contour quadrature.
"""

from .bethe import (
    BetheState,
    bethe_residual,
    find_state,
    one_cut_state,
    solve,
    string_seeds,
    transfer_eigenvalue,
)
from .contour import Contour, default_contour, ellipse, from_points
from .dilog import dilog
from .errors import BetheError, OffShellWarning
from .exact import (
    AFunctionalResult,
    ResidueWeights,
    a_coulomb_sum,
    a_fredholm_det,
    a_log_series,
    a_ratio_det,
    log_a,
    residue_weights,
    scalar_product,
    to_hermitian,
)
from .model import (
    InhomogeneousXXXModel,
    ModelFunctions,
    RapiditySet,
    RationalFunction,
    baxter_eval,
    f_eval,
    pseudo_momentum,
    pseudo_momentum_tracked,
    weight_function,
)
from .oracle import (
    ChainSpec,
    build_monodromy,
    oracle_scalar_product,
    oracle_transfer_check,
)
from .semiclassical import (
    ExpansionReport,
    FamilyMember,
    coefficients,
    expansion_report,
    f0,
    f1,
    fit_log_slope,
    one_cut_family,
)

__all__ = [
    "AFunctionalResult",
    "BetheError",
    "BetheState",
    "ChainSpec",
    "Contour",
    "ExpansionReport",
    "FamilyMember",
    "InhomogeneousXXXModel",
    "ModelFunctions",
    "OffShellWarning",
    "RapiditySet",
    "RationalFunction",
    "ResidueWeights",
    "a_coulomb_sum",
    "a_fredholm_det",
    "a_log_series",
    "a_ratio_det",
    "baxter_eval",
    "bethe_residual",
    "build_monodromy",
    "coefficients",
    "default_contour",
    "dilog",
    "ellipse",
    "expansion_report",
    "f0",
    "f1",
    "f_eval",
    "find_state",
    "fit_log_slope",
    "from_points",
    "log_a",
    "one_cut_family",
    "one_cut_state",
    "oracle_scalar_product",
    "oracle_transfer_check",
    "pseudo_momentum",
    "pseudo_momentum_tracked",
    "residue_weights",
    "scalar_product",
    "solve",
    "string_seeds",
    "to_hermitian",
    "transfer_eigenvalue",
    "weight_function",
]
__version__ = "0.1.0"
