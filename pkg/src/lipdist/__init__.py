"""Weighted distances, Lipschitz-type seminorms and their numerical checks.

The subpackages follow the data flow: ``metric`` and ``domains`` provide
curves, weighted distances and domain geometry; ``lipschitz`` estimates
seminorms and dilatations of sampled maps; ``moebius`` and ``analytic``
supply analytic maps with exact differentials; ``harness`` and ``suite``
combine them into checks of explicit inequalities.
"""

__version__ = "0.1.0"

from .analytic import ClosedFormMap, PolynomialMap, load_corpus, random_polynomial_map  # noqa: E402
from .domains import DiscretizedDomain, cone_arc, cone_arc_family  # noqa: E402
from .exceptions import (  # noqa: E402
    ConfigError,
    ConvergenceError,
    EvaluationError,
    InvalidInputError,
    LipdistError,
    MajorantDegeneracyError,
    NearBoundaryError,
    NoPathError,
    PreconditionError,
)
from .functions import Majorant, WeightField  # noqa: E402
from .harness import TheoremCheck  # noqa: E402
from .lipschitz import (  # noqa: E402
    HolderSeminorm,
    LocalHolderSeminorm,
    RegularityConstant,
    TabulatedMap,
    TargetSet,
    UpperDilatation,
    bloch_norm,
    holder_seminorm,
    local_holder_seminorm,
    p_regular_constant,
    regular_oscillation_constant,
    upper_dilatation,
)
from .metric import CurveFamily, GridGraph, PolylineCurve, curve_integral, weighted_distance  # noqa: E402
from .moebius import MoebiusTransform, operator_norm, schwarz_pick_check  # noqa: E402

__all__ = [
    "ClosedFormMap",
    "ConfigError",
    "ConvergenceError",
    "CurveFamily",
    "DiscretizedDomain",
    "EvaluationError",
    "GridGraph",
    "HolderSeminorm",
    "InvalidInputError",
    "LipdistError",
    "LocalHolderSeminorm",
    "Majorant",
    "MajorantDegeneracyError",
    "MoebiusTransform",
    "NearBoundaryError",
    "NoPathError",
    "PolylineCurve",
    "PolynomialMap",
    "PreconditionError",
    "RegularityConstant",
    "TabulatedMap",
    "TargetSet",
    "TheoremCheck",
    "UpperDilatation",
    "bloch_norm",
    "cone_arc",
    "cone_arc_family",
    "curve_integral",
    "holder_seminorm",
    "load_corpus",
    "local_holder_seminorm",
    "operator_norm",
    "p_regular_constant",
    "random_polynomial_map",
    "regular_oscillation_constant",
    "schwarz_pick_check",
    "upper_dilatation",
    "weighted_distance",
]
