"""Backward reachability for max-plus linear systems.

Computes (approximations of) the states from which a max-plus linear system
x(k+1) = A (x) x(k) (+) B (x) u(k) can be steered into a target region built
from tropical affine half-spaces by complement, union and intersection.
Results are finite unions of tropical polyhedra in generator form, validated
at small scale against an exact piecewise-affine / difference-bound oracle.
"""

from .scalars import EPS, INF
from .maxplus import (
    mat_apply,
    mat_mul,
    mat_power,
    matrix,
    residuation_coeff,
    scalar_product,
    support,
    vector,
)
from .cones import (
    AffineHalfSpace,
    ConeMForm,
    ConeVForm,
    HalfSpace,
    extremal_filter,
    mform_to_vform,
    span_member,
)
from .approx import (
    Complement,
    Empty,
    Halfspace,
    Intersection,
    SetExpr,
    Union,
    UnionOfPolyhedra,
    approx_set,
    eval_setexpr,
    union_member,
)
from .reach import (
    ControlResult,
    MplSystem,
    ReachResult,
    extract_control,
    n_step_backward,
    one_step_backward,
)
from .oracle import (
    DbmUnion,
    OracleCapExceeded,
    dbm_union_member,
    oracle_backward,
    oracle_n_step,
)
from .formats import ProblemFile, ResultFile, parse_problem

__version__ = "0.1.0"

__all__ = [
    "EPS",
    "INF",
    "matrix",
    "vector",
    "mat_apply",
    "mat_mul",
    "mat_power",
    "scalar_product",
    "support",
    "residuation_coeff",
    "AffineHalfSpace",
    "ConeMForm",
    "ConeVForm",
    "HalfSpace",
    "extremal_filter",
    "mform_to_vform",
    "span_member",
    "SetExpr",
    "Empty",
    "Halfspace",
    "Complement",
    "Union",
    "Intersection",
    "UnionOfPolyhedra",
    "approx_set",
    "eval_setexpr",
    "union_member",
    "MplSystem",
    "ReachResult",
    "ControlResult",
    "one_step_backward",
    "n_step_backward",
    "extract_control",
    "DbmUnion",
    "OracleCapExceeded",
    "oracle_backward",
    "oracle_n_step",
    "dbm_union_member",
    "ProblemFile",
    "ResultFile",
    "parse_problem",
    "__version__",
]
