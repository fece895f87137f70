"""Scalar expression language: parsing, differentiation, simplification, evaluation."""

from .nodes import (
    FUNCTIONS,
    ONE,
    ZERO,
    Add,
    Const,
    DomainError,
    Expr,
    ExprError,
    Func,
    MissingCoordinateError,
    Mul,
    Pow,
    Sym,
    add,
    arcsin,
    arctan,
    as_expr,
    cos,
    count_nodes,
    diff_expr,
    div,
    eval_expr,
    exp,
    expand,
    func,
    log,
    mul,
    neg,
    power,
    simplify,
    sin,
    sqrt,
    subs,
    sym,
    tan,
    to_string,
)
from .parser import ParseError, parse_expr
from .sampling import (
    DEFAULT_POINTS,
    DEFAULT_SEED,
    DEFAULT_TOL,
    DomainBox,
    SamplePoint,
    exprs_equivalent,
    max_residual,
    relative_residual,
    sample_points,
)

__all__ = [name for name in dir() if not name.startswith("_")]
